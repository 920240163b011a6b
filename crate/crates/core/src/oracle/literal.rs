//! Field coefficients written directly from their definitions, on plain
//! `f64`, sharing nothing with the geometry module.

use crate::geometry::{KLetter, VectorFieldId};

/// `(∂_t, ∇_x, ∇_v)` coefficients of a first-order field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Literal {
    pub at: f64,
    pub ax: [f64; 3],
    pub av: [f64; 3],
}

impl Literal {
    fn spatial(ax: [f64; 3], av: [f64; 3]) -> Literal {
        Literal { at: 0.0, ax, av }
    }

    fn times(self, c: f64) -> Literal {
        Literal { at: self.at * c, ax: self.ax.map(|a| a * c), av: self.av.map(|a| a * c) }
    }
}

const ZERO3: [f64; 3] = [0.0; 3];

/// Smooth step: 1 on `[0, 5/4]`, 0 beyond `3/2`, glued by `e^{−1/s}`.
pub fn bump_profile(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.25 {
        1.0
    } else if r >= 1.5 {
        0.0
    } else {
        let s = (r - 1.25) / 0.25;
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        b / (a + b)
    }
}

/// Smooth indicator of `r ≤ 2^k`.
pub fn below(r: f64, k: i32) -> f64 {
    bump_profile(r / 2f64.powi(k))
}

/// Smooth indicator of `r ≥ 2^k`.
pub fn above(r: f64, k: i32) -> f64 {
    1.0 - bump_profile(r / 2f64.powi(k - 1))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn e(i: usize) -> [f64; 3] {
    let mut u = ZERO3;
    u[i] = 1.0;
    u
}

fn lorentz(v: [f64; 3]) -> f64 {
    (1.0 + dot(v, v)).sqrt()
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = dot(v, v).sqrt();
    if n == 0.0 {
        return ZERO3;
    }
    v.map(|c| c / n)
}

/// `J[j][k] = ∂_{v_j}(v_k/√(1+|v|²))`.
fn velocity_jacobian(v: [f64; 3]) -> [[f64; 3]; 3] {
    let g = lorentz(v);
    std::array::from_fn(|j| std::array::from_fn(|k| if j == k { 1.0 / g } else { 0.0 } - v[j] * v[k] / g.powi(3)))
}

/// Row `j` of the Jacobian contracted: `Σ_j a_j J[j][k]`.
fn contract(a: [f64; 3], jac: &[[f64; 3]; 3]) -> [f64; 3] {
    std::array::from_fn(|k| (0..3).map(|j| a[j] * jac[j][k]).sum())
}

/// `ω(x, v)` with the spatial cutoff on `|x|² + (x·v)²`.
pub fn omega(x: [f64; 3], v: [f64; 3]) -> f64 {
    let xv = dot(x, v);
    let s = dot(x, x) + xv * xv;
    let cut = above(s, 0);
    if cut == 0.0 {
        return 0.0;
    }
    cut * (xv + s.sqrt())
}

/// `t/(1+|v|²) − ω/√(1+|v|²)`.
pub fn modulation(t: f64, x: [f64; 3], v: [f64; 3]) -> f64 {
    let g = lorentz(v);
    t / (g * g) - omega(x, v) / g
}

/// Direction `a` of `a·(∇_v − t J ∇_x)`.
fn bulk(a: [f64; 3], t: f64, v: [f64; 3]) -> Literal {
    let jac = velocity_jacobian(v);
    Literal::spatial(contract(a, &jac).map(|c| -t * c), a)
}

fn new_field(id: VectorFieldId, x: [f64; 3], v: [f64; 3]) -> Literal {
    let vt = unit(v);
    let w = omega(x, v);
    let g = lorentz(v);
    match id {
        VectorFieldId::SvHat => Literal::spatial(vt.map(|c| -w / (g * g) * c), vt),
        VectorFieldId::Sx => Literal::spatial(vt, ZERO3),
        VectorFieldId::OmegaHat(i) => {
            let vi = cross(e(i as usize), vt);
            Literal::spatial(vi.map(|c| -w * c), vi)
        }
        VectorFieldId::OmegaX(i) => Literal::spatial(cross(e(i as usize), vt), ZERO3),
        VectorFieldId::Kv(i) => {
            let jac = velocity_jacobian(v);
            Literal::spatial(jac[i as usize].map(|c| -g * w * c), e(i as usize))
        }
        _ => unreachable!("not a new field"),
    }
}

fn letter(l: KLetter, x: [f64; 3], v: [f64; 3]) -> Literal {
    let r = dot(v, v).sqrt();
    match l {
        KLetter::SvHat => cut(above(r, 1), || new_field(VectorFieldId::SvHat, x, v)),
        KLetter::Sx => cut(above(r, 1), || new_field(VectorFieldId::Sx, x, v)),
        KLetter::OmegaHat(i) => cut(above(r, 1), || new_field(VectorFieldId::OmegaHat(i), x, v)),
        KLetter::OmegaX(i) => cut(above(r, 1), || new_field(VectorFieldId::OmegaX(i), x, v)),
        KLetter::Kv(i) => cut(below(r, 0), || new_field(VectorFieldId::Kv(i), x, v)),
        KLetter::Dx(i) => Literal::spatial(e(i as usize), ZERO3).times(below(r, 0)),
        KLetter::RotTilde(i) => Literal::spatial(cross(e(i as usize), x), cross(e(i as usize), v)),
    }
}

fn cut(c: f64, body: impl FnOnce() -> Literal) -> Literal {
    if c == 0.0 {
        Literal::spatial(ZERO3, ZERO3)
    } else {
        body().times(c)
    }
}

/// The seven pieces `X_i` of the bulk derivative, zero-based.
fn piece(i: usize, t: f64, v: [f64; 3]) -> Literal {
    let r = dot(v, v).sqrt();
    match i {
        0 => cut(above(r, 1), || bulk(unit(v), t, v)),
        1..=3 => cut(above(r, 1), || bulk(cross(e(i - 1), unit(v)), t, v)),
        4..=6 => cut(below(r, 0), || bulk(e(i - 4), t, v)),
        _ => panic!("piece {i} out of range"),
    }
}

/// Coefficients of any field at `(t, x, v)`, unit mass.
pub fn literal_coeffs(id: VectorFieldId, t: f64, x: [f64; 3], v: [f64; 3]) -> Literal {
    match id {
        VectorFieldId::Scaling => Literal { at: t, ax: x, av: ZERO3 },
        VectorFieldId::Dx(i) => Literal::spatial(e(i as usize), ZERO3),
        VectorFieldId::Rot(i) => Literal::spatial(cross(e(i as usize), x), ZERO3),
        VectorFieldId::Boost(i) => Literal { at: x[i as usize], ax: e(i as usize).map(|c| c * t), av: ZERO3 },
        VectorFieldId::RotTilde(i) => Literal::spatial(cross(e(i as usize), x), cross(e(i as usize), v)),
        VectorFieldId::BoostTilde(i) => Literal {
            at: x[i as usize],
            ax: e(i as usize).map(|c| c * t),
            av: e(i as usize).map(|c| c * lorentz(v)),
        },
        VectorFieldId::Gamma(l) => letter(l, x, v),
        VectorFieldId::X(i) => piece(i as usize, t, v),
        VectorFieldId::KTilde(i) => {
            let g = lorentz(v);
            let foot: [f64; 3] = std::array::from_fn(|k| x[k] - v[k] / g * t);
            let c = t - g * omega(foot, v);
            let jac = velocity_jacobian(v);
            Literal::spatial(jac[i as usize].map(|m| c * m), e(i as usize))
        }
        VectorFieldId::Dv(i) => bulk(e(i as usize), t, v),
        VectorFieldId::SvHat
        | VectorFieldId::Sx
        | VectorFieldId::OmegaHat(_)
        | VectorFieldId::OmegaX(_)
        | VectorFieldId::Kv(_) => new_field(id, x, v),
    }
}
