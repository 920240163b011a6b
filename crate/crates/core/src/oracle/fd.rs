//! Finite-difference application of vector fields, nested to any depth.

use crate::error::{Result, RvnError};
use crate::geometry::VectorFieldId;

use super::literal::literal_coeffs;

/// A scalar function of `(t, x, v)`.
pub type PhaseFn<'a> = dyn Fn(f64, [f64; 3], [f64; 3]) -> f64 + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    Central2,
    Central4,
}

/// Central differences with a step proportional to `|coordinate| + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FDScheme {
    pub step: f64,
    pub stencil: Stencil,
}

impl Default for FDScheme {
    fn default() -> Self {
        FDScheme { step: 1e-4, stencil: Stencil::Central2 }
    }
}

impl FDScheme {
    pub fn central2(step: f64) -> FDScheme {
        FDScheme { step, stencil: Stencil::Central2 }
    }

    pub fn central4(step: f64) -> FDScheme {
        FDScheme { step, stencil: Stencil::Central4 }
    }

    /// Scheme for `depth` nested applications. Steps resolve the cutoff
    /// transitions (width 1/4 in `|v|`) while the round-off `ε/h^depth`
    /// stays near 10⁻⁷.
    pub fn nested(depth: usize) -> FDScheme {
        match depth {
            0 | 1 => FDScheme::central4(1e-4),
            2 => FDScheme::central4(3e-4),
            _ => FDScheme::central4(1e-3),
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.step > 1e-10 && self.step.is_finite()) {
            return Err(RvnError::Config(format!("finite-difference step {} underflows", self.step)));
        }
        Ok(())
    }

    /// `d/ds f(s)` at `s0`.
    pub fn derivative(&self, f: impl Fn(f64) -> f64, s0: f64) -> f64 {
        let h = self.step * (s0.abs() + 1.0);
        match self.stencil {
            Stencil::Central2 => (f(s0 + h) - f(s0 - h)) / (2.0 * h),
            Stencil::Central4 => {
                (8.0 * (f(s0 + h) - f(s0 - h)) - (f(s0 + 2.0 * h) - f(s0 - 2.0 * h))) / (12.0 * h)
            }
        }
    }
}

/// `(∂_t, ∇_x, ∇_v)` of `h` at a point.
pub fn fd_partials(scheme: &FDScheme, h: &PhaseFn, t: f64, x: [f64; 3], v: [f64; 3]) -> (f64, [f64; 3], [f64; 3]) {
    let dt = scheme.derivative(|s| h(s, x, v), t);
    let dx = std::array::from_fn(|i| {
        scheme.derivative(
            |s| {
                let mut y = x;
                y[i] = s;
                h(t, y, v)
            },
            x[i],
        )
    });
    let dv = std::array::from_fn(|i| {
        scheme.derivative(
            |s| {
                let mut w = v;
                w[i] = s;
                h(t, x, w)
            },
            v[i],
        )
    });
    (dt, dx, dv)
}

/// `(Λh)(t, x, v)` from literal coefficients and difference quotients.
/// The time partial is only sampled when the field has a time component.
pub fn fd_vector_field(scheme: &FDScheme, id: VectorFieldId, h: &PhaseFn, t: f64, x: [f64; 3], v: [f64; 3]) -> f64 {
    let c = literal_coeffs(id, t, x, v);
    let mut acc = 0.0;
    if c.at != 0.0 {
        acc += c.at * scheme.derivative(|s| h(s, x, v), t);
    }
    for i in 0..3 {
        if c.ax[i] != 0.0 {
            acc += c.ax[i]
                * scheme.derivative(
                    |s| {
                        let mut y = x;
                        y[i] = s;
                        h(t, y, v)
                    },
                    x[i],
                );
        }
        if c.av[i] != 0.0 {
            acc += c.av[i]
                * scheme.derivative(
                    |s| {
                        let mut w = v;
                        w[i] = s;
                        h(t, x, w)
                    },
                    v[i],
                );
        }
    }
    acc
}

/// `Λ^{ids[0]}∘…∘Λ^{ids[n−1]} h` by nesting difference quotients; the
/// leftmost field acts last.
pub fn fd_word(scheme: &FDScheme, ids: &[VectorFieldId], h: &PhaseFn, t: f64, x: [f64; 3], v: [f64; 3]) -> Result<f64> {
    scheme.check()?;
    Ok(nest(scheme, ids, h, t, x, v))
}

fn nest(scheme: &FDScheme, ids: &[VectorFieldId], h: &PhaseFn, t: f64, x: [f64; 3], v: [f64; 3]) -> f64 {
    match ids.split_first() {
        None => h(t, x, v),
        Some((first, rest)) => {
            let inner = |s: f64, y: [f64; 3], w: [f64; 3]| nest(scheme, rest, h, s, y, w);
            fd_vector_field(scheme, *first, &inner, t, x, v)
        }
    }
}

/// `[A, Λ^{word}] h = A(Λ^{word} h) − Λ^{word}(A h)` by nested differences.
pub fn fd_commutator(
    scheme: &FDScheme,
    outer: VectorFieldId,
    word: &[VectorFieldId],
    h: &PhaseFn,
    t: f64,
    x: [f64; 3],
    v: [f64; 3],
) -> Result<f64> {
    let mut left = vec![outer];
    left.extend_from_slice(word);
    let mut right = word.to_vec();
    right.push(outer);
    Ok(fd_word(scheme, &left, h, t, x, v)? - fd_word(scheme, &right, h, t, x, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::KLetter;

    #[test]
    fn monomial_derivatives_are_exact_to_stencil_order() {
        let s2 = FDScheme::central2(1e-3);
        let s4 = FDScheme::central4(1e-3);
        // Central-2 is exact on quadratics, central-4 on quartics.
        assert!((s2.derivative(|s| 3.0 * s * s - s, 0.7) - (6.0 * 0.7 - 1.0)).abs() < 1e-10);
        assert!((s4.derivative(|s| s.powi(4), 0.7) - 4.0 * 0.7f64.powi(3)).abs() < 1e-10);
        let h = |_: f64, x: [f64; 3], _: [f64; 3]| x[1] * x[1];
        let got = fd_vector_field(&s2, VectorFieldId::Dx(1), &h, 0.0, [0.0, 1.5, 0.0], [0.0; 3]);
        assert!((got - 3.0).abs() < 1e-9);
    }

    #[test]
    fn boost_on_velocity_function_keeps_only_velocity_term() {
        let s = FDScheme::central4(1e-3);
        let h = |_: f64, _: [f64; 3], v: [f64; 3]| (v[0] * 0.4 - v[2]).sin();
        let v = [0.3, -0.8, 0.5];
        let g = (1.0 + 0.09 + 0.64 + 0.25f64).sqrt();
        let got = fd_vector_field(&s, VectorFieldId::BoostTilde(0), &h, 2.0, [1.0, 2.0, 3.0], v);
        let want = g * 0.4 * (v[0] * 0.4 - v[2]).cos();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn self_commutator_vanishes() {
        let s = FDScheme::nested(2);
        let h = |_: f64, x: [f64; 3], v: [f64; 3]| (-(x[0] * x[0] + 0.5 * v[1] * v[1])).exp() * (1.0 + x[2] * v[0]);
        let id = VectorFieldId::Gamma(KLetter::Kv(1));
        let c = fd_commutator(&s, id, &[id], &h, 0.0, [0.2, -0.3, 0.5], [0.1, 0.4, -0.2]).unwrap();
        assert!(c.abs() < 1e-9, "{c}");
    }

    #[test]
    fn richardson_halving_reduces_error_fourfold() {
        let f = |s: f64| (1.3 * s).sin() * s.exp();
        let exact = 1.3 * (1.3f64 * 0.4).cos() * 0.4f64.exp() + (1.3f64 * 0.4).sin() * 0.4f64.exp();
        let e1 = (FDScheme::central2(1e-2).derivative(f, 0.4) - exact).abs();
        let e2 = (FDScheme::central2(5e-3).derivative(f, 0.4) - exact).abs();
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn tiny_steps_are_rejected() {
        let h = |_: f64, _: [f64; 3], _: [f64; 3]| 1.0;
        assert!(fd_word(&FDScheme::central2(0.0), &[], &h, 0.0, [0.0; 3], [0.0; 3]).is_err());
    }
}
