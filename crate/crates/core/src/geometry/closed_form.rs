//! Hand-derived closed forms for derivatives of the modulation, used to
//! cross-check the jet-synthesized tables. Valid for unit mass.

use super::fields::cross_e;
use super::PhasePoint;
use crate::jet::{Jet, Real};
use crate::lpfourier::cutoff::psi_ge;

struct Spatial {
    xv: f64,
    root_s: f64,
    cut: f64,
    cut_slope: f64,
    omega_plus: f64,
    g: f64,
}

fn spatial(p: &PhasePoint) -> Spatial {
    let k = p.kin();
    let j = psi_ge(&Jet::variable(1, 1, 0, k.s), 0);
    Spatial {
        xv: k.xv,
        root_s: k.s.sqrt(),
        cut: j.value(),
        cut_slope: j.coeff(&[1]),
        omega_plus: k.omega_plus(),
        g: k.g,
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∇x d̃`; requires `x ≠ 0`.
pub fn grad_x_dtilde(p: &PhasePoint) -> [f64; 3] {
    let s = spatial(p);
    std::array::from_fn(|i| {
        let lever = s.xv * p.v[i] + p.x[i];
        let grad_wp = p.v[i] + lever / s.root_s;
        -(s.cut * grad_wp + 2.0 * s.omega_plus * s.cut_slope * lever) / s.g
    })
}

/// `(c, e)` with `(Ṽ_i·∇v − t(1+|v|²)^{−1/2} Ṽ_i·∇x) ω = c·d̃ + e`; requires
/// `x ≠ 0` and `v ≠ 0`.
pub fn angular_omega_split(i: usize, p: &PhasePoint) -> (f64, f64) {
    let s = spatial(p);
    let w = cross_e(i, &p.vtilde().expect("needs v ≠ 0"));
    let wx = dot(&w, &p.x);
    let omega = s.cut * s.omega_plus;
    let c = -s.g * wx * (s.cut / s.root_s + 2.0 * s.omega_plus * s.cut_slope);
    let e = wx * s.omega_plus * s.cut * (1.0 - s.cut) / s.root_s
        + 2.0 * s.omega_plus * s.cut_slope * wx * (s.xv - omega);
    (c, e)
}

/// `(c, e)` with `(ṽ·∇v − t(1+|v|²)^{−3/2} ṽ·∇x) ω = c·d̃ − t|v|(1+|v|²)^{−3/2}ψ≥0 + e`.
pub fn radial_omega_split(p: &PhasePoint) -> (f64, f64) {
    let s = spatial(p);
    let vt = p.vtilde().expect("needs v ≠ 0");
    let rx = dot(&vt, &p.x);
    let omega = s.cut * s.omega_plus;
    let c = -rx * s.g * (s.cut / s.root_s + 2.0 * s.cut_slope * s.omega_plus);
    let e = 2.0 * s.omega_plus * s.cut_slope * rx * (s.xv - omega)
        + s.omega_plus * rx / s.root_s * s.cut * (1.0 - s.cut);
    (c, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dtilde_derivative, KLetter};

    fn omega_jet(p: &PhasePoint) -> Jet {
        p.kin_jet(1).omega()
    }

    fn samples() -> Vec<PhasePoint> {
        vec![
            PhasePoint::new([0.5, 0.3, -0.2], [0.8, -0.4, 0.3]),
            PhasePoint::new([0.6, -0.2, 0.1], [0.2, 0.3, 0.1]),
            PhasePoint::new([1.5, 2.0, -0.7], [3.0, -1.0, 2.0]),
            PhasePoint::new([-0.3, 0.4, 0.5], [-0.7, 0.9, 0.2]),
        ]
    }

    #[test]
    fn spatial_gradient_of_modulation() {
        for p in samples() {
            let d = p.kin_jet(1).dtilde(2.0);
            let want = grad_x_dtilde(&p);
            for i in 0..3 {
                let mut m = [0u8; 6];
                m[i] = 1;
                assert!((d.partial(&m) - want[i]).abs() < 1e-12, "{p:?}");
            }
        }
    }

    #[test]
    fn angular_and_radial_splits() {
        for p in samples() {
            let w = omega_jet(&p);
            let k = p.kin();
            let vt = p.vtilde().unwrap();
            for t in [0.0, 1.3, 6.0] {
                let dt = k.dtilde(t);
                let grad = w.gradient();
                for i in 0..3 {
                    let a = cross_e(i, &vt);
                    let lhs: f64 = (0..3).map(|j| a[j] * grad[3 + j] - t / k.g * a[j] * grad[j]).sum();
                    let (c, e) = angular_omega_split(i, &p);
                    assert!((lhs - (c * dt + e)).abs() < 1e-11 * (1.0 + lhs.abs()));
                }
                let lhs: f64 = (0..3).map(|j| vt[j] * grad[3 + j] - t / k.g.powi(3) * vt[j] * grad[j]).sum();
                let (c, e) = radial_omega_split(&p);
                let speed = p.speed();
                let rhs = c * dt - t * speed / k.g.powi(3) * spatial(&p).cut + e;
                assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
            }
        }
    }

    #[test]
    fn table_direction_derivative_matches_gradient() {
        // In the fast regime the Sx letter is ṽ·∇x exactly.
        let p = PhasePoint::new([1.2, -0.5, 0.3], [4.0, 1.0, -2.0]);
        let (_, _, got) = dtilde_derivative(KLetter::Sx, 5.0, &p);
        let g = grad_x_dtilde(&p);
        let vt = p.vtilde().unwrap();
        assert!((got - dot(&vt, &g)).abs() < 1e-13);
    }
}
