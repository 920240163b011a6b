//! Rewriting classical words in the velocity-lifted fields.
//!
//! Each classical letter is its lifted counterpart minus a velocity part:
//! `Γ^a = Γ̃^a − w_a·∇_v` with `w = 0` for scaling and translations,
//! `w = e_i × v` for rotations and `w = √(1+|v|²) e_i` for boosts. The
//! normal form `Γ^α = Σ c_{m,γ}(v) ∂_v^m Γ̃^γ` follows from prepending one
//! letter at a time:
//!
//! `Γ^a (c ∂^m Γ̃^γ) = c [∂^m Γ̃^{aγ} − Σ_{m'≤m} C(m,m') (∂^{m'} w_j) ∂^{m−m'+e_j} Γ̃^γ]`,
//!
//! where the `(w·∇c)` terms produced by the lifted and velocity parts cancel.

use std::collections::BTreeMap;

use crate::error::{Result, RvnError};
use crate::geometry::{ALetter, AWord};
use crate::jet::{Jet, Real};

/// A velocity multi-index `∂_{v_1}^{m_0} ∂_{v_2}^{m_1} ∂_{v_3}^{m_2}`.
pub type Multi = [u8; 3];

/// `Γ^α = Σ coefficient · ∂_v^m Γ̃^γ` evaluated at one velocity, together
/// with the source weights `ã_{α;γ}` of the commuted wave equation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaExpansion {
    pub alpha: AWord,
    pub v: [f64; 3],
    pub terms: BTreeMap<(Multi, AWord), f64>,
    /// `ã_{α;γ} = Σ_m (−1)^{|m|} ∂^m (c_{m,γ} /√(1+|v|²))`.
    pub a_tilde: BTreeMap<AWord, f64>,
}

impl GammaExpansion {
    /// Every term except the leading `Γ̃^α`.
    pub fn corrections(&self) -> impl Iterator<Item = (&(Multi, AWord), &f64)> {
        let alpha = self.alpha.clone();
        self.terms.iter().filter(move |((m, g), _)| !(*m == [0, 0, 0] && *g == alpha))
    }
}

fn order(m: &Multi) -> usize {
    m.iter().map(|&k| k as usize).sum()
}

fn binom(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Velocity part of a classical letter as jets in `v`.
fn velocity_part(letter: ALetter, v: &[Jet]) -> Option<[Jet; 3]> {
    let zero = v[0].cst(0.0);
    match letter {
        ALetter::S | ALetter::Dx(_) => None,
        ALetter::Rot(i) => {
            // e_i × v
            let (j, k) = (((i + 1) % 3) as usize, ((i + 2) % 3) as usize);
            let mut w = [zero.clone(), zero.clone(), zero];
            w[k] = v[j].clone();
            w[j] = -v[k].clone();
            Some(w)
        }
        ALetter::Boost(i) => {
            let gamma = (v[0].square() + v[1].square() + v[2].square() + 1.0).sqrt();
            let mut w = [zero.clone(), zero.clone(), zero];
            w[i as usize] = gamma;
            Some(w)
        }
    }
}

/// All `m' ≤ m` componentwise.
fn sub_multis(m: Multi) -> Vec<Multi> {
    let mut out = Vec::new();
    for a in 0..=m[0] {
        for b in 0..=m[1] {
            for c in 0..=m[2] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn derivative_jet(j: &Jet, m: Multi) -> Jet {
    let mut out = j.clone();
    for (axis, &k) in m.iter().enumerate() {
        for _ in 0..k {
            out = out.deriv(axis);
        }
    }
    out
}

/// Normal form of the classical word `alpha` at velocity `v`.
pub fn expand_gamma_alpha(alpha: &AWord, v: [f64; 3], n_max: usize) -> Result<GammaExpansion> {
    let n = alpha.len();
    if n > n_max {
        return Err(RvnError::OrderOverflow { order: n, max: n_max });
    }
    let degree = 2 * n + 1;
    let vj = Jet::seed(&v, degree);
    let one = Jet::constant(3, degree, 1.0);
    let mut current: BTreeMap<(Multi, AWord), Jet> = BTreeMap::new();
    current.insert(([0; 3], AWord::empty()), one);

    for &letter in alpha.letters().iter().rev() {
        let w = velocity_part(letter, &vj);
        let mut next: BTreeMap<(Multi, AWord), Jet> = BTreeMap::new();
        let mut add = |key: (Multi, AWord), c: Jet| {
            match next.get_mut(&key) {
                Some(e) => *e = e.clone() + c,
                None => {
                    next.insert(key, c);
                }
            }
        };
        for ((m, gamma), c) in &current {
            add((*m, AWord::single(letter).concat(gamma)), c.clone());
            let Some(w) = &w else { continue };
            for mp in sub_multis(*m) {
                for (j, wj) in w.iter().enumerate() {
                    let dw = derivative_jet(wj, mp);
                    if dw.is_zero() {
                        continue;
                    }
                    let coeff = binom(m[0], mp[0]) * binom(m[1], mp[1]) * binom(m[2], mp[2]);
                    let mut target = [m[0] - mp[0], m[1] - mp[1], m[2] - mp[2]];
                    target[j] += 1;
                    add((target, gamma.clone()), -(c.clone() * dw) * coeff);
                }
            }
        }
        current = next;
    }

    let gamma_inv = (vj[0].square() + vj[1].square() + vj[2].square() + 1.0).sqrt().recip();
    let mut terms = BTreeMap::new();
    let mut a_tilde: BTreeMap<AWord, f64> = BTreeMap::new();
    for ((m, gamma), c) in current {
        let value = c.value();
        if value == 0.0 && c.is_zero() {
            continue;
        }
        let sign = if order(&m) % 2 == 0 { 1.0 } else { -1.0 };
        let weighted = c.clone() * gamma_inv.clone();
        *a_tilde.entry(gamma.clone()).or_insert(0.0) += sign * weighted.partial(&m);
        terms.insert((m, gamma), value);
    }
    Ok(GammaExpansion { alpha: alpha.clone(), v, terms, a_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NV: usize = 7;

    /// Coefficients `(∂_t, ∇_x, ∇_v)` of a letter on `(t, x, v)` jets.
    fn field(letter: ALetter, lifted: bool, z: &[Jet]) -> Vec<(usize, Jet)> {
        let (t, x, v) = (&z[0], &z[1..4], &z[4..7]);
        let mut out = Vec::new();
        match letter {
            ALetter::S => {
                out.push((0, t.clone()));
                for a in 0..3 {
                    out.push((1 + a, x[a].clone()));
                }
            }
            ALetter::Dx(i) => out.push((1 + i as usize, t.cst(1.0))),
            ALetter::Rot(i) => {
                let (j, k) = (((i + 1) % 3) as usize, ((i + 2) % 3) as usize);
                out.push((1 + k, x[j].clone()));
                out.push((1 + j, -x[k].clone()));
                if lifted {
                    out.push((4 + k, v[j].clone()));
                    out.push((4 + j, -v[k].clone()));
                }
            }
            ALetter::Boost(i) => {
                out.push((0, x[i as usize].clone()));
                out.push((1 + i as usize, t.clone()));
                if lifted {
                    let g = (v[0].square() + v[1].square() + v[2].square() + 1.0).sqrt();
                    out.push((4 + i as usize, g));
                }
            }
        }
        out
    }

    fn apply(word: &[ALetter], lifted: bool, f: &Jet, z: &[Jet]) -> Jet {
        let mut out = f.clone();
        for &l in word.iter().rev() {
            let mut acc = out.cst(0.0);
            for (var, c) in field(l, lifted, z) {
                acc = acc + c * out.deriv(var);
            }
            out = acc;
        }
        out
    }

    fn test_function(z: &[Jet]) -> Jet {
        let e = z[0].clone() * 0.3 - z[1].clone() * 0.2 + z[2].clone() * z[3].clone() * 0.1 + z[4].clone() * 0.4
            - z[5].clone() * z[6].clone() * 0.3
            + z[0].clone() * z[6].clone() * 0.2
            + z[1].clone() * z[5].clone() * 0.1;
        e.exp() * (z[4].square() * 0.5 + z[2].clone() + 1.3)
    }

    fn check_word(word: AWord) {
        let point = [0.7, 0.3, -0.5, 0.4, 0.6, -0.2, 0.9];
        let v = [point[4], point[5], point[6]];
        let z = Jet::seed(&point, 2 * word.len() + 1);
        let f = test_function(&z);
        let lhs = apply(word.letters(), false, &f, &z).value();
        let exp = expand_gamma_alpha(&word, v, 4).unwrap();
        let mut rhs = 0.0;
        for ((m, gamma), c) in &exp.terms {
            let mut inner = apply(gamma.letters(), true, &f, &z);
            for (axis, &k) in m.iter().enumerate() {
                for _ in 0..k {
                    inner = inner.deriv(4 + axis);
                }
            }
            rhs += c * inner.value();
        }
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{word}: {lhs} vs {rhs}");
        let _ = NV;
    }

    #[test]
    fn translation_has_no_correction() {
        let e = expand_gamma_alpha(&AWord::single(ALetter::Dx(1)), [0.3, 0.1, -0.2], 2).unwrap();
        assert_eq!(e.corrections().count(), 0);
    }

    #[test]
    fn boost_has_single_velocity_correction() {
        let v = [0.3, 0.1, -0.2];
        let e = expand_gamma_alpha(&AWord::single(ALetter::Boost(2)), v, 2).unwrap();
        let corr: Vec<_> = e.corrections().collect();
        assert_eq!(corr.len(), 1);
        let ((m, g), c) = corr[0];
        assert_eq!(*m, [0, 0, 1]);
        assert!(g.is_empty());
        let gamma = (1.0f64 + 0.09 + 0.01 + 0.04).sqrt();
        assert!((c + gamma).abs() < 1e-14);
    }

    #[test]
    fn empty_word_weight_is_inverse_lorentz_factor() {
        let v = [0.5, -1.0, 0.25];
        let e = expand_gamma_alpha(&AWord::empty(), v, 0).unwrap();
        let expect = 1.0 / (1.0f64 + 0.25 + 1.0 + 0.0625).sqrt();
        assert!((e.a_tilde[&AWord::empty()] - expect).abs() < 1e-15);
    }

    #[test]
    fn leading_weight_is_inverse_lorentz_factor() {
        let v = [0.5, -1.0, 0.25];
        let word = AWord::new(vec![ALetter::Boost(0), ALetter::Rot(2)]);
        let e = expand_gamma_alpha(&word, v, 2).unwrap();
        let expect = 1.0 / (1.0f64 + 0.25 + 1.0 + 0.0625).sqrt();
        assert!((e.a_tilde[&word] - expect).abs() < 1e-14);
    }

    #[test]
    fn single_letters_reconstruct() {
        for l in ALetter::all() {
            check_word(AWord::single(l));
        }
    }

    #[test]
    fn all_two_letter_words_reconstruct() {
        for a in ALetter::all() {
            for b in ALetter::all() {
                check_word(AWord::new(vec![a, b]));
            }
        }
    }

    #[test]
    fn three_letter_samples_reconstruct() {
        use ALetter::*;
        for w in [
            vec![Boost(0), Boost(1), Rot(2)],
            vec![Rot(0), Boost(0), Boost(0)],
            vec![S, Boost(2), Rot(1)],
        ] {
            check_word(AWord::new(w));
        }
    }

    #[test]
    fn order_overflow_is_reported() {
        let w = AWord::new(vec![ALetter::S; 3]);
        assert!(matches!(expand_gamma_alpha(&w, [0.0; 3], 2), Err(RvnError::OrderOverflow { .. })));
    }
}
