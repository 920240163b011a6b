//! New fields acting on free-streamed functions `F(t, x + v̂t)`.
//!
//! A single new field maps `F(t, x+v̂t)` to `β·(∇F)(t, x+v̂t)`. Where `β`
//! carries the modulation, the identity
//! `(t² − |y|²)∂_k = tL_k − y_k S + (y×Ω)_k` together with the cone
//! factorization trades the growing factor for classical fields.

use std::collections::BTreeMap;

use super::fields::{cross_e, gamma_coeffs, scale, KLetter, Kin, V3};
use super::{apply_spatial, ALetter, AWord, KWord, PhasePoint};
use crate::error::{Result, RvnError};
use crate::jet::{Jet, Real};

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `Σ_k b_k d̃ ∂_k` rewritten over classical letters.
fn modulated_gradient<R: Real>(b: &V3<R>, t: f64, k: &Kin<R>, out: &mut Vec<(ALetter, R)>) {
    if k.s.value() == 0.0 {
        // At x = 0 the homogeneous modulation is not smooth; d̃ = t/(1+|v|²) there.
        let dt = k.dtilde(t);
        for i in 0..3 {
            out.push((ALetter::Dx(i as u8), b[i].clone() * dt.clone()));
        }
        return;
    }
    let vh = k.vhat();
    let y: V3<R> = std::array::from_fn(|i| k.x[i].clone() + vh[i].clone() * t);
    let (wp, wm) = k.omega_pm();
    let inv = (-(k.g.clone() * wm) + t).recip();
    let rest = (-k.spatial_cut() + 1.0) * wp / k.g.clone();
    for i in 0..3 {
        let c = b[i].clone() * inv.clone();
        out.push((ALetter::Boost(i as u8), c.clone() * t));
        out.push((ALetter::S, -(c.clone() * y[i].clone())));
        for a in 0..3 {
            for m in 0..3 {
                let e = levi_civita(i, a, m);
                if e != 0.0 {
                    out.push((ALetter::Rot(m as u8), c.clone() * y[a].clone() * e));
                }
            }
        }
        out.push((ALetter::Dx(i as u8), b[i].clone() * rest.clone()));
    }
}

/// `Γ_κ(F(t, x+v̂t)) = Σ_a c_a (Γ^a F)(t, x+v̂t)` for one letter.
pub fn letter_pullback<R: Real>(kappa: KLetter, t: f64, k: &Kin<R>) -> Vec<(ALetter, R)> {
    let mut out = Vec::new();
    let plain = |b: V3<R>, out: &mut Vec<(ALetter, R)>| {
        for (i, c) in b.into_iter().enumerate() {
            out.push((ALetter::Dx(i as u8), c));
        }
    };
    match kappa {
        KLetter::RotTilde(i) => out.push((ALetter::Rot(i), k.g.cst(1.0))),
        KLetter::SvHat | KLetter::Sx | KLetter::OmegaHat(_) | KLetter::OmegaX(_) => {
            let cut = k.cut_high(1);
            if cut.is_zero() {
                return out;
            }
            let vt = k.vtilde();
            match kappa {
                KLetter::SvHat => modulated_gradient(&scale(&vt, &(cut / k.g.clone())), t, k, &mut out),
                KLetter::OmegaHat(i) => {
                    modulated_gradient(&scale(&cross_e(i as usize, &vt), &(cut * k.g.clone())), t, k, &mut out)
                }
                KLetter::Sx => plain(scale(&vt, &cut), &mut out),
                KLetter::OmegaX(i) => plain(scale(&cross_e(i as usize, &vt), &cut), &mut out),
                _ => unreachable!(),
            }
        }
        KLetter::Kv(i) => {
            let cut = k.cut_low(0);
            if cut.is_zero() {
                return out;
            }
            let f = cut * k.g2.clone();
            let b: V3<R> = std::array::from_fn(|j| k.m[i as usize][j].clone() * f.clone());
            modulated_gradient(&b, t, k, &mut out);
        }
        KLetter::Dx(i) => {
            let cut = k.cut_low(0);
            if !cut.is_zero() {
                out.push((ALetter::Dx(i), cut));
            }
        }
    }
    out
}

/// Coefficients `c_ι` with `Λ^ρ(F(t, x+v̂t)) = Σ_ι c_ι (Γ^ι F)(t, x+v̂t)`,
/// the `Γ^ι` being words of classical fields acting in `(t, y)`.
pub fn freestream_pullback_coeffs(rho: &KWord, t: f64, p: &PhasePoint, n_max: usize) -> Result<BTreeMap<AWord, f64>> {
    let n = rho.len();
    if n > n_max {
        return Err(RvnError::OrderOverflow { order: n, max: n_max });
    }
    let mut acc: BTreeMap<AWord, Jet> = BTreeMap::new();
    if n == 0 {
        return Ok(BTreeMap::from([(AWord::empty(), 1.0)]));
    }
    let k = p.kin_jet(n - 1);
    let letters = rho.letters();
    for (a, c) in letter_pullback(letters[n - 1], t, &k) {
        add(&mut acc, AWord::single(a), c);
    }
    for kappa in letters[..n - 1].iter().rev() {
        let field = gamma_coeffs(*kappa, &k);
        let first = letter_pullback(*kappa, t, &k);
        let mut next: BTreeMap<AWord, Jet> = BTreeMap::new();
        for (iota, c) in &acc {
            add(&mut next, iota.clone(), apply_spatial(&field, c));
            for (a, c1) in &first {
                add(&mut next, AWord::single(*a).concat(iota), c1.clone() * c.clone());
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().map(|(w, c)| (w, c.value())).filter(|(_, c)| *c != 0.0).collect())
}

fn add(map: &mut BTreeMap<AWord, Jet>, w: AWord, c: Jet) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&w) {
        Some(e) => *e = e.clone() + c,
        None => {
            map.insert(w, c);
        }
    }
}

/// `(Γ^ι F)(t, y)` for a classical word acting in `(t, y)`; `f` receives
/// jet-valued `t` and `y`.
pub fn apply_classical<F>(word: &AWord, t: f64, y: [f64; 3], f: F) -> f64
where
    F: Fn(&Jet, &V3<Jet>) -> Jet,
{
    let s = Jet::seed(&[t, y[0], y[1], y[2]], word.len());
    let tt = s[0].clone();
    let yy: V3<Jet> = [s[1].clone(), s[2].clone(), s[3].clone()];
    let mut g = f(&tt, &yy);
    for a in word.letters().iter().rev() {
        let d = |k: usize| g.deriv(k);
        g = match *a {
            ALetter::S => tt.clone() * d(0) + yy[0].clone() * d(1) + yy[1].clone() * d(2) + yy[2].clone() * d(3),
            ALetter::Dx(i) => d(1 + i as usize),
            ALetter::Rot(i) => {
                let r = cross_e(i as usize, &yy);
                r[0].clone() * d(1) + r[1].clone() * d(2) + r[2].clone() * d(3)
            }
            ALetter::Boost(i) => tt.clone() * d(1 + i as usize) + yy[i as usize].clone() * d(0),
        };
    }
    g.value()
}
