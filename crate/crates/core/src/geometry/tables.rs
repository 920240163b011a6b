//! Coefficient tables: the two decompositions of `D_v` over the new fields
//! and the commutators of the bulk pieces `X_i` with words of new fields.
//!
//! Commutator tables are synthesized rather than transcribed. The bracket
//! of two fields is computed exactly on jets and then expanded over the
//! seventeen new fields with [`canonical_decomposition`], which is exact
//! wherever `ψ≥1(|v|) + ψ≤0(|v|) = 1`, that is everywhere.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::fields::{cross_e, dot, gamma_coeffs, x_field_coeffs, zeros, FieldCoeffs, KLetter, Kin, V3};
use super::{apply_spatial, KWord, PhasePoint};
use crate::error::{Result, RvnError};
use crate::jet::{Jet, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    DvFirst,
    DvSecond,
    FirstOrderCommutator,
    DtildeDerivative,
    HighOrderCommutator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DvVariant {
    /// Rows carry `d̃` on the `S^x`, `Ω^x` and `∂x` letters only.
    First,
    /// Trades the `Ω̂` rows for the rotations `Ω̃`.
    Second,
}

/// One table entry. `modulated = (slope, offset)` records the split
/// `value = slope·d̃ + offset` with both parts independent of `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: Vec<f64>,
    pub modulated: Option<(f64, f64)>,
}

impl Coefficient {
    pub fn scalar(v: f64) -> Coefficient {
        Coefficient { value: vec![v], modulated: None }
    }
    pub fn is_zero(&self) -> bool {
        self.value.iter().all(|c| *c == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub kind: TableKind,
    pub t: f64,
    pub point: PhasePoint,
    pub rows: BTreeMap<KWord, Coefficient>,
}

impl CoefficientTable {
    fn new(kind: TableKind, t: f64, point: PhasePoint) -> Self {
        CoefficientTable { kind, t, point, rows: BTreeMap::new() }
    }

    pub fn width(&self) -> usize {
        self.rows.values().next().map_or(1, |c| c.value.len())
    }

    pub fn get(&self, w: &KWord) -> Option<&Coefficient> {
        self.rows.get(w)
    }

    /// Entry for a single-letter row, zero if absent.
    pub fn letter(&self, l: KLetter) -> Vec<f64> {
        self.rows.get(&KWord::single(l)).map_or_else(|| vec![0.0; self.width()], |c| c.value.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.values().all(Coefficient::is_zero)
    }

    /// Rows with a nonzero coefficient.
    pub fn support(&self) -> Vec<KWord> {
        self.rows.iter().filter(|(_, c)| !c.is_zero()).map(|(w, _)| w.clone()).collect()
    }

    /// `Σ_ρ coeff_ρ · (Λ^ρ h)` given the word values `Λ^ρ h`.
    pub fn apply(&self, mut word_value: impl FnMut(&KWord) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        for (w, c) in &self.rows {
            if c.is_zero() {
                continue;
            }
            let hv = word_value(w);
            for (o, cv) in out.iter_mut().zip(&c.value) {
                *o += cv * hv;
            }
        }
        out
    }
}

/// Expansion of `A·∇x + B·∇v` over the seventeen new fields, indexed as
/// [`KLetter::index`]. Rows whose field vanishes identically at the point
/// (cutoff exactly zero) are returned as exact zeros.
pub fn canonical_decomposition<R: Real>(a: &V3<R>, b: &V3<R>, k: &Kin<R>) -> Vec<R> {
    let like = &k.g;
    let mut out: Vec<R> = (0..KLetter::COUNT).map(|_| like.zero_like()).collect();
    let high = k.cut_high(1);
    if !high.is_zero() {
        let wide = k.cut_high(-1);
        let vt = k.vtilde();
        let omega = k.omega();
        let bv = dot(b, &vt);
        out[0] = wide.clone() * bv.clone();
        out[1] = wide.clone() * (dot(a, &vt) + omega.clone() / k.g2.clone() * bv);
        for i in 0..3 {
            let w = cross_e(i, &vt);
            let bw = dot(b, &w);
            out[2 + i] = wide.clone() * bw.clone();
            out[5 + i] = wide.clone() * (dot(a, &w) + omega.clone() * bw);
        }
    }
    let low = k.cut_low(0);
    if !low.is_zero() {
        let narrow = k.cut_low(2);
        let mb = k.m_apply(b);
        let gw = k.g.clone() * k.omega();
        for i in 0..3 {
            out[8 + i] = narrow.clone() * b[i].clone();
            out[11 + i] = narrow.clone() * (a[i].clone() + gw.clone() * mb[i].clone());
        }
    }
    out
}

/// Vector-valued rows of the selected `D_v` decomposition, generic so the
/// same formulas can be differentiated.
pub fn dv_rows<R: Real>(variant: DvVariant, t: f64, k: &Kin<R>) -> Vec<V3<R>> {
    let like = &k.g;
    let mut rows: Vec<V3<R>> = (0..KLetter::COUNT).map(|_| zeros(like)).collect();
    let dt = k.dtilde(t);
    let wide = k.cut_high(-1);
    if !wide.is_zero() {
        let vt = k.vtilde();
        let speed = k.speed();
        rows[0] = vt.clone().map(|c| c * wide.clone());
        match variant {
            DvVariant::First => {
                let c = -(wide.clone() * dt.clone() / k.g.clone());
                rows[1] = vt.clone().map(|e| e * c.clone());
                for i in 0..3 {
                    let w = cross_e(i, &vt);
                    rows[2 + i] = w.clone().map(|e| e * wide.clone());
                    let c = -(wide.clone() * dt.clone() * k.g.clone());
                    rows[5 + i] = w.map(|e| e * c.clone());
                }
            }
            DvVariant::Second => {
                let vh = k.vhat();
                let tt = like.cst(t);
                let inv_speed = speed.recip();
                let w: [V3<R>; 3] = std::array::from_fn(|j| cross_e(j, &vt));
                let rot_x: [V3<R>; 3] = std::array::from_fn(|j| cross_e(j, &k.x));
                let rot_vh: [V3<R>; 3] = std::array::from_fn(|j| cross_e(j, &vh));
                let mut sx = vt.clone().map(|e| e * (dt.clone() / k.g.clone()));
                for j in 0..3 {
                    let c = dot(&rot_x[j], &vt) * inv_speed.clone();
                    sx = std::array::from_fn(|m| sx[m].clone() + w[j][m].clone() * c.clone());
                }
                rows[1] = sx.map(|e| -(e * wide.clone()));
                for i in 0..3 {
                    let mut acc = zeros(like);
                    for j in 0..3 {
                        let lever: V3<R> =
                            std::array::from_fn(|m| rot_x[j][m].clone() + rot_vh[j][m].clone() * tt.clone());
                        let c = dot(&lever, &w[i]);
                        acc = std::array::from_fn(|m| acc[m].clone() + w[j][m].clone() * c.clone());
                    }
                    let f = -(wide.clone() * inv_speed.clone());
                    rows[5 + i] = acc.map(|e| e * f.clone());
                }
                let high = k.cut_high(1);
                for i in 0..3 {
                    let f = high.clone() * inv_speed.clone();
                    rows[14 + i] = w[i].clone().map(|e| e * f.clone());
                }
            }
        }
    }
    let narrow = k.cut_low(2);
    if !narrow.is_zero() {
        for i in 0..3 {
            let mut e = zeros(like);
            e[i] = narrow.clone();
            rows[8 + i] = e;
            let c = -(narrow.clone() * dt.clone() * k.g2.clone());
            rows[11 + i] = std::array::from_fn(|j| k.m[j][i].clone() * c.clone());
        }
    }
    rows
}

/// `D_v = Σ_ρ d_ρ Λ^ρ`, rows indexed by single letters, each a 3-vector
/// over the components of `D_v`.
pub fn dv_decomposition(variant: DvVariant, t: f64, p: &PhasePoint) -> CoefficientTable {
    let kind = match variant {
        DvVariant::First => TableKind::DvFirst,
        DvVariant::Second => TableKind::DvSecond,
    };
    let mut table = CoefficientTable::new(kind, t, *p);
    let rows = dv_rows(variant, t, &p.kin());
    for (k, r) in rows.into_iter().enumerate() {
        table.rows.insert(KWord::single(KLetter::from_index(k)), Coefficient { value: r.to_vec(), modulated: None });
    }
    table
}

/// `Σ_ρ (1+|v|)^{−1−c_vn}|d_ρ| + (1+|v|)^{1−c_vn}|ṽ·d_ρ| + (1+|v|)^{−c_vm}|d_ρ|`,
/// the quantity the decomposition keeps below a multiple of `1 + |d̃|`.
pub fn dv_weighted_size(table: &CoefficientTable) -> f64 {
    let p = table.point;
    let s = 1.0 + p.speed();
    let vt = p.vtilde().unwrap_or([0.0; 3]);
    table
        .rows
        .iter()
        .map(|(w, c)| {
            let (cvn, cvm, _) = super::index_functions(w);
            let n = c.value.iter().map(|e| e * e).sum::<f64>().sqrt();
            let radial: f64 = c.value.iter().zip(&vt).map(|(a, b)| a * b).sum::<f64>().abs();
            s.powi(-1 - cvn) * n + s.powi(1 - cvn) * radial + s.powi(-cvm) * n
        })
        .sum()
}

/// `[A, B]` for two spatial fields on jets, as `(x-part, v-part)`.
pub(crate) fn bracket(a: &FieldCoeffs<Jet>, b: &FieldCoeffs<Jet>) -> (V3<Jet>, V3<Jet>) {
    let comp = |k: usize| {
        let (bk, ak) = if k < 3 { (&b.ax[k], &a.ax[k]) } else { (&b.av[k - 3], &a.av[k - 3]) };
        apply_spatial(a, bk) - apply_spatial(b, ak)
    };
    (std::array::from_fn(comp), std::array::from_fn(|k| comp(k + 3)))
}

fn check_piece(i: usize) {
    assert!(i < 7, "bulk piece index {i} out of range (expected 0..7)");
}

/// `[X_i, Γ_ρ] = Σ_κ (c̃_κ d̃ + ĉ_κ) Γ_κ` with `i` zero-based.
pub fn first_order_commutator(i: usize, rho: KLetter, t: f64, p: &PhasePoint) -> CoefficientTable {
    check_piece(i);
    let kj = p.kin_jet(1);
    let y = gamma_coeffs(rho, &kj);
    let (a0, b0) = bracket(&x_field_coeffs(i, 0.0, &kj), &y);
    let (a1, b1) = bracket(&x_field_coeffs(i, 1.0, &kj), &y);
    let kf = p.kin();
    let val = |v: &V3<Jet>| v.clone().map(|e| e.value());
    let (a0, b0, a1, b1) = (val(&a0), val(&b0), val(&a1), val(&b1));
    let a_slope: V3<f64> = std::array::from_fn(|k| a1[k] - a0[k]);
    let b_slope: V3<f64> = std::array::from_fn(|k| b1[k] - b0[k]);
    let d0 = canonical_decomposition(&a0, &b0, &kf);
    let d1 = canonical_decomposition(&a_slope, &b_slope, &kf);
    let gw = kf.g * kf.omega();
    let mut table = CoefficientTable::new(TableKind::FirstOrderCommutator, t, *p);
    for k in 0..KLetter::COUNT {
        let value = d0[k] + t * d1[k];
        let modulated = Some((d1[k] * kf.g2, d0[k] + d1[k] * gw));
        table.rows.insert(KWord::single(KLetter::from_index(k)), Coefficient { value: vec![value], modulated });
    }
    table
}

/// `(e₁, e₂, Γ_ρ d̃)` with `Γ_ρ d̃ = e₁ d̃ + e₂`.
pub fn dtilde_derivative(rho: KLetter, t: f64, p: &PhasePoint) -> (f64, f64, f64) {
    let k = p.kin_jet(1);
    let c = gamma_coeffs(rho, &k);
    let q = k.g2.recip();
    let w = k.omega() / k.g.clone();
    let kf = p.kin();
    let e1 = kf.g2 * apply_spatial(&c, &q).value();
    let e2 = e1 * kf.omega() / kf.g - apply_spatial(&c, &w).value();
    let direct = apply_spatial(&c, &k.dtilde(t)).value();
    (e1, e2, direct)
}

/// `[X_i, Λ^β]` split into the top-order part (words of length `|β|`)
/// and the lower-order remainder.
///
/// Each letter `β_j` is commuted in place, the result is expanded over the
/// new fields, and the prefix `β_1..β_{j−1}` is moved past the coefficient
/// by the Leibniz rule, which yields one term per ordered sub-word of the
/// prefix.
pub fn high_order_commutator(
    i: usize,
    beta: &KWord,
    t: f64,
    p: &PhasePoint,
    n_max: usize,
) -> Result<(CoefficientTable, CoefficientTable)> {
    check_piece(i);
    let n = beta.len();
    if n > n_max {
        return Err(RvnError::OrderOverflow { order: n, max: n_max });
    }
    let mut top = CoefficientTable::new(TableKind::HighOrderCommutator, t, *p);
    let mut lower = CoefficientTable::new(TableKind::HighOrderCommutator, t, *p);
    if n == 0 {
        return Ok((top, lower));
    }
    if n == 1 {
        let mut first = first_order_commutator(i, beta.0[0], t, p);
        first.rows.retain(|_, c| !c.is_zero());
        return Ok((first, lower));
    }
    let k = p.kin_jet(n);
    let xf = x_field_coeffs(i, t, &k);
    let letters = beta.letters();
    let gam: Vec<FieldCoeffs<Jet>> = letters.iter().map(|l| gamma_coeffs(*l, &k)).collect();
    for j in 0..n {
        let (a, b) = bracket(&xf, &gam[j]);
        let d = canonical_decomposition(&a, &b, &k);
        let suffix = &letters[j + 1..];
        for (kappa, dk) in d.iter().enumerate() {
            if dk.is_zero() {
                continue;
            }
            let kap = KLetter::from_index(kappa);
            for mask in 0u32..(1 << j) {
                let mut coef = dk.clone();
                for s in (0..j).rev() {
                    if mask & (1 << s) != 0 {
                        coef = apply_spatial(&gam[s], &coef);
                    }
                }
                let v = coef.value();
                if v == 0.0 {
                    continue;
                }
                let mut w: Vec<KLetter> = (0..j).filter(|s| mask & (1 << s) == 0).map(|s| letters[s]).collect();
                w.push(kap);
                w.extend_from_slice(suffix);
                let target = if mask == 0 { &mut top } else { &mut lower };
                let e = target.rows.entry(KWord::new(w)).or_insert_with(|| Coefficient::scalar(0.0));
                e.value[0] += v;
            }
        }
    }
    top.rows.retain(|_, c| !c.is_zero());
    lower.rows.retain(|_, c| !c.is_zero());
    Ok((top, lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_fields, apply_word, VectorFieldId};

    fn bump(x: &V3<Jet>, v: &V3<Jet>) -> Jet {
        let r2 = x[0].square() * 0.3 + x[1].square() * 0.2 + x[2].square() * 0.25;
        let q2 = v[0].square() * 0.1 + v[1].square() * 0.15 + v[2].square() * 0.12;
        let poly = x[0].clone() * v[1].clone() + x[2].clone() * 0.5 + v[0].clone() * 0.7 + 1.0;
        poly * (-(r2 + q2)).exp()
    }

    fn points() -> Vec<PhasePoint> {
        vec![
            PhasePoint::new([0.7, -1.1, 0.4], [0.2, 0.3, -0.1]),
            PhasePoint::new([1.3, 0.2, -0.9], [1.0, -0.6, 0.5]),
            PhasePoint::new([-0.4, 2.1, 1.5], [2.5, 1.0, -3.0]),
            PhasePoint::new([0.1, 0.1, 0.2], [0.9, 0.9, 0.4]),
            PhasePoint::new([2.5, -0.3, 0.8], [-7.0, 2.0, 1.0]),
        ]
    }

    #[test]
    fn canonical_decomposition_reconstructs_field() {
        for p in points() {
            for t in [0.0, 1.5, 7.0] {
                for i in 0..3 {
                    let target = apply_fields(&[VectorFieldId::Dv(i as u8)], t, &p, bump).unwrap();
                    let kj = p.kin_jet(1);
                    let c = crate::geometry::field_coeffs(VectorFieldId::Dv(i as u8), t, &kj);
                    let d = canonical_decomposition(&c.ax.map(|e| e.value()), &c.av.map(|e| e.value()), &p.kin());
                    let sum: f64 = (0..17)
                        .map(|k| d[k] * apply_word(&KWord::single(KLetter::from_index(k)), &p, bump))
                        .sum();
                    assert!((sum - target).abs() <= 1e-12 * (1.0 + target.abs()), "{sum} vs {target}");
                }
            }
        }
    }

    #[test]
    fn both_dv_variants_reconstruct() {
        for p in points() {
            for t in [0.0, 2.0, 9.0] {
                for variant in [DvVariant::First, DvVariant::Second] {
                    let tab = dv_decomposition(variant, t, &p);
                    let got = tab.apply(|w| apply_word(w, &p, bump));
                    for i in 0..3 {
                        let want = apply_fields(&[VectorFieldId::Dv(i as u8)], t, &p, bump).unwrap();
                        assert!((got[i] - want).abs() <= 1e-11 * (1.0 + want.abs()), "{variant:?} {got:?} {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn slow_first_variant_has_only_low_rows() {
        let p = PhasePoint::new([0.3, 0.4, -2.0], [0.1, 0.05, -0.2]);
        let tab = dv_decomposition(DvVariant::First, 3.0, &p);
        for (w, c) in &tab.rows {
            match w.0[0] {
                KLetter::Kv(i) => {
                    let mut e = vec![0.0; 3];
                    e[i as usize] = 1.0;
                    assert_eq!(c.value, e);
                }
                KLetter::Dx(_) => {}
                _ => assert!(c.is_zero(), "{w}"),
            }
        }
    }

    #[test]
    fn commutator_matches_direct_bracket() {
        for p in points() {
            for i in 0..7 {
                for rho in KLetter::all() {
                    let t = 2.5;
                    let tab = first_order_commutator(i, rho, t, &p);
                    let got = tab.apply(|w| apply_word(w, &p, bump))[0];
                    let xi = VectorFieldId::X(i as u8);
                    let g = VectorFieldId::Gamma(rho);
                    let want = apply_fields(&[xi, g], t, &p, bump).unwrap() - apply_fields(&[g, xi], t, &p, bump).unwrap();
                    assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{i} {rho}: {got} vs {want}");
                    for c in tab.rows.values() {
                        let (s, o) = c.modulated.unwrap();
                        assert!((s * p.kin().dtilde(t) + o - c.value[0]).abs() <= 1e-10 * (1.0 + c.value[0].abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn radial_piece_commutes_with_rotations() {
        for p in points() {
            for j in 0..3 {
                let tab = first_order_commutator(0, KLetter::RotTilde(j), 4.0, &p);
                assert!(tab.rows.values().all(|c| c.value[0].abs() < 1e-13));
            }
        }
    }

    #[test]
    fn angular_pieces_rotate_under_rotations() {
        // [Ṽ_j·D_v, Ω̃_i] = ε_ijm Ṽ_m·D_v; the Ω̂_k rows project with Ṽ_m·Ṽ_k.
        let p = PhasePoint::new([0.4, -1.0, 0.8], [6.0, -4.0, 3.5]);
        let t = 3.0;
        let dt = p.kin().dtilde(t);
        let g = p.kin().g;
        let vt = p.vtilde().unwrap();
        for i in 0..3u8 {
            for j in 0..3u8 {
                let tab = first_order_commutator(1 + j as usize, KLetter::RotTilde(i), t, &p);
                for k in 0..3u8 {
                    let want: f64 = (0..3u8)
                        .map(|m| {
                            let gram = if m == k { 1.0 } else { 0.0 } - vt[m as usize] * vt[k as usize];
                            levi_civita(i, j, m) * gram
                        })
                        .sum();
                    let oh = tab.letter(KLetter::OmegaHat(k))[0];
                    let ox = tab.letter(KLetter::OmegaX(k))[0];
                    assert!((oh - want).abs() < 1e-12, "{i}{j}{k}: {oh} vs {want}");
                    assert!((ox + want * g * dt).abs() < 1e-10 * (1.0 + (g * dt).abs()));
                }
                for l in [KLetter::SvHat, KLetter::Sx] {
                    assert!(tab.letter(l)[0].abs() < 1e-12);
                }
            }
        }
    }

    fn levi_civita(i: u8, j: u8, k: u8) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn dtilde_split_is_consistent() {
        for p in points() {
            for rho in KLetter::all() {
                let t = 3.7;
                let (e1, e2, d) = dtilde_derivative(rho, t, &p);
                assert!((e1 * p.kin().dtilde(t) + e2 - d).abs() < 1e-10 * (1.0 + d.abs()));
            }
        }
        let slow = PhasePoint::new([1.0, 2.0, 0.0], [0.3, 0.2, 0.1]);
        assert_eq!(dtilde_derivative(KLetter::SvHat, 2.0, &slow), (0.0, 0.0, 0.0));
    }

    #[test]
    fn second_order_matches_direct() {
        let words = [
            KWord::new(vec![KLetter::SvHat, KLetter::OmegaX(1)]),
            KWord::new(vec![KLetter::Kv(0), KLetter::OmegaHat(2)]),
            KWord::new(vec![KLetter::RotTilde(1), KLetter::Kv(2)]),
            KWord::new(vec![KLetter::Sx, KLetter::SvHat, KLetter::Dx(0)]),
        ];
        for p in points() {
            for i in 0..7 {
                for w in &words {
                    let t = 1.7;
                    let (top, lower) = high_order_commutator(i, w, t, &p, 3).unwrap();
                    let got = top.apply(|u| apply_word(u, &p, bump))[0] + lower.apply(|u| apply_word(u, &p, bump))[0];
                    let xi = VectorFieldId::X(i as u8);
                    let ws: Vec<VectorFieldId> = w.0.iter().map(|l| VectorFieldId::Gamma(*l)).collect();
                    let mut left = vec![xi];
                    left.extend(ws.iter().copied());
                    let mut right = ws.clone();
                    right.push(xi);
                    let want = apply_fields(&left, t, &p, bump).unwrap() - apply_fields(&right, t, &p, bump).unwrap();
                    assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{i} {w}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn order_overflow_is_rejected() {
        let w = KWord::new(vec![KLetter::Sx; 4]);
        let p = PhasePoint::new([1.0; 3], [1.0; 3]);
        assert!(matches!(high_order_commutator(0, &w, 1.0, &p, 3), Err(RvnError::OrderOverflow { .. })));
    }

    #[test]
    fn iterated_rotations_commute_with_radial_piece() {
        let w = KWord::new(vec![KLetter::RotTilde(0), KLetter::RotTilde(2)]);
        for p in points() {
            let (top, lower) = high_order_commutator(0, &w, 2.0, &p, 3).unwrap();
            assert!(top.rows.values().chain(lower.rows.values()).all(|c| c.value[0].abs() < 1e-12));
        }
    }
}
