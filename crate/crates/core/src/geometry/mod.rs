//! Light-cone geometry of the massive free flow: modulation functions, the
//! classical and new vector fields, decompositions of the bulk derivative
//! `D_v` and commutator coefficient tables.
//!
//! Everything here assumes unit mass except [`PhasePoint::vhat`], which the
//! solver also uses for the massless case.

pub mod closed_form;
pub mod fields;
pub mod pullback;
pub mod tables;

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Result, RvnError};
use crate::jet::{Jet, Real};

pub use fields::{
    field_coeffs, gamma_coeffs, x_direction, x_field_coeffs, x_weight, ALetter, FieldCoeffs, KLetter, Kin,
    VectorFieldId, V3,
};
pub use pullback::freestream_pullback_coeffs;
pub use tables::{
    canonical_decomposition, dtilde_derivative, dv_decomposition, first_order_commutator, high_order_commutator,
    Coefficient, CoefficientTable, DvVariant, TableKind,
};

/// A position–momentum pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub mass: f64,
}

impl PhasePoint {
    pub fn new(x: [f64; 3], v: [f64; 3]) -> PhasePoint {
        PhasePoint { x, v, mass: 1.0 }
    }

    pub fn with_mass(x: [f64; 3], v: [f64; 3], mass: f64) -> PhasePoint {
        PhasePoint { x, v, mass }
    }

    pub fn speed(&self) -> f64 {
        self.v.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `v/√(m² + |v|²)`; zero at `v = 0` for the massless case.
    pub fn vhat(&self) -> [f64; 3] {
        let n = (self.mass * self.mass + self.v.iter().map(|c| c * c).sum::<f64>()).sqrt();
        if n == 0.0 {
            return [0.0; 3];
        }
        self.v.map(|c| c / n)
    }

    pub fn vtilde(&self) -> Option<[f64; 3]> {
        let n = self.speed();
        (n > 0.0).then(|| self.v.map(|c| c / n))
    }

    pub fn kin(&self) -> Kin<f64> {
        Kin::new(self.x, self.v)
    }

    /// Kinematics on jets seeded at this point; variables are `x₁..x₃, v₁..v₃`.
    pub fn kin_jet(&self, degree: usize) -> Kin<Jet> {
        let s = Jet::seed(&[self.x[0], self.x[1], self.x[2], self.v[0], self.v[1], self.v[2]], degree);
        Kin::new([s[0].clone(), s[1].clone(), s[2].clone()], [s[3].clone(), s[4].clone(), s[5].clone()])
    }
}

/// All modulation quantities at one `(t, x, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulationData {
    pub t: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega: f64,
    pub d: f64,
    pub d_tilde: f64,
}

pub fn modulation(t: f64, p: &PhasePoint) -> ModulationData {
    let k = p.kin();
    let (omega_plus, omega_minus) = k.omega_pm();
    ModulationData { t, omega_plus, omega_minus, omega: k.omega(), d: k.d_homogeneous(t), d_tilde: k.dtilde(t) }
}

/// `(ω₊, ω₋)`, the two roots of `ω² − 2(x·v)ω − |x|² = 0`.
pub fn omega_pm(p: &PhasePoint) -> (f64, f64) {
    p.kin().omega_pm()
}

/// `ψ≥0(|x|² + (x·v)²)·ω₊`.
pub fn omega_cut(p: &PhasePoint) -> f64 {
    p.kin().omega()
}

/// The inhomogeneous modulation, or the homogeneous one built on `ω₊`.
pub fn inhom_modulation(t: f64, p: &PhasePoint, homogeneous: bool) -> f64 {
    let k = p.kin();
    if homogeneous {
        k.d_homogeneous(t)
    } else {
        k.dtilde(t)
    }
}

/// `t² − |x + v̂t|² − d̃·(t − √(1+|v|²)ω₋)`; vanishes wherever `ω = ω₊`.
pub fn cone_factorization_residual(t: f64, p: &PhasePoint) -> f64 {
    let k = p.kin();
    let vh = k.vhat();
    let y2: f64 = (0..3).map(|i| (p.x[i] + vh[i] * t).powi(2)).sum();
    let (_, wm) = k.omega_pm();
    t * t - y2 - k.dtilde(t) * (t - k.g * wm)
}

/// First partials of a scalar function at one point. `dt` is `None` when
/// the function carries no time dependence information.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub value: f64,
    pub dt: Option<f64>,
    pub dx: [f64; 3],
    pub dv: [f64; 3],
}

/// `(Λh)(t, x, v)` for the field `id`, from the partials `h` supplies.
pub fn vf_apply<H>(id: VectorFieldId, h: H, t: f64, p: &PhasePoint) -> Result<f64>
where
    H: FnOnce(f64, &PhasePoint) -> Partials,
{
    let d = h(t, p);
    let c = field_coeffs(id, t, &p.kin());
    let mut acc = 0.0;
    if c.at != 0.0 {
        acc += c.at * d.dt.ok_or_else(|| RvnError::MissingTimePartial(id.name()))?;
    } else if id.needs_time_partial() && d.dt.is_none() {
        return Err(RvnError::MissingTimePartial(id.name()));
    }
    for i in 0..3 {
        acc += c.ax[i] * d.dx[i] + c.av[i] * d.dv[i];
    }
    Ok(acc)
}

/// `a·∇x F + b·∇v F` on six-variable jets; drops one order of validity.
pub(crate) fn apply_spatial(c: &FieldCoeffs<Jet>, f: &Jet) -> Jet {
    let mut acc = f.zero_like();
    for i in 0..3 {
        if !c.ax[i].is_zero() {
            acc = acc + &(c.ax[i].clone() * f.deriv(i));
        }
        if !c.av[i].is_zero() {
            acc = acc + &(c.av[i].clone() * f.deriv(3 + i));
        }
    }
    acc
}

/// `Λ^{id₁}∘…∘Λ^{idₙ} h` at `(t, p)` using exact jets. Fields with a time
/// component are rejected; `h` receives jet-valued `x` and `v`.
pub fn apply_fields<H>(ids: &[VectorFieldId], t: f64, p: &PhasePoint, h: H) -> Result<f64>
where
    H: Fn(&V3<Jet>, &V3<Jet>) -> Jet,
{
    if let Some(id) = ids.iter().find(|id| id.needs_time_partial()) {
        return Err(RvnError::MissingTimePartial(id.name()));
    }
    let k = p.kin_jet(ids.len());
    let mut g = h(&k.x, &k.v);
    for id in ids.iter().rev() {
        g = apply_spatial(&field_coeffs(*id, t, &k), &g);
    }
    Ok(g.value())
}

/// `Λ^β h` for a word over the new alphabet.
pub fn apply_word<H>(word: &KWord, p: &PhasePoint, h: H) -> f64
where
    H: Fn(&V3<Jet>, &V3<Jet>) -> Jet,
{
    let ids: Vec<_> = word.0.iter().map(|l| VectorFieldId::Gamma(*l)).collect();
    apply_fields(&ids, 0.0, p, h).expect("new fields carry no time component")
}

/// A word over one of the two alphabets; the leftmost letter acts last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word<L>(pub Vec<L>);

pub type KWord = Word<KLetter>;
pub type AWord = Word<ALetter>;

impl<L: Clone> Word<L> {
    pub fn new(letters: Vec<L>) -> Self {
        Word(letters)
    }
    pub fn empty() -> Self {
        Word(Vec::new())
    }
    pub fn single(l: L) -> Self {
        Word(vec![l])
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn letters(&self) -> &[L] {
        &self.0
    }
    pub fn concat(&self, other: &Word<L>) -> Word<L> {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }
}

impl<L: fmt::Display> fmt::Display for Word<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "∘")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All words of exactly `len` letters over the new alphabet, in index order.
pub fn all_k_words(len: usize) -> Vec<KWord> {
    let mut out = vec![KWord::empty()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| KLetter::all().into_iter().map(move |l| w.concat(&KWord::single(l))))
            .collect();
    }
    out
}

/// `(c_vn, c_vm, i)`: additive letter counts.
pub fn index_functions(beta: &KWord) -> (i32, i32, i32) {
    beta.0.iter().fold((0, 0, 0), |(a, b, c), l| {
        let (x, y, z) = l.indices();
        (a + x, b + y, c + z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kletter() -> impl Strategy<Value = KLetter> {
        (0usize..17).prop_map(KLetter::from_index)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_pm(&PhasePoint::new([0.0; 3], [0.3, -1.0, 2.0])), (0.0, 0.0));
        assert_eq!(omega_pm(&PhasePoint::new([1.0, 0.0, 0.0], [0.0; 3])), (1.0, -1.0));
        let (p, m) = omega_pm(&PhasePoint::new([1.0, 0.0, 0.0], [2.0, 0.0, 0.0]));
        assert!((p - (2.0 + 5f64.sqrt())).abs() < 1e-14);
        assert!((m - (2.0 - 5f64.sqrt())).abs() < 1e-14);
        assert_eq!(omega_cut(&PhasePoint::new([2.0, 0.0, 0.0], [0.0; 3])), 2.0);
        assert_eq!(omega_cut(&PhasePoint::new([0.1, 0.0, 0.0], [0.0; 3])), 0.0);
    }

    #[test]
    fn modulation_examples() {
        let p = PhasePoint::new([2.0, 0.0, 0.0], [0.0; 3]);
        assert_eq!(inhom_modulation(2.0, &p, false), 0.0);
        assert_eq!(inhom_modulation(0.0, &p, false), -2.0);
        assert_eq!(cone_factorization_residual(1.0, &PhasePoint::new([1.0, 0.0, 0.0], [0.0; 3])), 0.0);
    }

    #[test]
    fn rotation_annihilates_pair_invariants() {
        let p = PhasePoint::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.8]);
        for i in 0..3 {
            let r = vf_apply(
                VectorFieldId::RotTilde(i),
                |_, q| Partials { value: 0.0, dt: None, dx: q.v, dv: q.x },
                0.0,
                &p,
            )
            .unwrap();
            assert!(r.abs() < 1e-15);
        }
    }

    #[test]
    fn time_fields_need_time_partial() {
        let p = PhasePoint::new([0.3, -1.2, 0.7], [1.1, 0.4, -0.8]);
        let h = |_: f64, _: &PhasePoint| Partials { value: 0.0, dt: None, dx: [1.0; 3], dv: [0.0; 3] };
        assert!(vf_apply(VectorFieldId::Boost(0), h, 1.0, &p).is_err());
        assert!(vf_apply(VectorFieldId::Scaling, h, 0.0, &p).is_err());
        assert!(vf_apply(VectorFieldId::Dx(0), h, 1.0, &p).is_ok());
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_functions(&KWord::single(KLetter::SvHat)), (1, 1, 0));
        assert_eq!(index_functions(&KWord::single(KLetter::OmegaHat(0))), (-1, 0, 0));
        let w = KWord::new(vec![KLetter::SvHat, KLetter::OmegaHat(0), KLetter::OmegaX(1)]);
        assert_eq!(index_functions(&w), (0, 2, 1));
    }

    #[test]
    fn cutoff_rows_vanish_exactly_at_rest() {
        let p = PhasePoint::new([0.4, 0.1, -2.0], [0.0; 3]);
        let k = p.kin();
        for l in KLetter::all() {
            let c = gamma_coeffs(l, &k);
            assert!(c.ax.iter().chain(c.av.iter()).all(|v| v.is_finite()));
        }
        assert!(gamma_coeffs(KLetter::SvHat, &k).is_zero());
    }

    proptest! {
        #[test]
        fn index_functions_are_additive(
            a in prop::collection::vec(kletter(), 0..5),
            b in prop::collection::vec(kletter(), 0..5),
        ) {
            let (wa, wb) = (KWord::new(a), KWord::new(b));
            let (x, y, z) = index_functions(&wa);
            let (u, v, w) = index_functions(&wb);
            prop_assert_eq!(index_functions(&wa.concat(&wb)), (x + u, y + v, z + w));
        }

        #[test]
        fn omega_product_is_minus_x_squared(
            x in prop::array::uniform3(-10.0f64..10.0),
            v in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let (p, m) = omega_pm(&PhasePoint::new(x, v));
            let x2: f64 = x.iter().map(|c| c * c).sum();
            prop_assert!(p >= 0.0 && m <= 0.0);
            prop_assert!((p * m + x2).abs() <= 1e-12 * (1.0 + x2));
        }

        #[test]
        fn vhat_is_subluminal(v in prop::array::uniform3(-1e3f64..1e3)) {
            let n: f64 = PhasePoint::new([0.0; 3], v).vhat().iter().map(|c| c * c).sum();
            prop_assert!(n < 1.0);
        }

        #[test]
        fn high_cut_rows_vanish_below_threshold(
            x in prop::array::uniform3(-5.0f64..5.0),
            dir in prop::array::uniform3(-1.0f64..1.0),
            r in 0.0f64..0.625,
        ) {
            let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            let v = dir.map(|c| c * r / n);
            let k = PhasePoint::new(x, v).kin();
            for l in [KLetter::SvHat, KLetter::Sx, KLetter::OmegaHat(1), KLetter::OmegaX(2)] {
                prop_assert!(gamma_coeffs(l, &k).is_zero());
            }
        }

        #[test]
        fn low_cut_rows_vanish_above_threshold(
            x in prop::array::uniform3(-5.0f64..5.0),
            dir in prop::array::uniform3(-1.0f64..1.0),
            r in 1.5f64..20.0,
        ) {
            let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            let v = dir.map(|c| c * r / n);
            let k = PhasePoint::new(x, v).kin();
            for l in [KLetter::Kv(0), KLetter::Dx(2)] {
                prop_assert!(gamma_coeffs(l, &k).is_zero());
            }
        }
    }
}
