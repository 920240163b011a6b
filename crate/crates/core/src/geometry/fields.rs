//! Coefficient formulas of every first-order vector field.
//!
//! A field is stored as `at·∂t + ax·∇x + av·∇v`. All formulas are generic
//! over [`Real`] so the same code yields point values and exact jets.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::jet::Real;
use crate::lpfourier::cutoff::{psi_ge, psi_le};

pub type V3<R> = [R; 3];

pub(crate) fn dot<R: Real>(a: &V3<R>, b: &V3<R>) -> R {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

/// `e_i × a`.
pub(crate) fn cross_e<R: Real>(i: usize, a: &V3<R>) -> V3<R> {
    let z = a[0].zero_like();
    match i {
        0 => [z, -a[2].clone(), a[1].clone()],
        1 => [a[2].clone(), z, -a[0].clone()],
        2 => [-a[1].clone(), a[0].clone(), z],
        _ => panic!("axis index {i} out of range"),
    }
}

pub(crate) fn scale<R: Real>(a: &V3<R>, s: &R) -> V3<R> {
    [a[0].clone() * s.clone(), a[1].clone() * s.clone(), a[2].clone() * s.clone()]
}

pub(crate) fn zeros<R: Real>(like: &R) -> V3<R> {
    [like.zero_like(), like.zero_like(), like.zero_like()]
}

pub(crate) fn unit<R: Real>(i: usize, like: &R) -> V3<R> {
    let mut e = zeros(like);
    e[i] = like.cst(1.0);
    e
}

/// Velocity-dependent kinematic quantities at one phase point (unit mass).
#[derive(Clone, Debug)]
pub struct Kin<R> {
    pub x: V3<R>,
    pub v: V3<R>,
    /// `1 + |v|²`
    pub g2: R,
    /// `√(1 + |v|²)`
    pub g: R,
    /// `x·v`
    pub xv: R,
    /// `|x|² + (x·v)²`, the argument of the spatial cutoff.
    pub s: R,
    /// Jacobian `M_jk = ∂_{v_j} v̂_k`.
    pub m: [[R; 3]; 3],
}

impl<R: Real> Kin<R> {
    pub fn new(x: V3<R>, v: V3<R>) -> Kin<R> {
        let g2 = dot(&v, &v) + 1.0;
        let g = g2.sqrt();
        let xv = dot(&x, &v);
        let s = dot(&x, &x) + xv.clone() * xv.clone();
        let g3 = g2.clone() * g.clone();
        let inv_g3 = g3.recip();
        let m = std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let diag = if j == k { g2.clone() } else { g2.zero_like() };
                (diag - v[j].clone() * v[k].clone()) * inv_g3.clone()
            })
        });
        Kin { x, v, g2, g, xv, s, m }
    }

    /// `|v|`, returned as an exact zero at the origin where it is not smooth.
    pub fn speed(&self) -> R {
        let n2 = dot(&self.v, &self.v);
        if n2.value() == 0.0 {
            n2.zero_like()
        } else {
            n2.sqrt()
        }
    }

    pub fn vhat(&self) -> V3<R> {
        scale(&self.v, &self.g.recip())
    }

    /// `ṽ = v/|v|`; callers only use it under a cutoff vanishing near 0.
    pub fn vtilde(&self) -> V3<R> {
        scale(&self.v, &self.speed().recip())
    }

    /// `ω₊ = x·v + √((x·v)² + |x|²)`, with the cancellation-free branch.
    pub fn omega_plus(&self) -> R {
        let (p, _) = self.omega_pm();
        p
    }

    pub fn omega_pm(&self) -> (R, R) {
        if self.s.value() == 0.0 {
            return (self.s.zero_like(), self.s.zero_like());
        }
        let r = self.s.sqrt();
        let x2 = self.s.clone() - self.xv.clone() * self.xv.clone();
        if self.xv.value() >= 0.0 {
            let p = self.xv.clone() + r;
            let m = -(x2 / p.clone());
            (p, m)
        } else {
            let m = self.xv.clone() - r;
            let p = -(x2 / m.clone());
            (p, m)
        }
    }

    /// `ψ≥0(s)`, the spatial cutoff in the modulation.
    pub fn spatial_cut(&self) -> R {
        psi_ge(&self.s, 0)
    }

    /// `ω = ψ≥0(s)·ω₊`, exactly zero where the cutoff vanishes.
    pub fn omega(&self) -> R {
        let c = self.spatial_cut();
        if c.is_zero() {
            return c;
        }
        c * self.omega_plus()
    }

    /// Inhomogeneous modulation `t/(1+|v|²) − ω/√(1+|v|²)`.
    pub fn dtilde(&self, t: f64) -> R {
        self.g2.recip() * t - self.omega() / self.g.clone()
    }

    /// Homogeneous modulation built on `ω₊`.
    pub fn d_homogeneous(&self, t: f64) -> R {
        self.g2.recip() * t - self.omega_plus() / self.g.clone()
    }

    pub fn cut_high(&self, k: i32) -> R {
        let r = self.speed();
        psi_ge(&r, k)
    }

    pub fn cut_low(&self, k: i32) -> R {
        let r = self.speed();
        psi_le(&r, k)
    }

    /// `a ↦ −t M a`, the x-part of `a·D_v`.
    pub fn dv_x_part(&self, a: &V3<R>, t: f64) -> V3<R> {
        std::array::from_fn(|k| {
            let mut acc = a[0].zero_like();
            for j in 0..3 {
                acc = acc + a[j].clone() * self.m[j][k].clone();
            }
            acc * (-t)
        })
    }

    /// `Σ_j a_j M_jk`
    pub fn m_apply(&self, a: &V3<R>) -> V3<R> {
        std::array::from_fn(|k| {
            let mut acc = a[0].zero_like();
            for j in 0..3 {
                acc = acc + a[j].clone() * self.m[j][k].clone();
            }
            acc
        })
    }
}

/// Letters of the 17-element alphabet of new fields, in their fixed order.
///
/// Axis indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KLetter {
    /// `ψ≥1(|v|) Ŝ^v`
    SvHat,
    /// `ψ≥1(|v|) S^x`
    Sx,
    /// `ψ≥1(|v|) Ω̂^v_i`
    OmegaHat(u8),
    /// `ψ≥1(|v|) Ω^x_i`
    OmegaX(u8),
    /// `ψ≤0(|v|) K_{v_i}`
    Kv(u8),
    /// `ψ≤0(|v|) ∂_{x_i}`
    Dx(u8),
    /// `Ω̃_i`
    RotTilde(u8),
}

impl KLetter {
    pub const COUNT: usize = 17;

    pub fn all() -> [KLetter; 17] {
        std::array::from_fn(KLetter::from_index)
    }

    pub fn index(self) -> usize {
        match self {
            KLetter::SvHat => 0,
            KLetter::Sx => 1,
            KLetter::OmegaHat(i) => 2 + i as usize,
            KLetter::OmegaX(i) => 5 + i as usize,
            KLetter::Kv(i) => 8 + i as usize,
            KLetter::Dx(i) => 11 + i as usize,
            KLetter::RotTilde(i) => 14 + i as usize,
        }
    }

    pub fn from_index(k: usize) -> KLetter {
        match k {
            0 => KLetter::SvHat,
            1 => KLetter::Sx,
            2..=4 => KLetter::OmegaHat((k - 2) as u8),
            5..=7 => KLetter::OmegaX((k - 5) as u8),
            8..=10 => KLetter::Kv((k - 8) as u8),
            11..=13 => KLetter::Dx((k - 11) as u8),
            14..=16 => KLetter::RotTilde((k - 14) as u8),
            _ => panic!("letter index {k} out of range"),
        }
    }

    /// `(c_vn, c_vm, i)` for a single letter.
    pub fn indices(self) -> (i32, i32, i32) {
        match self {
            KLetter::SvHat => (1, 1, 0),
            KLetter::OmegaHat(_) => (-1, 0, 0),
            KLetter::OmegaX(_) => (0, 1, 1),
            _ => (0, 0, 0),
        }
    }
}

impl fmt::Display for KLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KLetter::SvHat => write!(f, "Sv^"),
            KLetter::Sx => write!(f, "Sx"),
            KLetter::OmegaHat(i) => write!(f, "Ov^{}", i + 1),
            KLetter::OmegaX(i) => write!(f, "Ox{}", i + 1),
            KLetter::Kv(i) => write!(f, "Kv{}", i + 1),
            KLetter::Dx(i) => write!(f, "dx{}", i + 1),
            KLetter::RotTilde(i) => write!(f, "O~{}", i + 1),
        }
    }
}

/// Letters of the classical alphabet: scaling, translations, rotations,
/// boosts. Whether rotations and boosts carry their velocity parts depends
/// on the context (wave side versus kinetic side).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ALetter {
    S,
    Dx(u8),
    Rot(u8),
    Boost(u8),
}

impl ALetter {
    pub const COUNT: usize = 10;

    pub fn all() -> [ALetter; 10] {
        std::array::from_fn(ALetter::from_index)
    }

    pub fn index(self) -> usize {
        match self {
            ALetter::S => 0,
            ALetter::Dx(i) => 1 + i as usize,
            ALetter::Rot(i) => 4 + i as usize,
            ALetter::Boost(i) => 7 + i as usize,
        }
    }

    pub fn from_index(k: usize) -> ALetter {
        match k {
            0 => ALetter::S,
            1..=3 => ALetter::Dx((k - 1) as u8),
            4..=6 => ALetter::Rot((k - 4) as u8),
            7..=9 => ALetter::Boost((k - 7) as u8),
            _ => panic!("letter index {k} out of range"),
        }
    }
}

impl fmt::Display for ALetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ALetter::S => write!(f, "S"),
            ALetter::Dx(i) => write!(f, "d{}", i + 1),
            ALetter::Rot(i) => write!(f, "O{}", i + 1),
            ALetter::Boost(i) => write!(f, "L{}", i + 1),
        }
    }
}

/// Every first-order field the library can evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorFieldId {
    /// `t∂t + x·∇x`
    Scaling,
    Dx(u8),
    /// `X_i·∇x`
    Rot(u8),
    /// `t∂_{x_i} + x_i∂t`
    Boost(u8),
    /// `V_i·∇v + X_i·∇x`
    RotTilde(u8),
    /// `t∂_{x_i} + x_i∂t + √(1+|v|²)∂_{v_i}`
    BoostTilde(u8),
    /// One of the seventeen cut-off new fields.
    Gamma(KLetter),
    /// The seven cut-off pieces of the bulk derivative, zero-based.
    X(u8),
    /// Pullback of `K_{v_i}` to the unshifted distribution.
    KTilde(u8),
    /// Uncut `Ŝ^v = ṽ·K_v`.
    SvHat,
    /// Uncut `S^x = ṽ·∇x`.
    Sx,
    /// Uncut `Ω̂^v_i = Ṽ_i·K_v`.
    OmegaHat(u8),
    /// Uncut `Ω^x_i = Ṽ_i·∇x`.
    OmegaX(u8),
    /// Uncut `K_{v_i}`.
    Kv(u8),
    /// `D_{v_i} = ∂_{v_i} − t ∂_{v_i}v̂·∇x`.
    Dv(u8),
}

impl VectorFieldId {
    pub fn needs_time_partial(&self) -> bool {
        matches!(self, VectorFieldId::Scaling | VectorFieldId::Boost(_) | VectorFieldId::BoostTilde(_))
    }

    pub fn name(&self) -> String {
        format!("{self:?}")
    }
}

/// Coefficients of `at·∂t + ax·∇x + av·∇v`.
#[derive(Clone, Debug)]
pub struct FieldCoeffs<R> {
    pub at: R,
    pub ax: V3<R>,
    pub av: V3<R>,
}

impl<R: Real> FieldCoeffs<R> {
    fn zero(like: &R) -> Self {
        FieldCoeffs { at: like.zero_like(), ax: zeros(like), av: zeros(like) }
    }

    fn spatial(ax: V3<R>, av: V3<R>) -> Self {
        FieldCoeffs { at: ax[0].zero_like(), ax, av }
    }

    pub fn scaled(&self, c: &R) -> Self {
        FieldCoeffs { at: self.at.clone() * c.clone(), ax: scale(&self.ax, c), av: scale(&self.av, c) }
    }

    pub fn is_zero(&self) -> bool {
        self.at.is_zero() && self.ax.iter().all(Real::is_zero) && self.av.iter().all(Real::is_zero)
    }
}

/// `cut × body`, evaluating `body` only where the cutoff is nonzero.
fn cut_field<R: Real>(cut: R, body: impl FnOnce() -> FieldCoeffs<R>) -> FieldCoeffs<R> {
    if cut.is_zero() {
        return FieldCoeffs::zero(&cut);
    }
    body().scaled(&cut)
}

fn uncut_new_field<R: Real>(id: VectorFieldId, t: f64, k: &Kin<R>) -> FieldCoeffs<R> {
    let like = &k.g;
    match id {
        VectorFieldId::SvHat => {
            let vt = k.vtilde();
            let ax = scale(&vt, &(-(k.omega() / k.g2.clone())));
            FieldCoeffs::spatial(ax, vt)
        }
        VectorFieldId::Sx => FieldCoeffs::spatial(k.vtilde(), zeros(like)),
        VectorFieldId::OmegaHat(i) => {
            let w = cross_e(i as usize, &k.vtilde());
            FieldCoeffs::spatial(scale(&w, &(-k.omega())), w)
        }
        VectorFieldId::OmegaX(i) => FieldCoeffs::spatial(cross_e(i as usize, &k.vtilde()), zeros(like)),
        VectorFieldId::Kv(i) => {
            let c = -(k.g.clone() * k.omega());
            let ax = std::array::from_fn(|j| k.m[i as usize][j].clone() * c.clone());
            FieldCoeffs::spatial(ax, unit(i as usize, like))
        }
        VectorFieldId::Dv(i) => {
            let e = unit(i as usize, like);
            FieldCoeffs::spatial(k.dv_x_part(&e, t), e)
        }
        _ => unreachable!("not an uncut new field"),
    }
}

/// Coefficients of `id` at time `t` on the phase point described by `k`.
pub fn field_coeffs<R: Real>(id: VectorFieldId, t: f64, k: &Kin<R>) -> FieldCoeffs<R> {
    let like = &k.g;
    let tt = like.cst(t);
    match id {
        VectorFieldId::Scaling => FieldCoeffs { at: tt, ax: k.x.clone(), av: zeros(like) },
        VectorFieldId::Dx(i) => FieldCoeffs::spatial(unit(i as usize, like), zeros(like)),
        VectorFieldId::Rot(i) => FieldCoeffs::spatial(cross_e(i as usize, &k.x), zeros(like)),
        VectorFieldId::Boost(i) => {
            FieldCoeffs { at: k.x[i as usize].clone(), ax: scale(&unit(i as usize, like), &tt), av: zeros(like) }
        }
        VectorFieldId::RotTilde(i) => FieldCoeffs::spatial(cross_e(i as usize, &k.x), cross_e(i as usize, &k.v)),
        VectorFieldId::BoostTilde(i) => FieldCoeffs {
            at: k.x[i as usize].clone(),
            ax: scale(&unit(i as usize, like), &tt),
            av: scale(&unit(i as usize, like), &k.g),
        },
        VectorFieldId::Gamma(letter) => gamma_coeffs(letter, k),
        VectorFieldId::X(i) => x_field_coeffs(i as usize, t, k),
        VectorFieldId::KTilde(i) => {
            // ω is evaluated at the free-streaming foot x − v̂t.
            let vh = k.vhat();
            let foot: V3<R> = std::array::from_fn(|j| k.x[j].clone() - vh[j].clone() * t);
            let kf = Kin::new(foot, k.v.clone());
            let c = tt - k.g.clone() * kf.omega();
            let ax = std::array::from_fn(|j| k.m[i as usize][j].clone() * c.clone());
            FieldCoeffs::spatial(ax, unit(i as usize, like))
        }
        VectorFieldId::SvHat
        | VectorFieldId::Sx
        | VectorFieldId::OmegaHat(_)
        | VectorFieldId::OmegaX(_)
        | VectorFieldId::Kv(_)
        | VectorFieldId::Dv(_) => uncut_new_field(id, t, k),
    }
}

/// The seventeen new fields, cutoffs included. Time independent.
pub fn gamma_coeffs<R: Real>(letter: KLetter, k: &Kin<R>) -> FieldCoeffs<R> {
    match letter {
        KLetter::SvHat => cut_field(k.cut_high(1), || uncut_new_field(VectorFieldId::SvHat, 0.0, k)),
        KLetter::Sx => cut_field(k.cut_high(1), || uncut_new_field(VectorFieldId::Sx, 0.0, k)),
        KLetter::OmegaHat(i) => cut_field(k.cut_high(1), || uncut_new_field(VectorFieldId::OmegaHat(i), 0.0, k)),
        KLetter::OmegaX(i) => cut_field(k.cut_high(1), || uncut_new_field(VectorFieldId::OmegaX(i), 0.0, k)),
        KLetter::Kv(i) => cut_field(k.cut_low(0), || uncut_new_field(VectorFieldId::Kv(i), 0.0, k)),
        KLetter::Dx(i) => cut_field(k.cut_low(0), || FieldCoeffs::spatial(unit(i as usize, &k.g), zeros(&k.g))),
        KLetter::RotTilde(i) => {
            FieldCoeffs::spatial(cross_e(i as usize, &k.x), cross_e(i as usize, &k.v))
        }
    }
}

/// Direction `a(v)` of the bulk-derivative piece `X_i = a·D_v`.
pub fn x_direction<R: Real>(i: usize, k: &Kin<R>) -> V3<R> {
    match i {
        0 => {
            let c = k.cut_high(1);
            if c.is_zero() {
                return zeros(&c);
            }
            scale(&k.vtilde(), &c)
        }
        1..=3 => {
            let c = k.cut_high(1);
            if c.is_zero() {
                return zeros(&c);
            }
            scale(&cross_e(i - 1, &k.vtilde()), &c)
        }
        4..=6 => scale(&unit(i - 4, &k.g), &k.cut_low(0)),
        _ => panic!("bulk piece index {i} out of range"),
    }
}

/// Weight `α_i(v)` with `D_v = Σ α_i X_i`.
pub fn x_weight<R: Real>(i: usize, k: &Kin<R>) -> V3<R> {
    match i {
        0 => {
            let c = k.cut_high(-1);
            if c.is_zero() {
                return zeros(&c);
            }
            scale(&k.vtilde(), &c)
        }
        1..=3 => {
            let c = k.cut_high(-1);
            if c.is_zero() {
                return zeros(&c);
            }
            scale(&cross_e(i - 1, &k.vtilde()), &c)
        }
        4..=6 => scale(&unit(i - 4, &k.g), &k.cut_low(2)),
        _ => panic!("bulk piece index {i} out of range"),
    }
}

pub fn x_field_coeffs<R: Real>(i: usize, t: f64, k: &Kin<R>) -> FieldCoeffs<R> {
    let a = x_direction(i, k);
    FieldCoeffs::spatial(k.dv_x_part(&a, t), a)
}
