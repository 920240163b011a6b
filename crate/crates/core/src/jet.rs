//! Truncated multivariate Taylor arithmetic.
//!
//! Every closed-form coefficient in the geometry module is written once,
//! generically over [`Real`], and evaluated either on plain `f64` or on a
//! [`Jet`]. A jet carries all partial derivatives up to a fixed degree, so
//! vector fields can be applied to coefficients exactly (no finite
//! differences) when synthesizing commutator tables.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

/// Scalar arithmetic shared by `f64` and [`Jet`].
pub trait Real:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// The point value (constant Taylor coefficient).
    fn value(&self) -> f64;
    /// A constant of the same kind as `self`.
    fn cst(&self, c: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn recip(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, p: f64) -> Self;
    /// True when every stored coefficient is exactly zero.
    fn is_zero(&self) -> bool;

    fn zero_like(&self) -> Self {
        self.cst(0.0)
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Real for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn cst(&self, c: f64) -> Self {
        c
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

/// Monomial layout and multiplication tables for a `(nvars, degree)` pair.
struct Shape {
    nvars: usize,
    degree: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    degs: Vec<usize>,
    mul: Vec<(u32, u32, u32)>,
    /// Per variable: (source, destination, factor) for differentiation.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

impl Shape {
    fn build(nvars: usize, degree: usize) -> Shape {
        let mut exps: Vec<Vec<u8>> = Vec::new();
        for d in 0..=degree {
            let mut cur = vec![0u8; nvars];
            enumerate_degree(nvars, d, 0, &mut cur, &mut exps);
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degs: Vec<usize> = exps.iter().map(|e| e.iter().map(|&k| k as usize).sum()).collect();
        let mut mul = Vec::new();
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                if degs[i] + degs[j] > degree {
                    continue;
                }
                let sum: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                mul.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        let mut deriv = vec![Vec::new(); nvars];
        for (v, table) in deriv.iter_mut().enumerate() {
            for (i, e) in exps.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut lower = e.clone();
                lower[v] -= 1;
                table.push((i as u32, index[&lower] as u32, e[v] as f64));
            }
        }
        Shape { nvars, degree, exps, index, degs, mul, deriv }
    }
}

// Lexicographic within a degree; the constant monomial is always index 0.
fn enumerate_degree(nvars: usize, remaining: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos == nvars - 1 {
        cur[pos] = remaining as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u8;
        enumerate_degree(nvars, remaining - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

static SHAPES: Lazy<Mutex<HashMap<(usize, usize), Arc<Shape>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn shape(nvars: usize, degree: usize) -> Arc<Shape> {
    assert!(nvars >= 1, "a jet needs at least one variable");
    let mut map = SHAPES.lock().expect("jet shape cache poisoned");
    map.entry((nvars, degree)).or_insert_with(|| Arc::new(Shape::build(nvars, degree))).clone()
}

/// Truncated Taylor polynomial in `nvars` variables up to `degree`.
///
/// `valid` is the highest degree whose coefficients are trustworthy: each
/// differentiation lowers it by one, and binary operations take the minimum.
#[derive(Clone)]
pub struct Jet {
    shape: Arc<Shape>,
    c: Vec<f64>,
    valid: usize,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("value", &self.c[0]).field("valid", &self.valid).finish()
    }
}

impl Jet {
    pub fn constant(nvars: usize, degree: usize, value: f64) -> Jet {
        let shape = shape(nvars, degree);
        let mut c = vec![0.0; shape.exps.len()];
        c[0] = value;
        Jet { shape, c, valid: degree }
    }

    /// The coordinate function `x_var` expanded about `value`.
    pub fn variable(nvars: usize, degree: usize, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(nvars, degree, value);
        if degree >= 1 {
            let mut e = vec![0u8; nvars];
            e[var] = 1;
            let k = j.shape.index[&e];
            j.c[k] = 1.0;
        }
        j
    }

    /// Independent variables seeded at `point`.
    pub fn seed(point: &[f64], degree: usize) -> Vec<Jet> {
        (0..point.len()).map(|i| Jet::variable(point.len(), degree, i, point[i])).collect()
    }

    pub fn nvars(&self) -> usize {
        self.shape.nvars
    }
    pub fn degree(&self) -> usize {
        self.shape.degree
    }
    pub fn valid_degree(&self) -> usize {
        self.valid
    }

    /// Taylor coefficient of the monomial with exponents `multi`.
    pub fn coeff(&self, multi: &[u8]) -> f64 {
        match self.shape.index.get(multi) {
            Some(&k) => self.c[k],
            None => 0.0,
        }
    }

    /// Partial derivative `∂^multi` at the expansion point.
    pub fn partial(&self, multi: &[u8]) -> f64 {
        let order: usize = multi.iter().map(|&k| k as usize).sum();
        assert!(order <= self.valid, "partial of order {order} exceeds valid degree {}", self.valid);
        let fact: f64 = multi.iter().map(|&k| factorial(k as usize)).product();
        self.coeff(multi) * fact
    }

    /// First partials as a dense vector.
    pub fn gradient(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars()];
        for (v, gv) in g.iter_mut().enumerate() {
            let mut e = vec![0u8; self.nvars()];
            e[v] = 1;
            *gv = self.coeff(&e);
        }
        g
    }

    /// Exact derivative in variable `var`; the valid degree drops by one.
    pub fn deriv(&self, var: usize) -> Jet {
        let mut out = vec![0.0; self.c.len()];
        for &(src, dst, fac) in &self.shape.deriv[var] {
            out[dst as usize] += fac * self.c[src as usize];
        }
        Jet { shape: self.shape.clone(), c: out, valid: self.valid.saturating_sub(1) }
    }

    /// Zero all coefficients above the valid degree.
    fn truncate(mut self) -> Jet {
        for (k, d) in self.shape.degs.iter().enumerate() {
            if *d > self.valid {
                self.c[k] = 0.0;
            }
        }
        self
    }

    /// Apply a univariate function given its scaled Taylor coefficients
    /// `coeffs[k] = f^(k)(a) / k!` at `a = self.value()`.
    pub fn compose(&self, coeffs: &[f64]) -> Jet {
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let d = self.valid.min(coeffs.len().saturating_sub(1));
        let mut r = Jet { shape: self.shape.clone(), c: vec![0.0; self.c.len()], valid: self.valid };
        r.c[0] = coeffs[d];
        for k in (0..d).rev() {
            r = &r * &delta;
            r.c[0] += coeffs[k];
        }
        r.valid = self.valid;
        r.truncate()
    }

    fn same_shape(&self, other: &Jet) {
        debug_assert!(Arc::ptr_eq(&self.shape, &other.shape), "jets with different shapes combined");
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binom_real(p: f64, k: usize) -> f64 {
    let mut b = 1.0;
    for j in 0..k {
        b *= (p - j as f64) / (j as f64 + 1.0);
    }
    b
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect();
        Jet { shape: self.shape.clone(), c, valid: self.valid.min(rhs.valid) }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect();
        Jet { shape: self.shape.clone(), c, valid: self.valid.min(rhs.valid) }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let mut out = vec![0.0; self.c.len()];
        for &(i, j, k) in &self.shape.mul {
            let a = self.c[i as usize];
            if a == 0.0 {
                continue;
            }
            out[k as usize] += a * rhs.c[j as usize];
        }
        Jet { shape: self.shape.clone(), c: out, valid: self.valid.min(rhs.valid) }.truncate()
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        &self * &rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for c in self.c.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for c in self.c.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Real for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn cst(&self, c: f64) -> Self {
        let mut out = vec![0.0; self.c.len()];
        out[0] = c;
        Jet { shape: self.shape.clone(), c: out, valid: self.shape.degree }
    }
    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
    fn exp(&self) -> Self {
        let a = self.value().exp();
        let coeffs: Vec<f64> = (0..=self.valid).map(|k| a / factorial(k)).collect();
        self.compose(&coeffs)
    }
    fn ln(&self) -> Self {
        let a = self.value();
        let mut coeffs = vec![a.ln()];
        for k in 1..=self.valid {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&coeffs)
    }
    fn recip(&self) -> Self {
        let a = self.value();
        let coeffs: Vec<f64> = (0..=self.valid)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * a.powi(-(k as i32) - 1)
            })
            .collect();
        self.compose(&coeffs)
    }
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut result = self.cst(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result.valid = result.valid.min(self.valid);
        result
    }
    fn powf(&self, p: f64) -> Self {
        let a = self.value();
        let coeffs: Vec<f64> = (0..=self.valid).map(|k| binom_real(p, k) * a.powf(p - k as f64)).collect();
        self.compose(&coeffs)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_expansion() {
        let v = Jet::seed(&[0.3, -1.2], 3);
        let f = v[0].clone() * v[1].clone() * v[1].clone();
        // ∂x∂y (x y²) = 2y
        assert!((f.partial(&[1, 1]) - 2.0 * -1.2).abs() < 1e-14);
        assert!((f.partial(&[0, 2]) - 2.0 * 0.3).abs() < 1e-14);
        assert_eq!(f.partial(&[3, 0]), 0.0);
    }

    #[test]
    fn elementary_functions_have_exact_derivatives() {
        let x = Jet::variable(1, 4, 0, 0.7);
        let e = x.exp();
        for k in 0..=4u8 {
            assert!((e.partial(&[k]) - 0.7f64.exp()).abs() < 1e-12);
        }
        let s = x.sqrt();
        assert!((s.partial(&[2]) - (-0.25 * 0.7f64.powf(-1.5))).abs() < 1e-12);
        let r = x.recip();
        assert!((r.partial(&[3]) - (-6.0 / 0.7f64.powi(4))).abs() < 1e-10);
        let l = x.ln();
        assert!((l.partial(&[2]) + 1.0 / 0.49).abs() < 1e-12);
        let p = x.powi(-2);
        assert!((p.partial(&[1]) + 2.0 / 0.7f64.powi(3)).abs() < 1e-11);
    }

    #[test]
    fn derivative_lowers_valid_degree() {
        let v = Jet::seed(&[1.0, 2.0, 3.0], 2);
        let f = v[0].clone() * v[2].clone();
        let d = f.deriv(0);
        assert_eq!(d.valid_degree(), 1);
        assert!((d.value() - 3.0).abs() < 1e-15);
        assert!((d.partial(&[0, 0, 1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_chain_rule() {
        let v = Jet::seed(&[0.4, 0.9], 3);
        let g = (v[0].clone() * v[1].clone() + 1.0).sqrt().exp();
        let h = 1e-5;
        let f = |a: f64, b: f64| (a * b + 1.0).sqrt().exp();
        let fd = (f(0.4 + h, 0.9) - f(0.4 - h, 0.9)) / (2.0 * h);
        assert!((g.partial(&[1, 0]) - fd).abs() < 1e-8);
    }
}
