//! Direct discrete Fourier sums and the closed-form free flows built on them.

use std::f64::consts::PI;

use crate::lpfourier::C64;

/// Signed integer frequency of bin `i` on an axis of length `n`.
fn signed(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn is_nyquist(i: usize, n: usize) -> bool {
    n % 2 == 0 && i == n / 2
}

fn axis_pass(n: [usize; 3], data: &mut [C64], axis: usize, sign: f64) {
    let m = n[axis];
    let twiddle: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, sign * 2.0 * PI * k as f64 / m as f64)).collect();
    let stride = match axis {
        0 => n[1] * n[2],
        1 => n[2],
        _ => 1,
    };
    let mut line = vec![C64::new(0.0, 0.0); m];
    for base in 0..data.len() {
        let pos = (base / stride) % m;
        if pos != 0 {
            continue;
        }
        for (j, l) in line.iter_mut().enumerate() {
            *l = data[base + j * stride];
        }
        for k in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for (j, l) in line.iter().enumerate() {
                acc += twiddle[(j * k) % m] * l;
            }
            data[base + k * stride] = acc;
        }
    }
}

/// `Σ_j e^{∓2πi j·k/n} data_j` by explicit sums along each axis; the
/// inverse carries the `1/N` factor.
pub fn direct_dft(n: [usize; 3], data: &[C64], inverse: bool) -> Vec<C64> {
    let mut out = data.to_vec();
    let sign = if inverse { 1.0 } else { -1.0 };
    for axis in 0..3 {
        axis_pass(n, &mut out, axis, sign);
    }
    if inverse {
        let s = 1.0 / data.len() as f64;
        out.iter_mut().for_each(|c| *c *= s);
    }
    out
}

/// Wavevector of bin `idx` on the box `[−L, L)³`.
pub fn wavevector(n: [usize; 3], half_length: f64, idx: usize) -> [f64; 3] {
    let k = idx % n[2];
    let j = (idx / n[2]) % n[1];
    let i = idx / (n[1] * n[2]);
    let m = [i, j, k];
    std::array::from_fn(|a| signed(m[a], n[a]) as f64 * PI / half_length)
}

fn on_nyquist(n: [usize; 3], idx: usize) -> bool {
    let k = idx % n[2];
    let j = (idx / n[2]) % n[1];
    let i = idx / (n[1] * n[2]);
    is_nyquist(i, n[0]) || is_nyquist(j, n[1]) || is_nyquist(k, n[2])
}

fn real(data: &[f64]) -> Vec<C64> {
    data.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Free streaming of one periodic slab: the trigonometric interpolant of
/// `slab` translated by `−shift`, that is `f(x − shift)`, Nyquist dropped.
pub fn transport_slab(n: [usize; 3], half_length: f64, slab: &[f64], shift: [f64; 3]) -> Vec<f64> {
    let mut hat = direct_dft(n, &real(slab), false);
    for (idx, c) in hat.iter_mut().enumerate() {
        if on_nyquist(n, idx) {
            *c = C64::new(0.0, 0.0);
            continue;
        }
        let xi = wavevector(n, half_length, idx);
        let phase = -(xi[0] * shift[0] + xi[1] * shift[1] + xi[2] * shift[2]);
        *c *= C64::from_polar(1.0, phase);
    }
    direct_dft(n, &hat, true).into_iter().map(|c| c.re).collect()
}

/// Homogeneous wave propagation of `(φ, ∂_tφ)` over `t`:
/// `φ̂(t) = cos(t|ξ|)φ̂ + sin(t|ξ|)/|ξ| ∂_tφ̂`, `∂_tφ̂(t) = −|ξ| sin(t|ξ|)φ̂ + cos(t|ξ|)∂_tφ̂`.
pub fn free_wave(n: [usize; 3], half_length: f64, phi: &[f64], dphi: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let p = direct_dft(n, &real(phi), false);
    let q = direct_dft(n, &real(dphi), false);
    let mut p_out = vec![C64::new(0.0, 0.0); p.len()];
    let mut q_out = vec![C64::new(0.0, 0.0); p.len()];
    for idx in 0..p.len() {
        let xi = wavevector(n, half_length, idx);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let (c, s) = ((t * r).cos(), (t * r).sin());
        let sinc = if r == 0.0 { t } else { s / r };
        p_out[idx] = p[idx] * c + q[idx] * sinc;
        q_out[idx] = -p[idx] * (r * s) + q[idx] * c;
    }
    let back = |h: Vec<C64>| direct_dft(n, &h, true).into_iter().map(|c| c.re).collect::<Vec<f64>>();
    (back(p_out), back(q_out))
}
