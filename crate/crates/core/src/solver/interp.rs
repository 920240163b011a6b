//! Cubic Lagrange interpolation on the cell-centred velocity lattice.

use crate::profiles::VGrid;

/// Taps and weights of the four-point stencil along one axis; `None`
/// when the position lies outside the box. Taps outside the lattice read zero.
#[inline]
pub fn stencil(grid: &VGrid, axis: usize, v: f64) -> Option<([isize; 4], [f64; 4])> {
    let p = grid.fractional(axis, v);
    let n = grid.n[axis] as f64;
    if !(-0.5..=n - 0.5).contains(&p) {
        return None;
    }
    let i0 = p.floor();
    let s = p - i0;
    let i0 = i0 as isize;
    let w = [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ];
    Some(([i0 - 1, i0, i0 + 1, i0 + 2], w))
}

/// Tricubic interpolation of `values` (velocity index order of `grid`) at `v`.
/// Returns `None` outside the box.
pub fn tricubic(grid: &VGrid, values: &[f64], v: [f64; 3]) -> Option<f64> {
    let (ia, wa) = stencil(grid, 0, v[0])?;
    let (ib, wb) = stencil(grid, 1, v[1])?;
    let (ic, wc) = stencil(grid, 2, v[2])?;
    let n = grid.n.map(|k| k as isize);
    let mut acc = 0.0;
    for a in 0..4 {
        if ia[a] < 0 || ia[a] >= n[0] || wa[a] == 0.0 {
            continue;
        }
        for b in 0..4 {
            if ib[b] < 0 || ib[b] >= n[1] || wb[b] == 0.0 {
                continue;
            }
            let wab = wa[a] * wb[b];
            let base = ((ia[a] * n[1] + ib[b]) * n[2]) as usize;
            for c in 0..4 {
                if ic[c] < 0 || ic[c] >= n[2] {
                    continue;
                }
                acc += wab * wc[c] * values[base + ic[c] as usize];
            }
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_polynomials_in_the_interior() {
        let g = VGrid::cube(8, 2.0).unwrap();
        let p = |v: [f64; 3]| 0.3 * v[0].powi(3) - v[1] * v[2] + 0.5 * v[2].powi(2) * v[0] + 1.0;
        let vals: Vec<f64> = (0..g.len()).map(|i| p(g.node(i))).collect();
        for v in [[0.1, -0.33, 0.27], [0.6, 0.7, -0.8], [0.0, 0.0, 0.0]] {
            let got = tricubic(&g, &vals, v).unwrap();
            assert!((got - p(v)).abs() < 1e-12, "{got} vs {}", p(v));
        }
    }

    #[test]
    fn nodes_are_reproduced() {
        let g = VGrid::cube(6, 3.0).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        for i in [0, 17, 100, g.len() - 1] {
            let got = tricubic(&g, &vals, g.node(i)).unwrap();
            assert!((got - vals[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn outside_box_is_none() {
        let g = VGrid::cube(6, 3.0).unwrap();
        let vals = vec![1.0; g.len()];
        assert!(tricubic(&g, &vals, [3.1, 0.0, 0.0]).is_none());
        assert!(tricubic(&g, &vals, [0.0, -3.01, 0.0]).is_none());
    }
}
