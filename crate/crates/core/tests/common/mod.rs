//! Brute-force oracles built only from nalgebra and direct definitions.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use rand::Rng;

/// `exp(-rate |a_i - a_j|)`.
pub fn dense_corr(rate: f64, points: &[f64]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| (-rate * (points[i] - points[j]).abs()).exp())
}

/// `H C⁻¹ Hᵀ` with `H = [1; s]` by dense inversion.
pub fn dense_fim_1d(rate: f64, points: &[f64]) -> DMatrix<f64> {
    let n = points.len();
    let h = DMatrix::from_fn(2, n, |r, i| if r == 0 { 1.0 } else { points[i] });
    let inv = dense_corr(rate, points).try_inverse().expect("invertible");
    &h * inv * h.transpose()
}

/// `G C⁻¹ Gᵀ` with `G = [1; s; t]` over the s-major grid, `C = P ⊗ Q`.
pub fn dense_fim_2d(beta: f64, gamma: f64, s: &[f64], t: &[f64]) -> DMatrix<f64> {
    let c = dense_corr(beta, s).kronecker(&dense_corr(gamma, t));
    let coords: Vec<(f64, f64)> = s.iter().flat_map(|&a| t.iter().map(move |&b| (a, b))).collect();
    let g = DMatrix::from_fn(3, coords.len(), |r, k| match r {
        0 => 1.0,
        1 => coords[k].0,
        _ => coords[k].1,
    });
    let inv = c.try_inverse().expect("invertible");
    &g * inv * g.transpose()
}

/// Weighted least squares with a dense inverse: `(X W Xᵀ)⁻¹ X W y`.
pub fn dense_gls(rate: f64, points: &[f64], y: &[f64]) -> DVector<f64> {
    let n = points.len();
    let h = DMatrix::from_fn(2, n, |r, i| if r == 0 { 1.0 } else { points[i] });
    let w = dense_corr(rate, points).try_inverse().unwrap();
    let f = &h * &w * h.transpose();
    f.try_inverse().unwrap() * &h * w * DVector::from_column_slice(y)
}

pub fn eig_condition(m: &DMatrix<f64>) -> f64 {
    let e = SymmetricEigen::new(m.clone()).eigenvalues;
    e.max() / e.min()
}

pub fn eig_condition3(m: [[f64; 3]; 3]) -> f64 {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let e = SymmetricEigen::new(mat).eigenvalues;
    e.max() / e.min()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Sorted design with gaps drawn log-uniformly from `[1e-2, 1]`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x = rng.random_range(-1.0..1.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        x += 10f64.powf(rng.random_range(-2.0..0.0));
    }
    out
}

/// Random symmetric positive-definite matrix `A Aᵀ + ε I`, scaled to unit
/// trace, with a condition number spread over several decades.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let scale = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| 10f64.powf(rng.random_range(-2.0..1.0))));
    let m = &scale * &a * a.transpose() * &scale + DMatrix::identity(n, n) * 1e-3;
    let tr = m.trace();
    m / tr
}

/// Dense 1D scan: `(argmin, min)` over `count` points of `[lo, hi]`.
pub fn dense_scan(f: impl Fn(f64) -> f64, lo: f64, hi: f64, count: usize) -> (f64, f64) {
    let mut best = (lo, f64::INFINITY);
    for i in 0..count {
        let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}
