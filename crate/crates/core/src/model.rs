//! Covariance parameters, designs, and the correlation structure of
//! Ornstein-Uhlenbeck observations.
//!
//! Observations of a stationary OU process at `s_1 < … < s_n` have
//! correlation `exp(-β |s_i - s_j|)`, which factorises into products of the
//! neighbour correlations `p_i = exp(-β d_i)`. The inverse is tridiagonal.
//! On a regular grid the OU sheet correlation is the Kronecker product of the
//! two axis correlations (s-major ordering).

use alloc::vec::Vec;

use crate::error::{positive, Error, Result};
use crate::linalg::{Matrix, SymTridiagonal};

/// Smallest admissible `rate * gap` before a design is treated as
/// numerically singular.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-12;

/// Largest grid handled by the dense 2D covariance routines.
pub const DEFAULT_GRID_CAP: usize = 10_000;

/// OU process parameters: inverse length scale `beta` and noise scale
/// `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    beta: f64,
    sigma: f64,
}

impl OuParams {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            beta: positive("beta", beta)?,
            sigma: positive("sigma", sigma)?,
        })
    }

    /// Unit noise scale; enough for everything except the sampler.
    pub fn with_beta(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `σ² / (2β)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.beta)
    }
}

/// OU sheet parameters: rates `beta` (s axis), `gamma` (t axis) and noise
/// scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetParams {
    beta: f64,
    gamma: f64,
    sigma: f64,
}

impl SheetParams {
    pub fn new(beta: f64, gamma: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            beta: positive("beta", beta)?,
            gamma: positive("gamma", gamma)?,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn with_rates(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(beta, gamma, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `σ² / (4βγ)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (4.0 * self.beta * self.gamma)
    }

    /// The same sheet with the two axes exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            beta: self.gamma,
            gamma: self.beta,
            sigma: self.sigma,
        }
    }

    pub(crate) fn s_axis(&self) -> OuParams {
        OuParams {
            beta: self.beta,
            sigma: 1.0,
        }
    }

    pub(crate) fn t_axis(&self) -> OuParams {
        OuParams {
            beta: self.gamma,
            sigma: 1.0,
        }
    }
}

/// Strictly increasing observation points on a line, at least two of them.
///
/// Input order does not matter: points are sorted on construction, so two
/// designs with the same point set compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Design1D {
    points: Vec<f64>,
}

impl Design1D {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinitePoint { index });
        }
        points.sort_by(f64::total_cmp);
        if let Some(index) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::RepeatedPoint { index });
        }
        Ok(Self { points })
    }

    /// `{0, d, 2d, …, (n-1)d}`.
    pub fn equidistant(step: f64, n: usize) -> Result<Self> {
        positive("step", step)?;
        Self::new((0..n).map(|i| i as f64 * step).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `d_i = s_{i+1} - s_i`.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}

/// Regular grid `{(s_i, t_j)}`, the Cartesian product of two 1D designs.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDesign2D {
    s: Design1D,
    t: Design1D,
}

impl GridDesign2D {
    pub fn new(s: Design1D, t: Design1D) -> Self {
        Self { s, t }
    }

    pub fn s_points(&self) -> &Design1D {
        &self.s
    }

    pub fn t_points(&self) -> &Design1D {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.s.len() * self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points in s-major order: `(s_1,t_1), (s_1,t_2), …, (s_n,t_m)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.s
            .points()
            .iter()
            .flat_map(move |&s| self.t.points().iter().map(move |&t| (s, t)))
    }

    pub fn swapped(&self) -> Self {
        Self {
            s: self.t.clone(),
            t: self.s.clone(),
        }
    }
}

/// Linear trend `α₀ + α₁ s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trend1D {
    pub alpha0: f64,
    pub alpha1: f64,
}

impl Trend1D {
    pub fn new(alpha0: f64, alpha1: f64) -> Self {
        Self { alpha0, alpha1 }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.alpha0 + self.alpha1 * s
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.alpha0, self.alpha1]
    }
}

/// Planar trend `α₀ + α₁ s + α₂ t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trend2D {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Trend2D {
    pub fn new(alpha0: f64, alpha1: f64, alpha2: f64) -> Self {
        Self {
            alpha0,
            alpha1,
            alpha2,
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.alpha0 + self.alpha1 * s + self.alpha2 * t
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha0, self.alpha1, self.alpha2]
    }
}

/// `C[i][j] = exp(-β |s_i - s_j|)`, built from products of neighbour
/// correlations.
pub fn corr_matrix_1d(params: &OuParams, design: &Design1D) -> Matrix {
    corr_matrix_for_rate(params.beta(), design.points())
}

pub(crate) fn corr_matrix_for_rate(rate: f64, points: &[f64]) -> Matrix {
    let n = points.len();
    let p: Vec<f64> = points
        .windows(2)
        .map(|w| libm::exp(-rate * (w[1] - w[0])))
        .collect();
    let mut c = Matrix::identity(n);
    for i in 0..n {
        let mut prod = 1.0;
        for j in i + 1..n {
            prod *= p[j - 1];
            c[(i, j)] = prod;
            c[(j, i)] = prod;
        }
    }
    c
}

/// Analytic tridiagonal inverse of [`corr_matrix_1d`], with the default gap
/// floor.
pub fn inv_corr_matrix_1d(params: &OuParams, design: &Design1D) -> Result<SymTridiagonal> {
    inv_corr_matrix_1d_with_floor(params, design, DEFAULT_GAP_FLOOR)
}

pub fn inv_corr_matrix_1d_with_floor(
    params: &OuParams,
    design: &Design1D,
    floor: f64,
) -> Result<SymTridiagonal> {
    inv_corr_for_rate(params.beta(), design.points(), floor)
}

pub(crate) fn check_gaps(rate: f64, points: &[f64], floor: f64) -> Result<()> {
    for (index, w) in points.windows(2).enumerate() {
        let scaled_gap = rate * (w[1] - w[0]);
        if scaled_gap < floor {
            return Err(Error::NearSingular {
                index,
                scaled_gap,
                floor,
            });
        }
    }
    Ok(())
}

pub(crate) fn inv_corr_for_rate(rate: f64, points: &[f64], floor: f64) -> Result<SymTridiagonal> {
    check_gaps(rate, points, floor)?;
    let n = points.len();
    // 1 / (1 - p_i²) and p_i / (p_i² - 1), with 1 - p² = -expm1(-2βd)
    let mut inv_one_minus_p2 = Vec::with_capacity(n - 1);
    let mut off = Vec::with_capacity(n - 1);
    for w in points.windows(2) {
        let x = rate * (w[1] - w[0]);
        let q = -1.0 / libm::expm1(-2.0 * x);
        inv_one_minus_p2.push(q);
        off.push(-libm::exp(-x) * q);
    }
    let mut diag = Vec::with_capacity(n);
    diag.push(inv_one_minus_p2[0]);
    for k in 1..n - 1 {
        // V_k = 1/(1-p_k²) + p_{k-1}²/(1-p_{k-1}²)
        diag.push(inv_one_minus_p2[k] + (inv_one_minus_p2[k - 1] - 1.0));
    }
    diag.push(inv_one_minus_p2[n - 2]);
    SymTridiagonal::new(diag, off)
}

/// Unit-variance correlation of the sheet on a grid, `P(n) ⊗ Q(m)`.
pub fn cov_matrix_2d(params: &SheetParams, design: &GridDesign2D) -> Result<Matrix> {
    cov_matrix_2d_with_cap(params, design, DEFAULT_GRID_CAP)
}

pub fn cov_matrix_2d_with_cap(
    params: &SheetParams,
    design: &GridDesign2D,
    cap: usize,
) -> Result<Matrix> {
    check_grid_cap(design, cap)?;
    let p = corr_matrix_1d(&params.s_axis(), design.s_points());
    let q = corr_matrix_1d(&params.t_axis(), design.t_points());
    Ok(p.kron(&q))
}

pub(crate) fn check_grid_cap(design: &GridDesign2D, cap: usize) -> Result<()> {
    let points = design.len();
    if points > cap {
        return Err(Error::GridTooLarge { points, cap });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_point_correlation_at_ln2() {
        let params = OuParams::with_beta(core::f64::consts::LN_2).unwrap();
        let design = Design1D::new(vec![0.0, 1.0]).unwrap();
        let c = corr_matrix_1d(&params, &design);
        assert!((c[(0, 1)] - 0.5).abs() < 1e-15);
        assert_eq!(c[(0, 0)], 1.0);
        assert_eq!(c[(1, 0)], c[(0, 1)]);
    }

    #[test]
    fn correlation_has_product_structure() {
        let params = OuParams::with_beta(0.9).unwrap();
        let design = Design1D::equidistant(0.4, 3).unwrap();
        let c = corr_matrix_1d(&params, &design);
        assert!((c[(0, 2)] - c[(0, 1)] * c[(1, 2)]).abs() < 1e-16);
    }

    #[test]
    fn correlation_matches_pairwise_distances() {
        let params = OuParams::with_beta(1.0).unwrap();
        let design = Design1D::new(vec![0.0, 0.3, 1.0]).unwrap();
        let c = corr_matrix_1d(&params, &design);
        let s = design.points();
        for i in 0..3 {
            for j in 0..3 {
                let want = libm::exp(-(s[i] - s[j]).abs());
                assert!((c[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_point_inverse_at_ln2() {
        let params = OuParams::with_beta(core::f64::consts::LN_2).unwrap();
        let design = Design1D::new(vec![0.0, 1.0]).unwrap();
        let inv = inv_corr_matrix_1d(&params, &design).unwrap();
        assert!((inv.get(0, 0) - 4.0 / 3.0).abs() < 1e-14);
        assert!((inv.get(1, 1) - 4.0 / 3.0).abs() < 1e-14);
        assert!((inv.get(0, 1) + 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn middle_diagonal_entry_is_v2() {
        let beta = 2.0;
        let params = OuParams::with_beta(beta).unwrap();
        let design = Design1D::new(vec![0.0, 0.5, 1.5]).unwrap();
        let inv = inv_corr_matrix_1d(&params, &design).unwrap();
        let p1 = libm::exp(-beta * 0.5);
        let p2 = libm::exp(-beta * 1.0);
        let v2 = 1.0 / (1.0 - p2 * p2) + p1 * p1 / (1.0 - p1 * p1);
        let v2_alt = (1.0 - p2 * p2 * p1 * p1) / ((p2 * p2 - 1.0) * (p1 * p1 - 1.0));
        assert!((inv.get(1, 1) - v2).abs() < 1e-14);
        assert!((v2 - v2_alt).abs() < 1e-14);
    }

    #[test]
    fn near_coincident_points_are_rejected() {
        let params = OuParams::with_beta(1.0).unwrap();
        let design = Design1D::new(vec![0.0, 1e-14, 1.0]).unwrap();
        assert!(matches!(
            inv_corr_matrix_1d(&params, &design),
            Err(Error::NearSingular { index: 0, .. })
        ));
        assert!(inv_corr_matrix_1d_with_floor(&params, &design, 1e-15).is_ok());
    }

    #[test]
    fn design_validation() {
        assert_eq!(Design1D::new(vec![1.0]), Err(Error::TooFewPoints(1)));
        assert_eq!(
            Design1D::new(vec![0.0, 0.0]),
            Err(Error::RepeatedPoint { index: 0 })
        );
        assert!(matches!(
            Design1D::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinitePoint { index: 1 })
        ));
        let shuffled = Design1D::new(vec![1.0, 0.0, 0.5]).unwrap();
        assert_eq!(shuffled.points(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(OuParams::new(0.0, 1.0).is_err());
        assert!(OuParams::new(1.0, -1.0).is_err());
        assert!(SheetParams::new(1.0, f64::INFINITY, 1.0).is_err());
        let p = OuParams::new(2.0, 0.5).unwrap();
        assert!((p.stationary_variance() - 0.0625).abs() < 1e-16);
        let s = SheetParams::new(1.0, 2.0, 0.5).unwrap();
        assert!((s.stationary_variance() - 0.25 / 8.0).abs() < 1e-16);
    }

    #[test]
    fn grid_corner_correlation() {
        let ln2 = core::f64::consts::LN_2;
        let params = SheetParams::with_rates(ln2, ln2).unwrap();
        let axis = Design1D::new(vec![0.0, 1.0]).unwrap();
        let grid = GridDesign2D::new(axis.clone(), axis);
        let c = cov_matrix_2d(&params, &grid).unwrap();
        // (0,0) is row 0, (1,1) is row 3 in s-major order
        assert!((c[(0, 3)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grid_cap_is_enforced() {
        let params = SheetParams::with_rates(1.0, 1.0).unwrap();
        let axis = Design1D::equidistant(0.1, 10).unwrap();
        let grid = GridDesign2D::new(axis.clone(), axis);
        assert_eq!(
            cov_matrix_2d_with_cap(&params, &grid, 50),
            Err(Error::GridTooLarge {
                points: 100,
                cap: 50
            })
        );
    }
}
