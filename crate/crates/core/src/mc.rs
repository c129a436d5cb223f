//! Monte Carlo comparison of GLS accuracy under K- and D-designs.
//!
//! Each design gets its own independent draws. The per-replicate error is
//! the mean squared error over the trend coefficients, averaged over
//! replicates; `eff = 100 · mse_K / mse_D`.

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::StandardNormal;

use crate::error::{positive, Error, Result};
use crate::fim::{Fim2, Fim3};
use crate::linalg::SymTridiagonal;
use crate::model::{
    inv_corr_for_rate, Design1D, GridDesign2D, OuParams, SheetParams, Trend1D, Trend2D,
    DEFAULT_GAP_FLOOR,
};
use crate::sample::{draw_grid, draw_line, grid_design_id, line_design_id, replicate_rng, AxisFactor};
use crate::search::{
    critical_betas, nine_point_restricted_2d, three_point_restricted_1d, Criterion,
    DEFAULT_GRID_RESOLUTION, DEFAULT_LINE_RESOLUTION, DEFAULT_REFINE_TOL,
};

/// The design the K-design is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DReference {
    /// `{0, ½, 1}` (and `{0, ½, 1}²`), the design the D criterion is usually
    /// taken to select.
    #[default]
    Equidistant,
    /// The optimum returned by the D search.
    Searched,
}

/// What to do when the K search ends on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollapsePolicy {
    #[default]
    Error,
    /// Simulate the limit design, in which the collapsed coordinate merges
    /// with the end point (`{0, 1}` on that axis).
    Merge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: u64,
    pub sigma: f64,
    pub trend_1d: Trend1D,
    pub trend_2d: Trend2D,
    pub d_reference: DReference,
    pub on_collapse: CollapsePolicy,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            replicates: 10_000,
            seed: 7,
            sigma: 0.25,
            trend_1d: Trend1D::new(1.0, 1.0),
            trend_2d: Trend2D::new(1.0, 1.0, 1.0),
            d_reference: DReference::Equidistant,
            on_collapse: CollapsePolicy::Error,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1"));
        }
        positive("sigma", self.sigma)?;
        Ok(())
    }
}

/// Precomputed GLS weights `(H C⁻¹ Hᵀ)⁻¹ H C⁻¹` for a line design.
#[derive(Debug, Clone)]
pub struct GlsEstimator1D {
    weights: [Vec<f64>; 2],
    fim: Fim2,
}

impl GlsEstimator1D {
    /// Only the correlation enters: the estimator is invariant to the scale.
    pub fn new(params: &OuParams, design: &Design1D) -> Result<Self> {
        let inv = inv_corr_for_rate(params.beta(), design.points(), DEFAULT_GAP_FLOOR)?;
        let ones = vec![1.0; design.len()];
        let c_ones = inv.mul_vec(&ones);
        let c_s = inv.mul_vec(design.points());
        let s = design.points();
        let fim = Fim2::new(
            c_ones.iter().sum(),
            dot(s, &c_ones),
            dot(s, &c_s),
        );
        let m = fim.inverse()?.matrix();
        let weights = [0, 1].map(|k| {
            c_ones
                .iter()
                .zip(&c_s)
                .map(|(a, b)| m[k][0] * a + m[k][1] * b)
                .collect()
        });
        Ok(Self { weights, fim })
    }

    /// Information matrix of the correlation (unit variance).
    pub fn fim(&self) -> Fim2 {
        self.fim
    }

    pub fn estimate(&self, y: &[f64]) -> Trend1D {
        Trend1D::new(dot(&self.weights[0], y), dot(&self.weights[1], y))
    }
}

/// Precomputed GLS weights for a grid with the trend `α₀ + α₁ s + α₂ t`.
#[derive(Debug, Clone)]
pub struct GlsEstimator2D {
    weights: [Vec<f64>; 3],
    fim: Fim3,
}

/// `(P⁻¹ ⊗ Q⁻¹) x` for `x` in s-major order.
fn kron_tridiagonal_mul(p: &SymTridiagonal, q: &SymTridiagonal, x: &[f64]) -> Vec<f64> {
    let (n, m) = (p.len(), q.len());
    let mut rows: Vec<f64> = x.chunks_exact(m).flat_map(|row| q.mul_vec(row)).collect();
    let mut column = vec![0.0; n];
    for j in 0..m {
        for i in 0..n {
            column[i] = rows[i * m + j];
        }
        for (i, v) in p.mul_vec(&column).into_iter().enumerate() {
            rows[i * m + j] = v;
        }
    }
    rows
}

impl GlsEstimator2D {
    pub fn new(params: &SheetParams, design: &GridDesign2D) -> Result<Self> {
        let s = design.s_points().points();
        let t = design.t_points().points();
        let p = inv_corr_for_rate(params.beta(), s, DEFAULT_GAP_FLOOR)?;
        let q = inv_corr_for_rate(params.gamma(), t, DEFAULT_GAP_FLOOR)?;
        let basis: [Vec<f64>; 3] = [
            design.iter().map(|_| 1.0).collect(),
            design.iter().map(|(si, _)| si).collect(),
            design.iter().map(|(_, tj)| tj).collect(),
        ];
        let c_basis = basis.clone().map(|b| kron_tridiagonal_mul(&p, &q, &b));
        let mut f = [[0.0; 3]; 3];
        for (i, row) in f.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = dot(&basis[i], &c_basis[j]);
            }
        }
        let fim = Fim3::new(f);
        let m = fim.inverse()?.matrix();
        let weights = [0, 1, 2].map(|k| {
            (0..design.len())
                .map(|i| (0..3).map(|l| m[k][l] * c_basis[l][i]).sum())
                .collect()
        });
        Ok(Self { weights, fim })
    }

    pub fn fim(&self) -> Fim3 {
        self.fim
    }

    /// `y` in s-major order.
    pub fn estimate(&self, y: &[f64]) -> Trend2D {
        Trend2D::new(
            dot(&self.weights[0], y),
            dot(&self.weights[1], y),
            dot(&self.weights[2], y),
        )
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::InvalidArgument("observation count does not match the design"));
    }
    Ok(())
}

/// `(H C⁻¹ Hᵀ)⁻¹ H C⁻¹ y` with the tridiagonal inverse correlation.
pub fn gls_estimate_1d(params: &OuParams, design: &Design1D, y: &[f64]) -> Result<Trend1D> {
    check_len(design.len(), y.len())?;
    Ok(GlsEstimator1D::new(params, design)?.estimate(y))
}

/// Grid GLS estimate; `y` in s-major order.
pub fn gls_estimate_2d(params: &SheetParams, design: &GridDesign2D, y: &[f64]) -> Result<Trend2D> {
    check_len(design.len(), y.len())?;
    Ok(GlsEstimator2D::new(params, design)?.estimate(y))
}

/// Replicate statistics of GLS estimates for one design.
#[derive(Debug, Clone, PartialEq)]
pub struct GlsSummary {
    pub replicates: usize,
    pub mean_estimate: Vec<f64>,
    /// Standard error of each entry of `mean_estimate`.
    pub estimate_standard_error: Vec<f64>,
    pub mse_per_parameter: Vec<f64>,
    pub mse_per_parameter_standard_error: Vec<f64>,
    /// Mean over parameters and replicates.
    pub mse: f64,
    pub mse_standard_error: f64,
}

struct Accumulator {
    count: usize,
    truth: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    sq_err: Vec<f64>,
    sq_err_sq: Vec<f64>,
    rep_err: f64,
    rep_err_sq: f64,
}

impl Accumulator {
    fn new(truth: &[f64]) -> Self {
        let k = truth.len();
        Self {
            count: 0,
            truth: truth.to_vec(),
            sum: vec![0.0; k],
            sum_sq: vec![0.0; k],
            sq_err: vec![0.0; k],
            sq_err_sq: vec![0.0; k],
            rep_err: 0.0,
            rep_err_sq: 0.0,
        }
    }

    fn push(&mut self, estimate: &[f64]) {
        self.count += 1;
        let mut rep = 0.0;
        for (k, (&e, &a)) in estimate.iter().zip(&self.truth).enumerate() {
            let sq = (e - a) * (e - a);
            self.sum[k] += e;
            self.sum_sq[k] += e * e;
            self.sq_err[k] += sq;
            self.sq_err_sq[k] += sq * sq;
            rep += sq;
        }
        rep /= estimate.len() as f64;
        self.rep_err += rep;
        self.rep_err_sq += rep * rep;
    }

    fn finish(self) -> GlsSummary {
        let r = self.count as f64;
        // standard error of a replicate mean from its first two moments
        let se = |sum: f64, sum_sq: f64| {
            let mean = sum / r;
            if self.count < 2 {
                return f64::NAN;
            }
            libm::sqrt(((sum_sq - r * mean * mean) / (r - 1.0)).max(0.0) / r)
        };
        GlsSummary {
            replicates: self.count,
            mean_estimate: self.sum.iter().map(|s| s / r).collect(),
            estimate_standard_error: self
                .sum
                .iter()
                .zip(&self.sum_sq)
                .map(|(&s, &q)| se(s, q))
                .collect(),
            mse_per_parameter: self.sq_err.iter().map(|s| s / r).collect(),
            mse_per_parameter_standard_error: self
                .sq_err
                .iter()
                .zip(&self.sq_err_sq)
                .map(|(&s, &q)| se(s, q))
                .collect(),
            mse: self.rep_err / r,
            mse_standard_error: se(self.rep_err, self.rep_err_sq),
        }
    }
}

/// Simulates `y = trend + noise` at `design` and collects GLS errors.
pub fn simulate_gls_1d(
    params: &OuParams,
    design: &Design1D,
    trend: &Trend1D,
    replicates: usize,
    seed: u64,
) -> Result<GlsSummary> {
    let estimator = GlsEstimator1D::new(params, design)?;
    let factor = AxisFactor::new(params.beta(), design.points())?;
    let scale = libm::sqrt(params.stationary_variance());
    let id = line_design_id(design);
    let mean: Vec<f64> = design.points().iter().map(|&s| trend.eval(s)).collect();
    let mut acc = Accumulator::new(&trend.as_array());
    let mut y = vec![0.0; design.len()];
    for r in 0..replicates {
        let mut rng = replicate_rng(seed, id, r as u64);
        draw_line(&factor, scale, &mut rng, &StandardNormal, &mut y);
        for (v, m) in y.iter_mut().zip(&mean) {
            *v += m;
        }
        acc.push(&estimator.estimate(&y).as_array());
    }
    Ok(acc.finish())
}

pub fn simulate_gls_2d(
    params: &SheetParams,
    design: &GridDesign2D,
    trend: &Trend2D,
    replicates: usize,
    seed: u64,
) -> Result<GlsSummary> {
    let estimator = GlsEstimator2D::new(params, design)?;
    let s = AxisFactor::new(params.beta(), design.s_points().points())?;
    let t = AxisFactor::new(params.gamma(), design.t_points().points())?;
    let scale = libm::sqrt(params.stationary_variance());
    let id = grid_design_id(design);
    let mean: Vec<f64> = design.iter().map(|(si, tj)| trend.eval(si, tj)).collect();
    let mut acc = Accumulator::new(&trend.as_array());
    let mut y = vec![0.0; design.len()];
    for r in 0..replicates {
        let mut rng = replicate_rng(seed, id, r as u64);
        draw_grid(&s, &t, scale, &mut rng, &StandardNormal, &mut y);
        for (v, m) in y.iter_mut().zip(&mean) {
            *v += m;
        }
        acc.push(&estimator.estimate(&y).as_array());
    }
    Ok(acc.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffReport {
    pub mse_k: f64,
    pub mse_d: f64,
    pub eff_percent: f64,
    /// Standard error of `eff_percent` (delta method, independent designs).
    pub mc_standard_error: f64,
    /// Free coordinates of the K-design: `d`, or `(d, δ)` on grids.
    pub k_design: Vec<f64>,
    pub d_design: Vec<f64>,
    /// The K search ended on the boundary and the merged design was used.
    pub collapsed: bool,
}

/// Efficiency of two simulated designs.
pub fn efficiency(k: &GlsSummary, d: &GlsSummary) -> (f64, f64) {
    let eff = 100.0 * k.mse / d.mse;
    let rel_k = k.mse_standard_error / k.mse;
    let rel_d = d.mse_standard_error / d.mse;
    (eff, eff * libm::sqrt(rel_k * rel_k + rel_d * rel_d))
}

/// `{0, d, 1}`, or `{0, 1}` when `d` sits on the boundary.
fn three_point_design(d: f64, collapsed: bool) -> Result<Design1D> {
    if collapsed {
        Design1D::new(vec![0.0, 1.0])
    } else {
        Design1D::new(vec![0.0, d, 1.0])
    }
}

/// Three-point K-design against the D reference on `[0, 1]`.
pub fn run_efficiency_1d(params: &OuParams, config: &McConfig) -> Result<EffReport> {
    config.validate()?;
    let k = three_point_restricted_1d(params, Criterion::K, DEFAULT_LINE_RESOLUTION, DEFAULT_REFINE_TOL)?;
    let collapsed = k.is_collapsed();
    if collapsed && config.on_collapse == CollapsePolicy::Error {
        return Err(Error::CollapsedDesign);
    }
    let d_opt = match config.d_reference {
        DReference::Equidistant => 0.5,
        DReference::Searched => {
            three_point_restricted_1d(params, Criterion::D, DEFAULT_LINE_RESOLUTION, DEFAULT_REFINE_TOL)?
                .argopt[0]
        }
    };
    let sim = OuParams::new(params.beta(), config.sigma)?;
    let k_sum = simulate_gls_1d(&sim, &three_point_design(k.argopt[0], collapsed)?, &config.trend_1d, config.replicates, config.seed)?;
    let d_sum = simulate_gls_1d(&sim, &three_point_design(d_opt, false)?, &config.trend_1d, config.replicates, config.seed)?;
    let (eff_percent, mc_standard_error) = efficiency(&k_sum, &d_sum);
    Ok(EffReport {
        mse_k: k_sum.mse,
        mse_d: d_sum.mse,
        eff_percent,
        mc_standard_error,
        k_design: vec![k.argopt[0]],
        d_design: vec![d_opt],
        collapsed,
    })
}

/// Nine-point K-grid against the D reference on `[0, 1]²`.
pub fn run_efficiency_2d(params: &SheetParams, config: &McConfig) -> Result<EffReport> {
    config.validate()?;
    let k = nine_point_restricted_2d(params, Criterion::K, DEFAULT_GRID_RESOLUTION, DEFAULT_REFINE_TOL)?;
    let collapsed = k.is_collapsed();
    if collapsed && config.on_collapse == CollapsePolicy::Error {
        return Err(Error::CollapsedDesign);
    }
    let d_opt = match config.d_reference {
        DReference::Equidistant => [0.5, 0.5],
        DReference::Searched => {
            nine_point_restricted_2d(params, Criterion::D, DEFAULT_GRID_RESOLUTION, DEFAULT_REFINE_TOL)?
                .argopt
        }
    };
    let grid = |c: [f64; 2], flags: [bool; 2]| -> Result<GridDesign2D> {
        Ok(GridDesign2D::new(
            three_point_design(c[0], flags[0])?,
            three_point_design(c[1], flags[1])?,
        ))
    };
    let sim = SheetParams::new(params.beta(), params.gamma(), config.sigma)?;
    let k_sum = simulate_gls_2d(&sim, &grid(k.argopt, k.collapsed)?, &config.trend_2d, config.replicates, config.seed)?;
    let d_sum = simulate_gls_2d(&sim, &grid(d_opt, [false; 2])?, &config.trend_2d, config.replicates, config.seed)?;
    let (eff_percent, mc_standard_error) = efficiency(&k_sum, &d_sum);
    Ok(EffReport {
        mse_k: k_sum.mse,
        mse_d: d_sum.mse,
        eff_percent,
        mc_standard_error,
        k_design: k.argopt.to_vec(),
        d_design: d_opt.to_vec(),
        collapsed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffCurveRow {
    pub beta: f64,
    /// `None` where the K-design collapses.
    pub report: Option<EffReport>,
}

pub fn efficiency_curve_row(beta: f64, config: &McConfig) -> Result<EffCurveRow> {
    let config = McConfig {
        on_collapse: CollapsePolicy::Error,
        ..*config
    };
    match run_efficiency_1d(&OuParams::with_beta(beta)?, &config) {
        Ok(report) => Ok(EffCurveRow {
            beta,
            report: Some(report),
        }),
        Err(Error::CollapsedDesign) => Ok(EffCurveRow { beta, report: None }),
        Err(e) => Err(e),
    }
}

/// Efficiency against β; collapsed points are kept as rows without a report.
pub fn efficiency_curve(betas: &[f64], config: &McConfig) -> Result<Vec<EffCurveRow>> {
    betas.iter().map(|&b| efficiency_curve_row(b, config)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveInterval {
    /// `(0, β*)`.
    Lower,
    /// `(β**, 100]`.
    Upper,
}

/// `count` rates strictly inside the requested non-collapsing interval.
pub fn curve_betas(interval: CurveInterval, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidArgument("a curve needs at least 2 points"));
    }
    let roots = critical_betas(1e-10)?;
    let (lo, hi) = match interval {
        CurveInterval::Lower => (0.01, roots.beta_star - 0.01),
        CurveInterval::Upper => (roots.beta_star_star + 0.05, 100.0),
    };
    Ok(crate::optim::logspace(lo, hi, count))
}

pub const TABLE1_SMALL: [f64; 5] = [0.01, 0.03, 0.05, 0.10, 0.15];
pub const TABLE1_LARGE: [f64; 5] = [10.0, 15.0, 20.0, 25.0, 30.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Cell {
    pub beta: f64,
    pub gamma: f64,
    pub report: EffReport,
}

/// One cell of the grid efficiency table. Collapsed K-grids are simulated as
/// their merged limit and flagged.
pub fn table1_cell(beta: f64, gamma: f64, config: &McConfig) -> Result<Table1Cell> {
    let config = McConfig {
        on_collapse: CollapsePolicy::Merge,
        ..*config
    };
    Ok(Table1Cell {
        beta,
        gamma,
        report: run_efficiency_2d(&SheetParams::with_rates(beta, gamma)?, &config)?,
    })
}

/// Both 5x5 blocks, β-major within each block.
pub fn table1(config: &McConfig) -> Result<Vec<Table1Cell>> {
    let mut cells = Vec::with_capacity(50);
    for block in [TABLE1_SMALL, TABLE1_LARGE] {
        for &beta in &block {
            for &gamma in &block {
                cells.push(table1_cell(beta, gamma, config)?);
            }
        }
    }
    Ok(cells)
}
