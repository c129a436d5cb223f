//! Optimal design searches.
//!
//! * three-point restricted line designs `{0, d, 1}` and nine-point
//!   restricted grids `{0, d, 1} × {0, δ, 1}` (D and K criteria), with
//!   collapse detection when the K-optimum sits on the boundary,
//! * the critical rates β* < β** between which the three-point K-design
//!   collapses (positive roots of `S(β)`),
//! * the two-point K-optimal step (unique root of `R(d)`),
//! * equidistant increasing-domain designs on a line and four-point grids.
//!
//! Searches are a coarse scan followed by golden-section refinement (one
//! coordinate at a time on grids). Scan ties go to the smallest coordinate.

use alloc::vec::Vec;

use crate::error::{positive, Error, Result};
use crate::fim::{equidistant_entries, FimEntries1D, FimEntries2D};
use crate::model::{OuParams, SheetParams, DEFAULT_GAP_FLOOR};
use crate::objectives::{d_objective_2d, k_objective_1d, k_objective_2d, r_objective_1d, r_to_k};
use crate::optim::{argmin, find_root, golden_section, linspace, logspace};

/// Distance to the design-space boundary below which an optimum counts as
/// collapsed.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Coarse scan size for one-dimensional restricted searches.
pub const DEFAULT_LINE_RESOLUTION: usize = 2001;

/// Coarse scan size per axis for grid searches.
pub const DEFAULT_GRID_RESOLUTION: usize = 201;

pub const DEFAULT_REFINE_TOL: f64 = 1e-10;

/// Bisection runs until the bracket is this narrow, then secant steps take
/// over.
const ROOT_SWITCH_WIDTH: f64 = 1e-3;

const GOLDEN_MAX_ITER: usize = 500;
const MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Maximise the determinant.
    D,
    /// Minimise the condition number.
    K,
}

/// Outcome of a design search over `N` free coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult<const N: usize> {
    pub argopt: [f64; N],
    /// Determinant for D searches, condition number for K searches.
    pub value: f64,
    pub converged: bool,
    /// Per coordinate: optimum within [`BOUNDARY_TOL`] of the boundary.
    pub collapsed: [bool; N],
    pub iterations: usize,
    pub bracket: [(f64, f64); N],
}

impl<const N: usize> SearchResult<N> {
    pub fn is_collapsed(&self) -> bool {
        self.collapsed.iter().any(|&c| c)
    }
}

impl SearchResult<2> {
    fn swapped(self) -> Self {
        Self {
            argopt: [self.argopt[1], self.argopt[0]],
            collapsed: [self.collapsed[1], self.collapsed[0]],
            bracket: [self.bracket[1], self.bracket[0]],
            ..self
        }
    }
}

/// The exponential polynomial whose positive roots are β* and β**.
pub fn s_function(beta: f64) -> Result<f64> {
    positive("beta", beta)?;
    if beta > 170.0 {
        return Err(Error::Overflow { beta });
    }
    let b2 = beta * beta;
    let e = libm::exp(beta);
    let e2 = e * e;
    Ok((b2 - 6.0 * beta + 4.0) * e2 * e2 + (6.0 * b2 + 6.0 * beta - 10.0) * e2 * e
        - (11.0 * b2 - 10.0 * beta - 2.0) * e2
        + (2.0 * b2 - 6.0 * beta + 10.0) * e
        - 2.0 * b2
        - 4.0 * beta
        - 6.0)
}

/// `lim_{d→0} R'(d)` for the three-point design; its sign flips exactly at
/// the roots of [`s_function`].
pub fn three_point_r_slope_at_zero(beta: f64) -> Result<f64> {
    let s = s_function(beta)?;
    let e = libm::exp(beta);
    let em = libm::expm1(2.0 * beta);
    Ok(-(3.0 * e - 2.0) / (2.0 * beta * e * em * em) * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalBetas {
    pub beta_star: f64,
    pub beta_star_star: f64,
}

/// Positive roots of `S(β)`, bracketed in `(0, 1)` and `(1, 10)`.
///
/// `S` vanishes to high order at the origin, so the lower bracket starts at
/// 0.1 where its sign is already resolved.
pub fn critical_betas(tol: f64) -> Result<CriticalBetas> {
    positive("tol", tol)?;
    let s = |b: f64| s_function(b).unwrap_or(f64::NAN);
    let beta_star = find_root(s, 0.1, 1.0, ROOT_SWITCH_WIDTH, tol, "beta*")?.x;
    let beta_star_star = find_root(s, 1.0, 10.0, ROOT_SWITCH_WIDTH, tol, "beta**")?.x;
    Ok(CriticalBetas {
        beta_star,
        beta_star_star,
    })
}

/// Entries of the line design `{0, 1}`: the limit of `{0, d, 1}` when the
/// middle point merges with an end point.
fn unit_pair_entries(rate: f64) -> FimEntries1D {
    let p = libm::exp(-rate);
    FimEntries1D {
        l1: 1.0 + libm::tanh(0.5 * rate),
        l2: 1.0 / (1.0 + p),
        l3: -1.0 / libm::expm1(-2.0 * rate),
    }
}

/// Entries of `{0, d, 1}` for `d ∈ [0, 1]`, using the merged-point limit at
/// (or numerically next to) the ends.
pub fn three_point_entries(rate: f64, d: f64) -> FimEntries1D {
    let near = rate * d.min(1.0 - d);
    if !(near >= DEFAULT_GAP_FLOOR) {
        return unit_pair_entries(rate);
    }
    let mut e = FimEntries1D {
        l1: 1.0,
        l2: 0.0,
        l3: 0.0,
    };
    for (s, s_next) in [(0.0, d), (d, 1.0)] {
        let x = rate * (s_next - s);
        let one_minus_p = -libm::expm1(-x);
        let lead = (s_next - s) + s * one_minus_p;
        e.l1 += libm::tanh(0.5 * x);
        e.l2 += lead / (2.0 - one_minus_p);
        e.l3 += lead * lead / -libm::expm1(-2.0 * x);
    }
    e
}

/// Entries of `{0, d, 1}` together with their derivatives in `d`.
fn three_point_entries_with_slope(rate: f64, d: f64) -> (FimEntries1D, FimEntries1D) {
    let (x1, x2) = (rate * d, rate * (1.0 - d));
    let (p1, p2) = (libm::exp(-x1), libm::exp(-x2));
    let (q1, q2) = (-libm::expm1(-2.0 * x1), -libm::expm1(-2.0 * x2));
    let sech2 = |x: f64| {
        let t = libm::tanh(0.5 * x);
        1.0 - t * t
    };
    let n = 1.0 - d * p2;
    let dn = -p2 * (1.0 + rate * d);
    let value = FimEntries1D {
        l1: 1.0 + libm::tanh(0.5 * x1) + libm::tanh(0.5 * x2),
        l2: d / (1.0 + p1) + n / (1.0 + p2),
        l3: d * d / q1 + n * n / q2,
    };
    let slope = FimEntries1D {
        l1: 0.5 * rate * (sech2(x1) - sech2(x2)),
        l2: 1.0 / (1.0 + p1) + d * rate * p1 / ((1.0 + p1) * (1.0 + p1)) + dn / (1.0 + p2)
            - n * rate * p2 / ((1.0 + p2) * (1.0 + p2)),
        l3: 2.0 * d / q1 - 2.0 * rate * d * d * p1 * p1 / (q1 * q1)
            + 2.0 * n * dn / q2
            + 2.0 * rate * n * n * p2 * p2 / (q2 * q2),
    };
    (value, slope)
}

/// Derivative in `d` of the determinant of `{0, d, 1}`, or of `L1 · det`
/// (the per-axis factor of the grid determinant) when `weighted`.
pub fn three_point_d_slope(rate: f64, d: f64, weighted: bool) -> f64 {
    let (e, de) = three_point_entries_with_slope(rate, d);
    let det = e.det();
    let ddet = de.l1 * e.l3 + e.l1 * de.l3 - 2.0 * e.l2 * de.l2;
    if weighted {
        de.l1 * det + e.l1 * ddet
    } else {
        ddet
    }
}

/// Width of the window in which a D optimum is polished on the slope sign.
const POLISH_WIDTH: f64 = 1e-4;

/// Refines a D maximiser on `[0, ½]` using the sign of the analytic slope,
/// which stays accurate where the determinant itself is too flat to compare.
fn polish_d_optimum(rate: f64, d: f64, weighted: bool, tol: f64) -> f64 {
    let lo = (d - POLISH_WIDTH).max(DEFAULT_GAP_FLOOR / rate);
    let hi = (d + POLISH_WIDTH).min(0.5);
    if !(lo < hi) {
        return d;
    }
    let slope = |x: f64| three_point_d_slope(rate, x, weighted);
    let (s_lo, s_hi) = (slope(lo), slope(hi));
    if s_lo > 0.0 && s_hi >= 0.0 && hi == 0.5 {
        return 0.5;
    }
    if s_lo > 0.0 && s_hi < 0.0 {
        if let Ok(root) = find_root(slope, lo, hi, ROOT_SWITCH_WIDTH, tol, "D slope") {
            return root.x;
        }
    }
    d
}

/// `(3e^β - 2)² / (e^{2β} - 1)`, the value of R at `d ∈ {0, 1}`.
pub fn three_point_boundary_r(beta: f64) -> f64 {
    let e = libm::exp(beta);
    let top = 3.0 * e - 2.0;
    top * top / libm::expm1(2.0 * beta)
}

/// Uncorrelated (β → ∞) limit of the three-point R: `(d² + 4)² / (2(d² - d + 1))`.
pub fn three_point_r_uncorrelated(d: f64) -> f64 {
    let top = d * d + 4.0;
    top * top / (2.0 * (d * d - d + 1.0))
}

fn line_objective(criterion: Criterion, e: &FimEntries1D) -> f64 {
    match criterion {
        Criterion::D => -e.det(),
        Criterion::K => r_objective_1d(e).unwrap_or(f64::INFINITY),
    }
}

fn line_value(criterion: Criterion, e: &FimEntries1D) -> f64 {
    match criterion {
        Criterion::D => e.det(),
        Criterion::K => k_objective_1d(e).unwrap_or(f64::INFINITY),
    }
}

fn on_unit_boundary(x: f64) -> bool {
    x <= BOUNDARY_TOL || x >= 1.0 - BOUNDARY_TOL
}

/// Scan, then golden-section on the two cells around the best scan point.
fn scan_and_refine<F>(f: F, grid: &[f64], tol: f64) -> (f64, f64, bool, usize, (f64, f64))
where
    F: Fn(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let i = argmin(&values).unwrap_or(0);
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let m = golden_section(&f, lo, hi, tol, GOLDEN_MAX_ITER);
    // keep the scanned point if refinement did not beat it
    if values[i] < m.value {
        (grid[i], values[i], m.converged, m.iterations, (lo, hi))
    } else {
        (m.x, m.value, m.converged, m.iterations, (lo, hi))
    }
}

/// Upper end of the searched coordinate range.
///
/// Reflecting `{0, d, 1}` to `{0, 1 - d, 1}` only reparametrises the trend by
/// a unimodular map, so the determinant is unchanged and D searches cover
/// `[0, ½]`, reporting the smaller of two mirror optima. K is not invariant.
fn criterion_upper(criterion: Criterion) -> f64 {
    match criterion {
        Criterion::D => 0.5,
        Criterion::K => 1.0,
    }
}

/// Best middle point of `{0, d, 1}` under `criterion`.
///
/// For K the surrogate R is minimised (the same argmin as K) and the reported
/// value is K.
pub fn three_point_restricted_1d(
    params: &OuParams,
    criterion: Criterion,
    grid_resolution: usize,
    refine_tol: f64,
) -> Result<SearchResult<1>> {
    positive("refine_tol", refine_tol)?;
    if grid_resolution < 3 {
        return Err(Error::InvalidArgument("grid resolution must be at least 3"));
    }
    let beta = params.beta();
    let grid = linspace(0.0, criterion_upper(criterion), grid_resolution);
    let f = |d: f64| line_objective(criterion, &three_point_entries(beta, d));
    let (mut x, _, converged, iterations, bracket) = scan_and_refine(f, &grid, refine_tol);
    if criterion == Criterion::D {
        x = polish_d_optimum(beta, x, false, refine_tol);
    }
    Ok(SearchResult {
        argopt: [x],
        value: line_value(criterion, &three_point_entries(beta, x)),
        converged,
        collapsed: [on_unit_boundary(x)],
        iterations,
        bracket: [bracket],
    })
}

/// `R⁽²⁾(x) / R⁽¹⁾(x)` with `R⁽¹⁾(x) = e^x (e^{2x} - x - 1)` and
/// `R⁽²⁾(x) = (e^x (e^x - x - 1) + e^x - 1)(e^x - 1)`; increases from 0 to 1.
pub fn two_point_ratio(x: f64) -> f64 {
    if x <= 1.0 {
        let em1 = libm::expm1(x);
        let r1 = (1.0 + em1) * (libm::expm1(2.0 * x) - x);
        let r2 = ((1.0 + em1) * (em1 - x) + em1) * em1;
        r2 / r1
    } else {
        let u = libm::exp(-x);
        let r1 = 1.0 - (x + 1.0) * u * u;
        let r2 = ((1.0 - (x + 1.0) * u) + (u - u * u)) * (1.0 - u);
        r2 / r1
    }
}

/// `R(d) = (d² - 2)e^{3βd} + 2(βd + 1)e^{2βd} - (βd³ + d² + 2βd - 2)e^{βd} - 2`.
pub fn two_point_root_function(beta: f64, d: f64) -> f64 {
    let x = beta * d;
    let e = libm::exp(x);
    (d * d - 2.0) * e * e * e + 2.0 * (x + 1.0) * e * e
        - (beta * d * d * d + d * d + 2.0 * x - 2.0) * e
        - 2.0
}

/// `R(d) = ((d² + 2)e^{βd} - 2)² / (d² (e^{2βd} - 1))` for `{0, d}`.
pub fn two_point_r(beta: f64, d: f64) -> f64 {
    let x = beta * d;
    let top = (d * d + 2.0) * libm::expm1(x) + d * d;
    top * top / (d * d * libm::expm1(2.0 * x))
}

/// Unique K-optimal two-point design `{0, d_opt}`.
///
/// Solves `d²/2 = R⁽²⁾(βd)/R⁽¹⁾(βd)`, which has the sign of `R(d)`. The
/// right side is below 1, so `d = √2` always brackets from above.
pub fn two_point_k_optimal(params: &OuParams, tol: f64) -> Result<SearchResult<1>> {
    positive("tol", tol)?;
    let beta = params.beta();
    let h = |d: f64| 0.5 * d * d - two_point_ratio(beta * d);
    let hi = core::f64::consts::SQRT_2;
    let mut lo = 1.0;
    let mut halvings = 0;
    while h(lo) >= 0.0 {
        lo *= 0.5;
        halvings += 1;
        if halvings > 1100 {
            return Err(Error::BracketFailure {
                what: "two-point K-optimal step",
                lo,
                hi,
            });
        }
    }
    let root = find_root(h, lo, hi, ROOT_SWITCH_WIDTH, tol, "two-point K-optimal step")?;
    let e = equidistant_entries(beta, root.x, 2)?;
    Ok(SearchResult {
        argopt: [root.x],
        value: k_objective_1d(&e)?,
        converged: true,
        collapsed: [false],
        iterations: root.iterations,
        bracket: [(lo, hi)],
    })
}

/// K-optimal step of an equidistant line design, with every local minimum
/// found by the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistantKOpt {
    pub best: SearchResult<1>,
    /// `(step, K)` for each refined local minimum, ordered by step.
    pub local_minima: Vec<(f64, f64)>,
}

pub const EQUIDISTANT_SCAN: (f64, f64, usize) = (1e-4, 1e4, 2001);

/// Equidistant R(d) for `n` points.
pub fn equidistant_r(beta: f64, step: f64, n: usize) -> Result<f64> {
    r_objective_1d(&equidistant_entries(beta, step, n)?)
}

/// Minimises R (hence K) over the step of `{0, d, …, (n-1)d}`.
pub fn equidistant_k_optimal_1d(params: &OuParams, n: usize, tol: f64) -> Result<EquidistantKOpt> {
    positive("tol", tol)?;
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let beta = params.beta();
    let (lo, hi, count) = EQUIDISTANT_SCAN;
    let grid = logspace(lo, hi, count);
    let f = |d: f64| equidistant_r(beta, d, n).unwrap_or(f64::INFINITY);
    let values: Vec<f64> = grid.iter().map(|&d| f(d)).collect();
    let mut minima = Vec::new();
    let mut best: Option<SearchResult<1>> = None;
    for i in 1..count - 1 {
        if !(values[i] < values[i - 1] && values[i] <= values[i + 1]) {
            continue;
        }
        let m = golden_section(&f, grid[i - 1], grid[i + 1], tol * grid[i], GOLDEN_MAX_ITER);
        let k = r_to_k(m.value);
        minima.push((m.x, k));
        if best.as_ref().is_none_or(|b| k < b.value) {
            best = Some(SearchResult {
                argopt: [m.x],
                value: k,
                converged: m.converged,
                collapsed: [false],
                iterations: m.iterations,
                bracket: [(grid[i - 1], grid[i + 1])],
            });
        }
    }
    let best = match best {
        Some(b) => b,
        None => {
            // minimum at the edge of the scanned range
            let i = argmin(&values).unwrap_or(0);
            SearchResult {
                argopt: [grid[i]],
                value: r_to_k(values[i]),
                converged: false,
                collapsed: [false],
                iterations: 0,
                bracket: [(lo, hi)],
            }
        }
    };
    Ok(EquidistantKOpt {
        best,
        local_minima: minima,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub strictly_increasing: bool,
    /// First grid index `i` with `D(d_{i+1}) <= D(d_i)`.
    pub first_violation: Option<usize>,
    pub values: Vec<f64>,
}

/// Checks that the equidistant determinant increases along `steps`.
pub fn equidistant_d_monotone_check(
    params: &OuParams,
    n: usize,
    steps: &[f64],
) -> Result<MonotoneReport> {
    let values = steps
        .iter()
        .map(|&d| Ok(equidistant_entries(params.beta(), d, n)?.det()))
        .collect::<Result<Vec<f64>>>()?;
    let first_violation = values.windows(2).position(|w| w[1] <= w[0]);
    Ok(MonotoneReport {
        strictly_increasing: first_violation.is_none(),
        first_violation,
        values,
    })
}

/// Coordinate-wise golden-section descent on a scanned grid.
struct GridRefiner<'a, F> {
    f: F,
    xs: &'a [f64],
    ys: &'a [f64],
    bounds: ((f64, f64), (f64, f64)),
    tol: f64,
}

impl<F: Fn(f64, f64) -> f64> GridRefiner<'_, F> {
    /// Half-width of the refinement window around `v` on `axis`.
    fn window(axis: &[f64], v: f64, (lo, hi): (f64, f64)) -> (f64, f64) {
        let i = axis.partition_point(|&a| a < v).min(axis.len() - 1);
        let step = (axis[i.min(axis.len() - 1)] - axis[i.saturating_sub(1)])
            .max(axis[(i + 1).min(axis.len() - 1)] - axis[i])
            .max(f64::EPSILON);
        ((v - step).max(lo), (v + step).min(hi))
    }

    fn run(&self, start: (f64, f64)) -> ((f64, f64), f64, bool, usize, [(f64, f64); 2]) {
        let (mut x, mut y) = start;
        let mut value = (self.f)(x, y);
        let mut iterations = 0;
        let mut converged = false;
        let mut brackets = [(x, x), (y, y)];
        for _ in 0..MAX_SWEEPS {
            let bx = Self::window(self.xs, x, self.bounds.0);
            let mx = golden_section(|u| (self.f)(u, y), bx.0, bx.1, self.tol, GOLDEN_MAX_ITER);
            let by = Self::window(self.ys, y, self.bounds.1);
            let (nx, vx) = if mx.value <= value { (mx.x, mx.value) } else { (x, value) };
            let my = golden_section(|v| (self.f)(nx, v), by.0, by.1, self.tol, GOLDEN_MAX_ITER);
            let (ny, vy) = if my.value <= vx { (my.x, my.value) } else { (y, vx) };
            iterations += mx.iterations + my.iterations;
            brackets = [bx, by];
            let moved = (nx - x).abs().max((ny - y).abs());
            x = nx;
            y = ny;
            value = vy;
            if moved <= self.tol {
                converged = true;
                break;
            }
        }
        ((x, y), value, converged, iterations, brackets)
    }
}

fn grid_scan_argmin(values: &[f64], ny: usize) -> (usize, usize) {
    let k = argmin(values).unwrap_or(0);
    (k / ny, k % ny)
}

fn grid_objective(criterion: Criterion, s: &FimEntries1D, t: &FimEntries1D) -> f64 {
    let entries = FimEntries2D {
        s_axis: *s,
        t_axis: *t,
    };
    match criterion {
        Criterion::D => -d_objective_2d(&entries),
        Criterion::K => k_objective_2d(&entries.to_fim()).unwrap_or(f64::INFINITY),
    }
}

/// Best `(d, δ)` for the grid `{0, d, 1} × {0, δ, 1}`.
///
/// The search runs with the smaller rate on the s axis, so exchanging `β`
/// and `γ` exchanges `d_opt` and `δ_opt` exactly.
pub fn nine_point_restricted_2d(
    params: &SheetParams,
    criterion: Criterion,
    grid_resolution: usize,
    refine_tol: f64,
) -> Result<SearchResult<2>> {
    if params.beta() > params.gamma() {
        return Ok(
            nine_point_restricted_2d(&params.swapped(), criterion, grid_resolution, refine_tol)?
                .swapped(),
        );
    }
    positive("refine_tol", refine_tol)?;
    if grid_resolution < 3 {
        return Err(Error::InvalidArgument("grid resolution must be at least 3"));
    }
    let (beta, gamma) = (params.beta(), params.gamma());
    let upper = criterion_upper(criterion);
    let grid = linspace(0.0, upper, grid_resolution);
    let s_entries: Vec<FimEntries1D> = grid.iter().map(|&d| three_point_entries(beta, d)).collect();
    let t_entries: Vec<FimEntries1D> =
        grid.iter().map(|&d| three_point_entries(gamma, d)).collect();
    let mut values = Vec::with_capacity(grid.len() * grid.len());
    for s in &s_entries {
        for t in &t_entries {
            values.push(grid_objective(criterion, s, t));
        }
    }
    let (i, j) = grid_scan_argmin(&values, grid.len());
    let f = |d: f64, delta: f64| {
        grid_objective(
            criterion,
            &three_point_entries(beta, d),
            &three_point_entries(gamma, delta),
        )
    };
    let refiner = GridRefiner {
        f,
        xs: &grid,
        ys: &grid,
        bounds: ((0.0, upper), (0.0, upper)),
        tol: refine_tol,
    };
    let ((mut d, mut delta), mut value, converged, iterations, bracket) =
        refiner.run((grid[i], grid[j]));
    if criterion == Criterion::D {
        // the grid determinant is a product of per-axis factors
        d = polish_d_optimum(beta, d, true, refine_tol);
        delta = polish_d_optimum(gamma, delta, true, refine_tol);
        value = d_objective_2d(&FimEntries2D {
            s_axis: three_point_entries(beta, d),
            t_axis: three_point_entries(gamma, delta),
        });
    }
    Ok(SearchResult {
        argopt: [d, delta],
        value,
        converged,
        collapsed: [on_unit_boundary(d), on_unit_boundary(delta)],
        iterations,
        bracket,
    })
}

/// Scan range (in each of `d` and `δ`) for the four-point grid search.
pub const FOUR_POINT_SCAN: (f64, f64, usize) = (1e-3, 1e3, 201);

/// K-optimal four-point grid `{0, d} × {0, δ}` over `d, δ > 0`.
///
/// Refinement works on `ln d` and `ln δ`. `converged` is false when the scan
/// optimum lies on the edge of the scanned range.
pub fn four_point_grid_k_optimal(params: &SheetParams, tol: f64) -> Result<SearchResult<2>> {
    if params.beta() > params.gamma() {
        return Ok(four_point_grid_k_optimal(&params.swapped(), tol)?.swapped());
    }
    positive("tol", tol)?;
    let (beta, gamma) = (params.beta(), params.gamma());
    let (lo, hi, count) = FOUR_POINT_SCAN;
    let steps = logspace(lo, hi, count);
    let s_entries = steps
        .iter()
        .map(|&d| equidistant_entries(beta, d, 2))
        .collect::<Result<Vec<_>>>()?;
    let t_entries = steps
        .iter()
        .map(|&d| equidistant_entries(gamma, d, 2))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(count * count);
    for s in &s_entries {
        for t in &t_entries {
            values.push(grid_objective(Criterion::K, s, t));
        }
    }
    let (i, j) = grid_scan_argmin(&values, count);
    let on_edge = i == 0 || j == 0 || i + 1 == count || j + 1 == count;
    let logs: Vec<f64> = steps.iter().map(|&d| libm::log(d)).collect();
    let f = |u: f64, v: f64| match (
        equidistant_entries(beta, libm::exp(u), 2),
        equidistant_entries(gamma, libm::exp(v), 2),
    ) {
        (Ok(s), Ok(t)) => grid_objective(Criterion::K, &s, &t),
        _ => f64::INFINITY,
    };
    let bounds = (logs[0], logs[count - 1]);
    let refiner = GridRefiner {
        f,
        xs: &logs,
        ys: &logs,
        bounds: (bounds, bounds),
        tol,
    };
    let ((u, v), value, converged, iterations, bracket) = refiner.run((logs[i], logs[j]));
    let bracket = bracket.map(|(a, b)| (libm::exp(a), libm::exp(b)));
    Ok(SearchResult {
        argopt: [libm::exp(u), libm::exp(v)],
        value,
        converged: converged && !on_edge,
        collapsed: [false, false],
        iterations,
        bracket,
    })
}

/// Line design family swept by [`scan_kopt_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineFamily {
    /// `{0, d, 1}`.
    ThreePoint,
    /// `{0, d}`.
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoptCurveRow {
    pub beta: f64,
    pub d_opt: f64,
    pub k_value: f64,
    pub collapsed: bool,
}

/// K-optimal design coordinate against β.
pub fn scan_kopt_curve(betas: &[f64], family: LineFamily) -> Result<Vec<KoptCurveRow>> {
    betas.iter().map(|&beta| kopt_curve_row(beta, family)).collect()
}

pub fn kopt_curve_row(beta: f64, family: LineFamily) -> Result<KoptCurveRow> {
    let params = OuParams::with_beta(beta)?;
    let r = match family {
        LineFamily::ThreePoint => three_point_restricted_1d(
            &params,
            Criterion::K,
            DEFAULT_LINE_RESOLUTION,
            DEFAULT_REFINE_TOL,
        )?,
        LineFamily::TwoPoint => two_point_k_optimal(&params, DEFAULT_REFINE_TOL)?,
    };
    Ok(KoptCurveRow {
        beta,
        d_opt: r.argopt[0],
        k_value: r.value,
        collapsed: r.is_collapsed(),
    })
}

/// Grid design family swept by [`scan_kopt_surface`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFamily {
    /// `{0, d, 1} × {0, δ, 1}`.
    NinePoint,
    /// `{0, d} × {0, δ}`.
    FourPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoptSurfaceRow {
    pub beta: f64,
    pub gamma: f64,
    pub d_opt: f64,
    pub delta_opt: f64,
    pub k_value: f64,
    pub collapsed_d: bool,
    pub collapsed_delta: bool,
}

pub fn kopt_surface_row(beta: f64, gamma: f64, family: GridFamily) -> Result<KoptSurfaceRow> {
    let params = SheetParams::with_rates(beta, gamma)?;
    let r = match family {
        GridFamily::NinePoint => nine_point_restricted_2d(
            &params,
            Criterion::K,
            DEFAULT_GRID_RESOLUTION,
            DEFAULT_REFINE_TOL,
        )?,
        GridFamily::FourPoint => four_point_grid_k_optimal(&params, DEFAULT_REFINE_TOL)?,
    };
    Ok(KoptSurfaceRow {
        beta,
        gamma,
        d_opt: r.argopt[0],
        delta_opt: r.argopt[1],
        k_value: r.value,
        collapsed_d: r.collapsed[0],
        collapsed_delta: r.collapsed[1],
    })
}

/// K-optimal grid coordinates over all `(β, γ)` pairs, β-major.
pub fn scan_kopt_surface(
    betas: &[f64],
    gammas: &[f64],
    family: GridFamily,
) -> Result<Vec<KoptSurfaceRow>> {
    let mut rows = Vec::with_capacity(betas.len() * gammas.len());
    for &beta in betas {
        for &gamma in gammas {
            rows.push(kopt_surface_row(beta, gamma, family)?);
        }
    }
    Ok(rows)
}
