//! Doubling ratios of the D and K criteria for equidistant designs and their
//! closed-form limits.
//!
//! `ξ_n = {0, 1/n, …, 1}` has `n + 1` points. Infill doubling halves the step
//! on `[0, 1]`; domain doubling keeps the step `1/n` and extends the design
//! to `[0, 2]`. On grids the same is done on both axes or on the s axis only.
//!
//! All ratios use the closed-form equidistant entries, so no covariance
//! matrix is materialised and large grids are cheap.

use alloc::vec::Vec;

use crate::error::{positive, Error, Result};
use crate::fim::{equidistant_entries, FimEntries1D, FimEntries2D};
use crate::objectives::{d_objective_2d, k_objective_1d, k_objective_2d};
use crate::model::{OuParams, SheetParams};
use crate::optim::{golden_section, logspace};

/// `16(β+1)(β²+3β+3) / ((β+2)(β²+6β+12))`, the domain-doubling limit of the
/// determinant ratio on a line.
pub fn limit_d(beta: f64) -> Result<f64> {
    positive("beta", beta)?;
    let b = beta;
    Ok(16.0 * (b + 1.0) * (b * b + 3.0 * b + 3.0) / ((b + 2.0) * (b * b + 6.0 * b + 12.0)))
}

/// Domain-doubling limit of the condition-number ratio on a line.
pub fn limit_k(beta: f64) -> Result<f64> {
    positive("beta", beta)?;
    let b = beta;
    let b2 = b * b;
    // numerator and denominator of the squared ratio, both divided by
    // max(1, β²) so that the quartics under the roots cannot overflow
    let r = if b > 1.0 { 1.0 / b } else { 1.0 };
    let s = if b > 1.0 { 1.0 } else { b };
    let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    let top = 7.0 * s2 + 9.0 * s * r + 3.0 * r2
        + libm::sqrt(37.0 * s4 + 78.0 * s3 * r + 51.0 * s2 * r2 + 18.0 * s * r3 + 9.0 * r4);
    let bottom = 4.0 * s2 + 9.0 * s * r + 3.0 * r2
        + libm::sqrt(13.0 * s4 + 48.0 * s3 * r + 33.0 * s2 * r2 - 18.0 * s * r3 + 9.0 * r4);
    let lead = (b + 2.0) / (b + 1.0) * (b2 + 6.0 * b + 12.0) / (b2 + 3.0 * b + 3.0);
    let q = top / bottom;
    Ok(lead * q * q / 4.0)
}

/// `2(β+1)/(β+2) · D(β)`, the per-axis domain-doubling limit on grids.
pub fn limit_d_tilde(beta: f64) -> Result<f64> {
    Ok(2.0 * (beta + 1.0) / (beta + 2.0) * limit_d(beta)?)
}

/// Location and value of the maximum of [`limit_k`], by golden section on
/// `(0, 5)`.
pub fn limit_k_maximum(tol: f64) -> Result<(f64, f64)> {
    positive("tol", tol)?;
    let m = golden_section(
        |b| -limit_k(b).unwrap_or(f64::NEG_INFINITY),
        f64::MIN_POSITIVE,
        5.0,
        tol,
        500,
    );
    Ok((m.x, -m.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineDoubling {
    Infill,
    Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridDoubling {
    InfillBoth,
    /// Infill on the s axis only.
    InfillOne,
    DomainBoth,
    /// Domain doubling on the s axis only.
    DomainOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DoublingMode {
    Line(LineDoubling),
    Grid(GridDoubling),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingReport {
    pub n: usize,
    /// Only set for grids.
    pub m: Option<usize>,
    pub ratio_d: f64,
    pub ratio_k: f64,
    pub limit_d: Option<f64>,
    pub limit_k: Option<f64>,
    pub mode: DoublingMode,
}

fn check_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    Ok(())
}

/// Entries of `ξ_n` scaled: `n + 1` points at spacing `step`.
fn axis(rate: f64, intervals: usize, step: f64) -> Result<FimEntries1D> {
    equidistant_entries(rate, step, intervals + 1)
}

/// D and K ratios of `ξ_{2n}` (or `ξ̃_{2n}`) against `ξ_n`.
pub fn doubling_ratio_1d(params: &OuParams, n: usize, mode: LineDoubling) -> Result<DoublingReport> {
    check_count(n)?;
    let beta = params.beta();
    let h = 1.0 / n as f64;
    let base = axis(beta, n, h)?;
    let doubled = match mode {
        LineDoubling::Infill => axis(beta, 2 * n, 0.5 * h)?,
        LineDoubling::Domain => axis(beta, 2 * n, h)?,
    };
    let (limit_d_value, limit_k_value) = match mode {
        LineDoubling::Infill => (1.0, 1.0),
        LineDoubling::Domain => (limit_d(beta)?, limit_k(beta)?),
    };
    Ok(DoublingReport {
        n,
        m: None,
        ratio_d: doubled.det() / base.det(),
        ratio_k: k_objective_1d(&doubled)? / k_objective_1d(&base)?,
        limit_d: Some(limit_d_value),
        limit_k: Some(limit_k_value),
        mode: DoublingMode::Line(mode),
    })
}

/// D and K ratios of the doubled grid against `ξ_{n,m}`.
pub fn doubling_ratio_2d(
    params: &SheetParams,
    n: usize,
    m: usize,
    mode: GridDoubling,
) -> Result<DoublingReport> {
    check_count(n)?;
    check_count(m)?;
    let (beta, gamma) = (params.beta(), params.gamma());
    let (hs, ht) = (1.0 / n as f64, 1.0 / m as f64);
    let base = FimEntries2D {
        s_axis: axis(beta, n, hs)?,
        t_axis: axis(gamma, m, ht)?,
    };
    let (s_axis, t_axis) = match mode {
        GridDoubling::InfillBoth => (axis(beta, 2 * n, 0.5 * hs)?, axis(gamma, 2 * m, 0.5 * ht)?),
        GridDoubling::InfillOne => (axis(beta, 2 * n, 0.5 * hs)?, base.t_axis),
        GridDoubling::DomainBoth => (axis(beta, 2 * n, hs)?, axis(gamma, 2 * m, ht)?),
        GridDoubling::DomainOne => (axis(beta, 2 * n, hs)?, base.t_axis),
    };
    let doubled = FimEntries2D { s_axis, t_axis };
    let (limit_d_value, limit_k_value) = match mode {
        GridDoubling::InfillBoth | GridDoubling::InfillOne => (1.0, Some(1.0)),
        GridDoubling::DomainBoth => (limit_d_tilde(beta)? * limit_d_tilde(gamma)?, None),
        GridDoubling::DomainOne => (limit_d_tilde(beta)?, None),
    };
    Ok(DoublingReport {
        n,
        m: Some(m),
        ratio_d: d_objective_2d(&doubled) / d_objective_2d(&base),
        ratio_k: k_objective_2d(&doubled.to_fim())? / k_objective_2d(&base.to_fim())?,
        limit_d: Some(limit_d_value),
        limit_k: limit_k_value,
        mode: DoublingMode::Grid(mode),
    })
}

/// Which grid K ratio a numeric limit is estimated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KLimitMode {
    /// Domain doubling on both axes.
    Both,
    /// Domain doubling on the s axis only.
    One,
}

pub const DEFAULT_N_SEQUENCE: [usize; 5] = [25, 50, 100, 200, 400];

/// Default surface axis: 40 log-spaced rates on `[0.05, 50]`.
pub fn default_surface_axis() -> Vec<f64> {
    logspace(0.05, 50.0, 40)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KLimitEstimate {
    pub beta: f64,
    pub gamma: f64,
    /// Last extrapolant.
    pub estimate: f64,
    /// Difference of the last two extrapolants.
    pub error: f64,
    pub converged: bool,
    pub ratios: Vec<f64>,
}

/// Extrapolates the grid K ratio assuming an error of order `1/n`, with the
/// same `n` on both axes. Successive `n` must double.
pub fn k_limit_estimate(
    params: &SheetParams,
    n_sequence: &[usize],
    mode: KLimitMode,
    tol: f64,
) -> Result<KLimitEstimate> {
    positive("tol", tol)?;
    if n_sequence.len() < 3 {
        return Err(Error::InvalidArgument("need at least three sizes to extrapolate"));
    }
    if n_sequence.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument("sizes must double"));
    }
    let grid_mode = match mode {
        KLimitMode::Both => GridDoubling::DomainBoth,
        KLimitMode::One => GridDoubling::DomainOne,
    };
    let ratios = n_sequence
        .iter()
        .map(|&n| Ok(doubling_ratio_2d(params, n, n, grid_mode)?.ratio_k))
        .collect::<Result<Vec<f64>>>()?;
    let extrapolants: Vec<f64> = ratios.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let last = extrapolants[extrapolants.len() - 1];
    let error = (last - extrapolants[extrapolants.len() - 2]).abs();
    Ok(KLimitEstimate {
        beta: params.beta(),
        gamma: params.gamma(),
        estimate: last,
        error,
        converged: error <= tol,
        ratios,
    })
}

/// [`k_limit_estimate`] over all `(β, γ)` pairs, β-major.
pub fn k_limit_surface_2d(
    betas: &[f64],
    gammas: &[f64],
    n_sequence: &[usize],
    mode: KLimitMode,
    tol: f64,
) -> Result<Vec<KLimitEstimate>> {
    let mut out = Vec::with_capacity(betas.len() * gammas.len());
    for &beta in betas {
        for &gamma in gammas {
            let params = SheetParams::with_rates(beta, gamma)?;
            out.push(k_limit_estimate(&params, n_sequence, mode, tol)?);
        }
    }
    Ok(out)
}

/// Factors of the equidistant determinant, for `n` points at scaled spacing
/// `x = βd`: `det = J_n(x) · (n-1)/β² · F_n(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofFn {
    J,
    F,
    G,
}

/// `J_n(x) = (2 - n + n e^x) / (e^x + 1)`,
/// `F_n(x) = x² / (e^{2x} - 1) · (n(n+1)/12 (e^x - 1)² + (n+1)/2 (e^x - 1) + 1)`,
/// `G_n(x) = e^{-2x} (n(n+1)/12 (e^x - 1)² + (n+1)/2 (e^x - 1) + 1)`.
pub fn proof_support_fn(which: ProofFn, n: usize, x: f64) -> Result<f64> {
    check_count(n)?;
    positive("d", x)?;
    let nf = n as f64;
    let em1 = libm::expm1(x);
    let poly = nf * (nf + 1.0) / 12.0 * em1 * em1 + (nf + 1.0) / 2.0 * em1 + 1.0;
    Ok(match which {
        // (2 - n + n e^x)/(e^x + 1) = 1 + (n - 1) tanh(x/2)
        ProofFn::J => 1.0 + (nf - 1.0) * libm::tanh(0.5 * x),
        ProofFn::F => x * x / libm::expm1(2.0 * x) * poly,
        ProofFn::G => libm::exp(-2.0 * x) * poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_d_at_one() {
        assert!((limit_d(1.0).unwrap() - 224.0 / 57.0).abs() < 1e-14);
        let want = 4.0 / 3.0 * 224.0 / 57.0;
        assert!((limit_d_tilde(1.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn limit_k_large_beta_is_finite() {
        let far = limit_k(1e150).unwrap();
        let want = (7.0 + libm::sqrt(37.0)) / (4.0 + libm::sqrt(13.0));
        assert!((far - want * want / 4.0).abs() < 1e-12);
    }

    #[test]
    fn j_matches_its_rational_form() {
        for n in [2usize, 5, 11] {
            for x in [0.01, 1.0, 4.0] {
                let e = libm::exp(x);
                let nf = n as f64;
                let direct = (2.0 - nf + nf * e) / (e + 1.0);
                let got = proof_support_fn(ProofFn::J, n, x).unwrap();
                assert!((got - direct).abs() < 1e-13 * direct);
            }
        }
    }

    #[test]
    fn small_f_closed_forms() {
        for x in [0.05, 0.7, 3.0] {
            let f2 = x * x / (2.0 * -libm::expm1(-x));
            let f3 = x * x / -libm::expm1(-2.0 * x);
            assert!((proof_support_fn(ProofFn::F, 2, x).unwrap() - f2).abs() < 1e-13 * f2);
            assert!((proof_support_fn(ProofFn::F, 3, x).unwrap() - f3).abs() < 1e-13 * f3);
        }
    }

    #[test]
    fn f_splits_as_f3_times_g() {
        for n in [4usize, 7] {
            let x = 0.9;
            let f = proof_support_fn(ProofFn::F, n, x).unwrap();
            let f3 = proof_support_fn(ProofFn::F, 3, x).unwrap();
            let g = proof_support_fn(ProofFn::G, n, x).unwrap();
            assert!((f - f3 * g).abs() < 1e-13 * f);
        }
    }

    #[test]
    fn sizes_must_double() {
        let p = SheetParams::with_rates(1.0, 1.0).unwrap();
        assert!(k_limit_estimate(&p, &[10, 20, 30], KLimitMode::Both, 1e-3).is_err());
    }
}
