mod common;

use common::{dense_corr, dense_gls};
use oukopt_core::fim::{fim_1d, fim_2d};
use oukopt_core::mc::*;
use oukopt_core::sample::{sample_observations_1d, sample_observations_2d};
use oukopt_core::{Design1D, Error, GridDesign2D, OuParams, SheetParams, Trend1D, Trend2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn line(points: &[f64]) -> Design1D {
    Design1D::new(points.to_vec()).unwrap()
}

fn nine(d: f64, delta: f64) -> GridDesign2D {
    GridDesign2D::new(line(&[0.0, d, 1.0]), line(&[0.0, delta, 1.0]))
}

#[test]
fn gls_matches_dense_weighted_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let pts = common::random_points(&mut rng, 5);
        let y: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = rng.random_range(0.1..5.0);
        let est = gls_estimate_1d(&OuParams::with_beta(b).unwrap(), &line(&pts), &y).unwrap();
        let want = dense_gls(b, &pts, &y);
        assert!((est.as_array()[0] - want[0]).abs() < 1e-9 * (1.0 + want[0].abs()));
        assert!((est.as_array()[1] - want[1]).abs() < 1e-9 * (1.0 + want[1].abs()));
    }
}

#[test]
fn line_samples_have_the_model_covariance() {
    let params = OuParams::new(1.5, 0.25).unwrap();
    let pts = [0.0, 0.1, 0.5, 1.2];
    let obs = sample_observations_1d(&params, &line(&pts), 40_000, 3).unwrap();
    let c = dense_corr(1.5, &pts) * params.stationary_variance();
    let r = obs.rows() as f64;
    for i in 0..4 {
        for j in 0..4 {
            let emp: f64 = (0..obs.rows()).map(|k| obs.row(k)[i] * obs.row(k)[j]).sum::<f64>() / r;
            // var of a product of two normals is at most 2 σ⁴
            let se = (2.0 * c[(i, i)] * c[(j, j)] / r).sqrt();
            assert!((emp - c[(i, j)]).abs() < 4.0 * se, "{i}{j}: {emp} vs {}", c[(i, j)]);
        }
    }
}

#[test]
fn grid_samples_have_the_kronecker_covariance() {
    let params = SheetParams::new(2.0, 0.5, 0.25).unwrap();
    let (s, t) = ([0.0, 0.3, 1.0], [0.0, 0.8]);
    let grid = GridDesign2D::new(line(&s), line(&t));
    let obs = sample_observations_2d(&params, &grid, 40_000, 4).unwrap();
    let c = dense_corr(2.0, &s).kronecker(&dense_corr(0.5, &t)) * params.stationary_variance();
    let r = obs.rows() as f64;
    for i in 0..6 {
        for j in 0..6 {
            let emp: f64 = (0..obs.rows()).map(|k| obs.row(k)[i] * obs.row(k)[j]).sum::<f64>() / r;
            let se = (2.0 * c[(i, i)] * c[(j, j)] / r).sqrt();
            assert!((emp - c[(i, j)]).abs() < 4.0 * se, "{i}{j}");
        }
    }
}

#[test]
fn line_estimator_is_unbiased_with_fim_covariance() {
    for b in [0.3, 10.0, 50.0] {
        let params = OuParams::new(b, 0.25).unwrap();
        let design = line(&[0.0, 0.3, 1.0]);
        let trend = Trend1D::new(1.0, 1.0);
        let s = simulate_gls_1d(&params, &design, &trend, 100_000, 11).unwrap();
        let cov = fim_1d(&params, &design).unwrap().inverse().unwrap().scaled(params.stationary_variance()).matrix();
        for k in 0..2 {
            let bias = s.mean_estimate[k] - trend.as_array()[k];
            assert!(bias.abs() < 3.0 * s.estimate_standard_error[k], "beta {b} param {k}");
            let gap = s.mse_per_parameter[k] - cov[k][k];
            assert!(gap.abs() < 3.0 * s.mse_per_parameter_standard_error[k], "beta {b} param {k}: {} vs {}", s.mse_per_parameter[k], cov[k][k]);
        }
    }
}

#[test]
fn grid_estimator_is_unbiased_with_fim_covariance() {
    for (b, g) in [(10.0, 10.0), (0.05, 0.05), (1.0, 7.0)] {
        let params = SheetParams::new(b, g, 0.25).unwrap();
        let design = nine(0.2, 0.6);
        let trend = Trend2D::new(1.0, 1.0, 1.0);
        let s = simulate_gls_2d(&params, &design, &trend, 20_000, 12).unwrap();
        let cov = fim_2d(&params, &design).unwrap().inverse().unwrap().scaled(params.stationary_variance()).matrix();
        for k in 0..3 {
            let bias = s.mean_estimate[k] - trend.as_array()[k];
            assert!(bias.abs() < 3.0 * s.estimate_standard_error[k], "({b},{g}) param {k}");
            let gap = s.mse_per_parameter[k] - cov[k][k];
            assert!(gap.abs() < 3.0 * s.mse_per_parameter_standard_error[k], "({b},{g}) param {k}");
        }
    }
}

#[test]
fn design_against_itself_is_exactly_100() {
    let params = OuParams::new(3.0, 0.25).unwrap();
    let design = line(&[0.0, 0.4, 1.0]);
    let trend = Trend1D::new(1.0, 1.0);
    let a = simulate_gls_1d(&params, &design, &trend, 2000, 9).unwrap();
    let b = simulate_gls_1d(&params, &design, &trend, 2000, 9).unwrap();
    assert_eq!(efficiency(&a, &b).0, 100.0);
}

#[test]
fn standard_error_shrinks_with_replicates() {
    let params = SheetParams::new(10.0, 10.0, 0.25).unwrap();
    let trend = Trend2D::new(1.0, 1.0, 1.0);
    let a = simulate_gls_2d(&params, &nine(0.5, 0.5), &trend, 10_000, 21).unwrap();
    let b = simulate_gls_2d(&params, &nine(0.5, 0.5), &trend, 20_000, 21).unwrap();
    let ratio = b.mse_standard_error / a.mse_standard_error;
    let want = std::f64::consts::FRAC_1_SQRT_2;
    assert!((ratio - want).abs() < 0.2 * want, "{ratio}");
}

#[test]
fn reruns_are_bitwise_identical() {
    let config = McConfig {
        replicates: 500,
        ..McConfig::default()
    };
    let a = efficiency_curve(&[0.2, 2.0, 20.0], &config).unwrap();
    let b = efficiency_curve(&[0.2, 2.0, 20.0], &config).unwrap();
    assert_eq!(a, b);
    assert!(a[1].report.is_none());
}

#[test]
fn line_efficiency_examples() {
    let config = McConfig::default();
    let small = run_efficiency_1d(&OuParams::with_beta(0.3).unwrap(), &config).unwrap();
    assert!((95.0..=105.0).contains(&small.eff_percent), "{}", small.eff_percent);
    let large = run_efficiency_1d(&OuParams::with_beta(50.0).unwrap(), &config).unwrap();
    assert!(large.eff_percent < 100.0, "{}", large.eff_percent);
    assert_eq!(run_efficiency_1d(&OuParams::with_beta(2.0).unwrap(), &config), Err(Error::CollapsedDesign));
}

#[test]
fn mse_decreases_with_rate_on_the_upper_curve() {
    let config = McConfig {
        replicates: 4000,
        ..McConfig::default()
    };
    let rows = efficiency_curve(&[6.0, 12.0, 25.0, 50.0, 100.0], &config).unwrap();
    let mse: Vec<f64> = rows.iter().map(|r| r.report.as_ref().unwrap().mse_k).collect();
    assert!(mse.windows(2).all(|w| w[1] < w[0]), "{mse:?}");
}

#[test]
fn collapsed_grid_cells_use_the_merged_design() {
    let config = McConfig {
        replicates: 2000,
        ..McConfig::default()
    };
    let params = SheetParams::with_rates(0.01, 0.03).unwrap();
    assert_eq!(run_efficiency_2d(&params, &config), Err(Error::CollapsedDesign));
    let cell = table1_cell(0.01, 0.03, &config).unwrap();
    assert!(cell.report.collapsed);
    assert!(cell.report.eff_percent.is_finite());
}

#[test]
fn searched_reference_differs_for_large_rates() {
    let config = McConfig {
        replicates: 200,
        d_reference: DReference::Searched,
        ..McConfig::default()
    };
    let r = run_efficiency_1d(&OuParams::with_beta(50.0).unwrap(), &config).unwrap();
    assert!((r.d_design[0] - 0.0798).abs() < 1e-3);
}
