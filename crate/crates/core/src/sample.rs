//! Exact Gaussian sampling of the process and the sheet at design points.
//!
//! On sorted points the exponential correlation is Markov, so its Cholesky
//! factor is the recursion `x₀ = z₀`, `xᵢ = pᵢ xᵢ₋₁ + √(1 - pᵢ²) zᵢ` with
//! `pᵢ = e^{-β(sᵢ - sᵢ₋₁)}`. The sheet correlation is a Kronecker product, so
//! the field is that recursion applied along both grid axes.
//!
//! Every replicate draws from its own ChaCha stream keyed by the seed and a
//! design id, which makes results independent of evaluation order.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::model::{check_gaps, Design1D, GridDesign2D, OuParams, SheetParams, DEFAULT_GAP_FLOOR};

/// Stable identifier of a point set: FNV-1a over the coordinate bit patterns.
pub fn design_id(coordinates: impl IntoIterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in coordinates {
        for byte in x.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

pub fn line_design_id(design: &Design1D) -> u64 {
    design_id(design.points().iter().copied())
}

/// Separates the s and t coordinate lists so that a grid never shares an id
/// with a line design or with its transpose.
pub fn grid_design_id(design: &GridDesign2D) -> u64 {
    design_id(
        design
            .s_points()
            .points()
            .iter()
            .copied()
            .chain([f64::NAN])
            .chain(design.t_points().points().iter().copied()),
    )
}

/// Generator for one replicate: key from `(seed, design)`, stream from the
/// replicate index.
pub fn replicate_rng(seed: u64, design: u64, replicate: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&design.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}

/// Lag-one correlations `pᵢ` and innovation scales `√(1 - pᵢ²)` of a sorted
/// axis.
#[derive(Debug, Clone)]
pub(crate) struct AxisFactor {
    lag: Vec<f64>,
    innovation: Vec<f64>,
}

impl AxisFactor {
    pub(crate) fn new(rate: f64, points: &[f64]) -> Result<Self> {
        check_gaps(rate, points, DEFAULT_GAP_FLOOR)?;
        let (lag, innovation) = points
            .windows(2)
            .map(|w| {
                let x = rate * (w[1] - w[0]);
                (libm::exp(-x), libm::sqrt(-libm::expm1(-2.0 * x)))
            })
            .unzip();
        Ok(Self { lag, innovation })
    }

    /// Applies the Cholesky factor in place to the axis entries spaced
    /// `stride` apart starting at `offset`.
    fn apply(&self, buf: &mut [f64], offset: usize, stride: usize) {
        let mut prev = buf[offset];
        for (k, (&p, &q)) in self.lag.iter().zip(&self.innovation).enumerate() {
            let i = offset + (k + 1) * stride;
            prev = p * prev + q * buf[i];
            buf[i] = prev;
        }
    }
}

/// Draws one path of the process at `design` into `out`.
pub(crate) fn draw_line<D: Distribution<f64>>(
    factor: &AxisFactor,
    scale: f64,
    rng: &mut ChaCha8Rng,
    normal: &D,
    out: &mut [f64],
) {
    for z in out.iter_mut() {
        *z = normal.sample(rng);
    }
    factor.apply(out, 0, 1);
    for x in out.iter_mut() {
        *x *= scale;
    }
}

/// Draws one field on an `n x m` grid into `out` (s-major).
pub(crate) fn draw_grid<D: Distribution<f64>>(
    s: &AxisFactor,
    t: &AxisFactor,
    scale: f64,
    rng: &mut ChaCha8Rng,
    normal: &D,
    out: &mut [f64],
) {
    let m = t.lag.len() + 1;
    let n = s.lag.len() + 1;
    for z in out.iter_mut() {
        *z = normal.sample(rng);
    }
    for i in 0..n {
        t.apply(out, i * m, 1);
    }
    for j in 0..m {
        s.apply(out, j, m);
    }
    for x in out.iter_mut() {
        *x *= scale;
    }
}

/// `count` zero-mean paths at `design`, one per row; row `r` uses replicate
/// stream `r`.
pub fn sample_observations_1d(
    params: &OuParams,
    design: &Design1D,
    count: usize,
    seed: u64,
) -> Result<Matrix> {
    let factor = AxisFactor::new(params.beta(), design.points())?;
    let scale = libm::sqrt(params.stationary_variance());
    let id = line_design_id(design);
    let n = design.len();
    let mut data = vec![0.0; count * n];
    for (r, row) in data.chunks_exact_mut(n).enumerate() {
        let mut rng = replicate_rng(seed, id, r as u64);
        draw_line(&factor, scale, &mut rng, &StandardNormal, row);
    }
    Matrix::from_row_major(count, n, data)
}

/// `count` zero-mean fields on `design`, one per row in s-major order.
pub fn sample_observations_2d(
    params: &SheetParams,
    design: &GridDesign2D,
    count: usize,
    seed: u64,
) -> Result<Matrix> {
    let s = AxisFactor::new(params.beta(), design.s_points().points())?;
    let t = AxisFactor::new(params.gamma(), design.t_points().points())?;
    let scale = libm::sqrt(params.stationary_variance());
    let id = grid_design_id(design);
    let len = design.len();
    let mut data = vec![0.0; count * len];
    for (r, row) in data.chunks_exact_mut(len).enumerate() {
        let mut rng = replicate_rng(seed, id, r as u64);
        draw_grid(&s, &t, scale, &mut rng, &StandardNormal, row);
    }
    Matrix::from_row_major(count, len, data)
}
