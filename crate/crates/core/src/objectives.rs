//! Design criteria: determinant (D), condition number (K) and the surrogate
//! `R = (L1 + L3)² / det` that is a strictly increasing transform of K for
//! 2x2 matrices, `K = g(R)` with `g(x) = ¼ (√x + √(x - 4))²`.
//!
//! For 3x3 matrices the condition number comes from the trigonometric
//! eigenvalue formula.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fim::{Fim3, FimEntries1D, FimEntries2D};

/// Relative threshold below which `det / (L1 + L3)²` counts as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Relative threshold on `3 tr(I²) - tr²(I)` for the multiple-of-identity
/// branch of [`eigen3_closed`].
pub const ISOTROPIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entries {
    Line(FimEntries1D),
    Grid(FimEntries2D),
}

/// All criteria evaluated at one design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveEval {
    pub d_value: f64,
    pub k_value: f64,
    /// Only defined for 2x2 information matrices.
    pub r_value: Option<f64>,
    pub entries: Entries,
}

impl ObjectiveEval {
    pub fn line(entries: FimEntries1D) -> Result<Self> {
        Ok(Self {
            d_value: d_objective_1d(&entries),
            k_value: k_objective_1d(&entries)?,
            r_value: Some(r_objective_1d(&entries)?),
            entries: Entries::Line(entries),
        })
    }

    pub fn grid(entries: FimEntries2D) -> Result<Self> {
        Ok(Self {
            d_value: d_objective_2d(&entries),
            k_value: k_objective_2d(&entries.to_fim())?,
            r_value: None,
            entries: Entries::Grid(entries),
        })
    }
}

/// `det = L1 L3 - L2²`.
pub fn d_objective_1d(entries: &FimEntries1D) -> f64 {
    entries.det()
}

fn checked_det(entries: &FimEntries1D) -> Result<f64> {
    let det = entries.det();
    let scale = (entries.l1 + entries.l3) * (entries.l1 + entries.l3);
    if !(det > SINGULAR_TOL * scale) {
        return Err(Error::SingularFim { det });
    }
    Ok(det)
}

/// `(L1 + L3)² / (L1 L3 - L2²)`, always at least 4.
pub fn r_objective_1d(entries: &FimEntries1D) -> Result<f64> {
    let det = checked_det(entries)?;
    let sum = entries.l1 + entries.l3;
    Ok(sum * sum / det)
}

/// Condition number of `[[L1, L2], [L2, L3]]`.
pub fn k_objective_1d(entries: &FimEntries1D) -> Result<f64> {
    let det = checked_det(entries)?;
    let FimEntries1D { l1, l2, l3 } = *entries;
    let top = l1 + l3 + libm::sqrt((l1 - l3) * (l1 - l3) + 4.0 * l2 * l2);
    Ok(0.25 * top * top / det)
}

/// `g(x) = ¼ (√x + √(x - 4))²`, mapping R to K.
pub fn r_to_k(r: f64) -> f64 {
    let s = libm::sqrt(r) + libm::sqrt((r - 4.0).max(0.0));
    0.25 * s * s
}

/// `L1 M1 (L1 L3 - L2²)(M1 M3 - M2²)`.
pub fn d_objective_2d(entries: &FimEntries2D) -> f64 {
    entries.s_axis.l1 * entries.t_axis.l1 * entries.s_axis.det() * entries.t_axis.det()
}

/// Trigonometric eigen-decomposition of a symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen3Closed {
    /// Cosine argument, clamped to `[-1, 1]`; zero on the isotropic branch.
    pub rho: f64,
    /// `arccos(rho) / 3`, in `[0, π/3]`.
    pub phi: f64,
    /// Descending.
    pub eigenvalues: [f64; 3],
    pub isotropic: bool,
}

impl Eigen3Closed {
    pub fn condition_number(&self) -> f64 {
        self.eigenvalues[0] / self.eigenvalues[2]
    }
}

/// Eigenvalues `(tr + √(6 tr(I²) - 2 tr²) cos(φ + 2πk/3)) / 3`.
///
/// The eigenvalue furthest from the other two is taken from this formula and
/// the remaining pair from the trace and determinant.
///
/// `rho` equals `(54 det + tr (9 tr(I²) - 5 tr²)) / (√2 (3 tr(I²) - tr²)^{3/2})`;
/// both numerator and denominator are evaluated on the trace-free part
/// `B = I - (tr/3) Id`, where they read `54 det B` and `√2 (3 tr B²)^{3/2}`.
pub fn eigen3_closed(fim: &Fim3) -> Eigen3Closed {
    let m = fim.matrix();
    let tr = fim.trace();
    let shift = tr / 3.0;
    let mut b = m;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= shift;
    }
    let dev_sq: f64 = b.iter().flatten().map(|v| v * v).sum();
    // 3 tr(I²) - tr²(I) = 3 tr(B²)
    let spread = 3.0 * dev_sq;
    if spread <= ISOTROPIC_TOL * tr * tr {
        return Eigen3Closed {
            rho: 0.0,
            phi: PI / 6.0,
            eigenvalues: [shift; 3],
            isotropic: true,
        };
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let rho = (54.0 * det_b / (core::f64::consts::SQRT_2 * spread * libm::sqrt(spread)))
        .clamp(-1.0, 1.0);
    let phi = libm::acos(rho) / 3.0;
    let radius = libm::sqrt(2.0 * spread);
    let eig = |angle: f64| (tr + radius * libm::cos(angle)) / 3.0;
    let det = fim.det();
    // Near ρ = ±1 the arccos resolves the two close eigenvalues poorly. The
    // isolated one is accurate, and the close pair follows from the sum
    // `tr - λ` and product `det / λ` it leaves.
    let eigenvalues = if rho >= 0.0 {
        let high = eig(phi);
        let (mid, low) = quadratic_pair(tr - high, det / high);
        [high, mid, low]
    } else {
        let low = eig(phi + 2.0 * PI / 3.0);
        let (high, mid) = quadratic_pair(tr - low, det / low);
        [high, mid, low]
    };
    Eigen3Closed {
        rho,
        phi,
        eigenvalues,
        isotropic: false,
    }
}

/// Roots of `x² - sum x + product`, larger first, without cancellation in the
/// smaller one.
fn quadratic_pair(sum: f64, product: f64) -> (f64, f64) {
    let large = 0.5 * (sum + libm::sqrt((sum * sum - 4.0 * product).max(0.0)));
    if large == 0.0 {
        return (0.0, 0.0);
    }
    (large, product / large)
}

/// `λ_max / λ_min` of a positive-definite 3x3 information matrix.
pub fn k_objective_2d(fim: &Fim3) -> Result<f64> {
    let m = fim.matrix();
    if !(m[0][0] > 0.0) {
        return Err(Error::NotPositiveDefinite { minor: 1 });
    }
    if !(m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0) {
        return Err(Error::NotPositiveDefinite { minor: 2 });
    }
    let eig = eigen3_closed(fim);
    if eig.isotropic {
        return Ok(1.0);
    }
    let [high, _, low] = eig.eigenvalues;
    if !(low > 0.0) {
        return Err(Error::NotPositiveDefinite { minor: 3 });
    }
    Ok(high / low)
}
