//! Fisher information on the trend coefficients.
//!
//! For a line `α₀ + α₁ s` observed at `s_1 < … < s_n` with unit-variance OU
//! errors the information matrix is `[[L1, L2], [L2, L3]]` with
//!
//! ```text
//! L1 = 1    + Σ (1 - p_i) / (1 + p_i)
//! L2 = s_1  + Σ (s_{i+1} - s_i p_i) / (1 + p_i)
//! L3 = s_1² + Σ (s_{i+1} - s_i p_i)² / (1 - p_i²)
//! ```
//!
//! where `p_i = exp(-β d_i)`. On a grid the sheet information factorises into
//! the s-axis triple `L` (rate β) and the t-axis triple `M` (rate γ).
//!
//! All entries go through `tanh`/`expm1` so that small `β d` stays accurate.

use crate::error::{positive, Error, Result};
use crate::model::{check_gaps, Design1D, GridDesign2D, OuParams, SheetParams, DEFAULT_GAP_FLOOR};

/// The three distinct entries of a 2x2 line-trend information matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimEntries1D {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl FimEntries1D {
    /// `L1 L3 - L2²`.
    pub fn det(&self) -> f64 {
        self.l1 * self.l3 - self.l2 * self.l2
    }

    pub fn to_fim(&self) -> Fim2 {
        Fim2::new(self.l1, self.l2, self.l3)
    }
}

/// Axis triples of the sheet information matrix: `L` for s, `M` for t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimEntries2D {
    pub s_axis: FimEntries1D,
    pub t_axis: FimEntries1D,
}

impl FimEntries2D {
    pub fn to_fim(&self) -> Fim3 {
        let FimEntries1D { l1, l2, l3 } = self.s_axis;
        let FimEntries1D {
            l1: m1,
            l2: m2,
            l3: m3,
        } = self.t_axis;
        Fim3::new([
            [l1 * m1, l2 * m1, l1 * m2],
            [l2 * m1, l3 * m1, l2 * m2],
            [l1 * m2, l2 * m2, l1 * m3],
        ])
    }

    pub fn swapped(&self) -> Self {
        Self {
            s_axis: self.t_axis,
            t_axis: self.s_axis,
        }
    }
}

/// Symmetric 2x2 information matrix on `(α₀, α₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fim2 {
    m: [[f64; 2]; 2],
}

impl Fim2 {
    pub fn new(a00: f64, a01: f64, a11: f64) -> Self {
        Self {
            m: [[a00, a01], [a01, a11]],
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[0][1]
    }

    pub fn entries(&self) -> FimEntries1D {
        FimEntries1D {
            l1: self.m[0][0],
            l2: self.m[0][1],
            l3: self.m[1][1],
        }
    }

    pub fn inverse(&self) -> Result<Fim2> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::SingularFim { det });
        }
        Ok(Fim2::new(
            self.m[1][1] / det,
            -self.m[0][1] / det,
            self.m[0][0] / det,
        ))
    }

    pub fn scaled(&self, factor: f64) -> Fim2 {
        Fim2::new(
            self.m[0][0] * factor,
            self.m[0][1] * factor,
            self.m[1][1] * factor,
        )
    }
}

/// Symmetric 3x3 information matrix on `(α₀, α₁, α₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fim3 {
    m: [[f64; 3]; 3],
}

impl Fim3 {
    /// Takes the upper triangle and mirrors it, so the result is exactly
    /// symmetric.
    pub fn new(m: [[f64; 3]; 3]) -> Self {
        let mut s = m;
        for i in 0..3 {
            for j in 0..i {
                s[i][j] = m[j][i];
            }
        }
        Self { m: s }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// `tr(I²)`, the squared Frobenius norm.
    pub fn trace_of_square(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum()
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// All three leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        let m = &self.m;
        m[0][0] > 0.0 && m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0 && self.det() > 0.0
    }

    pub fn inverse(&self) -> Result<Fim3> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::SingularFim { det });
        }
        let m = &self.m;
        let cof = |i0: usize, i1: usize, j0: usize, j1: usize| {
            m[i0][j0] * m[i1][j1] - m[i0][j1] * m[i1][j0]
        };
        Ok(Fim3::new([
            [cof(1, 2, 1, 2) / det, -cof(0, 2, 1, 2) / det, cof(0, 1, 1, 2) / det],
            [0.0, cof(0, 2, 0, 2) / det, -cof(0, 1, 0, 2) / det],
            [0.0, 0.0, cof(0, 1, 0, 1) / det],
        ]))
    }

    pub fn scaled(&self, factor: f64) -> Fim3 {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= factor);
        Fim3 { m }
    }
}

/// Closed-form entries for an arbitrary design.
pub fn fim_entries_1d(params: &OuParams, design: &Design1D) -> Result<FimEntries1D> {
    axis_entries(params.beta(), design.points(), DEFAULT_GAP_FLOOR)
}

pub fn fim_entries_1d_with_floor(
    params: &OuParams,
    design: &Design1D,
    floor: f64,
) -> Result<FimEntries1D> {
    axis_entries(params.beta(), design.points(), floor)
}

pub(crate) fn axis_entries(rate: f64, points: &[f64], floor: f64) -> Result<FimEntries1D> {
    check_gaps(rate, points, floor)?;
    let s1 = points[0];
    let mut e = FimEntries1D {
        l1: 1.0,
        l2: s1,
        l3: s1 * s1,
    };
    for w in points.windows(2) {
        let (s, s_next) = (w[0], w[1]);
        let x = rate * (s_next - s);
        let one_minus_p = -libm::expm1(-x);
        let one_plus_p = 2.0 - one_minus_p;
        let one_minus_p2 = -libm::expm1(-2.0 * x);
        // s_{i+1} - s_i p_i = d_i + s_i (1 - p_i)
        let lead = (s_next - s) + s * one_minus_p;
        e.l1 += libm::tanh(0.5 * x);
        e.l2 += lead / one_plus_p;
        e.l3 += lead * lead / one_minus_p2;
    }
    Ok(e)
}

/// Entries for `{0, d, …, (n-1)d}` in closed form.
pub fn fim_entries_equidistant_1d(params: &OuParams, step: f64, n: usize) -> Result<FimEntries1D> {
    equidistant_entries(params.beta(), step, n)
}

pub(crate) fn equidistant_entries(rate: f64, step: f64, n: usize) -> Result<FimEntries1D> {
    positive("step", step)?;
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let x = rate * step;
    if x < DEFAULT_GAP_FLOOR {
        return Err(Error::NearSingular {
            index: 0,
            scaled_gap: x,
            floor: DEFAULT_GAP_FLOOR,
        });
    }
    let nf = n as f64;
    // t = (e^x - 1)/(e^x + 1); rewritten so that large x does not overflow
    let t = libm::tanh(0.5 * x);
    let l1 = nf * t + (1.0 - t);
    let l2 = step * (nf - 1.0) / 2.0 * l1;
    let bracket = nf * (2.0 * nf - 1.0) / 6.0 * t + nf * (1.0 - t) / 2.0 + 1.0 / libm::expm1(2.0 * x);
    let l3 = step * step * (nf - 1.0) * bracket;
    Ok(FimEntries1D { l1, l2, l3 })
}

pub fn fim_1d(params: &OuParams, design: &Design1D) -> Result<Fim2> {
    Ok(fim_entries_1d(params, design)?.to_fim())
}

pub fn fim_entries_2d(params: &SheetParams, design: &GridDesign2D) -> Result<FimEntries2D> {
    Ok(FimEntries2D {
        s_axis: axis_entries(params.beta(), design.s_points().points(), DEFAULT_GAP_FLOOR)?,
        t_axis: axis_entries(params.gamma(), design.t_points().points(), DEFAULT_GAP_FLOOR)?,
    })
}

pub fn fim_2d(params: &SheetParams, design: &GridDesign2D) -> Result<Fim3> {
    Ok(fim_entries_2d(params, design)?.to_fim())
}

/// Directionally equidistant grid with steps `d` (n points) and `δ`
/// (m points).
pub fn fim_entries_equidistant_2d(
    params: &SheetParams,
    d: f64,
    delta: f64,
    n: usize,
    m: usize,
) -> Result<FimEntries2D> {
    Ok(FimEntries2D {
        s_axis: equidistant_entries(params.beta(), d, n)?,
        t_axis: equidistant_entries(params.gamma(), delta, m)?,
    })
}
