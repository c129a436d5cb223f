//! One-dimensional minimisation and root finding.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Golden-section minimisation of `f` on `[lo, hi]`.
///
/// The returned point is the best of the final interior estimate and the two
/// interval ends, so a minimum on the boundary is reported exactly at the
/// boundary.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(a);
    let f_hi = f(b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let converged = (b - a) <= tol;
    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    if f_lo <= value {
        x = lo.min(hi);
        value = f_lo;
    }
    if f_hi < value {
        x = lo.max(hi);
        value = f_hi;
    }
    Minimum {
        x,
        value,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Bracketed root finding: bisection until the bracket is narrower than
/// `switch_width`, then secant steps kept inside the bracket (falling back to
/// bisection when a step leaves it) until the step is below `tol`.
pub fn find_root<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    switch_width: f64,
    tol: f64,
    what: &'static str,
) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb0 = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
            bracket: (lo, hi),
        });
    }
    if fb0 == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
            bracket: (lo, hi),
        });
    }
    if !(fa.is_finite() && fb0.is_finite()) || fa.signum() == fb0.signum() {
        return Err(Error::BracketFailure { what, lo, hi });
    }
    let mut fb = fb0;
    let mut iterations = 0;
    while (b - a).abs() > switch_width && iterations < 200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root {
                x: mid,
                residual: 0.0,
                iterations,
                bracket: (lo, hi),
            });
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    // secant from the two bracket ends, safeguarded by the bracket
    let (mut x0, mut f0, mut x1, mut f1) = (a, fa, b, fb);
    for _ in 0..200 {
        iterations += 1;
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let (lo_b, hi_b) = if a < b { (a, b) } else { (b, a) };
        if !(x2 > lo_b && x2 < hi_b) || !x2.is_finite() {
            x2 = 0.5 * (a + b);
        }
        let f2 = f(x2);
        if f2 == 0.0 {
            return Ok(Root {
                x: x2,
                residual: 0.0,
                iterations,
                bracket: (lo, hi),
            });
        }
        if f2.signum() == fa.signum() {
            a = x2;
            fa = f2;
        } else {
            b = x2;
        }
        let step = (x2 - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if step <= tol || (b - a).abs() <= tol {
            return Ok(Root {
                x: x2,
                residual: f2,
                iterations,
                bracket: (lo, hi),
            });
        }
    }
    Ok(Root {
        x: x1,
        residual: f1,
        iterations,
        bracket: (lo, hi),
    })
}

/// `count` evenly spaced points from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `count` log-spaced points from `lo` to `hi` (both positive).
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(libm::log(lo), libm::log(hi), count)
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                libm::exp(v)
            }
        })
        .collect()
}

/// Index of the smallest value; ties go to the earliest index and NaN is
/// never selected.
pub fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10, 200);
        assert!(m.converged);
        assert!((m.x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn golden_reports_boundary_exactly() {
        let m = golden_section(|x| x, 0.0, 1.0, 1e-10, 200);
        assert_eq!(m.x, 0.0);
        let m = golden_section(|x| -x, 0.0, 1.0, 1e-10, 200);
        assert_eq!(m.x, 1.0);
    }

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 3.0, 1e-3, 1e-13, "cube root").unwrap();
        assert!((r.x - libm::cbrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn root_needs_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-3, 1e-12, "nothing"),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn spacing_helpers() {
        let l = linspace(0.0, 1.0, 5);
        assert_eq!(l, alloc::vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = logspace(1e-2, 1e2, 5);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[4], 1e2);
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert_eq!(argmin(&[3.0, 1.0, f64::NAN, 1.0]), Some(1));
    }
}
