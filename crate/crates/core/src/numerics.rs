//! Quadrature, bracketed root finding and golden-section maximization.

use crate::error::{Error, Result};

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u32,
}

const MAX_SPLIT_DEPTH: u32 = 12;
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Integrates a smooth `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// Tanh-sinh quadrature on the whole interval, bisecting the interval when a
/// panel does not meet its share of the tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    // scale for the absolute target; refined once the integral is known
    let scale = (b - a).abs() * f(0.5 * (a + b)).abs().max(f(a).abs()).max(f(b).abs());
    let first = integrate_panel(&f, a, b, rel_tol * scale, 0)?;
    if first.error_estimate <= rel_tol * first.value.abs() {
        return Ok(first);
    }
    integrate_panel(&f, a, b, rel_tol * first.value.abs(), 0)
}

fn integrate_panel<F>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::integrate(f, a, b, abs_tol);
    // accept at the roundoff floor of the panel as well
    let floor = ROUNDOFF_FLOOR * out.integral.abs();
    if out.error_estimate <= abs_tol.max(floor) {
        return Ok(Integral {
            value: out.integral,
            error_estimate: out.error_estimate,
            evaluations: out.num_function_evaluations,
        });
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(Error::Numerical {
            method: "tanh-sinh quadrature",
            detail: format!(
                "no convergence on [{a:e}, {b:e}] after {depth} bisections: \
                 error estimate {:e} > target {abs_tol:e} ({} evaluations in last panel)",
                out.error_estimate, out.num_function_evaluations
            ),
        });
    }
    let mid = 0.5 * (a + b);
    let left = integrate_panel(f, a, mid, 0.5 * abs_tol, depth + 1)?;
    let right = integrate_panel(f, mid, b, 0.5 * abs_tol, depth + 1)?;
    Ok(Integral {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
        evaluations: out.num_function_evaluations + left.evaluations + right.evaluations,
    })
}

/// Root of `f` inside `[a, b]` by secant steps safeguarded with bisection.
///
/// `f(a)` and `f(b)` must not have the same sign. Stops once the bracket is
/// narrower than `rel_tol` relative to its larger end plus `abs_floor`.
pub fn find_root<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::Numerical {
            method: "bracketed root finding",
            detail: format!("no sign change on [{lo:e}, {hi:e}]: f = {f_lo:e}, {f_hi:e}"),
        });
    }
    let mut width = hi - lo;
    for _ in 0..MAX_ROOT_ITER {
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) + abs_floor {
            // return the end with the smaller residual
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        // fall back to bisection when the secant leaves the bracket or stalls
        let x = if secant > lo && secant < hi && hi - lo < 0.5 * width {
            secant
        } else {
            0.5 * (lo + hi)
        };
        width = hi - lo;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Err(Error::Numerical {
        method: "bracketed root finding",
        detail: format!("bracket [{lo:e}, {hi:e}] not resolved after {MAX_ROOT_ITER} iterations"),
    })
}

const MAX_ROOT_ITER: usize = 500;

/// Maximum located by [`golden_section_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes a unimodal `f` on `[a, b]` until the bracket is narrower than `x_tol`.
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, x_tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > x_tol && iterations < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        iterations += 1;
    }
    let (x, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Maximum { x, value, iterations }
}

/// `count` points from `min` to `max` inclusive, evenly spaced.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { max } else { min + step * i as f64 })
                .collect()
        }
    }
}

/// `count` points from `min` to `max` inclusive, evenly spaced in `ln x`. Both ends must be > 0.
pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(min.ln(), max.ln(), count).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = min;
    }
    if count > 1 {
        out[count - 1] = max;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomial_and_exponential() {
        let i = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-13).unwrap();
        assert_relative_eq!(i.value, 8.0, max_relative = 1e-13);
        let i = integrate(f64::exp, -1.0, 3.0, 1e-13).unwrap();
        assert_relative_eq!(i.value, 3f64.exp() - (-1f64).exp(), max_relative = 1e-13);
        assert_eq!(integrate(f64::exp, 1.0, 1.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let i = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(i.value, -0.5, max_relative = 1e-13);
    }

    #[test]
    fn sharp_peak_triggers_bisection() {
        let w = 1e-3;
        let i = integrate(|x| w / (x * x + w * w), -1.0, 2.0, 1e-10).unwrap();
        let exact = (2.0 / w).atan() + (1.0 / w).atan();
        assert_relative_eq!(i.value, exact, max_relative = 1e-10);
    }

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 3.0, 1e-15, 0.0).unwrap();
        assert_relative_eq!(r, 2f64.cbrt(), max_relative = 1e-14);
        let r = find_root(|x| x, -1.0, 1.0, 1e-14, 1e-300).unwrap();
        assert!(r.abs() < 1e-300);
    }

    #[test]
    fn root_without_bracket_is_error() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-14, 0.0),
            Err(Error::Numerical { .. })
        ));
    }

    #[test]
    fn golden_section_finds_peak() {
        let m = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-8);
        let m = golden_section_max(|x| -(x + 0.7).powi(2), 0.0, -1.0, 1e-9);
        assert!((m.x + 0.7).abs() < 1e-8);
    }

    #[test]
    fn spacing_hits_endpoints() {
        let l = linspace(0.0, 0.25, 7);
        assert_eq!(l.len(), 7);
        assert_eq!((l[0], l[6]), (0.0, 0.25));
        let g = logspace(1e-7, 1e-4, 4);
        assert_eq!((g[0], g[3]), (1e-7, 1e-4));
        assert_relative_eq!(g[1], 1e-6, max_relative = 1e-12);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
