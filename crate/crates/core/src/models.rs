//! Classical single-feature comparator tests: the OLS slope t-test, its
//! heteroscedasticity-robust sandwich variant, and the logistic-regression
//! Wald test fit by iteratively reweighted least squares.

use crate::dist::{norm_two_sided_p, t_two_sided_p};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Which heteroscedasticity-consistent weighting the sandwich variance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HcKind {
    /// `w_i = e_i^2 * n / (n - 2)`.
    Hc1,
    /// `w_i = e_i^2 / (1 - h_ii)^2` (jackknife-like; conservative).
    Hc3,
}

/// A fitted two-parameter regression with its slope test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegFit {
    pub beta0: f64,
    pub beta1: f64,
    pub se_beta1: f64,
    pub test_stat: f64,
    pub p_value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// A degenerate-data guard fired (perfect fit, capped leverage,
    /// separation).
    pub flagged: bool,
}

struct Centered {
    x_mean: f64,
    y_mean: f64,
    sxx: f64,
    sxy: f64,
}

fn center(y: &[f64], x: &[f64]) -> Result<Centered> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    let n = y.len();
    if n < 3 {
        return Err(Error::GroupTooSmall { n1: n, n2: 0, min: 3 });
    }
    for (i, v) in y.iter().chain(x.iter()).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i % n));
        }
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (yi, xi) in y.iter().zip(x) {
        sxx += (xi - x_mean) * (xi - x_mean);
        sxy += (xi - x_mean) * (yi - y_mean);
    }
    if sxx <= 0.0 {
        return Err(Error::ConstantFeature);
    }
    Ok(Centered { x_mean, y_mean, sxx, sxy })
}

/// Ordinary least squares slope test: `t = beta1 / se(beta1)` with the
/// classical standard error and a two-sided Student-t reference on n-2
/// degrees of freedom. An exact fit (zero residuals) reports p = 0 for a
/// nonzero slope.
pub fn ols_slope_test(y: &[f64], x: &[f64]) -> Result<RegFit> {
    let c = center(y, x)?;
    let n = y.len();
    let beta1 = c.sxy / c.sxx;
    let beta0 = c.y_mean - beta1 * c.x_mean;
    let sse: f64 = y.iter().zip(x).map(|(yi, xi)| {
        let e = yi - beta0 - beta1 * xi;
        e * e
    }).sum();
    let df = (n - 2) as f64;
    let se = (sse / df / c.sxx).sqrt();
    if se == 0.0 {
        let (stat, p) = if beta1 == 0.0 { (0.0, 1.0) } else { (f64::INFINITY.copysign(beta1), 0.0) };
        return Ok(RegFit {
            beta0,
            beta1,
            se_beta1: 0.0,
            test_stat: stat,
            p_value: p,
            converged: true,
            iterations: 0,
            flagged: true,
        });
    }
    let t = beta1 / se;
    Ok(RegFit {
        beta0,
        beta1,
        se_beta1: se,
        test_stat: t,
        p_value: t_two_sided_p(t, df),
        converged: true,
        iterations: 0,
        flagged: false,
    })
}

/// Slope test with a heteroscedasticity-consistent sandwich standard error,
/// referenced against Student-t with n-2 degrees of freedom.
pub fn sandwich_slope_test(y: &[f64], x: &[f64], hc: HcKind) -> Result<RegFit> {
    let c = center(y, x)?;
    let n = y.len();
    let nf = n as f64;
    let beta1 = c.sxy / c.sxx;
    let beta0 = c.y_mean - beta1 * c.x_mean;
    let mut meat = 0.0;
    let mut flagged = false;
    for (yi, xi) in y.iter().zip(x) {
        let e = yi - beta0 - beta1 * xi;
        let dx = xi - c.x_mean;
        let w = match hc {
            HcKind::Hc1 => e * e * nf / (nf - 2.0),
            HcKind::Hc3 => {
                let h = 1.0 / nf + dx * dx / c.sxx;
                let mut one_minus_h = 1.0 - h;
                if one_minus_h < 1e-8 {
                    one_minus_h = 1e-8;
                    flagged = true;
                }
                e * e / (one_minus_h * one_minus_h)
            }
        };
        meat += w * dx * dx;
    }
    let var = meat / (c.sxx * c.sxx);
    let se = var.sqrt();
    if se == 0.0 {
        let (stat, p) = if beta1 == 0.0 { (0.0, 1.0) } else { (f64::INFINITY.copysign(beta1), 0.0) };
        return Ok(RegFit {
            beta0,
            beta1,
            se_beta1: 0.0,
            test_stat: stat,
            p_value: p,
            converged: true,
            iterations: 0,
            flagged: true,
        });
    }
    let t = beta1 / se;
    Ok(RegFit {
        beta0,
        beta1,
        se_beta1: se,
        test_stat: t,
        p_value: t_two_sided_p(t, (n - 2) as f64),
        converged: true,
        iterations: 0,
        flagged,
    })
}

const LOGISTIC_MAX_ITER: usize = 50;
const LOGISTIC_TOL: f64 = 1e-8;
/// |beta1| beyond this is treated as separation (the likelihood has no
/// interior maximum and the Wald statistic is meaningless).
const SEPARATION_GUARD: f64 = 30.0;

fn expit(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// Logistic-regression Wald test for the slope, fit by Newton-Raphson
/// (iteratively reweighted least squares).
///
/// On separation or non-convergence the fit is flagged `converged = false`
/// and reports p = 1 so that simulation tallies count it as a non-rejection.
pub fn logistic_wald_test(y: &[f64], x: &[f64]) -> Result<RegFit> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    if !y.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(Error::NonBinaryOutcome);
    }
    let n = y.len();
    if n < 3 {
        return Err(Error::GroupTooSmall { n1: n, n2: 0, min: 3 });
    }
    let ones: f64 = y.iter().sum();
    if ones == 0.0 || ones == n as f64 {
        return Err(Error::DegenerateOutcome);
    }
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }

    let p_bar = ones / n as f64;
    let mut beta0 = (p_bar / (1.0 - p_bar)).ln();
    let mut beta1 = 0.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < LOGISTIC_MAX_ITER {
        let mut g0 = 0.0;
        let mut g1 = 0.0;
        let mut i00 = 0.0;
        let mut i01 = 0.0;
        let mut i11 = 0.0;
        for (yi, xi) in y.iter().zip(x) {
            let mu = expit(beta0 + beta1 * xi).clamp(1e-12, 1.0 - 1e-12);
            let w = mu * (1.0 - mu);
            let r = yi - mu;
            g0 += r;
            g1 += r * xi;
            i00 += w;
            i01 += w * xi;
            i11 += w * xi * xi;
        }
        let det = i00 * i11 - i01 * i01;
        if det <= 1e-300 {
            break;
        }
        let d0 = (i11 * g0 - i01 * g1) / det;
        let d1 = (i00 * g1 - i01 * g0) / det;
        beta0 += d0;
        beta1 += d1;
        iterations += 1;
        if beta1.abs() > SEPARATION_GUARD {
            break;
        }
        if d0.abs().max(d1.abs()) <= LOGISTIC_TOL {
            converged = true;
            break;
        }
    }

    if !converged {
        return Ok(RegFit {
            beta0,
            beta1,
            se_beta1: f64::INFINITY,
            test_stat: 0.0,
            p_value: 1.0,
            converged: false,
            iterations,
            flagged: true,
        });
    }

    // Observed information at the final estimate.
    let mut i00 = 0.0;
    let mut i01 = 0.0;
    let mut i11 = 0.0;
    for xi in x {
        let mu = expit(beta0 + beta1 * xi).clamp(1e-12, 1.0 - 1e-12);
        let w = mu * (1.0 - mu);
        i00 += w;
        i01 += w * xi;
        i11 += w * xi * xi;
    }
    let det = i00 * i11 - i01 * i01;
    let se = (i00 / det).sqrt();
    let z = beta1 / se;
    Ok(RegFit {
        beta0,
        beta1,
        se_beta1: se,
        test_stat: z,
        p_value: norm_two_sided_p(z),
        converged: true,
        iterations,
        flagged: false,
    })
}
