//! Distance covariance and correlation for scalar samples.
//!
//! Plain (biased) sample version: pairwise absolute-difference matrices are
//! double-centered and averaged. O(n^2) time, O(n) memory; the matrices are
//! never materialized.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Distance covariance/variances and the distance correlation in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DCorResult {
    pub dcov_sq: f64,
    pub dvar_x: f64,
    pub dvar_y: f64,
    /// `sqrt(dcov_sq / sqrt(dvar_x * dvar_y))`; 0 when either variable is
    /// constant (zero distance variance).
    pub dcor: f64,
}

/// Row means and grand mean of one variable's distance matrix, precomputed
/// so a screening pass can reuse the outcome side across many features.
#[derive(Debug, Clone)]
pub(crate) struct CenteredDistances {
    values: Vec<f64>,
    row_means: Vec<f64>,
    grand_mean: f64,
    dvar: f64,
}

impl CenteredDistances {
    pub(crate) fn new(v: &[f64]) -> Result<Self> {
        let n = v.len();
        if n < 2 {
            return Err(Error::GroupTooSmall { n1: n, n2: 0, min: 2 });
        }
        for (i, x) in v.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        let nf = n as f64;
        let mut row_means = alloc::vec![0.0; n];
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += (v[j] - v[k]).abs();
            }
            row_means[j] = s / nf;
        }
        let grand_mean = row_means.iter().sum::<f64>() / nf;
        let mut dvar = 0.0;
        for j in 0..n {
            for k in 0..n {
                let a = (v[j] - v[k]).abs() - row_means[j] - row_means[k] + grand_mean;
                dvar += a * a;
            }
        }
        dvar /= nf * nf;
        Ok(CenteredDistances { values: v.to_vec(), row_means, grand_mean, dvar: dvar.max(0.0) })
    }

    pub(crate) fn dvar(&self) -> f64 {
        self.dvar
    }

    /// Distance correlation of `x` against the precomputed variable.
    pub(crate) fn dcor_with(&self, x: &CenteredDistances) -> DCorResult {
        let n = self.values.len();
        debug_assert_eq!(n, x.values.len());
        let nf = n as f64;
        let mut dcov = 0.0;
        for j in 0..n {
            for k in 0..n {
                let a = (x.values[j] - x.values[k]).abs() - x.row_means[j] - x.row_means[k]
                    + x.grand_mean;
                let b = (self.values[j] - self.values[k]).abs() - self.row_means[j]
                    - self.row_means[k]
                    + self.grand_mean;
                dcov += a * b;
            }
        }
        let dcov_sq = (dcov / (nf * nf)).max(0.0);
        let denom = (x.dvar * self.dvar).sqrt();
        let dcor = if denom > 0.0 { (dcov_sq / denom).sqrt() } else { 0.0 };
        DCorResult { dcov_sq, dvar_x: x.dvar, dvar_y: self.dvar, dcor }
    }
}

/// Sample distance correlation between `x` and `y`.
///
/// Constant inputs are not an error: they carry zero distance variance and
/// the correlation is reported as 0 (inspect `dvar_x`/`dvar_y` to tell).
pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<DCorResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let cy = CenteredDistances::new(y)?;
    let cx = CenteredDistances::new(x)?;
    Ok(cy.dcor_with(&cx))
}
