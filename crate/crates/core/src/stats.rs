//! Two-group test statistics and rank utilities.
//!
//! These are the building blocks evaluated at every threshold split: the
//! pooled and Welch two-sample t statistics, the tie-corrected Mann-Whitney
//! z, and the Pearson chi-square for a 2x2 table. All are pure functions.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Which two-group statistic a threshold scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StatKind {
    /// Two-sample t with pooled variance.
    PooledT,
    /// Welch t with separately studentized variances.
    WelchT,
    /// Tie-corrected Mann-Whitney z-score.
    MannWhitney,
    /// Pearson chi-square on the 2x2 table; requires a binary outcome.
    ChiSquare,
}

impl StatKind {
    /// Stable identifier used to key per-method RNG substreams.
    pub(crate) fn stream_id(self) -> u64 {
        match self {
            StatKind::PooledT => 0,
            StatKind::WelchT => 1,
            StatKind::MannWhitney => 2,
            StatKind::ChiSquare => 3,
        }
    }

    pub fn requires_binary_outcome(self) -> bool {
        matches!(self, StatKind::ChiSquare)
    }
}

/// Sample size, mean, and unbiased variance of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased variance (divisor n-1); 0 when n = 1.
    pub variance: f64,
}

impl GroupSummary {
    /// Summarizes a nonempty slice (two-pass mean/variance).
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::GroupTooSmall { n1: 0, n2: 0, min: 1 });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = if n >= 2 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        Ok(GroupSummary { n, mean, variance })
    }
}

/// Cell counts of the 2x2 table at one cutpoint: rows are outcome classes,
/// columns are the low/high feature groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts2x2 {
    pub n11: u64,
    pub n12: u64,
    pub n21: u64,
    pub n22: u64,
}

impl Counts2x2 {
    pub fn total(&self) -> u64 {
        self.n11 + self.n12 + self.n21 + self.n22
    }
}

/// Midranks of `y`: ranks 1..n with tied values sharing the mean of the
/// ranks they span, so the rank sum is always n(n+1)/2.
pub fn midranks(y: &[f64]) -> Result<Vec<f64>> {
    for (i, v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    let mut ranks = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && y[order[j + 1]] == y[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share ranks i+1..=j+1.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    Ok(ranks)
}

/// Sizes of the tie groups of `y` (singletons included).
pub fn tie_group_sizes(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        sizes.push(j - i + 1);
        i = j + 1;
    }
    sizes
}

/// Sum of t^3 - t over tie groups; the tie-correction term of the
/// Mann-Whitney variance.
pub(crate) fn tie_correction_term(tie_sizes: &[usize]) -> f64 {
    tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

/// The split-independent factor of the Mann-Whitney variance:
/// `(n + 1) - tie_term / (n (n - 1))`.
pub(crate) fn mw_bracket(n: usize, tie_term: f64) -> f64 {
    let nf = n as f64;
    (nf + 1.0) - tie_term / (nf * (nf - 1.0))
}

/// z-score of the Mann-Whitney U given the rank sum of group 1.
pub(crate) fn mw_z_from_rank_sum(rank_sum1: f64, n1: usize, n2: usize, bracket: f64) -> f64 {
    let n1f = n1 as f64;
    let n2f = n2 as f64;
    let u = rank_sum1 - n1f * (n1f + 1.0) / 2.0;
    let var_u = n1f * n2f / 12.0 * bracket;
    if var_u <= 0.0 {
        return 0.0;
    }
    (u - n1f * n2f / 2.0) / var_u.sqrt()
}

/// Pooled-variance two-sample t statistic.
///
/// Returns 0 for constant pooled data (zero numerator and zero pooled
/// variance); errors when the pooled variance vanishes but the means differ.
pub fn pooled_t(g1: &GroupSummary, g2: &GroupSummary) -> Result<f64> {
    if g1.n < 2 || g2.n < 2 {
        return Err(Error::GroupTooSmall { n1: g1.n, n2: g2.n, min: 2 });
    }
    let n1 = g1.n as f64;
    let n2 = g2.n as f64;
    let diff = g1.mean - g2.mean;
    let sp_sq = ((n1 - 1.0) * g1.variance + (n2 - 1.0) * g2.variance) / (n1 + n2 - 2.0);
    if sp_sq <= 0.0 {
        return if diff == 0.0 { Ok(0.0) } else { Err(Error::DegenerateVariance) };
    }
    Ok(diff / (sp_sq.sqrt() * (1.0 / n1 + 1.0 / n2).sqrt()))
}

/// Welch two-sample t statistic with unpooled variances.
pub fn welch_t(g1: &GroupSummary, g2: &GroupSummary) -> Result<f64> {
    if g1.n < 2 || g2.n < 2 {
        return Err(Error::GroupTooSmall { n1: g1.n, n2: g2.n, min: 2 });
    }
    let diff = g1.mean - g2.mean;
    let denom_sq = g1.variance / g1.n as f64 + g2.variance / g2.n as f64;
    if denom_sq <= 0.0 {
        return if diff == 0.0 { Ok(0.0) } else { Err(Error::DegenerateVariance) };
    }
    Ok(diff / denom_sq.sqrt())
}

/// Tie-corrected Mann-Whitney z-score from the midranks of group 1 within
/// the pooled sample.
///
/// `ranks_group1` must hold midranks taken in the pooled sample of size
/// `n1 + n2`; `tie_sizes` describes the tie groups of the pooled sample.
/// Returns 0 when every pooled value is tied.
pub fn mann_whitney_z(ranks_group1: &[f64], n1: usize, n2: usize, tie_sizes: &[usize]) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::GroupTooSmall { n1, n2, min: 1 });
    }
    if ranks_group1.len() != n1 {
        return Err(Error::LengthMismatch(ranks_group1.len(), n1));
    }
    let n = n1 + n2;
    let bracket = mw_bracket(n, tie_correction_term(tie_sizes));
    let rank_sum: f64 = ranks_group1.iter().sum();
    Ok(mw_z_from_rank_sum(rank_sum, n1, n2, bracket))
}

/// Pearson chi-square statistic for a 2x2 table, without continuity
/// correction. All four margins must be nonzero.
pub fn chi_square_2x2(c: &Counts2x2) -> Result<f64> {
    let r1 = c.n11 + c.n12;
    let r2 = c.n21 + c.n22;
    let c1 = c.n11 + c.n21;
    let c2 = c.n12 + c.n22;
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Err(Error::ZeroMargin);
    }
    let n = c.total() as f64;
    let det = c.n11 as f64 * c.n22 as f64 - c.n12 as f64 * c.n21 as f64;
    Ok(n * det * det / (r1 as f64 * r2 as f64 * c1 as f64 * c2 as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn summary(values: &[f64]) -> GroupSummary {
        GroupSummary::from_slice(values).unwrap()
    }

    #[test]
    fn midranks_basic() {
        assert_eq!(midranks(&[10.0, 20.0, 30.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(midranks(&[5.0, 5.0, 7.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        // Sort-and-average oracle: sorted (1,2,2,3) -> ranks 1, 2.5, 2.5, 4.
        assert_eq!(midranks(&[3.0, 1.0, 2.0, 2.0]).unwrap(), vec![4.0, 1.0, 2.5, 2.5]);
    }

    #[test]
    fn midranks_sum_is_triangular() {
        let y = [2.0, 2.0, 2.0, 5.0, 1.0, 5.0, 9.0];
        let n = y.len() as f64;
        let total: f64 = midranks(&y).unwrap().iter().sum();
        assert_relative_eq!(total, n * (n + 1.0) / 2.0);
    }

    #[test]
    fn midranks_rejects_non_finite() {
        assert_eq!(midranks(&[1.0, f64::NAN]).unwrap_err(), Error::NonFinite(1));
        assert_eq!(midranks(&[f64::INFINITY]).unwrap_err(), Error::NonFinite(0));
    }

    #[test]
    fn pooled_t_hand_value() {
        // Hand evaluation: means 2 and 5, both variances 1, sp = 1,
        // t = -3 / sqrt(1/3 + 1/3).
        let t = pooled_t(&summary(&[1.0, 2.0, 3.0]), &summary(&[4.0, 5.0, 6.0])).unwrap();
        assert_relative_eq!(t, -3.0 / (2.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(t, -3.6742346141747673, max_relative = 1e-12);
    }

    #[test]
    fn pooled_t_identical_groups_is_zero() {
        let g = summary(&[1.0, 2.0, 3.0]);
        assert_eq!(pooled_t(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn pooled_t_constant_data_convention() {
        let g = summary(&[7.0, 7.0, 7.0]);
        assert_eq!(pooled_t(&g, &g).unwrap(), 0.0);
        // Different constants: degenerate variance.
        let h = summary(&[8.0, 8.0, 8.0]);
        assert_eq!(pooled_t(&g, &h).unwrap_err(), Error::DegenerateVariance);
    }

    #[test]
    fn pooled_t_requires_two_per_group() {
        let g = summary(&[1.0]);
        let h = summary(&[2.0, 3.0]);
        assert!(matches!(pooled_t(&g, &h), Err(Error::GroupTooSmall { .. })));
    }

    #[test]
    fn welch_t_hand_values() {
        // Equal sizes and variances: coincides with the pooled t.
        let t = welch_t(&summary(&[1.0, 2.0, 3.0]), &summary(&[4.0, 5.0, 6.0])).unwrap();
        assert_relative_eq!(t, -3.6742346141747673, max_relative = 1e-12);
        // Hand evaluation: -19 / sqrt(2/2 + 200/2).
        let t = welch_t(&summary(&[0.0, 2.0]), &summary(&[10.0, 30.0])).unwrap();
        assert_relative_eq!(t, -19.0 / 101.0f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(t, -1.8905706613989794, max_relative = 1e-12);
        // Identical groups.
        let g = summary(&[2.0, 4.0]);
        assert_eq!(welch_t(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn mann_whitney_hand_values() {
        // y1 = (1,2), y2 = (3,4): pooled ranks of group 1 are 1,2 and
        // U = 0, z = -2 / sqrt(20/12).
        let ties = [1usize, 1, 1, 1];
        let z = mann_whitney_z(&[1.0, 2.0], 2, 2, &ties).unwrap();
        assert_relative_eq!(z, -2.0 / (5.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(z, -1.5491933384829668, max_relative = 1e-12);
        // Mirror: complete separation the other way.
        let z = mann_whitney_z(&[3.0, 4.0], 2, 2, &ties).unwrap();
        assert_relative_eq!(z, 1.5491933384829668, max_relative = 1e-12);
        // All values equal: every rank is the grand midrank, variance 0.
        let z = mann_whitney_z(&[2.5, 2.5], 2, 2, &[4]).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn chi_square_hand_values() {
        let diag = Counts2x2 { n11: 10, n12: 0, n21: 0, n22: 10 };
        assert_relative_eq!(chi_square_2x2(&diag).unwrap(), 20.0);
        let indep = Counts2x2 { n11: 5, n12: 5, n21: 5, n22: 5 };
        assert_eq!(chi_square_2x2(&indep).unwrap(), 0.0);
        // 8 * 64 / 256.
        let c = Counts2x2 { n11: 3, n12: 1, n21: 1, n22: 3 };
        assert_relative_eq!(chi_square_2x2(&c).unwrap(), 2.0);
    }

    #[test]
    fn chi_square_zero_margin_errors() {
        let c = Counts2x2 { n11: 0, n12: 0, n21: 3, n22: 4 };
        assert_eq!(chi_square_2x2(&c).unwrap_err(), Error::ZeroMargin);
    }

    #[test]
    fn chi_square_equals_squared_two_proportion_z() {
        let c = Counts2x2 { n11: 12, n12: 7, n21: 5, n22: 16 };
        let chi = chi_square_2x2(&c).unwrap();
        // Two-proportion z on the column split with the pooled estimate.
        let n1 = (c.n11 + c.n21) as f64;
        let n2 = (c.n12 + c.n22) as f64;
        let p1 = c.n21 as f64 / n1;
        let p2 = c.n22 as f64 / n2;
        let p = (c.n21 + c.n22) as f64 / (n1 + n2);
        let z = (p1 - p2) / (p * (1.0 - p) * (1.0 / n1 + 1.0 / n2)).sqrt();
        assert_relative_eq!(chi, z * z, max_relative = 1e-10);
    }

    #[test]
    fn tie_term_matches_definition() {
        // Values 2,2,2,5,5,9: groups of 3, 2, 1 -> (27-3) + (8-2) + 0 = 30.
        let sizes = tie_group_sizes(&[2.0, 5.0, 2.0, 9.0, 5.0, 2.0]);
        assert_eq!(tie_correction_term(&sizes), 30.0);
    }
}
