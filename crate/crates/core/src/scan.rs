//! Threshold enumeration and the maximal two-group statistic.
//!
//! A `Scanner` is built once from the feature vector: it owns the x-sorted
//! order and the admissible cutpoints (unique observed values whose low/high
//! split survives the trim policy). Sweeping a response through the scanner
//! is then O(n) with running sums, which is what makes the permutation loop
//! cheap: the sort and the threshold set are shared read-only across all
//! permutations.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::stats::{midranks, mw_bracket, mw_z_from_rank_sum, tie_correction_term, tie_group_sizes, StatKind};
use crate::{Error, Result};

/// Restricts candidate cutpoints to the central part of the feature's order
/// statistics: `floor(eps*n)+1 <= n1 <= n-floor(eps*n)-1`, with `min_group`
/// as an additional floor on both split sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrimPolicy {
    /// Trimming proportion in [0, 0.5).
    pub epsilon: f64,
    /// Minimum observations on each side of every admissible split.
    pub min_group: usize,
}

impl TrimPolicy {
    pub fn new(epsilon: f64, min_group: usize) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::Config(alloc::format!(
                "trim epsilon must be in [0, 0.5), got {epsilon}"
            )));
        }
        Ok(TrimPolicy { epsilon, min_group })
    }

    /// Admissible range of left-group sizes for a sample of size `n`.
    pub fn admissible_n1(&self, n: usize) -> (usize, usize) {
        let trim = (self.epsilon * n as f64).floor() as usize;
        let lo = (trim + 1).max(self.min_group).max(1);
        let hi_trim = n.saturating_sub(trim + 1);
        let hi = hi_trim.min(n.saturating_sub(self.min_group)).min(n.saturating_sub(1));
        (lo, hi)
    }
}

impl Default for TrimPolicy {
    fn default() -> Self {
        TrimPolicy { epsilon: 0.1, min_group: 5 }
    }
}

/// Per-threshold statistics of one sweep plus the maximum and where it
/// was achieved. Ties in the maximum report the smallest threshold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    /// Candidate cutpoints, ascending.
    pub thresholds: Vec<f64>,
    /// |T| (or chi-square) at each cutpoint.
    pub stats: Vec<f64>,
    /// Left-group size at each cutpoint.
    pub split_sizes: Vec<usize>,
    pub max_stat: f64,
    pub argmax_threshold: f64,
    pub argmax_n1: usize,
}

/// Precomputed x-order and admissible cutpoints, shared by every sweep over
/// the same feature.
#[derive(Debug, Clone)]
pub struct Scanner {
    n: usize,
    /// Indices of x in ascending order.
    order: Vec<usize>,
    /// Candidate left-group sizes, ascending.
    boundaries: Vec<usize>,
    /// Cutpoint value per boundary (the largest x in the left group).
    thresholds: Vec<f64>,
}

impl Scanner {
    pub fn new(x: &[f64], trim: &TrimPolicy) -> Result<Self> {
        let n = x.len();
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        if n < 2 {
            return Err(Error::NoAdmissibleThreshold);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let (lo, hi) = trim.admissible_n1(n);
        let mut boundaries = Vec::new();
        let mut thresholds = Vec::new();
        for n1 in lo..=hi.min(n.saturating_sub(1)) {
            // A cutpoint exists at n1 iff the sorted x strictly increases there.
            if x[order[n1 - 1]] < x[order[n1]] {
                boundaries.push(n1);
                thresholds.push(x[order[n1 - 1]]);
            }
        }
        if boundaries.is_empty() {
            return Err(Error::NoAdmissibleThreshold);
        }
        Ok(Scanner { n, order, boundaries, thresholds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Candidate cutpoints, ascending.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Left-group size at each cutpoint.
    pub fn split_sizes(&self) -> &[usize] {
        &self.boundaries
    }

    /// Writes `values` (optionally relabeled by `perm`) into x-sorted order.
    pub(crate) fn gather(&self, values: &[f64], perm: Option<&[usize]>, buf: &mut Vec<f64>) {
        buf.clear();
        match perm {
            None => buf.extend(self.order.iter().map(|&i| values[i])),
            Some(p) => buf.extend(self.order.iter().map(|&i| values[p[i]])),
        }
    }

    /// Sweep for the t statistics. `y_sorted` is the response in x-sorted
    /// order. Returns (max |T|, argmax boundary index); `record`, if given,
    /// receives the per-threshold statistics.
    pub(crate) fn sweep_t(
        &self,
        y_sorted: &[f64],
        welch: bool,
        mut record: Option<&mut Vec<f64>>,
    ) -> (f64, usize) {
        let n = self.n;
        let nf = n as f64;
        // Shift by the grand mean so the running sums stay cancellation-free
        // even when the response has a large offset or wild outliers.
        let pivot = y_sorted.iter().sum::<f64>() / nf;
        let mut total_sum = 0.0;
        let mut total_sq = 0.0;
        for &v in y_sorted {
            let d = v - pivot;
            total_sum += d;
            total_sq += d * d;
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0usize;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut bi = 0usize;
        for (pos, &v) in y_sorted.iter().enumerate() {
            let d = v - pivot;
            sum += d;
            sq += d * d;
            if bi < self.boundaries.len() && self.boundaries[bi] == pos + 1 {
                let n1 = pos + 1;
                let n2 = n - n1;
                let stat = if n1 < 2 || n2 < 2 {
                    0.0
                } else {
                    let n1f = n1 as f64;
                    let n2f = n2 as f64;
                    let sum2 = total_sum - sum;
                    let sq2 = total_sq - sq;
                    let var1 = ((sq - sum * sum / n1f) / (n1f - 1.0)).max(0.0);
                    let var2 = ((sq2 - sum2 * sum2 / n2f) / (n2f - 1.0)).max(0.0);
                    let diff = sum / n1f - sum2 / n2f;
                    let denom_sq = if welch {
                        var1 / n1f + var2 / n2f
                    } else {
                        let sp_sq = ((n1f - 1.0) * var1 + (n2f - 1.0) * var2) / (nf - 2.0);
                        sp_sq * (1.0 / n1f + 1.0 / n2f)
                    };
                    if denom_sq <= 0.0 {
                        0.0
                    } else {
                        (diff / denom_sq.sqrt()).abs()
                    }
                };
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(stat);
                }
                if stat > best {
                    best = stat;
                    best_idx = bi;
                }
                bi += 1;
            }
        }
        (best, best_idx)
    }

    /// Sweep for the Mann-Whitney z. `ranks_sorted` holds the pooled
    /// midranks in x-sorted order; `bracket` is the tie-corrected variance
    /// factor from [`crate::stats::mw_bracket`].
    pub(crate) fn sweep_mw(
        &self,
        ranks_sorted: &[f64],
        bracket: f64,
        mut record: Option<&mut Vec<f64>>,
    ) -> (f64, usize) {
        let n = self.n;
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0usize;
        let mut rank_sum = 0.0;
        let mut bi = 0usize;
        for (pos, &r) in ranks_sorted.iter().enumerate() {
            rank_sum += r;
            if bi < self.boundaries.len() && self.boundaries[bi] == pos + 1 {
                let n1 = pos + 1;
                let stat = mw_z_from_rank_sum(rank_sum, n1, n - n1, bracket).abs();
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(stat);
                }
                if stat > best {
                    best = stat;
                    best_idx = bi;
                }
                bi += 1;
            }
        }
        (best, best_idx)
    }

    /// Sweep for the chi-square statistic over a binary response.
    pub(crate) fn sweep_chi(&self, y_sorted: &[f64], mut record: Option<&mut Vec<f64>>) -> (f64, usize) {
        let n = self.n;
        let nf = n as f64;
        let ones_total: f64 = y_sorted.iter().sum();
        let zeros_total = nf - ones_total;
        let degenerate = ones_total == 0.0 || zeros_total == 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0usize;
        let mut ones_left = 0.0;
        let mut bi = 0usize;
        for (pos, &v) in y_sorted.iter().enumerate() {
            ones_left += v;
            if bi < self.boundaries.len() && self.boundaries[bi] == pos + 1 {
                let n1 = (pos + 1) as f64;
                let n2 = nf - n1;
                let stat = if degenerate {
                    0.0
                } else {
                    let n21 = ones_left;
                    let n11 = n1 - ones_left;
                    let n22 = ones_total - ones_left;
                    let n12 = n2 - n22;
                    let det = n11 * n22 - n12 * n21;
                    nf * det * det / (zeros_total * ones_total * n1 * n2)
                };
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(stat);
                }
                if stat > best {
                    best = stat;
                    best_idx = bi;
                }
                bi += 1;
            }
        }
        (best, best_idx)
    }

    /// Maximum statistic for a response given in original index order,
    /// optionally relabeled by `perm`. For Mann-Whitney, pass the pooled
    /// midranks as `values` along with their tie bracket.
    pub(crate) fn max_stat(
        &self,
        kind: StatKind,
        values: &[f64],
        mw_tie_bracket: f64,
        perm: Option<&[usize]>,
        buf: &mut Vec<f64>,
    ) -> f64 {
        self.gather(values, perm, buf);
        match kind {
            StatKind::PooledT => self.sweep_t(buf, false, None).0,
            StatKind::WelchT => self.sweep_t(buf, true, None).0,
            StatKind::MannWhitney => self.sweep_mw(buf, mw_tie_bracket, None).0,
            StatKind::ChiSquare => self.sweep_chi(buf, None).0,
        }
    }

    /// Full per-threshold scan of the observed response.
    pub fn scan(&self, y: &[f64], kind: StatKind) -> Result<ScanResult> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch(y.len(), self.n));
        }
        for (i, v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        if kind.requires_binary_outcome() && !is_binary(y) {
            return Err(Error::NonBinaryOutcome);
        }
        let mut stats = Vec::with_capacity(self.boundaries.len());
        let mut buf = Vec::with_capacity(self.n);
        let (max_stat, argmax) = match kind {
            StatKind::PooledT => {
                self.gather(y, None, &mut buf);
                self.sweep_t(&buf, false, Some(&mut stats))
            }
            StatKind::WelchT => {
                self.gather(y, None, &mut buf);
                self.sweep_t(&buf, true, Some(&mut stats))
            }
            StatKind::MannWhitney => {
                let ranks = midranks(y)?;
                let bracket = mw_bracket(self.n, tie_correction_term(&tie_group_sizes(y)));
                self.gather(&ranks, None, &mut buf);
                self.sweep_mw(&buf, bracket, Some(&mut stats))
            }
            StatKind::ChiSquare => {
                self.gather(y, None, &mut buf);
                self.sweep_chi(&buf, Some(&mut stats))
            }
        };
        Ok(ScanResult {
            thresholds: self.thresholds.clone(),
            stats,
            split_sizes: self.boundaries.clone(),
            max_stat,
            argmax_threshold: self.thresholds[argmax],
            argmax_n1: self.boundaries[argmax],
        })
    }
}

fn is_binary(y: &[f64]) -> bool {
    y.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Sorted unique observed values of `x` whose low/high split satisfies the
/// trim policy. The largest unique value is never a candidate (its right
/// group would be empty).
pub fn candidate_thresholds(x: &[f64], trim: &TrimPolicy) -> Result<Vec<f64>> {
    Ok(Scanner::new(x, trim)?.thresholds().to_vec())
}

/// Maximal two-group statistic over all admissible cutpoints of `x`.
///
/// Signed statistics are maximized in absolute value; the chi-square is used
/// as-is. Splits that degenerate (zero variance on both sides, all values
/// tied) contribute statistic 0 rather than an error so that a permutation
/// loop never aborts mid-run.
pub fn max_scan(y: &[f64], x: &[f64], kind: StatKind, trim: &TrimPolicy) -> Result<ScanResult> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    Scanner::new(x, trim)?.scan(y, kind)
}
