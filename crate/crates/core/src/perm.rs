//! Permutation distribution of the maximal statistic.
//!
//! The x-order and threshold set are computed once; each permutation only
//! relabels the response and re-runs the O(n) sweep. For the Mann-Whitney
//! statistic the response enters only through its midranks, and ranks are
//! invariant under relabeling, so they too are computed exactly once.
//!
//! Every permutation draws its generator from a substream keyed by
//! (master seed, permutation index): results are bit-identical no matter
//! how many workers execute the loop.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::substream_rng;
use crate::scan::{Scanner, TrimPolicy};
use crate::stats::{midranks, mw_bracket, tie_correction_term, tie_group_sizes, StatKind};
use crate::{Error, Result};

/// How the permutation distribution is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PermMode {
    /// `b` uniform random permutations.
    MonteCarlo,
    /// All n! permutations; only allowed while n! stays under the cap.
    Exhaustive,
}

/// Monte Carlo plan for a permutation test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermPlan {
    /// Number of Monte Carlo permutations.
    pub b: usize,
    /// Master seed; every permutation derives its own substream from it.
    pub seed: u64,
    pub mode: PermMode,
    /// Upper bound on n! for exhaustive mode (default 8! = 40320).
    pub exhaustive_cap: u64,
    /// Worker threads for the permutation loop (1 = sequential).
    pub workers: usize,
}

pub const DEFAULT_PERMUTATIONS: usize = 1000;
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 40_320;

impl PermPlan {
    pub fn monte_carlo(b: usize, seed: u64) -> Self {
        PermPlan {
            b,
            seed,
            mode: PermMode::MonteCarlo,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            workers: 1,
        }
    }

    pub fn exhaustive() -> Self {
        PermPlan {
            b: 0,
            seed: 0,
            mode: PermMode::Exhaustive,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Observed maximum, its Monte Carlo (or exhaustive) null sample, and the
/// permutation p-value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermResult {
    pub t_obs: f64,
    pub null_sample: Vec<f64>,
    /// `(1 + b_geq) / (B + 1)` in Monte Carlo mode, `b_geq / n!` exhaustive.
    pub p_value: f64,
    /// Null values >= the observed maximum (ties count, the conservative
    /// direction).
    pub b_geq: usize,
}

/// Uniform random permutation of `0..n` by Fisher-Yates shuffle.
pub fn draw_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

fn factorial_capped(n: usize, cap: u64) -> Result<u64> {
    let mut f: u64 = 1;
    for k in 2..=n as u64 {
        f = f.checked_mul(k).ok_or(Error::ExhaustiveCapExceeded { n, cap })?;
        if f > cap {
            return Err(Error::ExhaustiveCapExceeded { n, cap });
        }
    }
    Ok(f)
}

// Heap's algorithm; visits all n! arrangements of 0..n.
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = alloc::vec![0usize; n];
    visit(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Shared engine: `values` is the response (or its midranks for
/// Mann-Whitney) in original index order.
fn run_plan(
    scanner: &Scanner,
    kind: StatKind,
    values: &[f64],
    mw_tie_bracket: f64,
    plan: &PermPlan,
) -> Result<PermResult> {
    let n = scanner.n();
    let mut buf = Vec::with_capacity(n);
    let t_obs = scanner.max_stat(kind, values, mw_tie_bracket, None, &mut buf);

    let null_sample = match plan.mode {
        PermMode::MonteCarlo => {
            if plan.b == 0 {
                return Err(Error::Config("Monte Carlo plan needs at least one permutation".into()));
            }
            crate::exec::map_indexed(plan.b, plan.workers, |i| {
                let mut rng = substream_rng(plan.seed, i as u64);
                let perm = draw_permutation(n, &mut rng);
                let mut buf = Vec::with_capacity(n);
                scanner.max_stat(kind, values, mw_tie_bracket, Some(&perm), &mut buf)
            })
        }
        PermMode::Exhaustive => {
            let total = factorial_capped(n, plan.exhaustive_cap)?;
            let mut sample = Vec::with_capacity(total as usize);
            let mut buf = Vec::with_capacity(n);
            for_each_permutation(n, |perm| {
                sample.push(scanner.max_stat(kind, values, mw_tie_bracket, Some(perm), &mut buf));
            });
            sample
        }
    };

    let b_geq = null_sample.iter().filter(|&&v| v >= t_obs).count();
    let p_value = match plan.mode {
        PermMode::MonteCarlo => (1.0 + b_geq as f64) / (plan.b as f64 + 1.0),
        PermMode::Exhaustive => b_geq as f64 / null_sample.len() as f64,
    };
    Ok(PermResult { t_obs, null_sample, p_value, b_geq })
}

/// Permutation test of the maximal statistic: the observed maximum of
/// [`crate::scan::max_scan`] calibrated against relabelings of `y`.
pub fn permutation_test(
    y: &[f64],
    x: &[f64],
    kind: StatKind,
    trim: &TrimPolicy,
    plan: &PermPlan,
) -> Result<PermResult> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    for (i, v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    if kind.requires_binary_outcome() && !y.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(Error::NonBinaryOutcome);
    }
    let scanner = Scanner::new(x, trim)?;
    match kind {
        StatKind::MannWhitney => {
            let ranks = midranks(y)?;
            mw_fast_path(&ranks, &scanner, plan)
        }
        _ => run_plan(&scanner, kind, y, 0.0, plan),
    }
}

/// Mann-Whitney engine that permutes precomputed midranks instead of
/// re-ranking each relabeled response.
///
/// Given `ranks = midranks(y)`, the result is bit-identical to
/// [`permutation_test`] with [`StatKind::MannWhitney`]: midranks are
/// permutation-equivariant, so relabeling the ranks and re-ranking the
/// relabeled response produce the same values.
pub fn mw_fast_path(ranks: &[f64], scanner: &Scanner, plan: &PermPlan) -> Result<PermResult> {
    if ranks.len() != scanner.n() {
        return Err(Error::LengthMismatch(ranks.len(), scanner.n()));
    }
    // Tie structure of the ranks equals the tie structure of the response.
    let bracket = mw_bracket(scanner.n(), tie_correction_term(&tie_group_sizes(ranks)));
    run_plan(scanner, StatKind::MannWhitney, ranks, bracket, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    const LOOSE: TrimPolicy = TrimPolicy { epsilon: 0.0, min_group: 1 };

    #[test]
    fn constant_outcome_gives_p_one() {
        let y = [2.0; 8];
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let plan = PermPlan::monte_carlo(200, 7);
        let res = permutation_test(&y, &x, StatKind::MannWhitney, &LOOSE, &plan).unwrap();
        assert_eq!(res.t_obs, 0.0);
        assert_eq!(res.p_value, 1.0);
        assert!(res.null_sample.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_permutation_for_n1() {
        let mut rng = substream_rng(1, 0);
        assert_eq!(draw_permutation(1, &mut rng), vec![0]);
    }

    #[test]
    fn draws_are_uniform_over_s3() {
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let draws = 60_000;
        for i in 0..draws {
            let mut rng = substream_rng(99, i);
            *counts.entry(draw_permutation(3, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, &c) in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "frequency {freq} too far from 1/6");
        }
    }

    #[test]
    fn deterministic_across_runs_and_workers() {
        let y = [0.4, -1.2, 2.2, 0.1, 0.9, -0.3, 1.7, 0.0, 2.8, -0.9];
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let base = PermPlan::monte_carlo(400, 123);
        let a = permutation_test(&y, &x, StatKind::WelchT, &LOOSE, &base).unwrap();
        let b = permutation_test(&y, &x, StatKind::WelchT, &LOOSE, &base).unwrap();
        assert_eq!(a, b);
        for workers in [2, 8] {
            let c =
                permutation_test(&y, &x, StatKind::WelchT, &LOOSE, &base.with_workers(workers)).unwrap();
            assert_eq!(a.null_sample, c.null_sample);
            assert_eq!(a.p_value, c.p_value);
        }
    }

    #[test]
    fn fast_path_matches_generic_engine_bitwise() {
        let y = [3.0, 3.0, 1.0, 5.0, 2.0, 2.0, 4.0, 0.5, 3.0, 1.5];
        let x = [2.0, 9.0, 4.0, 1.0, 7.0, 3.0, 8.0, 5.0, 6.0, 10.0];
        let plan = PermPlan::monte_carlo(300, 42);
        let via_test = permutation_test(&y, &x, StatKind::MannWhitney, &LOOSE, &plan).unwrap();
        let scanner = Scanner::new(&x, &LOOSE).unwrap();
        let ranks = midranks(&y).unwrap();
        let via_fast = mw_fast_path(&ranks, &scanner, &plan).unwrap();
        assert_eq!(via_test, via_fast);
    }

    #[test]
    fn exhaustive_mode_enumerates_all() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let x = [1.0, 2.0, 3.0, 4.0];
        let res = permutation_test(&y, &x, StatKind::MannWhitney, &LOOSE, &PermPlan::exhaustive())
            .unwrap();
        assert_eq!(res.null_sample.len(), 24);
        // The identity permutation is in the sample, so b_geq >= 1.
        assert!(res.b_geq >= 1);
        assert!(res.p_value > 0.0 && res.p_value <= 1.0);
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let y: Vec<f64> = (0..9).map(|v| v as f64).collect();
        let x = y.clone();
        let err = permutation_test(&y, &x, StatKind::MannWhitney, &LOOSE, &PermPlan::exhaustive())
            .unwrap_err();
        assert!(matches!(err, Error::ExhaustiveCapExceeded { n: 9, .. }));
    }

    #[test]
    fn monte_carlo_tracks_exhaustive() {
        let y = [0.7, -0.2, 1.5, 0.1, 2.2];
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let exact = permutation_test(&y, &x, StatKind::MannWhitney, &LOOSE, &PermPlan::exhaustive())
            .unwrap();
        let mc = permutation_test(
            &y,
            &x,
            StatKind::MannWhitney,
            &LOOSE,
            &PermPlan::monte_carlo(4000, 5),
        )
        .unwrap();
        let se = (exact.p_value * (1.0 - exact.p_value) / 4000.0).sqrt();
        assert!(
            (mc.p_value - exact.p_value).abs() <= 3.0 * se + 2.0 / 4001.0,
            "mc {} vs exact {}",
            mc.p_value,
            exact.p_value
        );
    }

    #[test]
    fn mc_p_value_never_zero() {
        // Strong signal: observed max should beat every permutation, and the
        // add-one convention still keeps p > 0.
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let x = y;
        let res =
            permutation_test(&y, &x, StatKind::PooledT, &LOOSE, &PermPlan::monte_carlo(500, 3))
                .unwrap();
        assert!(res.p_value >= 1.0 / 501.0);
        assert!(res.p_value <= 1.0);
    }
}
