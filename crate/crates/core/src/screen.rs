//! Model-free marginal feature screening.
//!
//! Each feature is ranked by a marginal utility against the outcome and the
//! top k are kept. The default utility is the observed maximal statistic of
//! the threshold scan: with a common trim policy the admissible split-size
//! range is the same for every feature, so ranking by the observed maximum
//! is rank-equivalent to ranking by the permutation p-value at a fixed
//! number of permutations while costing B times less. The p-value ranking
//! stays available for verification, and distance correlation serves as the
//! comparator utility.

use alloc::vec::Vec;

use crate::datagen::{generate_sparse, FeatureMatrix, GenConfig};
use crate::dcor::CenteredDistances;
use crate::perm::{permutation_test, PermPlan};
use crate::rng::substream_seed;
use crate::scan::{Scanner, TrimPolicy};
use crate::stats::{midranks, mw_bracket, tie_correction_term, tie_group_sizes, StatKind};
use crate::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Marginal utility used to rank features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScreenUtility {
    /// Observed maximal statistic of the threshold scan (default).
    MaxStat,
    /// Permutation p-value of the maximal statistic (ranked ascending);
    /// needs a `PermPlan`. Verification-only: B times the cost of `MaxStat`.
    PermPValue,
    /// Distance correlation comparator.
    DistCorr,
}

/// Screening configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScreenConfig {
    pub utility: ScreenUtility,
    /// Scan statistic for the `MaxStat`/`PermPValue` utilities.
    pub stat: StatKind,
    /// How many features to keep.
    pub k: usize,
    pub trim: TrimPolicy,
    /// Required for [`ScreenUtility::PermPValue`].
    pub perm_plan: Option<PermPlan>,
}

impl ScreenConfig {
    pub fn max_stat(stat: StatKind, k: usize) -> Self {
        ScreenConfig { utility: ScreenUtility::MaxStat, stat, k, trim: TrimPolicy::default(), perm_plan: None }
    }

    pub fn dist_corr(k: usize) -> Self {
        ScreenConfig {
            utility: ScreenUtility::DistCorr,
            stat: StatKind::PooledT,
            k,
            trim: TrimPolicy::default(),
            perm_plan: None,
        }
    }
}

/// Ranked screening output.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScreenResult {
    /// Utility per feature (for `PermPValue` this is `-p`, so larger is
    /// still better).
    pub utilities: Vec<f64>,
    /// Permutation p-values per feature (`PermPValue` utility only).
    pub p_values: Option<Vec<f64>>,
    /// Features ordered by decreasing utility, ties broken by smaller index.
    pub order: Vec<usize>,
    /// The top k of `order`.
    pub selected: Vec<usize>,
    /// Features with no variation (utility forced to the bottom).
    pub constant_features: Vec<usize>,
}

fn rank_features(utilities: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..utilities.len()).collect();
    // Stable sort on descending utility; stability = smaller-index tie-break.
    order.sort_by(|&a, &b| utilities[b].total_cmp(&utilities[a]));
    order
}

fn screen_utilities(
    y: &[f64],
    features: &FeatureMatrix,
    cfg: &ScreenConfig,
    workers: usize,
) -> Result<(Vec<f64>, Option<Vec<f64>>, Vec<usize>)> {
    let n = features.n();
    if y.len() != n {
        return Err(Error::LengthMismatch(y.len(), n));
    }
    for (i, v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    let p = features.p();

    match cfg.utility {
        ScreenUtility::MaxStat => {
            if cfg.stat.requires_binary_outcome() && !y.iter().all(|&v| v == 0.0 || v == 1.0) {
                return Err(Error::NonBinaryOutcome);
            }
            // The response side is feature-independent: ranks once for MW.
            let (values, bracket) = if cfg.stat == StatKind::MannWhitney {
                let ranks = midranks(y)?;
                let bracket = mw_bracket(n, tie_correction_term(&tie_group_sizes(y)));
                (ranks, bracket)
            } else {
                (y.to_vec(), 0.0)
            };
            let per_feature: Vec<Result<f64>> = crate::exec::map_indexed(p, workers, |j| {
                match Scanner::new(features.col(j), &cfg.trim) {
                    Ok(scanner) => {
                        let mut buf = Vec::with_capacity(n);
                        Ok(scanner.max_stat(cfg.stat, &values, bracket, None, &mut buf))
                    }
                    Err(Error::NoAdmissibleThreshold) => Err(Error::ConstantFeature),
                    Err(e) => Err(e),
                }
            });
            collect_utilities(per_feature, 0.0).map(|(u, c)| (u, None, c))
        }
        ScreenUtility::PermPValue => {
            let plan = cfg
                .perm_plan
                .as_ref()
                .ok_or_else(|| Error::Config("p-value screening needs a permutation plan".into()))?;
            let inner = PermPlan { workers: 1, ..*plan };
            let per_feature: Vec<Result<f64>> = crate::exec::map_indexed(p, workers, |j| {
                match permutation_test(y, features.col(j), cfg.stat, &cfg.trim, &inner) {
                    Ok(res) => Ok(res.p_value),
                    Err(Error::NoAdmissibleThreshold) => Err(Error::ConstantFeature),
                    Err(e) => Err(e),
                }
            });
            let (p_values, constant) = collect_utilities(per_feature, 1.0)?;
            let utilities = p_values.iter().map(|&pv| -pv).collect();
            Ok((utilities, Some(p_values), constant))
        }
        ScreenUtility::DistCorr => {
            let cy = CenteredDistances::new(y)?;
            let per_feature: Vec<Result<f64>> = crate::exec::map_indexed(p, workers, |j| {
                let cx = CenteredDistances::new(features.col(j))?;
                if cx.dvar() == 0.0 {
                    Err(Error::ConstantFeature)
                } else {
                    Ok(cy.dcor_with(&cx).dcor)
                }
            });
            collect_utilities(per_feature, 0.0).map(|(u, c)| (u, None, c))
        }
    }
}

// Constant features get the sentinel utility and a flag; other errors abort.
fn collect_utilities(per_feature: Vec<Result<f64>>, sentinel: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut utilities = Vec::with_capacity(per_feature.len());
    let mut constant = Vec::new();
    for (j, r) in per_feature.into_iter().enumerate() {
        match r {
            Ok(u) => utilities.push(u),
            Err(Error::ConstantFeature) => {
                utilities.push(sentinel);
                constant.push(j);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((utilities, constant))
}

/// Ranks all features by the configured marginal utility and keeps the top
/// `cfg.k`.
pub fn marginal_screen(
    y: &[f64],
    features: &FeatureMatrix,
    cfg: &ScreenConfig,
    workers: usize,
) -> Result<ScreenResult> {
    if cfg.k == 0 || cfg.k > features.p() {
        return Err(Error::Config(alloc::format!(
            "k must be in 1..={}, got {}",
            features.p(),
            cfg.k
        )));
    }
    let (utilities, p_values, constant_features) = screen_utilities(y, features, cfg, workers)?;
    let order = rank_features(&utilities);
    let selected = order[..cfg.k].to_vec();
    Ok(ScreenResult { utilities, p_values, order, selected, constant_features })
}

/// Inclusion probabilities for one choice of k.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InclusionRow {
    pub k: usize,
    /// Inclusion probability of active predictors 1..4.
    pub marginal: [f64; 4],
    /// Probability that all four are kept.
    pub joint: f64,
    pub se_marginal: [f64; 4],
    pub se_joint: f64,
}

/// Replicated screening experiment over the sparse additive generator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InclusionTable {
    pub rows: Vec<InclusionRow>,
    pub reps: usize,
}

/// Repeatedly generates sparse additive data, screens, and tallies how often
/// each active predictor (and all four jointly) lands in the top k, for
/// every k in `k_list`. Each replicate derives its seed from the generator
/// seed and the replicate index.
pub fn inclusion_experiment(
    generator: &GenConfig,
    cfg: &ScreenConfig,
    k_list: &[usize],
    reps: usize,
    workers: usize,
) -> Result<InclusionTable> {
    if !matches!(generator.family, crate::datagen::Family::SparseAdditive { .. }) {
        return Err(Error::Config("inclusion experiment needs the sparse additive family".into()));
    }
    if reps == 0 {
        return Err(Error::Config("need at least one replicate".into()));
    }
    if k_list.is_empty() {
        return Err(Error::Config("need at least one k".into()));
    }

    // Per replicate, per k: inclusion of predictors 1..4 plus the joint event.
    let per_rep: Vec<Result<Vec<[bool; 5]>>> = crate::exec::map_indexed(reps, workers, |rep| {
        let rep_cfg = generator.clone().with_seed(substream_seed(generator.seed, rep as u64));
        let data = generate_sparse(&rep_cfg)?;
        let (utilities, _, _) = screen_utilities(&data.y, &data.features, cfg, 1)?;
        let order = rank_features(&utilities);
        let mut rows = Vec::with_capacity(k_list.len());
        for &k in k_list {
            if k == 0 || k > data.features.p() {
                return Err(Error::Config(alloc::format!("k = {k} out of range")));
            }
            let mut hit = [false; 5];
            for &j in &order[..k] {
                if j < 4 {
                    hit[j] = true;
                }
            }
            hit[4] = hit[0] && hit[1] && hit[2] && hit[3];
            rows.push(hit);
        }
        Ok(rows)
    });

    let mut counts = alloc::vec![[0usize; 5]; k_list.len()];
    for rep in per_rep {
        let rep = rep?;
        for (ki, hits) in rep.iter().enumerate() {
            for (c, &h) in counts[ki].iter_mut().zip(hits) {
                if h {
                    *c += 1;
                }
            }
        }
    }

    let rate = |c: usize| c as f64 / reps as f64;
    let se = |r: f64| (r * (1.0 - r) / reps as f64).sqrt();
    let rows = k_list
        .iter()
        .zip(&counts)
        .map(|(&k, c)| {
            let marginal = [rate(c[0]), rate(c[1]), rate(c[2]), rate(c[3])];
            let joint = rate(c[4]);
            InclusionRow {
                k,
                marginal,
                joint,
                se_marginal: [se(marginal[0]), se(marginal[1]), se(marginal[2]), se(marginal[3])],
                se_joint: se(joint),
            }
        })
        .collect();
    Ok(InclusionTable { rows, reps })
}
