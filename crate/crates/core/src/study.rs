//! Size and power studies over a (generator x analysis-method) grid.
//!
//! Each replicate draws one dataset and applies every configured method to
//! it. Seed streams are keyed by (signal index, replicate index) for the
//! data and additionally by the statistic kind for the permutation tests,
//! so adding or reordering methods never changes another method's results,
//! and the whole report is reproducible from the master seed alone.

use alloc::string::String;
use alloc::vec::Vec;

use crate::adjust;
use crate::datagen::{generate, Family, GenConfig};
use crate::dist::chi2_1_sf;
use crate::models::{logistic_wald_test, ols_slope_test, sandwich_slope_test, HcKind};
use crate::perm::{permutation_test, PermMode, PermPlan, DEFAULT_PERMUTATIONS};
use crate::rng::substream_seed;
use crate::scan::{max_scan, ScanResult, TrimPolicy};
use crate::stats::StatKind;
use crate::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// One analysis method applied to each replicated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// OLS slope t-test.
    Lm,
    /// Heteroscedasticity-robust slope test.
    Sandwich { hc: HcKind },
    /// Logistic-regression Wald test (binary outcome).
    Logistic,
    /// Maximal statistic compared to the single-test reference distribution.
    Unadjusted { kind: StatKind },
    /// Miller-Siegmund correction of the maximal chi-square.
    MillerSiegmund,
    /// Altman minimum-p correction (binary outcome).
    Altman,
    /// Lausen-Schumacher improved Bonferroni (applied to the chi-square scan).
    ModifiedBonferroni,
    /// Maximal permutation test.
    Perm { kind: StatKind },
}

impl Method {
    /// Stable snake_case label for reports.
    pub fn label(&self) -> String {
        fn kind_tag(kind: StatKind) -> &'static str {
            match kind {
                StatKind::PooledT => "t",
                StatKind::WelchT => "welch",
                StatKind::MannWhitney => "mw",
                StatKind::ChiSquare => "chisq",
            }
        }
        match self {
            Method::Lm => "lm".into(),
            Method::Sandwich { hc: HcKind::Hc1 } => "sandwich_hc1".into(),
            Method::Sandwich { hc: HcKind::Hc3 } => "sandwich_hc3".into(),
            Method::Logistic => "logistic".into(),
            Method::Unadjusted { kind } => alloc::format!("unadjusted_{}", kind_tag(*kind)),
            Method::MillerSiegmund => "miller_siegmund".into(),
            Method::Altman => "altman".into(),
            Method::ModifiedBonferroni => "modified_bonferroni".into(),
            Method::Perm { kind } => alloc::format!("perm_{}", kind_tag(*kind)),
        }
    }

    fn needs_binary(&self) -> bool {
        matches!(
            self,
            Method::Logistic
                | Method::MillerSiegmund
                | Method::Altman
                | Method::ModifiedBonferroni
                | Method::Unadjusted { kind: StatKind::ChiSquare }
                | Method::Perm { kind: StatKind::ChiSquare }
        )
    }

    fn needs_continuous(&self) -> bool {
        match self {
            Method::Lm | Method::Sandwich { .. } => true,
            Method::Unadjusted { kind } | Method::Perm { kind } => {
                !matches!(kind, StatKind::ChiSquare)
            }
            _ => false,
        }
    }
}

/// Full specification of a size/power study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StudyConfig {
    /// Generator template; its `beta1` is overridden by each grid value.
    pub generator: GenConfig,
    /// Signal strengths; the 0 entry is the size (type-I error) column.
    pub beta_grid: Vec<f64>,
    pub methods: Vec<Method>,
    /// Nominal level; a method rejects when p <= alpha.
    pub alpha: f64,
    pub reps: usize,
    /// Monte Carlo permutations per permutation test.
    pub permutations: usize,
    pub master_seed: u64,
    pub trim: TrimPolicy,
    /// Replicates are the unit of parallelism.
    pub workers: usize,
}

impl StudyConfig {
    pub fn new(generator: GenConfig, methods: Vec<Method>, reps: usize, master_seed: u64) -> Self {
        StudyConfig {
            generator,
            beta_grid: alloc::vec![0.0],
            methods,
            alpha: 0.05,
            reps,
            permutations: DEFAULT_PERMUTATIONS,
            master_seed,
            trim: TrimPolicy::default(),
            workers: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::Config(alloc::format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if self.reps == 0 {
            return Err(Error::Config("need at least one replicate".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("need at least one method".into()));
        }
        if self.beta_grid.is_empty() {
            return Err(Error::Config("beta grid must be nonempty".into()));
        }
        if self.permutations == 0 {
            return Err(Error::Config("need at least one permutation".into()));
        }
        let binary = matches!(self.generator.family, Family::LogisticLinear | Family::LogisticQuadratic);
        for m in &self.methods {
            if binary && m.needs_continuous() {
                return Err(Error::Config(alloc::format!(
                    "method {} needs a continuous outcome but the generator is binary",
                    m.label()
                )));
            }
            if !binary && m.needs_binary() {
                return Err(Error::Config(alloc::format!(
                    "method {} needs a binary outcome but the generator is continuous",
                    m.label()
                )));
            }
            if matches!(m, Method::Altman)
                && !((self.trim.epsilon - 0.05).abs() < 1e-12 || (self.trim.epsilon - 0.10).abs() < 1e-12)
            {
                return Err(Error::Config(
                    "the Altman correction is tabulated for trim epsilon 0.05 or 0.10 only".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Rejection rate of one method at one signal strength.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportRow {
    pub method: Method,
    pub method_label: String,
    pub beta: f64,
    pub rejection_rate: f64,
    /// Binomial Monte Carlo standard error `sqrt(r (1-r) / reps)`.
    pub mc_se: f64,
    pub reps: usize,
    /// Replicates where the method's fit did not converge (counted as
    /// non-rejections).
    pub non_converged: usize,
}

/// Long-format study output: one row per (method, signal strength).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub alpha: f64,
}

impl ExperimentReport {
    /// Rejection rate of `method` at signal `beta`, if present.
    pub fn rate(&self, method: Method, beta: f64) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method && r.beta == beta)
    }
}

// Cached per-replicate threshold scans so the analytic corrections and the
// unadjusted tests share one sweep per statistic kind.
struct ScanCache<'a> {
    y: &'a [f64],
    x: &'a [f64],
    trim: &'a TrimPolicy,
    slots: [Option<ScanResult>; 4],
}

impl<'a> ScanCache<'a> {
    fn new(y: &'a [f64], x: &'a [f64], trim: &'a TrimPolicy) -> Self {
        ScanCache { y, x, trim, slots: [None, None, None, None] }
    }

    fn get(&mut self, kind: StatKind) -> Result<&ScanResult> {
        let slot = kind.stream_id() as usize;
        if self.slots[slot].is_none() {
            self.slots[slot] = Some(max_scan(self.y, self.x, kind, self.trim)?);
        }
        Ok(self.slots[slot].as_ref().unwrap())
    }
}

// Outcome of one method on one replicate.
struct MethodOutcome {
    reject: bool,
    non_converged: bool,
}

fn apply_method(
    method: Method,
    cache: &mut ScanCache<'_>,
    cfg: &StudyConfig,
    perm_seed_base: u64,
) -> Result<MethodOutcome> {
    let y = cache.y;
    let x = cache.x;
    let n = y.len();
    let alpha = cfg.alpha;
    let eps = cfg.trim.epsilon;
    let ok = |p: f64| Ok(MethodOutcome { reject: p <= alpha, non_converged: false });
    match method {
        Method::Lm => ok(ols_slope_test(y, x)?.p_value),
        Method::Sandwich { hc } => ok(sandwich_slope_test(y, x, hc)?.p_value),
        Method::Logistic => {
            let fit = match logistic_wald_test(y, x) {
                Ok(fit) => fit,
                Err(Error::DegenerateOutcome) => {
                    return Ok(MethodOutcome { reject: false, non_converged: true })
                }
                Err(e) => return Err(e),
            };
            Ok(MethodOutcome { reject: fit.converged && fit.p_value <= alpha, non_converged: !fit.converged })
        }
        Method::Unadjusted { kind } => {
            let scan = cache.get(kind)?;
            ok(adjust::unadjusted_min_p(scan, kind, n).p)
        }
        Method::MillerSiegmund => {
            let scan = cache.get(StatKind::ChiSquare)?;
            ok(adjust::miller_siegmund(scan.max_stat, eps, 1.0 - eps)?.p)
        }
        Method::Altman => {
            let scan = cache.get(StatKind::ChiSquare)?;
            let p_min = chi2_1_sf(scan.max_stat);
            if p_min <= 0.0 || p_min >= 1.0 {
                return ok(if p_min <= 0.0 { 0.0 } else { 1.0 });
            }
            ok(adjust::altman(p_min, eps)?.p)
        }
        Method::ModifiedBonferroni => {
            let scan = cache.get(StatKind::ChiSquare)?;
            ok(adjust::modified_bonferroni(scan, &scan.split_sizes, StatKind::ChiSquare, n).p)
        }
        Method::Perm { kind } => {
            let plan = PermPlan {
                b: cfg.permutations,
                seed: substream_seed(perm_seed_base, 1 + kind.stream_id()),
                mode: PermMode::MonteCarlo,
                exhaustive_cap: crate::perm::DEFAULT_EXHAUSTIVE_CAP,
                workers: 1,
            };
            ok(permutation_test(y, x, kind, &cfg.trim, &plan)?.p_value)
        }
    }
}

/// Runs the study: for every signal strength and replicate, generate one
/// dataset and apply each method, then aggregate rejection rates.
pub fn run_study(cfg: &StudyConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.beta_grid.len() * cfg.methods.len());
    for (beta_idx, &beta) in cfg.beta_grid.iter().enumerate() {
        let beta_seed = substream_seed(cfg.master_seed, beta_idx as u64);
        let per_rep: Vec<Result<Vec<MethodOutcome>>> =
            crate::exec::map_indexed(cfg.reps, cfg.workers, |rep| {
                let rep_seed = substream_seed(beta_seed, rep as u64);
                let gen_cfg = cfg
                    .generator
                    .clone()
                    .with_signal(beta)
                    .with_seed(substream_seed(rep_seed, 0));
                let data = generate(&gen_cfg)?;
                let mut cache = ScanCache::new(&data.y, &data.x, &cfg.trim);
                cfg.methods
                    .iter()
                    .map(|&m| apply_method(m, &mut cache, cfg, rep_seed))
                    .collect()
            });

        let mut rejections = alloc::vec![0usize; cfg.methods.len()];
        let mut non_converged = alloc::vec![0usize; cfg.methods.len()];
        for rep in per_rep {
            for (i, outcome) in rep?.into_iter().enumerate() {
                if outcome.reject {
                    rejections[i] += 1;
                }
                if outcome.non_converged {
                    non_converged[i] += 1;
                }
            }
        }
        for (i, &method) in cfg.methods.iter().enumerate() {
            let rate = rejections[i] as f64 / cfg.reps as f64;
            rows.push(ReportRow {
                method,
                method_label: method.label(),
                beta,
                rejection_rate: rate,
                mc_se: (rate * (1.0 - rate) / cfg.reps as f64).sqrt(),
                reps: cfg.reps,
                non_converged: non_converged[i],
            });
        }
    }
    Ok(ExperimentReport { rows, alpha: cfg.alpha })
}

/// Power curve over the configured signal grid; identical to [`run_study`],
/// named for the long-format export consumed by plotting tools.
pub fn power_curve(cfg: &StudyConfig) -> Result<ExperimentReport> {
    run_study(cfg)
}
