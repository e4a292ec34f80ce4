//! Model-free association testing between an outcome and a feature.
//!
//! The central tool is the maximal permutation test: sweep every admissible
//! threshold of the feature, take the largest two-group statistic over the
//! sweep, and calibrate that maximum against its permutation distribution.
//! Around it sit the analytic corrections classically used for maximally
//! selected statistics (Miller–Siegmund, Altman, modified Bonferroni),
//! classical regression comparators, seeded data generators, a simulation
//! harness for size/power studies, and top-k marginal feature screening with
//! a distance-correlation comparator.
//!
//! The crate is `no_std`-compatible (`alloc` required). The default `std`
//! feature enables OS threading via the `parallel` feature; all parallel
//! entry points produce output that is bit-identical across worker counts.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod adjust;
pub mod datagen;
pub mod dcor;
pub mod dist;
pub mod models;
pub mod perm;
pub mod scan;
pub mod screen;
pub mod stats;
pub mod study;

mod exec;
pub mod rng;

mod error;

pub use error::{Error, Result};

pub use adjust::{altman, miller_siegmund, modified_bonferroni, unadjusted_min_p, AdjustMethod, AdjustedP};
pub use datagen::{generate, generate_sparse, Dataset, Family, FeatureMatrix, GenConfig, SparseDataset, XDist};
pub use dcor::{distance_correlation, DCorResult};
pub use models::{logistic_wald_test, ols_slope_test, sandwich_slope_test, HcKind, RegFit};
pub use perm::{draw_permutation, mw_fast_path, permutation_test, PermMode, PermPlan, PermResult};
pub use scan::{candidate_thresholds, max_scan, ScanResult, Scanner, TrimPolicy};
pub use screen::{
    inclusion_experiment, marginal_screen, InclusionRow, InclusionTable, ScreenConfig, ScreenResult,
    ScreenUtility,
};
pub use stats::{
    chi_square_2x2, mann_whitney_z, midranks, pooled_t, welch_t, Counts2x2, GroupSummary, StatKind,
};
pub use study::{power_curve, run_study, ExperimentReport, Method, ReportRow, StudyConfig};
