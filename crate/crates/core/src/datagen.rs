//! Seeded data-generating models for the simulation studies.
//!
//! Each generator is a pure function of its `GenConfig` (including the
//! seed): rerunning with the same config reproduces the dataset bit for
//! bit. Null configurations (signal coefficient 0) make the outcome
//! exchangeable and independent of the features, which is the premise of
//! every size study.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StudentT};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::rng::substream_rng;
use crate::{Error, Result};

/// Feature distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum XDist {
    Uniform { low: f64, high: f64 },
}

impl XDist {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            XDist::Uniform { low, high } => rng.random_range(low..high),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            XDist::Uniform { low, high } => (low, high),
        }
    }
}

/// Data-generating family. The signal coefficient (`GenConfig::beta1`)
/// enters each family as noted.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    /// `logit P(y=1) = beta0 + beta1 x`.
    LogisticLinear,
    /// `logit P(y=1) = beta0 + beta1 x + beta1 x^2` (the same coefficient on
    /// both terms).
    LogisticQuadratic,
    /// `y = beta0 + beta1 x + e`, `e ~ N(0, sigma^2)`.
    LinearNormal,
    /// Linear mean with `Var(y|x) = sigma^2 (1 + x)`; requires x > 0.
    Heteroscedastic,
    /// `y = beta0 + beta1 (x - 2)^2 + e`.
    QuadraticReg,
    /// `y = beta1 * sum_j pattern_j B_j(x) + e` with a cubic B-spline basis
    /// on the x support and an alternating sign pattern.
    BSplineNp,
    /// Linear mean with the Tukey contaminated error: variance 1 with
    /// probability 0.9 and 100 with probability 0.1 (times sigma^2).
    Contaminated,
    /// Linear mean with t-distributed errors.
    TErrors { df: f64 },
    /// Asymmetric Laplace errors centered so `P(y <= mu) = p`; the mean is
    /// `mu = beta0 + beta1 x` on the identity link.
    AldQuantile { p: f64 },
    /// Sparse additive model: `y = g1(x1) + g2(x2) + g3(x3) + g4(x4) + e`
    /// over `p` i.i.d. Uniform(0,1) features, the rest inert.
    SparseAdditive { p: usize, betas: [f64; 4] },
}

/// Number of interior knots of the default cubic B-spline basis.
pub const BSPLINE_INTERIOR_KNOTS: usize = 8;
/// Noise variance of the sparse additive model.
pub const SPARSE_NOISE_VARIANCE: f64 = 1.74;

/// Full specification of one dataset draw.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenConfig {
    pub family: Family,
    pub n: usize,
    pub beta0: f64,
    /// Signal coefficient; 0 gives the null model of the family.
    pub beta1: f64,
    pub sigma: f64,
    pub x_dist: XDist,
    pub seed: u64,
}

impl GenConfig {
    /// Config with the conventional defaults: `beta0 = 0`, `beta1 = 0`,
    /// `sigma = 1`, features Uniform(0,4) — Uniform(0,1) for the sparse
    /// additive family, whose component functions live on the unit
    /// interval.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        let x_dist = match family {
            Family::SparseAdditive { .. } => XDist::Uniform { low: 0.0, high: 1.0 },
            _ => XDist::Uniform { low: 0.0, high: 4.0 },
        };
        GenConfig { family, n, beta0: 0.0, beta1: 0.0, sigma: 1.0, x_dist, seed }
    }

    pub fn with_signal(mut self, beta1: f64) -> Self {
        self.beta1 = beta1;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(alloc::format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::Config(alloc::format!("sigma must be positive, got {}", self.sigma)));
        }
        let (low, high) = self.x_dist.support();
        if !(low < high) {
            return Err(Error::Config("x support must be a nonempty interval".into()));
        }
        match self.family {
            Family::Heteroscedastic if low < 0.0 => {
                Err(Error::Config("heteroscedastic family requires x > 0".into()))
            }
            Family::AldQuantile { p } if !(0.0 < p && p < 1.0) => {
                Err(Error::Config(alloc::format!("quantile level must be in (0,1), got {p}")))
            }
            Family::TErrors { df } if !(df > 0.0) => {
                Err(Error::Config(alloc::format!("t degrees of freedom must be positive, got {df}")))
            }
            Family::SparseAdditive { p, .. } if p < 4 => {
                Err(Error::Config(alloc::format!("sparse additive model needs p >= 4, got {p}")))
            }
            _ => Ok(()),
        }
    }
}

/// One generated sample: paired outcome and single feature.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

/// Column-major feature matrix; each feature is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureMatrix {
    n: usize,
    p: usize,
    cols: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        if p == 0 {
            return Err(Error::Config("feature matrix needs at least one column".into()));
        }
        let n = columns[0].len();
        for c in columns {
            if c.len() != n {
                return Err(Error::LengthMismatch(c.len(), n));
            }
        }
        let mut cols = Vec::with_capacity(n * p);
        for c in columns {
            cols.extend_from_slice(c);
        }
        Ok(FeatureMatrix { n, p, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }
}

/// Outcome paired with a feature matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseDataset {
    pub y: Vec<f64>,
    pub features: FeatureMatrix,
}

fn expit(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// Generates a univariate dataset. Errors on the sparse additive family
/// (use [`generate_sparse`]).
pub fn generate(cfg: &GenConfig) -> Result<Dataset> {
    cfg.validate()?;
    if matches!(cfg.family, Family::SparseAdditive { .. }) {
        return Err(Error::Config("sparse additive family generates a feature matrix".into()));
    }
    let mut rng = substream_rng(cfg.seed, 0);
    let x: Vec<f64> = (0..cfg.n).map(|_| cfg.x_dist.sample(&mut rng)).collect();
    let unit_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let y: Vec<f64> = match cfg.family {
        Family::LogisticLinear | Family::LogisticQuadratic => {
            let quadratic = matches!(cfg.family, Family::LogisticQuadratic);
            x.iter()
                .map(|&xi| {
                    let mut eta = cfg.beta0 + cfg.beta1 * xi;
                    if quadratic {
                        eta += cfg.beta1 * xi * xi;
                    }
                    if rng.random_bool(expit(eta)) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        Family::LinearNormal => x
            .iter()
            .map(|&xi| cfg.beta0 + cfg.beta1 * xi + cfg.sigma * unit_normal.sample(&mut rng))
            .collect(),
        Family::Heteroscedastic => x
            .iter()
            .map(|&xi| {
                let sd = cfg.sigma * (1.0 + xi).sqrt();
                cfg.beta0 + cfg.beta1 * xi + sd * unit_normal.sample(&mut rng)
            })
            .collect(),
        Family::QuadraticReg => x
            .iter()
            .map(|&xi| {
                cfg.beta0
                    + cfg.beta1 * (xi - 2.0) * (xi - 2.0)
                    + cfg.sigma * unit_normal.sample(&mut rng)
            })
            .collect(),
        Family::BSplineNp => {
            let (low, high) = cfg.x_dist.support();
            x.iter()
                .map(|&xi| {
                    let basis = cubic_bspline_basis(low, high, BSPLINE_INTERIOR_KNOTS, xi)
                        .expect("x drawn inside the knot support");
                    let f: f64 = basis
                        .iter()
                        .enumerate()
                        .map(|(j, b)| {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            cfg.beta1 * sign * b
                        })
                        .sum();
                    cfg.beta0 + f + cfg.sigma * unit_normal.sample(&mut rng)
                })
                .collect()
        }
        Family::Contaminated => x
            .iter()
            .map(|&xi| {
                let sd = if rng.random_bool(0.9) { 1.0 } else { 10.0 };
                cfg.beta0 + cfg.beta1 * xi + cfg.sigma * sd * unit_normal.sample(&mut rng)
            })
            .collect(),
        Family::TErrors { df } => {
            let t = StudentT::new(df).map_err(|_| Error::Config("bad t df".into()))?;
            x.iter()
                .map(|&xi| cfg.beta0 + cfg.beta1 * xi + cfg.sigma * t.sample(&mut rng))
                .collect()
        }
        Family::AldQuantile { p } => {
            let exp = Exp::new(1.0).expect("unit exponential");
            x.iter()
                .map(|&xi| {
                    let mu = cfg.beta0 + cfg.beta1 * xi;
                    let u: f64 = exp.sample(&mut rng);
                    let v: f64 = exp.sample(&mut rng);
                    mu + cfg.sigma * (u / p - v / (1.0 - p))
                })
                .collect()
        }
        Family::SparseAdditive { .. } => unreachable!(),
    };
    Ok(Dataset { y, x })
}

/// Component functions of the sparse additive model on the unit interval.
pub fn sparse_g(j: usize, beta: f64, x: f64) -> f64 {
    use core::f64::consts::PI;
    let s = (2.0 * PI * x).sin();
    let c = (2.0 * PI * x).cos();
    match j {
        0 => beta * x,
        1 => beta * (2.0 * x - 1.0) * (2.0 * x - 1.0),
        2 => beta * s / (2.0 - s),
        3 => beta * (0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c + 0.5 * s * s * s),
        _ => panic!("sparse additive model has four active components"),
    }
}

/// Generates the sparse additive dataset: active features 1..4, the
/// remaining `p - 4` columns inert, noise `N(0, 1.74)` scaled by `sigma`.
pub fn generate_sparse(cfg: &GenConfig) -> Result<SparseDataset> {
    cfg.validate()?;
    let Family::SparseAdditive { p, betas } = cfg.family else {
        return Err(Error::Config("generate_sparse requires the sparse additive family".into()));
    };
    let mut rng = substream_rng(cfg.seed, 0);
    let n = cfg.n;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(p);
    for _ in 0..p {
        columns.push((0..n).map(|_| cfg.x_dist.sample(&mut rng)).collect());
    }
    let noise = Normal::new(0.0, cfg.sigma * SPARSE_NOISE_VARIANCE.sqrt()).expect("noise sd");
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let mut mean = 0.0;
            for (j, &b) in betas.iter().enumerate() {
                mean += sparse_g(j, b, columns[j][i]);
            }
            mean + noise.sample(&mut rng)
        })
        .collect();
    Ok(SparseDataset { y, features: FeatureMatrix::from_columns(&columns)? })
}

/// All cubic B-spline basis functions on `[low, high]` with `interior`
/// uniformly spaced interior knots, evaluated at `x` by the Cox-de Boor
/// recursion. Returns `interior + 4` values.
pub fn cubic_bspline_basis(low: f64, high: f64, interior: usize, x: f64) -> Result<Vec<f64>> {
    const DEGREE: usize = 3;
    if !(low < high) {
        return Err(Error::Config("empty spline domain".into()));
    }
    if !(low..=high).contains(&x) {
        return Err(Error::Config(alloc::format!("x = {x} outside the knot support [{low}, {high}]")));
    }
    let n_basis = interior + DEGREE + 1;
    let mut knots = Vec::with_capacity(n_basis + DEGREE + 1);
    for _ in 0..=DEGREE {
        knots.push(low);
    }
    for k in 1..=interior {
        knots.push(low + (high - low) * k as f64 / (interior + 1) as f64);
    }
    for _ in 0..=DEGREE {
        knots.push(high);
    }
    let values = (0..n_basis).map(|i| cox_de_boor(&knots, i, DEGREE, x, high)).collect();
    Ok(values)
}

fn cox_de_boor(t: &[f64], i: usize, p: usize, x: f64, domain_hi: f64) -> f64 {
    if p == 0 {
        // Half-open intervals, closing the last one at the domain end.
        let in_interval = t[i] <= x && x < t[i + 1];
        let closes_domain = x == domain_hi && t[i] < t[i + 1] && t[i + 1] == domain_hi;
        return if in_interval || closes_domain { 1.0 } else { 0.0 };
    }
    let mut value = 0.0;
    let d1 = t[i + p] - t[i];
    if d1 > 0.0 {
        value += (x - t[i]) / d1 * cox_de_boor(t, i, p - 1, x, domain_hi);
    }
    let d2 = t[i + p + 1] - t[i + 1];
    if d2 > 0.0 {
        value += (t[i + p + 1] - x) / d2 * cox_de_boor(t, i + 1, p - 1, x, domain_hi);
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_reproduces_bitwise() {
        let cfg = GenConfig::new(Family::LinearNormal, 64, 17).with_signal(0.8);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let cfg = GenConfig::new(Family::SparseAdditive { p: 10, betas: [1.0, 1.0, 1.0, 1.0] }, 32, 5);
        assert_eq!(generate_sparse(&cfg).unwrap(), generate_sparse(&cfg).unwrap());
    }

    #[test]
    fn null_logistic_is_balanced() {
        let cfg = GenConfig::new(Family::LogisticLinear, 10_000, 11);
        let d = generate(&cfg).unwrap();
        let mean = d.y.iter().sum::<f64>() / d.y.len() as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
        assert!(d.y.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn quadratic_null_reduces_to_linear_null() {
        let quad = GenConfig::new(Family::QuadraticReg, 100, 23);
        let lin = GenConfig::new(Family::LinearNormal, 100, 23);
        assert_eq!(generate(&quad).unwrap(), generate(&lin).unwrap());
    }

    #[test]
    fn contaminated_mixture_variance() {
        // Var = 0.9 * 1 + 0.1 * 100 = 10.9.
        let cfg = GenConfig::new(Family::Contaminated, 100_000, 3);
        let d = generate(&cfg).unwrap();
        let mean = d.y.iter().sum::<f64>() / d.y.len() as f64;
        let var = d.y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (d.y.len() - 1) as f64;
        assert!((var - 10.9).abs() < 0.3, "variance {var}");
    }

    #[test]
    fn cauchy_errors_have_zero_median() {
        let cfg = GenConfig::new(Family::TErrors { df: 1.0 }, 100_001, 29);
        let mut y = generate(&cfg).unwrap().y;
        y.sort_by(f64::total_cmp);
        let median = y[y.len() / 2];
        assert!(median.abs() < 0.05, "median {median}");
    }

    #[test]
    fn ald_quantile_property() {
        // With beta = 0 the location is 0, so P(y <= 0) should equal p.
        for &p in &[0.25, 0.5, 0.75] {
            let cfg = GenConfig::new(Family::AldQuantile { p }, 100_000, 41);
            let d = generate(&cfg).unwrap();
            let frac = d.y.iter().filter(|&&v| v <= 0.0).count() as f64 / d.y.len() as f64;
            assert!((frac - p).abs() < 0.01, "p = {p}: empirical {frac}");
        }
    }

    #[test]
    fn ald_median_case_is_symmetric() {
        let cfg = GenConfig::new(Family::AldQuantile { p: 0.5 }, 100_000, 43);
        let d = generate(&cfg).unwrap();
        let n = d.y.len() as f64;
        let mean = d.y.iter().sum::<f64>() / n;
        let m2 = d.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m3 = d.y.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        assert!(skew.abs() < 0.05, "skewness {skew}");
    }

    #[test]
    fn bspline_partition_of_unity() {
        for step in 1..200 {
            let x = 0.0 + 4.0 * step as f64 / 200.0;
            let basis = cubic_bspline_basis(0.0, 4.0, BSPLINE_INTERIOR_KNOTS, x).unwrap();
            assert_eq!(basis.len(), BSPLINE_INTERIOR_KNOTS + 4);
            let total: f64 = basis.iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "sum {total} at x {x}");
            assert!(basis.iter().all(|&b| b >= 0.0));
        }
    }

    #[test]
    fn bspline_domain_error() {
        assert!(cubic_bspline_basis(0.0, 4.0, 8, 4.5).is_err());
        assert!(cubic_bspline_basis(0.0, 4.0, 8, -0.1).is_err());
    }

    #[test]
    fn bspline_endpoint_is_handled() {
        let basis = cubic_bspline_basis(0.0, 1.0, 3, 1.0).unwrap();
        let total: f64 = basis.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        // Only the last basis function survives at the right endpoint.
        assert!((basis.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_g2_values() {
        assert_eq!(sparse_g(1, 1.0, 0.5), 0.0);
        assert_eq!(sparse_g(1, 1.0, 0.0), 1.0);
        assert_eq!(sparse_g(1, 1.0, 1.0), 1.0);
    }

    #[test]
    fn sparse_null_has_inert_features() {
        let cfg = GenConfig::new(Family::SparseAdditive { p: 6, betas: [0.0; 4] }, 5_000, 7);
        let d = generate_sparse(&cfg).unwrap();
        assert_eq!(d.features.p(), 6);
        assert_eq!(d.features.n(), 5_000);
        // Pure noise: variance close to 1.74.
        let mean = d.y.iter().sum::<f64>() / d.y.len() as f64;
        let var = d.y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (d.y.len() - 1) as f64;
        assert!((var - SPARSE_NOISE_VARIANCE).abs() < 0.15, "variance {var}");
    }

    #[test]
    fn config_validation() {
        assert!(generate(&GenConfig::new(Family::LinearNormal, 1, 0)).is_err());
        assert!(generate(&GenConfig::new(Family::AldQuantile { p: 1.2 }, 10, 0)).is_err());
        let mut cfg = GenConfig::new(Family::Heteroscedastic, 10, 0);
        cfg.x_dist = XDist::Uniform { low: -1.0, high: 1.0 };
        assert!(generate(&cfg).is_err());
        assert!(generate_sparse(&GenConfig::new(
            Family::SparseAdditive { p: 3, betas: [0.0; 4] },
            10,
            0
        ))
        .is_err());
    }
}
