//! Monte Carlo experiments on standardized log-determinants.
//!
//! Sample `i` of an experiment is always drawn from stream `i` of the
//! configured seed, so the set of samples does not depend on how the work is
//! split. Shards only decide which thread computes which contiguous block of
//! indices; results are merged back in index order before any statistic is
//! accumulated, which makes summaries bit-identical for every shard count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cumulants::{bound_envelope, exact_cumulant};
use crate::ensembles::{matrix_kind, sample_into, RandomStream};
use crate::error::{Error, Result};
use crate::logdet::{factorize, DenseMatrix};
use crate::moments::{EnsembleSpec, Family};
use crate::specfun::{log_gamma, normal_cdf, normal_sf};
use crate::sum::CompensatedSum;
use crate::text::sig17;
use crate::tolerances::TOLERANCES;

/// How `log|det|` is centred and scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticVariant {
    /// `(L - Γ_1) / √Γ_2` with exact cumulants.
    ExactCumulant,
    /// `(L - (n/2) log n + n/2) / √((1/β) log n)`.
    NumericGaussian,
    /// `(L - ½ log (n-1)!) / √(½ log n)`.
    FactorialCentered,
    /// `(L - E L) / √Var L` with the exact mean and variance.
    ExactMoments,
    /// `√(½ log n) / √(log n) · W` with
    /// `W = (L - ½ log n! + ¼ log n) / √(½ log n)`, the scaling for Wigner
    /// matrices matched to GOE. The `1/a_n` factor of the moderate-deviation
    /// statement is applied by [`empirical_mdp_rate`].
    GoeMatchedScaling,
}

impl std::str::FromStr for StatisticVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Input(format!("unknown statistic variant `{s}`")))
    }
}

/// Affine standardization `W = (L - shift) / width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub shift: f64,
    pub width: f64,
}

impl Standardizer {
    pub fn apply(&self, log_abs_det: f64) -> f64 {
        (log_abs_det - self.shift) / self.width
    }
}

/// Exact `(Γ_1, Γ_2)` used to standardize `spec`. Four-moment Wigner
/// matrices borrow the GUE values of the same dimension.
pub fn reference_cumulants(spec: &EnsembleSpec) -> Result<(f64, f64)> {
    let reference = match spec.family {
        Family::FourMomentWigner => EnsembleSpec::new(Family::Gue, spec.n)?,
        _ => *spec,
    };
    Ok((exact_cumulant(&reference, 1)?, exact_cumulant(&reference, 2)?))
}

pub fn standardizer(spec: &EnsembleSpec, variant: StatisticVariant) -> Result<Standardizer> {
    let n = spec.n as f64;
    let needs_log = !matches!(variant, StatisticVariant::ExactCumulant | StatisticVariant::ExactMoments);
    if needs_log && spec.n < 2 {
        return Err(Error::Config(format!("{variant:?} divides by log n and needs n ≥ 2")));
    }
    let log_n = n.ln();
    Ok(match variant {
        StatisticVariant::ExactCumulant | StatisticVariant::ExactMoments => {
            let (mean, variance) = reference_cumulants(spec)?;
            Standardizer { shift: mean, width: variance.sqrt() }
        }
        StatisticVariant::NumericGaussian => Standardizer {
            shift: 0.5 * n * log_n - 0.5 * n,
            width: (log_n / f64::from(spec.beta())).sqrt(),
        },
        StatisticVariant::FactorialCentered => Standardizer {
            shift: 0.5 * log_gamma(n)?,
            width: (0.5 * log_n).sqrt(),
        },
        StatisticVariant::GoeMatchedScaling => {
            let base = (0.5 * log_n).sqrt();
            let factor = base / log_n.sqrt();
            Standardizer {
                shift: 0.5 * log_gamma(n + 1.0)? - 0.25 * log_n,
                width: base / factor,
            }
        }
    })
}

/// Moderate-deviation window `W / a_n ∈ [b, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdpWindow {
    pub a_n: f64,
    pub b: f64,
    pub c: f64,
}

/// Experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Optional; must agree with the family when present.
    #[serde(default)]
    pub beta: Option<u32>,
    pub n: usize,
    pub variant: StatisticVariant,
    /// Sample count; defaults to [`default_sample_count`].
    #[serde(default)]
    pub m: Option<usize>,
    pub seed: u64,
    #[serde(default = "one")]
    pub shards: usize,
    #[serde(default = "default_x_grid")]
    pub x_grid: Vec<f64>,
    #[serde(default)]
    pub mdp: Option<MdpWindow>,
}

fn one() -> usize {
    1
}

/// `0, 0.25, ..., 2`.
pub fn default_x_grid() -> Vec<f64> {
    (0..=8).map(|k| 0.25 * k as f64).collect()
}

/// Largest sample count with `n³·m ≤ 4·10¹⁰`, but at least 1000.
pub fn default_sample_count(n: usize) -> usize {
    let cube = (n as f64).powi(3);
    ((4e10 / cube).floor() as usize).clamp(1000, 1_000_000)
}

/// Smallest sample count accepted for distributional statistics.
pub const MIN_SAMPLES: usize = 1000;

impl ExperimentConfig {
    pub fn new(family: Family, n: usize, variant: StatisticVariant, m: usize, seed: u64) -> Self {
        ExperimentConfig {
            family,
            beta: None,
            n,
            variant,
            m: Some(m),
            seed,
            shards: 1,
            x_grid: default_x_grid(),
            mdp: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn spec(&self) -> Result<EnsembleSpec> {
        let spec = match self.beta {
            Some(beta) => EnsembleSpec::with_beta(self.family, self.n, beta),
            None => EnsembleSpec::new(self.family, self.n),
        };
        spec.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn sample_count(&self) -> usize {
        self.m.unwrap_or_else(|| default_sample_count(self.n))
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.spec()?;
        matrix_kind(spec.family).map_err(|e| Error::Config(e.to_string()))?;
        if self.sample_count() < MIN_SAMPLES {
            return Err(Error::Config(format!("m must be at least {MIN_SAMPLES}")));
        }
        if self.shards == 0 {
            return Err(Error::Config("shards must be positive".into()));
        }
        if self.x_grid.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Config("x_grid values must be finite and nonnegative".into()));
        }
        if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("x_grid must be strictly increasing".into()));
        }
        if let Some(w) = self.mdp {
            check_mdp_window(w.a_n, w.b, w.c, false).map_err(|e| Error::Config(e.to_string()))?;
        }
        standardizer(&spec, self.variant).map_err(|e| match e {
            Error::NoClosedForm(f) => Error::Config(format!("{:?} needs exact cumulants, unavailable for {f}", self.variant)),
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        })?;
        Ok(())
    }
}

/// One row of the tail-ratio table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub x: f64,
    /// `P̂(W ≥ x) / (1 - Φ(x))`.
    pub upper_ratio: f64,
    /// `P̂(W ≤ -x) / Φ(-x)`.
    pub lower_ratio: f64,
    pub upper_count: u64,
    pub lower_count: u64,
    /// Wilson-interval half-widths on the ratio scale.
    pub upper_half_width: f64,
    pub lower_half_width: f64,
    /// Envelope bound on `|log ratio|`, where defined.
    pub cramer_envelope: Option<f64>,
    /// Fewer than 50 samples expected in the Gaussian tail.
    pub low_count: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdpRate {
    pub a_n: f64,
    pub b: f64,
    pub c: f64,
    pub count: u64,
    /// `-log P̂(W/a_n ∈ [b, c]) / a_n²`; infinite when the window is empty.
    pub rate: f64,
    /// `inf_{x ∈ [b, c]} x²/2`.
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub family: Family,
    pub n: usize,
    pub variant: StatisticVariant,
    pub m: usize,
    pub seed: u64,
    pub standardizer: Standardizer,
    /// Reference `(Γ_1, Γ_2)` when exact cumulants exist.
    pub reference_cumulants: Option<(f64, f64)>,
    /// Moments of the raw `log|det|` values.
    pub raw_mean: f64,
    pub raw_var: f64,
    pub raw_fourth_central: f64,
    /// Moments of the standardized values.
    pub sample_mean: f64,
    pub sample_var: f64,
    pub ks_distance: f64,
    pub tail_ratio_rows: Vec<TailRow>,
    pub mdp_rate: Option<MdpRate>,
    pub singular_count: usize,
}

impl ExperimentSummary {
    /// Standard error of `raw_mean`.
    pub fn raw_mean_standard_error(&self) -> f64 {
        (self.raw_var / self.used() as f64).sqrt()
    }

    /// Standard error of `raw_var`, from the fourth central moment.
    pub fn raw_var_standard_error(&self) -> f64 {
        ((self.raw_fourth_central - self.raw_var * self.raw_var).max(0.0) / self.used() as f64).sqrt()
    }

    fn used(&self) -> usize {
        self.m - self.singular_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub shard: usize,
    /// `-∞` for an exactly singular sample.
    pub log_abs_det: f64,
    pub standardized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub summary: ExperimentSummary,
    /// All samples in index order.
    pub samples: Vec<SampleRecord>,
}

/// `log|det|` of samples `range` of `spec`, each from its own stream.
pub fn sample_log_dets(spec: &EnsembleSpec, seed: u64, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
    let mut matrix = DenseMatrix::zeros(spec.n, matrix_kind(spec.family)?);
    range
        .map(|i| {
            let mut rng = RandomStream::new(seed, i as u64).generator();
            sample_into(spec.family, &mut rng, &mut matrix)?;
            Ok(factorize(&mut matrix)?.log_abs)
        })
        .collect()
}

/// Samples, standardizes and summarizes.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let spec = config.spec()?;
    let m = config.sample_count();
    let shards = config.shards.min(m);
    let bounds: Vec<usize> = (0..=shards).map(|s| s * m / shards).collect();

    let blocks: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|s| {
                let range = bounds[s]..bounds[s + 1];
                scope.spawn(move || sample_log_dets(&spec, config.seed, range))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });

    let standardize = standardizer(&spec, config.variant)?;
    let mut samples = Vec::with_capacity(m);
    for (shard, block) in blocks.into_iter().enumerate() {
        for (offset, log_abs_det) in block?.into_iter().enumerate() {
            samples.push(SampleRecord {
                index: bounds[shard] + offset,
                shard,
                log_abs_det,
                standardized: standardize.apply(log_abs_det),
            });
        }
    }
    let summary = summarize(config, &spec, standardize, &samples)?;
    Ok(Experiment { summary, samples })
}

fn summarize(
    config: &ExperimentConfig,
    spec: &EnsembleSpec,
    standardize: Standardizer,
    samples: &[SampleRecord],
) -> Result<ExperimentSummary> {
    let finite: Vec<&SampleRecord> = samples.iter().filter(|s| s.log_abs_det.is_finite()).collect();
    let singular_count = samples.len() - finite.len();
    if finite.len() < 2 {
        return Err(Error::Domain("fewer than two nonsingular samples".into()));
    }
    let raw: Vec<f64> = finite.iter().map(|s| s.log_abs_det).collect();
    let (raw_mean, raw_var, raw_fourth_central) = moments(&raw);
    let mut standardized: Vec<f64> = finite.iter().map(|s| s.standardized).collect();
    let (sample_mean, sample_var, _) = moments(&standardized);
    standardized.sort_by(f64::total_cmp);

    let reference_cumulants = reference_cumulants(spec).ok();
    let tail_ratio_rows = tail_ratios(&standardized, &config.x_grid, reference_cumulants.map(|(_, v)| v.sqrt()));
    let mdp_rate = match config.mdp {
        Some(w) => Some(empirical_mdp_rate(&standardized, w.a_n, w.b, w.c, false)?),
        None => None,
    };
    Ok(ExperimentSummary {
        family: spec.family,
        n: spec.n,
        variant: config.variant,
        m: samples.len(),
        seed: config.seed,
        standardizer: standardize,
        reference_cumulants,
        raw_mean,
        raw_var,
        raw_fourth_central,
        sample_mean,
        sample_var,
        ks_distance: ks_statistic(&standardized)?,
        tail_ratio_rows,
        mdp_rate,
        singular_count,
    })
}

/// Mean, unbiased variance and fourth central moment.
fn moments(values: &[f64]) -> (f64, f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / m;
    let mut second = CompensatedSum::new();
    let mut fourth = CompensatedSum::new();
    for v in values {
        let d = (v - mean) * (v - mean);
        second.add(d);
        fourth.add(d * d);
    }
    (mean, second.value() / (m - 1.0), fourth.value() / m)
}

/// Kolmogorov distance between the empirical law of sorted `samples` and `Φ`.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Contract("Kolmogorov distance needs at least two samples".into()));
    }
    if samples.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Contract("samples must be sorted".into()));
    }
    let m = samples.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = normal_cdf(x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        worst = worst.max(above.abs()).max(below.abs());
    }
    Ok(worst.min(1.0))
}

/// Wilson score interval `(low, high)` for `count` successes in `m` trials.
pub fn wilson_interval(count: u64, m: u64, z: f64) -> (f64, f64) {
    let m = m as f64;
    let p = count as f64 / m;
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = z * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt() / denom;
    (center - half, center + half)
}

/// Empirical tail probabilities over the Gaussian ones on `x_grid`.
///
/// `sigma`, when given, attaches the envelope bound at each `x` where it is
/// defined.
pub fn tail_ratios(sorted: &[f64], x_grid: &[f64], sigma: Option<f64>) -> Vec<TailRow> {
    let m = sorted.len() as u64;
    let envelope = sigma.and_then(|s| bound_envelope(s).ok());
    let z = TOLERANCES.wilson_z;
    x_grid
        .iter()
        .map(|&x| {
            let upper_count = (sorted.len() - sorted.partition_point(|&w| w < x)) as u64;
            let lower_count = sorted.partition_point(|&w| w <= -x) as u64;
            let upper_tail = normal_sf(x);
            let lower_tail = normal_cdf(-x);
            let ratio_half_width = |count, tail: f64| {
                let (lo, hi) = wilson_interval(count, m, z);
                0.5 * (hi - lo) / tail
            };
            TailRow {
                x,
                upper_ratio: upper_count as f64 / m as f64 / upper_tail,
                lower_ratio: lower_count as f64 / m as f64 / lower_tail,
                upper_count,
                lower_count,
                upper_half_width: ratio_half_width(upper_count, upper_tail),
                lower_half_width: ratio_half_width(lower_count, lower_tail),
                cramer_envelope: envelope.and_then(|e| e.cramer_envelope(x).ok()),
                low_count: (m as f64) * upper_tail < 50.0,
            }
        })
        .collect()
}

fn check_mdp_window(a_n: f64, b: f64, c: f64, allow_zero: bool) -> Result<()> {
    if !(a_n > 1.0) || !a_n.is_finite() {
        return Err(Error::Input(format!("a_n must exceed 1, got {a_n}")));
    }
    if !(b < c) {
        return Err(Error::Input(format!("need b < c, got [{b}, {c}]")));
    }
    if b <= 0.0 && c >= 0.0 && !allow_zero {
        return Err(Error::Input(format!("window [{b}, {c}] contains 0")));
    }
    Ok(())
}

/// `-log P̂(W/a_n ∈ [b, c]) / a_n²` against `inf_{x∈[b,c]} x²/2`.
///
/// Windows containing 0 are rejected unless `allow_zero` is set.
pub fn empirical_mdp_rate(sorted: &[f64], a_n: f64, b: f64, c: f64, allow_zero: bool) -> Result<MdpRate> {
    check_mdp_window(a_n, b, c, allow_zero)?;
    if sorted.is_empty() {
        return Err(Error::Input("no samples".into()));
    }
    let lo = sorted.partition_point(|&w| w / a_n < b);
    let hi = sorted.partition_point(|&w| w / a_n <= c);
    let count = (hi - lo) as u64;
    let rate = if count == 0 {
        f64::INFINITY
    } else {
        -(count as f64 / sorted.len() as f64).ln() / (a_n * a_n)
    };
    let nearest = if b <= 0.0 && c >= 0.0 { 0.0 } else { b.abs().min(c.abs()) };
    Ok(MdpRate { a_n, b, c, count, rate, target: 0.5 * nearest * nearest })
}

/// `samples.csv` contents.
pub fn samples_csv(samples: &[SampleRecord]) -> String {
    let mut out = String::from("index,shard,log_abs_det,standardized\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{}", s.index, s.shard, sig17(s.log_abs_det), sig17(s.standardized));
    }
    out
}

/// Writes `summary.json` and `samples.csv` into `dir`.
pub fn write_outputs(experiment: &Experiment, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(&experiment.summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    fs::write(dir.join("samples.csv"), samples_csv(&experiment.samples))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::normal_quantile;

    fn normal_samples(m: usize, seed: u64) -> Vec<f64> {
        let mut g = RandomStream::new(seed, 0).generator();
        let mut v: Vec<f64> = (0..m).map(|_| g.standard_normal()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn ks_reference_cases() {
        let m = 1000;
        let placed: Vec<f64> = (1..=m).map(|i| normal_quantile((i as f64 - 0.5) / m as f64)).collect();
        assert!((ks_statistic(&placed).unwrap() - 0.5 / m as f64).abs() < 1e-12);
        assert_eq!(ks_statistic(&[0.0; 10]).unwrap(), 0.5);
        assert!(matches!(ks_statistic(&[1.0, 0.0]), Err(Error::Contract(_))));
        assert!(ks_statistic(&normal_samples(100_000, 3)).unwrap() < 0.01);
    }

    #[test]
    fn tail_ratios_on_normal_samples() {
        let samples = normal_samples(100_000, 4);
        let rows = tail_ratios(&samples, &default_x_grid(), None);
        assert!((rows[0].upper_ratio - 2.0 * rows[0].upper_count as f64 / 100_000.0).abs() < 1e-15);
        for r in rows {
            assert!(r.upper_ratio.ln().abs() < 3.0 * r.upper_half_width, "{r:?}");
            assert!(r.lower_ratio.ln().abs() < 3.0 * r.lower_half_width, "{r:?}");
        }
    }

    #[test]
    fn mdp_rate_on_normal_samples() {
        let samples = normal_samples(1_000_000, 5);
        let r = empirical_mdp_rate(&samples, 2.0, 1.0, 2.0, false).unwrap();
        let truth = -(normal_cdf(4.0) - normal_cdf(2.0)).ln() / 4.0;
        assert!((r.rate - truth).abs() < TOLERANCES.mdp_normal);
        assert_eq!(r.target, 0.5);
        assert!(empirical_mdp_rate(&samples, 2.0, -1.0, 1.0, false).is_err());
        assert_eq!(empirical_mdp_rate(&samples, 2.0, -1.0, 1.0, true).unwrap().target, 0.0);
        assert!(empirical_mdp_rate(&samples, 2.0, 50.0, 60.0, false).unwrap().rate.is_infinite());
    }

    #[test]
    fn exact_standardization_is_affine() {
        let spec = EnsembleSpec::new(Family::Gue, 12).unwrap();
        let s = standardizer(&spec, StatisticVariant::ExactCumulant).unwrap();
        let mean = exact_cumulant(&spec, 1).unwrap();
        assert_eq!(s.apply(mean), 0.0);
        let literal = standardizer(&spec, StatisticVariant::GoeMatchedScaling).unwrap();
        assert!((literal.width - 12f64.ln().sqrt()).abs() < 1e-14);
    }

    #[test]
    fn variant_slopes_approach_one() {
        // slope of NumericGaussian as a function of ExactCumulant
        let slope = |n| {
            let spec = EnsembleSpec::new(Family::Gue, n).unwrap();
            let exact = standardizer(&spec, StatisticVariant::ExactCumulant).unwrap();
            let numeric = standardizer(&spec, StatisticVariant::NumericGaussian).unwrap();
            exact.width / numeric.width
        };
        let (s64, s256, s65536) = (slope(64), slope(256), slope(65536));
        assert!(s64 > s256 && s256 > s65536 && s65536 > 1.0);
    }

    #[test]
    #[ignore = "the slope is 1.24 at n = 64 and 1.19 at n = 256; [0.9, 1.1] is only reached beyond n ≈ 5·10^4"]
    fn variant_slopes_within_ten_percent() {
        for n in [64usize, 256] {
            let spec = EnsembleSpec::new(Family::Gue, n).unwrap();
            let exact = standardizer(&spec, StatisticVariant::ExactCumulant).unwrap();
            let numeric = standardizer(&spec, StatisticVariant::NumericGaussian).unwrap();
            let slope = exact.width / numeric.width;
            assert!((0.9..=1.1).contains(&slope), "n={n}: {slope}");
        }
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(Family::Gue, 4, StatisticVariant::ExactCumulant, 1000, 1);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.m = Some(10);
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let mut bad = ok.clone();
        bad.x_grid = vec![0.0, 1.0, 0.5];
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.beta = Some(1);
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.family = Family::GinibreQuaternion;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.mdp = Some(MdpWindow { a_n: 2.0, b: -1.0, c: 1.0 });
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.n = 1;
        bad.variant = StatisticVariant::NumericGaussian;
        assert!(bad.validate().is_err());

        let parsed = ExperimentConfig::from_json(
            r#"{"family":"goe","beta":1,"n":5,"variant":"exact_moments","m":2000,"seed":7,"shards":4,
                "x_grid":[0,0.5,1],"mdp":{"a_n":2,"b":1,"c":2}}"#,
        )
        .unwrap();
        assert_eq!(parsed.shards, 4);
        assert!(ExperimentConfig::from_json(r#"{"family":"goe","n":5,"variant":"x","seed":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"family":"gue","n":5,"variant":"exact_moments","seed":1,"extra":1}"#).is_err());
        assert_eq!(default_sample_count(256), 2384);
    }

    #[test]
    fn shard_count_does_not_change_results() {
        let mut config = ExperimentConfig::new(Family::Gue, 6, StatisticVariant::ExactCumulant, 1000, 99);
        config.mdp = Some(MdpWindow { a_n: 1.5, b: 0.5, c: 2.0 });
        let base = run_experiment(&config).unwrap();
        for shards in [4, 16] {
            config.shards = shards;
            let other = run_experiment(&config).unwrap();
            assert_eq!(
                serde_json::to_string(&base.summary).unwrap(),
                serde_json::to_string(&other.summary).unwrap()
            );
            assert!(other.samples.iter().zip(&base.samples).all(|(a, b)| a.log_abs_det.to_bits() == b.log_abs_det.to_bits()));
        }
    }

    #[test]
    fn unit_dimension_moments() {
        let config = ExperimentConfig::new(Family::Gue, 1, StatisticVariant::ExactCumulant, 200_000, 11);
        let s = run_experiment(&config).unwrap().summary;
        let m = s.m as f64;
        assert!(s.sample_mean.abs() < 4.0 / m.sqrt(), "{}", s.sample_mean);
        // Var log|X| has excess kurtosis; use the measured fourth moment
        let se = s.raw_var_standard_error() / s.reference_cumulants.unwrap().1;
        assert!((s.sample_var - 1.0).abs() < 4.0 * se, "{}", s.sample_var);
    }

    #[test]
    fn smoke_and_outputs() {
        let mut config = ExperimentConfig::new(Family::FourMomentWigner, 8, StatisticVariant::ExactCumulant, 1000, 3);
        config.shards = 3;
        let e = run_experiment(&config).unwrap();
        assert_eq!(e.samples.len(), 1000);
        assert!((0.0..=1.0).contains(&e.summary.ks_distance));
        let dir = std::env::temp_dir().join(format!("rmtdet-harness-{}", std::process::id()));
        write_outputs(&e, &dir).unwrap();
        let csv = fs::read_to_string(dir.join("samples.csv")).unwrap();
        assert!(csv.starts_with("index,shard,log_abs_det,standardized\n"));
        assert_eq!(csv.lines().count(), 1001);
        let summary: ExperimentSummary =
            serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary, e.summary);
        fs::remove_dir_all(dir).unwrap();
    }
}
