//! The verification suite: fourteen numbered criteria combining exact-formula
//! checks with desk-scale Monte Carlo.
//!
//! Every Monte Carlo criterion uses a seed fixed in this file, so a run is
//! reproducible bit for bit. Two tiers exist: [`Tier::Full`] uses the sample
//! sizes the criteria are stated for, [`Tier::Quick`] keeps the exact checks
//! and shrinks the Monte Carlo runs to finish in a few minutes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use crate::cumulants::{
    exact_cumulant, factorial_bound_ratio, finite_difference_cumulant, goe_variance_catalan_form,
};
use crate::ensembles::{moment_match_report, moments_match, AtomDistribution, MomentTarget, RandomStream};
use crate::error::Result;
use crate::harness::{
    empirical_mdp_rate, run_experiment, ExperimentConfig, ExperimentSummary, MdpWindow, StatisticVariant,
};
use crate::moments::{log_mgf_closed, log_mgf_quadrature, EnsembleSpec, Family};
use crate::specfun::{normal_cdf, polygamma, CATALAN, EULER_GAMMA};
use crate::tolerances::TOLERANCES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Quick,
    Full,
}

/// Criteria that fail for reasons unrelated to the implementation, with the
/// reason. They are still run and reported as failures.
pub const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[
    (5, "the Catalan-constant target is 0.887 above the exact limit of the GOE variance"),
    (11, "the skewness of log|det| at n = 64 moves tail ratios by more than 3 Wilson half-widths"),
    (13, "at a_n = 2 even exact normal samples give rate 0.95 on [1, 2], not 0.5"),
];

pub fn known_unattainable(id: u8) -> Option<&'static str> {
    KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id).map(|(_, why)| *why)
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "closed-form MGF matches quadrature"),
    (2, "exact cumulants match contour derivatives"),
    (3, "known 1x1 cumulants"),
    (4, "GUE variance asymptotic"),
    (5, "GOE variance asymptotic (Catalan form)"),
    (6, "real Ginibre variance asymptotic"),
    (7, "factorial cumulant bound"),
    (8, "special-function identities"),
    (9, "sampler moments match exact cumulants"),
    (10, "Kolmogorov distance trend"),
    (11, "tail ratios near 1"),
    (12, "four-moment Wigner universality"),
    (13, "moderate-deviation rate direction"),
    (14, "shard-count determinism"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    /// Failed and not listed in [`KNOWN_UNATTAINABLE`].
    pub fn is_unexpected_failure(&self) -> bool {
        !self.passed && known_unattainable(self.id).is_none()
    }

    pub fn line(&self) -> String {
        let status = match (self.passed, known_unattainable(self.id)) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known)",
            (false, None) => "FAIL",
        };
        format!(
            "criterion {:>2}  {:<12}  {}: {} [{:.1} s]",
            self.id, status, self.title, self.detail, self.seconds
        )
    }
}

struct Sizes {
    moments_m: usize,
    ks_dims: [usize; 3],
    ks_m: usize,
    tail_m: usize,
    normal_m: usize,
}

impl Sizes {
    fn of(tier: Tier) -> Self {
        match tier {
            Tier::Full => Sizes { moments_m: 100_000, ks_dims: [16, 64, 256], ks_m: 100_000, tail_m: 200_000, normal_m: 1_000_000 },
            Tier::Quick => Sizes { moments_m: 10_000, ks_dims: [16, 32, 64], ks_m: 20_000, tail_m: 20_000, normal_m: 100_000 },
        }
    }
}

const MOMENT_CASES: [(Family, usize); 3] = [(Family::Gue, 50), (Family::Goe, 20), (Family::GinibreReal, 100)];

fn seed(id: u8, n: usize) -> u64 {
    0x5eed_0000 + 1000 * u64::from(id) + n as u64
}

/// Runs criteria and caches the Monte Carlo experiments they share.
pub struct Suite {
    tier: Tier,
    sizes: Sizes,
    threads: usize,
    cache: HashMap<(Family, usize, usize, u64, usize), ExperimentSummary>,
}

impl Suite {
    pub fn new(tier: Tier) -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |p| p.get());
        Suite { tier, sizes: Sizes::of(tier), threads, cache: HashMap::new() }
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    /// Runs every criterion in order, handing each outcome to `report` as
    /// soon as it is known.
    pub fn run_all(&mut self, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
        CRITERIA
            .iter()
            .map(|&(id, _)| {
                let outcome = self.run(id);
                report(&outcome);
                outcome
            })
            .collect()
    }

    pub fn run(&mut self, id: u8) -> Outcome {
        let title = CRITERIA.iter().find(|(k, _)| *k == id).map_or("unknown criterion", |(_, t)| *t);
        let start = Instant::now();
        let result = match id {
            1 => closed_vs_quadrature(),
            2 => cross_oracle(),
            3 => known_values(),
            4 => gue_variance(),
            5 => goe_variance(),
            6 => ginibre_variance(),
            7 => factorial_bound(),
            8 => identities(),
            9 => self.sampler_moments(),
            10 => self.ks_trend(),
            11 => self.tail_ratios(),
            12 => self.universality(),
            13 => self.mdp_direction(),
            14 => self.determinism(),
            _ => Ok((false, format!("no criterion {id}"))),
        };
        let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
    }

    fn experiment(&mut self, family: Family, n: usize, m: usize, seed: u64, shards: usize) -> Result<ExperimentSummary> {
        let key = (family, n, m, seed, shards);
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let mut config = ExperimentConfig::new(family, n, StatisticVariant::ExactCumulant, m, seed);
        config.shards = shards;
        config.mdp = Some(MDP_WINDOW);
        let summary = run_experiment(&config)?.summary;
        self.cache.insert(key, summary.clone());
        Ok(summary)
    }

    fn sampler_moments(&mut self) -> Result<(bool, String)> {
        let mut passed = true;
        let mut parts = Vec::new();
        for (family, n) in MOMENT_CASES {
            let s = self.experiment(family, n, self.sizes.moments_m, seed(9, n), 1)?;
            let (g1, g2) = s.reference_cumulants.expect("closed-form family");
            let z_mean = (s.raw_mean - g1) / s.raw_mean_standard_error();
            let z_var = (s.raw_var - g2) / s.raw_var_standard_error();
            let limit = TOLERANCES.monte_carlo_standard_errors;
            passed &= z_mean.abs() <= limit && z_var.abs() <= limit;
            parts.push(format!("{} n={n}: z_mean {z_mean:+.2}, z_var {z_var:+.2}", family.name()));
        }
        Ok((passed, parts.join("; ")))
    }

    fn ks_trend(&mut self) -> Result<(bool, String)> {
        let dims = self.sizes.ks_dims;
        let mut ks = [0.0; 3];
        for (k, &n) in dims.iter().enumerate() {
            ks[k] = self.experiment(Family::Gue, n, self.sizes.ks_m, seed(10, n), self.threads)?.ks_distance;
        }
        let scaled: Vec<f64> = dims.iter().zip(ks).map(|(&n, d)| d * (n as f64).ln().sqrt()).collect();
        let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let monotone = ks[0] >= ks[1] && ks[1] >= ks[2];
        let ceiling = ks[2] <= TOLERANCES.ks_ceiling_n256;
        Ok((
            monotone && ceiling && spread < 2.0,
            format!(
                "KS at n={:?}: {:.4}, {:.4}, {:.4}; KS·√log n spread {spread:.2}",
                dims, ks[0], ks[1], ks[2]
            ),
        ))
    }

    fn tail_run(&mut self) -> Result<ExperimentSummary> {
        self.experiment(Family::Gue, 64, self.sizes.tail_m, seed(11, 64), self.threads)
    }

    fn tail_ratios(&mut self) -> Result<(bool, String)> {
        let s = self.tail_run()?;
        let mut passed = true;
        let mut parts = Vec::new();
        for x in [0.5, 1.0, 1.5] {
            let row = s.tail_ratio_rows.iter().find(|r| r.x == x).expect("x on the default grid");
            for (side, ratio, hw) in [("upper", row.upper_ratio, row.upper_half_width), ("lower", row.lower_ratio, row.lower_half_width)] {
                let in_window = (TOLERANCES.tail_ratio_low..=TOLERANCES.tail_ratio_high).contains(&ratio);
                let widths = (ratio - 1.0).abs() / hw;
                passed &= in_window && widths <= TOLERANCES.tail_ratio_half_widths;
                parts.push(format!("x={x} {side} {ratio:.3} ({widths:.1} hw)"));
            }
        }
        Ok((passed, parts.join(", ")))
    }

    fn universality(&mut self) -> Result<(bool, String)> {
        let matched = moments_match(&moment_match_report(&AtomDistribution::wigner_diagonal(), MomentTarget::RealStdNormal))
            && moments_match(&moment_match_report(&AtomDistribution::wigner_off_diagonal(), MomentTarget::ReComplexNormal));
        let n = self.sizes.ks_dims[2];
        let m = self.sizes.ks_m;
        let gue = self.experiment(Family::Gue, n, m, seed(10, n), self.threads)?;
        let wigner = self.experiment(Family::FourMomentWigner, n, m, seed(12, n), self.threads)?;
        let ratio = wigner.ks_distance / gue.ks_distance;
        Ok((
            matched && (0.5..=2.0).contains(&ratio),
            format!(
                "moments match: {matched}; KS Wigner {:.4} vs GUE {:.4} at n={n} (ratio {ratio:.2}, {} singular)",
                wigner.ks_distance, gue.ks_distance, wigner.singular_count
            ),
        ))
    }

    fn mdp_direction(&mut self) -> Result<(bool, String)> {
        let MdpWindow { a_n, b, c } = MDP_WINDOW;
        let mut g = RandomStream::new(seed(13, 0), 0).generator();
        let mut normal: Vec<f64> = (0..self.sizes.normal_m).map(|_| g.standard_normal()).collect();
        normal.sort_by(f64::total_cmp);
        let calibration = empirical_mdp_rate(&normal, a_n, b, c, false)?;
        let truth = -(normal_cdf(c * a_n) - normal_cdf(b * a_n)).ln() / (a_n * a_n);
        let normal_ok = (calibration.rate - truth).abs() <= TOLERANCES.mdp_normal;
        let gue = self.tail_run()?.mdp_rate.expect("window configured");
        let gue_ok = gue.rate.is_finite() && (gue.rate - gue.target).abs() <= TOLERANCES.mdp_gue;
        Ok((
            normal_ok && gue_ok,
            format!(
                "normal rate {:.3} vs {truth:.3}; GUE n=64 rate {:.3} vs target {}",
                calibration.rate, gue.rate, gue.target
            ),
        ))
    }

    fn determinism(&mut self) -> Result<(bool, String)> {
        let mut identical = true;
        for (family, n) in MOMENT_CASES {
            let m = self.sizes.moments_m;
            let base = serde_json::to_string(&self.experiment(family, n, m, seed(9, n), 1)?)?;
            for shards in [4, 16] {
                let other = serde_json::to_string(&self.experiment(family, n, m, seed(9, n), shards)?)?;
                identical &= other == base;
            }
        }
        Ok((identical, format!("summaries identical across 1, 4, 16 shards: {identical}")))
    }
}

const MDP_WINDOW: MdpWindow = MdpWindow { a_n: 2.0, b: 1.0, c: 2.0 };

fn closed_vs_quadrature() -> Result<(bool, String)> {
    let families = [Family::Gue, Family::Goe, Family::GinibreReal, Family::GinibreComplex];
    let mut worst: f64 = 0.0;
    for family in families {
        for n in 1..=3 {
            let spec = EnsembleSpec::new(family, n)?;
            for s in [0.0, 0.5, 1.0, 2.0] {
                worst = worst.max((log_mgf_closed(&spec, s)? - log_mgf_quadrature(&spec, s)?).abs());
            }
        }
    }
    Ok((worst <= TOLERANCES.closed_vs_quadrature, format!("max |Δ log M| = {worst:.2e} over 48 cases")))
}

fn cross_oracle() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for family in Family::ALL.into_iter().filter(|f| f.has_closed_form()) {
        for n in [1, 2, 3, 10, 50, 200] {
            let spec = EnsembleSpec::new(family, n)?;
            for j in 1..=6 {
                let diff = exact_cumulant(&spec, j)? - finite_difference_cumulant(&spec, j)?.value;
                worst = worst.max(diff.abs());
            }
        }
    }
    Ok((worst <= TOLERANCES.cumulant_cross_oracle, format!("max |Δ Γ_j| = {worst:.2e}")))
}

fn known_values() -> Result<(bool, String)> {
    let spec = EnsembleSpec::new(Family::Gue, 1)?;
    let d1 = exact_cumulant(&spec, 1)? + 0.5 * (EULER_GAMMA + 2f64.ln());
    let d2 = exact_cumulant(&spec, 2)? - PI * PI / 8.0;
    let tol = TOLERANCES.known_values;
    Ok((d1.abs() <= tol && d2.abs() <= tol, format!("errors {d1:.1e}, {d2:.1e}")))
}

/// `|Γ_2(n) - target(n)|` along `n = 10·2^k + offset`, `k = 0..10`.
fn variance_gaps(family: Family, offset: usize, target: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    (0..=10)
        .map(|k| {
            let n = (10 << k) + offset;
            Ok((exact_cumulant(&EnsembleSpec::new(family, n)?, 2)? - target(n)).abs())
        })
        .collect()
}

fn shrinking_to_tolerance(gaps: &[f64]) -> bool {
    gaps.windows(2).all(|w| w[1] < w[0]) && gaps[gaps.len() - 1] <= TOLERANCES.variance_asymptotic
}

fn gue_variance() -> Result<(bool, String)> {
    let target = |n: usize| 0.5 * ((2 * (n / 2)) as f64).ln() + 0.5 * (EULER_GAMMA + 2f64.ln() + 1.0);
    let gaps = variance_gaps(Family::Gue, 0, target)?;
    Ok((shrinking_to_tolerance(&gaps), format!("gap {:.2e} at n=10, {:.2e} at n=10240", gaps[0], gaps[10])))
}

fn goe_variance() -> Result<(bool, String)> {
    let even = variance_gaps(Family::Goe, 0, goe_variance_catalan_form)?;
    let odd = variance_gaps(Family::Goe, 1, goe_variance_catalan_form)?;
    Ok((
        shrinking_to_tolerance(&even) && shrinking_to_tolerance(&odd),
        format!("gap {:.4} at n=10240, {:.4} at n=10241", even[10], odd[10]),
    ))
}

fn ginibre_variance() -> Result<(bool, String)> {
    let n = 10240;
    let target = 0.5 * (n as f64).ln() + 0.5 * (EULER_GAMMA + 1.0 + PI * PI / 8.0);
    let gap = (exact_cumulant(&EnsembleSpec::new(Family::GinibreReal, n)?, 2)? - target).abs();
    Ok((gap <= TOLERANCES.variance_asymptotic, format!("gap {gap:.2e} at n=10240")))
}

fn factorial_bound() -> Result<(bool, String)> {
    let dims: Vec<usize> = (1..=11).map(|k| 1 << k).collect();
    let gue = factorial_bound_ratio(Family::Gue, &dims, 12)?;
    let goe = factorial_bound_ratio(Family::Goe, &dims, 12)?;
    let ginibre = factorial_bound_ratio(Family::GinibreReal, &dims, 12)?;
    Ok((
        gue <= TOLERANCES.factorial_bound && goe.is_finite() && ginibre.is_finite(),
        format!("max |Γ_j|/(j-1)!: GUE {gue:.3}, GOE {goe:.3}, real Ginibre {ginibre:.3}"),
    ))
}

fn identities() -> Result<(bool, String)> {
    let tol = TOLERANCES.identities;
    let mut g = RandomStream::new(seed(8, 0), 0).generator();

    let mut duplication: f64 = 0.0;
    for _ in 0..200 {
        let z = 0.05 + 19.95 * g.uniform();
        let digamma = polygamma(0, 2.0 * z)? - 0.5 * polygamma(0, z)? - 0.5 * polygamma(0, z + 0.5)? - 2f64.ln();
        duplication = duplication.max(digamma.abs() / polygamma(0, 2.0 * z)?.abs().max(1.0));
        for k in 1..=5 {
            let lhs = polygamma(k, 2.0 * z)?;
            let rhs = (polygamma(k, z)? + polygamma(k, z + 0.5)?) / 2f64.powi(k as i32 + 1);
            duplication = duplication.max((lhs - rhs).abs() / lhs.abs());
        }
    }

    let catalan = (0.25 * polygamma(1, 0.75)? - (PI * PI / 4.0 - 2.0 * CATALAN)).abs();

    let mut bound_violations = 0;
    for _ in 0..1000 {
        let x = 10f64.powf(-3.0 + 6.0 * g.uniform());
        let j = 1 + (g.uniform() * 12.0) as u32;
        let factorial: f64 = (1..=j).map(f64::from).product();
        let bound = factorial * x.powi(-(j as i32)) + factorial * x.powi(-(j as i32) - 1);
        if polygamma(j, x)?.abs() > bound {
            bound_violations += 1;
        }
    }
    Ok((
        duplication <= tol && catalan <= tol && bound_violations == 0,
        format!("duplication {duplication:.1e}, Catalan {catalan:.1e}, bound violations {bound_violations}/1000"),
    ))
}
