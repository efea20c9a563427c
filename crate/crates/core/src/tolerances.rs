//! Every numerical tolerance used by the library and its verification suite.
//!
//! Keeping them in one record makes test runs reproducible and lets callers
//! see exactly what a routine promises.

/// Accuracy promises and acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative error of `log_gamma` on `[1e-6, 1e6]`.
    pub log_gamma_rel: f64,
    /// Relative error of `polygamma` on `[1e-3, 1e6]` for orders up to 16.
    pub polygamma_rel: f64,
    /// Absolute error of `normal_cdf`.
    pub normal_cdf_abs: f64,
    /// Hypergeometric series stops once this many consecutive terms are small.
    pub hyp2f1_quiet_terms: usize,
    /// Relative size below which a hypergeometric term counts as small.
    pub hyp2f1_term_rel: f64,
    /// Catalan constant against its alternating series.
    pub catalan_series: f64,
    /// Absolute error target for the quadrature oracle on `log M`.
    pub quadrature_abs: f64,
    /// Gaussian mass allowed outside the quadrature box.
    pub quadrature_tail_mass: f64,
    /// Finite-difference cumulants fail when their error estimate exceeds this.
    pub finite_difference_max_error: f64,
    /// Closed-form versus quadrature agreement of `log M`.
    pub closed_vs_quadrature: f64,
    /// Closed-sum versus finite-difference cumulant agreement.
    pub cumulant_cross_oracle: f64,
    /// Known 1x1 cumulant values.
    pub known_values: f64,
    /// Variance asymptotics at large n.
    pub variance_asymptotic: f64,
    /// Upper bound on `|Gamma_j| / (j-1)!` for the unitary ensemble.
    pub factorial_bound: f64,
    /// Special-function identities (duplication, Catalan).
    pub identities: f64,
    /// Standard errors allowed between Monte Carlo and exact moments.
    pub monte_carlo_standard_errors: f64,
    /// Kolmogorov distance ceiling for the unitary ensemble at n = 256.
    pub ks_ceiling_n256: f64,
    /// Tail ratio window.
    pub tail_ratio_low: f64,
    pub tail_ratio_high: f64,
    /// Wilson half-widths allowed between a tail ratio and 1.
    pub tail_ratio_half_widths: f64,
    /// Wilson interval z-score used for reported half-widths.
    pub wilson_z: f64,
    /// Moderate-deviation rate tolerance on exact-normal samples.
    pub mdp_normal: f64,
    /// Moderate-deviation rate tolerance on GUE samples.
    pub mdp_gue: f64,
    /// Moment matching of discrete atoms.
    pub moment_match: f64,
    /// Relative tolerance for log-determinant identities.
    pub log_det_rel: f64,
    /// Relative imaginary part allowed in a Hermitian determinant.
    pub hermitian_imag_rel: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    log_gamma_rel: 1e-13,
    polygamma_rel: 1e-12,
    normal_cdf_abs: 1e-12,
    hyp2f1_quiet_terms: 8,
    hyp2f1_term_rel: 1e-16,
    catalan_series: 1e-14,
    quadrature_abs: 1e-7,
    quadrature_tail_mass: 1e-12,
    finite_difference_max_error: 1e-4,
    closed_vs_quadrature: 1e-5,
    cumulant_cross_oracle: 1e-6,
    known_values: 1e-12,
    variance_asymptotic: 0.01,
    factorial_bound: 10.0,
    identities: 1e-12,
    monte_carlo_standard_errors: 4.0,
    ks_ceiling_n256: 0.02,
    tail_ratio_low: 0.8,
    tail_ratio_high: 1.25,
    tail_ratio_half_widths: 3.0,
    wilson_z: 1.0,
    mdp_normal: 0.15,
    mdp_gue: 0.3,
    moment_match: 1e-14,
    log_det_rel: 1e-10,
    hermitian_imag_rel: 1e-8,
};
