//! Cumulants `Γ_j` of `log|det X|`: exact polygamma sums, a finite-difference
//! oracle, large-n asymptotics, factorial bounds and the envelope constants
//! behind the normal-approximation bounds.
//!
//! Every closed-form moment is a product of gamma ratios, so the cumulants are
//! sums of polygamma values. The even-dimensional GOE moment also carries the
//! factor `F((s+1)/2, -s/2; (n+1+s)/2; 1/2)`; its logarithm is expanded as a
//! truncated power series in `s`, which gives its Taylor coefficients exactly.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{log_mgf_closed_complex, EnsembleSpec, Family};
use crate::series::Series;
use crate::specfun::{polygamma, CATALAN, EULER_GAMMA, MAX_POLYGAMMA_ORDER};
use crate::sum::CompensatedSum;
use crate::tolerances::TOLERANCES;

/// How the values of a [`CumulantTable`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantMethod {
    /// Polygamma sums.
    ClosedSum,
    /// Polygamma sums plus the exact series of the hypergeometric factor
    /// (GOE, even `n`).
    ClosedSumWithSeries,
    /// Numerical differentiation of `log M(s)` at `s = 0`.
    FiniteDifference,
}

/// `Γ_1 ..= Γ_J` for one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTable {
    pub spec: EnsembleSpec,
    /// `(j, Γ_j)` pairs in increasing `j`.
    pub values: Vec<(usize, f64)>,
    pub method: CumulantMethod,
}

impl CumulantTable {
    /// Exact cumulants of orders `1..=jmax`.
    pub fn exact(spec: EnsembleSpec, jmax: usize) -> Result<Self> {
        let values = (1..=jmax)
            .map(|j| exact_cumulant(&spec, j).map(|v| (j, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CumulantTable { spec, values, method: exact_method(&spec)? })
    }

    /// Finite-difference cumulants of orders `1..=jmax`.
    pub fn finite_difference(spec: EnsembleSpec, jmax: usize) -> Result<Self> {
        let values = (1..=jmax)
            .map(|j| finite_difference_cumulant(&spec, j).map(|d| (j, d.value)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CumulantTable { spec, values, method: CumulantMethod::FiniteDifference })
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == j).map(|(_, v)| *v)
    }
}

/// The method [`exact_cumulant`] uses for `spec`.
pub fn exact_method(spec: &EnsembleSpec) -> Result<CumulantMethod> {
    match spec.family {
        Family::FourMomentWigner => Err(Error::NoClosedForm(spec.family.to_string())),
        Family::Goe if spec.n.is_multiple_of(2) => Ok(CumulantMethod::ClosedSumWithSeries),
        _ => Ok(CumulantMethod::ClosedSum),
    }
}

/// Digamma for `j = 1`, otherwise `ψ^{(j-1)}`.
fn psi(j: usize, x: f64) -> Result<f64> {
    polygamma((j - 1) as u32, x)
}

/// Exact cumulant `Γ_j` of `log|det X|`.
pub fn exact_cumulant(spec: &EnsembleSpec, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::Input("cumulant order starts at 1".into()));
    }
    if j > MAX_POLYGAMMA_ORDER as usize + 1 {
        return Err(Error::UnsupportedOrder { order: j as u32, max: MAX_POLYGAMMA_ORDER + 1 });
    }
    exact_method(spec)?;
    let n = spec.n;
    if n == 0 {
        return Err(Error::Input("dimension n must be positive".into()));
    }
    let nf = n as f64;
    // weight of the half-argument terms: 1/2 for the mean, 2^{-j} beyond
    let half_weight = 0.5f64.powi(j as i32);
    let mut acc = CompensatedSum::new();
    match spec.family {
        Family::Gue => {
            if j == 1 {
                acc.add(0.5 * nf * LN_2);
            }
            let mut inner = CompensatedSum::new();
            inner.add(psi(j, 0.5)?);
            for i in 1..=n / 2 {
                let multiplicity = if 2 * i < n { 2.0 } else { 1.0 };
                inner.add(multiplicity * psi(j, 0.5 + i as f64)?);
            }
            acc.add(half_weight * inner.value());
        }
        Family::Goe => {
            let p = n / 2;
            if j == 1 {
                acc.add(0.5 * (nf + 1.0) * LN_2);
            }
            acc.add(half_weight * psi(j, 0.5)?);
            for m in (1..=p).rev() {
                acc.add(psi(j, m as f64 + 0.5)?);
            }
            if n.is_multiple_of(2) {
                acc.add(-half_weight * psi(j, 0.5 * (nf + 1.0))?);
                let log_f = log_hypergeometric_series(n, j)?;
                acc.add(factorial(j) * log_f.coeffs()[j]);
            }
        }
        Family::GinibreReal | Family::GinibreComplex | Family::GinibreQuaternion => {
            let beta = f64::from(spec.beta());
            if j == 1 {
                acc.add(0.5 * nf * (2.0 / beta).ln());
            }
            let mut inner = CompensatedSum::new();
            for i in (1..=n).rev() {
                inner.add(psi(j, 0.5 * beta * i as f64)?);
            }
            acc.add(half_weight * inner.value());
        }
        Family::FourMomentWigner => unreachable!("rejected by exact_method"),
    }
    Ok(acc.value())
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|k| k as f64).product()
}

/// Power series in `s` of `log F((s+1)/2, -s/2; (n+1+s)/2; 1/2)` through
/// degree `degree`.
pub fn log_hypergeometric_series(n: usize, degree: usize) -> Result<Series> {
    let c0 = 0.5 * (n as f64 + 1.0);
    let mut term = Series::constant(1.0, degree);
    let mut total = term.clone();
    let mut quiet = 0;
    for m in 0..100_000usize {
        let mf = m as f64;
        let a = Series::linear(0.5 + mf, 0.5, degree);
        let b = Series::linear(mf, -0.5, degree);
        let c = Series::linear(c0 + mf, 0.5, degree);
        term = (&(&term * &a) * &b).div(&c).scale(0.5 / (mf + 1.0));
        total = total + &term;
        if term.max_abs() <= TOLERANCES.hyp2f1_term_rel * total.max_abs() {
            quiet += 1;
            if quiet >= TOLERANCES.hyp2f1_quiet_terms {
                return Ok(total.ln());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { terms: 100_000 })
}

/// A numerical derivative with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error_estimate: f64,
    /// Base step (real axis) or circle radius (contour) that was selected.
    pub step: f64,
}

/// Weights of the finite-difference formula for the `order`-th derivative at
/// `x0` on the given nodes (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Largest order accepted by [`finite_difference_cumulant`].
pub const MAX_FINITE_DIFFERENCE_ORDER: usize = 8;

/// `j`-th derivative at zero of a real function from a fourth-order central
/// stencil, evaluated at steps `h`, `h/2`, `h/4` and Richardson-extrapolated
/// twice.
///
/// The base step is picked from a ladder starting at `1e-2` to minimize the
/// estimated truncation plus rounding error, keeping the stencil inside
/// `|s| ≤ reach`. Rounding grows like `h^{-j}`, so in double precision this
/// is only useful up to about order 4.
pub fn real_axis_derivative<F>(f: F, j: usize, reach: f64) -> Result<DerivativeEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if j == 0 {
        return Err(Error::Input("derivative order starts at 1".into()));
    }
    let half_width = j.div_ceil(2) + 1;
    let offsets: Vec<f64> = (-(half_width as i64)..=half_width as i64).map(|k| k as f64).collect();
    let unit = fornberg_weights(0.0, &offsets, j);
    let weight_mass: f64 = unit.iter().map(|w| w.abs()).sum();

    let mut best: Option<DerivativeEstimate> = None;
    let mut h = 1e-2;
    while h * half_width as f64 <= reach {
        let mut levels = [0.0; 3];
        let mut magnitude: f64 = 1.0;
        for (level, value) in levels.iter_mut().enumerate() {
            let step = h / f64::from(1u32 << level);
            let mut acc = CompensatedSum::new();
            for (w, k) in unit.iter().zip(&offsets) {
                if *w == 0.0 {
                    continue;
                }
                let v = f(k * step)?;
                magnitude = magnitude.max(v.abs());
                acc.add(w * v);
            }
            *value = acc.value() / step.powi(j as i32);
        }
        let r1_coarse = (16.0 * levels[1] - levels[0]) / 15.0;
        let r1_fine = (16.0 * levels[2] - levels[1]) / 15.0;
        let r2 = (64.0 * r1_fine - r1_coarse) / 63.0;
        let truncation = (r2 - r1_fine).abs();
        let rounding = 1.1 * 16.0 * f64::EPSILON * magnitude * weight_mass / (h / 4.0).powi(j as i32);
        let candidate = DerivativeEstimate { value: r2, error_estimate: truncation + rounding, step: h };
        if best.is_none_or(|b| candidate.error_estimate < b.error_estimate) {
            best = Some(candidate);
        }
        h *= 1.25;
    }
    best.ok_or_else(|| Error::Domain(format!("no stencil fits inside |s| ≤ {reach}")))
}

/// `j`-th derivative at zero of a function analytic in the unit disk, from
/// its values on a circle `|s| = r`.
///
/// The trapezoid rule on `N` equally spaced nodes is a central difference
/// formula in the complex plane with aliasing error of order `r^N`. Each
/// radius is evaluated with 64 and 128 nodes; the difference estimates the
/// truncation error and `j!·ε·max|f|/r^j` the rounding error. The radius
/// with the smallest total is kept.
pub fn contour_derivative<F>(f: F, j: usize) -> Result<DerivativeEstimate>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const RADII: [f64; 5] = [0.2, 0.3, 0.4, 0.5, 0.6];
    let scale = factorial(j);
    let mut best: Option<DerivativeEstimate> = None;
    for r in RADII {
        let fine = 128usize;
        let values = (0..fine)
            .map(|k| f(Complex64::from_polar(r, 2.0 * PI * k as f64 / fine as f64)))
            .collect::<Result<Vec<_>>>()?;
        let magnitude = values.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        let coefficient = |stride: usize| {
            let nodes = fine / stride;
            let mut acc = CompensatedSum::new();
            for (k, v) in values.iter().step_by(stride).enumerate() {
                let angle = -2.0 * PI * (j * k % nodes) as f64 / nodes as f64;
                acc.add((v * Complex64::from_polar(1.0, angle)).re);
            }
            scale * acc.value() / (nodes as f64 * r.powi(j as i32))
        };
        let value = coefficient(1);
        let truncation = (value - coefficient(2)).abs();
        let rounding = 8.0 * f64::EPSILON * magnitude * scale / r.powi(j as i32);
        let candidate = DerivativeEstimate { value, error_estimate: truncation + rounding, step: r };
        if best.is_none_or(|b| candidate.error_estimate < b.error_estimate) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one radius"))
}

/// `Γ_j` as the `j`-th derivative of `s ↦ log M(s)` at zero, computed
/// numerically from the closed-form moment and independent of the polygamma
/// sums used by [`exact_cumulant`].
///
/// Uses [`contour_derivative`] on the analytic continuation of `log M`.
pub fn finite_difference_cumulant(spec: &EnsembleSpec, j: usize) -> Result<DerivativeEstimate> {
    if j == 0 || j > MAX_FINITE_DIFFERENCE_ORDER {
        return Err(Error::UnsupportedOrder { order: j as u32, max: MAX_FINITE_DIFFERENCE_ORDER as u32 });
    }
    let estimate = contour_derivative(|s| log_mgf_closed_complex(spec, s), j)?;
    if !(estimate.error_estimate <= TOLERANCES.finite_difference_max_error) {
        return Err(Error::Accuracy { estimate: estimate.value, error_estimate: estimate.error_estimate });
    }
    Ok(estimate)
}

/// Large-n approximation of `Γ_1` or `Γ_2` without its `O(1/n)` remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCumulant {
    pub value: f64,
    /// The approximation holds only up to an unnamed additive constant that
    /// is not included in `value`.
    pub undetermined_constant: bool,
}

/// Leading terms of `Γ_1` (up to an additive constant) or `Γ_2`.
///
/// Supported for GUE, GOE and real Ginibre with `n ≥ 2`.
pub fn asymptotic_cumulant(spec: &EnsembleSpec, j: usize) -> Result<AsymptoticCumulant> {
    let n = spec.n;
    let unsupported = || Error::Unsupported(format!("asymptotic Γ_{j} for {}", spec.family));
    if !matches!(j, 1 | 2) || !matches!(spec.family, Family::Gue | Family::Goe | Family::GinibreReal) {
        return Err(unsupported());
    }
    if n < 2 {
        return Err(Error::Domain("asymptotic cumulants need n ≥ 2".into()));
    }
    let nf = n as f64;
    let even_part = (2 * (n / 2)) as f64;
    let (value, undetermined_constant) = match (spec.family, j) {
        (Family::Gue | Family::Goe, 1) => (0.5 * nf * even_part.ln() - 0.5 * nf, true),
        (Family::Gue, 2) => (0.5 * even_part.ln() + 0.5 * (EULER_GAMMA + LN_2 + 1.0), false),
        (Family::Goe, 2) => (even_part.ln() + EULER_GAMMA + LN_2 + 1.0 - PI * PI / 8.0, false),
        (Family::GinibreReal, 1) => {
            let l = (nf - 1.0).ln();
            (0.5 * nf * l - 0.5 * nf - 0.25 * l, true)
        }
        (Family::GinibreReal, 2) => (0.5 * nf.ln() + 0.5 * (EULER_GAMMA + 1.0 + PI * PI / 8.0), false),
        _ => return Err(unsupported()),
    };
    Ok(AsymptoticCumulant { value, undetermined_constant })
}

/// The GOE variance approximation written with Catalan's constant,
/// `log(2⌊n/2⌋) + γ/2 + 1 - 2K + π²/4`.
///
/// Kept for comparison; the exact variance approaches
/// [`asymptotic_cumulant`]`(GOE, 2)` instead, which differs by about `0.887`.
pub fn goe_variance_catalan_form(n: usize) -> f64 {
    let even_part = (2 * (n / 2)) as f64;
    even_part.ln() + 0.5 * EULER_GAMMA + 1.0 - 2.0 * CATALAN + PI * PI / 4.0
}

/// `max |Γ_j(n)| / (j-1)!` over `n ∈ dims` and `3 ≤ j ≤ jmax`.
pub fn factorial_bound_ratio(family: Family, dims: &[usize], jmax: usize) -> Result<f64> {
    if jmax < 3 {
        return Err(Error::Input(format!("jmax must be at least 3, got {jmax}")));
    }
    let mut worst: f64 = 0.0;
    for &n in dims {
        let spec = EnsembleSpec::new(family, n)?;
        for j in 3..=jmax {
            let ratio = exact_cumulant(&spec, j)?.abs() / factorial(j - 1);
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

/// Constants of the cumulant-method bounds for a statistic with standard
/// deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub sigma: f64,
    /// `sigma / 5`.
    pub delta: f64,
    /// `√2 · delta / 36`.
    pub delta1: f64,
    /// `C` in `|Γ_j| ≤ C · j!` for the standardized statistic.
    pub j_factorial_constant: f64,
}

pub fn bound_envelope(sigma: f64) -> Result<BoundEnvelope> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let delta = sigma / 5.0;
    Ok(BoundEnvelope {
        sigma,
        delta,
        delta1: 2f64.sqrt() * delta / 36.0,
        j_factorial_constant: 7.0,
    })
}

impl BoundEnvelope {
    fn check(&self, x: f64) -> Result<()> {
        if !(0.0..self.delta1).contains(&x) {
            return Err(Error::Domain(format!(
                "envelope defined on [0, {}), got x = {x}",
                self.delta1
            )));
        }
        Ok(())
    }

    /// Bound `|x|³ / (3Δ₁)` on the Cramér correction `L(x)`.
    pub fn cramer_envelope(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(x.abs().powi(3) / (3.0 * self.delta1))
    }

    /// `60 (1 + 10Δ₁² exp(-(1 - x/Δ₁)√Δ₁)) / (1 - x/Δ₁)`.
    pub fn phi_factor(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let d = self.delta1;
        let gap = 1.0 - x / d;
        Ok(60.0 * (1.0 + 10.0 * d * d * (-gap * d.sqrt()).exp()) / gap)
    }

    /// Kolmogorov-distance bound `18 / Δ₁`. Larger than 1 unless `sigma`
    /// exceeds about 3200.
    pub fn ks_bound(&self) -> f64 {
        18.0 / self.delta1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, n: usize) -> EnsembleSpec {
        EnsembleSpec::new(family, n).unwrap()
    }

    #[test]
    fn unit_dimension_values() {
        let mean = -(EULER_GAMMA + LN_2) / 2.0;
        let gue = spec(Family::Gue, 1);
        assert!((exact_cumulant(&gue, 1).unwrap() - mean).abs() < TOLERANCES.known_values);
        assert!((exact_cumulant(&gue, 2).unwrap() - PI * PI / 8.0).abs() < TOLERANCES.known_values);
        let real = spec(Family::GinibreReal, 1);
        assert!((exact_cumulant(&real, 1).unwrap() - mean).abs() < TOLERANCES.known_values);
        // GOE n = 1 is N(0, 2): shifted mean, same variance
        let goe = spec(Family::Goe, 1);
        assert!((exact_cumulant(&goe, 1).unwrap() - mean - 0.5 * LN_2).abs() < 1e-14);
        assert!((exact_cumulant(&goe, 2).unwrap() - PI * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn normal_log_moments_by_quadrature() {
        // E log|X| and Var log|X| for X ~ N(0,1), integrated in u = log|x|
        use crate::quadrature::{integrate, Settings};
        let settings = Settings { rel_tol: 1e-14, abs_tol: 1e-300, max_intervals: 4000 };
        let q = integrate(
            |u: f64| {
                let x = u.exp();
                let w = 2.0 * x * (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
                [w, u * w, u * u * w]
            },
            -40.0,
            4.0,
            &[-1.0, 0.0, 1.0],
            settings,
        );
        let mean = q.value[1] / q.value[0];
        let var = q.value[2] / q.value[0] - mean * mean;
        let gue = spec(Family::Gue, 1);
        assert!((exact_cumulant(&gue, 1).unwrap() - mean).abs() < 1e-12);
        assert!((exact_cumulant(&gue, 2).unwrap() - var).abs() < 1e-12);
    }

    #[test]
    fn wigner_has_no_exact_cumulants() {
        assert!(matches!(
            exact_cumulant(&spec(Family::FourMomentWigner, 3), 2),
            Err(Error::NoClosedForm(_))
        ));
        assert!(exact_cumulant(&spec(Family::Gue, 3), 0).is_err());
    }

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let expected = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn closed_sums_match_finite_differences() {
        let families = [
            Family::Gue,
            Family::Goe,
            Family::GinibreReal,
            Family::GinibreComplex,
            Family::GinibreQuaternion,
        ];
        let mut worst: f64 = 0.0;
        for family in families {
            for n in [1usize, 2, 3, 10, 50, 200] {
                for j in 1..=6 {
                    let s = spec(family, n);
                    let exact = exact_cumulant(&s, j).unwrap();
                    let fd = finite_difference_cumulant(&s, j).unwrap();
                    let diff = (exact - fd.value).abs();
                    worst = worst.max(diff);
                    assert!(diff <= TOLERANCES.cumulant_cross_oracle, "{family} n={n} j={j}: {exact} vs {fd:?}");
                }
            }
        }
        assert!(worst.is_finite());
    }

    #[test]
    fn real_axis_stencil_on_low_orders() {
        let spec = spec(Family::Gue, 10);
        for j in 1..=4 {
            let d = real_axis_derivative(|s| crate::moments::log_mgf_closed(&spec, s), j, 0.5).unwrap();
            let exact = exact_cumulant(&spec, j).unwrap();
            assert!((d.value - exact).abs() < 1e-7, "j={j}: {d:?} vs {exact}");
            assert!((d.value - exact).abs() <= 10.0 * d.error_estimate + 1e-12);
        }
    }

    #[test]
    fn finite_difference_order_limit() {
        assert!(finite_difference_cumulant(&spec(Family::Gue, 4), 8).is_ok());
        assert!(finite_difference_cumulant(&spec(Family::Gue, 4), 0).is_err());
        assert!(finite_difference_cumulant(&spec(Family::Gue, 4), 9).is_err());
    }

    #[test]
    fn hypergeometric_series_matches_closed_value() {
        // the constant and the value at s = 0.3 against the direct series
        for n in [2usize, 4, 10, 100] {
            let series = log_hypergeometric_series(n, 12).unwrap();
            assert!(series.coeffs()[0].abs() < 1e-16);
            let s = 0.3f64;
            let direct = crate::specfun::hyp2f1_half(0.5 * (s + 1.0), -0.5 * s, 0.5 * (n as f64 + 1.0 + s))
                .unwrap()
                .ln();
            let summed: f64 = series.coeffs().iter().rev().fold(0.0, |acc, c| acc * s + c);
            assert!((summed - direct).abs() < 1e-9, "n={n}: {summed} vs {direct}");
        }
    }

    #[test]
    fn variance_asymptotics_converge() {
        for family in [Family::Gue, Family::Goe, Family::GinibreReal] {
            let mut previous = f64::INFINITY;
            for k in 0..=10 {
                let n = 10 * (1usize << k);
                let s = spec(family, n);
                let d = (exact_cumulant(&s, 2).unwrap() - asymptotic_cumulant(&s, 2).unwrap().value).abs();
                assert!(d < previous, "{family} n={n}: {d} ≥ {previous}");
                previous = d;
            }
            assert!(previous < TOLERANCES.variance_asymptotic);
        }
    }

    #[test]
    fn mean_asymptotics_have_a_limit() {
        let offset = |family, n| {
            let s = spec(family, n);
            exact_cumulant(&s, 1).unwrap() - asymptotic_cumulant(&s, 1).unwrap().value
        };
        for family in [Family::Gue, Family::Goe, Family::GinibreReal] {
            for n in [1024usize, 2048, 4096] {
                assert!((offset(family, 2 * n) - offset(family, n)).abs() < 0.01, "{family} {n}");
            }
            assert!(asymptotic_cumulant(&spec(family, 100), 1).unwrap().undetermined_constant);
        }
        // the GUE constant vanishes and the odd GOE one is (1 + log 2)/2
        assert!(offset(Family::Gue, 8192).abs() < 1e-4);
        assert!((offset(Family::Goe, 8193) - 0.5 * (1.0 + LN_2)).abs() < 1e-4);
    }

    #[test]
    fn asymptotic_refusals() {
        assert!(asymptotic_cumulant(&spec(Family::Gue, 100), 3).is_err());
        assert!(asymptotic_cumulant(&spec(Family::GinibreComplex, 100), 2).is_err());
        assert!(asymptotic_cumulant(&spec(Family::Gue, 1), 2).is_err());
    }

    #[test]
    fn catalan_form_exceeds_exact_variance() {
        let s = spec(Family::Goe, 10240);
        let gap = goe_variance_catalan_form(10240) - exact_cumulant(&s, 2).unwrap();
        assert!((gap - 0.8874).abs() < 1e-3, "{gap}");
    }

    #[test]
    fn factorial_bounds() {
        let dyadic: Vec<usize> = (1..=11).map(|k| 1usize << k).collect();
        let gue = factorial_bound_ratio(Family::Gue, &dyadic, 12).unwrap();
        assert!(gue <= TOLERANCES.factorial_bound, "{gue}");
        let short = factorial_bound_ratio(Family::Gue, &dyadic, 6).unwrap();
        assert!((0.5..=2.0).contains(&(gue / short)));
        for family in [Family::Goe, Family::GinibreReal] {
            assert!(factorial_bound_ratio(family, &dyadic, 12).unwrap().is_finite());
        }
        let single = factorial_bound_ratio(Family::Gue, &[4], 3).unwrap();
        assert!((single - exact_cumulant(&spec(Family::Gue, 4), 3).unwrap().abs() / 2.0).abs() < 1e-15);
        assert!(factorial_bound_ratio(Family::Gue, &[4], 2).is_err());
    }

    #[test]
    fn goe_parity_steps() {
        // variance increments across n → n + 2 track log((n+2)/n)
        for n in [100usize, 101, 400, 401] {
            let v = |m| exact_cumulant(&spec(Family::Goe, m), 2).unwrap();
            let step = v(n + 2) - v(n);
            let expected = ((n + 2) as f64 / n as f64).ln();
            assert!(step >= 0.8 * 0.5 * expected && step <= 1.2 * 1.5 * expected, "n={n}: {step} vs {expected}");
        }
    }

    #[test]
    fn envelope_constants() {
        let e = bound_envelope(3.0).unwrap();
        assert!((e.delta - 0.6).abs() < 1e-15);
        assert!((e.delta1 - 0.023_570_226_039_551_58).abs() < 1e-15);
        assert!((e.ks_bound() - 763.675_323_681_471_1).abs() < 1e-9);
        assert_eq!(e.cramer_envelope(0.0).unwrap(), 0.0);
        assert!(e.cramer_envelope(e.delta1).is_err());
        assert!(e.phi_factor(0.0).unwrap() > 60.0);
        assert!(bound_envelope(0.0).is_err());
    }
}
