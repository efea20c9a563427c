//! Moment generating functions `M(s) = E|det X|^s` of the log-determinant.
//!
//! The closed forms are products of gamma-function ratios (plus one
//! hypergeometric factor for even-dimensional GOE). All of them are evaluated
//! in log space through [`log_gamma_ratio`], so `n` up to a million is fine.
//!
//! Normalizations follow the eigenvalue densities: GUE eigenvalues carry the
//! weight `exp(-Σλ²/2)` and GOE eigenvalues `exp(-Σλ²/4)`. As matrices, GUE
//! has `N(0,1)` diagonal entries and complex off-diagonal entries with
//! `E|z|² = 1`; GOE has `N(0,2)` on the diagonal and `N(0,1)` off it. Ginibre
//! matrices have independent entries of unit total variance.
//!
//! [`log_mgf_quadrature`] integrates the eigenvalue (or singular-value)
//! density directly for `n ≤ 3` and serves as an independent oracle.

use std::cell::Cell;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Settings};
use crate::specfun::{hyp2f1_half, hyp2f1_half_complex, log_gamma_ratio, log_gamma_ratio_complex};
use crate::sum::CompensatedSum;
use crate::tolerances::TOLERANCES;

/// Matrix family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gue,
    Goe,
    GinibreReal,
    GinibreComplex,
    GinibreQuaternion,
    /// Hermitian Wigner matrix with bounded atoms matching GUE through order 4.
    FourMomentWigner,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Gue,
        Family::Goe,
        Family::GinibreReal,
        Family::GinibreComplex,
        Family::GinibreQuaternion,
        Family::FourMomentWigner,
    ];

    pub fn beta(self) -> u32 {
        match self {
            Family::Goe | Family::GinibreReal => 1,
            Family::Gue | Family::GinibreComplex | Family::FourMomentWigner => 2,
            Family::GinibreQuaternion => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Gue => "gue",
            Family::Goe => "goe",
            Family::GinibreReal => "ginibre_real",
            Family::GinibreComplex => "ginibre_complex",
            Family::GinibreQuaternion => "ginibre_quaternion",
            Family::FourMomentWigner => "four_moment_wigner",
        }
    }

    pub fn has_closed_form(self) -> bool {
        self != Family::FourMomentWigner
    }

    pub fn is_ginibre(self) -> bool {
        matches!(self, Family::GinibreReal | Family::GinibreComplex | Family::GinibreQuaternion)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "gue" => Ok(Family::Gue),
            "goe" => Ok(Family::Goe),
            "ginibre_real" | "ginibre" => Ok(Family::GinibreReal),
            "ginibre_complex" => Ok(Family::GinibreComplex),
            "ginibre_quaternion" => Ok(Family::GinibreQuaternion),
            "four_moment_wigner" | "wigner" => Ok(Family::FourMomentWigner),
            _ => Err(Error::Input(format!("unknown family `{s}`"))),
        }
    }
}

/// A matrix family together with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("dimension n must be positive".into()));
        }
        Ok(EnsembleSpec { family, n })
    }

    /// Builds a spec from an explicit `beta`, which must agree with the family.
    pub fn with_beta(family: Family, n: usize, beta: u32) -> Result<Self> {
        if family.beta() != beta {
            return Err(Error::Input(format!(
                "{family} has beta = {}, not {beta}",
                family.beta()
            )));
        }
        Self::new(family, n)
    }

    pub fn beta(&self) -> u32 {
        self.family.beta()
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.family, self.n)
    }
}

/// Shifts in the GOE odd-dimension product `Π Γ(s/2 + 1/2 + b_m) / Γ(1/2 + b_m)`.
///
/// `b_1 = 0` and `b_m = ⌊(m-1)/2⌋/2 + 1/4` for `m ≥ 2`.
pub fn goe_odd_shift(m: usize) -> f64 {
    if m == 1 {
        0.0
    } else {
        0.5 * ((m - 1) / 2) as f64 + 0.25
    }
}

fn check_closed(spec: &EnsembleSpec, s: f64) -> Result<()> {
    if !spec.family.has_closed_form() {
        return Err(Error::NoClosedForm(spec.family.to_string()));
    }
    if !(s > -1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("log M(s) needs s > -1, got {s}")));
    }
    if spec.n == 0 {
        return Err(Error::Input("dimension n must be positive".into()));
    }
    Ok(())
}

/// `log E|det X|^s` from the closed-form product formulas.
pub fn log_mgf_closed(spec: &EnsembleSpec, s: f64) -> Result<f64> {
    check_closed(spec, s)?;
    let n = spec.n;
    let nf = n as f64;
    let half = 0.5 * s;
    let mut acc = CompensatedSum::new();
    match spec.family {
        Family::Gue => {
            acc.add(0.5 * nf * s * LN_2);
            // shifts ⌊m/2⌋: 0 once, then each i twice (once if i = n/2, n even)
            acc.add(log_gamma_ratio(0.5, half)?);
            for i in 1..=n / 2 {
                let multiplicity = if 2 * i < n { 2.0 } else { 1.0 };
                acc.add(multiplicity * log_gamma_ratio(0.5 + i as f64, half)?);
            }
        }
        Family::Goe if n % 2 == 1 => {
            acc.add(nf * s * LN_2);
            for m in 1..=n {
                acc.add(log_gamma_ratio(0.5 + goe_odd_shift(m), half)?);
            }
        }
        Family::Goe => {
            let p = n / 2;
            acc.add(0.5 * (nf + 1.0) * s * LN_2);
            let f = hyp2f1_half(0.5 * (s + 1.0), -half, 0.5 * (nf + 1.0 + s))?;
            if !(f > 0.0) {
                return Err(Error::Domain(format!(
                    "hypergeometric factor is {f} at n = {n}, s = {s}"
                )));
            }
            acc.add(libm::log(f));
            acc.add(log_gamma_ratio(0.5, half)?);
            acc.add(-log_gamma_ratio(0.5 * (nf + 1.0), half)?);
            for m in 1..=p {
                acc.add(log_gamma_ratio(m as f64 + 0.5, s)?);
            }
        }
        Family::GinibreReal | Family::GinibreComplex | Family::GinibreQuaternion => {
            let beta = f64::from(spec.beta());
            acc.add(0.5 * nf * s * libm::log(2.0 / beta));
            for i in 1..=n {
                acc.add(log_gamma_ratio(0.5 * i as f64 * beta, half)?);
            }
        }
        Family::FourMomentWigner => unreachable!("rejected by check_closed"),
    }
    Ok(acc.value())
}

/// [`log_mgf_closed`] continued analytically to complex `s` with `|s| < 1`.
///
/// Derivatives at `s = 0` can then be taken from values on a circle, which
/// avoids the cancellation of real-axis difference quotients.
pub fn log_mgf_closed_complex(spec: &EnsembleSpec, s: Complex64) -> Result<Complex64> {
    if !spec.family.has_closed_form() {
        return Err(Error::NoClosedForm(spec.family.to_string()));
    }
    if !(s.norm() < 1.0) {
        return Err(Error::Domain(format!("complex log M(s) needs |s| < 1, got {s}")));
    }
    if spec.n == 0 {
        return Err(Error::Input("dimension n must be positive".into()));
    }
    let n = spec.n;
    let nf = n as f64;
    let half = 0.5 * s;
    let mut acc = Complex64::new(0.0, 0.0);
    match spec.family {
        Family::Gue => {
            acc += 0.5 * nf * LN_2 * s;
            acc += log_gamma_ratio_complex(0.5, half)?;
            for i in (1..=n / 2).rev() {
                let multiplicity = if 2 * i < n { 2.0 } else { 1.0 };
                acc += multiplicity * log_gamma_ratio_complex(0.5 + i as f64, half)?;
            }
        }
        Family::Goe if n % 2 == 1 => {
            acc += nf * LN_2 * s;
            for m in (1..=n).rev() {
                acc += log_gamma_ratio_complex(0.5 + goe_odd_shift(m), half)?;
            }
        }
        Family::Goe => {
            acc += 0.5 * (nf + 1.0) * LN_2 * s;
            let f = hyp2f1_half_complex((s + 1.0) * 0.5, -half, (s + nf + 1.0) * 0.5)?;
            acc += f.ln();
            acc += log_gamma_ratio_complex(0.5, half)?;
            acc -= log_gamma_ratio_complex(0.5 * (nf + 1.0), half)?;
            for m in (1..=n / 2).rev() {
                acc += log_gamma_ratio_complex(m as f64 + 0.5, s)?;
            }
        }
        Family::GinibreReal | Family::GinibreComplex | Family::GinibreQuaternion => {
            let beta = f64::from(spec.beta());
            acc += 0.5 * nf * (2.0 / beta).ln() * s;
            for i in (1..=n).rev() {
                acc += log_gamma_ratio_complex(0.5 * i as f64 * beta, half)?;
            }
        }
        Family::FourMomentWigner => unreachable!("checked above"),
    }
    Ok(acc)
}

/// Mellin transform of the even part of the determinant density,
/// `𝓜(s) = M(s - 1) / 2`.
pub fn mellin_transform(spec: &EnsembleSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Mellin transform needs s > 0, got {s}")));
    }
    Ok(0.5 * log_mgf_closed(spec, s - 1.0)?.exp())
}

/// `log E|det X|^s` by direct integration of the joint eigenvalue density
/// (GUE, GOE) or singular-value density (real and complex Ginibre).
///
/// Both the weighted and the plain integral use the same unnormalized
/// density, so the normalizing constant cancels. Only `n ≤ 3` and
/// `s ∈ [0, 4]` are accepted.
pub fn log_mgf_quadrature(spec: &EnsembleSpec, s: f64) -> Result<f64> {
    let n = spec.n;
    if n > 3 {
        return Err(Error::Dimensionality(format!("n = {n} exceeds 3")));
    }
    if !(0.0..=4.0).contains(&s) {
        return Err(Error::Domain(format!("quadrature supports s in [0, 4], got {s}")));
    }
    let beta = f64::from(spec.beta());
    let ginibre = match spec.family {
        Family::Gue | Family::Goe => false,
        Family::GinibreReal | Family::GinibreComplex => true,
        other => return Err(Error::Unsupported(format!("quadrature for {other}"))),
    };
    // per-coordinate Gaussian scale of the density
    let scale = if ginibre { 1.0 / beta.sqrt() } else { (2.0 / beta).sqrt() };
    let reach = (2.0 * (2.0 * n as f64).sqrt() + 12.0) * scale;
    let (lo, hi) = if ginibre { (0.0, reach) } else { (-reach, reach) };

    let density = Density { ginibre, beta, s };
    let failed = Cell::new(false);
    let inner = Settings { rel_tol: 1e-10, abs_tol: 1e-300, max_intervals: 400 };
    let outer = Settings { rel_tol: 1e-11, abs_tol: 1e-300, max_intervals: 2000 };
    let breaks = [0.0];

    // Integrate over the ordered region lo ≤ x1 ≤ x2 ≤ x3 ≤ hi; the density is
    // symmetric so the n! factor is shared by both integrals.
    let result = match n {
        1 => quadrature::integrate(|x| density.eval(&[x]), lo, hi, &breaks, outer),
        2 => quadrature::integrate(
            |x1| {
                let q = quadrature::integrate(|x2| density.eval(&[x1, x2]), x1, hi, &breaks, inner);
                if !inner_ok(&q) {
                    failed.set(true);
                }
                q.value
            },
            lo,
            hi,
            &breaks,
            outer,
        ),
        _ => quadrature::integrate(
            |x1| {
                let q = quadrature::integrate(
                    |x2| {
                        let q = quadrature::integrate(
                            |x3| density.eval(&[x1, x2, x3]),
                            x2,
                            hi,
                            &breaks,
                            inner,
                        );
                        if !inner_ok(&q) {
                            failed.set(true);
                        }
                        q.value
                    },
                    x1,
                    hi,
                    &breaks,
                    inner,
                );
                if !inner_ok(&q) {
                    failed.set(true);
                }
                q.value
            },
            lo,
            hi,
            &breaks,
            outer,
        ),
    };
    let [weighted, plain] = result.value;
    let estimate = weighted.ln() - plain.ln();
    let error_estimate = result.error[0] / weighted.abs() + result.error[1] / plain.abs();
    if !result.converged || failed.get() || !(error_estimate <= TOLERANCES.quadrature_abs) {
        return Err(Error::Accuracy { estimate, error_estimate });
    }
    Ok(estimate)
}

// Inner integrals need only a pointwise relative error well below the outer
// target; an inner integral that stops short of its own tolerance is fine.
fn inner_ok(q: &quadrature::Quadrature<2>) -> bool {
    (0..2).all(|c| q.error[c] <= 1e-9 * q.value[c].abs() || q.value[c] == 0.0 && q.error[c] == 0.0)
}

struct Density {
    ginibre: bool,
    beta: f64,
    s: f64,
}

impl Density {
    /// `[Π|x_i|^s · p(x), p(x)]` for the unnormalized density `p`.
    fn eval(&self, x: &[f64]) -> [f64; 2] {
        let mut log_p = 0.0;
        let mut log_abs = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let a = xi.abs();
            if a == 0.0 {
                if self.s > 0.0 || (self.ginibre && self.beta > 1.0) {
                    return [0.0, if self.ginibre && self.beta > 1.0 { 0.0 } else { self.plain_zero(x, i) }];
                }
            } else {
                log_abs += a.ln();
            }
            if self.ginibre {
                log_p -= 0.5 * self.beta * xi * xi;
                if self.beta > 1.0 {
                    log_p += (self.beta - 1.0) * a.ln();
                }
            } else {
                log_p -= 0.25 * self.beta * xi * xi;
            }
            for &xj in &x[..i] {
                let gap = if self.ginibre { (xi * xi - xj * xj).abs() } else { (xi - xj).abs() };
                if gap == 0.0 {
                    return [0.0, 0.0];
                }
                log_p += self.beta * gap.ln();
            }
        }
        let p = log_p.exp();
        [(log_p + self.s * log_abs).exp(), p]
    }

    // density value when coordinate `zero` sits exactly at the origin and the
    // weighted integrand vanishes there
    fn plain_zero(&self, x: &[f64], zero: usize) -> f64 {
        let probe = Density { ginibre: self.ginibre, beta: self.beta, s: 0.0 };
        let mut y = x.to_vec();
        y[zero] = 0.0;
        probe.eval(&y)[1]
    }
}
