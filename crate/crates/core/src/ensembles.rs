//! Reproducible samplers for the matrix families.
//!
//! Randomness comes from ChaCha8 used as a counter-based generator: the seed
//! is the key, the shard selects one of 2⁶⁴ independent streams and the
//! counter is the position within the stream. Any `(seed, shard, counter)`
//! triple therefore reproduces the same numbers on every platform and in any
//! scheduling order. Gaussians are produced by inverting the normal
//! distribution function, which depends only on portable floating point.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logdet::{DenseMatrix, MatrixKind};
use crate::moments::{EnsembleSpec, Family};
use crate::specfun::normal_quantile;
use crate::tolerances::TOLERANCES;

/// Position in a counter-based random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub shard: u64,
    /// Offset in 32-bit words from the start of the stream.
    pub counter: u64,
}

impl RandomStream {
    pub fn new(seed: u64, shard: u64) -> Self {
        RandomStream { seed, shard, counter: 0 }
    }

    pub fn at(self, counter: u64) -> Self {
        RandomStream { counter, ..self }
    }

    /// A generator positioned at this stream's counter.
    pub fn generator(&self) -> Generator {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.shard);
        rng.set_word_pos(u128::from(self.counter));
        Generator { rng }
    }
}

/// Draws uniforms, Gaussians and atoms from one stream.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    /// Uniform on the open interval `(0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        normal_quantile(self.uniform())
    }

    /// Words consumed so far.
    pub fn counter(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }
}

/// A finitely supported real distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDistribution {
    /// `(value, probability)` pairs.
    pub support: Vec<(f64, f64)>,
}

impl AtomDistribution {
    pub fn new(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() || support.iter().any(|&(v, p)| !v.is_finite() || !(p >= 0.0)) {
            return Err(Error::Input("atoms need finite values and nonnegative probabilities".into()));
        }
        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(Error::Input(format!("atom probabilities sum to {total}")));
        }
        Ok(AtomDistribution { support })
    }

    /// Diagonal atom of the four-moment Wigner matrix: `±√3` with
    /// probability 1/6 each, otherwise 0. Matches `N(0,1)` through order 4.
    pub fn wigner_diagonal() -> Self {
        Self::three_point(3f64.sqrt())
    }

    /// Atom for the real and imaginary parts of off-diagonal Wigner entries:
    /// `±√(3/2)` with probability 1/6 each, otherwise 0. Matches `N(0,1/2)`
    /// through order 4.
    pub fn wigner_off_diagonal() -> Self {
        Self::three_point(1.5f64.sqrt())
    }

    fn three_point(a: f64) -> Self {
        let p = 1.0 / 6.0;
        AtomDistribution { support: vec![(-a, p), (a, p), (0.0, 1.0 - 2.0 * p)] }
    }

    /// `E X^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.support.iter().map(|&(v, p)| p * v.powi(k)).sum()
    }

    /// Maps a uniform `u ∈ (0,1)` to an atom by the cumulative probabilities.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut cumulative = 0.0;
        for &(v, p) in &self.support {
            cumulative += p;
            if u < cumulative {
                return v;
            }
        }
        self.support[self.support.len() - 1].0
    }
}

/// Gaussian laws an atom distribution may be compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentTarget {
    /// `N(0, 1)`.
    RealStdNormal,
    /// Real part of a complex normal with `E|z|² = 1`, i.e. `N(0, 1/2)`.
    ReComplexNormal,
}

impl MomentTarget {
    pub fn moment(self, k: i32) -> f64 {
        let variance: f64 = match self {
            MomentTarget::RealStdNormal => 1.0,
            MomentTarget::ReComplexNormal => 0.5,
        };
        match k {
            0 => 1.0,
            k if k % 2 == 1 => 0.0,
            k => {
                // (k-1)!! σ^k
                let double_factorial: f64 = (1..k).step_by(2).map(f64::from).product();
                double_factorial * variance.powi(k / 2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub order: u32,
    pub atom_moment: f64,
    pub target_moment: f64,
    pub diff: f64,
}

/// Moments of orders 1 to 4 of `atom` against `target`.
pub fn moment_match_report(atom: &AtomDistribution, target: MomentTarget) -> Vec<MomentRow> {
    (1..=4)
        .map(|k| {
            let atom_moment = atom.moment(k);
            let target_moment = target.moment(k);
            MomentRow { order: k as u32, atom_moment, target_moment, diff: atom_moment - target_moment }
        })
        .collect()
}

/// Whether every difference in a report is within the matching tolerance.
pub fn moments_match(report: &[MomentRow]) -> bool {
    report.iter().all(|r| r.diff.abs() <= TOLERANCES.moment_match)
}

/// The storage kind a family is sampled into.
pub fn matrix_kind(family: Family) -> Result<MatrixKind> {
    match family {
        Family::Gue | Family::FourMomentWigner => Ok(MatrixKind::ComplexHermitian),
        Family::Goe => Ok(MatrixKind::RealSymmetric),
        Family::GinibreReal => Ok(MatrixKind::RealGeneral),
        Family::GinibreComplex => Ok(MatrixKind::ComplexGeneral),
        Family::GinibreQuaternion => Err(Error::Unsupported("sampling quaternion Ginibre matrices".into())),
    }
}

/// Draws one matrix of `spec` from `stream`.
pub fn sample(spec: &EnsembleSpec, stream: RandomStream) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(spec.n, matrix_kind(spec.family)?);
    sample_into(spec.family, &mut stream.generator(), &mut m)?;
    Ok(m)
}

/// Fills `m` (which must have the family's kind) from `rng`.
///
/// Entries are drawn in row-major order over the upper triangle for the
/// Hermitian and symmetric families and over the whole matrix otherwise.
pub fn sample_into(family: Family, rng: &mut Generator, m: &mut DenseMatrix) -> Result<()> {
    let kind = matrix_kind(family)?;
    if m.kind() != kind {
        return Err(Error::Input(format!("{family} samples into {kind:?}, not {:?}", m.kind())));
    }
    let n = m.n();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let (re, im) = m.planes_mut();
    match family {
        Family::Gue => {
            for i in 0..n {
                re[i * n + i] = rng.standard_normal();
                im[i * n + i] = 0.0;
                for j in i + 1..n {
                    let a = half * rng.standard_normal();
                    let b = half * rng.standard_normal();
                    re[i * n + j] = a;
                    im[i * n + j] = b;
                    re[j * n + i] = a;
                    im[j * n + i] = -b;
                }
            }
        }
        Family::FourMomentWigner => {
            let diagonal = AtomDistribution::wigner_diagonal();
            let off = AtomDistribution::wigner_off_diagonal();
            for i in 0..n {
                re[i * n + i] = diagonal.quantile(rng.uniform());
                im[i * n + i] = 0.0;
                for j in i + 1..n {
                    let a = off.quantile(rng.uniform());
                    let b = off.quantile(rng.uniform());
                    re[i * n + j] = a;
                    im[i * n + j] = b;
                    re[j * n + i] = a;
                    im[j * n + i] = -b;
                }
            }
        }
        Family::Goe => {
            let sqrt2 = std::f64::consts::SQRT_2;
            for i in 0..n {
                re[i * n + i] = sqrt2 * rng.standard_normal();
                for j in i + 1..n {
                    let a = rng.standard_normal();
                    re[i * n + j] = a;
                    re[j * n + i] = a;
                }
            }
        }
        Family::GinibreReal => {
            for x in re.iter_mut() {
                *x = rng.standard_normal();
            }
        }
        Family::GinibreComplex => {
            for (a, b) in re.iter_mut().zip(im.iter_mut()) {
                *a = half * rng.standard_normal();
                *b = half * rng.standard_normal();
            }
        }
        Family::GinibreQuaternion => unreachable!("rejected by matrix_kind"),
    }
    Ok(())
}
