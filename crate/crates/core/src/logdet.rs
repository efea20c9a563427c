//! Dense square matrices and `log|det|` by partially pivoted LU.
//!
//! Complex entries are stored as separate real and imaginary planes so the
//! elimination loop is a plain element-wise update that vectorizes well. The
//! kernel never uses fused multiply-add, so the result is bit-identical
//! whichever instruction set is picked at run time.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use crate::text::sig17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    RealGeneral,
    RealSymmetric,
    ComplexHermitian,
    ComplexGeneral,
}

impl MatrixKind {
    pub fn is_complex(self) -> bool {
        matches!(self, MatrixKind::ComplexHermitian | MatrixKind::ComplexGeneral)
    }
}

/// Row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    kind: MatrixKind,
    re: Vec<f64>,
    /// Empty for real kinds.
    im: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize, kind: MatrixKind) -> Self {
        let im = if kind.is_complex() { vec![0.0; n * n] } else { Vec::new() };
        DenseMatrix { n, kind, re: vec![0.0; n * n], im }
    }

    pub fn from_real(n: usize, kind: MatrixKind, entries: Vec<f64>) -> Result<Self> {
        if kind.is_complex() {
            return Err(Error::Input(format!("{kind:?} needs complex entries")));
        }
        if entries.len() != n * n {
            return Err(Error::Input(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Ok(DenseMatrix { n, kind, re: entries, im: Vec::new() })
    }

    pub fn from_complex(n: usize, kind: MatrixKind, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if !kind.is_complex() {
            return Err(Error::Input(format!("{kind:?} takes real entries")));
        }
        if re.len() != n * n || im.len() != n * n {
            return Err(Error::Input(format!("expected {} entries per plane", n * n)));
        }
        Ok(DenseMatrix { n, kind, re, im })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DenseMatrix::zeros(n, MatrixKind::RealSymmetric);
        for (i, v) in values.iter().enumerate() {
            m.re[i * n + i] = *v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn is_complex(&self) -> bool {
        self.kind.is_complex()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.n + j;
        Complex64::new(self.re[k], if self.is_complex() { self.im[k] } else { 0.0 })
    }

    /// Sets an entry; the imaginary part is ignored for real kinds.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        let k = i * self.n + j;
        self.re[k] = value.re;
        if self.is_complex() {
            self.im[k] = value.im;
        }
    }

    pub fn real_part(&self) -> &[f64] {
        &self.re
    }

    pub fn imag_part(&self) -> &[f64] {
        &self.im
    }

    pub(crate) fn planes_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.re, &mut self.im)
    }

    /// Whether the declared symmetry holds exactly.
    pub fn has_declared_structure(&self) -> bool {
        let n = self.n;
        match self.kind {
            MatrixKind::RealGeneral | MatrixKind::ComplexGeneral => true,
            MatrixKind::RealSymmetric => {
                (0..n).all(|i| (0..i).all(|j| self.re[i * n + j] == self.re[j * n + i]))
            }
            MatrixKind::ComplexHermitian => (0..n).all(|i| {
                self.im[i * n + i] == 0.0
                    && (0..i).all(|j| {
                        self.re[i * n + j] == self.re[j * n + i] && self.im[i * n + j] == -self.im[j * n + i]
                    })
            }),
        }
    }

    /// `c · self` for a real scalar.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.re.iter_mut().chain(out.im.iter_mut()).for_each(|x| *x *= c);
        out
    }

    /// `P self Q` for row permutation `rows` and column permutation `cols`;
    /// entry `(i, j)` of the result is `self[rows[i]][cols[j]]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let n = self.n;
        let kind = match self.kind {
            MatrixKind::RealSymmetric => MatrixKind::RealGeneral,
            MatrixKind::ComplexHermitian => MatrixKind::ComplexGeneral,
            k => k,
        };
        let mut out = DenseMatrix::zeros(n, kind);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(rows[i], cols[j]));
            }
        }
        out
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diagonal(a: &DenseMatrix, b: &DenseMatrix) -> Self {
        let n = a.n + b.n;
        let complex = a.is_complex() || b.is_complex();
        let kind = if complex { MatrixKind::ComplexGeneral } else { MatrixKind::RealGeneral };
        let mut out = DenseMatrix::zeros(n, kind);
        for i in 0..a.n {
            for j in 0..a.n {
                out.set(i, j, a.get(i, j));
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                out.set(a.n + i, a.n + j, b.get(i, j));
            }
        }
        out
    }

    /// Row-major CSV: one line per row, `re,im` column pairs for complex kinds.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                let k = i * self.n + j;
                out.push_str(&sig17(self.re[k]));
                if self.is_complex() {
                    let _ = write!(out, ",{}", sig17(self.im[k]));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Result of a determinant factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    /// `log|det|`, or `-∞` when a pivot is exactly zero.
    pub log_abs: f64,
    /// `|sin(arg det)|`: the relative size of the imaginary part of the
    /// determinant. Zero for real matrices.
    pub imag_ratio: f64,
}

/// `log|det m|`.
pub fn log_abs_det(m: &DenseMatrix) -> Result<f64> {
    Ok(factorize(&mut m.clone())?.log_abs)
}

/// [`log_abs_det`] together with the determinant's phase information.
pub fn log_det(m: &DenseMatrix) -> Result<LogDet> {
    factorize(&mut m.clone())
}

/// Factorizes `m` in place, destroying its contents.
pub fn factorize(m: &mut DenseMatrix) -> Result<LogDet> {
    let n = m.n;
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if m.re.iter().chain(&m.im).any(|x| !x.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    if m.is_complex() {
        Ok(factorize_complex(n, &mut m.re, &mut m.im))
    } else {
        Ok(factorize_real(n, &mut m.re))
    }
}

const SINGULAR: LogDet = LogDet { log_abs: f64::NEG_INFINITY, imag_ratio: 0.0 };

fn factorize_real(n: usize, a: &mut [f64]) -> LogDet {
    let mut sum = CompensatedSum::new();
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return SINGULAR;
        }
        if p != k {
            swap_rows(a, n, k, p);
        }
        let pivot = a[k * n + k];
        sum.add(best.ln());
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n + k + 1..k * n + n];
        for row in tail.chunks_exact_mut(n) {
            let l = row[k] / pivot;
            if l != 0.0 {
                kernels::axpy_real(&mut row[k + 1..], pivot_row, l);
            }
        }
    }
    LogDet { log_abs: sum.value(), imag_ratio: 0.0 }
}

fn factorize_complex(n: usize, re: &mut [f64], im: &mut [f64]) -> LogDet {
    let mut sum = CompensatedSum::new();
    let mut phase = CompensatedSum::new();
    for k in 0..n {
        let mut p = k;
        let mut best = re[k * n + k] * re[k * n + k] + im[k * n + k] * im[k * n + k];
        for i in k + 1..n {
            let v = re[i * n + k] * re[i * n + k] + im[i * n + k] * im[i * n + k];
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return SINGULAR;
        }
        if p != k {
            swap_rows(re, n, k, p);
            swap_rows(im, n, k, p);
            phase.add(std::f64::consts::PI);
        }
        let (pr, pi) = (re[k * n + k], im[k * n + k]);
        sum.add(libm::hypot(pr, pi).ln());
        phase.add(libm::atan2(pi, pr));
        // 1 / pivot
        let scale = if pr.abs() >= pi.abs() {
            let t = pi / pr;
            let d = pr + pi * t;
            (1.0 / d, -t / d)
        } else {
            let t = pr / pi;
            let d = pr * t + pi;
            (t / d, -1.0 / d)
        };
        let (re_head, re_tail) = re.split_at_mut((k + 1) * n);
        let (im_head, im_tail) = im.split_at_mut((k + 1) * n);
        let pivot_re = &re_head[k * n + k + 1..k * n + n];
        let pivot_im = &im_head[k * n + k + 1..k * n + n];
        for (row_re, row_im) in re_tail.chunks_exact_mut(n).zip(im_tail.chunks_exact_mut(n)) {
            let (xr, xi) = (row_re[k], row_im[k]);
            if xr == 0.0 && xi == 0.0 {
                continue;
            }
            let lr = xr * scale.0 - xi * scale.1;
            let li = xr * scale.1 + xi * scale.0;
            kernels::axpy_complex(&mut row_re[k + 1..], &mut row_im[k + 1..], pivot_re, pivot_im, lr, li);
        }
    }
    LogDet { log_abs: sum.value(), imag_ratio: phase.value().sin().abs() }
}

fn swap_rows(a: &mut [f64], n: usize, r1: usize, r2: usize) {
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    let (head, tail) = a.split_at_mut(hi * n);
    head[lo * n..lo * n + n].swap_with_slice(&mut tail[..n]);
}

/// Row updates `x -= l·y`, compiled for several instruction sets and picked
/// at run time. All variants perform the same IEEE operations per element.
mod kernels {
    #[inline(always)]
    fn axpy_real_body(x: &mut [f64], y: &[f64], l: f64) {
        for (a, b) in x.iter_mut().zip(y) {
            *a -= l * b;
        }
    }

    #[inline(always)]
    fn axpy_complex_body(xr: &mut [f64], xi: &mut [f64], yr: &[f64], yi: &[f64], lr: f64, li: f64) {
        let len = xr.len().min(xi.len()).min(yr.len()).min(yi.len());
        let (xr, xi, yr, yi) = (&mut xr[..len], &mut xi[..len], &yr[..len], &yi[..len]);
        for j in 0..len {
            let (br, bi) = (yr[j], yi[j]);
            xr[j] -= lr * br - li * bi;
            xi[j] -= lr * bi + li * br;
        }
    }

    #[cfg(target_arch = "x86_64")]
    mod x86 {
        #[target_feature(enable = "avx512f")]
        pub unsafe fn axpy_real_avx512(x: &mut [f64], y: &[f64], l: f64) {
            super::axpy_real_body(x, y, l)
        }

        #[target_feature(enable = "avx2")]
        pub unsafe fn axpy_real_avx2(x: &mut [f64], y: &[f64], l: f64) {
            super::axpy_real_body(x, y, l)
        }

        #[target_feature(enable = "avx512f")]
        pub unsafe fn axpy_complex_avx512(xr: &mut [f64], xi: &mut [f64], yr: &[f64], yi: &[f64], lr: f64, li: f64) {
            super::axpy_complex_body(xr, xi, yr, yi, lr, li)
        }

        #[target_feature(enable = "avx2")]
        pub unsafe fn axpy_complex_avx2(xr: &mut [f64], xi: &mut [f64], yr: &[f64], yi: &[f64], lr: f64, li: f64) {
            super::axpy_complex_body(xr, xi, yr, yi, lr, li)
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Level {
        Baseline,
        #[cfg(target_arch = "x86_64")]
        Avx2,
        #[cfg(target_arch = "x86_64")]
        Avx512,
    }

    fn level() -> Level {
        use std::sync::OnceLock;
        static LEVEL: OnceLock<Level> = OnceLock::new();
        *LEVEL.get_or_init(|| {
            #[cfg(target_arch = "x86_64")]
            {
                if std::env::var_os("RMTDET_NO_SIMD").is_none() {
                    if std::arch::is_x86_feature_detected!("avx512f") {
                        return Level::Avx512;
                    }
                    if std::arch::is_x86_feature_detected!("avx2") {
                        return Level::Avx2;
                    }
                }
            }
            Level::Baseline
        })
    }

    pub fn axpy_real(x: &mut [f64], y: &[f64], l: f64) {
        match level() {
            // SAFETY: the feature was detected at run time.
            #[cfg(target_arch = "x86_64")]
            Level::Avx512 => unsafe { x86::axpy_real_avx512(x, y, l) },
            #[cfg(target_arch = "x86_64")]
            Level::Avx2 => unsafe { x86::axpy_real_avx2(x, y, l) },
            Level::Baseline => axpy_real_body(x, y, l),
        }
    }

    pub fn axpy_complex(xr: &mut [f64], xi: &mut [f64], yr: &[f64], yi: &[f64], lr: f64, li: f64) {
        match level() {
            // SAFETY: the feature was detected at run time.
            #[cfg(target_arch = "x86_64")]
            Level::Avx512 => unsafe { x86::axpy_complex_avx512(xr, xi, yr, yi, lr, li) },
            #[cfg(target_arch = "x86_64")]
            Level::Avx2 => unsafe { x86::axpy_complex_avx2(xr, xi, yr, yi, lr, li) },
            Level::Baseline => axpy_complex_body(xr, xi, yr, yi, lr, li),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_real(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_real(n, MatrixKind::RealGeneral, (0..n * n).map(|_| uniform(&mut rng)).collect()).unwrap()
    }

    fn random_complex(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let re = (0..n * n).map(|_| uniform(&mut rng)).collect();
        let im = (0..n * n).map(|_| uniform(&mut rng)).collect();
        DenseMatrix::from_complex(n, MatrixKind::ComplexGeneral, re, im).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn diagonal_and_singular() {
        assert!(close(log_abs_det(&DenseMatrix::diagonal(&[2.0, 3.0])).unwrap(), 6f64.ln()));
        let m = DenseMatrix::from_real(2, MatrixKind::RealGeneral, vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(log_abs_det(&m).unwrap(), f64::NEG_INFINITY);
        let bad = DenseMatrix::from_real(1, MatrixKind::RealGeneral, vec![f64::NAN]).unwrap();
        assert!(matches!(log_abs_det(&bad), Err(Error::Input(_))));
    }

    #[test]
    fn cofactor_oracle() {
        let m = random_real(3, 7);
        let a = |i, j| m.get(i, j).re;
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert!(close(log_abs_det(&m).unwrap(), det.abs().ln()));

        let c = random_complex(3, 8);
        let a = |i, j| c.get(i, j);
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let ld = log_det(&c).unwrap();
        assert!(close(ld.log_abs, det.norm().ln()));
        assert!((ld.imag_ratio - (det.im / det.norm()).abs()).abs() < 1e-10);
    }

    #[test]
    fn permutation_invariance() {
        for (n, seed) in [(5usize, 1u64), (17, 2), (40, 3)] {
            for m in [random_real(n, seed), random_complex(n, seed)] {
                let rows: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
                let cols: Vec<usize> = (0..n).rev().collect();
                let rows = if n % 7 == 0 { (0..n).rev().collect() } else { rows };
                assert!(close(log_abs_det(&m).unwrap(), log_abs_det(&m.permuted(&rows, &cols)).unwrap()));
            }
        }
    }

    #[test]
    fn block_additivity_and_scaling() {
        let a = random_real(6, 11);
        let b = random_complex(9, 12);
        let ab = DenseMatrix::block_diagonal(&a, &b);
        assert!(close(log_abs_det(&ab).unwrap(), log_abs_det(&a).unwrap() + log_abs_det(&b).unwrap()));
        for c in [2.0, 1.0 / 3.0, -1.0] {
            for m in [&a, &b] {
                let expect = m.n() as f64 * f64::abs(c).ln() + log_abs_det(m).unwrap();
                assert!(close(log_abs_det(&m.scaled(c)).unwrap(), expect));
            }
        }
    }

    #[test]
    fn hermitian_determinant_is_real() {
        let n = 30;
        let g = random_complex(n, 5);
        let mut h = DenseMatrix::zeros(n, MatrixKind::ComplexHermitian);
        for i in 0..n {
            for j in 0..=i {
                let v = g.get(i, j) + g.get(j, i).conj();
                h.set(i, j, v);
                h.set(j, i, v.conj());
            }
        }
        assert!(h.has_declared_structure());
        assert!(log_det(&h).unwrap().imag_ratio < 1e-8);
    }

    #[test]
    fn csv_round_trip() {
        let m = random_complex(3, 4);
        let csv = m.to_csv();
        let values: Vec<f64> = csv.split([',', '\n']).filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect();
        assert_eq!(values.len(), 18);
        assert_eq!(values[0], m.real_part()[0]);
        assert_eq!(values[1], m.imag_part()[0]);
    }
}
