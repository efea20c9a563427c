//! Globally adaptive Gauss–Kronrod (7, 15) integration of vector-valued
//! integrands on finite intervals.

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> ([f64; N], [f64; N]) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let fc = f(center);
    for c in 0..N {
        kron[c] = WGK[7] * fc[c];
        gauss[c] = WG[3] * fc[c];
    }
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..N {
            let pair = f1[c] + f2[c];
            kron[c] += WGK[i] * pair;
            if i % 2 == 1 {
                gauss[c] += WG[i / 2] * pair;
            }
        }
    }
    let mut err = [0.0; N];
    for c in 0..N {
        kron[c] *= half;
        gauss[c] *= half;
        err[c] = (kron[c] - gauss[c]).abs();
    }
    (kron, err)
}

/// Integrates `f` over `[a, b]`, splitting first at any `breaks` inside the
/// interval, then bisecting the piece with the largest relative error until
/// every component meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    settings: Settings,
) -> Quadrature<N> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    points.push(b);
    points.sort_by(f64::total_cmp);

    let mut heap = BinaryHeap::new();
    let mut total = [0.0; N];
    let mut total_err = [0.0; N];
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = kronrod(&mut f, w[0], w[1]);
        for c in 0..N {
            total[c] += value[c];
            total_err[c] += error[c];
        }
        heap.push(Piece { a: w[0], b: w[1], value, error, priority: 0.0 });
    }
    // priorities depend on the running totals; recompute lazily
    let priority = |err: &[f64; N], total: &[f64; N]| -> f64 {
        (0..N)
            .map(|c| err[c] / total[c].abs().max(settings.abs_tol))
            .fold(0.0, f64::max)
    };
    let mut pieces: Vec<Piece<N>> = heap.into_vec();
    for p in &mut pieces {
        p.priority = priority(&p.error, &total);
    }
    let mut heap: BinaryHeap<Piece<N>> = pieces.into();

    let done = |total: &[f64; N], err: &[f64; N]| {
        (0..N).all(|c| err[c] <= settings.abs_tol.max(settings.rel_tol * total[c].abs()))
    };
    let mut count = heap.len();
    while !done(&total, &total_err) && count < settings.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (lv, le) = kronrod(&mut f, worst.a, mid);
        let (rv, re) = kronrod(&mut f, mid, worst.b);
        for c in 0..N {
            total[c] += lv[c] + rv[c] - worst.value[c];
            total_err[c] += le[c] + re[c] - worst.error[c];
        }
        heap.push(Piece { a: worst.a, b: mid, value: lv, error: le, priority: priority(&le, &total) });
        heap.push(Piece { a: mid, b: worst.b, value: rv, error: re, priority: priority(&re, &total) });
        count += 1;
    }
    // re-sum from the pieces to shed drift accumulated in the running totals
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in heap.iter() {
        for c in 0..N {
            value[c] += p.value[c];
            error[c] += p.error[c];
        }
    }
    Quadrature { value, error, converged: done(&value, &error) }
}
