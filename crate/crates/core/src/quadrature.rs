//! One-dimensional quadrature building blocks: Gauss–Legendre rules of any
//! order, the 7/15 Gauss–Kronrod pair, adaptive bisection, and Wynn's epsilon
//! algorithm for oscillatory tails.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// An integral value together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn new(value: f64, err: f64) -> Self {
        Self { value, err }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.err + rhs.err)
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the n-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be at least 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared cached rule of order n.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae ≥ 0).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Gauss–Kronrod 7/15 on [a, b]; the error is |K15 - G7|.
pub fn gauss_kronrod15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> Estimate {
    let (quad, _) = gauss_kronrod15_nested(a, b, &mut |x| Estimate::new(f(x), 0.0));
    quad
}

/// Gauss–Kronrod 7/15 for an integrand that is itself an estimate. Returns
/// the rule estimate and, separately, the Kronrod integral of the integrand's
/// error.
pub fn gauss_kronrod15_nested<F: FnMut(f64) -> Estimate>(a: f64, b: f64, f: &mut F) -> (Estimate, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc.value * WGK[7];
    let mut gauss = fc.value * WG[3];
    let mut inner = fc.err * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(mid - dx), f(mid + dx));
        let pair = lo.value + hi.value;
        kron += WGK[j] * pair;
        inner += WGK[j] * (lo.err + hi.err);
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (Estimate::new(kron * half, ((kron - gauss) * half).abs()), inner * half.abs())
}

/// Adaptive Gauss–Kronrod on [a, b] by recursive bisection until the local
/// error is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Estimate {
    adaptive_from(f, &[a, b], abs_tol, rel_tol)
}

/// Like [`adaptive`] but starting from the given breakpoints. Intervals are
/// refined in order of decreasing error estimate; the final sum is taken in
/// breakpoint order so results do not depend on refinement history.
pub fn adaptive_from<F: FnMut(f64) -> f64>(f: &mut F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Estimate {
    adaptive_nested_from(&mut |x| Estimate::new(f(x), 0.0), breaks, abs_tol, rel_tol)
}

/// Adaptive integration of an estimate-valued integrand. Refinement is driven
/// by the rule error alone; the returned error adds the integrated error of
/// the integrand.
pub fn adaptive_nested_from<F: FnMut(f64) -> Estimate>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Estimate {
    const MAX_INTERVALS: usize = 4000;
    let mut pieces: Vec<(f64, f64, Estimate, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (q, e) = gauss_kronrod15_nested(w[0], w[1], f);
            (w[0], w[1], q, e)
        })
        .collect();
    loop {
        let total: Estimate = pieces.iter().map(|p| p.2).sum();
        let tol = abs_tol.max(rel_tol * total.value.abs());
        if total.err <= tol || pieces.len() >= MAX_INTERVALS {
            pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
            let value = pieces.iter().map(|p| p.2.value).sum();
            let err = pieces.iter().map(|p| p.2.err + p.3).sum();
            return Estimate::new(value, err);
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.2.err.total_cmp(&q.2.err))
            .expect("non-empty partition");
        let (a, b, _, _) = pieces.swap_remove(idx);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // interval cannot be split further in floating point
            let (q, e) = gauss_kronrod15_nested(a, b, f);
            pieces.push((a, b, Estimate::new(q.value, 0.0), e + q.err));
            continue;
        }
        let (q1, e1) = gauss_kronrod15_nested(a, m, f);
        let (q2, e2) = gauss_kronrod15_nested(m, b, f);
        pieces.push((a, m, q1, e1));
        pieces.push((m, b, q2, e2));
    }
}

/// Composite Gauss–Legendre over `panels` equal panels of [a, b].
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .collect();
    pairwise_sum(&parts)
}

/// Pairwise (tree) summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Wynn's epsilon algorithm applied incrementally to a sequence of partial
/// sums. Keeps the last diagonal and the three most recent extrapolants.
#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    table: Vec<f64>,
    recent: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the next partial sum and returns the current extrapolated limit
    /// with an error estimate.
    pub fn push(&mut self, s: f64) -> Estimate {
        // table holds the previous anti-diagonal: eps_{-1}=0 column implied
        let mut prev2 = 0.0; // ε_{k-1}^{(n+1)} from the previous diagonal
        let mut current = s;
        let mut new_row = Vec::with_capacity(self.table.len() + 1);
        new_row.push(s);
        for &old in &self.table {
            let diff = current - old;
            let next = if diff.abs() < f64::MIN_POSITIVE || !diff.is_finite() {
                f64::INFINITY
            } else {
                prev2 + 1.0 / diff
            };
            prev2 = old;
            current = next;
            if !current.is_finite() {
                break;
            }
            new_row.push(current);
        }
        self.table = new_row;
        // even columns (index 0, 2, 4, ...) hold extrapolants
        let best = self
            .table
            .iter()
            .enumerate()
            .filter(|(i, v)| i % 2 == 0 && v.is_finite())
            .map(|(_, v)| *v)
            .last()
            .unwrap_or(s);
        self.recent.push(best);
        let n = self.recent.len();
        let err = if n >= 3 {
            (self.recent[n - 1] - self.recent[n - 2]).abs() + (self.recent[n - 1] - self.recent[n - 3]).abs()
        } else {
            f64::INFINITY
        };
        Estimate::new(best, err)
    }
}
