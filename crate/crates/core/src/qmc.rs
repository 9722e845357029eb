//! Worst-case error of equal-weight quadrature in H(K) for a probability
//! density ρ:
//!
//! e² = ‖h‖² - (2/n) Σ_j h(x_j) + (1/n²) Σ_i Σ_j K(x_i, x_j),
//!
//! where h(t) = ∫ K(t, x) ρ(x) dx is the representer of the integral.
//!
//! `h` and ‖h‖² are computed by the first applicable method:
//! closed form (Gaussian kernel with standard Gaussian density), product
//! quadrature (product kernel with a product density, one-dimensional
//! adaptive Gauss–Kronrod per axis), or Monte Carlo.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::embedding_norm;
use crate::error::{Error, Result};
use crate::kernels::{diag_value, eval_kernel, KernelSpec};
use crate::quadrature::{adaptive_from, adaptive_nested_from, pairwise_sum, Estimate};
use crate::rng::CounterRng;

/// Monte Carlo sample count used when the caller has no preference.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

// Stream ids of the counter generator.
const STREAM_H: u64 = 1;
const STREAM_HH: u64 = 2;
const STREAM_POINTS: u64 = 1 << 20;

const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    StandardGaussian,
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
}

/// A probability density on R^d with the seed of its Monte Carlo streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    d: usize,
    kind: DensityKind,
    seed: u64,
}

impl Density {
    pub fn standard_gaussian(d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("density dimension must be at least 1".into()));
        }
        Ok(Self { d, kind: DensityKind::StandardGaussian, seed })
    }

    pub fn uniform_box(lo: Vec<f64>, hi: Vec<f64>, seed: u64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Domain("uniform box needs matching non-empty lo and hi".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Domain("uniform box requires lo < hi componentwise".into()));
        }
        Ok(Self { d: lo.len(), kind: DensityKind::UniformBox { lo, hi }, seed })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        (0..self.d).map(|j| self.marginal_pdf(j, x[j])).product()
    }

    fn marginal_pdf(&self, j: usize, x: f64) -> f64 {
        match &self.kind {
            DensityKind::StandardGaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            DensityKind::UniformBox { lo, hi } => {
                if x >= lo[j] && x <= hi[j] {
                    1.0 / (hi[j] - lo[j])
                } else {
                    0.0
                }
            }
        }
    }

    /// The k-th sample of a stream; coordinate j uses counter k·d + j.
    pub fn sample(&self, rng: &CounterRng, k: u64) -> Vec<f64> {
        let base = k * self.d as u64;
        (0..self.d)
            .map(|j| {
                let c = base + j as u64;
                match &self.kind {
                    DensityKind::StandardGaussian => rng.normal(c),
                    DensityKind::UniformBox { lo, hi } => lo[j] + (hi[j] - lo[j]) * rng.uniform(c),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub generator: String,
}

/// An ordered list of n ≥ 1 points in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    points: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>, generator: impl Into<String>) -> Result<Self> {
        let d = points.first().map(|p| p.len()).unwrap_or(0);
        if points.is_empty() || d == 0 {
            return Err(Error::Domain("a point set needs at least one point of dimension >= 1".into()));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        Ok(Self { d, points, provenance: Provenance { seed: None, stream: None, generator: generator.into() } })
    }

    /// n i.i.d. draws from `rho` on stream `stream` of the generator seeded with `seed`.
    pub fn sample(rho: &Density, n: usize, seed: u64, stream: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a point set needs n >= 1".into()));
        }
        let rng = CounterRng::new(seed).stream(stream);
        let points = (0..n as u64).map(|k| rho.sample(&rng, k)).collect();
        Ok(Self {
            d: rho.d(),
            points,
            provenance: Provenance { seed: Some(seed), stream: Some(stream), generator: CounterRng::NAME.into() },
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// How the representer terms were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresenterMethod {
    ClosedForm,
    ProductQuadrature,
    MonteCarlo,
}

/// Squared worst-case error and its three terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WceReport {
    pub n: usize,
    /// hh - cross + gram, not clamped.
    pub e2: f64,
    /// √max(e2, 0).
    pub e: f64,
    /// ‖h‖²
    pub hh: f64,
    /// (2/n) Σ h(x_j)
    pub cross: f64,
    /// (1/n²) Σ Σ K(x_i, x_j)
    pub gram: f64,
    /// Monte Carlo standard error of e2, 0 without sampling.
    pub mc_std_err: f64,
    /// Quadrature error estimate of e2, 0 without quadrature.
    pub quad_err: f64,
    pub method: RepresenterMethod,
}

/// Evaluator of h and ‖h‖² for one (kernel, density) pair.
struct Representer<'a> {
    spec: &'a KernelSpec,
    rho: &'a Density,
    method: RepresenterMethod,
    samples: Vec<Vec<f64>>,
}

impl<'a> Representer<'a> {
    fn new(spec: &'a KernelSpec, rho: &'a Density, mc_samples: usize) -> Result<Self> {
        spec.validate()?;
        if spec.d() != rho.d() {
            return Err(Error::DimensionMismatch { expected: spec.d(), got: rho.d() });
        }
        let method = if matches!(spec, KernelSpec::GaussianRadial { .. })
            && rho.kind == DensityKind::StandardGaussian
        {
            RepresenterMethod::ClosedForm
        } else if spec.is_product() {
            RepresenterMethod::ProductQuadrature
        } else {
            RepresenterMethod::MonteCarlo
        };
        let samples = if method == RepresenterMethod::MonteCarlo {
            if mc_samples < 2 {
                return Err(Error::Domain("Monte Carlo needs at least 2 samples".into()));
            }
            let rng = CounterRng::new(rho.seed).stream(STREAM_H);
            (0..mc_samples as u64).into_par_iter().map(|k| rho.sample(&rng, k)).collect()
        } else {
            Vec::new()
        };
        Ok(Self { spec, rho, method, samples })
    }

    /// h(t) with its standard error (Monte Carlo) or quadrature error.
    fn h(&self, t: &[f64]) -> Result<Estimate> {
        let d = self.rho.d as i32;
        match self.method {
            RepresenterMethod::ClosedForm => {
                let r2: f64 = t.iter().map(|x| x * x).sum();
                Ok(Estimate::new((4.0 * PI).powf(-(d as f64) / 2.0) * (-r2 / 4.0).exp(), 0.0))
            }
            RepresenterMethod::ProductQuadrature => {
                let factors: Vec<Estimate> = (0..t.len()).map(|j| self.h_axis(j, t[j])).collect();
                Ok(product_estimate(&factors))
            }
            RepresenterMethod::MonteCarlo => {
                let values = self
                    .samples
                    .iter()
                    .map(|x| eval_kernel(self.spec, t, x))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(mean_and_std_err(&values))
            }
        }
    }

    // ∫ k(t - x) ρ_j(x) dx for the univariate factor k.
    fn h_axis(&self, j: usize, t: f64) -> Estimate {
        let k = |r: f64| self.spec.product_factor(r).unwrap_or(f64::NAN);
        match &self.rho.kind {
            DensityKind::UniformBox { lo, hi } => {
                let (a, b) = (lo[j], hi[j]);
                let breaks: Vec<f64> = if t > a && t < b { vec![a, t, b] } else { vec![a, b] };
                let mut f = |x: f64| k(t - x);
                let e = adaptive_from(&mut f, &breaks, 1e-15, 1e-13);
                Estimate::new(e.value / (b - a), e.err / (b - a))
            }
            DensityKind::StandardGaussian => {
                // split at the kink x = t and map each half-line to (0, 1)
                let mut f = |tau: f64| {
                    let one_minus = 1.0 - tau;
                    let y = tau / one_minus;
                    let jac = 1.0 / (one_minus * one_minus);
                    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
                    let kk = k(y);
                    jac * kk * (phi(t - y) + phi(t + y))
                };
                adaptive_from(&mut f, &[0.0, 0.5, 1.0], 1e-15, 1e-13)
            }
        }
    }

    /// ‖h‖² = ∫∫ K(x, y) ρ(x) ρ(y) dx dy.
    fn hh(&self, mc_samples: usize) -> Result<Estimate> {
        let d = self.rho.d as i32;
        match self.method {
            RepresenterMethod::ClosedForm => Ok(Estimate::new((6.0 * PI).powf(-(d as f64) / 2.0), 0.0)),
            RepresenterMethod::ProductQuadrature => {
                let factors: Vec<Estimate> = (0..self.rho.d).map(|j| self.hh_axis(j)).collect();
                Ok(product_estimate(&factors))
            }
            RepresenterMethod::MonteCarlo => {
                // U-statistic over disjoint consecutive pairs of one stream
                let rng = CounterRng::new(self.rho.seed).stream(STREAM_HH);
                let pairs = (mc_samples / 2).max(2) as u64;
                let values = (0..pairs)
                    .into_par_iter()
                    .map(|i| {
                        let x = self.rho.sample(&rng, 2 * i);
                        let y = self.rho.sample(&rng, 2 * i + 1);
                        eval_kernel(self.spec, &x, &y)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(mean_and_std_err(&values))
            }
        }
    }

    fn hh_axis(&self, j: usize) -> Estimate {
        match &self.rho.kind {
            DensityKind::UniformBox { lo, hi } => {
                let (a, b) = (lo[j], hi[j]);
                let mut f = |y: f64| {
                    let e = self.h_axis(j, y);
                    Estimate::new(e.value / (b - a), e.err / (b - a))
                };
                adaptive_nested_from(&mut f, &[a, 0.5 * (a + b), b], 1e-14, 1e-12)
            }
            DensityKind::StandardGaussian => {
                let mut f = |tau: f64| {
                    let one_minus = 1.0 - tau;
                    let y = tau / one_minus;
                    let jac = 1.0 / (one_minus * one_minus);
                    let w = jac * (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
                    // h_j is even for the standard Gaussian
                    let e = self.h_axis(j, y);
                    Estimate::new(2.0 * w * e.value, 2.0 * w * e.err)
                };
                adaptive_nested_from(&mut f, &[0.0, 0.5, 1.0], 1e-14, 1e-12)
            }
        }
    }
}

fn product_estimate(factors: &[Estimate]) -> Estimate {
    let value = factors.iter().map(|e| e.value).product();
    let upper: f64 = factors.iter().map(|e| e.value.abs() + e.err).product();
    let lower: f64 = factors.iter().map(|e| e.value.abs()).product();
    Estimate::new(value, upper - lower)
}

// Mean and its standard error, summed in fixed-size chunks so the result does
// not depend on the thread count.
fn mean_and_std_err(values: &[f64]) -> Estimate {
    let m = values.len() as f64;
    let sums: Vec<f64> = values.par_chunks(MC_CHUNK).map(|c| c.iter().sum()).collect();
    let mean = pairwise_sum(&sums) / m;
    let sq: Vec<f64> = values
        .par_chunks(MC_CHUNK)
        .map(|c| c.iter().map(|v| (v - mean) * (v - mean)).sum())
        .collect();
    let var = pairwise_sum(&sq) / (m - 1.0);
    Estimate::new(mean, (var / m).sqrt())
}

/// h(t) = ∫ K(t, x) ρ(x) dx; the error field is the Monte Carlo standard
/// error, or the quadrature error for product quadrature, and 0 in closed form.
pub fn representer_h(spec: &KernelSpec, rho: &Density, t: &[f64], mc_samples: usize) -> Result<Estimate> {
    if t.len() != rho.d() {
        return Err(Error::DimensionMismatch { expected: rho.d(), got: t.len() });
    }
    Representer::new(spec, rho, mc_samples)?.h(t)
}

/// ‖S_ρ‖² = ‖h‖² = ∫∫ K(x, t) ρ(x) ρ(t) dx dt.
pub fn representer_norm_sq(spec: &KernelSpec, rho: &Density, mc_samples: usize) -> Result<Estimate> {
    Representer::new(spec, rho, mc_samples)?.hh(mc_samples)
}

/// Which method [`worst_case_error`] will use for this pair.
pub fn representer_method(spec: &KernelSpec, rho: &Density) -> Result<RepresenterMethod> {
    Ok(Representer::new(spec, rho, 2)?.method)
}

/// (1/n²) Σ_i Σ_j K(x_i, x_j), rows in parallel, summed in index order.
fn gram_average(spec: &KernelSpec, pts: &PointSet) -> Result<f64> {
    let diag = diag_value(spec)?;
    let p = pts.points();
    let rows = (0..p.len())
        .into_par_iter()
        .map(|i| {
            let off = (i + 1..p.len()).map(|j| eval_kernel(spec, &p[i], &p[j])).collect::<Result<Vec<f64>>>()?;
            Ok(diag + 2.0 * pairwise_sum(&off))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = p.len() as f64;
    Ok(pairwise_sum(&rows) / (n * n))
}

fn report_with(rep: &Representer, hh: Estimate, pts: &PointSet) -> Result<WceReport> {
    let n = pts.len();
    let hs = pts.points().par_iter().map(|x| rep.h(x)).collect::<Result<Vec<Estimate>>>()?;
    let hsum = pairwise_sum(&hs.iter().map(|e| e.value).collect::<Vec<_>>());
    let herr: f64 = hs.iter().map(|e| e.err).sum();
    let cross = 2.0 * hsum / n as f64;
    let cross_err = 2.0 * herr / n as f64;
    let gram = gram_average(rep.spec, pts)?;
    let e2 = hh.value - cross + gram;
    let (mc_std_err, quad_err) = match rep.method {
        RepresenterMethod::MonteCarlo => (hh.err.hypot(cross_err), 0.0),
        RepresenterMethod::ProductQuadrature => (0.0, hh.err + cross_err),
        RepresenterMethod::ClosedForm => (0.0, 0.0),
    };
    Ok(WceReport { n, e2, e: e2.max(0.0).sqrt(), hh: hh.value, cross, gram, mc_std_err, quad_err, method: rep.method })
}

/// Squared worst-case error of the equal-weight rule on `pts`.
pub fn worst_case_error(spec: &KernelSpec, rho: &Density, pts: &PointSet, mc_samples: usize) -> Result<WceReport> {
    if pts.d() != spec.d() {
        return Err(Error::DimensionMismatch { expected: spec.d(), got: pts.d() });
    }
    let rep = Representer::new(spec, rho, mc_samples)?;
    let hh = rep.hh(mc_samples)?;
    report_with(&rep, hh, pts)
}

/// K(0,0) / n, the mean of e² over i.i.d. ρ-distributed point sets is at most this.
pub fn mean_square_bound(spec: &KernelSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(diag_value(spec)? / n as f64)
}

/// Result of [`search_point_set`].
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub points: PointSet,
    pub report: WceReport,
    /// Index of the winning trial.
    pub best_trial: usize,
    pub trials: usize,
    /// ‖I_K‖ / √n.
    pub bound: f64,
    /// e ≤ bound + 3·mc_std_err.
    pub within_bound: bool,
}

/// Draws `trials` i.i.d. point sets (trial k on stream k of `seed`) and keeps
/// the one with the smallest e². The representer terms use common random
/// numbers across trials, so adding trials never increases the result.
pub fn search_point_set(
    spec: &KernelSpec,
    rho: &Density,
    n: usize,
    trials: usize,
    seed: u64,
    mc_samples: usize,
) -> Result<SearchResult> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let rep = Representer::new(spec, rho, mc_samples)?;
    let hh = rep.hh(mc_samples)?;
    let mut best: Option<(usize, PointSet, WceReport)> = None;
    for k in 0..trials {
        let pts = PointSet::sample(rho, n, seed, STREAM_POINTS + k as u64)?;
        let report = report_with(&rep, hh, &pts)?;
        if best.as_ref().is_none_or(|(_, _, b)| report.e2 < b.e2) {
            best = Some((k, pts, report));
        }
    }
    let (best_trial, points, report) = best.expect("at least one trial");
    let bound = embedding_norm(spec)? / (n as f64).sqrt();
    let within_bound = report.e <= bound + 3.0 * report.mc_std_err;
    Ok(SearchResult { points, report, best_trial, trials, bound, within_bound })
}

/// Both information-complexity bounds for one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityBounds {
    pub eps: f64,
    pub embedding_norm: f64,
    /// ⌈(‖I_K‖/ε)²⌉
    pub generic: u64,
    /// ⌈100.6009·(6/11)^{2d}/ε²⌉ for W^s_2(R^d) kernels.
    pub sobolev_cap: Option<u64>,
}

/// Constant of the dimension-uniform cap, 10.03².
pub const SOBOLEV_CAP_CONSTANT: f64 = 100.6009;

fn ceil_tolerant(q: f64) -> u64 {
    let r = q.round();
    if (q - r).abs() <= 1e-12 * q.max(1.0) {
        r as u64
    } else {
        q.ceil() as u64
    }
}

/// ⌈100.6009·(6/11)^{2d}/ε²⌉.
pub fn sobolev_complexity_cap(d: usize, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive".into()));
    }
    Ok(ceil_tolerant(SOBOLEV_CAP_CONSTANT * (6.0f64 / 11.0).powi(2 * d as i32) / (eps * eps)))
}

/// ⌈(‖I_K‖/ε)²⌉ with the Sobolev cap for W^s_2 kernels.
pub fn info_complexity_bound(spec: &KernelSpec, eps: f64) -> Result<ComplexityBounds> {
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let norm = embedding_norm(spec)?;
    let sobolev_cap = match spec {
        KernelSpec::SobolevFourier { d, .. } => Some(sobolev_complexity_cap(*d, eps)?),
        KernelSpec::SobolevUnivariate { .. } => Some(sobolev_complexity_cap(1, eps)?),
        _ => None,
    };
    Ok(ComplexityBounds { eps, embedding_norm: norm, generic: ceil_tolerant((norm / eps).powi(2)), sobolev_cap })
}
