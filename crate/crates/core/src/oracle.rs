//! Fourier-integral evaluation of translation-invariant kernels,
//!
//! K(x, t) = ∫_{R^d} ∏_j cos(2π(x_j - t_j)u_j) / v(u)² du,
//!
//! used both as the evaluator for kernels without a closed form and as the
//! referee for every closed form.
//!
//! Three strategies are used, picked by [`oracle_mode`]:
//!
//! * compact: the symbol is infinite outside a box, so the box is integrated
//!   by composite Gauss–Legendre;
//! * grid: the integral is truncated to [-U, U]^d with U found by doubling
//!   until the analytic tail bound is below half the tolerance, then
//!   integrated on a tensor grid of Gauss–Legendre panels. The error estimate
//!   is |fine - coarse| (panel width halved) plus the tail bound;
//! * far field: when the tail bound would need a grid larger than the node
//!   budget, the integral is computed as iterated one-dimensional integrals
//!   over [0, ∞). Axes without oscillation use the map u = L·τ/(1 - τ);
//!   oscillating axes are split at half periods and the alternating tail is
//!   summed with Wynn's epsilon algorithm.
//!
//! Tensor-product symbols are integrated axis by axis and multiplied.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_nested_from, pairwise_sum, Estimate, GaussLegendre, WynnEpsilon};
use crate::special::{binomial, gamma};
use crate::weights::{cached_multi_indices, MultiIndexWeights};

/// Largest dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 3;

/// Fine-grid node count above which the grid strategy is abandoned.
pub const GRID_NODE_BUDGET: usize = 1 << 18;

/// Node limit when the caller forces a truncation radius.
pub const FORCED_GRID_NODE_BUDGET: usize = 1 << 24;

type SymbolFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied symbol u ↦ v(u)² together with its declared growth:
/// v(u)² ≥ c·‖2πu‖^{2p} for all u.
#[derive(Clone)]
pub struct CustomSymbol {
    name: String,
    d: usize,
    growth_order: f64,
    growth_const: f64,
    f: Arc<SymbolFn>,
}

impl CustomSymbol {
    /// `growth_order` is p and `growth_const` is c in v(u)² ≥ c‖2πu‖^{2p}.
    pub fn new<F>(name: impl Into<String>, d: usize, growth_order: f64, growth_const: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let sym = Self { name: name.into(), d, growth_order, growth_const, f: Arc::new(f) };
        sym.validate()?;
        Ok(sym)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("custom symbol needs d >= 1".into()));
        }
        if !(2.0 * self.growth_order - self.d as f64 >= 1.0) {
            return Err(Error::Domain(format!(
                "custom symbol needs growth order 2p with 2p - d >= 1, got p = {}, d = {}",
                self.growth_order, self.d
            )));
        }
        if !(self.growth_const > 0.0) || !self.growth_const.is_finite() {
            return Err(Error::Domain("custom symbol growth constant must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn growth_order(&self) -> f64 {
        self.growth_order
    }

    pub fn growth_const(&self) -> f64 {
        self.growth_const
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        (self.f)(u)
    }
}

impl fmt::Debug for CustomSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSymbol")
            .field("name", &self.name)
            .field("d", &self.d)
            .field("growth_order", &self.growth_order)
            .field("growth_const", &self.growth_const)
            .finish()
    }
}

/// The squared symbol v(u)² whose reciprocal is the Fourier transform of the
/// kernel.
#[derive(Debug, Clone)]
pub enum SymbolFunction {
    /// 1 + Σ_{0<|α|≤s} ∏_j (2πu_j)^{2α_j}.
    Sobolev { d: usize, s: u32 },
    /// 1 / ∏_j (1 - (2πu_j)²) on |u_j| < 1/(2π), infinite outside.
    SobolevInfinity { d: usize },
    /// ∏_j Σ_{l=0}^s (2πu_j)^{2l}.
    TensorSobolev { d: usize, s: u32 },
    /// (2π)^{-d/2} (1 + ‖2πu‖²)^s.
    Isotropic { d: usize, s: f64 },
    /// Σ_α λ_α ∏_j (2πu_j)^{2α_j}.
    Weighted(MultiIndexWeights),
    Custom(CustomSymbol),
}

impl SymbolFunction {
    pub fn d(&self) -> usize {
        match self {
            SymbolFunction::Sobolev { d, .. }
            | SymbolFunction::SobolevInfinity { d }
            | SymbolFunction::TensorSobolev { d, .. }
            | SymbolFunction::Isotropic { d, .. } => *d,
            SymbolFunction::Weighted(w) => w.d(),
            SymbolFunction::Custom(c) => c.d(),
        }
    }

    /// Checks that 1/v² is integrable.
    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if d == 0 {
            return Err(Error::Domain("symbol dimension must be at least 1".into()));
        }
        match self {
            SymbolFunction::Sobolev { s, .. } if 2 * (*s as usize) < d + 1 => {
                Err(Error::Domain(format!("Sobolev symbol requires 2s - d >= 1, got d = {d}, s = {s}")))
            }
            SymbolFunction::TensorSobolev { s, .. } if *s < 1 => {
                Err(Error::Domain("tensor Sobolev symbol requires s >= 1".into()))
            }
            SymbolFunction::Isotropic { s, .. } if !(*s > d as f64 / 2.0) || !s.is_finite() => {
                Err(Error::Domain(format!("isotropic symbol requires s > d/2, got d = {d}, s = {s}")))
            }
            SymbolFunction::Weighted(w) if 2 * w.max_order() as usize <= d => Err(Error::Domain(format!(
                "weighted symbol requires s > d/2, got d = {d}, s = {}",
                w.max_order()
            ))),
            SymbolFunction::Custom(c) => c.validate(),
            _ => Ok(()),
        }
    }

    /// (c, p) with v(u)² ≥ c‖2πu‖^{2p}, when the symbol has such a bound.
    pub fn growth(&self) -> Option<(f64, f64)> {
        let d = self.d();
        let simplex_min = |p: u32| binomial(p + d as u32 - 1, p) / (d as f64).powi(p as i32);
        match self {
            SymbolFunction::Sobolev { s, .. } => Some((simplex_min(*s), *s as f64)),
            SymbolFunction::Isotropic { s, .. } => Some(((2.0 * PI).powf(-(d as f64) / 2.0), *s)),
            SymbolFunction::Weighted(w) => Some((w.min_top_weight() * simplex_min(w.max_order()), w.max_order() as f64)),
            SymbolFunction::Custom(c) => Some((c.growth_const(), c.growth_order())),
            SymbolFunction::SobolevInfinity { .. } | SymbolFunction::TensorSobolev { .. } => None,
        }
    }

    /// Half-width of the box outside which 1/v² vanishes, if any.
    pub fn support_half_width(&self) -> Option<f64> {
        match self {
            SymbolFunction::SobolevInfinity { .. } => Some(1.0 / (2.0 * PI)),
            _ => None,
        }
    }
}

/// Symbol with its multi-index tables resolved, ready for repeated evaluation.
enum Prepared<'a> {
    Terms { d: usize, order: usize, lambdas: Vec<f64> },
    Isotropic { scale: f64, s: f64 },
    Tensor { s: u32 },
    Infinity,
    Custom(&'a CustomSymbol),
}

const STACK_POWERS: usize = 192;

impl<'a> Prepared<'a> {
    fn new(sym: &'a SymbolFunction) -> Self {
        match sym {
            SymbolFunction::Sobolev { d, s } => Prepared::Terms {
                d: *d,
                order: *s as usize,
                lambdas: vec![1.0; cached_multi_indices(*d, *s).len()],
            },
            SymbolFunction::Weighted(w) => Prepared::Terms {
                d: w.d(),
                order: w.max_order() as usize,
                lambdas: w.entries().iter().map(|(_, l)| *l).collect(),
            },
            SymbolFunction::Isotropic { d, s } => {
                Prepared::Isotropic { scale: (2.0 * PI).powf(-(*d as f64) / 2.0), s: *s }
            }
            SymbolFunction::TensorSobolev { s, .. } => Prepared::Tensor { s: *s },
            SymbolFunction::SobolevInfinity { .. } => Prepared::Infinity,
            SymbolFunction::Custom(c) => Prepared::Custom(c),
        }
    }

    fn v2(&self, u: &[f64]) -> f64 {
        let sq = |x: f64| {
            let y = 2.0 * PI * x;
            y * y
        };
        match self {
            Prepared::Terms { d, order, lambdas } => {
                let stride = order + 1;
                let mut stack = [0.0; STACK_POWERS];
                let mut heap = Vec::new();
                let pw: &mut [f64] = if d * stride <= STACK_POWERS {
                    &mut stack[..d * stride]
                } else {
                    heap.resize(d * stride, 0.0);
                    &mut heap
                };
                for (j, &uj) in u.iter().enumerate() {
                    let x = sq(uj);
                    let row = &mut pw[j * stride..(j + 1) * stride];
                    row[0] = 1.0;
                    for k in 1..stride {
                        row[k] = row[k - 1] * x;
                    }
                }
                let mut idx = 0;
                nested_sum(pw, stride, *d, 0, *order, lambdas, &mut idx)
            }
            Prepared::Isotropic { scale, s } => {
                let norm2: f64 = u.iter().map(|&x| sq(x)).sum();
                scale * (1.0 + norm2).powf(*s)
            }
            Prepared::Tensor { s } => u
                .iter()
                .map(|&x| {
                    let y = sq(x);
                    (0..*s).fold(1.0, |acc, _| acc * y + 1.0)
                })
                .product(),
            Prepared::Infinity => 1.0 / self.recip(u),
            Prepared::Custom(c) => c.eval(u),
        }
    }

    /// 1 / v(u)², zero where the symbol is infinite.
    fn recip(&self, u: &[f64]) -> f64 {
        match self {
            Prepared::Infinity => {
                let mut p = 1.0;
                for &x in u {
                    let y = 2.0 * PI * x;
                    let f = 1.0 - y * y;
                    if f <= 0.0 {
                        return 0.0;
                    }
                    p *= f;
                }
                p
            }
            _ => {
                let v = self.v2(u);
                if v.is_infinite() {
                    0.0
                } else {
                    1.0 / v
                }
            }
        }
    }
}

// Sum of λ_α ∏ pw[j][α_j] with λ stored in lexicographic multi-index order.
fn nested_sum(pw: &[f64], stride: usize, d: usize, pos: usize, budget: usize, lambdas: &[f64], idx: &mut usize) -> f64 {
    let row = &pw[pos * stride..pos * stride + budget + 1];
    let mut acc = 0.0;
    if pos + 1 == d {
        for (k, p) in row.iter().enumerate() {
            acc += lambdas[*idx + k] * p;
        }
        *idx += budget + 1;
    } else {
        for (k, p) in row.iter().enumerate() {
            acc += p * nested_sum(pw, stride, d, pos + 1, budget - k, lambdas, idx);
        }
    }
    acc
}

fn check_point(sym: &SymbolFunction, u: &[f64]) -> Result<()> {
    if u.len() != sym.d() {
        return Err(Error::DimensionMismatch { expected: sym.d(), got: u.len() });
    }
    Ok(())
}

/// v(u)². Integrability is not required here, only by the oracle.
pub fn eval_symbol(sym: &SymbolFunction, u: &[f64]) -> Result<f64> {
    check_point(sym, u)?;
    Ok(Prepared::new(sym).v2(u))
}

/// Upper bound on ∫ 1/v(u)² du over the complement of [-U, U]^d.
pub fn tail_bound(sym: &SymbolFunction, radius: f64) -> f64 {
    if radius.is_infinite() {
        return 0.0;
    }
    let d = sym.d();
    match sym {
        SymbolFunction::SobolevInfinity { .. } => {
            if radius >= 1.0 / (2.0 * PI) {
                0.0
            } else {
                (2.0 / (3.0 * PI)).powi(d as i32)
            }
        }
        SymbolFunction::TensorSobolev { s, .. } => {
            // at least one axis leaves [-U, U]; the other axes integrate to K_{1,s}(0) ≤ 1/2
            let two_s = 2.0 * *s as f64;
            d as f64 * 0.5f64.powi(d as i32 - 1) * 2.0 * (2.0 * PI).powf(-two_s) * radius.powf(1.0 - two_s)
                / (two_s - 1.0)
        }
        _ => {
            let (c, p) = sym.growth().expect("polynomial growth declared");
            ball_tail(d, c, p, radius)
        }
    }
}

// ∫_{‖u‖>U} (c‖2πu‖^{2p})^{-1} du
fn ball_tail(d: usize, c: f64, p: f64, radius: f64) -> f64 {
    let df = d as f64;
    let sphere = 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0);
    sphere / (c * (2.0 * PI).powf(2.0 * p)) * radius.powf(df - 2.0 * p) / (2.0 * p - df)
}

/// Quadrature settings of the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Panels per unit length before the oscillation limit is applied.
    pub panels_per_unit: usize,
    /// Gauss–Legendre points per panel, at least 8.
    pub gauss_order: usize,
    /// Forces the grid strategy with this truncation radius.
    pub truncation_radius: Option<f64>,
    pub target_abs_tol: f64,
    /// Integrate over [0, U]^d with weight 2^d instead of [-U, U]^d.
    pub fold_symmetry: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panels_per_unit: 8, gauss_order: 16, truncation_radius: None, target_abs_tol: 1e-10, fold_symmetry: true }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_order < 8 {
            return Err(Error::Domain(format!("gauss_order must be at least 8, got {}", self.gauss_order)));
        }
        if self.panels_per_unit == 0 {
            return Err(Error::Domain("panels_per_unit must be positive".into()));
        }
        if !(self.target_abs_tol > 0.0) {
            return Err(Error::Domain("target_abs_tol must be positive".into()));
        }
        if let Some(u) = self.truncation_radius {
            if !(u > 0.0) || !u.is_finite() {
                return Err(Error::Domain("truncation_radius must be positive and finite".into()));
            }
        }
        Ok(())
    }

    fn panel_width(&self, r: f64) -> f64 {
        (1.0 / self.panels_per_unit as f64).min(1.0 / (2.0 * PI * r.abs() + 1.0))
    }

    fn panels(&self, radius: f64, r: f64) -> usize {
        (radius / self.panel_width(r)).ceil().max(1.0) as usize
    }

    fn fine_nodes(&self, radius: f64, offset: &[f64]) -> f64 {
        let sides = if self.fold_symmetry { 1.0 } else { 2.0 };
        offset
            .iter()
            .map(|&r| sides * 2.0 * self.panels(radius, r) as f64 * self.gauss_order as f64)
            .product()
    }
}

/// Integration strategy chosen for one oracle call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    Compact { half_width: f64 },
    Grid { radius: f64 },
    FarField,
}

/// Picks the strategy for offset `r = x - t`.
pub fn oracle_mode(sym: &SymbolFunction, r: &[f64], cfg: &QuadratureConfig) -> Result<OracleMode> {
    if let Some(half_width) = sym.support_half_width() {
        let half_width = cfg.truncation_radius.map_or(half_width, |u| u.min(half_width));
        return Ok(OracleMode::Compact { half_width });
    }
    let half_tol = 0.5 * cfg.target_abs_tol;
    let budget = GRID_NODE_BUDGET as f64;
    if let Some(radius) = cfg.truncation_radius {
        let tail = tail_bound(sym, radius);
        if tail > half_tol {
            return Err(Error::TailBound(format!(
                "tail bound {tail:e} at U = {radius} exceeds half the tolerance {half_tol:e}"
            )));
        }
        if cfg.fine_nodes(radius, r) > FORCED_GRID_NODE_BUDGET as f64 {
            return Err(Error::Quadrature(format!("grid for U = {radius} exceeds the node budget")));
        }
        return Ok(OracleMode::Grid { radius });
    }
    let mut radius = 1.0;
    while cfg.fine_nodes(radius, r) <= budget {
        if tail_bound(sym, radius) <= half_tol {
            return Ok(OracleMode::Grid { radius });
        }
        radius *= 2.0;
    }
    Ok(OracleMode::FarField)
}

/// K(x, t) from the Fourier integral with an error estimate.
pub fn eval_fourier_kernel(sym: &SymbolFunction, x: &[f64], t: &[f64], cfg: &QuadratureConfig) -> Result<Estimate> {
    check_point(sym, x)?;
    check_point(sym, t)?;
    let r: Vec<f64> = x.iter().zip(t).map(|(a, b)| a - b).collect();
    eval_fourier_offset(sym, &r, cfg)
}

/// Oracle value at each offset `x - t`, evaluated in parallel.
pub fn eval_fourier_batch(sym: &SymbolFunction, offsets: &[Vec<f64>], cfg: &QuadratureConfig) -> Result<Vec<Estimate>> {
    offsets.par_iter().map(|r| eval_fourier_offset(sym, r, cfg)).collect()
}

/// Oracle value at the offset r = x - t.
pub fn eval_fourier_offset(sym: &SymbolFunction, r: &[f64], cfg: &QuadratureConfig) -> Result<Estimate> {
    check_point(sym, r)?;
    sym.validate()?;
    cfg.validate()?;
    let d = sym.d();
    if d > MAX_ORACLE_DIM {
        return Err(Error::Domain(format!("the Fourier oracle supports d <= {MAX_ORACLE_DIM}, got d = {d}")));
    }
    if let SymbolFunction::TensorSobolev { d, s } = sym {
        if *d > 1 {
            // the integrand factorizes over axes
            let axis = SymbolFunction::TensorSobolev { d: 1, s: *s };
            let factors = r
                .iter()
                .map(|&rj| eval_fourier_offset(&axis, &[rj], cfg))
                .collect::<Result<Vec<_>>>()?;
            let value = factors.iter().map(|e| e.value).product();
            let upper: f64 = factors.iter().map(|e| e.value.abs() + e.err).product();
            let lower: f64 = factors.iter().map(|e| e.value.abs()).product();
            return Ok(Estimate::new(value, upper - lower));
        }
    }
    let prepared = Prepared::new(sym);
    let est = match oracle_mode(sym, r, cfg)? {
        OracleMode::Compact { half_width } => grid_estimate(&prepared, r, half_width, cfg, 0.0),
        OracleMode::Grid { radius } => grid_estimate(&prepared, r, radius, cfg, tail_bound(sym, radius)),
        OracleMode::FarField => FarField::new(&prepared, r, cfg.target_abs_tol).integrate(),
    };
    if !est.value.is_finite() || !est.err.is_finite() {
        return Err(Error::Quadrature(format!("non-finite oracle result at offset {r:?}")));
    }
    Ok(est)
}

fn grid_estimate(sym: &Prepared, r: &[f64], radius: f64, cfg: &QuadratureConfig, tail: f64) -> Estimate {
    let coarse = grid_integral(sym, r, radius, cfg, 1);
    let fine = grid_integral(sym, r, radius, cfg, 2);
    Estimate::new(fine, (fine - coarse).abs() + tail)
}

// Nodes and weights (including the cosine factor) along one axis.
fn axis_rule(rule: &GaussLegendre, radius: f64, r: f64, cfg: &QuadratureConfig, refine: usize) -> Vec<(f64, f64)> {
    let per_side = cfg.panels(radius, r) * refine;
    let (lo, panels, fold) = if cfg.fold_symmetry { (0.0, per_side, 2.0) } else { (-radius, 2 * per_side, 1.0) };
    let h = (radius - lo) / panels as f64;
    let omega = 2.0 * PI * r;
    let mut out = Vec::with_capacity(panels * rule.nodes().len());
    for k in 0..panels {
        let a = lo + h * k as f64;
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            let u = a + 0.5 * h * (x + 1.0);
            out.push((u, fold * 0.5 * h * w * (omega * u).cos()));
        }
    }
    out
}

fn grid_integral(sym: &Prepared, r: &[f64], radius: f64, cfg: &QuadratureConfig, refine: usize) -> f64 {
    let rule = GaussLegendre::cached(cfg.gauss_order);
    let axes: Vec<Vec<(f64, f64)>> = r.iter().map(|&rj| axis_rule(&rule, radius, rj, cfg, refine)).collect();
    let d = r.len();
    let rows: Vec<f64> = axes[0]
        .par_iter()
        .map(|&(u0, w0)| {
            let mut u = [0.0; MAX_ORACLE_DIM];
            u[0] = u0;
            w0 * tensor_row(sym, &axes, 1, &mut u[..d])
        })
        .collect();
    pairwise_sum(&rows)
}

fn tensor_row(sym: &Prepared, axes: &[Vec<(f64, f64)>], level: usize, u: &mut [f64]) -> f64 {
    if level == axes.len() {
        return sym.recip(u);
    }
    let terms: Vec<f64> = axes[level]
        .iter()
        .map(|&(x, w)| {
            u[level] = x;
            w * tensor_row(sym, axes, level + 1, u)
        })
        .collect();
    pairwise_sum(&terms)
}

/// Iterated one-dimensional integration over [0, ∞)^d.
struct FarField<'a> {
    sym: &'a Prepared<'a>,
    r: Vec<f64>,
    order: Vec<usize>,
    tol: f64,
}

const MAX_TAIL_TERMS: usize = 2000;

impl<'a> FarField<'a> {
    fn new(sym: &'a Prepared<'a>, r: &[f64], tol: f64) -> Self {
        // oscillating axes outermost
        let mut order: Vec<usize> = (0..r.len()).filter(|&j| r[j] != 0.0).collect();
        order.extend((0..r.len()).filter(|&j| r[j] == 0.0));
        Self { sym, r: r.to_vec(), order, tol }
    }

    fn integrate(&self) -> Estimate {
        let mut u = vec![0.0; self.r.len()];
        self.level(0, &mut u)
    }

    fn level(&self, k: usize, u: &mut [f64]) -> Estimate {
        if k == self.order.len() {
            return Estimate::new(self.sym.recip(u), 0.0);
        }
        let axis = self.order[k];
        let prefix: f64 = self.order[..k].iter().map(|&j| u[j] * u[j]).sum::<f64>().sqrt();
        let scale = (1.0 / (2.0 * PI)).hypot(prefix);
        let omega = 2.0 * PI * self.r[axis].abs();
        let (abs_tol, rel_tol) = if k == 0 { (0.25 * self.tol, 1e-13) } else { (1e-3 * self.tol, 1e-11) };
        let half = if omega == 0.0 {
            let mut g = |tau: f64| {
                let one_minus = 1.0 - tau;
                u[axis] = scale * tau / one_minus;
                let jac = scale / (one_minus * one_minus);
                let e = self.level(k + 1, u);
                Estimate::new(e.value * jac, e.err * jac)
            };
            adaptive_nested_from(&mut g, &[0.0, 0.5, 1.0], abs_tol, rel_tol)
        } else {
            let mut g = |v: f64| {
                u[axis] = v;
                let e = self.level(k + 1, u);
                Estimate::new(e.value * (omega * v).cos(), e.err)
            };
            oscillatory_half_line(&mut g, omega, scale, abs_tol, rel_tol)
        };
        Estimate::new(2.0 * half.value, 2.0 * half.err)
    }
}

// ∫_0^∞ g where g = (slowly varying) × cos(ωv).
fn oscillatory_half_line<F: FnMut(f64) -> Estimate>(g: &mut F, omega: f64, scale: f64, abs_tol: f64, rel_tol: f64) -> Estimate {
    let h = PI / omega;
    let n0 = ((8.0 * scale / h).ceil() as usize).clamp(2, 4000);
    let breaks: Vec<f64> = (0..=n0).map(|i| i as f64 * h).collect();
    let finite = adaptive_nested_from(g, &breaks, 0.5 * abs_tol, rel_tol);
    let mut partial = finite.value;
    let mut err = finite.err;
    let mut wynn = WynnEpsilon::new();
    let mut small_terms = 0;
    let mut last = Estimate::new(partial, f64::INFINITY);
    for k in 0..MAX_TAIL_TERMS {
        let a = (n0 + k) as f64 * h;
        let term = adaptive_nested_from(g, &[a, a + h], 1e-2 * abs_tol, rel_tol);
        partial += term.value;
        err += term.err;
        last = wynn.push(partial);
        let tol = (0.5 * abs_tol).max(rel_tol * partial.abs());
        if term.value.abs() <= 0.1 * tol {
            small_terms += 1;
            if small_terms >= 2 {
                return Estimate::new(partial, err + 2.0 * term.value.abs());
            }
        } else {
            small_terms = 0;
        }
        if k >= 4 && last.err <= tol {
            break;
        }
    }
    Estimate::new(last.value, err + last.err)
}
