//! Embedding constants ‖I_K‖ = K(0,0)^{1/2} into the sup-norm space and the
//! explicit bounds on them.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{diag_value, KernelSpec};
use crate::special::{gamma, ln_gamma};

/// Constant in the upper cap 10.03·(6/11)^d.
pub const CAP_CONSTANT: f64 = 10.03;

/// ‖I_K‖ for a translation-invariant kernel.
pub fn embedding_norm(spec: &KernelSpec) -> Result<f64> {
    Ok(diag_value(spec)?.sqrt())
}

/// The chain lower ≤ mid ≤ upper ≤ cap for W^s_2(R^d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevEmbeddingBounds {
    pub d: usize,
    /// (5/11)^d
    pub lower: f64,
    /// (2/(3π))^{d/2}
    pub mid: f64,
    /// (d+1) / (2^{(d+1)/2} π^{d/4})
    pub upper: f64,
    /// 10.03·(6/11)^d
    pub cap: f64,
}

impl SobolevEmbeddingBounds {
    /// Whether every link of the chain holds, allowing 1e-15 relative slack.
    pub fn chain_holds(&self) -> bool {
        let le = |a: f64, b: f64| a <= b * (1.0 + 1e-15);
        le(self.lower, self.mid) && le(self.mid, self.upper) && le(self.upper, self.cap)
    }
}

pub fn embedding_bounds_sobolev(d: usize, s: u32) -> Result<SobolevEmbeddingBounds> {
    if d == 0 {
        return Err(Error::Domain("dimension d must be at least 1".into()));
    }
    if 2 * (s as usize) <= d {
        return Err(Error::Domain(format!("embedding bounds require s > d/2, got d = {d}, s = {s}")));
    }
    let df = d as f64;
    // powers through logarithms keep d in the hundreds finite
    let upper = ((df + 1.0).ln() - 0.5 * (df + 1.0) * LN_2 - 0.25 * df * PI.ln()).exp();
    Ok(SobolevEmbeddingBounds {
        d,
        lower: (5.0f64 / 11.0).powi(d as i32),
        mid: (2.0 / (3.0 * PI)).powf(df / 2.0),
        upper,
        cap: CAP_CONSTANT * (6.0f64 / 11.0).powi(d as i32),
    })
}

/// Largest admissible β = 2s - d, the default of [`embedding_bound_radial`].
pub fn default_beta(d: usize, s: f64) -> f64 {
    2.0 * s - d as f64
}

/// √(2(1 + 1/β) / (2^{d/2} Γ(d/2))), an upper bound on the embedding norm of
/// the Bessel-potential space H^s(R^d).
pub fn embedding_bound_radial(d: usize, s: f64, beta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("dimension d must be at least 1".into()));
    }
    if !(s > d as f64 / 2.0) || !s.is_finite() {
        return Err(Error::Domain(format!("radial bound requires s > d/2, got d = {d}, s = {s}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("radial bound requires beta > 0, got {beta}")));
    }
    if beta > default_beta(d, s) * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "radial bound requires beta <= 2s - d = {}, got {beta}",
            default_beta(d, s)
        )));
    }
    let half_d = d as f64 / 2.0;
    let num = 2.0 * (1.0 + 1.0 / beta);
    if half_d < 150.0 {
        Ok((num / (2f64.powf(half_d) * gamma(half_d))).sqrt())
    } else {
        Ok((0.5 * (num.ln() - half_d * LN_2 - ln_gamma(half_d))).exp())
    }
}
