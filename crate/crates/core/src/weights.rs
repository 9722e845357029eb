//! Multi-indices and the weight schemes λ_α of weighted Sobolev norms.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{binomial, ln_factorial};

/// A multi-index α ∈ N_0^d.
pub type MultiIndex = Vec<u32>;

/// All α ∈ N_0^d with |α|_1 ≤ s in lexicographic order.
pub fn enumerate_multi_indices(d: usize, s: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill(&mut current, 0, s, &mut out);
    out
}

fn fill(current: &mut MultiIndex, pos: usize, budget: u32, out: &mut Vec<MultiIndex>) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for k in 0..=budget {
        current[pos] = k;
        fill(current, pos + 1, budget - k, out);
    }
    current[pos] = 0;
}

/// Cached enumeration shared by all callers with the same (d, s).
pub fn cached_multi_indices(d: usize, s: u32) -> Arc<Vec<MultiIndex>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<MultiIndex>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("multi-index cache poisoned");
    guard.entry((d, s)).or_insert_with(|| Arc::new(enumerate_multi_indices(d, s))).clone()
}

pub fn order(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// ln(α!) = Σ ln(α_j!).
pub fn ln_multi_factorial(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&a| ln_factorial(a)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightScheme {
    /// λ_α = 1: the standard Sobolev norm.
    Unit,
    /// λ_α = |α|! binom(s, |α|) / ((2π)^{d/2} α!): the isotropic H^s norm.
    IsotropicHs,
    /// λ_α = 1 / (2^{|α|} α!), truncated at |α| ≤ `truncation`: the Gaussian
    /// (infinite order) norm.
    GaussianInfinity { truncation: u32 },
    /// User-supplied λ_α for every |α| ≤ s.
    Explicit(BTreeMap<MultiIndex, f64>),
}

/// Weight family λ_{d,s,α} over all multi-indices with |α|_1 ≤ s.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexWeights {
    d: usize,
    max_order: u32,
    scheme: WeightScheme,
    table: Arc<Vec<(MultiIndex, f64)>>,
}

impl MultiIndexWeights {
    pub fn new(d: usize, s: u32, scheme: WeightScheme) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("weights need d >= 1".into()));
        }
        let max_order = match &scheme {
            WeightScheme::GaussianInfinity { truncation } => *truncation,
            _ => s,
        };
        if max_order == 0 {
            return Err(Error::Domain("weights need a positive maximal order".into()));
        }
        let indices = cached_multi_indices(d, max_order);
        let mut table = Vec::with_capacity(indices.len());
        for alpha in indices.iter() {
            let lambda = match &scheme {
                WeightScheme::Unit => 1.0,
                WeightScheme::IsotropicHs => {
                    let k = order(alpha);
                    let ln = ln_factorial(k) + binomial(s, k).ln()
                        - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln()
                        - ln_multi_factorial(alpha);
                    ln.exp()
                }
                WeightScheme::GaussianInfinity { .. } => {
                    let k = order(alpha);
                    (-(k as f64) * std::f64::consts::LN_2 - ln_multi_factorial(alpha)).exp()
                }
                WeightScheme::Explicit(map) => *map
                    .get(alpha)
                    .ok_or_else(|| Error::Domain(format!("explicit weights missing alpha = {alpha:?}")))?,
            };
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::Domain(format!(
                    "weight for alpha = {alpha:?} must be positive and finite, got {lambda}"
                )));
            }
            table.push((alpha.clone(), lambda));
        }
        if let WeightScheme::Explicit(map) = &scheme {
            if let Some(extra) = map.keys().find(|a| a.len() != d || order(a) > max_order) {
                return Err(Error::Domain(format!("explicit weight for alpha = {extra:?} outside |alpha| <= {max_order}")));
            }
        }
        Ok(Self { d, max_order, scheme, table: Arc::new(table) })
    }

    pub fn unit(d: usize, s: u32) -> Result<Self> {
        Self::new(d, s, WeightScheme::Unit)
    }

    pub fn isotropic_hs(d: usize, s: u32) -> Result<Self> {
        Self::new(d, s, WeightScheme::IsotropicHs)
    }

    pub fn gaussian_infinity(d: usize, truncation: u32) -> Result<Self> {
        Self::new(d, truncation, WeightScheme::GaussianInfinity { truncation })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// s, or the truncation order S for the Gaussian preset.
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn scheme(&self) -> &WeightScheme {
        &self.scheme
    }

    pub fn is_infinite_order(&self) -> bool {
        matches!(self.scheme, WeightScheme::GaussianInfinity { .. })
    }

    pub fn entries(&self) -> &[(MultiIndex, f64)] {
        &self.table
    }

    pub fn lambda(&self, alpha: &[u32]) -> Option<f64> {
        self.table.iter().find(|(a, _)| a.as_slice() == alpha).map(|(_, l)| *l)
    }

    pub fn lambda_zero(&self) -> f64 {
        self.table[0].1
    }

    /// Smallest weight among the top-order multi-indices.
    pub fn min_top_weight(&self) -> f64 {
        self.table
            .iter()
            .filter(|(a, _)| order(a) == self.max_order)
            .map(|(_, l)| *l)
            .fold(f64::INFINITY, f64::min)
    }
}
