//! Reproducing kernels of Sobolev spaces on R^d.
//!
//! Closed forms live in [`kernels`], the Fourier-integral oracle in
//! [`oracle`]. [`embedding`], [`qmc`] and [`recovery`] build on both.

pub mod embedding;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod qmc;
pub mod quadrature;
pub mod recovery;
pub mod rng;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use kernels::{diag_value, eval_k1s, eval_k1s_residue, eval_kernel, eval_kinf_1d, KernelSpec};
pub use oracle::{eval_fourier_kernel, eval_symbol, tail_bound, CustomSymbol, QuadratureConfig, SymbolFunction};
pub use quadrature::Estimate;
pub use weights::{MultiIndexWeights, WeightScheme};
pub use embedding::{embedding_bound_radial, embedding_bounds_sobolev, embedding_norm};
pub use qmc::{Density, PointSet, WceReport};
pub use recovery::{fit_spline, SplineModel};
