//! Closed-form reproducing kernels.
//!
//! Every kernel here is translation invariant, so evaluation goes through the
//! offset `x - t`. Families without a closed form delegate to
//! [`crate::oracle`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::{self, CustomSymbol, QuadratureConfig, SymbolFunction};
use crate::special::{bessel_k, gamma, ln_gamma};
use crate::weights::MultiIndexWeights;

/// Description of one kernel family and its parameters.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// K_{1,s} of W^s_2(R).
    SobolevUnivariate { s: u32 },
    /// K_{d,s} of W^s_2(R^d), defined through its Fourier integral.
    SobolevFourier { d: usize, s: u32 },
    /// K_{d,∞}, the product of the univariate infinite-order kernel.
    SobolevInfinity { d: usize },
    /// Product of univariate K_{1,s} (mixed-smoothness tensor space).
    TensorSobolev { d: usize, s: u32 },
    /// Bessel-potential kernel of H^s(R^d), real s > d/2.
    MaternRadial { d: usize, s: f64 },
    /// (2π)^{-d/2} exp(-|x-t|²/2).
    GaussianRadial { d: usize },
    /// Weighted Sobolev space W^{s,λ}_2(R^d).
    Weighted { weights: MultiIndexWeights },
    /// Kernel generated by a user symbol ν with ν ≥ 1 and 1/ν ∈ L_2.
    GeneralSymbol { symbol: CustomSymbol },
}

impl KernelSpec {
    pub fn sobolev_univariate(s: u32) -> Result<Self> {
        let spec = KernelSpec::SobolevUnivariate { s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sobolev_fourier(d: usize, s: u32) -> Result<Self> {
        let spec = KernelSpec::SobolevFourier { d, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sobolev_infinity(d: usize) -> Result<Self> {
        let spec = KernelSpec::SobolevInfinity { d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tensor_sobolev(d: usize, s: u32) -> Result<Self> {
        let spec = KernelSpec::TensorSobolev { d, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn matern(d: usize, s: f64) -> Result<Self> {
        let spec = KernelSpec::MaternRadial { d, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(d: usize) -> Result<Self> {
        let spec = KernelSpec::GaussianRadial { d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn weighted(weights: MultiIndexWeights) -> Result<Self> {
        let spec = KernelSpec::Weighted { weights };
        spec.validate()?;
        Ok(spec)
    }

    pub fn general(symbol: CustomSymbol) -> Result<Self> {
        let spec = KernelSpec::GeneralSymbol { symbol };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the existence conditions of the family; the error names the
    /// violated condition.
    pub fn validate(&self) -> Result<()> {
        let need_d = |d: usize| {
            if d == 0 {
                Err(Error::Domain("dimension d must be at least 1".into()))
            } else {
                Ok(())
            }
        };
        match self {
            KernelSpec::SobolevUnivariate { s } => {
                if *s < 1 {
                    return Err(Error::Domain("SobolevUnivariate requires s >= 1".into()));
                }
            }
            KernelSpec::SobolevFourier { d, s } => {
                need_d(*d)?;
                if 2 * (*s as usize) < *d + 1 {
                    return Err(Error::Domain(format!(
                        "SobolevFourier requires s > d/2 (2s - d >= 1), got d = {d}, s = {s}"
                    )));
                }
            }
            KernelSpec::SobolevInfinity { d } | KernelSpec::GaussianRadial { d } => need_d(*d)?,
            KernelSpec::TensorSobolev { d, s } => {
                need_d(*d)?;
                if *s < 1 {
                    return Err(Error::Domain("TensorSobolev requires s >= 1".into()));
                }
            }
            KernelSpec::MaternRadial { d, s } => {
                need_d(*d)?;
                if !s.is_finite() || *s <= *d as f64 / 2.0 {
                    return Err(Error::Domain(format!("MaternRadial requires s > d/2, got d = {d}, s = {s}")));
                }
            }
            KernelSpec::Weighted { weights } => {
                if 2 * weights.max_order() as usize <= weights.d() {
                    return Err(Error::Domain(format!(
                        "Weighted requires s > d/2, got d = {}, s = {}",
                        weights.d(),
                        weights.max_order()
                    )));
                }
            }
            KernelSpec::GeneralSymbol { symbol } => symbol.validate()?,
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        match self {
            KernelSpec::SobolevUnivariate { .. } => 1,
            KernelSpec::SobolevFourier { d, .. }
            | KernelSpec::SobolevInfinity { d }
            | KernelSpec::TensorSobolev { d, .. }
            | KernelSpec::MaternRadial { d, .. }
            | KernelSpec::GaussianRadial { d } => *d,
            KernelSpec::Weighted { weights } => weights.d(),
            KernelSpec::GeneralSymbol { symbol } => symbol.d(),
        }
    }

    /// Whether `eval_kernel` uses an explicit formula rather than the oracle.
    pub fn has_closed_form(&self) -> bool {
        match self {
            KernelSpec::SobolevFourier { d, .. } => *d == 1,
            KernelSpec::Weighted { .. } | KernelSpec::GeneralSymbol { .. } => false,
            _ => true,
        }
    }

    /// Product kernels factor as ∏_j k(x_j - t_j) with a univariate `k`.
    pub fn is_product(&self) -> bool {
        match self {
            KernelSpec::SobolevUnivariate { .. }
            | KernelSpec::SobolevInfinity { .. }
            | KernelSpec::TensorSobolev { .. }
            | KernelSpec::GaussianRadial { .. } => true,
            KernelSpec::SobolevFourier { d, .. } | KernelSpec::MaternRadial { d, .. } => *d == 1,
            _ => false,
        }
    }

    /// The univariate factor k of a product kernel, evaluated at offset r.
    pub fn product_factor(&self, r: f64) -> Option<f64> {
        match self {
            KernelSpec::SobolevUnivariate { s } | KernelSpec::TensorSobolev { s, .. } => Some(eval_k1s_offset(*s, r)),
            KernelSpec::SobolevFourier { d: 1, s } => Some(eval_k1s_offset(*s, r)),
            KernelSpec::SobolevInfinity { .. } => Some(eval_kinf_1d(r)),
            KernelSpec::GaussianRadial { .. } => Some((-0.5 * r * r).exp() / (2.0 * PI).sqrt()),
            KernelSpec::MaternRadial { d: 1, s } => matern_radial(1, *s, r.abs()).ok(),
            _ => None,
        }
    }

    /// Fourier symbol whose reciprocal square integrates to this kernel.
    pub fn symbol(&self) -> SymbolFunction {
        match self {
            KernelSpec::SobolevUnivariate { s } => SymbolFunction::Sobolev { d: 1, s: *s },
            KernelSpec::SobolevFourier { d, s } => SymbolFunction::Sobolev { d: *d, s: *s },
            KernelSpec::SobolevInfinity { d } => SymbolFunction::SobolevInfinity { d: *d },
            KernelSpec::TensorSobolev { d, s } => SymbolFunction::TensorSobolev { d: *d, s: *s },
            KernelSpec::MaternRadial { d, s } => SymbolFunction::Isotropic { d: *d, s: *s },
            KernelSpec::GaussianRadial { d } => SymbolFunction::Weighted(
                MultiIndexWeights::gaussian_infinity(*d, GAUSSIAN_SYMBOL_TRUNCATION)
                    .expect("gaussian preset weights are always valid"),
            ),
            KernelSpec::Weighted { weights } => SymbolFunction::Weighted(weights.clone()),
            KernelSpec::GeneralSymbol { symbol } => SymbolFunction::Custom(symbol.clone()),
        }
    }
}

/// Truncation order of the Gaussian weight preset used as its oracle symbol.
pub const GAUSSIAN_SYMBOL_TRUNCATION: u32 = 40;

fn angles(s: u32) -> impl Iterator<Item = f64> {
    let denom = s as f64 + 1.0;
    (1..=s).map(move |j| j as f64 * PI / denom)
}

/// K_{1,s}(x, t) from the real trigonometric sum.
pub fn eval_k1s(s: u32, x: f64, t: f64) -> Result<f64> {
    if s < 1 {
        return Err(Error::Domain("eval_k1s requires s >= 1".into()));
    }
    Ok(eval_k1s_offset(s, x - t))
}

/// Univariate kernel as a function of the offset: the sum over the s poles
/// of -1/(s+1) e^{-|r| sin θ_j} sin θ_j cos(|r| cos θ_j + 2θ_j), θ_j = jπ/(s+1).
pub fn eval_k1s_offset(s: u32, r: f64) -> f64 {
    let r = r.abs();
    let sum: f64 = angles(s)
        .map(|theta| {
            let (sin_t, cos_t) = theta.sin_cos();
            (-r * sin_t).exp() * sin_t * (r * cos_t + 2.0 * theta).cos()
        })
        .sum();
    -sum / (s as f64 + 1.0)
}

/// Maximal imaginary part tolerated in the residue sum.
pub const RESIDUE_IMAG_TOL: f64 = 1e-12;

/// K_{1,s}(x, t) from the complex residue sum; fails if the imaginary part
/// exceeds [`RESIDUE_IMAG_TOL`].
pub fn eval_k1s_residue(s: u32, x: f64, t: f64) -> Result<f64> {
    let z = k1s_residue_complex(s, x, t)?;
    if z.im.abs() > RESIDUE_IMAG_TOL {
        return Err(Error::Consistency(format!(
            "residue sum has imaginary part {:e} (s = {s}, x - t = {})",
            z.im,
            x - t
        )));
    }
    Ok(z.re)
}

/// The complex value of the residue sum before taking the real part.
pub fn k1s_residue_complex(s: u32, x: f64, t: f64) -> Result<Complex64> {
    if s < 1 {
        return Err(Error::Domain("eval_k1s_residue requires s >= 1".into()));
    }
    let r = (x - t).abs();
    let sf = s as f64;
    let i = Complex64::i();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..=s {
        let theta = j as f64 * PI / (sf + 1.0);
        let pole = Complex64::from_polar(1.0, theta + 0.5 * PI);
        let numerator = (pole * r).exp();
        let denominator = Complex64::from_polar(1.0, j as f64 * PI * (2.0 * sf + 1.0) / (sf + 1.0));
        let factor = Complex64::from_polar(1.0, 2.0 * theta) - 1.0;
        sum += numerator / denominator * factor;
    }
    Ok(i / (2.0 * sf + 2.0) * sum)
}

/// Below this |x| the infinite-order kernel uses its power series.
pub const KINF_SERIES_THRESHOLD: f64 = 0.5;

/// The univariate infinite-order kernel (2/(πx³))(sin x - x cos x).
pub fn eval_kinf_1d(x: f64) -> f64 {
    let ax = x.abs();
    if ax < KINF_SERIES_THRESHOLD {
        // (2/π) Σ_j (-1)^j x^{2j} / ((2j+1)! (2j+3))
        let x2 = ax * ax;
        let mut power = 1.0; // x^{2j} / (2j+1)!
        let mut sum = 0.0;
        let mut j = 0u32;
        loop {
            let term = power / (2.0 * j as f64 + 3.0);
            if j % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-17 {
                break;
            }
            j += 1;
            power *= x2 / ((2 * j) as f64 * (2 * j + 1) as f64);
        }
        2.0 / PI * sum
    } else {
        2.0 / (PI * ax * ax * ax) * (ax.sin() - ax * ax.cos())
    }
}

/// Bessel-potential kernel at distance r: 2^{1-s}/Γ(s) r^{s-d/2} K_{s-d/2}(r).
pub fn matern_radial(d: usize, s: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(matern_diag(d, s));
    }
    let nu = s - d as f64 / 2.0;
    let k = bessel_k(nu, r)?;
    let log_prefactor = (1.0 - s) * std::f64::consts::LN_2 - ln_gamma(s) + nu * r.ln();
    let value = log_prefactor.exp() * k;
    if value.is_finite() {
        Ok(value.min(matern_diag(d, s)))
    } else {
        Err(Error::Domain(format!("Matern kernel overflow at r = {r}, d = {d}, s = {s}")))
    }
}

/// Γ(s - d/2) / (2^{d/2} Γ(s)).
pub fn matern_diag(d: usize, s: f64) -> f64 {
    let half_d = d as f64 / 2.0;
    if s < 150.0 {
        gamma(s - half_d) / (2f64.powf(half_d) * gamma(s))
    } else {
        (ln_gamma(s - half_d) - half_d * std::f64::consts::LN_2 - ln_gamma(s)).exp()
    }
}

/// K_{1,s}(0, 0) = (1/(s+1)) cos(π/(2s+2)) / sin(3π/(2s+2)).
pub fn k1s_diag(s: u32) -> f64 {
    let a = PI / (2.0 * s as f64 + 2.0);
    a.cos() / (3.0 * a).sin() / (s as f64 + 1.0)
}

fn check_dims(spec: &KernelSpec, x: &[f64], t: &[f64]) -> Result<()> {
    let d = spec.d();
    for p in [x, t] {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
    }
    Ok(())
}

/// K(x, t) for any kernel spec.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], t: &[f64]) -> Result<f64> {
    check_dims(spec, x, t)?;
    spec.validate()?;
    match spec {
        KernelSpec::MaternRadial { d, s } => {
            let r = x.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            matern_radial(*d, *s, r)
        }
        KernelSpec::GaussianRadial { d } => {
            let r2: f64 = x.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok((2.0 * PI).powf(-(*d as f64) / 2.0) * (-0.5 * r2).exp())
        }
        _ if spec.is_product() => Ok(x
            .iter()
            .zip(t)
            .map(|(a, b)| spec.product_factor(a - b).expect("product kernel has a factor"))
            .product()),
        _ => {
            let est = oracle::eval_fourier_kernel(&spec.symbol(), x, t, &QuadratureConfig::default())?;
            Ok(est.value)
        }
    }
}

/// K(0, 0); equals K(x, x) for every x since all families are translation invariant.
pub fn diag_value(spec: &KernelSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match spec {
        KernelSpec::SobolevUnivariate { s } => k1s_diag(*s),
        KernelSpec::SobolevFourier { d: 1, s } => k1s_diag(*s),
        KernelSpec::SobolevInfinity { d } => (2.0 / (3.0 * PI)).powi(*d as i32),
        KernelSpec::TensorSobolev { d, s } => k1s_diag(*s).powi(*d as i32),
        KernelSpec::GaussianRadial { d } => (2.0 * PI).powf(-(*d as f64) / 2.0),
        KernelSpec::MaternRadial { d, s } => matern_diag(*d, *s),
        _ => {
            let zero = vec![0.0; spec.d()];
            oracle::eval_fourier_kernel(&spec.symbol(), &zero, &zero, &QuadratureConfig::default())?.value
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // The explicit displays for s = 1..4, written out independently.
    fn k1_display(t: f64) -> f64 {
        0.5 * (-t.abs()).exp()
    }
    fn k2_display(t: f64) -> f64 {
        let t = t.abs();
        3f64.sqrt() / 3.0 * (-t * 3f64.sqrt() / 2.0).exp() * (t / 2.0 + PI / 6.0).sin()
    }
    fn k3_display(t: f64) -> f64 {
        let t = t.abs();
        let r2 = 2f64.sqrt();
        0.25 * ((-t).exp() + r2 * (-t / r2).exp() * (t / r2).sin())
    }
    fn k4_display(t: f64) -> f64 {
        let t = t.abs();
        let (a, b) = (PI / 5.0, 2.0 * PI / 5.0);
        -0.4 * ((-t * a.sin()).exp() * (t * a.cos() + 2.0 * PI / 5.0).cos() * a.sin()
            + (-t * b.sin()).exp() * (t * b.cos() + 4.0 * PI / 5.0).cos() * b.sin())
    }

    #[test]
    fn k1s_examples() {
        assert_eq!(eval_k1s(1, 0.0, 0.0).unwrap(), 0.5);
        assert_relative_eq!(eval_k1s(1, 1.0, 0.0).unwrap(), 0.5 * (-1f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(eval_k1s(2, 0.0, 0.0).unwrap(), 3f64.sqrt() / 6.0, max_relative = 1e-15);
        assert_relative_eq!(eval_k1s(3, 0.0, 0.0).unwrap(), 0.25, max_relative = 1e-15);
        assert!(eval_k1s(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn explicit_displays_match() {
        for i in 0..=2000 {
            let r = i as f64 * 0.01;
            assert!((eval_k1s_offset(1, r) - k1_display(r)).abs() <= 1e-12);
            assert!((eval_k1s_offset(2, r) - k2_display(r)).abs() <= 1e-12);
            assert!((eval_k1s_offset(3, r) - k3_display(r)).abs() <= 1e-12);
            assert!((eval_k1s_offset(4, r) - k4_display(r)).abs() <= 1e-12);
        }
    }

    #[test]
    fn residue_form_examples() {
        assert_relative_eq!(eval_k1s_residue(1, 0.0, 0.0).unwrap(), 0.5, max_relative = 1e-14);
        assert!((eval_k1s_residue(4, 2.0, 0.0).unwrap() - eval_k1s(4, 2.0, 0.0).unwrap()).abs() <= 1e-12);
        assert!((eval_k1s_residue(2, 0.7, 0.7).unwrap() - 3f64.sqrt() / 6.0).abs() <= 1e-12);
    }

    #[test]
    fn residue_equivalence_grid() {
        for s in 1..=8 {
            for i in 0..=100 {
                let r = i as f64 * 0.1;
                let z = k1s_residue_complex(s, r, 0.0).unwrap();
                assert!(z.im.abs() <= RESIDUE_IMAG_TOL, "s={s} r={r} im={}", z.im);
                assert!((z.re - eval_k1s_offset(s, r)).abs() <= 1e-12, "s={s} r={r}");
            }
        }
    }

    #[test]
    fn diagonal_formula_and_monotonicity() {
        let mut prev = f64::INFINITY;
        for s in 1..=50 {
            let direct = eval_k1s_offset(s, 0.0);
            assert!((direct - k1s_diag(s)).abs() <= 1e-12, "s={s}");
            assert!(direct < prev);
            prev = direct;
        }
        assert_eq!(k1s_diag(1), 0.5);
        assert!((eval_k1s_offset(10_000, 0.0) - 2.0 / (3.0 * PI)).abs() <= 1e-7);
    }

    #[test]
    fn kinf_examples() {
        assert_relative_eq!(eval_kinf_1d(0.0), 2.0 / (3.0 * PI), max_relative = 1e-16);
        assert_relative_eq!(eval_kinf_1d(PI), 2.0 / PI.powi(3), max_relative = 1e-14);
        let x = 1e-6;
        assert_relative_eq!(eval_kinf_1d(x), 2.0 / (3.0 * PI) * (1.0 - x * x / 10.0), max_relative = 1e-16);
        // branches agree at the switch
        let below = eval_kinf_1d(f64::from_bits(KINF_SERIES_THRESHOLD.to_bits() - 1));
        let above = eval_kinf_1d(KINF_SERIES_THRESHOLD);
        assert!((below - above).abs() < 1e-14, "{below} {above}");
        assert_eq!(eval_kinf_1d(2.3), eval_kinf_1d(-2.3));
    }

    #[test]
    fn kernel_examples() {
        let g = KernelSpec::gaussian(1).unwrap();
        assert_relative_eq!(eval_kernel(&g, &[0.0], &[0.0]).unwrap(), (2.0 * PI).powf(-0.5), max_relative = 1e-15);

        let m = KernelSpec::matern(1, 1.0).unwrap();
        for &r in &[0.0f64, 0.3, 1.0, 4.5] {
            let expect = (PI / 2.0).sqrt() * (-r).exp();
            assert_relative_eq!(eval_kernel(&m, &[r], &[0.0]).unwrap(), expect, max_relative = 1e-14);
        }

        let inf = KernelSpec::sobolev_infinity(3).unwrap();
        let p = [0.3, -1.0, 2.0];
        assert_relative_eq!(eval_kernel(&inf, &p, &p).unwrap(), (2.0 / (3.0 * PI)).powi(3), max_relative = 1e-15);

        let ts = KernelSpec::tensor_sobolev(2, 1).unwrap();
        assert_relative_eq!(
            eval_kernel(&ts, &[1.0, 0.0], &[0.0, 0.0]).unwrap(),
            0.25 * (-1f64).exp(),
            max_relative = 1e-15
        );
        assert!(matches!(
            eval_kernel(&ts, &[1.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn diag_examples() {
        assert_eq!(diag_value(&KernelSpec::sobolev_univariate(1).unwrap()).unwrap(), 0.5);
        assert_relative_eq!(
            diag_value(&KernelSpec::matern(1, 1.0).unwrap()).unwrap(),
            (PI / 2.0).sqrt(),
            max_relative = 1e-14
        );
        assert!((diag_value(&KernelSpec::sobolev_univariate(10_000).unwrap()).unwrap() - 2.0 / (3.0 * PI)).abs() < 1e-7);
        // Matérn diagonal agrees with the small-r limit of the Bessel form
        for &(d, s) in &[(1usize, 1.0), (1, 2.0), (3, 2.0), (2, 2.5), (4, 3.3)] {
            let near = matern_radial(d, s, 1e-7).unwrap();
            assert_relative_eq!(near, matern_diag(d, s), max_relative = 1e-5);
        }
    }

    #[test]
    fn validation_messages_name_conditions() {
        let err = KernelSpec::sobolev_fourier(4, 2).unwrap_err();
        assert!(err.to_string().contains("s > d/2"));
        assert!(KernelSpec::matern(2, 1.0).is_err());
        assert!(KernelSpec::matern(2, 1.01).is_ok());
        assert!(KernelSpec::tensor_sobolev(5, 1).is_ok());
        assert!(KernelSpec::sobolev_univariate(0).is_err());
    }

    #[test]
    fn sign_pattern() {
        let min_on = |s: u32| (1..=2000).map(|i| eval_k1s_offset(s, i as f64 * 0.01)).fold(f64::INFINITY, f64::min);
        assert!(min_on(1) > 0.0);
        for s in 2..=4 {
            assert!(min_on(s) < 0.0, "s = {s} should dip below zero on (0, 20]");
        }
    }

    fn closed_form_specs() -> Vec<KernelSpec> {
        vec![
            KernelSpec::sobolev_univariate(1).unwrap(),
            KernelSpec::sobolev_univariate(5).unwrap(),
            KernelSpec::sobolev_infinity(2).unwrap(),
            KernelSpec::tensor_sobolev(3, 2).unwrap(),
            KernelSpec::matern(2, 1.7).unwrap(),
            KernelSpec::matern(3, 2.0).unwrap(),
            KernelSpec::gaussian(3).unwrap(),
        ]
    }

    fn point(v: &[f64], d: usize) -> Vec<f64> {
        v.iter().take(d).copied().collect()
    }

    proptest! {
        #[test]
        fn symmetric_stationary_and_bounded_by_diagonal(
            x in proptest::collection::vec(-8.0f64..8.0, 3),
            t in proptest::collection::vec(-8.0f64..8.0, 3),
            c in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            for spec in closed_form_specs() {
                let d = spec.d();
                let (x, t, c) = (point(&x, d), point(&t, d), point(&c, d));
                let k = eval_kernel(&spec, &x, &t).unwrap();
                prop_assert_eq!(k, eval_kernel(&spec, &t, &x).unwrap());
                let xs: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a + b).collect();
                let ts: Vec<f64> = t.iter().zip(&c).map(|(a, b)| a + b).collect();
                prop_assert!((eval_kernel(&spec, &xs, &ts).unwrap() - k).abs() <= 1e-13);
                prop_assert!(k.abs() <= diag_value(&spec).unwrap() + 1e-12);
            }
        }

        #[test]
        fn exponential_and_quadratic_decay_bounds(r in 0.0f64..40.0, s in 1u32..=6) {
            let bound = (s as f64 / (s as f64 + 1.0)) * (-r * (PI / (s as f64 + 1.0)).sin()).exp();
            prop_assert!(eval_k1s_offset(s, r).abs() <= bound + 1e-15);
            if r >= 1.0 {
                prop_assert!(eval_kinf_1d(r).abs() <= 4.0 / (PI * r * r));
            }
        }
    }
}
