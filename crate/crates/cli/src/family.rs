use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use sobker::qmc::Density;
use sobker::{KernelSpec, MultiIndexWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Univariate Sobolev kernel of order s.
    Sobolev1d,
    /// Sobolev space W^s_2(R^d) with the standard norm.
    Sobolev,
    /// Infinite-order Sobolev kernel, a product of 1D factors.
    Sobolevinf,
    /// Tensor product of univariate Sobolev kernels.
    Tensor,
    /// Matérn kernel of the Bessel-potential space H^s(R^d).
    Matern,
    /// Gaussian density kernel.
    Gaussian,
    /// Weighted Sobolev norm with a preset weight scheme.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightPreset {
    Unit,
    Hs,
    Gauss,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Smoothness; integral except for matern.
    #[arg(long)]
    pub s: Option<f64>,
    /// Weight scheme of the weighted family.
    #[arg(long)]
    pub weights: Option<WeightPreset>,
    /// Truncation order of the gauss weight scheme.
    #[arg(long, default_value_t = 40)]
    pub truncation: u32,
}

fn integral_s(s: Option<f64>, family: &str) -> Result<u32> {
    let s = s.with_context(|| format!("--s is required for family {family}"))?;
    if s.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&s) {
        bail!("family {family} requires an integer s >= 1, got {s}");
    }
    Ok(s as u32)
}

impl FamilyArgs {
    pub fn spec(&self) -> Result<KernelSpec> {
        let d = self.d;
        let spec = match self.family {
            Family::Sobolev1d => {
                if d != 1 {
                    bail!("family sobolev1d requires d = 1, got d = {d}");
                }
                KernelSpec::sobolev_univariate(integral_s(self.s, "sobolev1d")?)?
            }
            Family::Sobolev => KernelSpec::sobolev_fourier(d, integral_s(self.s, "sobolev")?)?,
            Family::Sobolevinf => KernelSpec::sobolev_infinity(d)?,
            Family::Tensor => KernelSpec::tensor_sobolev(d, integral_s(self.s, "tensor")?)?,
            Family::Matern => KernelSpec::matern(d, self.s.context("--s is required for family matern")?)?,
            Family::Gaussian => KernelSpec::gaussian(d)?,
            Family::Weighted => {
                let preset = self.weights.context("family weighted requires --weights unit|hs|gauss")?;
                let w = match preset {
                    WeightPreset::Unit => MultiIndexWeights::unit(d, integral_s(self.s, "weighted")?)?,
                    WeightPreset::Hs => MultiIndexWeights::isotropic_hs(d, integral_s(self.s, "weighted")?)?,
                    WeightPreset::Gauss => MultiIndexWeights::gaussian_infinity(d, self.truncation)?,
                };
                KernelSpec::weighted(w)?
            }
        };
        Ok(spec)
    }

    /// A closed-form kernel that the Fourier oracle of this family should
    /// reproduce.
    pub fn reference(&self, spec: &KernelSpec) -> Result<Option<KernelSpec>> {
        if spec.has_closed_form() {
            return Ok(Some(spec.clone()));
        }
        let d = spec.d();
        Ok(match (self.family, self.weights) {
            (Family::Weighted, Some(WeightPreset::Hs)) => {
                Some(KernelSpec::matern(d, integral_s(self.s, "weighted")? as f64)?)
            }
            (Family::Weighted, Some(WeightPreset::Gauss)) => Some(KernelSpec::gaussian(d)?),
            (Family::Weighted, Some(WeightPreset::Unit)) if d == 1 => {
                Some(KernelSpec::sobolev_univariate(integral_s(self.s, "weighted")?)?)
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityName {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long, default_value = "gaussian")]
    pub density: DensityName,
    /// Lower corner of the uniform box, one value per axis or a single value.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub lo: Vec<f64>,
    /// Upper corner of the uniform box.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    pub hi: Vec<f64>,
}

fn per_axis(v: &[f64], d: usize, name: &str) -> Result<Vec<f64>> {
    match v.len() {
        1 => Ok(vec![v[0]; d]),
        n if n == d => Ok(v.to_vec()),
        n => bail!("--{name} needs 1 or {d} values, got {n}"),
    }
}

impl DensityArgs {
    pub fn density(&self, d: usize, seed: u64) -> Result<Density> {
        Ok(match self.density {
            DensityName::Gaussian => Density::standard_gaussian(d, seed)?,
            DensityName::Uniform => Density::uniform_box(per_axis(&self.lo, d, "lo")?, per_axis(&self.hi, d, "hi")?, seed)?,
        })
    }
}
