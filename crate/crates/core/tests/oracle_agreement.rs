use std::f64::consts::PI;

use sobker::embedding::embedding_bounds_sobolev;
use sobker::kernels::{eval_k1s_offset, eval_kinf_1d, matern_radial};
use sobker::oracle::{eval_fourier_batch, eval_fourier_offset, eval_symbol};
use sobker::quadrature::adaptive;
use sobker::{eval_kernel, KernelSpec, MultiIndexWeights, QuadratureConfig, SymbolFunction};

fn offsets(count: usize, rmax: f64) -> Vec<Vec<f64>> {
    (0..count).map(|i| vec![rmax * i as f64 / (count - 1) as f64]).collect()
}

fn max_diff(sym: &SymbolFunction, offs: &[Vec<f64>], exact: impl Fn(&[f64]) -> f64) -> f64 {
    let est = eval_fourier_batch(sym, offs, &QuadratureConfig::default()).unwrap();
    offs.iter().zip(&est).map(|(r, e)| (e.value - exact(r)).abs()).fold(0.0, f64::max)
}

#[test]
fn univariate_sobolev() {
    for s in [1u32, 2, 3, 5] {
        let diff = max_diff(&SymbolFunction::Sobolev { d: 1, s }, &offsets(30, 10.0), |r| eval_k1s_offset(s, r[0]));
        assert!(diff <= 1e-8, "s = {s}: {diff:e}");
    }
}

#[test]
fn sobolev_infinity_line() {
    let diff = max_diff(&SymbolFunction::SobolevInfinity { d: 1 }, &offsets(30, 10.0), |r| eval_kinf_1d(r[0]));
    assert!(diff <= 1e-8, "{diff:e}");
}

#[test]
fn sobolev_infinity_plane_is_a_product() {
    let offs = vec![vec![0.0, 0.0], vec![1.5, -0.4], vec![3.0, 7.0]];
    let diff = max_diff(&SymbolFunction::SobolevInfinity { d: 2 }, &offs, |r| eval_kinf_1d(r[0]) * eval_kinf_1d(r[1]));
    assert!(diff <= 1e-8, "{diff:e}");
}

#[test]
fn matern_line() {
    for s in [1.0, 2.0, 1.25] {
        let diff = max_diff(&SymbolFunction::Isotropic { d: 1, s }, &offsets(30, 10.0), |r| {
            matern_radial(1, s, r[0].abs()).unwrap()
        });
        assert!(diff <= 1e-7, "s = {s}: {diff:e}");
    }
}

#[test]
fn matern_space() {
    let offs = vec![vec![0.0, 0.0, 0.0], vec![0.5, 0.0, 0.0], vec![1.0, -2.0, 0.5]];
    let diff = max_diff(&SymbolFunction::Isotropic { d: 3, s: 2.0 }, &offs, |r| {
        matern_radial(3, 2.0, r.iter().map(|x| x * x).sum::<f64>().sqrt()).unwrap()
    });
    assert!(diff <= 1e-7, "{diff:e}");
}

#[test]
fn tensor_factorizes() {
    let spec = KernelSpec::tensor_sobolev(2, 2).unwrap();
    let offs = vec![vec![0.0, 0.0], vec![0.3, 2.5], vec![-4.0, 1.0]];
    let diff = max_diff(&spec.symbol(), &offs, |r| eval_kernel(&spec, r, &[0.0, 0.0]).unwrap());
    assert!(diff <= 1e-8, "{diff:e}");
}

#[test]
fn gaussian_weights_in_two_dimensions() {
    let spec = KernelSpec::gaussian(2).unwrap();
    let offs = vec![vec![0.0, 0.0], vec![0.7, -0.2], vec![1.5, 1.0]];
    let diff = max_diff(&spec.symbol(), &offs, |r| eval_kernel(&spec, r, &[0.0, 0.0]).unwrap());
    assert!(diff <= 1e-6, "{diff:e}");
}

// ∫_{R^2} du / Σ_{|α|≤2} (2πu)^{2α} in polar coordinates, on a different
// grid from the oracle's.
fn sobolev_plane_diag_polar() -> f64 {
    let sym = SymbolFunction::Sobolev { d: 2, s: 2 };
    let angular = |rho: f64| {
        adaptive(
            &mut |phi: f64| eval_symbol(&sym, &[rho * phi.cos(), rho * phi.sin()]).unwrap().recip(),
            0.0,
            PI / 2.0,
            1e-15,
            1e-13,
        )
        .value
    };
    let radial = adaptive(
        &mut |tau: f64| {
            let rho = tau / (1.0 - tau);
            4.0 * rho * angular(rho) / ((1.0 - tau) * (1.0 - tau))
        },
        0.0,
        1.0,
        1e-13,
        1e-12,
    );
    radial.value
}

#[test]
fn sobolev_plane_diagonal() {
    let oracle = eval_fourier_offset(&SymbolFunction::Sobolev { d: 2, s: 2 }, &[0.0, 0.0], &QuadratureConfig::default())
        .unwrap();
    let polar = sobolev_plane_diag_polar();
    assert!((oracle.value - polar).abs() <= 1e-8, "{oracle:?} vs {polar}");
    let b = embedding_bounds_sobolev(2, 2).unwrap();
    let norm = oracle.value.sqrt();
    assert!(b.lower <= norm && norm <= b.upper, "{norm} outside {b:?}");
}

#[test]
fn sobolev_space_diagonal_within_bounds() {
    let oracle = eval_fourier_offset(&SymbolFunction::Sobolev { d: 3, s: 2 }, &[0.0; 3], &QuadratureConfig::default())
        .unwrap();
    let b = embedding_bounds_sobolev(3, 2).unwrap();
    let norm = oracle.value.sqrt();
    assert!(b.lower <= norm && norm <= b.upper, "{norm} outside {b:?}");
}

#[test]
fn isotropic_weights_reproduce_matern() {
    let spec = KernelSpec::weighted(MultiIndexWeights::isotropic_hs(1, 2).unwrap()).unwrap();
    let diff = max_diff(&spec.symbol(), &offsets(20, 8.0), |r| matern_radial(1, 2.0, r[0].abs()).unwrap());
    assert!(diff <= 1e-6, "{diff:e}");
}

#[test]
fn unit_weights_reproduce_univariate_sobolev() {
    let spec = KernelSpec::weighted(MultiIndexWeights::unit(1, 3).unwrap()).unwrap();
    let diff = max_diff(&spec.symbol(), &offsets(20, 8.0), |r| eval_k1s_offset(3, r[0]));
    assert!(diff <= 1e-8, "{diff:e}");
}
