use sobker::kernels::diag_value;
use sobker::qmc::{mean_square_bound, search_point_set, worst_case_error, RepresenterMethod};
use sobker::{Density, KernelSpec, PointSet};

use proptest::prelude::*;

#[test]
fn average_error_respects_mean_square_bound() {
    for (spec, rho) in [
        (KernelSpec::gaussian(1).unwrap(), Density::standard_gaussian(1, 3).unwrap()),
        (KernelSpec::tensor_sobolev(2, 1).unwrap(), Density::uniform_box(vec![0.0; 2], vec![1.0; 2], 3).unwrap()),
    ] {
        let n = 16;
        let sets = 100;
        let mean: f64 = (0..sets)
            .map(|k| {
                let pts = PointSet::sample(&rho, n, 21, 1000 + k).unwrap();
                worst_case_error(&spec, &rho, &pts, 10).unwrap().e2
            })
            .sum::<f64>()
            / sets as f64;
        let bound = mean_square_bound(&spec, n).unwrap();
        assert!(mean <= bound * (1.0 + 5.0 / (sets as f64).sqrt()), "{spec:?}: {mean} > {bound}");
    }
}

#[test]
fn more_points_lower_error() {
    let spec = KernelSpec::tensor_sobolev(1, 1).unwrap();
    let rho = Density::standard_gaussian(1, 0).unwrap();
    let small = search_point_set(&spec, &rho, 8, 20, 4, 10).unwrap();
    let large = search_point_set(&spec, &rho, 128, 20, 4, 10).unwrap();
    assert!(large.report.e < small.report.e);
    assert!(small.within_bound && large.within_bound);
    assert_eq!(large.report.method, RepresenterMethod::ProductQuadrature);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_and_sign(seed in 0u64..1000, n in 1usize..12) {
        let spec = KernelSpec::tensor_sobolev(2, 2).unwrap();
        let rho = Density::standard_gaussian(2, seed).unwrap();
        let pts = PointSet::sample(&rho, n, seed, 5).unwrap();
        let r = worst_case_error(&spec, &rho, &pts, 10).unwrap();
        prop_assert!((r.e2 - (r.hh - r.cross + r.gram)).abs() <= 1e-14);
        prop_assert!(r.e2 >= -r.quad_err - 1e-14);
        prop_assert!(r.gram <= diag_value(&spec).unwrap() + 1e-15);
        prop_assert!(r.hh <= diag_value(&spec).unwrap());
    }

    #[test]
    fn gaussian_terms_are_closed_form(x in -3.0f64..3.0) {
        let spec = KernelSpec::gaussian(1).unwrap();
        let rho = Density::standard_gaussian(1, 0).unwrap();
        let pts = PointSet::new(vec![vec![x]], "fixed").unwrap();
        let r = worst_case_error(&spec, &rho, &pts, 10).unwrap();
        let pi = std::f64::consts::PI;
        let expect = (6.0 * pi).powf(-0.5) - 2.0 * (4.0 * pi).powf(-0.5) * (-x * x / 4.0).exp() + (2.0 * pi).powf(-0.5);
        prop_assert!((r.e2 - expect).abs() <= 1e-15);
        prop_assert_eq!(r.mc_std_err, 0.0);
    }
}
