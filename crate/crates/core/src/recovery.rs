//! Minimal-norm interpolation in H(K): f* = Σ_j α_j K(·, x_j) with Gα = y.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{diag_value, eval_kernel, KernelSpec};
use crate::qmc::PointSet;

/// Multiples of the Gram diagonal tried in turn when factorizing.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

const REFINEMENT_STEPS: usize = 3;

/// G[i][j] = K(x_i, x_j), with the diagonal set to K(0,0).
pub fn gram_matrix(spec: &KernelSpec, pts: &PointSet) -> Result<DMatrix<f64>> {
    if pts.d() != spec.d() {
        return Err(Error::DimensionMismatch { expected: spec.d(), got: pts.d() });
    }
    let n = pts.len();
    let p = pts.points();
    let diag = diag_value(spec)?;
    let rows = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| eval_kernel(spec, &p[i], &p[j])).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::from_element(n, n, diag);
    for (i, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(g.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Fitted minimal-norm interpolant.
#[derive(Debug, Clone)]
pub struct SplineModel {
    spec: KernelSpec,
    points: PointSet,
    coeffs: Vec<f64>,
    values: Vec<f64>,
    norm: f64,
    jitter_used: f64,
    residual: f64,
    factor: Cholesky<f64, Dyn>,
}

impl SplineModel {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Absolute diagonal shift of the accepted factorization.
    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    /// ‖Gα - y‖₂ with the unshifted Gram matrix.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Cholesky factor of G + jitter·I.
    pub fn factor(&self) -> &Cholesky<f64, Dyn> {
        &self.factor
    }
}

/// Rejects exactly repeated points.
fn check_distinct(pts: &PointSet) -> Result<()> {
    let p = pts.points();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| {
        p[a].iter().zip(&p[b]).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    for w in order.windows(2) {
        if p[w[0]] == p[w[1]] {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicatePoints(i, j));
        }
    }
    Ok(())
}

/// Solves Gα = y with the jitter ladder and a few steps of iterative
/// refinement against the unshifted G.
pub fn fit_spline(spec: &KernelSpec, pts: &PointSet, y: &[f64]) -> Result<SplineModel> {
    if y.len() != pts.len() {
        return Err(Error::DimensionMismatch { expected: pts.len(), got: y.len() });
    }
    check_distinct(pts)?;
    let g = gram_matrix(spec, pts)?;
    let n = pts.len();
    let scale = g[(0, 0)];
    let rhs = DVector::from_column_slice(y);
    let mut last_jitter = 0.0;
    for mult in JITTER_LADDER {
        let jitter = mult * scale;
        last_jitter = jitter;
        let shifted = &g + DMatrix::identity(n, n) * jitter;
        let Some(factor) = Cholesky::new(shifted) else { continue };
        let mut alpha = factor.solve(&rhs);
        for _ in 0..REFINEMENT_STEPS {
            let r = &rhs - &g * &alpha;
            alpha += factor.solve(&r);
        }
        let residual = (&rhs - &g * &alpha).norm();
        if !residual.is_finite() {
            continue;
        }
        let norm = alpha.dot(&rhs).max(0.0).sqrt();
        return Ok(SplineModel {
            spec: spec.clone(),
            points: pts.clone(),
            coeffs: alpha.iter().copied().collect(),
            values: y.to_vec(),
            norm,
            jitter_used: jitter,
            residual,
            factor,
        });
    }
    Err(Error::JitterExhausted(last_jitter))
}

/// f*(t) = Σ_j α_j K(t, x_j).
pub fn eval_spline(model: &SplineModel, t: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (a, x) in model.coeffs.iter().zip(model.points.points()) {
        acc += a * eval_kernel(&model.spec, t, x)?;
    }
    Ok(acc)
}

/// ‖f*‖ = √(αᵀy).
pub fn spline_norm(model: &SplineModel) -> f64 {
    model.norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmc::Density;
    use approx::assert_relative_eq;

    fn pts(v: Vec<Vec<f64>>) -> PointSet {
        PointSet::new(v, "fixed").unwrap()
    }

    #[test]
    fn gram_examples() {
        let k = KernelSpec::sobolev_univariate(1).unwrap();
        let g = gram_matrix(&k, &pts(vec![vec![0.0]])).unwrap();
        assert_eq!(g[(0, 0)], 0.5);
        let g = gram_matrix(&k, &pts(vec![vec![0.0], vec![1.0]])).unwrap();
        assert_eq!(g[(0, 0)], 0.5);
        assert_relative_eq!(g[(0, 1)], 0.5 * (-1f64).exp(), max_relative = 1e-15);
        assert_eq!(g[(0, 1)], g[(1, 0)]);
    }

    #[test]
    fn gram_is_psd_across_families() {
        let specs = [
            KernelSpec::sobolev_univariate(2).unwrap(),
            KernelSpec::sobolev_infinity(2).unwrap(),
            KernelSpec::tensor_sobolev(3, 1).unwrap(),
            KernelSpec::matern(3, 2.0).unwrap(),
            KernelSpec::gaussian(2).unwrap(),
        ];
        for spec in &specs {
            let rho = Density::standard_gaussian(spec.d(), 0).unwrap();
            let p = PointSet::sample(&rho, 20, 3, 0).unwrap();
            let g = gram_matrix(spec, &p).unwrap();
            assert!(min_eigenvalue(&g) >= -1e-10, "{spec:?}");
        }
    }

    #[test]
    fn single_point_fit() {
        let k = KernelSpec::sobolev_univariate(1).unwrap();
        let m = fit_spline(&k, &pts(vec![vec![0.0]]), &[1.0]).unwrap();
        assert_relative_eq!(m.coeffs()[0], 2.0, max_relative = 1e-15);
        for t in [0.0, 0.7, -2.0] {
            assert_relative_eq!(eval_spline(&m, &[t]).unwrap(), (-f64::abs(t)).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn zero_data_and_representers() {
        let k = KernelSpec::sobolev_univariate(2).unwrap();
        let p = pts(vec![vec![-1.0], vec![0.3], vec![2.0], vec![4.5]]);
        let m = fit_spline(&k, &p, &[0.0; 4]).unwrap();
        assert!(m.coeffs().iter().all(|&a| a == 0.0));
        assert_eq!(spline_norm(&m), 0.0);

        let g = gram_matrix(&k, &p).unwrap();
        let col: Vec<f64> = g.column(2).iter().copied().collect();
        let m = fit_spline(&k, &p, &col).unwrap();
        for (j, a) in m.coeffs().iter().enumerate() {
            let expect = if j == 2 { 1.0 } else { 0.0 };
            assert!((a - expect).abs() <= 1e-10);
        }
        assert!((spline_norm(&m) - g[(2, 2)].sqrt()).abs() <= 1e-10);
        let t = [1.1];
        assert!((eval_spline(&m, &t).unwrap() - eval_kernel(&k, &t, &[2.0]).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn duplicates_are_rejected() {
        let k = KernelSpec::gaussian(2).unwrap();
        let p = pts(vec![vec![0.0, 1.0], vec![2.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(fit_spline(&k, &p, &[1.0, 2.0, 3.0]), Err(Error::DuplicatePoints(0, 2))));
    }

    #[test]
    fn clustered_gaussian_needs_jitter() {
        let k = KernelSpec::gaussian(1).unwrap();
        let p = pts((0..40).map(|i| vec![i as f64 * 0.02]).collect());
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).sin()).collect();
        let m = fit_spline(&k, &p, &y).unwrap();
        assert!(m.jitter_used() > 0.0);
    }

    #[test]
    fn interpolation_and_minimality() {
        let k = KernelSpec::matern(2, 1.5).unwrap();
        let p = pts(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.7, 1.2], vec![2.0, -1.0]]);
        let y = [1.0, -0.5, 0.25, 2.0];
        let m = fit_spline(&k, &p, &y).unwrap();
        for (x, v) in p.points().iter().zip(&y) {
            assert!((eval_spline(&m, x).unwrap() - v).abs() <= 1e-7 * 2.0);
        }
        let mut bigger = p.points().to_vec();
        bigger.push(vec![0.5, 0.5]);
        for extra in [-3.0, 0.0, 0.4, 5.0] {
            let mut yy = y.to_vec();
            yy.push(extra);
            let g = fit_spline(&k, &pts(bigger.clone()), &yy).unwrap();
            assert!(spline_norm(&g) >= spline_norm(&m) - 1e-9);
        }
    }
}
