//! Discrete L² norms and error reports.

use ndarray::Array1;

use crate::error::{check_len, Error, Result};
use crate::examples::AnalyticSolution;
use crate::grid::GridSpec;
use crate::linalg::C64;
use crate::problem::StateVector;
use crate::stepper::Method;

/// `(Σ wⱼ |vⱼ|²)^{1/2}` with the grid's quadrature weights.
pub fn l2_norm(values: &Array1<C64>, grid: &GridSpec) -> Result<f64> {
    let w = grid.l2_weights();
    check_len(w.len(), values.len())?;
    Ok(values.iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>().sqrt())
}

/// L² distance between the `u` component of `u_num` and the exact solution at `t`.
pub fn error_l2(u_num: &StateVector, exact: &AnalyticSolution, t: f64) -> Result<f64> {
    let u = u_num.primary();
    let diff = u - exact.samples(&u_num.grid, t);
    let e = l2_norm(&diff, &u_num.grid)?;
    if !e.is_finite() {
        return Err(Error::NonFinite("L2 error".into()));
    }
    Ok(e)
}

/// Final-time error of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: Method,
    pub h: f64,
    pub omega: f64,
    pub l2_error: f64,
    pub wall_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn constant_difference_on_fourier_grid() {
        let g = GridSpec::fourier(32, (0.0, 2.0 * PI)).unwrap();
        let v = Array1::from_elem(32, C64::new(0.0, 3.0));
        let n = l2_norm(&v, &g).unwrap();
        assert!((n - 3.0 * (2.0 * PI).sqrt()).abs() < 1e-12 * n);
    }

    #[test]
    fn exact_samples_have_zero_error() {
        let g = GridSpec::chebyshev(12, (-1.0, 1.0)).unwrap();
        let exact = AnalyticSolution::new(Arc::new(|x, _, t| C64::new(x * t, 1.0)), None);
        let s = StateVector::new(exact.samples(&g, 0.5), g, false).unwrap();
        assert_eq!(error_l2(&s, &exact, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn chebyshev_weights_integrate_parabola() {
        let g = GridSpec::chebyshev(20, (-1.0, 1.0)).unwrap();
        let v: Array1<C64> = g.nodes_1d().iter().map(|x| C64::new((1.0 - x * x).sqrt(), 0.0)).collect();
        let n = l2_norm(&v, &g).unwrap();
        assert!((n * n - 4.0 / 3.0).abs() < 1e-10);
    }
}
