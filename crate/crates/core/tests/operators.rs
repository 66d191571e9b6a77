use std::f64::consts::PI;

use nalgebra::DMatrix;

use nf3::operator::{build_chebyshev_dirichlet, build_fourier_diff2, kron_sum, matrix_exp};
use nf3::{EllipticOperator, C64};

fn eigenvalues(op: &EllipticOperator) -> Vec<f64> {
    let n = op.dim();
    let m = DMatrix::from_fn(n, n, |i, j| op.matrix()[[i, j]].re);
    let mut ev: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

#[test]
fn chebyshev_lowest_mode() {
    let op = build_chebyshev_dirichlet(24, (-1.0, 1.0)).unwrap();
    let top = eigenvalues(&op)[0];
    let exact = -PI * PI / 4.0;
    assert!(((top - exact) / exact).abs() < 1e-4, "{top}");
}

#[test]
fn kron_sum_spectrum_is_pairwise_sums() {
    let d = build_chebyshev_dirichlet(6, (-1.0, 1.0)).unwrap();
    let one = eigenvalues(&d);
    let mut sums: Vec<f64> = one.iter().flat_map(|a| one.iter().map(move |b| a + b)).collect();
    sums.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let two = eigenvalues(&kron_sum(&d, &d).unwrap());
    assert_eq!(two.len(), sums.len());
    for (a, b) in two.iter().zip(&sums) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn fourier_spectrum_is_negative_squares() {
    let op = build_fourier_diff2(16, (0.0, 2.0 * PI)).unwrap();
    let ev = eigenvalues(&op);
    let mut want: Vec<f64> = (-8i32..8).map(|k| -((k * k) as f64)).collect();
    want.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (a, b) in ev.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn propagator_semigroup() {
    let op = build_fourier_diff2(24, (-8.0, 8.0)).unwrap();
    for (s, t) in [(0.1, 0.2), (0.5, 0.5), (1.0, 0.3)] {
        let a = matrix_exp(&op, s).unwrap();
        let b = matrix_exp(&op, t).unwrap();
        let c = matrix_exp(&op, s + t).unwrap();
        let diff = (a.matrix().dot(b.matrix()) - c.matrix()).iter().map(|z: &C64| z.norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-9, "{diff}");
    }
}
