//! Dense complex linear algebra: LU solves and the Padé(13) matrix exponential.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Padé(13) numerator coefficients b_0..b_13.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled Padé(13) approximant is used.
const THETA13: f64 = 5.371_920_351_148_152;

pub fn norm1(a: &ArrayView2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// LU factorisation with partial pivoting, stored packed.
pub struct Lu {
    lu: Array2<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(mut a: Array2<C64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[[i, k]].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(pmax > 0.0) || !pmax.is_finite() {
                return Err(Error::NonFinite("singular matrix in LU factorisation".into()));
            }
            if p != k {
                for j in 0..n {
                    a.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
            }
            let pivot = a[[k, k]];
            for i in k + 1..n {
                let m = a[[i, k]] / pivot;
                a[[i, k]] = m;
                if m != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let akj = a[[k, j]];
                        a[[i, j]] -= m * akj;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve_mat(&self, b: &Array2<C64>) -> Array2<C64> {
        let n = self.lu.nrows();
        let mut x = b.select(Axis(0), &self.perm);
        let ncols = x.ncols();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[[i, k]];
                if l != C64::new(0.0, 0.0) {
                    for j in 0..ncols {
                        let xkj = x[[k, j]];
                        x[[i, j]] -= l * xkj;
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[[i, k]];
                if u != C64::new(0.0, 0.0) {
                    for j in 0..ncols {
                        let xkj = x[[k, j]];
                        x[[i, j]] -= u * xkj;
                    }
                }
            }
            let d = self.lu[[i, i]];
            for j in 0..ncols {
                x[[i, j]] /= d;
            }
        }
        x
    }
}

/// Dense `exp(a)` by scaling and squaring with a diagonal Padé(13) approximant.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument".into()));
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    if n == 1 {
        return Ok(Array2::from_elem((1, 1), a[[0, 0]].exp()));
    }
    let norm = norm1(&a.view());
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(2f64.powi(-squarings), 0.0);

    let b = PADE13;
    let eye = identity(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let c = |x: f64| C64::new(x, 0.0);

    let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let u_poly = a6.dot(&inner_u) + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &eye * c(b[1]);
    let u = scaled.dot(&u_poly);
    let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let v = a6.dot(&inner_v) + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &eye * c(b[0]);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = Lu::new(denom)?.solve_mat(&numer);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential overflowed".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn lu_solves_small_system() {
        let a = array![
            [C64::new(2.0, 0.0), C64::new(1.0, 1.0)],
            [C64::new(0.0, 1.0), C64::new(3.0, 0.0)]
        ];
        let x = array![[C64::new(1.0, 0.0)], [C64::new(-2.0, 0.5)]];
        let b = a.dot(&x);
        let sol = Lu::new(a).unwrap().solve_mat(&b);
        assert!(max_abs(&(&sol - &x).view()) < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Array2::<C64>::zeros((3, 3));
        assert!(Lu::new(a).is_err());
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&Array2::zeros((5, 5))).unwrap();
        assert!(max_abs(&(&e - &identity(5)).view()) <= 1e-13);
    }

    #[test]
    fn expm_nilpotent() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let a = array![
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        ];
        let e = expm(&a).unwrap();
        let want = array![
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        ];
        assert!(max_abs(&(&e - &want).view()) < 1e-15);
    }

    #[test]
    fn expm_large_norm_diagonal() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = C64::new(-40.0, 0.0);
        a[[1, 1]] = C64::new(0.0, 25.0);
        a[[2, 2]] = C64::new(3.0, -2.0);
        let e = expm(&a).unwrap();
        for i in 0..3 {
            let want = a[[i, i]].exp();
            assert!((e[[i, i]] - want).norm() <= 1e-12 * want.norm().max(1e-300) + 1e-25);
        }
    }

    #[test]
    fn expm_rejects_nan() {
        let mut a = Array2::<C64>::zeros((2, 2));
        a[[0, 1]] = C64::new(f64::NAN, 0.0);
        assert!(matches!(expm(&a), Err(Error::NonFinite(_))));
    }
}
