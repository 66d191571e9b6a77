//! Discretised spatial operators, semigroup propagators, pointwise multipliers and the
//! commutator action `ad_L(α) v = L(α∘v) − α∘(L v)`.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2};

use crate::error::{check_len, Error, Result};
use crate::grid::GridSpec;
use crate::linalg::{expm, identity, C64};

/// Dense matrix of a discretised spatial operator `L` (static potential included).
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    matrix: Array2<C64>,
    grid: GridSpec,
    order: u32,
    lifted: bool,
}

impl EllipticOperator {
    pub fn new(matrix: Array2<C64>, grid: GridSpec, order: u32) -> Result<Self> {
        grid.validate()?;
        let n = grid.state_len();
        check_len(n, matrix.nrows())?;
        check_len(n, matrix.ncols())?;
        Ok(Self { matrix, grid, order, lifted: false })
    }

    /// A 1×1 or small dense operator without spatial structure.
    pub fn dense(matrix: Array2<C64>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, GridSpec::Dense { size: n }, 2)
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// True for the block operator `[[0, I], [L, 0]]` acting on `(u, ∂ₜu)`.
    pub fn is_lifted(&self) -> bool {
        self.lifted
    }

    /// Length of the vectors this operator acts on.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }

    /// Adds `diag(samples)`; used to fold time-independent potential terms into `L`.
    pub fn with_static_potential(mut self, samples: &Array1<C64>) -> Result<Self> {
        if self.lifted {
            return Err(Error::Unsupported("fold static potentials before lifting".into()));
        }
        check_len(self.dim(), samples.len())?;
        for (i, s) in samples.iter().enumerate() {
            self.matrix[[i, i]] += *s;
        }
        Ok(self)
    }

    /// Scalar multiple `c L`, keeping grid metadata.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.matrix.mapv_inplace(|z| z * c);
        out
    }
}

/// Periodic Fourier second-derivative matrix on `m` equispaced nodes of `interval`.
pub fn build_fourier_diff2(m: usize, interval: (f64, f64)) -> Result<EllipticOperator> {
    if m % 2 != 0 {
        return Err(Error::InvalidGrid(format!("Fourier grid size must be even, got {m}")));
    }
    let grid = GridSpec::fourier(m, interval)?;
    let h = 2.0 * PI / m as f64;
    let scale = (2.0 * PI / (interval.1 - interval.0)).powi(2);
    let diag = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
    let mut d2 = Array2::<C64>::zeros((m, m));
    for j in 0..m {
        for k in 0..m {
            let v = if j == k {
                diag
            } else {
                let diff = j as i64 - k as i64;
                let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let sn = (diff as f64 * h / 2.0).sin();
                -sign / (2.0 * sn * sn)
            };
            d2[[j, k]] = C64::new(v * scale, 0.0);
        }
    }
    EllipticOperator::new(d2, grid, 2)
}

/// Chebyshev collocation first-derivative matrix on the `m + 1` Lobatto points of `[-1, 1]`.
fn chebyshev_d1(m: usize) -> Array2<f64> {
    let n = m;
    let x: Vec<f64> = (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect();
    let c: Vec<f64> = (0..=n)
        .map(|j| {
            let e = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 { e } else { -e }
        })
        .collect();
    let mut d = Array2::<f64>::zeros((n + 1, n + 1));
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[[i, j]] = c[i] / c[j] / (x[i] - x[j]);
            }
        }
    }
    // negative-sum trick for the diagonal
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[[i, j]]).sum();
        d[[i, i]] = -s;
    }
    d
}

/// Interior-node Chebyshev second-derivative matrix with homogeneous Dirichlet
/// conditions; `m + 1` Lobatto points, side `m - 1`.
pub fn build_chebyshev_dirichlet(m: usize, interval: (f64, f64)) -> Result<EllipticOperator> {
    let grid = GridSpec::chebyshev(m, interval)?;
    let d = chebyshev_d1(m);
    let d2 = d.dot(&d);
    let scale = (2.0 / (interval.1 - interval.0)).powi(2);
    let inner = d2.slice(s![1..m, 1..m]).mapv(|v| C64::new(v * scale, 0.0));
    EllipticOperator::new(inner, grid, 2)
}

/// `Ax ⊗ I + I ⊗ Ay` on the row-major tensor grid.
pub fn kron_sum(ax: &EllipticOperator, ay: &EllipticOperator) -> Result<EllipticOperator> {
    if ax.lifted || ay.lifted || ax.grid.is_tensor() || ay.grid.is_tensor() {
        return Err(Error::Unsupported("kron_sum needs two one-dimensional operators".into()));
    }
    let (nx, ny) = (ax.dim(), ay.dim());
    let mut out = Array2::<C64>::zeros((nx * ny, nx * ny));
    for i in 0..nx {
        for k in 0..nx {
            let a = ax.matrix[[i, k]];
            if a != C64::new(0.0, 0.0) {
                for j in 0..ny {
                    out[[i * ny + j, k * ny + j]] += a;
                }
            }
        }
        for j in 0..ny {
            for l in 0..ny {
                out[[i * ny + j, i * ny + l]] += ay.matrix[[j, l]];
            }
        }
    }
    let grid = match (&ax.grid, &ay.grid) {
        (GridSpec::Dense { .. }, _) | (_, GridSpec::Dense { .. }) => GridSpec::Dense { size: nx * ny },
        (gx, gy) => GridSpec::tensor(gx.clone(), gy.clone())?,
    };
    EllipticOperator::new(out, grid, ax.order.max(ay.order))
}

/// Block operator `[[0, I], [L, 0]]` of the first-order form of `∂ₜₜu = L u`.
pub fn wave_first_order(l: &EllipticOperator) -> Result<EllipticOperator> {
    if l.lifted {
        return Err(Error::Unsupported("operator is already lifted".into()));
    }
    let m = l.dim();
    let mut a = Array2::<C64>::zeros((2 * m, 2 * m));
    a.slice_mut(s![0..m, m..2 * m]).assign(&identity(m));
    a.slice_mut(s![m..2 * m, 0..m]).assign(&l.matrix);
    Ok(EllipticOperator { matrix: a, grid: l.grid.clone(), order: l.order, lifted: true })
}

/// Pointwise multiplication by grid samples `α`; in lifted form `(u, v) ↦ (0, α∘u)`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    samples: Array1<C64>,
    lifted: bool,
}

impl Multiplier {
    pub fn new(samples: Array1<C64>) -> Self {
        Self { samples, lifted: false }
    }

    pub fn lifted(samples: Array1<C64>) -> Self {
        Self { samples, lifted: true }
    }

    pub fn for_operator(op: &EllipticOperator, samples: Array1<C64>) -> Result<Self> {
        let expected = if op.lifted { op.dim() / 2 } else { op.dim() };
        check_len(expected, samples.len())?;
        Ok(Self { samples, lifted: op.lifted })
    }

    pub fn samples(&self) -> &Array1<C64> {
        &self.samples
    }

    pub fn is_lifted(&self) -> bool {
        self.lifted
    }

    pub fn dim(&self) -> usize {
        if self.lifted { 2 * self.samples.len() } else { self.samples.len() }
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        debug_assert_eq!(v.len(), self.dim());
        if self.lifted {
            let m = self.samples.len();
            let mut out = Array1::<C64>::zeros(2 * m);
            for i in 0..m {
                out[m + i] = self.samples[i] * v[i];
            }
            out
        } else {
            &self.samples * v
        }
    }

    /// Dense matrix form, `diag(α)` or `[[0, 0], [diag(α), 0]]`.
    pub fn to_dense(&self) -> Array2<C64> {
        let m = self.samples.len();
        let mut out = Array2::<C64>::zeros((self.dim(), self.dim()));
        let off = if self.lifted { m } else { 0 };
        for i in 0..m {
            out[[off + i, i]] = self.samples[i];
        }
        out
    }
}

/// The lifted multiplier `β(u, v) = (0, α∘u)` matching [`wave_first_order`].
pub fn lift_multiplier(alpha: Array1<C64>) -> Multiplier {
    Multiplier::lifted(alpha)
}

/// `L(α∘v) − α∘(L v)`.
pub fn commutator_apply(l: &EllipticOperator, alpha: &Multiplier, v: &Array1<C64>) -> Result<Array1<C64>> {
    check_len(l.dim(), alpha.dim())?;
    check_len(l.dim(), v.len())?;
    Ok(l.apply(&alpha.apply(v)) - alpha.apply(&l.apply(v)))
}

/// Semigroup propagator `e^{step L}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    step: f64,
    matrix: Array2<C64>,
}

impl Propagator {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }
}

/// Dense `e^{t A}` for `t ≥ 0`.
pub fn matrix_exp(a: &EllipticOperator, t: f64) -> Result<Propagator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("propagator time must be finite and non-negative, got {t}")));
    }
    let matrix = if t == 0.0 {
        if a.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator matrix".into()));
        }
        identity(a.dim())
    } else {
        expm(&(a.matrix() * C64::new(t, 0.0)))?
    };
    Ok(Propagator { step: t, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_vec};
    use ndarray::array;

    fn sample(grid: &GridSpec, f: impl Fn(f64, f64) -> C64) -> Array1<C64> {
        grid.points().iter().map(|p| f(p[0], p[1])).collect()
    }

    #[test]
    fn fourier_diff2_on_sine() {
        let l = build_fourier_diff2(100, (0.0, 2.0 * PI)).unwrap();
        let u = sample(l.grid(), |x, _| C64::new(x.sin(), 0.0));
        let err = max_abs_vec(&(l.apply(&u) + &u));
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn fourier_diff2_kills_constants() {
        let l = build_fourier_diff2(64, (-3.0, 5.0)).unwrap();
        let one = Array1::from_elem(64, C64::new(1.0, 0.0));
        assert!(max_abs_vec(&l.apply(&one)) <= 1e-10);
    }

    #[test]
    fn fourier_diff2_complex_exponential() {
        let l = build_fourier_diff2(32, (0.0, 2.0 * PI)).unwrap();
        let u = sample(l.grid(), |x, _| C64::new(0.0, 2.0 * x).exp());
        let err = max_abs_vec(&(l.apply(&u) + &u * C64::new(4.0, 0.0)));
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn fourier_diff2_is_symmetric() {
        let l = build_fourier_diff2(50, (0.0, 7.0)).unwrap();
        let a = l.matrix();
        assert!(max_abs(&(a - &a.t()).view()) <= 1e-10);
    }

    #[test]
    fn fourier_rejects_odd_size() {
        assert!(matches!(build_fourier_diff2(33, (0.0, 1.0)), Err(Error::InvalidGrid(_))));
        assert!(build_fourier_diff2(2, (0.0, 1.0)).is_err());
    }

    #[test]
    fn chebyshev_dirichlet_on_sine() {
        let l = build_chebyshev_dirichlet(20, (-1.0, 1.0)).unwrap();
        assert_eq!(l.dim(), 19);
        let u = sample(l.grid(), |x, _| C64::new((PI * x).sin(), 0.0));
        let err = max_abs_vec(&(l.apply(&u) + &u * C64::new(PI * PI, 0.0)));
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn chebyshev_scales_with_interval() {
        let l = build_chebyshev_dirichlet(24, (0.0, 3.0)).unwrap();
        let k = PI / 3.0;
        let u = sample(l.grid(), |x, _| C64::new((k * x).sin(), 0.0));
        let err = max_abs_vec(&(l.apply(&u) + &u * C64::new(k * k, 0.0)));
        assert!(err <= 1e-7, "{err}");
    }

    #[test]
    fn kron_sum_of_scalars() {
        let a = EllipticOperator::dense(array![[C64::new(1.5, -0.5)]]).unwrap();
        let k = kron_sum(&a, &a).unwrap();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.matrix()[[0, 0]], C64::new(3.0, -1.0));
    }

    #[test]
    fn kron_sum_product_eigenfunction() {
        let lx = build_chebyshev_dirichlet(20, (-1.0, 1.0)).unwrap();
        let l = kron_sum(&lx, &lx).unwrap();
        let u = sample(l.grid(), |x, y| C64::new((PI * x).sin() * (PI * y).sin(), 0.0));
        let err = max_abs_vec(&(l.apply(&u) + &u * C64::new(2.0 * PI * PI, 0.0)));
        assert!(err <= 1e-5, "{err}");
    }

    #[test]
    fn kron_sum_rejects_lifted() {
        let l = build_fourier_diff2(8, (0.0, 1.0)).unwrap();
        let w = wave_first_order(&l).unwrap();
        assert!(kron_sum(&w, &l).is_err());
    }

    #[test]
    fn matrix_exp_zero_time_is_identity() {
        let l = build_fourier_diff2(16, (0.0, 2.0 * PI)).unwrap();
        let p = matrix_exp(&l, 0.0).unwrap();
        assert!(max_abs(&(p.matrix() - &identity(16)).view()) <= 1e-13);
    }

    #[test]
    fn matrix_exp_scalar() {
        let a = EllipticOperator::dense(array![[C64::new(0.7, 0.2)]]).unwrap();
        let p = matrix_exp(&a, 1.0).unwrap();
        assert!((p.matrix()[[0, 0]] - C64::new(0.7, 0.2).exp()).norm() < 1e-15);
    }

    #[test]
    fn matrix_exp_rotation() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let a = EllipticOperator::dense(array![[zero, one], [-one, zero]]).unwrap();
        let p = matrix_exp(&a, PI / 2.0).unwrap();
        let want = array![[zero, one], [-one, zero]];
        assert!(max_abs(&(p.matrix() - &want).view()) <= 1e-12);
    }

    #[test]
    fn matrix_exp_rejects_negative_time_and_nan() {
        let a = EllipticOperator::dense(array![[C64::new(1.0, 0.0)]]).unwrap();
        assert!(matches!(matrix_exp(&a, -0.1), Err(Error::Domain(_))));
        let b = EllipticOperator::dense(array![[C64::new(f64::INFINITY, 0.0)]]).unwrap();
        assert!(matches!(matrix_exp(&b, 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn commutator_with_constant_vanishes() {
        let l = build_fourier_diff2(32, (0.0, 2.0 * PI)).unwrap();
        let c = Multiplier::new(Array1::from_elem(32, C64::new(2.5, -1.0)));
        let v = sample(l.grid(), |x, _| C64::new(x.cos(), (2.0 * x).sin()));
        let r = commutator_apply(&l, &c, &v).unwrap();
        assert!(max_abs_vec(&r) <= 1e-10);
    }

    #[test]
    fn commutator_scalar_is_zero() {
        let l = EllipticOperator::dense(array![[C64::new(-3.0, 1.0)]]).unwrap();
        let a = Multiplier::new(array![C64::new(0.4, 2.0)]);
        let r = commutator_apply(&l, &a, &array![C64::new(1.3, -0.2)]).unwrap();
        assert_eq!(r[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn commutator_of_laplacian() {
        // (cos·sin)'' − cos·(sin)'' = −2 sin(2x) + cos x sin x
        let l = build_fourier_diff2(100, (0.0, 2.0 * PI)).unwrap();
        let alpha = Multiplier::new(sample(l.grid(), |x, _| C64::new(x.cos(), 0.0)));
        let v = sample(l.grid(), |x, _| C64::new(x.sin(), 0.0));
        let r = commutator_apply(&l, &alpha, &v).unwrap();
        let want = sample(l.grid(), |x, _| C64::new(-2.0 * (2.0 * x).sin() + x.cos() * x.sin(), 0.0));
        assert!(max_abs_vec(&(r - want)) <= 1e-7);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let l = build_fourier_diff2(8, (0.0, 1.0)).unwrap();
        let a = Multiplier::new(Array1::zeros(6));
        assert!(commutator_apply(&l, &a, &Array1::zeros(8)).is_err());
    }

    #[test]
    fn wave_block_structure() {
        let l = build_fourier_diff2(8, (0.0, 2.0 * PI)).unwrap();
        let a = wave_first_order(&l).unwrap();
        let m = a.matrix();
        assert_eq!(m.nrows(), 16);
        assert!(m.slice(s![0..8, 0..8]).iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert!(m.slice(s![8..16, 8..16]).iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert_eq!(m.slice(s![0..8, 8..16]), identity(8));
        assert_eq!(m.slice(s![8..16, 0..8]), *l.matrix());
    }

    #[test]
    fn wave_square_is_block_diagonal() {
        let l = build_fourier_diff2(10, (0.0, 3.0)).unwrap();
        let a = wave_first_order(&l).unwrap();
        let sq = a.matrix().dot(a.matrix());
        let mut want = Array2::<C64>::zeros((20, 20));
        want.slice_mut(s![0..10, 0..10]).assign(l.matrix());
        want.slice_mut(s![10..20, 10..20]).assign(l.matrix());
        assert!(max_abs(&(sq - want).view()) <= 1e-12);
    }

    #[test]
    fn wave_harmonic_oscillator() {
        let k = 2.0;
        let t = 0.3;
        let l = EllipticOperator::dense(array![[C64::new(-k * k, 0.0)]]).unwrap();
        let a = wave_first_order(&l).unwrap();
        let p = matrix_exp(&a, t).unwrap();
        let (c, s) = ((k * t).cos(), (k * t).sin());
        let want = array![
            [C64::new(c, 0.0), C64::new(s / k, 0.0)],
            [C64::new(-k * s, 0.0), C64::new(c, 0.0)]
        ];
        assert!(max_abs(&(p.matrix() - &want).view()) <= 1e-12);
    }

    #[test]
    fn lifted_multiplier_action() {
        let beta = lift_multiplier(array![C64::new(2.0, 0.0), C64::new(0.0, 1.0)]);
        let v = array![
            C64::new(1.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(5.0, 0.0),
            C64::new(7.0, 0.0)
        ];
        let out = beta.apply(&v);
        assert_eq!(out, array![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 3.0)]);
        assert_eq!(beta.to_dense().dot(&v), out);
    }
}
