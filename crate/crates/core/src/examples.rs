//! Benchmark problems with closed-form solutions, and a scalar test equation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{array, Array1};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::C64;
use crate::operator::{build_chebyshev_dirichlet, build_fourier_diff2, kron_sum, EllipticOperator};
use crate::problem::{Mode, OscillatoryPotential, Problem, StateVector};

type Field = Arc<dyn Fn(f64, f64, f64) -> C64 + Send + Sync>;

/// Exact solution `u(x, y, t)` and, for second-order problems, `∂ₜu`.
#[derive(Clone)]
pub struct AnalyticSolution {
    u: Field,
    ut: Option<Field>,
}

impl fmt::Debug for AnalyticSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSolution").field("velocity", &self.ut.is_some()).finish()
    }
}

impl AnalyticSolution {
    pub fn new(u: Field, ut: Option<Field>) -> Self {
        Self { u, ut }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> C64 {
        (self.u)(x, y, t)
    }

    pub fn has_velocity(&self) -> bool {
        self.ut.is_some()
    }

    /// `u(·, t)` on the grid nodes.
    pub fn samples(&self, grid: &GridSpec, t: f64) -> Array1<C64> {
        grid.points().iter().map(|p| (self.u)(p[0], p[1], t)).collect()
    }

    /// `∂ₜu(·, t)` on the grid nodes, if known.
    pub fn velocity_samples(&self, grid: &GridSpec, t: f64) -> Option<Array1<C64>> {
        self.ut.as_ref().map(|ut| grid.points().iter().map(|p| ut(p[0], p[1], t)).collect())
    }

    /// Exact state at time `t`, stacked `(u, ∂ₜu)` when `lifted`.
    pub fn state(&self, grid: &GridSpec, t: f64, lifted: bool) -> Result<StateVector> {
        let u = self.samples(grid, t);
        if !lifted {
            return StateVector::new(u, grid.clone(), false);
        }
        let v = self
            .velocity_samples(grid, t)
            .ok_or_else(|| Error::Unsupported("solution has no velocity for a lifted state".into()))?;
        let mut values = u.to_vec();
        values.extend(v.iter());
        StateVector::new(Array1::from(values), grid.clone(), true)
    }
}

/// Grid size used by the benchmark for problem `id`.
pub fn default_grid_points(id: u8) -> usize {
    if id == 2 {
        20
    } else {
        100
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sample_1d(grid: &GridSpec, f: impl Fn(f64) -> C64) -> Array1<C64> {
    grid.points().iter().map(|p| f(p[0])).collect()
}

fn sample_2d(grid: &GridSpec, f: impl Fn(f64, f64) -> C64) -> Array1<C64> {
    grid.points().iter().map(|p| f(p[0], p[1])).collect()
}

/// Problem `id ∈ 1..=4` at frequency `omega` on `m` points per dimension, with horizon 1.
pub fn example_problem(id: u8, omega: f64, m: usize) -> Result<(Problem, AnalyticSolution)> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("ω must be positive, got {omega}")));
    }
    match id {
        1 => heat_1d(omega, m),
        2 => heat_2d(omega, m),
        3 => wave_nonresonant(omega, m),
        4 => wave_resonant(omega, m),
        _ => Err(Error::Domain(format!("unknown example {id} (expected 1 to 4)"))),
    }
}

fn heat_1d(omega: f64, m: usize) -> Result<(Problem, AnalyticSolution)> {
    let l = build_fourier_diff2(m, (0.0, 2.0 * PI))?;
    let grid = l.grid().clone();
    let l = l.with_static_potential(&Array1::from_elem(m, c(1.0, 0.0)))?;
    let cosx = Arc::new(sample_1d(&grid, |x| c(x.cos(), 0.0)));
    let sin2 = Arc::new(sample_1d(&grid, |x| c(x.sin().powi(2), 0.0)));
    let (c1, c1t) = (cosx.clone(), cosx.clone());
    let (s2, s2t) = (sin2.clone(), sin2);
    let m1 = Mode::new(
        1,
        Arc::new(move |t| (*c1).mapv(|v| v * c(-t * omega, 1.0 + 3.0 * t) / omega)),
        Some(Arc::new(move |_| (*c1t).mapv(|v| v * c(-omega, 3.0) / omega))),
    );
    let m2 = Mode::new(
        2,
        Arc::new(move |t| (*s2).mapv(|v| v * (t * t / (omega * omega)))),
        Some(Arc::new(move |t| (*s2t).mapv(|v| v * (2.0 * t / (omega * omega))))),
    );
    let pot = OscillatoryPotential::new(omega, vec![m1, m2])?;
    let exact = AnalyticSolution::new(
        Arc::new(move |x, _, t| {
            let g = c(0.0, 1.0) * c(0.0, omega * t).exp() * (x.cos() * t / omega);
            g.exp() * x.sin()
        }),
        None,
    );
    let u0 = exact.samples(&grid, 0.0);
    Ok((Problem::first_order(l, pot, u0, 1.0)?, exact))
}

fn heat_2d(omega: f64, m: usize) -> Result<(Problem, AnalyticSolution)> {
    let d = build_chebyshev_dirichlet(m, (-1.0, 1.0))?;
    let l = kron_sum(&d, &d)?;
    let grid = l.grid().clone();
    let n = grid.state_len();
    let l = l.with_static_potential(&Array1::from_elem(n, c(2.0 * PI * PI, 0.0)))?;
    let pi2 = PI * PI;
    let a1 = sample_2d(&grid, |x, y| c(6.0 * pi2, omega) * ((PI * x).cos() * (PI * y).cos() / omega));
    let a2 = sample_2d(&grid, |x, y| {
        c(0.5 * pi2 * (-1.0 + (2.0 * PI * x).cos() * (2.0 * PI * y).cos()) / (omega * omega), 0.0)
    });
    let pot = OscillatoryPotential::new(omega, vec![Mode::constant(1, a1), Mode::constant(2, a2)])?;
    let exact = AnalyticSolution::new(
        Arc::new(move |x, y, t| {
            let g = c(0.0, omega * t).exp() * ((PI * x).cos() * (PI * y).cos() / omega);
            g.exp() * ((PI * x).sin() * (PI * y).sin())
        }),
        None,
    );
    let u0 = exact.samples(&grid, 0.0);
    Ok((Problem::first_order(l, pot, u0, 1.0)?, exact))
}

fn wave_operator(m: usize, static_part: impl Fn(f64) -> f64) -> Result<(EllipticOperator, GridSpec)> {
    let l = build_fourier_diff2(m, (-8.0, 8.0))?;
    let grid = l.grid().clone();
    let s = sample_1d(&grid, |x| c(static_part(x), 0.0));
    Ok((l.with_static_potential(&s)?, grid))
}

fn wave_nonresonant(omega: f64, m: usize) -> Result<(Problem, AnalyticSolution)> {
    let (l, grid) = wave_operator(m, |x| 1.0 - x * x)?;
    let w2 = omega * omega;
    let a1 = sample_1d(&grid, |x| c((2.0 + x * x * (w2 - 4.0)) / w2, 0.0));
    let a2 = sample_1d(&grid, |x| c(-x * x * (4.0 + x * x * w2) / (w2 * w2), 0.0));
    let pot = OscillatoryPotential::new(omega, vec![Mode::constant(1, a1), Mode::constant(2, a2)])?;
    let u = move |x: f64, t: f64| (-x * x / 2.0 - c(0.0, omega * t).exp() * (x * x / w2)).exp();
    let exact = AnalyticSolution::new(
        Arc::new(move |x, _, t| u(x, t)),
        Some(Arc::new(move |x, _, t| c(0.0, -1.0) * c(0.0, omega * t).exp() * (x * x / omega) * u(x, t))),
    );
    let u0 = exact.samples(&grid, 0.0);
    let v0 = exact.velocity_samples(&grid, 0.0).expect("velocity is defined");
    Ok((Problem::wave(&l, pot, u0, v0, 1.0)?, exact))
}

fn wave_resonant(omega: f64, m: usize) -> Result<(Problem, AnalyticSolution)> {
    let w2 = omega * omega;
    let w4 = w2 * w2;
    let (l, grid) = wave_operator(m, |x| 1.0 - x * x - 2.0 * x * x / w4 + x.powi(4) / (2.0 * w2))?;
    let a1 = sample_1d(&grid, |x| c((2.0 + x * x * w2 - 4.0 * x * x) / (2.0 * w2), 0.0));
    let a2 = sample_1d(&grid, |x| c(-x * x / w4 - x.powi(4) / (4.0 * w2), 0.0));
    let pot = OscillatoryPotential::symmetric(omega, vec![Mode::constant(1, a1), Mode::constant(2, a2)])?;
    let u = move |x: f64, t: f64| c((-(omega * t).cos() * x * x / w2 - x * x / 2.0).exp(), 0.0);
    let exact = AnalyticSolution::new(
        Arc::new(move |x, _, t| u(x, t)),
        Some(Arc::new(move |x, _, t| u(x, t) * ((omega * t).sin() * x * x / omega))),
    );
    let u0 = exact.samples(&grid, 0.0);
    let v0 = exact.velocity_samples(&grid, 0.0).expect("velocity is defined");
    Ok((Problem::wave(&l, pot, u0, v0, 1.0)?, exact))
}

/// `u′ = a u + ε e^{iωt} u`, `u(0) = 1`.
pub fn scalar_problem(a: f64, epsilon: f64, omega: f64, horizon: f64) -> Result<Problem> {
    let l = EllipticOperator::dense(array![[c(a, 0.0)]])?;
    let pot = if epsilon == 0.0 {
        OscillatoryPotential::zero(omega)
    } else {
        OscillatoryPotential::new(omega, vec![Mode::constant(1, array![c(epsilon, 0.0)])])?
    };
    Problem::first_order(l, pot, array![c(1.0, 0.0)], horizon)
}

/// Exact solution of the scalar problem from `u(t0) = 1` to time `t1`.
pub fn scalar_exact(a: f64, epsilon: f64, omega: f64, t0: f64, t1: f64) -> C64 {
    let drift = (c(0.0, omega * t1).exp() - c(0.0, omega * t0).exp()) / c(0.0, omega);
    (c(a * (t1 - t0), 0.0) + drift * epsilon).exp()
}

/// The scalar exact solution as an [`AnalyticSolution`] on a one-point grid.
pub fn scalar_solution(a: f64, epsilon: f64, omega: f64) -> AnalyticSolution {
    AnalyticSolution::new(Arc::new(move |_, _, t| scalar_exact(a, epsilon, omega, 0.0, t)), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_states_match_exact_solutions() {
        for id in 1..=4u8 {
            let m = if id == 2 { 10 } else { 32 };
            let (p, exact) = example_problem(id, 50.0, m).unwrap();
            let s = exact.state(p.grid(), 0.0, p.initial().lifted).unwrap();
            let diff = (&s.values - &p.initial().values).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff <= 1e-12, "example {id}: {diff}");
        }
    }

    #[test]
    fn example_one_starts_at_sine() {
        let (p, _) = example_problem(1, 100.0, 16).unwrap();
        for (v, pt) in p.initial().values.iter().zip(p.grid().points()) {
            assert!((v - c(pt[0].sin(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn example_three_velocity() {
        let omega = 30.0;
        let (p, _) = example_problem(3, omega, 16).unwrap();
        let u0 = p.initial().primary();
        let v0 = p.initial().values.slice(ndarray::s![16..]).to_owned();
        for ((u, v), pt) in u0.iter().zip(&v0).zip(p.grid().points()) {
            let x = pt[0];
            assert!((v - c(0.0, -x * x / omega) * u).norm() < 1e-14);
        }
    }

    #[test]
    fn example_four_modes_resum_to_potential() {
        let omega = 7.0;
        let (p, _) = example_problem(4, omega, 16).unwrap();
        let xs = p.grid().nodes_1d();
        let lap = build_fourier_diff2(16, (-8.0, 8.0)).unwrap();
        let w2 = omega * omega;
        for t in [0.0, 0.13, 0.5, 0.91] {
            let osc = p.potential().value(t, 16);
            for (i, &x) in xs.iter().enumerate() {
                let stat = p.operator().matrix()[[16 + i, i]] - lap.matrix()[[i, i]];
                let ct = (omega * t).cos();
                let st = (omega * t).sin();
                let f = 1.0 - x * x + (2.0 + x * x * w2 - 4.0 * x * x) * ct / w2 - 4.0 * x * x * ct * ct / (w2 * w2)
                    + x.powi(4) * st * st / w2;
                assert!((stat + osc[i] - c(f, 0.0)).norm() < 1e-12, "t={t} x={x}");
            }
        }
    }

    #[test]
    fn unknown_example_is_rejected() {
        assert!(example_problem(5, 10.0, 16).is_err());
        assert!(example_problem(1, 0.0, 16).is_err());
    }

    #[test]
    fn scalar_exact_at_start_is_one() {
        assert!((scalar_exact(-1.0, 0.3, 10.0, 0.4, 0.4) - c(1.0, 0.0)).norm() < 1e-15);
    }
}
