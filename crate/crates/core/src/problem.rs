//! Problem data: operator, oscillatory potential `f = Σ αₙ e^{inωt}`, initial state.

use std::fmt;
use std::sync::Arc;

use ndarray::{s, Array1};

use crate::error::{check_len, Error, Result};
use crate::grid::GridSpec;
use crate::linalg::C64;
use crate::operator::{wave_first_order, EllipticOperator, Multiplier};

/// Grid samples of a coefficient at an absolute time.
pub type Sampler = Arc<dyn Fn(f64) -> Array1<C64> + Send + Sync>;

/// One term `αₙ(x, t) e^{inωt}` of the potential.
#[derive(Clone)]
pub struct Mode {
    pub n: i32,
    alpha: Sampler,
    dalpha: Option<Sampler>,
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mode")
            .field("n", &self.n)
            .field("analytic_derivative", &self.dalpha.is_some())
            .finish()
    }
}

impl Mode {
    /// `dalpha` is `∂ₜαₙ`; pass `None` to fall back to central differences.
    pub fn new(n: i32, alpha: Sampler, dalpha: Option<Sampler>) -> Self {
        Self { n, alpha, dalpha }
    }

    /// A coefficient that does not depend on time.
    pub fn constant(n: i32, samples: Array1<C64>) -> Self {
        let len = samples.len();
        let a = Arc::new(samples);
        Self {
            n,
            alpha: Arc::new(move |_| (*a).clone()),
            dalpha: Some(Arc::new(move |_| Array1::zeros(len))),
        }
    }

    pub fn alpha(&self, t: f64) -> Array1<C64> {
        (self.alpha)(t)
    }

    pub fn dalpha(&self, t: f64) -> Array1<C64> {
        match &self.dalpha {
            Some(d) => d(t),
            None => {
                // accuracy-degrading fallback for coefficients without a closed-form derivative
                let delta = 1e-6 * t.abs().max(1.0);
                ((self.alpha)(t + delta) - (self.alpha)(t - delta)) / C64::new(2.0 * delta, 0.0)
            }
        }
    }

    fn shares_samplers(&self, other: &Mode) -> bool {
        Arc::ptr_eq(&self.alpha, &other.alpha)
            && match (&self.dalpha, &other.dalpha) {
                (Some(a), Some(b)) => Arc::ptr_eq(a, b),
                (None, None) => true,
                _ => false,
            }
    }
}

#[derive(Debug, Clone)]
pub struct OscillatoryPotential {
    omega: f64,
    modes: Vec<Mode>,
    symmetric: bool,
}

impl OscillatoryPotential {
    pub fn new(omega: f64, modes: Vec<Mode>) -> Result<Self> {
        Self::build(omega, modes, false)
    }

    /// Potential with `α₋ₙ = αₙ`: each given mode `n > 0` is paired with `−n`.
    pub fn symmetric(omega: f64, positive: Vec<Mode>) -> Result<Self> {
        if positive.iter().any(|m| m.n <= 0) {
            return Err(Error::Domain("symmetric potentials are built from positive modes".into()));
        }
        let mut modes = Vec::with_capacity(2 * positive.len());
        for m in positive {
            let neg = Mode { n: -m.n, alpha: m.alpha.clone(), dalpha: m.dalpha.clone() };
            modes.push(m);
            modes.push(neg);
        }
        Self::build(omega, modes, true)
    }

    /// No oscillatory part.
    pub fn zero(omega: f64) -> Self {
        Self { omega, modes: Vec::new(), symmetric: true }
    }

    fn build(omega: f64, modes: Vec<Mode>, symmetric: bool) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("ω must be positive, got {omega}")));
        }
        for (i, m) in modes.iter().enumerate() {
            if m.n == 0 {
                return Err(Error::Domain("mode index 0 belongs in the static operator".into()));
            }
            if modes[..i].iter().any(|o| o.n == m.n) {
                return Err(Error::Domain(format!("duplicate mode {}", m.n)));
            }
        }
        if symmetric {
            for m in &modes {
                let partner = modes.iter().find(|o| o.n == -m.n);
                match partner {
                    Some(p) if p.shares_samplers(m) => {}
                    _ => return Err(Error::Domain(format!("mode {} lacks a shared ± partner", m.n))),
                }
            }
        }
        Ok(Self { omega, modes, symmetric })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Symmetric with at least one `(n, −n)` pair present.
    pub fn has_resonant_pairs(&self) -> bool {
        self.symmetric && self.modes.iter().any(|m| m.n < 0)
    }

    /// `Σₙ αₙ(x, t) e^{inωt}` on the grid.
    pub fn value(&self, t: f64, len: usize) -> Array1<C64> {
        let mut out = Array1::<C64>::zeros(len);
        for m in &self.modes {
            let phase = C64::new(0.0, m.n as f64 * self.omega * t).exp();
            out.scaled_add(phase, &m.alpha(t));
        }
        out
    }
}

/// Grid function, stacked `(u, ∂ₜu)` when `lifted`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub values: Array1<C64>,
    pub grid: GridSpec,
    pub lifted: bool,
}

impl StateVector {
    pub fn new(values: Array1<C64>, grid: GridSpec, lifted: bool) -> Result<Self> {
        let expected = grid.state_len() * if lifted { 2 } else { 1 };
        check_len(expected, values.len())?;
        Ok(Self { values, grid, lifted })
    }

    /// The `u` component (the whole vector when not lifted).
    pub fn primary(&self) -> Array1<C64> {
        if self.lifted {
            let m = self.values.len() / 2;
            self.values.slice(s![0..m]).to_owned()
        } else {
            self.values.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `∂ₜu = L u + f u`.
    FirstOrder,
    /// `∂ₜₜu = L u + f u`, integrated as a first-order system in `(u, ∂ₜu)`.
    WaveLifted,
}

#[derive(Debug, Clone)]
pub struct Problem {
    operator: EllipticOperator,
    potential: OscillatoryPotential,
    initial: StateVector,
    horizon: f64,
    kind: ProblemKind,
}

impl Problem {
    pub fn first_order(
        operator: EllipticOperator,
        potential: OscillatoryPotential,
        u0: Array1<C64>,
        horizon: f64,
    ) -> Result<Self> {
        if operator.is_lifted() {
            return Err(Error::Unsupported("use Problem::wave for lifted operators".into()));
        }
        let initial = StateVector::new(u0, operator.grid().clone(), false)?;
        Self::finish(operator, potential, initial, horizon, ProblemKind::FirstOrder)
    }

    /// Second-order-in-time problem; `l` is the spatial operator with static terms folded in.
    pub fn wave(
        l: &EllipticOperator,
        potential: OscillatoryPotential,
        u0: Array1<C64>,
        v0: Array1<C64>,
        horizon: f64,
    ) -> Result<Self> {
        check_len(l.dim(), u0.len())?;
        check_len(l.dim(), v0.len())?;
        let operator = wave_first_order(l)?;
        let mut stacked = Array1::<C64>::zeros(2 * l.dim());
        stacked.slice_mut(s![0..l.dim()]).assign(&u0);
        stacked.slice_mut(s![l.dim()..]).assign(&v0);
        let initial = StateVector::new(stacked, l.grid().clone(), true)?;
        Self::finish(operator, potential, initial, horizon, ProblemKind::WaveLifted)
    }

    fn finish(
        operator: EllipticOperator,
        potential: OscillatoryPotential,
        initial: StateVector,
        horizon: f64,
        kind: ProblemKind,
    ) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        let len = operator.grid().state_len();
        for m in potential.modes() {
            check_len(len, m.alpha(0.0).len())?;
        }
        Ok(Self { operator, potential, initial, horizon, kind })
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn operator(&self) -> &EllipticOperator {
        &self.operator
    }

    pub fn potential(&self) -> &OscillatoryPotential {
        &self.potential
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn grid(&self) -> &GridSpec {
        self.operator.grid()
    }

    /// Unknowns per grid function (half the state length for lifted problems).
    pub fn grid_len(&self) -> usize {
        self.operator.grid().state_len()
    }

    pub fn multiplier(&self, samples: Array1<C64>) -> Multiplier {
        match self.kind {
            ProblemKind::FirstOrder => Multiplier::new(samples),
            ProblemKind::WaveLifted => Multiplier::lifted(samples),
        }
    }

    /// Full oscillatory potential at time `t` as a multiplier.
    pub fn potential_multiplier(&self, t: f64) -> Multiplier {
        self.multiplier(self.potential.value(t, self.grid_len()))
    }

    pub fn state(&self, values: Array1<C64>) -> Result<StateVector> {
        StateVector::new(values, self.grid().clone(), self.kind == ProblemKind::WaveLifted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_fourier_diff2;

    fn ones(n: usize) -> Array1<C64> {
        Array1::from_elem(n, C64::new(1.0, 0.0))
    }

    #[test]
    fn rejects_zero_and_duplicate_modes() {
        assert!(OscillatoryPotential::new(10.0, vec![Mode::constant(0, ones(4))]).is_err());
        let dup = vec![Mode::constant(1, ones(4)), Mode::constant(1, ones(4))];
        assert!(OscillatoryPotential::new(10.0, dup).is_err());
        assert!(OscillatoryPotential::new(-1.0, vec![]).is_err());
    }

    #[test]
    fn symmetric_pairs_share_samplers() {
        let p = OscillatoryPotential::symmetric(5.0, vec![Mode::constant(1, ones(3)), Mode::constant(2, ones(3))]).unwrap();
        let ns: Vec<i32> = p.modes().iter().map(|m| m.n).collect();
        assert_eq!(ns, vec![1, -1, 2, -2]);
        assert!(p.has_resonant_pairs());
        assert!(OscillatoryPotential::symmetric(5.0, vec![Mode::constant(-1, ones(3))]).is_err());
    }

    #[test]
    fn finite_difference_derivative_fallback() {
        let m = Mode::new(1, Arc::new(|t: f64| Array1::from_elem(2, C64::new(t * t, t))), None);
        let d = m.dalpha(0.5);
        assert!((d[0] - C64::new(1.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn potential_value_sums_modes() {
        let p = OscillatoryPotential::new(2.0, vec![Mode::constant(1, ones(2)), Mode::constant(-1, ones(2))]).unwrap();
        let v = p.value(0.3, 2);
        assert!((v[0] - C64::new(2.0 * (0.6f64).cos(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wave_problem_stacks_state() {
        let l = build_fourier_diff2(8, (0.0, 1.0)).unwrap();
        let u0 = ones(8);
        let v0 = Array1::from_elem(8, C64::new(2.0, 0.0));
        let p = Problem::wave(&l, OscillatoryPotential::zero(1.0), u0.clone(), v0, 1.0).unwrap();
        assert_eq!(p.initial().values.len(), 16);
        assert_eq!(p.initial().primary(), u0);
        assert!(p.operator().is_lifted());
        assert!(p.multiplier(ones(8)).is_lifted());
    }

    #[test]
    fn state_length_is_checked() {
        let l = build_fourier_diff2(8, (0.0, 1.0)).unwrap();
        assert!(Problem::first_order(l, OscillatoryPotential::zero(1.0), ones(6), 1.0).is_err());
    }
}
