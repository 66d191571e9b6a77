//! Neumann–Filon time stepping and trajectory integration.

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

use crate::error::{check_len, Error, Result};
use crate::filon::{
    compute_x, hermite_univariate, linear_bivariate, linear_trivariate, resonance_bivariate, sample_f_univariate,
    GaussPropagators,
};
use crate::linalg::C64;
use crate::magnus::{m2_step, m4_step};
use crate::moments::{FrequencyVector, Monomial, MomentTable};
use crate::operator::{matrix_exp, Multiplier, Propagator};
use crate::problem::{Problem, StateVector};

/// Gauss–Legendre nodes used for the resonance integral `X`.
pub const X_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nf3,
    Nf3Resonance,
    M2,
    M4,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Nf3, Method::Nf3Resonance, Method::M2, Method::M4];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Nf3 => "nf3",
            Method::Nf3Resonance => "nf3-resonance",
            Method::M2 => "m2",
            Method::M4 => "m4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}' (expected nf3, nf3-resonance, m2 or m4)")))
    }
}

/// Step-size dependent data shared by every step of one run.
#[derive(Debug, Clone)]
pub struct StepPlan {
    h: f64,
    method: Method,
    propagator: Propagator,
    gauss: Option<GaussPropagators>,
    moments: MomentTable,
    resonance: bool,
}

impl StepPlan {
    pub fn new(prob: &Problem, h: f64, method: Method) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        let pot = prob.potential();
        let resonance = pot.has_resonant_pairs();
        if method == Method::Nf3Resonance {
            check_resonance_support(prob)?;
        }
        let propagator = matrix_exp(prob.operator(), h)?;
        let mut moments = MomentTable::new(pot.omega(), h);
        let mut gauss = None;
        if matches!(method, Method::Nf3 | Method::Nf3Resonance) {
            let ns: Vec<i32> = pot.modes().iter().map(|m| m.n).collect();
            let split = method == Method::Nf3Resonance;
            for &n1 in &ns {
                for k in 0..=3 {
                    moments.insert(Monomial::univariate(k)?, &FrequencyVector::new(&[n1])?)?;
                }
                for &n2 in &ns {
                    if !(split && n1 + n2 == 0) {
                        let v = FrequencyVector::new(&[n1, n2])?;
                        for m in [Monomial::ONE_2, Monomial::TAU1_2, Monomial::TAU2_2] {
                            moments.insert(m, &v)?;
                        }
                    }
                    for &n3 in &ns {
                        let v = FrequencyVector::new(&[n1, n2, n3])?;
                        for m in [Monomial::ONE_3, Monomial::TAU1_3, Monomial::TAU2_3, Monomial::TAU3_3] {
                            moments.insert(m, &v)?;
                        }
                    }
                }
            }
            if split {
                for n in ns.iter().copied().filter(|&n| n > 0 && ns.contains(&-n)) {
                    for m in [Monomial::ONE_2, Monomial::TAU1_2, Monomial::TAU2_2, Monomial::TAU12_2] {
                        moments.insert_pair(m, n);
                    }
                }
                if resonance {
                    gauss = Some(GaussPropagators::new(prob.operator(), h, X_NODES)?);
                }
            }
        }
        Ok(Self { h, method, propagator, gauss, moments, resonance })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    /// True when the potential is symmetric and has `(n, −n)` pairs.
    pub fn is_resonant(&self) -> bool {
        self.resonance
    }

    /// One step of the plan's method from time `t`.
    pub fn step(&self, prob: &Problem, u: &Array1<C64>, t: f64) -> Result<Array1<C64>> {
        match self.method {
            Method::Nf3 => nf3_step(u, t, self, prob),
            Method::Nf3Resonance => nf3_resonance_step(u, t, self, prob),
            Method::M2 => m2_step(u, t, self.h, prob),
            Method::M4 => m4_step(u, t, self.h, prob),
        }
    }
}

struct ModeData {
    n: i32,
    a0: Multiplier,
    da0: Multiplier,
    ah: Multiplier,
    dah: Multiplier,
}

fn mode_data(prob: &Problem, t: f64, h: f64) -> Vec<ModeData> {
    prob.potential()
        .modes()
        .iter()
        .map(|m| ModeData {
            n: m.n,
            a0: prob.multiplier(m.alpha(t)),
            da0: prob.multiplier(m.dalpha(t)),
            ah: prob.multiplier(m.alpha(t + h)),
            dah: prob.multiplier(m.dalpha(t + h)),
        })
        .collect()
}

fn phase(omega: f64, t: f64, total: i32) -> C64 {
    C64::new(0.0, omega * t * total as f64).exp()
}

/// One step of the third-order Neumann–Filon scheme.
pub fn nf3_step(u: &Array1<C64>, t: f64, plan: &StepPlan, prob: &Problem) -> Result<Array1<C64>> {
    step_impl(u, t, plan, prob, false)
}

/// One step of the scheme with the `(n, −n)` bivariate terms handled by the
/// resonance-corrected interpolant.
pub fn nf3_resonance_step(u: &Array1<C64>, t: f64, plan: &StepPlan, prob: &Problem) -> Result<Array1<C64>> {
    check_resonance_support(prob)?;
    step_impl(u, t, plan, prob, true)
}

/// Resonant `(n, −n)` pairs are only handled when `α₋ₙ = αₙ`.
fn check_resonance_support(prob: &Problem) -> Result<()> {
    let pot = prob.potential();
    let has_pair = pot.modes().iter().any(|m| pot.modes().iter().any(|o| o.n == -m.n));
    if has_pair && !pot.is_symmetric() {
        return Err(Error::Unsupported("the resonance scheme needs α₋ₙ = αₙ for every (n, −n) pair".into()));
    }
    Ok(())
}

fn step_impl(u: &Array1<C64>, t: f64, plan: &StepPlan, prob: &Problem, split: bool) -> Result<Array1<C64>> {
    check_len(prob.operator().dim(), u.len())?;
    if plan.method != if split { Method::Nf3Resonance } else { Method::Nf3 } {
        return Err(Error::Unsupported(format!("plan built for {} cannot drive this step", plan.method)));
    }
    let l = prob.operator();
    let p = &plan.propagator;
    let h = plan.h;
    let omega = prob.potential().omega();
    let tab = &plan.moments;
    let modes = mode_data(prob, t, h);
    let w = p.apply(u);
    let mut out = w.clone();
    if modes.is_empty() {
        return Ok(out);
    }

    for m in &modes {
        let s = sample_f_univariate(l, p, &m.a0, &m.da0, &m.ah, &m.dah, u)?;
        let c = hermite_univariate(&s, h)?;
        let val = c.integrate(|mono| tab.get(mono, &[m.n]));
        out.scaled_add(phase(omega, t, m.n), &val);
    }

    // α_{n₁}(t) u, e^{hL} α_{n₁}(t) u, α_{n₁}(t + h) e^{hL} u
    let v1: Vec<Array1<C64>> = modes.iter().map(|m| m.a0.apply(u)).collect();
    let pv1: Vec<Array1<C64>> = v1.iter().map(|v| p.apply(v)).collect();
    let hw1: Vec<Array1<C64>> = modes.iter().map(|m| m.ah.apply(&w)).collect();

    for (i, m1) in modes.iter().enumerate() {
        for m2 in &modes {
            if split && m1.n + m2.n == 0 {
                continue;
            }
            let f00 = p.apply(&m2.a0.apply(&v1[i]));
            let f0h = m2.ah.apply(&pv1[i]);
            let fhh = m2.ah.apply(&hw1[i]);
            let c = linear_bivariate(&f00, &f0h, &fhh, h)?;
            let val = c.integrate(|mono| tab.get(mono, &[m1.n, m2.n]));
            out.scaled_add(phase(omega, t, m1.n + m2.n), &val);
        }
    }

    if split {
        for (i, m) in modes.iter().enumerate() {
            if m.n <= 0 || !modes.iter().any(|o| o.n == -m.n) {
                continue;
            }
            let gauss = plan.gauss.as_ref().ok_or_else(|| Error::Unsupported("plan lacks resonance data".into()))?;
            let f00 = p.apply(&m.a0.apply(&v1[i]));
            let f0h = m.ah.apply(&pv1[i]);
            let fhh = m.ah.apply(&hw1[i]);
            let mode = &prob.potential().modes()[i];
            let x = compute_x(
                l,
                gauss,
                |s| (prob.multiplier(mode.alpha(t + s)), prob.multiplier(mode.dalpha(t + s))),
                u,
            )?;
            let c = resonance_bivariate(&f00, &f0h, &fhh, &x, h)?;
            let val = c.integrate(|mono| tab.get_pair(mono, m.n));
            out += &val;
        }
    }

    for (i, m1) in modes.iter().enumerate() {
        for m2 in &modes {
            let v2 = m2.a0.apply(&v1[i]);
            let pv2 = p.apply(&v2);
            let hv2 = m2.ah.apply(&pv1[i]);
            let hhv2 = m2.ah.apply(&hw1[i]);
            for m3 in &modes {
                let f000 = p.apply(&m3.a0.apply(&v2));
                let f00h = m3.ah.apply(&pv2);
                let f0hh = m3.ah.apply(&hv2);
                let fhhh = m3.ah.apply(&hhv2);
                let c = linear_trivariate(&f000, &f00h, &f0hh, &fhhh, h)?;
                let val = c.integrate(|mono| tab.get(mono, &[m1.n, m2.n, m3.n]));
                out.scaled_add(phase(omega, t, m1.n + m2.n + m3.n), &val);
            }
        }
    }
    Ok(out)
}

/// States at the step boundaries `0 = t₀ < t₁ < … = t*`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// True when the last step is shorter than `h`.
    pub partial_final_step: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }
}

/// Full steps of size `h` covering `[0, t*]` and the length of a trailing partial step.
pub fn step_schedule(horizon: f64, h: f64) -> Result<(usize, Option<f64>)> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let ratio = horizon / h;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) && nearest >= 1.0 {
        return Ok((nearest as usize, None));
    }
    let full = ratio.floor() as usize;
    let rest = horizon - full as f64 * h;
    Ok((full, Some(rest)))
}

/// Integrates `prob` from `0` to its horizon with step `h`.
pub fn integrate(prob: &Problem, h: f64, method: Method) -> Result<Trajectory> {
    let (full, rest) = step_schedule(prob.horizon(), h)?;
    let mut times = vec![0.0];
    let mut states = vec![prob.initial().clone()];
    let mut u = prob.initial().values.clone();
    let mut t = 0.0;
    if full > 0 {
        let plan = StepPlan::new(prob, h, method)?;
        for k in 0..full {
            u = plan.step(prob, &u, t)?;
            t = (k + 1) as f64 * h;
            push(prob, &mut times, &mut states, t, &u)?;
        }
    }
    if let Some(r) = rest {
        let plan = StepPlan::new(prob, r, method)?;
        u = plan.step(prob, &u, t)?;
        push(prob, &mut times, &mut states, prob.horizon(), &u)?;
    }
    Ok(Trajectory { times, states, partial_final_step: rest.is_some() })
}

fn push(prob: &Problem, times: &mut Vec<f64>, states: &mut Vec<StateVector>, t: f64, u: &Array1<C64>) -> Result<()> {
    let s = prob.state(u.clone())?;
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("state at t = {t}")));
    }
    times.push(t);
    states.push(s);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::scalar_problem;
    use crate::problem::{Mode, OscillatoryPotential};
    use crate::EllipticOperator;
    use ndarray::array;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("m6".parse::<Method>().is_err());
    }

    #[test]
    fn schedule_handles_partial_steps() {
        assert_eq!(step_schedule(1.0, 0.25).unwrap(), (4, None));
        assert_eq!(step_schedule(1.0, 0.1).unwrap(), (10, None));
        let (k, r) = step_schedule(1.0, 0.3).unwrap();
        assert_eq!(k, 3);
        assert!((r.unwrap() - 0.1).abs() < 1e-12);
        let (k, r) = step_schedule(1.0, 2.0).unwrap();
        assert_eq!(k, 0);
        assert!((r.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_potential_reduces_to_propagator() {
        let l = EllipticOperator::dense(array![[C64::new(-1.0, 0.0), C64::new(0.5, 0.0)], [C64::new(0.0, 0.0), C64::new(-2.0, 0.0)]]).unwrap();
        let prob = Problem::first_order(l.clone(), OscillatoryPotential::zero(3.0), array![C64::new(1.0, 0.0), C64::new(0.0, 1.0)], 1.0).unwrap();
        let exact = matrix_exp(&l, 1.0).unwrap().apply(&prob.initial().values);
        for m in Method::ALL {
            let tr = integrate(&prob, 1.0, m).unwrap();
            let got = &tr.final_state().values;
            assert!((got - &exact).iter().all(|z| z.norm() < 1e-13), "{m}");
        }
    }

    #[test]
    fn resonance_step_matches_plain_without_pairs() {
        let base = scalar_problem(-1.0, 0.3, 40.0, 1.0).unwrap();
        let one = |n, re, im| Mode::constant(n, array![C64::new(re, im)]);
        let pot = OscillatoryPotential::new(40.0, vec![one(1, 0.3, 0.0), one(2, 0.1, 0.2)]).unwrap();
        let prob = Problem::first_order(base.operator().clone(), pot, base.initial().values.clone(), 1.0).unwrap();
        let u = prob.initial().values.clone();
        let a = StepPlan::new(&prob, 0.2, Method::Nf3).unwrap().step(&prob, &u, 0.3).unwrap();
        let b = StepPlan::new(&prob, 0.2, Method::Nf3Resonance).unwrap().step(&prob, &u, 0.3).unwrap();
        assert!((a - b).iter().all(|z| z.norm() < 1e-13));

        let pot = OscillatoryPotential::new(40.0, vec![one(1, 0.3, 0.0), one(-1, 0.1, 0.0)]).unwrap();
        let prob = Problem::first_order(base.operator().clone(), pot, u, 1.0).unwrap();
        assert!(StepPlan::new(&prob, 0.2, Method::Nf3Resonance).is_err());
    }

    #[test]
    fn scalar_one_step_accuracy() {
        let (a, eps, omega, h) = (-1.0, 0.3, 200.0, 0.1);
        let prob = scalar_problem(a, eps, omega, h).unwrap();
        let tr = integrate(&prob, h, Method::Nf3).unwrap();
        let got = tr.final_state().values[0];
        let exact = crate::examples::scalar_exact(a, eps, omega, 0.0, h);
        assert!((got - exact).norm() < 1e-6, "{}", (got - exact).norm());
    }
}
