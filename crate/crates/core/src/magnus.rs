//! Exponential midpoint (order 2) and two-node Gauss Magnus (order 4) steps.

use ndarray::{Array1, Array2};

use crate::error::{check_len, Result};
use crate::linalg::{expm, C64};
use crate::problem::Problem;

fn generator(prob: &Problem, t: f64) -> Array2<C64> {
    prob.operator().matrix() + &prob.potential_multiplier(t).to_dense()
}

/// `u ↦ exp(h (L + f(t + h/2))) u`.
pub fn m2_step(u: &Array1<C64>, t: f64, h: f64, prob: &Problem) -> Result<Array1<C64>> {
    check_len(prob.operator().dim(), u.len())?;
    let a = generator(prob, t + 0.5 * h) * C64::new(h, 0.0);
    Ok(expm(&a)?.dot(u))
}

/// `u ↦ exp(h (A₁ + A₂)/2 + h²√3/12 [A₂, A₁]) u` with `Aⱼ` at the Gauss nodes
/// `t + (1/2 ∓ √3/6) h`.
pub fn m4_step(u: &Array1<C64>, t: f64, h: f64, prob: &Problem) -> Result<Array1<C64>> {
    check_len(prob.operator().dim(), u.len())?;
    let r3 = 3f64.sqrt();
    let a1 = generator(prob, t + (0.5 - r3 / 6.0) * h);
    let a2 = generator(prob, t + (0.5 + r3 / 6.0) * h);
    let comm = a2.dot(&a1) - a1.dot(&a2);
    let omega = (&a1 + &a2) * C64::new(0.5 * h, 0.0) + comm * C64::new(h * h * r3 / 12.0, 0.0);
    Ok(expm(&omega)?.dot(u))
}
