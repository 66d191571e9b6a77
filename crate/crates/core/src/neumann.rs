//! Reference evaluation of the truncated Neumann series by high-order quadrature,
//! for scalar and tiny systems.
//!
//! With `v₀(s) = e^{sL}u` and `v_d(s) = ∫₀^s e^{(s−σ)L} f(t+σ) v_{d−1}(σ) dσ`, the
//! depth-`r` truncation of one step is `Σ_{d≤r} v_d(h)`. Each `v_d` is marched over
//! panels of Chebyshev points using a spectral indefinite-integration matrix.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use crate::error::{check_len, Error, Result};
use crate::linalg::C64;
use crate::operator::matrix_exp;
use crate::problem::Problem;
use crate::quadrature::GaussLegendre;

pub const MAX_STATE: usize = 4;
pub const MAX_DEPTH: usize = 4;

/// `S[j][k] = ∫_{−1}^{yⱼ} ℓₖ(y) dy` for the Chebyshev points `yⱼ = −cos(jπ/p)`.
fn integration_matrix(p: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let y: Vec<f64> = (0..=p).map(|j| -(j as f64 * PI / p as f64).cos()).collect();
    let gl = GaussLegendre::new(p / 2 + 2);
    let lagrange = |k: usize, x: f64| {
        y.iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, &ym)| (x - ym) / (y[k] - ym))
            .product::<f64>()
    };
    let s = y
        .iter()
        .map(|&yj| {
            (0..=p)
                .map(|k| gl.on_interval(-1.0, yj).map(|(x, w)| w * lagrange(k, x)).sum())
                .collect()
        })
        .collect();
    (y, s)
}

/// Terms `v_0(h), …, v_r(h)` of the Neumann series for one step from time `t`.
///
/// `points` is the number of Chebyshev intervals per panel; panels are chosen so
/// that each spans at most about two radians of the fastest oscillation.
pub fn neumann_terms(prob: &Problem, u: &Array1<C64>, t: f64, h: f64, depth: usize, points: usize) -> Result<Vec<Array1<C64>>> {
    let dim = prob.operator().dim();
    if dim > MAX_STATE {
        return Err(Error::Unsupported(format!("brute-force series is limited to {MAX_STATE} unknowns, got {dim}")));
    }
    if depth > MAX_DEPTH {
        return Err(Error::Unsupported(format!("brute-force series is limited to depth {MAX_DEPTH}, got {depth}")));
    }
    if !(h > 0.0) || points < 4 {
        return Err(Error::Domain("need h > 0 and at least 4 points per panel".into()));
    }
    check_len(dim, u.len())?;
    let nmax = prob.potential().modes().iter().map(|m| m.n.unsigned_abs()).max().unwrap_or(1).max(1) as f64;
    let panels = ((prob.potential().omega() * nmax * h / 2.0).ceil() as usize).max(2);
    let width = h / panels as f64;
    let (y, s) = integration_matrix(points);
    let offsets: Vec<f64> = y.iter().map(|&yj| 0.5 * (yj + 1.0) * width).collect();
    let fwd: Vec<Array2<C64>> = offsets.iter().map(|&d| matrix_exp(prob.operator(), d).map(|p| p.matrix().clone())).collect::<Result<_>>()?;
    let bwd: Vec<Array2<C64>> = offsets
        .iter()
        .map(|&d| matrix_exp(&prob.operator().scaled(-1.0), d).map(|p| p.matrix().clone()))
        .collect::<Result<_>>()?;
    let np = points + 1;
    let f: Vec<Vec<Array1<C64>>> = (0..panels)
        .map(|k| offsets.iter().map(|&d| prob.potential_multiplier(t + k as f64 * width + d).samples().clone()).collect())
        .collect();
    let mult: Vec<Vec<crate::operator::Multiplier>> =
        f.into_iter().map(|row| row.into_iter().map(|a| prob.multiplier(a)).collect()).collect();

    // v_0 on every node
    let mut prev: Vec<Vec<Array1<C64>>> = Vec::with_capacity(panels);
    let mut start = u.clone();
    for _ in 0..panels {
        let row: Vec<Array1<C64>> = fwd.iter().map(|e| e.dot(&start)).collect();
        start = row[np - 1].clone();
        prev.push(row);
    }
    let mut terms = vec![start];
    for _ in 1..=depth {
        let mut next = Vec::with_capacity(panels);
        let mut start = Array1::<C64>::zeros(dim);
        for k in 0..panels {
            let g: Vec<Array1<C64>> = (0..np).map(|j| bwd[j].dot(&mult[k][j].apply(&prev[k][j]))).collect();
            let row: Vec<Array1<C64>> = (0..np)
                .map(|j| {
                    let mut w = start.clone();
                    for (l, gl) in g.iter().enumerate() {
                        w.scaled_add(C64::new(0.5 * width * s[j][l], 0.0), gl);
                    }
                    fwd[j].dot(&w)
                })
                .collect();
            start = row[np - 1].clone();
            next.push(row);
        }
        terms.push(start);
        prev = next;
    }
    Ok(terms)
}

/// `Σ_{d≤depth}` of the Neumann terms for one step.
pub fn neumann_bruteforce(prob: &Problem, u: &Array1<C64>, t: f64, h: f64, depth: usize) -> Result<Array1<C64>> {
    let terms = neumann_terms(prob, u, t, h, depth, 24)?;
    Ok(terms.iter().fold(Array1::zeros(u.len()), |acc, v| acc + v))
}
