//! Oscillatory moments over `[0, h]` and the ordered simplices
//! `σ_d(h) = {0 ≤ τ₁ ≤ … ≤ τ_d ≤ h}`:
//!
//! ```text
//! μ(m, n, ω, h) = ∫_{σ_d(h)} τ^m e^{i ω (n₁τ₁ + … + n_dτ_d)} dτ
//! ```
//!
//! In the gap coordinates `s₀ = τ₁, s_l = τ_{l+1} − τ_l, s_d = h − τ_d` the phase is
//! `Σ_l s_l Λ_l` with tail sums `Λ_l = n_{l+1} + … + n_d` and `Λ_d = 0`, so by the
//! Hermite–Genocchi formula each moment is a finite combination of divided
//! differences of `exp` at the purely imaginary nodes `i ω h Λ_l`, with repeated
//! nodes for monomial weights. Coincident nodes (resonances) are detected on the
//! integer tail sums, never on floating-point phases.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::GaussLegendre;

/// Node spread (in radians) up to which divided differences are summed as a
/// Taylor series about the centre of the node set; beyond it the residue form is used.
pub const SERIES_SPREAD: f64 = 8.0;

/// Nonzero integer frequencies `(n₁[, n₂[, n₃]])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyVector(Vec<i32>);

impl FrequencyVector {
    pub fn new(entries: &[i32]) -> Result<Self> {
        if entries.is_empty() || entries.len() > 3 {
            return Err(Error::Domain(format!("frequency vectors have 1 to 3 entries, got {}", entries.len())));
        }
        if entries.contains(&0) {
            return Err(Error::Domain("frequency entries must be nonzero".into()));
        }
        Ok(Self(entries.to_vec()))
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|&n| n as i64).sum()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|n| -n).collect())
    }
}

/// Monomial weight `τ₁^{e₁} τ₂^{e₂} τ₃^{e₃}` on a `dim`-dimensional simplex.
///
/// Representable: `1, τ, τ², τ³` for `dim = 1`; `1, τ₁, τ₂, τ₁τ₂` for `dim = 2`;
/// `1, τ₁, τ₂, τ₃` for `dim = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    dim: u8,
    exps: [u8; 3],
}

impl Monomial {
    pub const ONE_2: Monomial = Monomial { dim: 2, exps: [0, 0, 0] };
    pub const TAU1_2: Monomial = Monomial { dim: 2, exps: [1, 0, 0] };
    pub const TAU2_2: Monomial = Monomial { dim: 2, exps: [0, 1, 0] };
    pub const TAU12_2: Monomial = Monomial { dim: 2, exps: [1, 1, 0] };
    pub const ONE_3: Monomial = Monomial { dim: 3, exps: [0, 0, 0] };
    pub const TAU1_3: Monomial = Monomial { dim: 3, exps: [1, 0, 0] };
    pub const TAU2_3: Monomial = Monomial { dim: 3, exps: [0, 1, 0] };
    pub const TAU3_3: Monomial = Monomial { dim: 3, exps: [0, 0, 1] };

    pub fn new(dim: usize, exps: &[u8]) -> Result<Self> {
        if exps.len() != dim {
            return Err(Error::Domain(format!("monomial needs {dim} exponents, got {}", exps.len())));
        }
        let ok = match dim {
            1 => exps[0] <= 3,
            2 => exps.iter().all(|&e| e <= 1),
            3 => exps.iter().map(|&e| e as u32).sum::<u32>() <= 1,
            _ => false,
        };
        if !ok {
            return Err(Error::Domain(format!("monomial {exps:?} not representable in dimension {dim}")));
        }
        let mut e = [0u8; 3];
        e[..dim].copy_from_slice(exps);
        Ok(Self { dim: dim as u8, exps: e })
    }

    /// `τ^k` on `[0, h]`, `k ≤ 3`.
    pub fn univariate(k: u8) -> Result<Self> {
        Self::new(1, &[k])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.dim as usize]
    }

    pub fn degree(&self) -> u32 {
        self.exponents().iter().map(|&e| e as u32).sum()
    }

    pub fn eval(&self, tau: &[f64]) -> f64 {
        self.exponents()
            .iter()
            .zip(tau)
            .map(|(&e, &t)| t.powi(e as i32))
            .product()
    }
}

// ---------------------------------------------------------------------------
// divided differences of exp on the imaginary axis

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Confluent divided difference `exp[i y₀ (×m₀), i y₁ (×m₁), …]` by Taylor series about
/// the midpoint of the nodes. Accurate for any node set whose spread is moderate.
pub fn exp_divided_difference_series(nodes: &[(f64, usize)]) -> C64 {
    let total: usize = nodes.iter().map(|&(_, m)| m).sum();
    assert!(total >= 1);
    let lo = nodes.iter().map(|n| n.0).fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
    let centre = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);
    let k = total - 1;

    // h_m(w) via the generating function Π (1 − w x)^{−1}, one factor per node copy.
    let max_terms = 40 + (4.0 * radius).ceil() as usize;
    let mut h = vec![C64::new(0.0, 0.0); max_terms + 1];
    h[0] = C64::new(1.0, 0.0);
    for &(y, m) in nodes {
        let w = C64::new(0.0, y - centre);
        for _ in 0..m {
            for j in 1..=max_terms {
                let prev = h[j - 1];
                h[j] += w * prev;
            }
        }
    }
    // |h_m| / (m + k)! ≤ radius^m / (m! k!), so stop once that bound is negligible
    let mut sum = C64::new(0.0, 0.0);
    let mut inv_fact = 1.0 / factorial(k);
    let mut bound = 1.0;
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            inv_fact /= (m + k) as f64;
            bound *= radius / m as f64;
        }
        sum += hm * inv_fact;
        if m as f64 > radius && bound < 1e-20 {
            break;
        }
    }
    C64::new(0.0, centre).exp() * sum
}

/// Same divided difference by partial fractions (sum of residues of
/// `e^z / Π (z − z_j)^{m_j}`). Requires distinct node values.
pub fn exp_divided_difference_residues(nodes: &[(f64, usize)]) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for (j, &(yj, mj)) in nodes.iter().enumerate() {
        // Taylor coefficients in w of e^{w} Π_{i≠j} (δ_i + w)^{−m_i}, up to w^{mj−1}
        let mut series: Vec<C64> = (0..mj).map(|r| C64::new(1.0 / factorial(r), 0.0)).collect();
        for (i, &(yi, mi)) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let delta = C64::new(0.0, yj - yi);
            let inv = 1.0 / delta;
            let mut factor = Vec::with_capacity(mj);
            let lead = inv.powi(mi as i32);
            let mut pw = C64::new(1.0, 0.0);
            for r in 0..mj {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                factor.push(lead * pw * (sign * binomial(mi + r - 1, r)));
                pw *= inv;
            }
            let mut prod = vec![C64::new(0.0, 0.0); mj];
            for (a, sa) in series.iter().enumerate() {
                for (b, fb) in factor.iter().enumerate().take(mj - a) {
                    prod[a + b] += sa * fb;
                }
            }
            series = prod;
        }
        total += C64::new(0.0, yj).exp() * series[mj - 1];
    }
    total
}

/// Divided difference of `exp` at `i·y` nodes with multiplicities. Node values must be
/// pairwise distinct; callers merge coincident nodes exactly beforehand.
pub fn exp_divided_difference(nodes: &[(f64, usize)]) -> C64 {
    let lo = nodes.iter().map(|n| n.0).fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
    if nodes.len() == 1 || hi - lo <= SERIES_SPREAD {
        exp_divided_difference_series(nodes)
    } else {
        exp_divided_difference_residues(nodes)
    }
}

// ---------------------------------------------------------------------------
// simplex moments

/// Expands `Π τ_j^{e_j}` with `τ_j = s₀ + … + s_{j−1}` into `(coefficient, s-exponents)`.
fn expand_in_gaps(exps: &[u8]) -> Vec<(f64, Vec<usize>)> {
    let d = exps.len();
    let mut terms: Vec<(f64, Vec<usize>)> = vec![(1.0, vec![0; d])];
    for (j, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            let mut next: Vec<(f64, Vec<usize>)> = Vec::new();
            for (c, k) in &terms {
                for l in 0..=j {
                    let mut k2 = k.clone();
                    k2[l] += 1;
                    match next.iter_mut().find(|(_, kk)| *kk == k2) {
                        Some(t) => t.0 += c,
                        None => next.push((*c, k2)),
                    }
                }
            }
            terms = next;
        }
    }
    terms
}

/// Moment over the unit simplex with integer tail sums `lambda` (length `d + 1`, last = 0)
/// scaled by `phase_unit = ω h`.
fn unit_simplex_moment(exps: &[u8], lambda: &[i64], phase_unit: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (coef, k) in expand_in_gaps(exps) {
        // node l carries multiplicity k_l + 1; the final node (Λ_d = 0) multiplicity 1
        let mut groups: Vec<(i64, usize)> = Vec::new();
        for (l, &lam) in lambda.iter().enumerate() {
            let mult = if l < k.len() { k[l] + 1 } else { 1 };
            match groups.iter_mut().find(|g| g.0 == lam) {
                Some(g) => g.1 += mult,
                None => groups.push((lam, mult)),
            }
        }
        let nodes: Vec<(f64, usize)> = groups
            .iter()
            .map(|&(lam, m)| (lam as f64 * phase_unit, m))
            .collect();
        let weight: f64 = k.iter().map(|&kl| factorial(kl)).product();
        acc += exp_divided_difference(&nodes) * (coef * weight);
    }
    acc
}

fn tail_sums(n: &[i32]) -> Vec<i64> {
    let d = n.len();
    let mut lambda = vec![0i64; d + 1];
    for l in (0..d).rev() {
        lambda[l] = lambda[l + 1] + n[l] as i64;
    }
    lambda
}

/// `∫_{σ_d(h)} mono(τ) e^{i ω nᵀτ} dτ` for `d = mono.dim() = n.dim()`.
pub fn simplex_moment(mono: Monomial, n: &FrequencyVector, omega: f64, h: f64) -> Result<C64> {
    if mono.dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: mono.dim(), got: n.dim() });
    }
    if !(h > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("moment needs h > 0 and finite ω, got h = {h}, ω = {omega}")));
    }
    let lambda = tail_sums(n.entries());
    let scale = h.powi((mono.dim() as u32 + mono.degree()) as i32);
    Ok(unit_simplex_moment(mono.exponents(), &lambda, omega * h) * scale)
}

/// `∫₀^h τ^k e^{i a τ} dτ`.
pub fn mu1(k: u8, a: f64, h: f64) -> C64 {
    assert!(k <= 3, "univariate moments are defined for k ≤ 3");
    assert!(h > 0.0, "step must be positive");
    let k = k as usize;
    let y = a * h;
    let nodes: Vec<(f64, usize)> = if y == 0.0 { vec![(0.0, k + 2)] } else { vec![(y, k + 1), (0.0, 1)] };
    exp_divided_difference(&nodes) * (factorial(k) * h.powi(k as i32 + 1))
}

/// Bivariate moment over `σ₂(h)`.
pub fn mu2(mono: Monomial, n: &FrequencyVector, omega: f64, h: f64) -> C64 {
    assert_eq!(n.dim(), 2, "mu2 needs a frequency pair");
    simplex_moment(mono, n, omega, h).expect("mu2 preconditions")
}

/// Trivariate moment over `σ₃(h)`.
pub fn mu3(mono: Monomial, n: &FrequencyVector, omega: f64, h: f64) -> C64 {
    assert_eq!(n.dim(), 3, "mu3 needs a frequency triple");
    simplex_moment(mono, n, omega, h).expect("mu3 preconditions")
}

/// `∫_{σ₂(h)} mono (e^{iωn(τ₁−τ₂)} + e^{iωn(τ₂−τ₁)}) dτ`, the pair consumed by the
/// resonance-corrected bivariate term.
pub fn mu2_resonant_pair(mono: Monomial, n: i32, omega: f64, h: f64) -> C64 {
    assert!(n >= 1, "resonant pair index must be positive");
    let plus = FrequencyVector(vec![n, -n]);
    let minus = FrequencyVector(vec![-n, n]);
    mu2(mono, &plus, omega, h) + mu2(mono, &minus, omega, h)
}

// ---------------------------------------------------------------------------
// memo table

/// Moments for one `(ω, h)` pair, filled eagerly for every tuple a step needs.
#[derive(Debug, Clone)]
pub struct MomentTable {
    omega: f64,
    h: f64,
    values: HashMap<(Monomial, Vec<i32>), C64>,
    pairs: HashMap<(Monomial, i32), C64>,
}

impl MomentTable {
    pub fn new(omega: f64, h: f64) -> Self {
        Self { omega, h, values: HashMap::new(), pairs: HashMap::new() }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn insert(&mut self, mono: Monomial, n: &FrequencyVector) -> Result<C64> {
        let key = (mono, n.entries().to_vec());
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let v = simplex_moment(mono, n, self.omega, self.h)?;
        self.values.insert(key, v);
        Ok(v)
    }

    pub fn insert_pair(&mut self, mono: Monomial, n: i32) -> C64 {
        let (omega, h) = (self.omega, self.h);
        *self
            .pairs
            .entry((mono, n))
            .or_insert_with(|| mu2_resonant_pair(mono, n, omega, h))
    }

    /// Previously inserted moment; panics if missing.
    pub fn get(&self, mono: Monomial, n: &[i32]) -> C64 {
        *self
            .values
            .get(&(mono, n.to_vec()))
            .unwrap_or_else(|| panic!("moment {mono:?} {n:?} was not tabulated"))
    }

    pub fn get_pair(&self, mono: Monomial, n: i32) -> C64 {
        *self
            .pairs
            .get(&(mono, n))
            .unwrap_or_else(|| panic!("resonant pair moment {mono:?} {n} was not tabulated"))
    }

    pub fn len(&self) -> usize {
        self.values.len() + self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// ---------------------------------------------------------------------------
// quadrature oracle

/// Neumaier-compensated complex sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    fn add_part(acc: &mut (f64, f64), x: f64) {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    }

    fn add(&mut self, z: C64) {
        Self::add_part(&mut self.re, z.re);
        Self::add_part(&mut self.im, z.im);
    }

    fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

struct NestedOracle<'a> {
    gl: GaussLegendre,
    exps: &'a [u8],
    n: &'a [i32],
    omega: f64,
    panel: f64,
    /// `prefix[j][k]` = G_j at the start of panel k.
    prefix: Vec<Vec<C64>>,
}

impl NestedOracle<'_> {
    fn integrand(&self, level: usize, tau: f64) -> C64 {
        C64::new(0.0, self.omega * self.n[level] as f64 * tau).exp() * tau.powi(self.exps[level] as i32)
    }

    /// `G_level(x) = ∫₀^x g_level(τ) G_{level−1}(τ) dτ`, with `G_{−1} ≡ 1`.
    fn eval(&self, level: usize, x: f64) -> C64 {
        let k = ((x / self.panel).floor() as usize).min(self.prefix[level].len() - 1);
        let start = k as f64 * self.panel;
        let mut acc = CompensatedSum::default();
        acc.add(self.prefix[level][k]);
        if x > start {
            for (t, w) in self.gl.on_interval(start, x) {
                acc.add(self.integrand(level, t) * self.lower(level, t) * w);
            }
        }
        acc.value()
    }

    fn lower(&self, level: usize, t: f64) -> C64 {
        if level == 0 { C64::new(1.0, 0.0) } else { self.eval(level - 1, t) }
    }
}

/// Nested composite Gauss–Legendre evaluation of [`simplex_moment`], `nodes` points per
/// panel, panels sized so each spans a bounded phase. Test oracle only.
pub fn oracle_moment(mono: Monomial, n: &FrequencyVector, omega: f64, h: f64, nodes: usize) -> C64 {
    assert!(nodes >= 2);
    assert_eq!(mono.dim(), n.dim());
    let d = n.dim();
    let total_rate: f64 = n.entries().iter().map(|&k| (k as f64 * omega).abs()).sum();
    let panels = ((total_rate * h / 6.0).ceil() as usize).max(1);
    let panel = h / panels as f64;
    let mut oracle = NestedOracle {
        gl: GaussLegendre::new(nodes),
        exps: mono.exponents(),
        n: n.entries(),
        omega,
        panel,
        prefix: Vec::with_capacity(d),
    };
    for level in 0..d {
        let mut pre = Vec::with_capacity(panels + 1);
        let mut acc = CompensatedSum::default();
        pre.push(C64::new(0.0, 0.0));
        for k in 0..panels {
            let (a, b) = (k as f64 * panel, (k + 1) as f64 * panel);
            for (t, w) in oracle.gl.on_interval(a, b) {
                acc.add(oracle.integrand(level, t) * oracle.lower(level, t) * w);
            }
            pre.push(acc.value());
        }
        oracle.prefix.push(pre);
    }
    oracle.prefix[d - 1][panels]
}
