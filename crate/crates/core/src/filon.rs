//! Filon interpolation coefficients for the Neumann integrands.
//!
//! Each integrand `F(τ)` is replaced by a polynomial in `τ` whose coefficients are
//! vectors; the oscillatory integral then reduces to a weighted sum of moments.

use ndarray::Array1;

use crate::error::{check_len, Error, Result};
use crate::linalg::C64;
use crate::moments::Monomial;
use crate::operator::{commutator_apply, matrix_exp, EllipticOperator, Multiplier, Propagator};
use crate::quadrature::GaussLegendre;

/// Integrand values at the vertices of `[0, h]`, `σ₂(h)` or `σ₃(h)`.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexSamples {
    Univariate { f0: Array1<C64>, fh: Array1<C64>, df0: Array1<C64>, dfh: Array1<C64> },
    Bivariate { f00: Array1<C64>, f0h: Array1<C64>, fhh: Array1<C64> },
    Trivariate { f000: Array1<C64>, f00h: Array1<C64>, f0hh: Array1<C64>, fhhh: Array1<C64> },
}

impl VertexSamples {
    pub fn dim(&self) -> usize {
        match self {
            VertexSamples::Univariate { .. } => 1,
            VertexSamples::Bivariate { .. } => 2,
            VertexSamples::Trivariate { .. } => 3,
        }
    }

    fn vectors(&self) -> Vec<&Array1<C64>> {
        match self {
            VertexSamples::Univariate { f0, fh, df0, dfh } => vec![f0, fh, df0, dfh],
            VertexSamples::Bivariate { f00, f0h, fhh } => vec![f00, f0h, fhh],
            VertexSamples::Trivariate { f000, f00h, f0hh, fhhh } => vec![f000, f00h, f0hh, fhhh],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.vectors();
        let n = v[0].len();
        for x in &v {
            check_len(n, x.len())?;
            if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("vertex sample".into()));
            }
        }
        Ok(())
    }
}

/// Vector coefficients of the interpolating polynomial, one per monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FilonCoefficients {
    dim: usize,
    terms: Vec<(Monomial, Array1<C64>)>,
}

impl FilonCoefficients {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Monomial, Array1<C64>)] {
        &self.terms
    }

    /// Coefficient of `mono`, if present.
    pub fn coefficient(&self, mono: Monomial) -> Option<&Array1<C64>> {
        self.terms.iter().find(|(m, _)| *m == mono).map(|(_, c)| c)
    }

    /// The polynomial at `τ`.
    pub fn eval(&self, tau: &[f64]) -> Array1<C64> {
        let mut out = Array1::<C64>::zeros(self.terms[0].1.len());
        for (m, c) in &self.terms {
            out.scaled_add(C64::new(m.eval(tau), 0.0), c);
        }
        out
    }

    /// `Σ_m c_m · moment(m)`.
    pub fn integrate(&self, mut moment: impl FnMut(Monomial) -> C64) -> Array1<C64> {
        let mut out = Array1::<C64>::zeros(self.terms[0].1.len());
        for (m, c) in &self.terms {
            out.scaled_add(moment(*m), c);
        }
        out
    }

    /// `∫₀^h ∂_{τ₁} p(s, s) ds` for a bivariate polynomial.
    pub fn diagonal_derivative_integral(&self, h: f64) -> Array1<C64> {
        assert_eq!(self.dim, 2, "diagonal derivative is defined for bivariate polynomials");
        let mut out = Array1::<C64>::zeros(self.terms[0].1.len());
        for (m, c) in &self.terms {
            let e = m.exponents();
            let (a, b) = (e[0] as i32, e[1] as i32);
            if a == 0 {
                continue;
            }
            let w = a as f64 * h.powi(a + b) / (a + b) as f64;
            out.scaled_add(C64::new(w, 0.0), c);
        }
        out
    }
}

fn lin(terms: &[(C64, &Array1<C64>)]) -> Array1<C64> {
    let mut out = Array1::<C64>::zeros(terms[0].1.len());
    for (c, v) in terms {
        out.scaled_add(*c, v);
    }
    out
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `F(τ) = e^{(h−τ)L} α(τ) e^{τL} u` and `F′` at `τ = 0, h`.
///
/// `prop` is `e^{hL}`; `alpha0`, `alpha_h` and their time derivatives are the
/// multipliers at the window ends.
pub fn sample_f_univariate(
    l: &EllipticOperator,
    prop: &Propagator,
    alpha0: &Multiplier,
    dalpha0: &Multiplier,
    alpha_h: &Multiplier,
    dalpha_h: &Multiplier,
    u: &Array1<C64>,
) -> Result<VertexSamples> {
    check_len(l.dim(), u.len())?;
    let w = prop.apply(u);
    let f0 = prop.apply(&alpha0.apply(u));
    let fh = alpha_h.apply(&w);
    let df0 = prop.apply(&(dalpha0.apply(u) - commutator_apply(l, alpha0, u)?));
    let dfh = dalpha_h.apply(&w) - commutator_apply(l, alpha_h, &w)?;
    Ok(VertexSamples::Univariate { f0, fh, df0, dfh })
}

/// Cubic Hermite interpolant on `[0, h]`.
pub fn hermite_univariate(s: &VertexSamples, h: f64) -> Result<FilonCoefficients> {
    let VertexSamples::Univariate { f0, fh, df0, dfh } = s else {
        return Err(Error::DimensionMismatch { expected: 1, got: s.dim() });
    };
    positive_step(h)?;
    let h2 = h * h;
    let a2 = lin(&[(r(3.0 / h2), fh), (r(-3.0 / h2), f0), (r(-2.0 / h), df0), (r(-1.0 / h), dfh)]);
    let a3 = lin(&[(r(1.0 / h2), dfh), (r(-2.0 / (h2 * h)), fh), (r(2.0 / (h2 * h)), f0), (r(1.0 / h2), df0)]);
    let mono = |k| Monomial::univariate(k).expect("k ≤ 3");
    Ok(FilonCoefficients {
        dim: 1,
        terms: vec![(mono(0), f0.clone()), (mono(1), df0.clone()), (mono(2), a2), (mono(3), a3)],
    })
}

/// Affine interpolant on the vertices `(0,0)`, `(0,h)`, `(h,h)` of `σ₂(h)`.
pub fn linear_bivariate(f00: &Array1<C64>, f0h: &Array1<C64>, fhh: &Array1<C64>, h: f64) -> Result<FilonCoefficients> {
    positive_step(h)?;
    check_len(f00.len(), f0h.len())?;
    check_len(f00.len(), fhh.len())?;
    let ih = 1.0 / h;
    Ok(FilonCoefficients {
        dim: 2,
        terms: vec![
            (Monomial::ONE_2, f00.clone()),
            (Monomial::TAU1_2, lin(&[(r(ih), fhh), (r(-ih), f0h)])),
            (Monomial::TAU2_2, lin(&[(r(ih), f0h), (r(-ih), f00)])),
        ],
    })
}

/// Affine interpolant on the vertices of `σ₃(h)`.
pub fn linear_trivariate(
    f000: &Array1<C64>,
    f00h: &Array1<C64>,
    f0hh: &Array1<C64>,
    fhhh: &Array1<C64>,
    h: f64,
) -> Result<FilonCoefficients> {
    positive_step(h)?;
    for v in [f00h, f0hh, fhhh] {
        check_len(f000.len(), v.len())?;
    }
    let ih = 1.0 / h;
    Ok(FilonCoefficients {
        dim: 3,
        terms: vec![
            (Monomial::ONE_3, f000.clone()),
            (Monomial::TAU1_3, lin(&[(r(ih), fhhh), (r(-ih), f0hh)])),
            (Monomial::TAU2_3, lin(&[(r(ih), f0hh), (r(-ih), f00h)])),
            (Monomial::TAU3_3, lin(&[(r(ih), f00h), (r(-ih), f000)])),
        ],
    })
}

/// Bilinear `b₀ + c₁τ₁ + c₂τ₂ + b₃τ₁τ₂` matching the three vertices of `σ₂(h)` and
/// `∫₀^h ∂_{τ₁}p(s, s) ds = X`.
pub fn resonance_bivariate(
    f00: &Array1<C64>,
    f0h: &Array1<C64>,
    fhh: &Array1<C64>,
    x: &Array1<C64>,
    h: f64,
) -> Result<FilonCoefficients> {
    positive_step(h)?;
    for v in [f0h, fhh, x] {
        check_len(f00.len(), v.len())?;
    }
    let ih = 1.0 / h;
    let ih2 = ih * ih;
    Ok(FilonCoefficients {
        dim: 2,
        terms: vec![
            (Monomial::ONE_2, f00.clone()),
            (Monomial::TAU1_2, lin(&[(r(2.0 * ih), x), (r(ih), f0h), (r(-ih), fhh)])),
            (Monomial::TAU2_2, lin(&[(r(ih), f0h), (r(-ih), f00)])),
            (Monomial::TAU12_2, lin(&[(r(2.0 * ih2), fhh), (r(-2.0 * ih2), f0h), (r(-2.0 * ih2), x)])),
        ],
    })
}

fn positive_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("step must be positive, got {h}")))
    }
}

/// Gauss–Legendre nodes on `[0, h]` with `e^{τL}` and `e^{(h−τ)L}` at each node.
#[derive(Debug, Clone)]
pub struct GaussPropagators {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub forward: Vec<Propagator>,
    pub backward: Vec<Propagator>,
}

impl GaussPropagators {
    pub fn new(l: &EllipticOperator, h: f64, q: usize) -> Result<Self> {
        positive_step(h)?;
        if q < 2 {
            return Err(Error::Domain(format!("need at least 2 Gauss nodes, got {q}")));
        }
        let gl = GaussLegendre::new(q);
        let (nodes, weights): (Vec<f64>, Vec<f64>) = gl.on_interval(0.0, h).unzip();
        let forward = nodes.iter().map(|&s| matrix_exp(l, s)).collect::<Result<Vec<_>>>()?;
        let backward = nodes.iter().map(|&s| matrix_exp(l, h - s)).collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes, weights, forward, backward })
    }
}

/// `X = ∫₀^h e^{(h−τ)L} α(τ)(−ad_L α(τ) + ∂ₜα(τ)) e^{τL} u dτ` by Gauss–Legendre.
///
/// `alpha(τ)` returns the multiplier and its time derivative at local time `τ`.
pub fn compute_x(
    l: &EllipticOperator,
    gauss: &GaussPropagators,
    mut alpha: impl FnMut(f64) -> (Multiplier, Multiplier),
    u: &Array1<C64>,
) -> Result<Array1<C64>> {
    check_len(l.dim(), u.len())?;
    let mut out = Array1::<C64>::zeros(u.len());
    for j in 0..gauss.nodes.len() {
        let (a, da) = alpha(gauss.nodes[j]);
        let v = gauss.forward[j].apply(u);
        let inner = da.apply(&v) - commutator_apply(l, &a, &v)?;
        let term = gauss.backward[j].apply(&a.apply(&inner));
        out.scaled_add(r(gauss.weights[j]), &term);
    }
    Ok(out)
}
