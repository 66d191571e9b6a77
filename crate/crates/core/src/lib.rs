//! Neumann–Filon time integration for linear evolution equations
//! `∂ₜu = L u + f(x, t) u` whose potential is a finite Fourier series in time,
//! `f = Σ_{n≠0} αₙ(x, t) e^{i n ω t}`.
//!
//! The third-order scheme truncates the Neumann (Dyson) series of the Duhamel
//! formula after three iterated integrals and evaluates each one by Filon
//! quadrature: the non-oscillatory factor is interpolated at the simplex
//! vertices and integrated exactly against the oscillator via closed-form
//! moments. Second-order-in-time problems are handled through the first-order
//! lift `(u, ∂ₜu)`.

pub mod error;
pub mod examples;
pub mod filon;
pub mod grid;
pub mod linalg;
pub mod magnus;
pub mod moments;
pub mod neumann;
pub mod norms;
pub mod operator;
pub mod problem;
pub mod quadrature;
pub mod stepper;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use linalg::C64;
pub use operator::{EllipticOperator, Multiplier, Propagator};


pub use problem::{Mode, OscillatoryPotential, Problem, ProblemKind, StateVector};
pub use stepper::{integrate, Method, StepPlan, Trajectory};
