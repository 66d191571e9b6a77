//! Spatial grids: periodic Fourier, Chebyshev–Dirichlet interior nodes, and tensor products.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::clenshaw_curtis_weights;

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// `points` equispaced nodes `a + j (b - a) / points` on a periodic interval.
    Fourier { points: usize, interval: (f64, f64) },
    /// Chebyshev–Gauss–Lobatto points `cos(j π / points)`, `j = 0..=points`, mapped to the
    /// interval; only the `points - 1` interior nodes carry unknowns.
    Chebyshev { points: usize, interval: (f64, f64) },
    /// Row-major tensor product: the second factor varies fastest.
    Tensor(Box<GridSpec>, Box<GridSpec>),
    /// Unstructured state of the given size (scalar and tiny test systems).
    Dense { size: usize },
}

impl GridSpec {
    pub fn fourier(points: usize, interval: (f64, f64)) -> Result<Self> {
        let g = GridSpec::Fourier { points, interval };
        g.validate()?;
        Ok(g)
    }

    pub fn chebyshev(points: usize, interval: (f64, f64)) -> Result<Self> {
        let g = GridSpec::Chebyshev { points, interval };
        g.validate()?;
        Ok(g)
    }

    pub fn tensor(x: GridSpec, y: GridSpec) -> Result<Self> {
        let g = GridSpec::Tensor(Box::new(x), Box::new(y));
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GridSpec::Fourier { points, interval } | GridSpec::Chebyshev { points, interval } => {
                if *points < 4 {
                    return Err(Error::InvalidGrid(format!("need at least 4 points, got {points}")));
                }
                let (a, b) = *interval;
                if !(b - a > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidGrid(format!("empty interval ({a}, {b})")));
                }
                Ok(())
            }
            GridSpec::Tensor(x, y) => {
                if x.is_tensor() || y.is_tensor() {
                    return Err(Error::InvalidGrid("nested tensor grids are not supported".into()));
                }
                x.validate()?;
                y.validate()
            }
            GridSpec::Dense { size } => {
                if *size == 0 {
                    Err(Error::InvalidGrid("empty dense grid".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_tensor(&self) -> bool {
        matches!(self, GridSpec::Tensor(..))
    }

    /// Number of unknowns on this grid.
    pub fn state_len(&self) -> usize {
        match self {
            GridSpec::Fourier { points, .. } => *points,
            GridSpec::Chebyshev { points, .. } => points - 1,
            GridSpec::Tensor(x, y) => x.state_len() * y.state_len(),
            GridSpec::Dense { size } => *size,
        }
    }

    /// Node coordinates of a one-dimensional grid.
    pub fn nodes_1d(&self) -> Vec<f64> {
        match self {
            GridSpec::Fourier { points, interval: (a, b) } => {
                let dx = (b - a) / *points as f64;
                (0..*points).map(|j| a + j as f64 * dx).collect()
            }
            GridSpec::Chebyshev { points, interval: (a, b) } => {
                let n = *points as f64;
                (1..*points)
                    .map(|j| 0.5 * (a + b) + 0.5 * (b - a) * (j as f64 * PI / n).cos())
                    .collect()
            }
            GridSpec::Dense { size } => (0..*size).map(|j| j as f64).collect(),
            GridSpec::Tensor(..) => panic!("nodes_1d called on a tensor grid"),
        }
    }

    /// All nodes as `[x, y]` pairs (`y = 0` in one dimension), in state order.
    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            GridSpec::Tensor(x, y) => {
                let xs = x.nodes_1d();
                let ys = y.nodes_1d();
                xs.iter()
                    .flat_map(|&xi| ys.iter().map(move |&yj| [xi, yj]))
                    .collect()
            }
            _ => self.nodes_1d().into_iter().map(|x| [x, 0.0]).collect(),
        }
    }

    /// Quadrature weights for the discrete L² inner product, one per unknown.
    pub fn l2_weights(&self) -> Vec<f64> {
        match self {
            GridSpec::Fourier { points, interval: (a, b) } => vec![(b - a) / *points as f64; *points],
            GridSpec::Chebyshev { points, interval: (a, b) } => {
                let w = clenshaw_curtis_weights(*points);
                w[1..*points].iter().map(|wj| wj * 0.5 * (b - a)).collect()
            }
            GridSpec::Tensor(x, y) => {
                let wx = x.l2_weights();
                let wy = y.l2_weights();
                wx.iter()
                    .flat_map(|&a| wy.iter().map(move |&b| a * b))
                    .collect()
            }
            GridSpec::Dense { size } => vec![1.0; *size],
        }
    }
}
