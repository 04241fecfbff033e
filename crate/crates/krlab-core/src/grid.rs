//! Weighted discrete function spaces.
//!
//! A [`WeightedGrid`] carries the discretization nodes, the quadrature weights
//! `w_i` (cell measures) and the weight function `m_i >= 1`. These define every
//! norm and pairing used in the crate:
//!
//! ```text
//! <f, phi>        = sum_i w_i f_i phi_i
//! ||f||_{1,m}     = sum_i w_i m_i |f_i|
//! ||f||_{inf,m}   = max_i m_i |f_i|           (no quadrature factor)
//! [f]_phi         = <|f|, phi>
//! ```
//!
//! State vectors hold density values at the nodes; dual vectors hold values of
//! bounded functionals at the nodes and pair against states through the
//! quadrature.

use crate::error::{Error, Result};
use nalgebra::DVector;

/// Density values at the grid nodes.
pub type StateVec = DVector<f64>;
/// Dual (functional) values at the grid nodes.
pub type DualVec = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormP {
    One,
    Two,
    Inf,
}

#[derive(Debug, Clone)]
pub struct WeightedGrid {
    /// Node coordinates per axis (one axis in 1-D, two for tensor grids).
    axes: Vec<Vec<f64>>,
    /// Flattened quadrature weights, strictly positive.
    quad_weights: Vec<f64>,
    /// Weight function m at each flattened node, >= 1.
    weight_m: Vec<f64>,
    /// If set to q, the grid is dyadic-exact: nodes[j+q] = 2 nodes[j] bit-equal.
    geometric_ratio: Option<usize>,
}

impl WeightedGrid {
    pub fn new_1d(
        nodes: Vec<f64>,
        quad_weights: Vec<f64>,
        weight_m: Vec<f64>,
        geometric_ratio: Option<usize>,
    ) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if quad_weights.len() != n || weight_m.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: quad_weights.len().min(weight_m.len()),
            });
        }
        validate_axis(&nodes)?;
        validate_weights(&quad_weights, &weight_m)?;
        if let Some(q) = geometric_ratio {
            if q == 0 || q >= n {
                return Err(Error::InvalidGrid(format!(
                    "geometric ratio q = {q} out of range for n = {n}"
                )));
            }
            for j in 0..n - q {
                // Dyadic exactness is bit-equality, not approximate equality.
                if nodes[j + q] != 2.0 * nodes[j] {
                    return Err(Error::InvalidGrid(format!(
                        "grid not dyadic-exact at j = {j}: {} != 2*{}",
                        nodes[j + q],
                        nodes[j]
                    )));
                }
            }
        }
        Ok(WeightedGrid {
            axes: vec![nodes],
            quad_weights,
            weight_m,
            geometric_ratio,
        })
    }

    /// Tensor grid from two axes; weights and m are supplied flattened in
    /// axis-0-major order: flat index = i0 * len(axis1) + i1.
    pub fn new_tensor2(
        axis0: Vec<f64>,
        axis1: Vec<f64>,
        quad_weights: Vec<f64>,
        weight_m: Vec<f64>,
    ) -> Result<Self> {
        let n = axis0.len() * axis1.len();
        if n == 0 {
            return Err(Error::InvalidGrid("empty tensor grid".into()));
        }
        if quad_weights.len() != n || weight_m.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: quad_weights.len().min(weight_m.len()),
            });
        }
        validate_axis(&axis0)?;
        validate_axis(&axis1)?;
        validate_weights(&quad_weights, &weight_m)?;
        Ok(WeightedGrid {
            axes: vec![axis0, axis1],
            quad_weights,
            weight_m,
            geometric_ratio: None,
        })
    }

    pub fn len(&self) -> usize {
        self.quad_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad_weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &[f64] {
        &self.axes[k]
    }

    /// 1-D node coordinates (panics on tensor grids).
    pub fn nodes(&self) -> &[f64] {
        assert_eq!(self.dim(), 1, "nodes() is for 1-D grids");
        &self.axes[0]
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn weight_m(&self) -> &[f64] {
        &self.weight_m
    }

    pub fn geometric_ratio(&self) -> Option<usize> {
        self.geometric_ratio
    }

    /// Coordinates of a flattened node index.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        match self.dim() {
            1 => vec![self.axes[0][flat]],
            2 => {
                let n1 = self.axes[1].len();
                vec![self.axes[0][flat / n1], self.axes[1][flat % n1]]
            }
            d => panic!("unsupported dim {d}"),
        }
    }

    pub fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Total quadrature mass of a state, sum_i w_i f_i.
    pub fn mass(&self, f: &StateVec) -> f64 {
        self.quad_weights
            .iter()
            .zip(f.iter())
            .map(|(w, x)| w * x)
            .sum()
    }
}

fn validate_axis(nodes: &[f64]) -> Result<()> {
    for w in nodes.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidGrid(format!(
                "nodes not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("non-finite node".into()));
    }
    Ok(())
}

fn validate_weights(quad_weights: &[f64], weight_m: &[f64]) -> Result<()> {
    if quad_weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidGrid("quadrature weights must be > 0".into()));
    }
    if weight_m.iter().any(|&m| !(m >= 1.0) || !m.is_finite()) {
        return Err(Error::InvalidGrid("weight function m must be >= 1".into()));
    }
    Ok(())
}

/// Discrete duality pairing <f, phi> = sum_i w_i f_i phi_i.
pub fn pairing(f: &StateVec, phi: &DualVec, grid: &WeightedGrid) -> Result<f64> {
    grid.check_len(f)?;
    grid.check_len(phi)?;
    Ok(grid
        .quad_weights()
        .iter()
        .zip(f.iter().zip(phi.iter()))
        .map(|(w, (x, y))| w * x * y)
        .sum())
}

/// Weighted Lebesgue norm ||f||_{p,m} = ||f m||_p; the sup norm carries no
/// quadrature factor (dual-side convention).
pub fn weighted_norm(f: &StateVec, grid: &WeightedGrid, p: NormP) -> Result<f64> {
    grid.check_len(f)?;
    let w = grid.quad_weights();
    let m = grid.weight_m();
    let val = match p {
        NormP::One => f
            .iter()
            .enumerate()
            .map(|(i, x)| w[i] * m[i] * x.abs())
            .sum(),
        NormP::Two => f
            .iter()
            .enumerate()
            .map(|(i, x)| w[i] * (m[i] * x).powi(2))
            .sum::<f64>()
            .sqrt(),
        NormP::Inf => f
            .iter()
            .enumerate()
            .map(|(i, x)| m[i] * x.abs())
            .fold(0.0, f64::max),
    };
    Ok(val)
}

/// The seminorm [f]_phi = <|f|, phi>; a norm whenever phi > 0 everywhere.
pub fn bracket(f: &StateVec, phi1: &DualVec, grid: &WeightedGrid) -> Result<f64> {
    grid.check_len(f)?;
    grid.check_len(phi1)?;
    if phi1.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidArgument(
            "bracket weight phi1 must be nonnegative".into(),
        ));
    }
    Ok(grid
        .quad_weights()
        .iter()
        .zip(f.iter().zip(phi1.iter()))
        .map(|(w, (x, p))| w * x.abs() * p)
        .sum())
}

/// Dual-side sup norm sup_i phi_i / m_i, the norm of Y = L^inf_{1/m}.
pub fn dual_sup_norm(phi: &DualVec, grid: &WeightedGrid) -> Result<f64> {
    grid.check_len(phi)?;
    Ok(phi
        .iter()
        .zip(grid.weight_m().iter())
        .map(|(p, m)| p.abs() / m)
        .fold(0.0, f64::max))
}
