//! One-dimensional Dirichlet diffusion L f = f'' + b(x) f' + c(x) f on an
//! interval, discretized with central second differences and upwinded drift
//! (upwinding keeps the matrix Metzler at every resolution).

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::WeightedGrid;
use crate::models::coeff::Coeff;
use crate::storage::{CsrMatrix, MatrixOp};

#[derive(Debug, Clone)]
pub struct Diffusion1DModel {
    pub drift: Coeff,
    pub potential: Coeff,
    pub x_lo: f64,
    pub x_hi: f64,
    /// Interior node count (Dirichlet rows are deleted).
    pub n: usize,
}

impl Diffusion1DModel {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidModel(format!("n = {} < 3", self.n)));
        }
        if !(self.x_hi > self.x_lo) {
            return Err(Error::InvalidModel("empty interval".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<WeightedGrid> {
        let h = (self.x_hi - self.x_lo) / (self.n + 1) as f64;
        let nodes: Vec<f64> = (0..self.n)
            .map(|j| self.x_lo + (j as f64 + 1.0) * h)
            .collect();
        WeightedGrid::new_1d(nodes, vec![h; self.n], vec![1.0; self.n], None)
    }
}

pub fn build_diffusion_1d(model: &Diffusion1DModel) -> Result<PositiveGenerator> {
    model.validate()?;
    let grid = model.grid()?;
    let n = model.n;
    let h = (model.x_hi - model.x_lo) / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let inv_h = 1.0 / h;
    let mut trips: Vec<(usize, usize, f64)> = Vec::with_capacity(5 * n);
    for j in 0..n {
        let x = grid.nodes()[j];
        // Laplacian with Dirichlet ghosts dropped
        trips.push((j, j, -2.0 * inv_h2));
        if j > 0 {
            trips.push((j, j - 1, inv_h2));
        }
        if j + 1 < n {
            trips.push((j, j + 1, inv_h2));
        }
        // drift, upwinded by sign
        let b = model.drift.eval(x);
        if b > 0.0 {
            trips.push((j, j, -b * inv_h));
            if j + 1 < n {
                trips.push((j, j + 1, b * inv_h));
            }
        } else if b < 0.0 {
            trips.push((j, j, b * inv_h));
            if j > 0 {
                trips.push((j, j - 1, -b * inv_h));
            }
        }
        let c = model.potential.eval(x);
        if c != 0.0 {
            trips.push((j, j, c));
        }
    }
    let op = MatrixOp::Sparse(CsrMatrix::from_triplets(n, &trips));
    let gen = PositiveGenerator::new(op, grid, "diffusion-1d")?;
    gen.require_metzler()?;
    Ok(gen)
}

/// Rayleigh quotient <A f, f>_w / <f, f>_w; for the self-adjoint case (b = 0)
/// lambda_1 is its maximum over nonzero states.
pub fn rayleigh_quotient(gen: &PositiveGenerator, f: &crate::grid::StateVec) -> Result<f64> {
    let grid = gen.grid();
    let num = crate::grid::pairing(&gen.apply(f), f, grid)?;
    let den = crate::grid::pairing(f, f, grid)?;
    if den == 0.0 {
        return Err(Error::InvalidArgument("zero state in Rayleigh quotient".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn laplacian_ground_state_small() {
        // b = c = 0 on (0, pi): lambda_1 of the discrete Dirichlet Laplacian is
        // -(4/h^2) sin^2(h/2) -> -1
        let model = Diffusion1DModel {
            drift: Coeff::Constant(0.0),
            potential: Coeff::Constant(0.0),
            x_lo: 0.0,
            x_hi: std::f64::consts::PI,
            n: 200,
        };
        let gen = build_diffusion_1d(&model).unwrap();
        let h = std::f64::consts::PI / 201.0;
        let expected = -(4.0 / (h * h)) * (0.5 * h).sin().powi(2);
        // the discrete eigenvector is exactly sin(x_j)
        let f = DVector::from_iterator(200, gen.grid().nodes().iter().map(|x| x.sin()));
        let r = rayleigh_quotient(&gen, &f).unwrap();
        assert_relative_eq!(r, expected, max_relative = 1e-10);
        assert_relative_eq!(r, -1.0, max_relative = 1e-3);
    }

    #[test]
    fn constant_potential_shifts_diagonal() {
        let base = Diffusion1DModel {
            drift: Coeff::Constant(0.0),
            potential: Coeff::Constant(0.0),
            x_lo: 0.0,
            x_hi: 1.0,
            n: 10,
        };
        let shifted = Diffusion1DModel {
            potential: Coeff::Constant(2.5),
            ..base.clone()
        };
        let a0 = build_diffusion_1d(&base).unwrap().op().to_dense().unwrap();
        let a1 = build_diffusion_1d(&shifted).unwrap().op().to_dense().unwrap();
        for i in 0..10 {
            assert_relative_eq!(a1[(i, i)], a0[(i, i)] + 2.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn drift_upwinding_keeps_metzler() {
        let model = Diffusion1DModel {
            drift: Coeff::Affine { a: -50.0, b: 100.0 }, // changes sign mid-interval
            potential: Coeff::Constant(0.0),
            x_lo: 0.0,
            x_hi: 1.0,
            n: 20,
        };
        let gen = build_diffusion_1d(&model).unwrap();
        assert!(gen.is_metzler());
    }
}
