//! Positive generator matrices.

use crate::error::{Error, Result};
use crate::grid::WeightedGrid;
use crate::storage::MatrixOp;
use nalgebra::DVector;

/// A finite Metzler matrix approximating a generator, together with the grid
/// that defines its function space and the uniformization rate.
#[derive(Debug, Clone)]
pub struct PositiveGenerator {
    op: MatrixOp,
    grid: WeightedGrid,
    metzler: bool,
    /// Uniformization rate, >= max_i |A_ii|.
    c_unif: f64,
    /// Largest weighted column mass rate; dominates lambda_1 (cached).
    growth_bound: f64,
    model_tag: String,
}

impl PositiveGenerator {
    pub fn new(op: MatrixOp, grid: WeightedGrid, model_tag: impl Into<String>) -> Result<Self> {
        if op.n() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: op.n(),
            });
        }
        let min_offdiag = op.min_off_diagonal();
        // tiny negative off-diagonals from rounding are still non-Metzler;
        // builders are expected to produce exact zeros instead
        let metzler = min_offdiag >= 0.0;
        let c_unif = op
            .diag()
            .iter()
            .map(|d| d.abs())
            .fold(0.0, f64::max);
        let growth_bound = weighted_column_bound(&op, &grid);
        Ok(PositiveGenerator {
            op,
            grid,
            metzler,
            c_unif,
            growth_bound,
            model_tag: model_tag.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.grid
    }

    pub fn op(&self) -> &MatrixOp {
        &self.op
    }

    pub fn is_metzler(&self) -> bool {
        self.metzler
    }

    pub fn c_unif(&self) -> f64 {
        self.c_unif
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    /// Apply the generator: y = A f.
    pub fn apply(&self, f: &DVector<f64>) -> DVector<f64> {
        self.op.matvec(f)
    }

    /// The adjoint generator A* = W^{-1} A^T W on the same grid, satisfying
    /// <A f, phi> = <f, A* phi>. Metzler iff A is, with the same diagonal.
    pub fn adjoint(&self) -> PositiveGenerator {
        let op = self.op.weighted_transpose(self.grid.quad_weights());
        let growth_bound = weighted_column_bound(&op, &self.grid);
        PositiveGenerator {
            op,
            grid: self.grid.clone(),
            metzler: self.metzler,
            c_unif: self.c_unif,
            growth_bound,
            model_tag: format!("{}*", self.model_tag),
        }
    }

    /// A + c I (shifts the spectrum by c; used for rescaled semigroups).
    pub fn shifted(&self, c: f64) -> PositiveGenerator {
        let op = self.op.shifted(c);
        let c_unif = op.diag().iter().map(|d| d.abs()).fold(0.0, f64::max);
        PositiveGenerator {
            op,
            grid: self.grid.clone(),
            metzler: self.metzler,
            c_unif,
            growth_bound: self.growth_bound + c,
            model_tag: self.model_tag.clone(),
        }
    }

    /// Growth bound of the semigroup in the L^1_m operator norm: the largest
    /// weighted column mass rate max_j sum_i (w_i m_i A_ij) / (w_j m_j).
    /// For a Metzler matrix this dominates lambda_1.
    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    pub fn require_metzler(&self) -> Result<()> {
        if !self.metzler {
            return Err(Error::NotMetzler {
                min_offdiag: self.op.min_off_diagonal(),
            });
        }
        Ok(())
    }
}

fn weighted_column_bound(op: &MatrixOp, grid: &WeightedGrid) -> f64 {
    let w = grid.quad_weights();
    let m = grid.weight_m();
    let n = op.n();
    let mut col = vec![0.0; n];
    op.for_each_entry(|i, j, v| {
        col[j] += w[i] * m[i] * v;
    });
    (0..n)
        .map(|j| col[j] / (w[j] * m[j]))
        .fold(f64::NEG_INFINITY, f64::max)
}
