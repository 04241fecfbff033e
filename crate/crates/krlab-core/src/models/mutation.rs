//! Nonlocal mutation-selection operator L f = J * f - W(x) f on a truncated
//! line, with the constructive compatibility constant kappa_0 = (a - 1) beta.

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::WeightedGrid;
use crate::models::coeff::Coeff;
use crate::storage::MatrixOp;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct MutationSelectionModel {
    /// Mutation kernel J >= 0 (a density on the line).
    pub kernel: Coeff,
    /// Selection potential W, continuous, W(0) = 0, confining.
    pub potential: Coeff,
    /// Domain truncation: the operator lives on [-radius, radius].
    pub radius: f64,
    pub n: usize,
    /// The compatibility set A = [a_lo, a_hi] and threshold beta defining
    /// A_beta = A intersect {W >= beta}.
    pub a_lo: f64,
    pub a_hi: f64,
    pub beta: f64,
}

impl MutationSelectionModel {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidModel(format!("n = {} < 3", self.n)));
        }
        if !(self.radius > 0.0) || !(self.beta > 0.0) || !(self.a_hi > self.a_lo) {
            return Err(Error::InvalidModel(
                "need radius > 0, beta > 0 and a nonempty compatibility set".into(),
            ));
        }
        let h = 2.0 * self.radius / self.n as f64;
        for j in 0..self.n {
            let x = -self.radius + (j as f64 + 0.5) * h;
            if self.kernel.eval(x) < 0.0 {
                return Err(Error::InvalidModel(format!("kernel negative at {x}")));
            }
            if self.potential.eval(x) < 0.0 {
                return Err(Error::InvalidModel(format!("potential negative at {x}")));
            }
        }
        Ok(())
    }

    /// Midpoint grid, symmetric about the origin.
    pub fn grid(&self) -> Result<WeightedGrid> {
        let h = 2.0 * self.radius / self.n as f64;
        let nodes: Vec<f64> = (0..self.n)
            .map(|j| -self.radius + (j as f64 + 0.5) * h)
            .collect();
        WeightedGrid::new_1d(nodes, vec![h; self.n], vec![1.0; self.n], None)
    }

    /// Lower bound J >= J_* on the ball of radius r around the origin
    /// (recorded for the positivity hypothesis on J).
    pub fn kernel_floor(&self, r: f64) -> f64 {
        let samples = 101;
        (0..samples)
            .map(|i| {
                let x = -r + 2.0 * r * i as f64 / (samples - 1) as f64;
                self.kernel.eval(x)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Convolution quadrature matrix minus the potential diagonal:
/// A_ij = J(x_i - x_j) w_j - delta_ij W(x_i).
pub fn build_mutation_selection(model: &MutationSelectionModel) -> Result<PositiveGenerator> {
    model.validate()?;
    let grid = model.grid()?;
    let n = model.n;
    let nodes = grid.nodes().to_vec();
    let w = grid.quad_weights().to_vec();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = model.kernel.eval(nodes[i] - nodes[j]) * w[j];
        }
        a[(i, i)] -= model.potential.eval(nodes[i]);
    }
    let gen = PositiveGenerator::new(MatrixOp::Dense(a), grid, "mutation-selection")?;
    gen.require_metzler()?;
    Ok(gen)
}

/// The compatibility constant of the mutation-selection pair:
///
/// ```text
/// a      = min over grid x in A_beta of  sum_{y in A_beta} J(x - y) / W(y) w_y,
/// kappa0 = (a - 1) beta,
/// ```
///
/// with A_beta = A intersect {W >= beta}. Fails when a <= 1 (the bound
/// lambda_1 >= kappa0 is then meaningless). `refine` evaluates the quadrature
/// on a grid refined by that factor, for oracle cross-checks.
pub fn kappa0_mutation(model: &MutationSelectionModel, refine: usize) -> Result<(f64, f64)> {
    model.validate()?;
    let refine = refine.max(1);
    let n = model.n * refine;
    let h = 2.0 * model.radius / n as f64;
    let nodes: Vec<f64> = (0..n).map(|j| -model.radius + (j as f64 + 0.5) * h).collect();
    let in_a_beta: Vec<bool> = nodes
        .iter()
        .map(|&x| x >= model.a_lo && x <= model.a_hi && model.potential.eval(x) >= model.beta)
        .collect();
    if !in_a_beta.iter().any(|&b| b) {
        return Err(Error::InvalidModel(
            "compatibility set A_beta contains no grid nodes".into(),
        ));
    }
    let mut a_min = f64::INFINITY;
    for (i, &xi) in nodes.iter().enumerate() {
        if !in_a_beta[i] {
            continue;
        }
        let mut acc = 0.0;
        for (j, &yj) in nodes.iter().enumerate() {
            if in_a_beta[j] {
                acc += model.kernel.eval(xi - yj) / model.potential.eval(yj) * h;
            }
        }
        if acc < a_min {
            a_min = acc;
        }
    }
    if !(a_min > 1.0) {
        return Err(Error::CompatibilityFailed { a: a_min });
    }
    Ok((a_min, (a_min - 1.0) * model.beta))
}
