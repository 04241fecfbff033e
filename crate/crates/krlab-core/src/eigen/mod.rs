//! Principal eigentriplet computation by the two constructive mechanisms
//! (semigroup power iteration and shifted inverse iteration), with a dense
//! full-spectrum oracle for small instances.

pub mod dense;
pub mod geometry;
mod inverse;
mod power;

pub use dense::{dense_spectrum_oracle, left_principal_vector, principal_vector, SpectralReport};
pub use geometry::{check_geometry, GeometryReport};
pub use inverse::{dual_eigenvector, resolvent_iterate};
pub use power::power_iterate;

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::{dual_sup_norm, pairing, weighted_norm, DualVec, NormP, StateVec};
use nalgebra::DVector;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Power-iteration horizon; None picks 2 / max(1, c_unif).
    pub t_step: Option<f64>,
    /// Residual tolerance in the L^1_m norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial distance of the inverse-iteration shift above the growth bound.
    pub shift_margin: f64,
    /// Normalization functional; None means the all-ones functional.
    pub psi0: Option<DualVec>,
    /// Cap for dense factorizations in the auto method choice.
    pub dense_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            t_step: None,
            tol: 1e-11,
            max_iter: 20_000,
            shift_margin: 0.5,
            psi0: None,
            dense_cap: 2048,
        }
    }
}

impl SolverConfig {
    pub fn t_step_for(&self, gen: &PositiveGenerator) -> f64 {
        self.t_step
            .unwrap_or_else(|| 2.0 / gen.c_unif().max(1.0))
    }

    pub fn psi0_for(&self, n: usize) -> DualVec {
        self.psi0
            .clone()
            .unwrap_or_else(|| DVector::from_element(n, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Power,
    Resolvent,
    /// Resolvent when a dense factorization fits, power iteration beyond.
    Auto,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "power" => Ok(Method::Power),
            "resolvent" => Ok(Method::Resolvent),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Config(format!("unknown solver method '{other}'"))),
        }
    }
}

/// The principal eigentriplet with the normalization `sup phi1/m = 1`,
/// `<f1, phi1> = 1`, together with the residuals it was accepted at.
#[derive(Debug, Clone)]
pub struct Eigentriplet {
    pub lambda1: f64,
    pub f1: StateVec,
    pub phi1: DualVec,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Dual eigenvalue estimate; must agree with lambda1 (duality check).
    pub lambda_dual: f64,
    pub iterations: usize,
}

/// Floating-point floor for eigen-residuals: applying A to a unit vector
/// loses ~eps * ||A|| absolutely and the stepping series accumulates a few
/// hundred such roundings, so no iteration can certify below this.
pub(crate) fn residual_floor(gen: &PositiveGenerator, lambda: f64) -> f64 {
    256.0 * f64::EPSILON * (1.0 + gen.c_unif() + lambda.abs())
}

/// Relative eigen-residual ||A f - lambda f||_{1,m} / ||f||_{1,m}.
pub fn eigen_residual(gen: &PositiveGenerator, lambda: f64, f: &StateVec) -> Result<f64> {
    let r = gen.apply(f) - f * lambda;
    let num = weighted_norm(&r, gen.grid(), NormP::One)?;
    let den = weighted_norm(f, gen.grid(), NormP::One)?;
    if den == 0.0 {
        return Err(Error::DegenerateNormalization { value: 0.0 });
    }
    Ok(num / den)
}

/// Rescale (f1, phi1) to the normalization `sup_i phi1_i / m_i = 1`,
/// `<f1, phi1> = 1`, recording residuals. Idempotent.
pub fn normalize_triplet(
    gen: &PositiveGenerator,
    lambda1: f64,
    f1: StateVec,
    phi1: DualVec,
    lambda_dual: f64,
    iterations: usize,
) -> Result<Eigentriplet> {
    let grid = gen.grid();
    let sup = dual_sup_norm(&phi1, grid)?;
    if sup == 0.0 {
        return Err(Error::ZeroPairing);
    }
    let phi1 = phi1 / sup;
    let pair = pairing(&f1, &phi1, grid)?;
    if pair <= 0.0 {
        return Err(Error::ZeroPairing);
    }
    let f1 = f1 / pair;
    let primal_residual = eigen_residual(gen, lambda1, &f1)?;
    let dual_residual = eigen_residual(&gen.adjoint(), lambda_dual, &phi1)?;
    Ok(Eigentriplet {
        lambda1,
        f1,
        phi1,
        primal_residual,
        dual_residual,
        lambda_dual,
        iterations,
    })
}

/// Full solve: primal eigenpair by the chosen method, dual eigenvector
/// anchored at lambda1, then the normalization above.
pub fn solve_triplet(
    gen: &PositiveGenerator,
    cfg: &SolverConfig,
    method: Method,
) -> Result<Eigentriplet> {
    // resolvent iteration needs dense factorizations: pick it for genuinely
    // dense matrices, stiff generators (where stepping is expensive), and
    // small instances; large sparse non-stiff generators iterate the semigroup
    let dense_like = matches!(gen.op(), crate::storage::MatrixOp::Dense(_));
    let use_resolvent = match method {
        Method::Power => false,
        Method::Resolvent => true,
        Method::Auto => {
            gen.n() <= cfg.dense_cap
                && (dense_like || gen.c_unif() > 500.0 || gen.n() <= 256)
        }
    };
    let (lambda1, f1, iters) = if use_resolvent {
        resolvent_iterate(gen, cfg)?
    } else {
        power_iterate(gen, cfg)?
    };
    let (phi1, lambda_dual) = dual_eigenvector(gen, lambda1, cfg)?;
    normalize_triplet(gen, lambda1, f1, phi1, lambda_dual, iters)
}
