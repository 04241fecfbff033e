//! Semigroup power iteration: the normalized fixed-point map
//! `f -> S_T f / [S_T f]_0` with `[g]_0 = <g, psi_0>`. At the fixed point
//! `S_T f = e^{lambda_1 T} f`, so `lambda_1 = log([S_T f]_0) / T`.
//!
//! Iterates stay entrywise nonnegative by construction (positivity-exact
//! stepping plus a positive normalization functional).

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::{pairing, StateVec};
use crate::semigroup::{step_semigroup, StepOptions};

use super::{eigen_residual, SolverConfig};

pub fn power_iterate(
    gen: &PositiveGenerator,
    cfg: &SolverConfig,
) -> Result<(f64, StateVec, usize)> {
    gen.require_metzler()?;
    let n = gen.n();
    let grid = gen.grid();
    let psi0 = cfg.psi0_for(n);
    if psi0.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidArgument(
            "normalization functional must be strictly positive".into(),
        ));
    }
    let t = cfg.t_step_for(gen);
    let opts = StepOptions::default();

    let mut f = StateVec::from_element(n, 1.0);
    let norm0 = pairing(&f, &psi0, grid)?;
    f /= norm0;

    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut stagnant = 0usize;
    for iter in 1..=cfg.max_iter {
        let g = step_semigroup(gen, &f, t, 1, opts)?;
        let mass = pairing(&g, &psi0, grid)?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::DegenerateNormalization { value: mass });
        }
        lambda = mass.ln() / t;
        f = g / mass;
        residual = eigen_residual(gen, lambda, &f)?;
        if residual <= cfg.tol {
            return Ok((lambda, f, iter));
        }
        // stiff operators floor out at ~eps ||A||: accept a stagnated
        // residual that has reached the floating-point floor
        if residual < best * 0.98 {
            best = residual;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= 30 && residual <= super::residual_floor(gen, lambda) {
                return Ok((lambda, f, iter));
            }
        }
    }
    let _ = lambda;
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual,
    })
}
