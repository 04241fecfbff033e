//! Shifted inverse (resolvent) iteration.
//!
//! Builds the approximate-eigenvector sequence `f_k` with
//! `eps_k = lambda_k f_k - A f_k -> 0`: repeated resolvent solves
//! `f <- normalize((sigma I - A)^{-1} f)` with the shift walked down toward
//! the eigenvalue through Rayleigh-style updates
//! `lambda = <A f, psi_0> / <f, psi_0>`. Shifts stay above the spectral bound,
//! so iterates of nonnegative starts stay nonnegative (positive resolvent).

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::{pairing, StateVec};
use nalgebra::DMatrix;

use super::{eigen_residual, power_iterate, SolverConfig};

struct Factored {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    shift: f64,
}

fn factor(a: &DMatrix<f64>, shift: f64) -> Result<Factored> {
    let n = a.nrows();
    let mut sys = -a.clone();
    for i in 0..n {
        sys[(i, i)] += shift;
    }
    let lu = sys.lu();
    if lu.determinant() == 0.0 {
        return Err(Error::SingularSystem { shift });
    }
    Ok(Factored { lu, shift })
}

pub fn resolvent_iterate(
    gen: &PositiveGenerator,
    cfg: &SolverConfig,
) -> Result<(f64, StateVec, usize)> {
    let grid = gen.grid();
    let n = gen.n();
    let a = gen.op().to_dense()?;
    let psi0 = cfg.psi0_for(n);

    // any upper bound above the spectral bound works as the first shift;
    // the L^1_m growth bound is available for every Metzler matrix
    let lambda_up = gen.growth_bound();
    let mut margin = cfg.shift_margin * (1.0 + lambda_up.abs());
    let mut shift = lambda_up + margin;

    let mut f = StateVec::from_element(n, 1.0);
    f /= pairing(&f, &psi0, grid)?;
    let mut lambda = lambda_up;
    let mut residual = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut total_iters = 0usize;

    // a handful of outer shifts, each factored once and reused
    for _outer in 0..12 {
        let fact = match factor(&a, shift) {
            Ok(f) => f,
            Err(_) => {
                // shift landed inside the spectrum: back off
                margin *= 4.0;
                shift = lambda + margin;
                continue;
            }
        };
        let mut prev_residual = f64::INFINITY;
        for _inner in 0..80 {
            total_iters += 1;
            let g = fact
                .lu
                .solve(&f)
                .ok_or(Error::SingularSystem { shift: fact.shift })?;
            let mass = pairing(&g, &psi0, grid)?;
            if !(mass.abs() > 0.0) || !mass.is_finite() {
                return Err(Error::DegenerateNormalization { value: mass });
            }
            f = g / mass;
            let af = gen.apply(&f);
            lambda = pairing(&af, &psi0, grid)? / pairing(&f, &psi0, grid)?;
            residual = eigen_residual(gen, lambda, &f)?;
            best = best.min(residual);
            if residual <= cfg.tol {
                clamp_rounding_negatives(&mut f);
                return Ok((lambda, f, total_iters));
            }
            if total_iters >= cfg.max_iter {
                return Err(Error::NotConverged {
                    iterations: total_iters,
                    residual,
                });
            }
            // inner loop contracts linearly with ratio margin/(margin+gap);
            // once it stops paying, move the shift closer
            if residual > 0.5 * prev_residual {
                break;
            }
            prev_residual = residual;
        }
        // stagnated at the floating-point floor of the operator scale
        if residual <= super::residual_floor(gen, lambda) {
            clamp_rounding_negatives(&mut f);
            return Ok((lambda, f, total_iters));
        }
        margin = (10.0 * residual * (1.0 + lambda.abs()))
            .max(1e3 * cfg.tol * (1.0 + lambda.abs()));
        shift = lambda + margin;
    }
    Err(Error::NotConverged {
        iterations: total_iters,
        residual,
    })
}

/// Dual eigenvector: solve the adjoint eigenproblem anchored at lambda1.
///
/// Uses one factorization of (sigma I - A*) with sigma just above lambda1 when
/// a dense factorization fits; falls back to power iteration on the adjoint
/// for large sparse instances. Errors when the dual eigenvalue estimate
/// disagrees with lambda1 by more than 10 tol, which signals a discretization
/// asymmetry (the matrix pair (A, A*) must share lambda1 exactly).
pub fn dual_eigenvector(
    gen: &PositiveGenerator,
    lambda1: f64,
    cfg: &SolverConfig,
) -> Result<(StateVec, f64)> {
    let adj = gen.adjoint();
    let n = gen.n();
    let grid = gen.grid();
    let psi0 = cfg.psi0_for(n);
    let scale = 1.0 + lambda1.abs();

    let dense_like = matches!(gen.op(), crate::storage::MatrixOp::Dense(_));
    let use_factor = n <= cfg.dense_cap && (dense_like || gen.c_unif() > 500.0 || n <= 512);

    let (mut phi, lambda_dual) = if use_factor {
        let a = adj.op().to_dense()?;
        let mut delta = 1e-5 * scale;
        let mut phi = StateVec::from_element(n, 1.0);
        let mut lambda_dual = lambda1;
        let mut residual = f64::INFINITY;
        'outer: for _attempt in 0..6 {
            let fact = match factor(&a, lambda1 + delta) {
                Ok(f) => f,
                Err(_) => {
                    delta *= 10.0;
                    continue;
                }
            };
            for _ in 0..60 {
                let g = match fact.lu.solve(&phi) {
                    Some(g) => g,
                    None => {
                        delta *= 10.0;
                        continue 'outer;
                    }
                };
                let mass = pairing(&g, &psi0, grid)?;
                if !(mass.abs() > 0.0) || !mass.is_finite() {
                    return Err(Error::DegenerateNormalization { value: mass });
                }
                phi = g / mass;
                let aphi = adj.apply(&phi);
                lambda_dual = pairing(&aphi, &psi0, grid)? / pairing(&phi, &psi0, grid)?;
                residual = eigen_residual(&adj, lambda_dual, &phi)?;
                if residual <= cfg.tol {
                    break 'outer;
                }
            }
            if residual <= super::residual_floor(&adj, lambda_dual) {
                break 'outer;
            }
            // not converged at this anchor distance: come in tighter
            delta = (delta * 1e-2).max(1e2 * cfg.tol * scale);
        }
        let accept = cfg.tol.max(super::residual_floor(&adj, lambda_dual)) * 10.0;
        if residual > accept {
            return Err(Error::NotConverged {
                iterations: 0,
                residual,
            });
        }
        (phi, lambda_dual)
    } else {
        let (lambda_dual, phi, _) = power_iterate(&adj, cfg)?;
        (phi, lambda_dual)
    };

    let dual_tol = 10.0 * cfg.tol.max(super::residual_floor(&adj, lambda1)) * scale;
    if (lambda_dual - lambda1).abs() > dual_tol {
        return Err(Error::DualMismatch {
            primal: lambda1,
            dual: lambda_dual,
        });
    }
    clamp_rounding_negatives(&mut phi);
    Ok((phi, lambda_dual))
}

/// Entries in [-1e-12 max, 0) are rounding residue of the positive solves;
/// exact zeros are kept so reducibility still shows up in geometry checks.
fn clamp_rounding_negatives(v: &mut StateVec) {
    let amax = v.amax();
    let floor = -1e-12 * amax;
    for x in v.iter_mut() {
        if *x < 0.0 && *x >= floor {
            *x = 0.0;
        }
    }
}
