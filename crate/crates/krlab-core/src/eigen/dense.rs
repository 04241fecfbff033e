//! Dense full-spectrum oracle (real Schur form), independent of the iterative
//! solvers; the stand-in for the boundary point spectrum at matrix level.

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::StateVec;
use nalgebra::{Complex, DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// All eigenvalues sorted by decreasing real part.
    pub eigenvalues: Vec<Complex<f64>>,
    pub lambda1: f64,
    /// lambda1 minus the largest real part outside the lambda1 cluster.
    pub gap: f64,
    /// Eigenvalues with real part within tol_bnd of lambda1.
    pub boundary_set: Vec<Complex<f64>>,
    /// Algebraic multiplicity of lambda1 is 1 within the clustering tolerance.
    pub simple: bool,
    pub tol_bnd: f64,
}

/// Full nonsymmetric eigendecomposition via the real Schur form. For a
/// Metzler matrix the dominant eigenvalue is real (Perron); it is reported
/// with the clustering tolerance `tol_bnd` (default 1e-6 (1 + |lambda1|)).
pub fn dense_spectrum_oracle(
    gen: &PositiveGenerator,
    tol_bnd: Option<f64>,
    cap: usize,
) -> Result<SpectralReport> {
    let n = gen.n();
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    let a = gen.op().to_dense()?;
    let schur = a
        .try_schur(1e-14, 100_000)
        .ok_or_else(|| Error::InvalidArgument("Schur iteration failed to converge".into()))?;
    let mut eigenvalues: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().cloned().collect();
    eigenvalues.sort_by(|p, q| {
        q.re.partial_cmp(&p.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(q.im.partial_cmp(&p.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let lambda1 = eigenvalues[0].re;
    let tol_bnd = tol_bnd.unwrap_or(1e-6 * (1.0 + lambda1.abs()));
    let boundary_set: Vec<Complex<f64>> = eigenvalues
        .iter()
        .filter(|z| (z.re - lambda1).abs() <= tol_bnd)
        .cloned()
        .collect();
    let cluster = eigenvalues
        .iter()
        .filter(|z| (*z - Complex::new(lambda1, 0.0)).norm() <= tol_bnd)
        .count();
    let gap = eigenvalues
        .iter()
        .filter(|z| (*z - Complex::new(lambda1, 0.0)).norm() > tol_bnd)
        .map(|z| lambda1 - z.re)
        .fold(f64::INFINITY, f64::min);
    Ok(SpectralReport {
        eigenvalues,
        lambda1,
        gap,
        boundary_set,
        simple: cluster == 1,
        tol_bnd,
    })
}

fn inverse_iteration(a: &DMatrix<f64>, lambda: f64, scale: f64) -> Result<StateVec> {
    let n = a.nrows();
    // shift slightly off the eigenvalue so the factorization stays regular
    let mut delta = 1e-8 * scale;
    for _ in 0..6 {
        let mut sys = a.clone();
        for i in 0..n {
            sys[(i, i)] -= lambda + delta;
        }
        let lu = sys.lu();
        if lu.determinant() == 0.0 {
            delta *= 100.0;
            continue;
        }
        let mut v = DVector::from_element(n, 1.0);
        v /= v.norm();
        for _ in 0..8 {
            match lu.solve(&v) {
                Some(w) => {
                    let nrm = w.norm();
                    if !(nrm > 0.0) {
                        break;
                    }
                    v = w / nrm;
                }
                None => break,
            }
        }
        // orient: dominant component positive (Perron vectors are signed free)
        let mut idx = 0;
        let mut best = 0.0;
        for (i, &x) in v.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                idx = i;
            }
        }
        if v[idx] < 0.0 {
            v = -v;
        }
        return Ok(v);
    }
    Err(Error::SingularSystem { shift: lambda })
}

/// Right eigenvector of the oracle's lambda1 by shifted inverse iteration on
/// the dense matrix (a separate path from the semigroup solvers).
pub fn principal_vector(gen: &PositiveGenerator, lambda1: f64) -> Result<StateVec> {
    let a = gen.op().to_dense()?;
    inverse_iteration(&a, lambda1, 1.0 + lambda1.abs())
}

/// Left eigenvector (of A^T, i.e. the plain transpose, not the weighted
/// adjoint) for oracle cross-checks.
pub fn left_principal_vector(gen: &PositiveGenerator, lambda1: f64) -> Result<StateVec> {
    let a = gen.op().to_dense()?.transpose();
    inverse_iteration(&a, lambda1, 1.0 + lambda1.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WeightedGrid;
    use crate::storage::MatrixOp;
    use approx::assert_relative_eq;

    fn gen_from(rows: &[f64], n: usize) -> PositiveGenerator {
        let grid = WeightedGrid::new_1d(
            (0..n).map(|i| i as f64).collect(),
            vec![1.0; n],
            vec![1.0; n],
            None,
        )
        .unwrap();
        PositiveGenerator::new(
            MatrixOp::Dense(DMatrix::from_row_slice(n, n, rows)),
            grid,
            "toy",
        )
        .unwrap()
    }

    #[test]
    fn symmetric_chain_spectrum() {
        let gen = gen_from(&[-1.0, 1.0, 1.0, -1.0], 2);
        let rep = dense_spectrum_oracle(&gen, None, 2048).unwrap();
        assert_relative_eq!(rep.lambda1, 0.0, epsilon = 1e-12);
        assert_relative_eq!(rep.gap, 2.0, epsilon = 1e-12);
        assert!(rep.simple);
        assert_eq!(rep.boundary_set.len(), 1);
    }

    #[test]
    fn cyclic_three_state() {
        // A = P - I with P the cyclic permutation: eigenvalues are the cube
        // roots of unity minus one, {0, -3/2 +- i sqrt(3)/2}
        let gen = gen_from(
            &[-1.0, 0.0, 1.0, 1.0, -1.0, 0.0, 0.0, 1.0, -1.0],
            3,
        );
        let rep = dense_spectrum_oracle(&gen, None, 2048).unwrap();
        assert_relative_eq!(rep.lambda1, 0.0, epsilon = 1e-12);
        assert_eq!(rep.boundary_set.len(), 1);
        let second = rep.eigenvalues[1];
        assert_relative_eq!(second.re, -1.5, epsilon = 1e-12);
        assert_relative_eq!(second.im.abs(), f64::sqrt(3.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn reducible_double_eigenvalue_not_simple() {
        let gen = gen_from(&[-1.0, 0.0, 0.0, -1.0], 2);
        let rep = dense_spectrum_oracle(&gen, None, 2048).unwrap();
        assert!(!rep.simple);
    }

    #[test]
    fn cap_enforced() {
        let gen = gen_from(&[-1.0, 1.0, 1.0, -1.0], 2);
        assert!(dense_spectrum_oracle(&gen, None, 1).is_err());
    }

    #[test]
    fn principal_vectors() {
        let gen = gen_from(&[0.0, 2.0, 1.0, -1.0], 2);
        let v = principal_vector(&gen, 1.0).unwrap();
        assert_relative_eq!(v[0] / v[1], 2.0, max_relative = 1e-8);
        // left eigenvector of [[0,2],[1,-1]] at 1: (1, 1) direction
        let u = left_principal_vector(&gen, 1.0).unwrap();
        assert_relative_eq!(u[0] / u[1], 1.0, max_relative = 1e-8);
    }
}
