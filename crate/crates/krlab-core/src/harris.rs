//! Constructive convergence-rate certificates.
//!
//! All checks run on kernel matrices (quadrature factored out), which makes
//! the minorization `S_T f >= g_0 <psi_0, f>` an entrywise test
//! `K_ij >= g0_i psi0_j` that is exact and grid-refinement stable.
//!
//! Three layers:
//! * Doeblin: uniform minorization over the whole positive cone, one-step
//!   contraction factor `gamma = 1 - e^{-lambda_1 T} <phi_1, g_0 / R_0>`.
//! * Harris: minorization restricted to the cone `||f|| <= A [f]_{phi_1}`
//!   plus a Lyapunov drift bound, combined through the 2x2 matrix
//!   `M = [[gamma_L, K], [(1-gamma_H)/A', gamma_H]]`, `A' = A/2`, whose
//!   spectral radius `alpha < 1` certifies a geometric rate.
//! * Isolation: the same machinery applied to the rescaled resolvent
//!   `(lambda - lambda_1) R(lambda)` yields a ball around lambda_1 free of
//!   other spectrum, of radius `eps = (1/alpha - 1)(lambda - lambda_1)`.

use crate::eigen::Eigentriplet;
use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::{pairing, DualVec, StateVec, WeightedGrid};
use crate::semigroup::{resolvent_matrix, semigroup_kernel, KernelMatrix, StepOptions};
use nalgebra::DVector;

#[derive(Debug, Clone)]
pub struct DoblinWitness {
    pub t_horizon: f64,
    pub psi0: DualVec,
    pub g0: StateVec,
    /// sup phi_1 / psi_0, the norm-equivalence constant.
    pub r0_bound: f64,
    /// <phi_1, g_0>, the positivity mass of the witness.
    pub r0_pairing: f64,
    pub gamma: f64,
}

/// Maximal admissible minorant: g0_i = min_j K_ij / psi0_j. The returned g0
/// satisfies S_T f >= g0 <psi_0, f> for every f >= 0 exactly, by linearity
/// over the extreme rays delta_j. Fails iff some kernel row has a zero.
pub fn find_doblin_minorization(kernel: &KernelMatrix, psi0: &DualVec) -> Result<StateVec> {
    let n = kernel.n();
    if psi0.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: psi0.len(),
        });
    }
    if psi0.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidArgument(
            "psi0 must be strictly positive".into(),
        ));
    }
    let mut g0 = DVector::zeros(n);
    for i in 0..n {
        let mut m = f64::INFINITY;
        for j in 0..n {
            let v = kernel.entry(i, j) / psi0[j];
            if v < m {
                m = v;
            }
        }
        g0[i] = m.max(0.0);
    }
    if g0.iter().all(|&v| v == 0.0) {
        return Err(Error::MinorizationFailed(
            "every kernel row has a zero entry; g0 = 0".into(),
        ));
    }
    Ok(g0)
}

/// Contraction factor of the Doeblin theorem:
/// R_0 = sup phi_1/psi_0, g_1 = g_0/R_0, gamma = 1 - e^{-lambda_1 T} <phi_1, g_1>.
pub fn doblin_rate(
    lambda1: f64,
    t_horizon: f64,
    phi1: &DualVec,
    psi0: &DualVec,
    g0: &StateVec,
    grid: &WeightedGrid,
) -> Result<f64> {
    if g0.iter().all(|&v| v == 0.0) {
        return Err(Error::MinorizationFailed("g0 = 0".into()));
    }
    let r0 = phi1
        .iter()
        .zip(psi0.iter())
        .map(|(p, q)| p / q)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidArgument(
            "phi1 <= R0 psi0 fails for every finite R0".into(),
        ));
    }
    let g1 = g0 / r0;
    let gamma = 1.0 - (-lambda1 * t_horizon).exp() * pairing(&g1, phi1, grid)?;
    if gamma >= 1.0 {
        return Err(Error::ContractionNotStrict {
            value: gamma,
            slack: gamma - 1.0,
        });
    }
    Ok(gamma)
}

/// Doeblin certificate for the semigroup at horizon T with witness psi0
/// (all-ones unless the model supplies a transported functional).
pub fn certify_doblin(
    gen: &PositiveGenerator,
    triplet: &Eigentriplet,
    t_horizon: f64,
    psi0: Option<DualVec>,
) -> Result<DoblinWitness> {
    let kernel = semigroup_kernel(gen, t_horizon, StepOptions::default())?;
    let psi0 = psi0.unwrap_or_else(|| DVector::from_element(gen.n(), 1.0));
    let g0 = find_doblin_minorization(&kernel, &psi0)?;
    let gamma = doblin_rate(
        triplet.lambda1,
        t_horizon,
        &triplet.phi1,
        &psi0,
        &g0,
        gen.grid(),
    )?;
    let r0_bound = triplet
        .phi1
        .iter()
        .zip(psi0.iter())
        .map(|(p, q)| p / q)
        .fold(f64::NEG_INFINITY, f64::max);
    let r0_pairing = pairing(&g0, &triplet.phi1, gen.grid())?;
    Ok(DoblinWitness {
        t_horizon,
        psi0,
        g0,
        r0_bound,
        r0_pairing,
        gamma,
    })
}

/// Lyapunov drift constant: given the kernel of the rescaled operator and a
/// target gamma_L, the per-column amplifications a_j = ||S~ e_j||_{1,m} / m_j
/// yield the smallest K with `||S~ f|| <= gamma_L ||f|| + K [f]_{phi_1}`:
/// K = max_j (a_j - gamma_L)_+ m_j / phi1_j. The column test is sufficient by
/// the triangle inequality and tight on the positive cone.
pub fn check_lyapunov(
    kernel_rescaled: &KernelMatrix,
    phi1: &DualVec,
    grid: &WeightedGrid,
    target_gamma_l: f64,
) -> Result<f64> {
    if !(target_gamma_l > 0.0 && target_gamma_l < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target gamma_L must lie in (0,1), got {target_gamma_l}"
        )));
    }
    if phi1.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidArgument(
            "phi1 must be strictly positive for the Lyapunov test".into(),
        ));
    }
    let n = kernel_rescaled.n();
    let w = grid.quad_weights();
    let m = grid.weight_m();
    let mut k_const: f64 = 0.0;
    for j in 0..n {
        let col_norm: f64 = (0..n)
            .map(|i| w[i] * m[i] * kernel_rescaled.entry(i, j).abs())
            .sum();
        let a_j = col_norm / m[j];
        let excess = (a_j - target_gamma_l).max(0.0);
        k_const = k_const.max(excess * m[j] / phi1[j]);
    }
    Ok(k_const)
}

/// Harris minorization on the cone `||f||_{1,m} <= A [f]_{phi_1}`.
///
/// Core-set reduction: order nodes by phi_1/m descending and take the
/// shortest prefix C with `A max_{j not in C} phi1_j/m_j <= 1/2`. For f in the
/// cone this gives `sum_{j in C} w_j f_j phi1_j >= [f]_{phi_1} / 2`, and then
///
/// ```text
/// (S_T f)_i >= min_{j in C} K_ij sum_{j in C} w_j f_j
///           >= [ min_{j in C} K_ij / (2 max_{j in C} phi1_j) ] [f]_{phi_1},
/// ```
///
/// so g_A,i = min_{j in C} K_ij / (2 max_{j in C} phi1_j). The contraction
/// factor of the coupling step is gamma_H = 1 - rescale <phi_1, g_A> with
/// rescale = e^{-lambda_1 T} for a raw semigroup kernel (1 for an already
/// rescaled operator).
pub fn check_harris(
    kernel: &KernelMatrix,
    phi1: &DualVec,
    grid: &WeightedGrid,
    a_cone: f64,
    rescale: f64,
) -> Result<(StateVec, f64)> {
    if !(a_cone > 0.0) {
        return Err(Error::InvalidArgument("A must be > 0".into()));
    }
    let n = kernel.n();
    let m = grid.weight_m();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        (phi1[q] / m[q])
            .partial_cmp(&(phi1[p] / m[p]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // shortest prefix whose complement satisfies the tail bound
    let mut core_len = n;
    for k in 1..n {
        let next = order[k];
        if a_cone * phi1[next] / m[next] <= 0.5 {
            core_len = k;
            break;
        }
    }
    let core = &order[..core_len];
    let max_phi = core.iter().map(|&j| phi1[j]).fold(0.0, f64::max);
    if !(max_phi > 0.0) {
        return Err(Error::MinorizationFailed("phi1 vanishes on the core set".into()));
    }
    let mut g_a = DVector::zeros(n);
    for i in 0..n {
        let mut mn = f64::INFINITY;
        for &j in core {
            let v = kernel.entry(i, j);
            if v < mn {
                mn = v;
            }
        }
        g_a[i] = (mn / (2.0 * max_phi)).max(0.0);
    }
    if g_a.iter().all(|&v| v == 0.0) {
        return Err(Error::MinorizationFailed(
            "kernel columns over the core set share no common support".into(),
        ));
    }
    let gamma_h = (1.0 - rescale * pairing(&g_a, phi1, grid)?).max(0.0);
    if gamma_h >= 1.0 {
        return Err(Error::ContractionNotStrict {
            value: gamma_h,
            slack: gamma_h - 1.0,
        });
    }
    Ok((g_a, gamma_h))
}

#[derive(Debug, Clone)]
pub struct HarrisCertificate {
    pub t_horizon: f64,
    pub gamma_l: f64,
    pub k_const: f64,
    pub a_cone: f64,
    pub gamma_h: f64,
    pub g_a: StateVec,
    /// <phi_1, g_A> > 0, the positivity mass of the Harris minorant.
    pub r_a: f64,
    /// The 2x2 contraction matrix [[gamma_L, K], [(1-gamma_H)/A', gamma_H]].
    pub m: [[f64; 2]; 2],
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// Spectral radius of M; < 1.
    pub alpha: f64,
    /// -log(alpha) / T, the certified geometric rate per unit time.
    pub rate_per_time: f64,
}

/// Combine Lyapunov and coupling constants into the contraction matrix and
/// its spectral radius. Strict precondition A > K/(1 - gamma_L); alpha < 1
/// requires the stronger A/2 > K/(1 - gamma_L), values in between are
/// reported as a boundary failure with their slack.
pub fn assemble_certificate(
    t_horizon: f64,
    gamma_l: f64,
    k_const: f64,
    a_cone: f64,
    gamma_h: f64,
    g_a: StateVec,
    phi1: &DualVec,
    grid: &WeightedGrid,
) -> Result<HarrisCertificate> {
    if !(gamma_l > 0.0 && gamma_l < 1.0) {
        return Err(Error::CertificateFailed(format!(
            "gamma_L = {gamma_l} outside (0,1)"
        )));
    }
    if !(a_cone > k_const / (1.0 - gamma_l)) {
        return Err(Error::CertificateFailed(format!(
            "precondition A > K/(1-gamma_L) fails: A = {a_cone}, K/(1-gamma_L) = {}",
            k_const / (1.0 - gamma_l)
        )));
    }
    let a_half = a_cone / 2.0;
    let m = [[gamma_l, k_const], [(1.0 - gamma_h) / a_half, gamma_h]];
    let tr = gamma_l + gamma_h;
    let det = gamma_l * gamma_h - (1.0 - gamma_h) * k_const / a_half;
    let disc = tr * tr - 4.0 * det;
    let (mu_plus, mu_minus, alpha) = if disc >= 0.0 {
        let mp = 0.5 * (tr + disc.sqrt());
        let mm = 0.5 * (tr - disc.sqrt());
        (mp, mm, mp.abs().max(mm.abs()))
    } else {
        // complex pair of modulus sqrt(det)
        let r = det.sqrt();
        (r, r, r)
    };
    if alpha >= 1.0 {
        return Err(Error::ContractionNotStrict {
            value: alpha,
            slack: alpha - 1.0,
        });
    }
    let r_a = pairing(&g_a, phi1, grid)?;
    Ok(HarrisCertificate {
        t_horizon,
        gamma_l,
        k_const,
        a_cone,
        gamma_h,
        g_a,
        r_a,
        m,
        mu_plus,
        mu_minus,
        alpha,
        rate_per_time: -alpha.ln() / t_horizon,
    })
}

/// Default log-spaced sweep for the cone parameter A. The optimum is not
/// characterized, so the caller scans and keeps the best alpha.
pub fn default_a_sweep(k_const: f64, gamma_l: f64, steps: usize) -> Vec<f64> {
    let lo = if k_const > 0.0 {
        2.05 * k_const / (1.0 - gamma_l)
    } else {
        1.0
    };
    let hi = lo * 1e4;
    let steps = steps.max(2);
    (0..steps)
        .map(|k| lo * (hi / lo).powf(k as f64 / (steps - 1) as f64))
        .collect()
}

/// Full Harris certification of the rescaled semigroup at horizon T: Lyapunov
/// constant, then an A-sweep keeping the certificate with the smallest alpha.
pub fn certify_harris(
    gen: &PositiveGenerator,
    triplet: &Eigentriplet,
    t_horizon: f64,
    target_gamma_l: f64,
    a_sweep: Option<Vec<f64>>,
) -> Result<HarrisCertificate> {
    let kernel = semigroup_kernel(gen, t_horizon, StepOptions::default())?;
    let rescale = (-triplet.lambda1 * t_horizon).exp();
    let kernel_rescaled = kernel.scaled(rescale);
    certify_harris_from_kernel(
        &kernel,
        &kernel_rescaled,
        rescale,
        triplet,
        gen.grid(),
        t_horizon,
        target_gamma_l,
        a_sweep,
    )
}

#[allow(clippy::too_many_arguments)]
fn certify_harris_from_kernel(
    kernel_raw: &KernelMatrix,
    kernel_rescaled: &KernelMatrix,
    rescale: f64,
    triplet: &Eigentriplet,
    grid: &WeightedGrid,
    t_horizon: f64,
    target_gamma_l: f64,
    a_sweep: Option<Vec<f64>>,
) -> Result<HarrisCertificate> {
    let k_const = check_lyapunov(kernel_rescaled, &triplet.phi1, grid, target_gamma_l)?;
    let sweep = a_sweep.unwrap_or_else(|| default_a_sweep(k_const, target_gamma_l, 25));
    let mut best: Option<HarrisCertificate> = None;
    let mut last_err: Option<Error> = None;
    for &a_cone in &sweep {
        if !(a_cone > k_const / (1.0 - target_gamma_l)) {
            continue;
        }
        match check_harris(kernel_raw, &triplet.phi1, grid, a_cone, rescale).and_then(
            |(g_a, gamma_h)| {
                assemble_certificate(
                    t_horizon,
                    target_gamma_l,
                    k_const,
                    a_cone,
                    gamma_h,
                    g_a,
                    &triplet.phi1,
                    grid,
                )
            },
        ) {
            Ok(cert) => {
                if best.as_ref().map_or(true, |b| cert.alpha < b.alpha) {
                    best = Some(cert);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        Error::CertificateFailed(format!(
            "no A in the sweep produced alpha < 1 (K = {k_const:.3e}, last failure: {})",
            last_err.map_or_else(|| "none".into(), |e| e.to_string())
        ))
    })
}

#[derive(Debug, Clone)]
pub struct IsolationCertificate {
    pub lambda_probe: f64,
    /// Contraction factor of the rescaled resolvent (lambda - lambda_1) R(lambda).
    pub alpha_res: f64,
    /// Radius of the spectrum-free ball around lambda_1.
    pub epsilon: f64,
    pub harris: HarrisCertificate,
}

/// Quantified isolation of lambda_1 via the rescaled resolvent: re-run the
/// Lyapunov/Harris checks on the kernel of (lambda - lambda_1) R(lambda),
/// then eps = (1/alpha - 1)(lambda - lambda_1).
pub fn certify_isolation(
    gen: &PositiveGenerator,
    triplet: &Eigentriplet,
    lambda_probe: f64,
    target_gamma_l: f64,
    a_sweep: Option<Vec<f64>>,
) -> Result<IsolationCertificate> {
    if !(lambda_probe > triplet.lambda1) {
        return Err(Error::InvalidArgument(format!(
            "probe {lambda_probe} must exceed lambda1 = {}",
            triplet.lambda1
        )));
    }
    let res = resolvent_matrix(gen, lambda_probe)?;
    let scaled = &res * (lambda_probe - triplet.lambda1);
    let kernel = KernelMatrix::from_matrix(&scaled, gen.grid());
    // the rescaled resolvent is already conservative: <phi_1, R~ f> = <phi_1, f>
    let harris = certify_harris_from_kernel(
        &kernel,
        &kernel,
        1.0,
        triplet,
        gen.grid(),
        1.0,
        target_gamma_l,
        a_sweep,
    )?;
    let alpha_res = harris.alpha;
    let epsilon = (1.0 / alpha_res - 1.0) * (lambda_probe - triplet.lambda1);
    Ok(IsolationCertificate {
        lambda_probe,
        alpha_res,
        epsilon,
        harris,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WeightedGrid;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn unit_grid(n: usize) -> WeightedGrid {
        WeightedGrid::new_1d(
            (0..n).map(|i| i as f64).collect(),
            vec![1.0; n],
            vec![1.0; n],
            None,
        )
        .unwrap()
    }

    fn kernel_from(rows: &[f64], n: usize, grid: &WeightedGrid) -> KernelMatrix {
        let m = DMatrix::from_row_slice(n, n, rows);
        // rows are already kernel entries for unit weights
        let w = grid.quad_weights();
        let mut scaled = m.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= w[j];
            }
        }
        KernelMatrix::from_matrix(&scaled, grid)
    }

    #[test]
    fn minorization_examples() {
        let g = unit_grid(2);
        let k = kernel_from(&[0.5, 0.3, 0.2, 0.4], 2, &g);
        let psi0 = DVector::from_element(2, 1.0);
        let g0 = find_doblin_minorization(&k, &psi0).unwrap();
        assert_eq!(g0, DVector::from_vec(vec![0.3, 0.2]));

        // a zero entry in every row: failure
        let k = kernel_from(&[0.0, 0.3, 0.2, 0.0], 2, &g);
        assert!(find_doblin_minorization(&k, &psi0).is_err());

        // rank-one kernel: g0 = (c, ..., c)
        let k = kernel_from(&[0.7, 0.7, 0.7, 0.7], 2, &g);
        let g0 = find_doblin_minorization(&k, &psi0).unwrap();
        assert_eq!(g0, DVector::from_vec(vec![0.7, 0.7]));

        // psi0 with a zero entry is rejected
        let bad = DVector::from_vec(vec![1.0, 0.0]);
        assert!(find_doblin_minorization(&k, &bad).is_err());
    }

    #[test]
    fn doblin_rate_hand_example() {
        // column-stochastic K = [[0.5, 0.3], [0.5, 0.7]], w = (1,1),
        // lambda1 = 0, phi1 = psi0 = 1: g0 = (0.3, 0.5), R0 = 1,
        // gamma = 1 - 0.8 = 0.2
        let g = unit_grid(2);
        let k = kernel_from(&[0.5, 0.3, 0.5, 0.7], 2, &g);
        let ones = DVector::from_element(2, 1.0);
        let g0 = find_doblin_minorization(&k, &ones).unwrap();
        assert_eq!(g0, DVector::from_vec(vec![0.3, 0.5]));
        let gamma = doblin_rate(0.0, 1.0, &ones, &ones, &g0, &g).unwrap();
        assert_relative_eq!(gamma, 0.2, epsilon = 1e-15);

        // uniform stochastic kernel: one-step coupling, gamma = 0
        let k = kernel_from(&[0.5, 0.5, 0.5, 0.5], 2, &g);
        let g0 = find_doblin_minorization(&k, &ones).unwrap();
        let gamma = doblin_rate(0.0, 1.0, &ones, &ones, &g0, &g).unwrap();
        assert_relative_eq!(gamma, 0.0, epsilon = 1e-15);

        // zero witness fails
        let z = DVector::zeros(2);
        assert!(doblin_rate(0.0, 1.0, &ones, &ones, &z, &g).is_err());
    }

    #[test]
    fn lyapunov_examples() {
        let g = unit_grid(3);
        let ones = DVector::from_element(3, 1.0);
        // uniform columns with amplification 0.4, target 0.2: K = 0.2
        let k = kernel_from(
            &[0.4, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.0, 0.4],
            3,
            &g,
        );
        let kc = check_lyapunov(&k, &ones, &g, 0.2).unwrap();
        assert_relative_eq!(kc, 0.2, epsilon = 1e-15);
        // target above max amplification: K = 0
        let kc = check_lyapunov(&k, &ones, &g, 0.5).unwrap();
        assert_eq!(kc, 0.0);
    }

    #[test]
    fn harris_rank_one_stochastic() {
        // uniform stochastic kernel on n nodes with w = 1/n: K_ij = 1,
        // phi1 = m = 1: core = all nodes, g_A = 1/2, gamma_H = 1/2
        let n = 4;
        let grid = WeightedGrid::new_1d(
            (0..n).map(|i| i as f64).collect(),
            vec![1.0 / n as f64; n],
            vec![1.0; n],
            None,
        )
        .unwrap();
        let m = DMatrix::from_element(n, n, 1.0 / n as f64);
        let k = KernelMatrix::from_matrix(&m, &grid);
        let ones = DVector::from_element(n, 1.0);
        let (g_a, gamma_h) = check_harris(&k, &ones, &grid, 10.0, 1.0).unwrap();
        for i in 0..n {
            assert_relative_eq!(g_a[i], 0.5, epsilon = 1e-15);
        }
        assert_relative_eq!(gamma_h, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn harris_zero_row_is_admissible() {
        // one kernel row identically zero: g_A has a zero entry but is not
        // identically zero, and gamma_H comes from the remaining mass
        let g = unit_grid(2);
        let k = kernel_from(&[0.0, 0.0, 0.5, 0.5], 2, &g);
        let ones = DVector::from_element(2, 1.0);
        let (g_a, gamma_h) = check_harris(&k, &ones, &g, 10.0, 1.0).unwrap();
        assert_eq!(g_a[0], 0.0);
        assert!(g_a[1] > 0.0);
        assert!(gamma_h < 1.0);
    }

    #[test]
    fn assemble_examples() {
        let g = unit_grid(2);
        let ones = DVector::from_element(2, 1.0);
        let g_a = DVector::from_vec(vec![0.1, 0.1]);

        // K = 0: triangular M, alpha = max(gamma_L, gamma_H)
        let cert =
            assemble_certificate(1.0, 0.5, 0.0, 4.0, 0.8, g_a.clone(), &ones, &g).unwrap();
        assert_relative_eq!(cert.alpha, 0.8, epsilon = 1e-14);

        // gamma_L = gamma_H = 0.5, K = 1, A = 6 (A' = 3):
        // D = 0.25 - 1/6, tr = 1, mu+ = (1 + sqrt(1 - 4D))/2 = 0.908248...
        let cert =
            assemble_certificate(1.0, 0.5, 1.0, 6.0, 0.5, g_a.clone(), &ones, &g).unwrap();
        assert_relative_eq!(cert.mu_plus, 0.9082482904638630, epsilon = 1e-12);
        assert_relative_eq!(cert.alpha, 0.9082482904638630, epsilon = 1e-12);

        // boundary case A = K/(1-gamma_L) exactly: precondition error
        let err = assemble_certificate(1.0, 0.5, 1.0, 2.0, 0.5, g_a, &ones, &g);
        assert!(err.is_err());
    }

    #[test]
    fn doblin_subsumed_by_harris() {
        // a Doeblin witness is a Harris certificate with K = 0 and
        // alpha = max(gamma, gamma_L); the rates agree when gamma_L = gamma
        let g = unit_grid(2);
        let ones = DVector::from_element(2, 1.0);
        let g_a = DVector::from_vec(vec![0.4, 0.4]);
        let gamma = 0.2;
        for gamma_l in [0.05, 0.2, 0.6] {
            let cert = assemble_certificate(
                1.0,
                gamma_l,
                0.0,
                5.0,
                gamma,
                g_a.clone(),
                &ones,
                &g,
            )
            .unwrap();
            assert_relative_eq!(cert.alpha, gamma.max(gamma_l), epsilon = 1e-14);
        }
    }

    #[test]
    fn alpha_monotone_in_inputs() {
        // alpha is nondecreasing in each of gamma_L, gamma_H, K
        let g = unit_grid(2);
        let ones = DVector::from_element(2, 1.0);
        let g_a = DVector::from_vec(vec![0.1, 0.1]);
        let base = assemble_certificate(1.0, 0.4, 0.5, 8.0, 0.6, g_a.clone(), &ones, &g)
            .unwrap()
            .alpha;
        for (gl, gh, k) in [(0.5, 0.6, 0.5), (0.4, 0.7, 0.5), (0.4, 0.6, 0.9)] {
            let a = assemble_certificate(1.0, gl, k, 8.0, gh, g_a.clone(), &ones, &g)
                .unwrap()
                .alpha;
            assert!(a >= base - 1e-14, "alpha not monotone: {a} < {base}");
        }
    }
}
