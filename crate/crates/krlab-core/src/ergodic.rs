//! Long-time diagnostics of the rescaled semigroup S~_t = e^{-lambda_1 t} S_t:
//! decay of the error to the rank-one projection, conservation of <., phi_1>,
//! Cesaro averaging, oscillation periods, and the dyadic lattice-support
//! invariant of the non-mixing mitosis regime.

use crate::eigen::Eigentriplet;
use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::{pairing, weighted_norm, DualVec, NormP, StateVec};
use crate::models::mitosis::{build_mitosis, MitosisModel};
use crate::semigroup::{step_semigroup, StepOptions};
use rustfft::{num_complex::Complex, FftPlanner};

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// ||S~_t f_0 - <f_0, phi_1> f_1||_{1,m} per sample.
    pub error_norms: Vec<f64>,
    /// <S~_t f_0, phi_1> per sample; constant up to stepping tolerance.
    pub conservation: Vec<f64>,
    /// One series per test functional: <S~_t f_0, psi_k>.
    pub observables: Vec<Vec<f64>>,
}

/// Step the rescaled semigroup (generator A - lambda_1 I) and record errors,
/// conservation and observables at every multiple of dt.
pub fn simulate_rescaled(
    gen: &PositiveGenerator,
    triplet: &Eigentriplet,
    f0: &StateVec,
    t_end: f64,
    dt: f64,
    observables: &[DualVec],
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= dt) {
        return Err(Error::InvalidArgument("need 0 < dt <= t_end".into()));
    }
    let grid = gen.grid();
    grid.check_len(f0)?;
    let shifted = gen.shifted(-triplet.lambda1);
    let opts = StepOptions::default();
    let n_samples = (t_end / dt).round() as usize;
    let proj = pairing(f0, &triplet.phi1, grid)?;
    let target = &triplet.f1 * proj;

    let mut times = Vec::with_capacity(n_samples + 1);
    let mut error_norms = Vec::with_capacity(n_samples + 1);
    let mut conservation = Vec::with_capacity(n_samples + 1);
    let mut obs = vec![Vec::with_capacity(n_samples + 1); observables.len()];

    let mut f = f0.clone();
    for k in 0..=n_samples {
        let t = k as f64 * dt;
        times.push(t);
        error_norms.push(weighted_norm(&(&f - &target), grid, NormP::One)?);
        conservation.push(pairing(&f, &triplet.phi1, grid)?);
        for (series, psi) in obs.iter_mut().zip(observables.iter()) {
            series.push(pairing(&f, psi, grid)?);
        }
        if k < n_samples {
            f = step_semigroup(&shifted, &f, dt, 1, opts)?;
        }
    }
    Ok(Trajectory {
        times,
        error_norms,
        conservation,
        observables: obs,
    })
}

#[derive(Debug, Clone)]
pub struct RateFit {
    /// Decay rate (positive means decay) of the error norm.
    pub rate: f64,
    pub prefactor: f64,
    pub r2: f64,
    pub window: (f64, f64),
    /// All errors at or below the floating-point floor; rate not measurable.
    pub saturated: bool,
}

/// Least-squares slope of log(error) over the tail window.
pub fn fit_decay_rate(traj: &Trajectory, window: (f64, f64)) -> Result<RateFit> {
    let floor = 1e-300;
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(traj.error_norms.iter())
        .filter(|(t, e)| **t >= window.0 && **t <= window.1 && **e > floor)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    if pts.is_empty() {
        let in_window = traj
            .times
            .iter()
            .filter(|t| **t >= window.0 && **t <= window.1)
            .count();
        if in_window >= 10 {
            return Ok(RateFit {
                rate: f64::INFINITY,
                prefactor: 0.0,
                r2: 0.0,
                window,
                saturated: true,
            });
        }
        return Err(Error::TooFewSamples { got: 0, need: 10 });
    }
    if pts.len() < 10 {
        return Err(Error::TooFewSamples {
            got: pts.len(),
            need: 10,
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::InvalidArgument("degenerate time window".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        rate: -slope,
        prefactor: intercept.exp(),
        r2,
        window,
        saturated: false,
    })
}

/// Cesaro-mean error `|| (1/T) int_0^T S~_t f_0 dt - <f_0, phi_1> f_1 ||_{1,m}`
/// by trapezoid accumulation along the stepped trajectory.
pub fn cesaro_test(
    gen: &PositiveGenerator,
    triplet: &Eigentriplet,
    f0: &StateVec,
    t_horizon: f64,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) || !(t_horizon > dt) {
        return Err(Error::InvalidArgument("need 0 < dt < T".into()));
    }
    let grid = gen.grid();
    grid.check_len(f0)?;
    let shifted = gen.shifted(-triplet.lambda1);
    let opts = StepOptions::default();
    let n_steps = (t_horizon / dt).round() as usize;
    let mut f = f0.clone();
    let mut acc = f0 * 0.5;
    for _ in 0..n_steps {
        f = step_semigroup(&shifted, &f, dt, 1, opts)?;
        acc += &f;
    }
    acc -= &f * 0.5;
    // trapezoid sum times dt, divided by T = n_steps dt
    acc /= n_steps as f64;
    let proj = pairing(f0, &triplet.phi1, grid)?;
    let diff = acc - &triplet.f1 * proj;
    weighted_norm(&diff, grid, NormP::One)
}

#[derive(Debug, Clone)]
pub struct PeriodEstimate {
    /// Dominant period from the interpolated FFT peak.
    pub period: f64,
    /// Cross-check from the spacing of upward zero crossings.
    pub period_zero_crossing: f64,
    /// FFT bin width converted to period units.
    pub uncertainty: f64,
}

/// Dominant oscillation period of a recorded observable.
///
/// The series is detrended (tail mean removed, residual exponential envelope
/// flattened), Hann-windowed, zero-padded and peak-picked with parabolic
/// interpolation; an independent zero-crossing estimate cross-checks the
/// result. Errors when the tail amplitude sits below the noise floor, which
/// is the expected outcome for mixing (spectrally gapped) instances.
pub fn detect_period(traj: &Trajectory, obs_index: usize, amp_floor: f64) -> Result<PeriodEstimate> {
    let series = traj
        .observables
        .get(obs_index)
        .ok_or_else(|| Error::InvalidArgument(format!("no observable {obs_index}")))?;
    let n = series.len();
    if n < 32 {
        return Err(Error::TooFewSamples { got: n, need: 32 });
    }
    let dt = traj.times[1] - traj.times[0];

    // remove the lambda_1-mode constant: mean over the tail half
    let tail_mean: f64 = series[n / 2..].iter().sum::<f64>() / (n - n / 2) as f64;
    let mut detrended: Vec<f64> = series.iter().map(|v| v - tail_mean).collect();

    // noise floor: the tail quarter must still oscillate visibly
    let head_amp = detrended[..n / 4]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let tail_amp = detrended[3 * n / 4..]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if tail_amp <= amp_floor * head_amp.max(f64::MIN_POSITIVE) {
        return Err(Error::NoSpectralPeak { amplitude: tail_amp });
    }

    // flatten the decaying envelope: estimate the rate from RMS of halves
    let rms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
    let r1 = rms(&detrended[..n / 2]);
    let r2 = rms(&detrended[n / 2..]);
    if r1 > 0.0 && r2 > 0.0 {
        // total amplification over the record capped at e^30
        let cap = 30.0 / (n as f64 * dt);
        let sigma = ((r1 / r2).ln() / (0.5 * n as f64 * dt)).clamp(-cap, cap);
        for (k, v) in detrended.iter_mut().enumerate() {
            *v *= (sigma * k as f64 * dt).exp();
        }
    }

    // Hann window + 4x zero padding
    let padded = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..padded)
        .map(|k| {
            if k < n {
                let w = 0.5
                    * (1.0
                        - (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos());
                Complex::new(detrended[k] * w, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);

    // peak above DC: skip bins below one full cycle over the record
    let k_min = ((padded as f64 / n as f64).ceil() as usize).max(2);
    let half = padded / 2;
    let (mut k_peak, mut peak) = (k_min, 0.0f64);
    for (k, v) in buf.iter().enumerate().take(half).skip(k_min) {
        let mag = v.norm();
        if mag > peak {
            peak = mag;
            k_peak = k;
        }
    }
    if peak == 0.0 {
        return Err(Error::NoSpectralPeak { amplitude: 0.0 });
    }
    // parabolic interpolation on log magnitude
    let refine = if k_peak > k_min && k_peak + 1 < half {
        let lm = buf[k_peak - 1].norm().max(1e-300).ln();
        let lc = buf[k_peak].norm().max(1e-300).ln();
        let lp = buf[k_peak + 1].norm().max(1e-300).ln();
        let denom = lm - 2.0 * lc + lp;
        if denom.abs() > 1e-12 {
            0.5 * (lm - lp) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    let freq = (k_peak as f64 + refine) / (padded as f64 * dt);
    let period = 1.0 / freq;
    let bin_width = 1.0 / (padded as f64 * dt);
    let uncertainty = period * period * bin_width;

    // zero-crossing cross-check: median spacing of upward crossings
    let mut crossings = Vec::new();
    for k in 1..n {
        if detrended[k - 1] < 0.0 && detrended[k] >= 0.0 {
            let frac = detrended[k - 1] / (detrended[k - 1] - detrended[k]);
            crossings.push(traj.times[k - 1] + frac * dt);
        }
    }
    let period_zero_crossing = if crossings.len() >= 3 {
        let mut gaps: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        gaps[gaps.len() / 2]
    } else {
        f64::NAN
    };

    Ok(PeriodEstimate {
        period,
        period_zero_crossing,
        uncertainty,
    })
}

/// Maximal relative drift of the conserved pairing along the trajectory.
pub fn conservation_check(traj: &Trajectory) -> f64 {
    let c0 = traj.conservation[0];
    traj.conservation
        .iter()
        .map(|c| (c - c0).abs() / (1.0 + c0.abs()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct LatticeReport {
    pub ok: bool,
    pub max_leak: f64,
    pub leak_tol: f64,
}

/// Dyadic lattice-support invariant of non-mixing mitosis.
///
/// In the continuum, mass started at x stays supported on the dyadic lattice
/// of the transported position. Discretely, with a(x_{j+q}) = 2 a(x_j) the
/// transport rates are exactly q-periodic, so the full dynamics started at
/// node j0 is a superposition of pure-transport pulses shifted down by whole
/// multiples of q (one per division count). The check simulates both the full
/// and the transport-only dynamics and measures the mass outside the union of
/// q-shifted copies of the transport pulse's support; mixing growth rates
/// desynchronize the shifted copies and leak O(1) mass outside the union.
pub fn lattice_support_check(
    model: &MitosisModel,
    j0: usize,
    t_end: f64,
    dt: f64,
    leak_tol: f64,
) -> Result<LatticeReport> {
    let gen = build_mitosis(model)?;
    let transport = build_mitosis(&model.transport_only())?;
    let grid = gen.grid();
    let n = gen.n();
    let q = model.q;
    if j0 >= n {
        return Err(Error::InvalidArgument(format!("start node {j0} out of range")));
    }
    // precondition: discrete non-mixing identity at all interior nodes
    let nodes = grid.nodes();
    for j in 0..n - q {
        let lhs = model.growth.eval(nodes[j + q]);
        let rhs = 2.0 * model.growth.eval(nodes[j]);
        if (lhs - rhs).abs() > 1e-12 * (1.0 + lhs.abs()) {
            return Err(Error::InvalidArgument(format!(
                "growth rate violates a(2x) = 2a(x) at node {j}"
            )));
        }
    }
    let w = grid.quad_weights();
    let mut delta = StateVec::zeros(n);
    delta[j0] = 1.0 / w[j0];

    let opts = StepOptions::default();
    let n_samples = (t_end / dt).round().max(1.0) as usize;
    let mut full = delta.clone();
    let mut pulse = delta.clone();
    let mut max_leak: f64 = 0.0;
    for _ in 0..n_samples {
        full = step_semigroup(&gen, &full, dt, 1, opts)?;
        pulse = step_semigroup(&transport, &pulse, dt, 1, opts)?;
        // allowed set: union over k >= 0 of supp(pulse) shifted down by k q
        let pulse_max = pulse
            .iter()
            .zip(w.iter())
            .map(|(p, wi)| p * wi)
            .fold(0.0f64, f64::max);
        let floor = 1e-16 * pulse_max;
        let mut allowed = vec![false; n];
        for j in 0..n {
            if pulse[j] * w[j] > floor {
                let mut idx = j;
                loop {
                    allowed[idx] = true;
                    if idx < q {
                        break;
                    }
                    idx -= q;
                }
            }
        }
        let total: f64 = (0..n).map(|j| full[j] * w[j]).sum();
        let outside: f64 = (0..n)
            .filter(|&j| !allowed[j])
            .map(|j| full[j] * w[j])
            .sum();
        if total > 0.0 {
            max_leak = max_leak.max(outside / total);
        }
    }
    Ok(LatticeReport {
        ok: max_leak <= leak_tol,
        max_leak,
        leak_tol,
    })
}
