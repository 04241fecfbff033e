//! Batch front-end over the core library: parse a model config, run a solve /
//! certification / simulation / sweep, emit a flat key = value report and
//! plot-ready CSV.
//!
//! Exit codes: 0 ok, 2 solver failure, 3 geometry violation, 4 certificate
//! failure, 5 config error.

use clap::{Parser, Subcommand};
use krlab_core::config::RunConfig;
use krlab_core::eigen::{
    check_geometry, dense_spectrum_oracle, power_iterate, solve_triplet, Method, SolverConfig,
};
use krlab_core::ergodic::{
    conservation_check, detect_period, fit_decay_rate, simulate_rescaled,
};
use krlab_core::error::Error;
use krlab_core::grid::DualVec;
use krlab_core::harris::{certify_doblin, certify_harris, certify_isolation};
use krlab_core::report::{write_csv, Report};
use krlab_core::semigroup::{step_semigroup, StepOptions};
use krlab_core::PositiveGenerator;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "krlab", about = "positive-semigroup spectral laboratory", version)]
struct Cli {
    /// Path to the run configuration (key = value sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized initial states.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Suppress the report echo on stdout.
    #[arg(long, global = true, default_value_t = false)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the generator and report its structural data.
    Build,
    /// Compute the principal eigentriplet (per resolution) and geometry checks.
    Eig,
    /// Compute a Doeblin/Harris/isolation certificate.
    Certify,
    /// Simulate the rescaled semigroup; fit rates and periods.
    Simulate,
    /// Dense-spectrum comparison against the iterative solver.
    Oracle,
    /// Re-run a subcommand over a swept parameter.
    Sweep,
}

const EXIT_SOLVER: u8 = 2;
const EXIT_GEOMETRY: u8 = 3;
const EXIT_CERTIFICATE: u8 = 4;
const EXIT_CONFIG: u8 = 5;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Io(_) | Error::InvalidModel(_) | Error::InvalidGrid(_) => {
            EXIT_CONFIG
        }
        Error::MinorizationFailed(_)
        | Error::CertificateFailed(_)
        | Error::ContractionNotStrict { .. }
        | Error::CompatibilityFailed { .. } => EXIT_CERTIFICATE,
        Error::DualMismatch { .. } => EXIT_GEOMETRY,
        _ => EXIT_SOLVER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let cfg = RunConfig::load(config_path)?;
    std::fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Build => cmd_build(cli, &cfg),
        Command::Eig => cmd_eig(cli, &cfg),
        Command::Certify => cmd_certify(cli, &cfg),
        Command::Simulate => cmd_simulate(cli, &cfg),
        Command::Oracle => cmd_oracle(cli, &cfg),
        Command::Sweep => cmd_sweep(cli, &cfg),
    }
}

fn solver_config(cfg: &RunConfig) -> Result<(SolverConfig, Method), Error> {
    let mut sc = SolverConfig::default();
    let mut method = Method::Auto;
    if let Some(s) = cfg.section("solver") {
        sc.tol = s.f64_or("tol", sc.tol)?;
        sc.max_iter = s.usize_or("max_iter", sc.max_iter)?;
        sc.dense_cap = s.usize_or("dense_cap", sc.dense_cap)?;
        sc.shift_margin = s.f64_or("shift_margin", sc.shift_margin)?;
        if let Some(t) = s.get("t_step") {
            if t != "auto" {
                sc.t_step = Some(t.parse::<f64>().map_err(|_| {
                    Error::Config("t_step must be a number or 'auto'".into())
                })?);
            }
        }
        method = Method::parse(&s.string_or("method", "auto"))?;
    }
    Ok((sc, method))
}

fn emit(cli: &Cli, name: &str, report: &Report) -> Result<(), Error> {
    let path = cli.out.join(format!("{name}.report"));
    report.write_to(&path)?;
    if !cli.quiet {
        print!("{}", report.render());
    }
    Ok(())
}

fn describe(report: &mut Report, gen: &PositiveGenerator) {
    report.push_str("model", gen.model_tag());
    report.push_usize("n", gen.n());
    report.push_bool("metzler", gen.is_metzler());
    report.push_f64("c_unif", gen.c_unif());
    report.push_f64("growth_bound", gen.growth_bound());
    report.push_usize("grid.dim", gen.grid().dim());
}

fn cmd_build(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let gen = cfg.build_generator(None, None)?;
    let mut report = Report::new();
    describe(&mut report, &gen);
    emit(cli, "build", &report)?;
    Ok(0)
}

fn cmd_eig(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let (sc, method) = solver_config(cfg)?;
    let resolutions = cfg.resolutions()?;
    let mut rows = Vec::new();
    let mut report = Report::new();
    let mut geometry_failed = false;
    let multi = resolutions.len() > 1;
    for (idx, n) in resolutions.iter().enumerate() {
        let gen = cfg.build_generator(Some(*n), None)?;
        let triplet = solve_triplet(&gen, &sc, method)?;
        let prefix = if multi {
            format!("res{idx}.")
        } else {
            String::new()
        };
        report.push_usize(&format!("{prefix}n"), gen.n());
        report.push_f64(&format!("{prefix}lambda1"), triplet.lambda1);
        report.push_f64(&format!("{prefix}primal_residual"), triplet.primal_residual);
        report.push_f64(&format!("{prefix}dual_residual"), triplet.dual_residual);
        report.push_usize(&format!("{prefix}iterations"), triplet.iterations);
        rows.push(vec![
            gen.n() as f64,
            triplet.lambda1,
            triplet.primal_residual,
            triplet.dual_residual,
        ]);
        // geometry checks on instances small enough for the dense oracle
        if gen.n() <= sc.dense_cap {
            let spectrum = dense_spectrum_oracle(&gen, None, sc.dense_cap)?;
            let geo = check_geometry(&triplet, &spectrum, sc.tol);
            report.push_bool(&format!("{prefix}geometry.pass"), geo.pass());
            report.push_f64(&format!("{prefix}geometry.min_f1"), geo.min_f1);
            report.push_f64(&format!("{prefix}geometry.min_phi1"), geo.min_phi1);
            report.push_bool(&format!("{prefix}geometry.simple"), geo.simple);
            report.push_f64(&format!("{prefix}geometry.duality_gap"), geo.duality_gap);
            for (k, v) in geo.violations.iter().enumerate() {
                report.push_str(&format!("{prefix}geometry.violation.{k}"), v);
            }
            if !geo.pass() {
                geometry_failed = true;
            }
        }
    }
    write_csv(
        &cli.out.join("eig.csv"),
        &["n", "lambda1", "primal_residual", "dual_residual"],
        &rows,
    )?;
    emit(cli, "eig", &report)?;
    Ok(if geometry_failed { EXIT_GEOMETRY } else { 0 })
}

type CertifyParams = (f64, f64, Option<Vec<f64>>, String, Option<f64>);

fn certify_params(cfg: &RunConfig) -> Result<CertifyParams, Error> {
    let params = match cfg.section("certify") {
        Some(s) => {
            let t = s.f64_or("t", 1.0)?;
            let gl = s.f64_or("target_gamma_l", 0.5)?;
            let sweep = match (s.get("a_min"), s.get("a_max")) {
                (Some(lo), Some(hi)) => {
                    let lo: f64 = lo.parse().map_err(|_| Error::Config("bad a_min".into()))?;
                    let hi: f64 = hi.parse().map_err(|_| Error::Config("bad a_max".into()))?;
                    let steps = s.usize_or("a_steps", 20)?;
                    Some(
                        (0..steps)
                            .map(|k| lo * (hi / lo).powf(k as f64 / (steps - 1).max(1) as f64))
                            .collect(),
                    )
                }
                _ => None,
            };
            let mode = s.string_or("mode", "harris");
            let probe = match s.get("lambda_probe") {
                Some(v) if v != "auto" => Some(
                    v.parse::<f64>()
                        .map_err(|_| Error::Config("bad lambda_probe".into()))?,
                ),
                _ => None,
            };
            (t, gl, sweep, mode, probe)
        }
        None => (1.0, 0.5, None, "harris".to_string(), None),
    };
    Ok(params)
}

fn cmd_certify(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let (sc, method) = solver_config(cfg)?;
    let gen = cfg.build_generator(None, None)?;
    let triplet = solve_triplet(&gen, &sc, method)?;
    let (t, gl, sweep, mode, probe) = certify_params(cfg)?;
    let mut report = Report::new();
    describe(&mut report, &gen);
    report.push_f64("lambda1", triplet.lambda1);
    match mode.as_str() {
        "doblin" => {
            // optional transported witness psi0 = int_0^{t0} S*_tau 1 dtau
            let psi0 = match cfg.section("certify").and_then(|s| s.get("psi0")) {
                Some(spec) if spec.starts_with("transported:") => {
                    let t0: f64 = spec["transported:".len()..]
                        .parse()
                        .map_err(|_| Error::Config("bad psi0 spec".into()))?;
                    Some(transported_psi0(&gen, t0)?)
                }
                Some(spec) if spec == "ones" => None,
                Some(other) => {
                    return Err(Error::Config(format!("unknown psi0 spec '{other}'")))
                }
                None => None,
            };
            let witness = certify_doblin(&gen, &triplet, t, psi0)?;
            report.push_str("certificate", "doblin");
            report.push_f64("t_horizon", witness.t_horizon);
            report.push_f64("gamma", witness.gamma);
            report.push_f64("r0_bound", witness.r0_bound);
            report.push_f64("r0_pairing", witness.r0_pairing);
        }
        "harris" => {
            let cert = certify_harris(&gen, &triplet, t, gl, sweep)?;
            report.push_str("certificate", "harris");
            report.push_f64("t_horizon", cert.t_horizon);
            report.push_f64("gamma_l", cert.gamma_l);
            report.push_f64("k_const", cert.k_const);
            report.push_f64("a_cone", cert.a_cone);
            report.push_f64("gamma_h", cert.gamma_h);
            report.push_f64("r_a", cert.r_a);
            report.push_f64("mu_plus", cert.mu_plus);
            report.push_f64("mu_minus", cert.mu_minus);
            report.push_f64("alpha", cert.alpha);
            report.push_f64("rate_per_time", cert.rate_per_time);
        }
        "isolation" => {
            let lambda_probe = probe
                .unwrap_or_else(|| triplet.lambda1 + 0.1 * (1.0 + triplet.lambda1.abs()));
            let iso = certify_isolation(&gen, &triplet, lambda_probe, gl, sweep)?;
            report.push_str("certificate", "isolation");
            report.push_f64("lambda_probe", iso.lambda_probe);
            report.push_f64("alpha_res", iso.alpha_res);
            report.push_f64("epsilon", iso.epsilon);
            if gen.n() <= sc.dense_cap {
                let spectrum = dense_spectrum_oracle(&gen, None, sc.dense_cap)?;
                let intruders = spectrum
                    .eigenvalues
                    .iter()
                    .filter(|z| {
                        let d = (*z - nalgebra::Complex::new(triplet.lambda1, 0.0)).norm();
                        d < iso.epsilon && d > 1e-7 * (1.0 + triplet.lambda1.abs())
                    })
                    .count();
                report.push_usize("oracle.intruders_in_ball", intruders);
                report.push_check("isolation", intruders as f64, 0.0, intruders == 0);
            }
        }
        other => return Err(Error::Config(format!("unknown certify mode '{other}'"))),
    }
    emit(cli, "certify", &report)?;
    Ok(0)
}

/// psi_0 = int_0^{t0} S*_tau 1 dtau by trapezoid on adjoint steps.
fn transported_psi0(gen: &PositiveGenerator, t0: f64) -> Result<DualVec, Error> {
    let adj = gen.adjoint();
    let steps = 32usize;
    let dt = t0 / steps as f64;
    let mut phi = DVector::from_element(gen.n(), 1.0);
    let mut acc = &phi * 0.5;
    for _ in 0..steps {
        phi = step_semigroup(&adj, &phi, dt, 1, StepOptions::default())?;
        acc += &phi;
    }
    acc -= &phi * 0.5;
    Ok(acc * dt)
}

fn initial_state(
    cli: &Cli,
    cfg: &RunConfig,
    gen: &PositiveGenerator,
    triplet: &krlab_core::eigen::Eigentriplet,
) -> Result<DVector<f64>, Error> {
    let spec = cfg
        .section("simulate")
        .and_then(|s| s.get("f0"))
        .unwrap_or_else(|| "uniform".to_string());
    let n = gen.n();
    if spec == "f1" {
        return Ok(triplet.f1.clone());
    }
    if spec == "uniform" {
        return Ok(DVector::from_element(n, 1.0));
    }
    if spec == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        return Ok(DVector::from_iterator(
            n,
            (0..n).map(|_| rng.random_range(0.0..1.0)),
        ));
    }
    if let Some(rest) = spec.strip_prefix("delta:") {
        let j: usize = rest
            .parse()
            .map_err(|_| Error::Config(format!("bad delta index '{rest}'")))?;
        if j >= n {
            return Err(Error::Config(format!("delta index {j} out of range")));
        }
        let mut f = DVector::zeros(n);
        f[j] = 1.0 / gen.grid().quad_weights()[j];
        return Ok(f);
    }
    if let Some(rest) = spec.strip_prefix("gaussian:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 || gen.grid().dim() != 1 {
            return Err(Error::Config("gaussian:center,width needs a 1-D grid".into()));
        }
        let center: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Config("bad gaussian center".into()))?;
        let width: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Config("bad gaussian width".into()))?;
        let nodes = gen.grid().nodes();
        return Ok(DVector::from_iterator(
            n,
            nodes.iter().map(|&x| (-((x - center) / width).powi(2)).exp()),
        ));
    }
    Err(Error::Config(format!("unknown f0 preset '{spec}'")))
}

fn observables(cfg: &RunConfig, gen: &PositiveGenerator) -> Result<Vec<DualVec>, Error> {
    let spec = cfg
        .section("simulate")
        .and_then(|s| s.get("observables"))
        .unwrap_or_else(|| "mass".to_string());
    let n = gen.n();
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item == "mass" {
            out.push(DVector::from_element(n, 1.0));
        } else if let Some(rest) = item.strip_prefix("node:") {
            let j: usize = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad node index '{rest}'")))?;
            if j >= n {
                return Err(Error::Config(format!("node index {j} out of range")));
            }
            let mut psi = DVector::zeros(n);
            psi[j] = 1.0;
            out.push(psi);
        } else if let Some(rest) = item.strip_prefix("window:") {
            let bounds: Vec<f64> = rest
                .split("..")
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Config(format!("bad window '{rest}'")))?;
            if bounds.len() != 2 || gen.grid().dim() != 1 {
                return Err(Error::Config("window:lo..hi needs a 1-D grid".into()));
            }
            let nodes = gen.grid().nodes();
            out.push(DVector::from_iterator(
                n,
                nodes
                    .iter()
                    .map(|&x| if x >= bounds[0] && x <= bounds[1] { 1.0 } else { 0.0 }),
            ));
        } else {
            return Err(Error::Config(format!("unknown observable '{item}'")));
        }
    }
    Ok(out)
}

fn cmd_simulate(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let (sc, method) = solver_config(cfg)?;
    let gen = cfg.build_generator(None, None)?;
    let triplet = solve_triplet(&gen, &sc, method)?;
    let sim = cfg
        .section("simulate")
        .ok_or_else(|| Error::Config("missing [simulate] section".into()))?;
    let t_end = sim.f64("t_end", "simulate")?;
    let dt = sim.f64("dt", "simulate")?;
    let f0 = initial_state(cli, cfg, &gen, &triplet)?;
    let obs = observables(cfg, &gen)?;
    let traj = simulate_rescaled(&gen, &triplet, &f0, t_end, dt, &obs)?;

    let mut report = Report::new();
    describe(&mut report, &gen);
    report.push_f64("lambda1", triplet.lambda1);
    report.push_f64("conservation_drift", conservation_check(&traj));

    let window = match sim.get("fit_window") {
        Some(v) => {
            let parts: Vec<f64> = v
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Config("bad fit_window".into()))?;
            if parts.len() != 2 {
                return Err(Error::Config("fit_window needs lo,hi fractions".into()));
            }
            (parts[0] * t_end, parts[1] * t_end)
        }
        None => (0.5 * t_end, t_end),
    };
    match fit_decay_rate(&traj, window) {
        Ok(fit) => {
            report.push_f64("rate.fit", fit.rate);
            report.push_f64("rate.prefactor", fit.prefactor);
            report.push_f64("rate.r2", fit.r2);
            report.push_bool("rate.saturated", fit.saturated);
        }
        Err(e) => report.push_str("rate.error", format!("{e}")),
    }
    if !traj.observables.is_empty() {
        match detect_period(&traj, 0, 1e-4) {
            Ok(p) => {
                report.push_f64("period.fft", p.period);
                report.push_f64("period.zero_crossing", p.period_zero_crossing);
                report.push_f64("period.uncertainty", p.uncertainty);
            }
            Err(e) => report.push_str("period.error", format!("{e}")),
        }
    }

    // trajectory CSV: time, error_norm, conservation, observable_k...
    let mut headers = vec![
        "time".to_string(),
        "error_norm".to_string(),
        "conservation".to_string(),
    ];
    for k in 0..traj.observables.len() {
        headers.push(format!("observable_{k}"));
    }
    let header_refs: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<f64>> = (0..traj.times.len())
        .map(|i| {
            let mut row = vec![traj.times[i], traj.error_norms[i], traj.conservation[i]];
            for series in &traj.observables {
                row.push(series[i]);
            }
            row
        })
        .collect();
    write_csv(&cli.out.join("trajectory.csv"), &header_refs, &rows)?;
    emit(cli, "simulate", &report)?;
    Ok(0)
}

fn cmd_oracle(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let (sc, _) = solver_config(cfg)?;
    let gen = cfg.build_generator(None, None)?;
    let spectrum = dense_spectrum_oracle(&gen, None, sc.dense_cap)?;
    let (lambda_power, f_power, iters) = power_iterate(&gen, &sc)?;
    let f_dense = krlab_core::eigen::principal_vector(&gen, spectrum.lambda1)?;
    let cos = f_power.dot(&f_dense).abs() / (f_power.norm() * f_dense.norm());
    let gap = (lambda_power - spectrum.lambda1).abs();
    let tol = 1e-8 * (1.0 + spectrum.lambda1.abs());

    let mut report = Report::new();
    describe(&mut report, &gen);
    report.push_f64("lambda1.power", lambda_power);
    report.push_f64("lambda1.dense", spectrum.lambda1);
    report.push_usize("power.iterations", iters);
    report.push_f64("spectrum.gap", spectrum.gap);
    report.push_usize("spectrum.boundary_count", spectrum.boundary_set.len());
    report.push_bool("spectrum.simple", spectrum.simple);
    report.push_f64("eigvec.cosine", cos);
    report.push_check("oracle_agreement", gap, tol, gap <= tol);
    for (k, z) in spectrum.eigenvalues.iter().take(8).enumerate() {
        report.push_f64(&format!("spectrum.re.{k}"), z.re);
        report.push_f64(&format!("spectrum.im.{k}"), z.im);
    }
    emit(cli, "oracle", &report)?;
    Ok(0)
}

fn cmd_sweep(cli: &Cli, cfg: &RunConfig) -> Result<u8, Error> {
    let sweep = cfg
        .section("sweep")
        .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let param = sweep.require("param", "sweep")?;
    let values = sweep
        .f64_list("values")?
        .ok_or_else(|| Error::Config("missing 'values' in [sweep]".into()))?;
    let command = sweep.string_or("command", "eig");
    let (sc, method) = solver_config(cfg)?;
    let mut rows = Vec::new();
    let mut report = Report::new();
    report.push_str("sweep.param", &param);
    for (idx, &value) in values.iter().enumerate() {
        let (n_over, eps_over) = match param.as_str() {
            "n" | "n_axis" => (Some(value as usize), None),
            "epsilon" => (None, Some(value)),
            other => return Err(Error::Config(format!("unknown sweep param '{other}'"))),
        };
        let gen = cfg.build_generator(n_over, eps_over)?;
        let triplet = solve_triplet(&gen, &sc, method)?;
        match command.as_str() {
            "eig" => {
                report.push_f64(&format!("sweep.{idx}.value"), value);
                report.push_f64(&format!("sweep.{idx}.lambda1"), triplet.lambda1);
                rows.push(vec![value, triplet.lambda1, triplet.primal_residual]);
            }
            "certify" => {
                let (t, gl, a_sweep, _, _) = certify_params(cfg)?;
                match certify_harris(&gen, &triplet, t, gl, a_sweep) {
                    Ok(cert) => {
                        report.push_f64(&format!("sweep.{idx}.value"), value);
                        report.push_f64(&format!("sweep.{idx}.alpha"), cert.alpha);
                        rows.push(vec![value, cert.alpha, cert.rate_per_time]);
                    }
                    Err(e) => {
                        report.push_str(&format!("sweep.{idx}.error"), format!("{e}"));
                        rows.push(vec![value, f64::NAN, f64::NAN]);
                    }
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "sweep command must be eig or certify, got '{other}'"
                )))
            }
        }
    }
    write_csv(
        &cli.out.join("sweep.csv"),
        &["value", "result", "extra"],
        &rows,
    )?;
    emit(cli, "sweep", &report)?;
    Ok(0)
}
