//! Command-line driver for the Λ-system EIT noise simulator.
//!
//! Subcommands map one-to-one onto the standard scans: `spectrum` scans
//! absorption/dispersion against probe detuning, `groupvel` tracks the
//! slow-light group velocity (against detuning or noise strength), `contour`
//! maps absorption over the (Ω_c, f₀²) plane, `mc-validate` cross-checks the
//! noise-averaged equations against a stochastic ensemble, and
//! `dump-generator` prints the 9×9 real generator for inspection.
//!
//! Exit codes: 0 success (or verified PASS), 1 configuration/validation
//! error, 2 solver failure, 3 Monte-Carlo FAIL, 4 Monte-Carlo INCONCLUSIVE.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eit_core::{
    alpha_reference, build_averaged_generator, contour_grid, dip_metrics, optical_response,
    run_sweep, validate_params, vectorize, Axis, AxisParam, DerivativeMethod, EitError,
    GammaConvention, MediumParams, SweepSpec, Verdict,
};
use serde_json::json;

use config::{GridRange, RunConfig};
use output::{pretty, Sink};

#[derive(Parser)]
#[command(
    name = "eit-cli",
    version,
    about = "Three-level EIT with white dephasing noise: spectra, group velocities, contour grids and Monte-Carlo validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file with flat keys; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the data artifact here instead of stdout (summary then goes to
    /// stdout instead of stderr).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Noise strength f0^2 in Γ units.
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    f0sq: Option<f64>,

    /// Detuning grid as min:max:n (Γ units).
    #[arg(long, global = true, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
    delta_range: Option<GridRange>,

    /// Reading of the quoted Γ: "rad" (rad/s) or "2pi" (×2π rad/s).
    #[arg(long, global = true, value_parser = ["rad", "2pi"])]
    gamma_convention: Option<String>,

    /// Worker threads for grid sweeps and ensembles (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Base RNG seed for Monte-Carlo trajectories.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Absorption and dispersion against probe detuning.
    Spectrum,
    /// Group velocity against detuning, or against f0^2 with --f0sq-range.
    Groupvel {
        /// Scan noise strength instead of detuning: min:max:n.
        #[arg(long, value_name = "MIN:MAX:N")]
        f0sq_range: Option<GridRange>,
    },
    /// Absorption over the (omega_c, f0sq) plane at fixed detuning.
    Contour {
        /// Coupling grid as min:max:n (Γ units).
        #[arg(long, value_name = "MIN:MAX:N")]
        omega_c_range: Option<GridRange>,
        /// Noise grid as min:max:n (Γ units).
        #[arg(long, value_name = "MIN:MAX:N")]
        f0sq_range: Option<GridRange>,
    },
    /// Ensemble-average the stochastic equations and compare against the
    /// noise-averaged generator (exit 0 PASS, 3 FAIL, 4 INCONCLUSIVE).
    McValidate {
        /// Number of stochastic trajectories.
        #[arg(long, value_name = "N")]
        n_traj: Option<usize>,
        /// Ensemble horizon in 1/Γ units.
        #[arg(long, value_name = "T")]
        t_final: Option<f64>,
        /// Integrator step in 1/Γ units.
        #[arg(long, value_name = "DT")]
        dt: Option<f64>,
    },
    /// Print the 9x9 noise-averaged generator at the configured parameters.
    DumpGenerator,
}

/// A run abort: exit code plus the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<EitError> for Failure {
    fn from(e: EitError) -> Self {
        let code = match &e {
            EitError::InvalidParams(_)
            | EitError::InvalidSweep(_)
            | EitError::UnknownParameter(_) => 1,
            EitError::SingularSystem { .. }
            | EitError::Unstable { .. }
            | EitError::VanishingDenominator { .. } => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_err(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(config_err)?,
        None => RunConfig::default(),
    };

    // Flags override the file.
    if let Some(v) = cli.f0sq {
        cfg.f0sq = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.format {
        cfg.format = v.clone();
    }
    if let Some(v) = &cli.gamma_convention {
        cfg.gamma_convention = v.clone();
    }
    if let Some(r) = cli.delta_range {
        (cfg.delta_min, cfg.delta_max, cfg.delta_points) = (r.min, r.max, r.n);
    }
    if let Some(p) = &cli.out {
        cfg.out = Some(p.clone());
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    match &cli.command {
        Command::Groupvel { f0sq_range: Some(r) } => {
            (cfg.f0sq_min, cfg.f0sq_max, cfg.f0sq_points) = (r.min, r.max, r.n);
            cfg.groupvel_axis = "f0sq".to_string();
        }
        Command::Contour { omega_c_range, f0sq_range } => {
            if let Some(r) = omega_c_range {
                (cfg.omega_c_min, cfg.omega_c_max, cfg.omega_c_points) = (r.min, r.max, r.n);
            }
            if let Some(r) = f0sq_range {
                (cfg.f0sq_min, cfg.f0sq_max, cfg.f0sq_points) = (r.min, r.max, r.n);
            }
        }
        Command::McValidate { n_traj, t_final, dt } => {
            if let Some(n) = n_traj {
                cfg.n_traj = *n;
            }
            if let Some(t) = t_final {
                cfg.t_final = *t;
            }
            if let Some(dt) = dt {
                cfg.dt = *dt;
            }
        }
        _ => {}
    }
    cfg.check().map_err(config_err)?;

    let dispatch = || match &cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Groupvel { .. } => cmd_groupvel(&cfg),
        Command::Contour { .. } => cmd_contour(&cfg),
        Command::McValidate { .. } => cmd_mc_validate(&cfg),
        Command::DumpGenerator => cmd_dump_generator(&cfg),
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| config_err(format!("cannot build thread pool: {e}")))?
            .install(dispatch),
        None => dispatch(),
    }
}

/// Strict parameter/medium validation shared by every command that solves for
/// observables: field-named messages, exit 1.
fn validate_system(cfg: &RunConfig) -> Result<MediumParams, Failure> {
    let report = validate_params(&cfg.system());
    if !report.is_valid() {
        return Err(EitError::InvalidParams(report).into());
    }
    let medium = cfg.medium().map_err(config_err)?;
    let report = medium.validate();
    if !report.is_valid() {
        return Err(EitError::InvalidParams(report).into());
    }
    Ok(medium)
}

/// Echo plus the reference absorption α(Δ = 3Γ, f₀² = 0) used to express
/// spectra in arbitrary units.
fn echo_with_reference(
    cfg: &RunConfig,
    command: &str,
    medium: &MediumParams,
) -> Result<serde_json::Map<String, serde_json::Value>, Failure> {
    let mut echo = cfg.echo(command);
    let reference = alpha_reference(&cfg.system(), medium)?;
    echo.insert("alpha_reference".to_string(), reference.into());
    Ok(echo)
}

fn render_records(
    cfg: &RunConfig,
    echo: &serde_json::Map<String, serde_json::Value>,
    records: &[eit_core::SpectrumRecord],
) -> String {
    if cfg.format == "json" {
        output::records_json(echo, records)
    } else {
        output::records_csv(echo, records)
    }
}

/// Failed grid points are carried in-band as flagged records; the run only
/// aborts (exit 2) when nothing at all could be solved.
fn failure_note(records: &[eit_core::SpectrumRecord]) -> Result<Option<String>, Failure> {
    let failed: Vec<&eit_core::SpectrumRecord> =
        records.iter().filter(|r| r.error.is_some()).collect();
    if failed.is_empty() {
        return Ok(None);
    }
    let first = failed[0].error.clone().unwrap_or_default();
    if failed.len() == records.len() {
        return Err(Failure {
            code: 2,
            message: format!("all {} grid points failed; first error: {first}", failed.len()),
        });
    }
    Ok(Some(format!(
        "{} of {} grid points failed and carry nan cells; first error: {first}",
        failed.len(),
        records.len()
    )))
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<u8, Failure> {
    let medium = validate_system(cfg)?;
    let spec = SweepSpec {
        axis1: Axis::new(AxisParam::Delta, cfg.delta_min, cfg.delta_max, cfg.delta_points),
        axis2: None,
        fixed: cfg.system(),
        medium,
    };
    let records = run_sweep(&spec)?;
    let note = failure_note(&records)?;

    let echo = echo_with_reference(cfg, "spectrum", &medium)?;
    let sink = Sink::new(cfg.out.clone());
    sink.write_data(&render_records(cfg, &echo, &records))
        .map_err(config_err)?;

    if let Some(note) = note {
        sink.summary(&format!("warning: {note}"));
    }
    let center = records
        .iter()
        .min_by(|a, b| a.delta.abs().partial_cmp(&b.delta.abs()).unwrap())
        .expect("non-empty sweep");
    match dip_metrics(&records) {
        Some(dip) => sink.summary(&format!(
            "alpha(Delta={}) = {} 1/m; dip depth = {} 1/m; dip FWHD = {} Gamma",
            pretty(center.delta),
            pretty(center.alpha),
            pretty(dip.depth),
            pretty(dip.fwhd),
        )),
        None => sink.summary(&format!(
            "alpha(Delta={}) = {} 1/m; no transparency dip bracketed on this grid",
            pretty(center.delta),
            pretty(center.alpha),
        )),
    }
    Ok(0)
}

fn cmd_groupvel(cfg: &RunConfig) -> Result<u8, Failure> {
    let medium = validate_system(cfg)?;

    // V_g at line center under both readings of "Γ = 5 MHz"; solver failures
    // here abort with exit 2, but the superluminal/singular dispersion regime
    // is reported in-line rather than treated as an error.
    let mut center_lines = Vec::new();
    for convention in [GammaConvention::RadPerSec, GammaConvention::TwoPiHz] {
        let m = MediumParams {
            number_density: cfg.number_density,
            lambda0: cfg.lambda0,
            gamma_hz: convention.to_rad_per_s(cfg.gamma_quoted_hz),
        };
        let params = cfg.system().with_delta(0.0);
        let text = match optical_response(&params, &m, DerivativeMethod::default()) {
            Ok(r) => format!("{} m/s", pretty(r.v_g)),
            Err(EitError::VanishingDenominator { .. }) => "n/a (vanishing denominator)".into(),
            Err(e) => return Err(e.into()),
        };
        center_lines.push(format!("{text} ({} convention)", convention.label()));
    }

    let axis = if cfg.groupvel_axis == "f0sq" {
        Axis::new(AxisParam::F0Sq, cfg.f0sq_min, cfg.f0sq_max, cfg.f0sq_points)
    } else {
        Axis::new(AxisParam::Delta, cfg.delta_min, cfg.delta_max, cfg.delta_points)
    };
    let spec = SweepSpec { axis1: axis, axis2: None, fixed: cfg.system(), medium };
    let records = run_sweep(&spec)?;
    let note = failure_note(&records)?;

    let echo = echo_with_reference(cfg, "groupvel", &medium)?;
    let sink = Sink::new(cfg.out.clone());
    sink.write_data(&render_records(cfg, &echo, &records))
        .map_err(config_err)?;
    if let Some(note) = note {
        sink.summary(&format!("warning: {note}"));
    }
    sink.summary(&format!("V_g(Delta=0) = {}; {}", center_lines[0], center_lines[1]));
    Ok(0)
}

fn cmd_contour(cfg: &RunConfig) -> Result<u8, Failure> {
    let medium = validate_system(cfg)?;
    let spec = SweepSpec {
        axis1: Axis::new(AxisParam::OmegaC, cfg.omega_c_min, cfg.omega_c_max, cfg.omega_c_points),
        axis2: Some(Axis::new(AxisParam::F0Sq, cfg.f0sq_min, cfg.f0sq_max, cfg.f0sq_points)),
        fixed: cfg.system(),
        medium,
    };
    let grid = contour_grid(&spec)?;

    let cells = grid.alpha.iter().flatten().copied();
    let n_failed = cells.clone().filter(|a| !a.is_finite()).count();
    let finite = cells.filter(|a| a.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);

    let echo = echo_with_reference(cfg, "contour", &medium)?;
    let sink = Sink::new(cfg.out.clone());
    let text = if cfg.format == "json" {
        output::contour_json(&echo, &grid)
    } else {
        output::contour_csv(&echo, &grid)
    };
    sink.write_data(&text).map_err(config_err)?;
    if n_failed > 0 {
        sink.summary(&format!("warning: {n_failed} grid cells failed and carry nan"));
    }
    sink.summary(&format!(
        "contour {} x {} (omega_c x f0sq); alpha in [{}, {}] 1/m",
        grid.omega_c.len(),
        grid.f0sq.len(),
        pretty(lo),
        pretty(hi),
    ));
    Ok(0)
}

fn cmd_mc_validate(cfg: &RunConfig) -> Result<u8, Failure> {
    validate_system(cfg)?;
    let report =
        eit_core::validate_novikov(&cfg.system(), cfg.n_traj, cfg.t_final, cfg.dt, cfg.seed)?;

    let echo = cfg.echo("mc-validate");
    let sink = Sink::new(cfg.out.clone());
    let deviations: Vec<f64> = report.deviations.iter().copied().collect();
    let stderr: Vec<f64> = report.stderr.iter().copied().collect();
    let tolerances: Vec<f64> = report.tolerances.iter().copied().collect();
    let mean: Vec<f64> = vectorize(&report.ensemble.mean_sigma).iter().copied().collect();
    let target: Vec<f64> = vectorize(&report.target).iter().copied().collect();
    let text = if cfg.format == "json" {
        output::keyvals_json(
            &echo,
            json!({
                "verdict": report.verdict.to_string(),
                "summary": report.summary,
                "n_traj": report.ensemble.n_traj,
                "t_final": report.t_final,
                "dt": report.dt,
                "effect_size": report.effect_size,
                "max_deviation": report.max_deviation(),
                "max_stderr": report.max_stderr(),
                "deviations": deviations,
                "stderr": stderr,
                "tolerances": tolerances,
                "ensemble_mean": mean,
                "averaged_target": target,
            }),
        )
    } else {
        let rows = vec![
            ("verdict", report.verdict.to_string()),
            ("summary", format!("{:?}", report.summary)),
            ("n_traj", report.ensemble.n_traj.to_string()),
            ("t_final", output::num(report.t_final)),
            ("dt", output::num(report.dt)),
            ("effect_size", output::num(report.effect_size)),
            ("max_deviation", output::num(report.max_deviation())),
            ("max_stderr", output::num(report.max_stderr())),
        ];
        output::keyvals_csv(&echo, &rows)
    };
    sink.write_data(&text).map_err(config_err)?;
    sink.summary(&format!("verdict: {} — {}", report.verdict, report.summary));
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 3,
        Verdict::Inconclusive => 4,
    })
}

fn cmd_dump_generator(cfg: &RunConfig) -> Result<u8, Failure> {
    // Structural validation only: the pure-dephasing and decay-free limits
    // are exactly the generators worth inspecting.
    let gen = build_averaged_generator(&cfg.system())?;
    const BASIS: [&str; 9] = [
        "p1", "p2", "p3", "re12", "im12", "re13", "im13", "re23", "im23",
    ];

    let echo = cfg.echo("dump-generator");
    let sink = Sink::new(cfg.out.clone());
    let text = if cfg.format == "json" {
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|i| (0..9).map(|j| gen.matrix[(i, j)]).collect())
            .collect();
        serde_json::to_string_pretty(&json!({
            "config": echo,
            "basis": BASIS,
            "matrix": rows,
        }))
        .unwrap()
            + "\n"
    } else {
        let mut s = String::new();
        for (key, value) in &echo {
            s.push_str(&format!("# {key} = {value}\n"));
        }
        s.push_str(&format!("row\\col,{}\n", BASIS.join(",")));
        for i in 0..9 {
            let cells: Vec<String> = (0..9).map(|j| output::num(gen.matrix[(i, j)])).collect();
            s.push_str(&format!("{},{}\n", BASIS[i], cells.join(",")));
        }
        s
    };
    sink.write_data(&text).map_err(config_err)?;
    sink.summary(&format!(
        "9x9 generator in the (p1,p2,p3,re12,im12,re13,im13,re23,im23) basis; trace-annihilation residual = {:.2e}",
        gen.trace_annihilation_error()
    ));
    Ok(0)
}
