//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 inadmissible `(p, N)` (decision
//! JSON on stderr), 3 verification failure.

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::admissibility::{
    admissible_body_counts, is_admissible, is_admissible_restricted, AdmissibilityDecision,
};
use crate::coefficients::{
    det_mt, residual, restricted_from_mass_charge, solve_couplings, solve_restricted,
    CouplingVector, RESIDUAL_TOL,
};
use crate::collisions::has_collision;
use crate::constants::{
    closed_form_constants, drift_report, inertia_rate, measure, potential_from_parts,
    potential_parts, ConservedReport,
};
use crate::dynamics::{build_interaction, rk4_integrate, spectral_propagate};
use crate::error::ChoreoError;
use crate::kinematics::{
    eom_residual, initial_state, period_grid, sample_trajectory_with, state_at, ChoreoConfig,
    CurveParams, Endpoint, SystemState, Trajectory,
};
use crate::report::{self, to_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "limacon",
    version,
    about = "Choreographies on p-limaçons under harmonic forces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether (p, N) admits a choreography.
    Admissible(AdmissibleArgs),
    /// Solve for the couplings κ₁ … κ_⌊N/2⌋.
    Coeffs(CoeffsArgs),
    /// Solve the alternating (κ_o, κ_e) system.
    Restricted(RestrictedArgs),
    /// Emit a trajectory.
    Simulate(SimulateArgs),
    /// Run the full verification pipeline.
    Verify(VerifyArgs),
    /// Collision analysis.
    Collide(CollideArgs),
    /// Conserved quantities and their closed forms.
    Constants(ConstantsArgs),
    /// List admissible N for a given p.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct PairArgs {
    #[arg(long = "N", allow_hyphen_values = true)]
    n: i64,
    #[arg(long, allow_hyphen_values = true)]
    p: i64,
}

#[derive(Args, Debug, Clone, Copy)]
struct CurveArgs {
    #[arg(long, default_value_t = 1.2, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Engine {
    Analytic,
    Rk4,
    Spectral,
}

#[derive(Args, Debug)]
struct AdmissibleArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Use the alternating-coupling conditions.
    #[arg(long)]
    restricted: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// κ₃ … κ_⌊N/2⌋, comma separated. Defaults to zeros.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tail: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RestrictedArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Also report the couplings induced by these masses and charges.
    #[arg(long, allow_hyphen_values = true, requires = "charge")]
    mass: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "mass")]
    charge: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tail: Vec<f64>,
    #[arg(long, default_value_t = TAU / 8192.0)]
    dt: f64,
    #[arg(long, default_value_t = 8192)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Engine::Rk4)]
    engine: Engine,
    /// Keep every n-th sample.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tail: Vec<f64>,
    #[arg(long, default_value_t = TAU / 8192.0)]
    dt: f64,
    #[arg(long, default_value_t = 8192)]
    steps: usize,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = RESIDUAL_TOL)]
    tol_residual: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_rk4: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_spectral: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_drift: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_saari: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CollideArgs {
    #[arg(long = "N", allow_hyphen_values = true)]
    n: i64,
    #[arg(long, allow_hyphen_values = true)]
    p: i64,
    #[command(flatten)]
    curve: CurveArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tail: Vec<f64>,
    /// Time at which the measured values are taken.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Samples over one period for the drift report.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: i64,
    #[arg(long = "max-N")]
    max_n: u64,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Inadmissible(AdmissibilityDecision),
    Io(io::Error),
}

impl From<ChoreoError> for Failure {
    fn from(e: ChoreoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Parse `argv` (program name first) and run, writing to the given streams.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Inadmissible(d)) => {
            let _ = write!(stderr, "{}", to_json(&report::decision_json(&d)));
            EXIT_INADMISSIBLE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Outcome {
    match command {
        Command::Admissible(a) => cmd_admissible(a, stdout),
        Command::Coeffs(a) => cmd_coeffs(a, stdout),
        Command::Restricted(a) => cmd_restricted(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Collide(a) => cmd_collide(a, stdout),
        Command::Constants(a) => cmd_constants(a, stdout),
        Command::Scan(a) => cmd_scan(a, stdout),
    }
}

fn emit(output: &OutputArgs, stdout: &mut dyn Write, text: &str) -> io::Result<()> {
    match &output.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(text.as_bytes())?;
            f.flush()
        }
        None => stdout.write_all(text.as_bytes()),
    }
}

fn json_only(output: &OutputArgs) -> Result<(), Failure> {
    match output.format {
        Some(Format::Csv) => Err(Failure::Usage("this command only writes JSON".into())),
        _ => Ok(()),
    }
}

fn admissible_pair(pair: PairArgs) -> Result<usize, Failure> {
    let d = is_admissible(pair.p, pair.n);
    if !d.admissible {
        return Err(Failure::Inadmissible(d));
    }
    Ok(pair.n as usize)
}

fn couplings_for(n: usize, p: i64, tail: &[f64]) -> Result<CouplingVector, Failure> {
    let free = n / 2 - 2;
    let tail = if tail.is_empty() {
        vec![0.0; free]
    } else {
        tail.to_vec()
    };
    if tail.len() != free {
        return Err(Failure::Usage(format!(
            "--tail needs {free} values for N = {n}, got {}",
            tail.len()
        )));
    }
    Ok(solve_couplings(n, p, &tail)?)
}

fn config_for(n: usize, p: i64, curve: CurveArgs) -> Result<ChoreoConfig, Failure> {
    Ok(ChoreoConfig::new(
        CurveParams::new(curve.a, curve.b, p)?,
        n,
    )?)
}

fn cmd_admissible(args: AdmissibleArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    let PairArgs { n, p } = args.pair;
    let d = if args.restricted {
        is_admissible_restricted(p, n)
    } else {
        is_admissible(p, n)
    };
    emit(&args.output, stdout, &to_json(&report::decision_json(&d)))?;
    Ok(if d.admissible {
        EXIT_OK
    } else {
        EXIT_INADMISSIBLE
    })
}

fn cmd_coeffs(args: CoeffsArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    let p = args.pair.p;
    let n = admissible_pair(args.pair)?;
    let k = couplings_for(n, p, &args.tail)?;
    let r = residual(n, p, &k)?;
    let det = det_mt(n, p)?;
    let v = report::coefficients_json(n, p, &k, r, det);
    emit(&args.output, stdout, &to_json(&v))?;
    Ok(EXIT_OK)
}

fn cmd_restricted(args: RestrictedArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    let PairArgs { n, p } = args.pair;
    let d = is_admissible_restricted(p, n);
    if !d.admissible {
        return Err(Failure::Inadmissible(d));
    }
    let n = n as usize;
    let rc = solve_restricted(n, p)?;
    let r = residual(n, p, &rc.expand(n))?;
    let mut v = report::restricted_json(n, p, &d, &rc, r);
    if let (Some(mass), Some(charge)) = (args.mass, args.charge) {
        let mc = restricted_from_mass_charge(mass, charge);
        let mr = residual(n, p, &mc.expand(n))?;
        v["mass_charge"] = json!({
            "kappa_o": mc.kappa_o,
            "kappa_e": mc.kappa_e,
            "residual": mr,
        });
    }
    emit(&args.output, stdout, &to_json(&v))?;
    Ok(EXIT_OK)
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Outcome {
    let p = args.pair.p;
    let n = admissible_pair(args.pair)?;
    let config = config_for(n, p, args.curve)?;
    let k = couplings_for(n, p, &args.tail)?;
    if !args.dt.is_finite() || args.dt <= 0.0 {
        return Err(ChoreoError::BadStep(args.dt).into());
    }
    let times = (0..=args.steps).map(|i| i as f64 * args.dt);
    let traj = match args.engine {
        Engine::Analytic => Trajectory {
            config: Some(config),
            samples: times.map(|t| state_at(&config, t)).collect(),
        },
        Engine::Rk4 => {
            let spec = build_interaction(n, &k)?;
            rk4_integrate(&initial_state(&config), &spec, args.dt, args.steps)?
        }
        Engine::Spectral => {
            let spec = build_interaction(n, &k)?;
            let start = initial_state(&config);
            let samples = times
                .map(|t| spectral_propagate(&start, &spec, t))
                .collect::<Result<Vec<SystemState>, _>>()?;
            Trajectory {
                config: None,
                samples,
            }
        }
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            report::write_trajectory_csv(&mut buf, &traj, args.stride)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => to_json(&report::trajectory_json(&traj, args.stride)),
    };
    emit(&args.output, stdout, &text)?;
    Ok(EXIT_OK)
}

fn check(name: &str, value: f64, tolerance: f64) -> Value {
    json!({
        "name": name,
        "value": value,
        "tolerance": tolerance,
        "pass": value <= tolerance,
    })
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    let p = args.pair.p;
    let n = admissible_pair(args.pair)?;
    let config = config_for(n, p, args.curve)?;
    let k = couplings_for(n, p, &args.tail)?;
    let mut checks = Vec::new();

    let r = residual(n, p, &k)?;
    checks.push(check(
        "coefficient_residual",
        r[0].abs().max(r[1].abs()),
        args.tol_residual,
    ));

    let eom = eom_residual(&config, &k, &period_grid(args.grid))?;
    checks.push(check("eom_residual", eom, args.tol_residual));

    let spec = build_interaction(n, &k)?;
    let start = initial_state(&config);
    let traj = rk4_integrate(&start, &spec, args.dt, args.steps)?;
    let last = traj.samples.last().ok_or(ChoreoError::EmptyTrajectory)?;
    let rk4_err = last.max_deviation(&state_at(&config, last.t));
    checks.push(check("rk4_final_deviation", rk4_err, args.tol_rk4));

    let horizon = last.t;
    let mut spectral_err: f64 = 0.0;
    for i in 1..=8 {
        let t = horizon * i as f64 / 8.0;
        let s = spectral_propagate(&start, &spec, t)?;
        spectral_err = spectral_err.max(s.max_deviation(&state_at(&config, t)));
    }
    checks.push(check("spectral_deviation", spectral_err, args.tol_spectral));

    let drift = drift_report(&traj, &k)?;
    let rel = drift.relative_drift().unwrap_or_default();
    for (name, value) in [
        ("drift_g", rel.first_moment),
        ("drift_c", rel.angular_momentum),
        ("drift_I", rel.moment_of_inertia),
        ("drift_K", rel.kinetic),
        ("drift_V", rel.potential),
        ("drift_E", rel.energy),
    ] {
        checks.push(check(name, value, args.tol_drift));
    }

    let saari = inertia_rate(&traj)
        .into_iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    checks.push(check("inertia_rate", saari, args.tol_saari));

    let pass = checks.iter().all(|c| c["pass"] == Value::Bool(true));
    let v = json!({
        "N": n,
        "p": p,
        "a": args.curve.a,
        "b": args.curve.b,
        "kappa": report::kappa_map(&k),
        "checks": checks,
        "constants": report::constants_json(&drift),
        "pass": pass,
    });
    emit(&args.output, stdout, &to_json(&v))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_collide(args: CollideArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    if args.n < 2 {
        return Err(Failure::Usage(format!(
            "--N must be at least 2, got {}",
            args.n
        )));
    }
    let curve = CurveParams::new(args.curve.a, args.curve.b, args.p)?;
    let config = ChoreoConfig {
        curve,
        n_bodies: args.n as usize,
    };
    let rep = has_collision(&config);
    emit(
        &args.output,
        stdout,
        &to_json(&report::collisions_json(&rep)),
    )?;
    Ok(EXIT_OK)
}

fn cmd_constants(args: ConstantsArgs, stdout: &mut dyn Write) -> Outcome {
    json_only(&args.output)?;
    let p = args.pair.p;
    let n = admissible_pair(args.pair)?;
    let config = config_for(n, p, args.curve)?;
    let k = couplings_for(n, p, &args.tail)?;
    let measured = measure(&state_at(&config, args.t), &k)?;
    let traj = sample_trajectory_with(&config, 0.0, TAU, args.grid, Endpoint::Open)?;
    let with_drift = drift_report(&traj, &k)?;
    let closed = closed_form_constants(&config)?;

    let mut v = report::constants_json(&measured);
    if let Some(d) = with_drift.drift {
        let mut tmp = measured;
        tmp.drift = Some(d);
        let full = report::constants_json(&tmp);
        v["drift"] = full["drift"].clone();
        v["relative_drift"] = full["relative_drift"].clone();
    }
    v["t"] = json!(args.t);
    v["closed_form"] = report::constants_json(&ConservedReport {
        drift: None,
        ..closed
    });
    let parts = (1..=n / 2)
        .map(|ell| potential_parts(&config, ell))
        .collect::<Result<Vec<_>, _>>()?;
    v["potential_parts"] = json!(parts
        .iter()
        .map(|pp| json!({ "ell": pp.ell, "v_minus": pp.v_minus, "v_plus": pp.v_plus }))
        .collect::<Vec<_>>());
    v["V_from_parts"] = json!(potential_from_parts(&config, &k)?);
    emit(&args.output, stdout, &to_json(&v))?;
    Ok(EXIT_OK)
}

fn cmd_scan(args: ScanArgs, stdout: &mut dyn Write) -> Outcome {
    let counts = match admissible_body_counts(args.p, args.max_n) {
        Ok(c) => c,
        Err(_) => return Err(Failure::Inadmissible(is_admissible(args.p, 4))),
    };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "p": args.p,
            "max_N": args.max_n,
            "admissible_N": counts,
        })),
        Format::Csv => {
            let mut s = String::from("N\n");
            for n in &counts {
                s.push_str(&format!("{n}\n"));
            }
            s
        }
    };
    emit(&args.output, stdout, &text)?;
    Ok(EXIT_OK)
}
