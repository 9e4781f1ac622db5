//! `irscell` — command-line front end for the unit-cell reflection model.
//!
//! Subcommands: `forward` (closed-form θ and 𝓡 at one operating point),
//! `invert` (capacitance realizing a phase or amplitude target), `sweep`
//! (curve generation to CSV/JSON), `table` (batch design requests), and
//! `verify` (closed forms against the independent oracle plus round-trip
//! inversions).
//!
//! Exit codes are stable: 0 success, 2 usage or parse error, 3 degenerate
//! circuit, 4 infeasible target, 5 verification failure.

mod config;
mod units;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use irs_cell::circuit::{self, OperatingPoint, UnitCellParams};
use irs_cell::error::{CircuitError, InverseError};
use irs_cell::inverse::{
    self, AmplitudeTarget, CapacitanceWindow, DesignRequest, DesignSolution, DesignTableRow,
    PhaseTarget, WindowPolicy,
};
use irs_cell::oracle::{self, EquivalenceTolerances, SweepRanges};
use irs_cell::sweep::{
    format_float, run_sweep, CurveData, OutputColumn, SweepSpec, SweepVariable,
    DEFAULT_FIGURE_STEPS,
};

use config::{CliConfig, OutputFormat};
use units::{parse_interval, parse_quantity, Dimension};

// ─── Exit-code contract ─────────────────────────────────────────────────────

const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<CircuitError> for Failure {
    fn from(e: CircuitError) -> Self {
        let code = match e {
            CircuitError::DegenerateCircuit { .. } | CircuitError::UndefinedPhase => {
                EXIT_DEGENERATE
            }
            CircuitError::InvalidParameter(_) => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<InverseError> for Failure {
    fn from(e: InverseError) -> Self {
        let code = match &e {
            InverseError::InfeasibleTarget { .. } | InverseError::NoRootInRange { .. } => {
                EXIT_INFEASIBLE
            }
            InverseError::AllCapacitancesValid => 0,
            InverseError::InvalidTarget(_) => EXIT_USAGE,
            InverseError::Circuit(c) => return Failure::from(c.clone()),
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

// ─── CLI grammar ────────────────────────────────────────────────────────────

/// Reflection model of a varactor-tuned reflecting-surface unit cell.
#[derive(Parser)]
#[command(
    name = "irscell",
    version,
    about = "Phase-shift and reflection-amplitude model of a varactor-tuned unit cell",
    long_about = "Closed-form reflection model of a varactor-tuned reflecting-surface unit \
                  cell (parallel-resonant equivalent circuit), its capacitance inverse \
                  design, curve sweeps, and an independent verification oracle.\n\n\
                  Values accept engineering suffixes, case-insensitive: nH, pF, GHz, deg, \
                  rad, ohm. Bare numbers are SI (henries, farads, hertz, ohms, radians).",
    after_long_help = "EXIT CODES:\n    \
        0  success\n    \
        2  usage or parse error\n    \
        3  degenerate circuit (lossless parallel resonance)\n    \
        4  infeasible target / no root in window\n    \
        5  verification failure\n\n\
        CONFIG:\n    \
        A flat key=value file (keys: l1, l2, r, z0, window_min, window_max, format, \
        output, phase_tol, magnitude_tol, round_trip_tol; '#' comments) is read from \
        --config or $IRSCELL_CONFIG; flags override it."
)]
struct Cli {
    /// Config file path (overrides $IRSCELL_CONFIG).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the forward model: θ and 𝓡 at one capacitance and frequency.
    #[command(
        long_about = "Evaluate the closed-form phase shift and reflection amplitude at \
                            one operating point. Prints the phase in radians and degrees and \
                            the dimensionless amplitude, 17 significant digits each."
    )]
    Forward {
        #[command(flatten)]
        params: ParamArgs,
        /// Varactor capacitance (e.g. 1.6pF).
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Incident frequency (e.g. 2.4GHz).
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },

    /// Solve for the capacitance realizing a phase or amplitude target.
    #[command(subcommand)]
    Invert(InvertCommand),

    /// Sweep capacitance, frequency, or a design target; emit CSV or JSON.
    #[command(
        long_about = "Sweep one variable over a uniform inclusive grid and emit aligned \
                            output columns. Rows that cannot be computed (degenerate circuit, \
                            infeasible target) are explicit gaps: empty CSV fields, JSON nulls."
    )]
    Sweep(SweepArgs),

    /// Solve a batch of (theta, rho, f) design requests from a CSV file.
    #[command(
        long_about = "Read design rows 'theta_deg,rho,f_GHz' (header optional) and print \
                            one solved row per request: the capacitance realizing the phase, \
                            the capacitance realizing the amplitude, the reflection achieved at \
                            the phase solution, and the amplitude discrepancy there. Row-level \
                            failures are recorded in the row and never abort the table. Exits 0 \
                            unless every row failed."
    )]
    Table(TableArgs),

    /// Check the closed forms against the direct oracle and round-trip inversions.
    #[command(
        long_about = "Run the equivalence sweep (closed-form phase/amplitude against \
                            direct complex evaluation on seeded random points) plus seeded \
                            round-trip inversions, and print a deterministic report. Exits 5 \
                            on any failure."
    )]
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum InvertCommand {
    /// Capacitance for a desired phase shift.
    #[command(
        long_about = "Solve the phase-target quadratic, forward-verify both roots, and \
                            report all candidates, the selection, its residual, and the \
                            reflection state actually achieved. A residual near pi means the \
                            requested phase is not on the achievable arc and the reported \
                            capacitance is tangent-matched half a turn away."
    )]
    Phase {
        /// Desired phase (e.g. -80deg or 0.52rad; bare numbers are radians).
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[command(flatten)]
        common: InvertCommonArgs,
    },
    /// Capacitance for a desired reflection amplitude.
    Amplitude {
        /// Desired amplitude in [0, 1].
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        common: InvertCommonArgs,
    },
}

#[derive(Args)]
struct InvertCommonArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Incident frequency (e.g. 2.4GHz).
    #[arg(long)]
    f: String,
    #[command(flatten)]
    window: WindowArgs,
}

#[derive(Args)]
struct ParamArgs {
    /// Bottom-layer inductance (e.g. 2.5nH).
    #[arg(long)]
    l1: Option<String>,
    /// Top-layer inductance (e.g. 0.4nH).
    #[arg(long)]
    l2: Option<String>,
    /// Loss resistance (ohms).
    #[arg(long)]
    r: Option<String>,
    /// Characteristic impedance (ohms; free space 377 by default).
    #[arg(long)]
    z0: Option<String>,
}

impl ParamArgs {
    fn resolve(&self, base: UnitCellParams) -> Result<UnitCellParams, Failure> {
        let mut p = base;
        if let Some(s) = &self.l1 {
            p.l1 = parse_quantity(s, Dimension::Inductance).map_err(Failure::usage)?;
        }
        if let Some(s) = &self.l2 {
            p.l2 = parse_quantity(s, Dimension::Inductance).map_err(Failure::usage)?;
        }
        if let Some(s) = &self.r {
            p.r = parse_quantity(s, Dimension::Resistance).map_err(Failure::usage)?;
        }
        if let Some(s) = &self.z0 {
            p.z0 = parse_quantity(s, Dimension::Resistance).map_err(Failure::usage)?;
        }
        p.validate().map_err(Failure::from)?;
        Ok(p)
    }
}

#[derive(Args)]
struct WindowArgs {
    /// Lower edge of the capacitance window (default 0.47pF).
    #[arg(long)]
    window_min: Option<String>,
    /// Upper edge of the capacitance window (default 2.35pF).
    #[arg(long)]
    window_max: Option<String>,
    /// Exit 4 when no root lies inside the window (default: warn only).
    #[arg(long)]
    strict_window: bool,
}

impl WindowArgs {
    fn resolve(&self, base: CapacitanceWindow) -> Result<CapacitanceWindow, Failure> {
        let min = match &self.window_min {
            Some(s) => parse_quantity(s, Dimension::Capacitance).map_err(Failure::usage)?,
            None => base.min,
        };
        let max = match &self.window_max {
            Some(s) => parse_quantity(s, Dimension::Capacitance).map_err(Failure::usage)?,
            None => base.max,
        };
        CapacitanceWindow::new(min, max).map_err(|e| Failure::usage(e.to_string()))
    }

    fn policy(&self) -> WindowPolicy {
        if self.strict_window {
            WindowPolicy::Required
        } else {
            WindowPolicy::Advisory
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariableArg {
    /// Varactor capacitance (fixed --f required).
    #[value(alias = "c")]
    Capacitance,
    /// Incident frequency (fixed --c required).
    #[value(alias = "f")]
    Frequency,
    /// Requested phase target (fixed --f required).
    Theta,
    /// Requested amplitude target (fixed --f required).
    Rho,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// What to sweep.
    #[arg(long, value_enum)]
    variable: VariableArg,
    /// First grid value, in the variable's units.
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Last grid value, in the variable's units.
    #[arg(long, allow_hyphen_values = true)]
    stop: String,
    /// Grid points including both endpoints.
    #[arg(long, default_value_t = DEFAULT_FIGURE_STEPS)]
    steps: usize,
    /// Fixed capacitance for frequency sweeps (e.g. 2pF).
    #[arg(long)]
    c: Option<String>,
    /// Fixed frequency for every other sweep (e.g. 2.4GHz).
    #[arg(long)]
    f: Option<String>,
    /// Comma-separated output columns: theta,rho,c_theta,c_rho.
    #[arg(long, value_delimiter = ',')]
    outputs: Vec<String>,
    #[command(flatten)]
    window: WindowArgs,
    /// Output format (default from config, else csv).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this path atomically instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// CSV file of design rows: theta_deg,rho,f_GHz (header optional).
    #[arg(long, value_name = "PATH")]
    rows: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Output format (default from config, else csv).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this path atomically instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random equivalence points to check.
    #[arg(short = 'n', long = "points", default_value_t = 10_000)]
    points: usize,
    /// RNG seed; equal seeds give byte-identical reports.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Round-trip inversions to check.
    #[arg(long, default_value_t = 100)]
    round_trips: usize,
    /// Bottom-layer inductance range, lo:hi (default 2.3nH:2.5nH).
    #[arg(long, value_name = "LO:HI")]
    l1_range: Option<String>,
    /// Top-layer inductance range, lo:hi (default 0.4nH:0.56nH).
    #[arg(long, value_name = "LO:HI")]
    l2_range: Option<String>,
    /// Loss resistance range, lo:hi (default 2:4).
    #[arg(long, value_name = "LO:HI")]
    r_range: Option<String>,
    /// Capacitance range, lo:hi (default 0.47pF:2.35pF).
    #[arg(long, value_name = "LO:HI")]
    c_range: Option<String>,
    /// Frequency range, lo:hi (default 1GHz:3GHz).
    #[arg(long, value_name = "LO:HI")]
    f_range: Option<String>,
    /// Phase agreement tolerance, radians.
    #[arg(long)]
    phase_tol: Option<f64>,
    /// Magnitude agreement tolerance (relative).
    #[arg(long)]
    magnitude_tol: Option<f64>,
    /// Print the full JSON report instead of the key=value summary.
    #[arg(long)]
    json: bool,
}

// ─── Entry point ────────────────────────────────────────────────────────────

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (`irscell ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // clap prints help/usage; exit 0 for --help, 2 otherwise
    };
    let cfg = match CliConfig::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match dispatch(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if f.code == 0 {
                println!("{}", f.message);
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {}", f.message);
                ExitCode::from(f.code)
            }
        }
    }
}

fn dispatch(command: Command, cfg: &CliConfig) -> Result<(), Failure> {
    match command {
        Command::Forward { params, c, f } => cmd_forward(cfg, &params, &c, &f),
        Command::Invert(invert) => cmd_invert(cfg, invert),
        Command::Sweep(args) => cmd_sweep(cfg, args),
        Command::Table(args) => cmd_table(cfg, args),
        Command::Verify(args) => cmd_verify(cfg, args),
    }
}

// ─── forward ────────────────────────────────────────────────────────────────

fn cmd_forward(cfg: &CliConfig, params: &ParamArgs, c: &str, f: &str) -> Result<(), Failure> {
    let p = params.resolve(cfg.params)?;
    let c = parse_quantity(c, Dimension::Capacitance).map_err(Failure::usage)?;
    let f = parse_quantity(f, Dimension::Frequency).map_err(Failure::usage)?;
    let op = OperatingPoint::new(c, f)?;
    let state = circuit::reflection_state(&p, &op)?;
    print_kv("theta_rad", state.phase);
    print_kv("theta_deg", state.phase.to_degrees());
    print_kv("rho", state.magnitude);
    Ok(())
}

// ─── invert ─────────────────────────────────────────────────────────────────

fn cmd_invert(cfg: &CliConfig, invert: InvertCommand) -> Result<(), Failure> {
    match invert {
        InvertCommand::Phase { theta, common } => {
            let p = common.params.resolve(cfg.params)?;
            let f = parse_quantity(&common.f, Dimension::Frequency).map_err(Failure::usage)?;
            let theta = parse_quantity(&theta, Dimension::Angle).map_err(Failure::usage)?;
            let window = common.window.resolve(cfg.window)?;
            let target = PhaseTarget::new(theta, p, f)?;
            let sol = inverse::capacitance_from_phase(&target, &window, common.window.policy())?;
            println!("kind = phase");
            print_kv("target_theta_rad", theta);
            print_kv("target_theta_deg", theta.to_degrees());
            print_solution(&sol, &window);
            Ok(())
        }
        InvertCommand::Amplitude { rho, common } => {
            let p = common.params.resolve(cfg.params)?;
            let f = parse_quantity(&common.f, Dimension::Frequency).map_err(Failure::usage)?;
            let rho = parse_quantity(&rho, Dimension::Dimensionless).map_err(Failure::usage)?;
            let window = common.window.resolve(cfg.window)?;
            let target = AmplitudeTarget::new(rho, p, f)?;
            let sol =
                inverse::capacitance_from_amplitude(&target, &window, common.window.policy())?;
            println!("kind = amplitude");
            print_kv("target_rho", rho);
            print_solution(&sol, &window);
            Ok(())
        }
    }
}

fn print_solution(sol: &DesignSolution, window: &CapacitanceWindow) {
    for c in &sol.c_candidates {
        print_kv("candidate_f", *c);
    }
    print_kv("c_selected_f", sol.c_selected);
    println!("in_window = {}", sol.in_range);
    print_kv("residual", sol.residual);
    print_kv("achieved_theta_rad", sol.achieved.phase);
    print_kv("achieved_theta_deg", sol.achieved.phase.to_degrees());
    print_kv("achieved_rho", sol.achieved.magnitude);
    if !sol.c_candidates.iter().any(|c| window.contains(*c)) {
        eprintln!(
            "warning: no candidate capacitance inside the window [{}, {}]",
            format_float(window.min),
            format_float(window.max)
        );
    }
}

// ─── sweep ──────────────────────────────────────────────────────────────────

fn cmd_sweep(cfg: &CliConfig, args: SweepArgs) -> Result<(), Failure> {
    let p = args.params.resolve(cfg.params)?;
    let window = args.window.resolve(cfg.window)?;

    let (variable, dim) = match args.variable {
        VariableArg::Capacitance => (SweepVariable::Capacitance, Dimension::Capacitance),
        VariableArg::Frequency => (SweepVariable::Frequency, Dimension::Frequency),
        VariableArg::Theta => (SweepVariable::RequestedPhase, Dimension::Angle),
        VariableArg::Rho => (SweepVariable::RequestedAmplitude, Dimension::Dimensionless),
    };
    let start = parse_quantity(&args.start, dim).map_err(Failure::usage)?;
    let stop = parse_quantity(&args.stop, dim).map_err(Failure::usage)?;
    let fixed_c = args
        .c
        .as_deref()
        .map(|s| parse_quantity(s, Dimension::Capacitance))
        .transpose()
        .map_err(Failure::usage)?;
    let fixed_f = args
        .f
        .as_deref()
        .map(|s| parse_quantity(s, Dimension::Frequency))
        .transpose()
        .map_err(Failure::usage)?;

    let outputs = if args.outputs.is_empty() {
        match variable {
            SweepVariable::Capacitance | SweepVariable::Frequency => {
                vec![OutputColumn::Theta, OutputColumn::Rho]
            }
            SweepVariable::RequestedPhase => vec![OutputColumn::CTheta],
            SweepVariable::RequestedAmplitude => vec![OutputColumn::CRho],
        }
    } else {
        args.outputs
            .iter()
            .map(|name| match name.trim().to_ascii_lowercase().as_str() {
                "theta" => Ok(OutputColumn::Theta),
                "rho" => Ok(OutputColumn::Rho),
                "c_theta" => Ok(OutputColumn::CTheta),
                "c_rho" => Ok(OutputColumn::CRho),
                other => Err(Failure::usage(format!("unknown output column '{other}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?
    };

    let spec = SweepSpec {
        variable,
        start,
        stop,
        steps: args.steps,
        params: p,
        fixed_c,
        fixed_f,
        outputs,
        window,
    };
    let curve = run_sweep(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let format = resolve_format(args.format, cfg);
    let rendered = render_curve(&curve, format);
    write_output(args.output.as_deref().or(cfg.output.as_deref()), &rendered)
}

fn resolve_format(flag: Option<FormatArg>, cfg: &CliConfig) -> OutputFormat {
    match flag {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.format,
    }
}

fn render_curve(curve: &CurveData, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => curve.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&curve.to_json()).expect("serializable");
            s.push('\n');
            s
        }
    }
}

// ─── table ──────────────────────────────────────────────────────────────────

fn cmd_table(cfg: &CliConfig, args: TableArgs) -> Result<(), Failure> {
    let p = args.params.resolve(cfg.params)?;
    let window = args.window.resolve(cfg.window)?;
    let text = fs::read_to_string(&args.rows)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.rows.display())))?;

    let mut rows: Vec<Result<DesignRequest, String>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.chars().any(|ch| ch.is_ascii_alphabetic()) {
            continue; // header row
        }
        rows.push(parse_table_row(line).map_err(|e| format!("line {}: {e}", lineno + 1)));
    }

    let mut solved: Vec<DesignTableRow> = Vec::with_capacity(rows.len());
    for row in rows {
        match row {
            Ok(request) => {
                solved.extend(inverse::design_table(&[request], &p, &window));
            }
            Err(message) => solved.push(DesignTableRow {
                request: DesignRequest {
                    theta: f64::NAN,
                    rho: f64::NAN,
                    f: f64::NAN,
                },
                c_theta: None,
                c_rho: None,
                achieved: None,
                discrepancy: None,
                error: Some(message),
            }),
        }
    }

    let format = resolve_format(args.format, cfg);
    let rendered = render_table(&solved, format);
    write_output(args.output.as_deref().or(cfg.output.as_deref()), &rendered)?;

    let all_failed = !solved.is_empty()
        && solved
            .iter()
            .all(|r| r.c_theta.is_none() && r.c_rho.is_none());
    if all_failed {
        return Err(Failure {
            code: EXIT_INFEASIBLE,
            message: "every table row failed".into(),
        });
    }
    Ok(())
}

fn parse_table_row(line: &str) -> Result<DesignRequest, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(format!(
            "expected 3 fields (theta_deg,rho,f_GHz), got {}",
            fields.len()
        ));
    }
    let unquote = |s: &str| s.trim_matches('"').to_string();
    let theta_deg: f64 = unquote(fields[0])
        .parse()
        .map_err(|_| format!("bad theta_deg '{}'", fields[0]))?;
    let rho: f64 = unquote(fields[1])
        .parse()
        .map_err(|_| format!("bad rho '{}'", fields[1]))?;
    let f_ghz: f64 = unquote(fields[2])
        .parse()
        .map_err(|_| format!("bad f_GHz '{}'", fields[2]))?;
    Ok(DesignRequest {
        theta: theta_deg.to_radians(),
        rho,
        f: f_ghz * 1e9,
    })
}

/// RFC-4180 quoting for non-numeric fields.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_table(rows: &[DesignTableRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "theta_deg,rho,f_GHz,c_theta_F,c_rho_F,achieved_theta_rad,achieved_rho,discrepancy,error\n",
            );
            let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
            for row in rows {
                let degrees = if row.request.theta.is_nan() {
                    String::new()
                } else {
                    format_float(row.request.theta.to_degrees())
                };
                let rho = if row.request.rho.is_nan() {
                    String::new()
                } else {
                    format_float(row.request.rho)
                };
                let f_ghz = if row.request.f.is_nan() {
                    String::new()
                } else {
                    format_float(row.request.f / 1e9)
                };
                out.push_str(&format!(
                    "{degrees},{rho},{f_ghz},{},{},{},{},{},{}\n",
                    opt(row.c_theta),
                    opt(row.c_rho),
                    opt(row.achieved.map(|a| a.phase)),
                    opt(row.achieved.map(|a| a.magnitude)),
                    opt(row.discrepancy),
                    csv_field(row.error.as_deref().unwrap_or("")),
                ));
            }
            out
        }
    }
}

// ─── verify ─────────────────────────────────────────────────────────────────

fn cmd_verify(cfg: &CliConfig, args: VerifyArgs) -> Result<(), Failure> {
    let mut ranges = SweepRanges::default();
    let overrides: [(&Option<String>, Dimension, &mut (f64, f64)); 5] = [
        (&args.l1_range, Dimension::Inductance, &mut ranges.l1),
        (&args.l2_range, Dimension::Inductance, &mut ranges.l2),
        (&args.r_range, Dimension::Resistance, &mut ranges.r),
        (&args.c_range, Dimension::Capacitance, &mut ranges.c),
        (&args.f_range, Dimension::Frequency, &mut ranges.f),
    ];
    for (flag, dim, slot) in overrides {
        if let Some(s) = flag {
            *slot = parse_interval(s, dim).map_err(Failure::usage)?;
        }
    }

    let tolerances = EquivalenceTolerances {
        phase: args.phase_tol.unwrap_or(cfg.phase_tol),
        magnitude: args.magnitude_tol.unwrap_or(cfg.magnitude_tol),
        ..EquivalenceTolerances::default()
    };

    let equivalence = oracle::equivalence_sweep(args.points, &ranges, args.seed, &tolerances)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let round_trip = oracle::round_trip_sweep(
        args.round_trips,
        &ranges,
        &cfg.window,
        args.seed.wrapping_add(1),
        cfg.round_trip_tol,
    )
    .map_err(|e| Failure::usage(e.to_string()))?;

    let passed = equivalence.passed() && round_trip.passed();
    if args.json {
        let report = serde_json::json!({
            "equivalence": equivalence,
            "round_trip": round_trip,
            "passed": passed,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        println!("points_checked = {}", equivalence.points_checked);
        print_kv("max_phase_error_rad", equivalence.max_phase_error);
        print_kv("max_magnitude_error", equivalence.max_magnitude_error);
        println!("round_trips_checked = {}", round_trip.inversions_checked);
        print_kv("max_phase_residual_rad", round_trip.max_phase_residual);
        print_kv("max_amplitude_residual", round_trip.max_amplitude_residual);
        println!(
            "failures = {}",
            equivalence.failures.len() + round_trip.failures.len()
        );
        println!("status = {}", if passed { "pass" } else { "fail" });
    }

    if passed {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY_FAILED,
            message: format!(
                "verification failed: {} equivalence failure(s), {} round-trip failure(s)",
                equivalence.failures.len(),
                round_trip.failures.len()
            ),
        })
    }
}

// ─── Output plumbing ────────────────────────────────────────────────────────

fn print_kv(key: &str, value: f64) {
    println!("{key} = {}", format_float(value));
}

/// Write to stdout, or atomically (temp file + rename) to a path.
fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let stem = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "output".to_string());
            let tmp = dir.join(format!(".{stem}.tmp.{}", std::process::id()));
            fs::write(&tmp, content)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", tmp.display())))?;
            fs::rename(&tmp, p).map_err(|e| {
                let _ = fs::remove_file(&tmp);
                Failure::usage(format!("cannot move output into {}: {e}", p.display()))
            })
        }
    }
}
