//! `bhq`: exact spectra, VQE runs, table reports and figure data for the
//! mini-superspace black hole operators.

mod config;
mod plot;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bhq::ansatz::AnsatzConfig;
use bhq::basis::{variable_pair, BasisKind};
use bhq::models::{
    build_operator, contour_field, mass_potential, nariai_mass, thermo, Conventions, Family, Grid2,
    KernelTreatment, ModelSpec, OperatorKind, ThermoRecord,
};
use bhq::oracle::exact_spectrum_with;
use bhq::pauli::{self, DEFAULT_ZERO_TOL};
use bhq::report::{compute_table, convention_sweep, sweep_candidates, table_csv, ReportOptions};
use bhq::vqe::{history_csv, run_vqe_with, Method, VqeReport, VqeSettings, DEFAULT_RESTARTS};

use config::ConfigFile;

#[derive(Parser)]
#[command(name = "bhq", version, about = "Quantum mass operators of mini-superspace black holes")]
struct Cli {
    /// Plain key=value file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// btz, rn, rnds or string2d.
    #[arg(long)]
    model: Option<String>,
    /// Angular momentum (btz).
    #[arg(long = "J", allow_hyphen_values = true)]
    j: Option<f64>,
    /// Charge (rn, rnds, string2d).
    #[arg(long = "Q", allow_hyphen_values = true)]
    q: Option<f64>,
    /// Cosmological constant (rnds).
    #[arg(long)]
    lambda: Option<f64>,
    /// Length scale, default 1.
    #[arg(long)]
    ell: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct OperatorArgs {
    /// osc or pos.
    #[arg(long)]
    basis: Option<String>,
    /// Total qubits, split evenly between the two variables (default 4).
    #[arg(long)]
    qubits: Option<usize>,
    /// mass, absH or absComm.
    #[arg(long)]
    op: Option<String>,
    /// Treatment of coincident points in the mass barrier: pinv, wall or wall:<value>.
    #[arg(long)]
    kernel: Option<String>,
    /// Eigenvalue cutoff for inverse powers.
    #[arg(long)]
    cutoff: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct VqeArgs {
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// quasi-newton or simplex.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize an operator and print its lowest (unscaled) eigenvalue.
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        operator: OperatorArgs,
        /// Write the full spectrum report as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the variational eigensolver.
    Vqe {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        operator: OperatorArgs,
        #[command(flatten)]
        vqe: VqeArgs,
        /// Result JSON path; the history CSV is written next to it.
        #[arg(long)]
        output: Option<PathBuf>,
        /// History CSV path (overrides the default next to --output).
        #[arg(long)]
        history: Option<PathBuf>,
        /// Convergence plot path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// What to print on stdout when --output is absent.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Recompute one of the result tables (2 to 7) and mark each cell PASS/FAIL.
    Report {
        #[arg(long)]
        table: Option<u8>,
        #[command(flatten)]
        vqe: VqeArgs,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Horizons, entropy and temperature at mass M.
    Thermo {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "M", allow_hyphen_values = true)]
        mass: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mass potential V_M(b) on a grid.
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        b_min: Option<f64>,
        #[arg(long)]
        b_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Classical mass residual on a (p_a, b) grid; its zero set is the trajectory.
    Contour {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "M", allow_hyphen_values = true)]
        mass: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p_max: Option<f64>,
        #[arg(long)]
        p_samples: Option<usize>,
        #[arg(long)]
        b_min: Option<f64>,
        #[arg(long)]
        b_max: Option<f64>,
        #[arg(long)]
        b_samples: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pauli-string decomposition of an operator.
    Pauli {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        operator: OperatorArgs,
        /// Coefficients at or below this magnitude are dropped.
        #[arg(long)]
        zero_tol: Option<f64>,
        /// Print term counts over a range of cutoffs instead of the terms.
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Compare kernel conventions against the stored exact-discrete masses.
    Sweep {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Error with its process exit code: 2 for invalid input, 3 for numeric or I/O failure.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<bhq::Error> for Failure {
    fn from(e: bhq::Error) -> Self {
        Self {
            code: if e.is_validation() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self {
            code: 3,
            message: format!("serialization error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(|e| Failure::invalid(e.to_string()))?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Exact {
            model,
            operator,
            output,
        } => cmd_exact(&cfg, &model, &operator, output),
        Command::Vqe {
            model,
            operator,
            vqe,
            output,
            history,
            svg,
            format,
        } => cmd_vqe(&cfg, &model, &operator, &vqe, output, history, svg, format),
        Command::Report {
            table,
            vqe,
            kernel,
            output,
            format,
        } => cmd_report(&cfg, table, &vqe, kernel, output, format),
        Command::Thermo {
            model,
            mass,
            output,
        } => cmd_thermo(&cfg, &model, mass, output),
        Command::Potential {
            model,
            b_min,
            b_max,
            samples,
            output,
            format,
        } => cmd_potential(&cfg, &model, b_min, b_max, samples, output, format),
        Command::Contour {
            model,
            mass,
            p_min,
            p_max,
            p_samples,
            b_min,
            b_max,
            b_samples,
            output,
        } => {
            let m = cfg
                .resolve(mass, "M")?
                .ok_or_else(|| Failure::invalid("contour requires --M"))?;
            let grid = Grid2 {
                p_min: cfg.pick(p_min, "p_min", -3.0)?,
                p_max: cfg.pick(p_max, "p_max", 3.0)?,
                p_samples: cfg.pick(p_samples, "p_samples", 121)?,
                b_min: cfg.pick(b_min, "b_min", 0.05)?,
                b_max: cfg.pick(b_max, "b_max", 6.0)?,
                b_samples: cfg.pick(b_samples, "b_samples", 121)?,
            };
            cmd_contour(&cfg, &model, m, &grid, output)
        }
        Command::Pauli {
            model,
            operator,
            zero_tol,
            sweep,
            output,
            format,
        } => cmd_pauli(&cfg, &model, &operator, zero_tol, sweep, output, format),
        Command::Sweep { output } => cmd_sweep(output),
    }
}

fn model_spec(cfg: &ConfigFile, a: &ModelArgs) -> CliResult<ModelSpec> {
    let name: String = cfg
        .resolve(a.model.clone(), "model")?
        .ok_or_else(|| Failure::invalid("--model is required (btz, rn, rnds, string2d)"))?;
    let spec = ModelSpec {
        family: name.parse::<Family>()?,
        rotation: cfg.resolve(a.j, "J")?,
        charge: cfg.resolve(a.q, "Q")?,
        lambda: cfg.resolve(a.lambda, "lambda")?,
        ell: cfg.pick(a.ell, "ell", 1.0)?,
    };
    spec.validate()?;
    Ok(spec)
}

struct OperatorChoice {
    basis: BasisKind,
    qubits: usize,
    kind: OperatorKind,
    conventions: Conventions,
}

fn conventions(cfg: &ConfigFile, kernel: Option<String>, cutoff: Option<f64>) -> CliResult<Conventions> {
    let mut conv = Conventions::default();
    if let Some(k) = cfg.resolve(kernel, "kernel")? {
        conv.mass_kernel = k.parse::<KernelTreatment>()?;
    }
    conv.cutoff = cfg.pick(cutoff, "cutoff", conv.cutoff)?;
    if !(conv.cutoff >= 0.0) {
        return Err(Failure::invalid(format!("cutoff must be nonnegative, got {}", conv.cutoff)));
    }
    Ok(conv)
}

fn operator_choice(cfg: &ConfigFile, a: &OperatorArgs) -> CliResult<OperatorChoice> {
    let basis: String = cfg
        .resolve(a.basis.clone(), "basis")?
        .ok_or_else(|| Failure::invalid("--basis is required (osc or pos)"))?;
    let qubits = cfg.pick(a.qubits, "qubits", 4)?;
    if qubits < 2 || qubits % 2 != 0 {
        return Err(Failure::invalid(format!(
            "--qubits must be even and at least 2 (one register per variable), got {qubits}"
        )));
    }
    let kind: String = cfg.pick(a.op.clone(), "op", "mass".to_string())?;
    Ok(OperatorChoice {
        basis: basis.parse()?,
        qubits,
        kind: kind.parse()?,
        conventions: conventions(cfg, a.kernel.clone(), a.cutoff)?,
    })
}

fn vqe_settings(cfg: &ConfigFile, a: &VqeArgs, conv: Conventions) -> CliResult<(usize, u64, usize, VqeSettings)> {
    let depth = cfg.pick(a.depth, "depth", 3)?;
    let seed = cfg.pick(a.seed, "seed", 42)?;
    let restarts = cfg.pick(a.restarts, "restarts", DEFAULT_RESTARTS)?;
    if restarts == 0 {
        return Err(Failure::invalid("--restarts must be at least 1"));
    }
    let mut settings = VqeSettings {
        conventions: conv,
        ..VqeSettings::default()
    };
    if let Some(m) = cfg.resolve(a.method.clone(), "method")? {
        settings.optimizer.method = m.parse::<Method>()?;
    }
    Ok((depth, seed, restarts, settings))
}

fn emit(output: Option<&Path>, content: &str) -> CliResult<()> {
    match output {
        Some(p) => std::fs::write(p, content)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_exact(cfg: &ConfigFile, m: &ModelArgs, o: &OperatorArgs, output: Option<PathBuf>) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let op = operator_choice(cfg, o)?;
    let report = exact_spectrum_with(&spec, op.basis, op.qubits, op.kind, &op.conventions)?;
    if let Some(path) = output {
        emit(Some(&path), &to_json(&report)?)?;
    }
    println!("{:.8}", report.unscaled_lowest_mass);
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_vqe(
    cfg: &ConfigFile,
    m: &ModelArgs,
    o: &OperatorArgs,
    v: &VqeArgs,
    output: Option<PathBuf>,
    history: Option<PathBuf>,
    svg: Option<PathBuf>,
    format: Option<Format>,
) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let op = operator_choice(cfg, o)?;
    let (depth, seed, restarts, settings) = vqe_settings(cfg, v, op.conventions)?;
    let format = cfg.pick(format.map(format_name), "format", "json".to_string())?;
    let ansatz = AnsatzConfig::new(op.qubits, depth);
    let result = run_vqe_with(&spec, op.basis, &ansatz, op.kind, seed, restarts, &settings)?;

    let history_path = history.or_else(|| output.as_deref().map(|p| sibling(p, ".history.csv")));
    let report = VqeReport {
        model: spec,
        basis: op.basis,
        operator: op.kind,
        qubits: op.qubits,
        depth,
        seed,
        restarts,
        best_value: result.best_value,
        unscaled_mass: result.unscaled_value,
        converged: result.converged,
        best_theta: result.best_theta.clone(),
        history_csv_path: history_path.as_ref().map(|p| p.display().to_string()),
    };
    let csv = history_csv(&result.history);
    let points: Vec<(f64, f64)> = result.history.iter().map(|&(i, y)| (i as f64, y)).collect();
    let plot = plot::line_plot(
        &format!("VQE convergence, {} {} {}", spec.label(), op.basis, op.kind),
        "evaluation",
        "objective",
        &points,
    );
    if let Some(p) = &history_path {
        emit(Some(p), &csv)?;
    }
    if let Some(p) = &svg {
        emit(Some(p), &plot)?;
    }
    match output {
        Some(p) => {
            emit(Some(&p), &to_json(&report)?)?;
            println!("{:.8}", result.unscaled_value);
        }
        None => match format.as_str() {
            "csv" => emit(None, &csv)?,
            "svg" => emit(None, &plot)?,
            _ => emit(None, &to_json(&report)?)?,
        },
    }
    if !result.converged {
        log::warn!("best restart stopped at the iteration limit before converging");
    }
    Ok(())
}

fn format_name(f: Format) -> String {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Svg => "svg",
    }
    .to_string()
}

fn cmd_report(
    cfg: &ConfigFile,
    table: Option<u8>,
    v: &VqeArgs,
    kernel: Option<String>,
    output: Option<PathBuf>,
    format: Option<Format>,
) -> CliResult<()> {
    let table = cfg
        .resolve(table, "table")?
        .ok_or_else(|| Failure::invalid("--table is required (2 to 7)"))?;
    if !(2..=7).contains(&table) {
        return Err(Failure::invalid(format!("no table {table}; expected 2 to 7")));
    }
    let conv = conventions(cfg, kernel, None)?;
    let (depth, seed, restarts, settings) = vqe_settings(cfg, v, conv)?;
    let format = cfg.pick(format.map(format_name), "format", "csv".to_string())?;
    let opts = ReportOptions {
        depth,
        seed,
        restarts,
        settings,
    };
    let rows = compute_table(table, &opts)?;
    let text = match format.as_str() {
        "json" => to_json(&rows)?,
        "csv" => table_csv(&rows),
        other => return Err(Failure::invalid(format!("report cannot be written as {other}"))),
    };
    emit(output.as_deref(), &text)
}

#[derive(Serialize)]
struct ThermoOutput {
    model: ModelSpec,
    mass: f64,
    #[serde(flatten)]
    record: ThermoRecord,
}

fn cmd_thermo(cfg: &ConfigFile, m: &ModelArgs, mass: Option<f64>, output: Option<PathBuf>) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let mass = cfg
        .resolve(mass, "M")?
        .ok_or_else(|| Failure::invalid("thermo requires --M"))?;
    let record = thermo(&spec, mass)?;
    emit(
        output.as_deref(),
        &to_json(&ThermoOutput {
            model: spec,
            mass,
            record,
        })?,
    )
}

/// Metadata rows carried in figure CSVs: the extreme mass and, for rnds, the Nariai mass.
fn reference_lines(spec: &ModelSpec) -> Vec<(&'static str, f64)> {
    let mut out = vec![("extreme_mass", spec.extremal_mass())];
    if let (Family::RnDs, Some(q), Some(l)) = (spec.family, spec.charge, spec.lambda) {
        match nariai_mass(q, l) {
            Ok(mn) => out.push(("nariai_mass", mn)),
            Err(e) => log::warn!("{e}"),
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_potential(
    cfg: &ConfigFile,
    m: &ModelArgs,
    b_min: Option<f64>,
    b_max: Option<f64>,
    samples: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let lo = cfg.pick(b_min, "b_min", 0.05)?;
    let hi = cfg.pick(b_max, "b_max", 5.0)?;
    let n = cfg.pick(samples, "samples", 200)?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Failure::invalid(format!(
            "invalid grid: need 0 < b_min <= b_max and samples >= 1 (got {lo}, {hi}, {n})"
        )));
    }
    let format = cfg.pick(format.map(format_name), "format", "csv".to_string())?;
    let mut points = Vec::with_capacity(n);
    for b in bhq::models::linspace(lo, hi, n) {
        points.push((b, mass_potential(&spec, b)?));
    }
    let text = match format.as_str() {
        "svg" => plot::line_plot(&format!("Mass potential, {}", spec.label()), "b", "V_M", &points),
        "csv" => {
            let mut s = String::from("series,b,value\n");
            for (name, v) in reference_lines(&spec) {
                s.push_str(&format!("{name},,{v}\n"));
            }
            for (b, v) in &points {
                s.push_str(&format!("potential,{b},{v}\n"));
            }
            s
        }
        other => return Err(Failure::invalid(format!("potential cannot be written as {other}"))),
    };
    emit(output.as_deref(), &text)
}

fn cmd_contour(
    cfg: &ConfigFile,
    m: &ModelArgs,
    mass: f64,
    grid: &Grid2,
    output: Option<PathBuf>,
) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let field = contour_field(&spec, mass, grid)?;
    let mut s = String::from("series,p_a,b,residual\n");
    s.push_str(&format!("mass,,,{mass}\n"));
    for (name, v) in reference_lines(&spec) {
        s.push_str(&format!("{name},,,{v}\n"));
    }
    for pt in &field {
        s.push_str(&format!("field,{},{},{}\n", pt.p_a, pt.b, pt.residual));
    }
    emit(output.as_deref(), &s)
}

#[allow(clippy::too_many_arguments)]
fn cmd_pauli(
    cfg: &ConfigFile,
    m: &ModelArgs,
    o: &OperatorArgs,
    zero_tol: Option<f64>,
    sweep: bool,
    output: Option<PathBuf>,
    format: Option<Format>,
) -> CliResult<()> {
    let spec = model_spec(cfg, m)?;
    let op = operator_choice(cfg, o)?;
    let tol = cfg.pick(zero_tol, "zero_tol", DEFAULT_ZERO_TOL)?;
    let format = cfg.pick(format.map(format_name), "format", "csv".to_string())?;
    let vars = variable_pair(op.qubits, op.basis)?;
    let (matrix, _) = build_operator(&spec, &vars, op.kind, &op.conventions)?;
    if sweep {
        let mut s = String::from("cutoff,terms\n");
        for (c, n) in pauli::cutoff_sweep(&matrix, &[1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 0.0])? {
            s.push_str(&format!("{c:e},{n}\n"));
        }
        return emit(output.as_deref(), &s);
    }
    let terms = pauli::decompose(&matrix, tol)?;
    let text = match format.as_str() {
        "json" => pauli::to_json(&terms),
        "csv" => pauli::to_csv(&terms),
        other => return Err(Failure::invalid(format!("pauli terms cannot be written as {other}"))),
    };
    emit(output.as_deref(), &text)
}

fn cmd_sweep(output: Option<PathBuf>) -> CliResult<()> {
    let entries = convention_sweep(&sweep_candidates())?;
    let mut s = String::from("cutoff,kernel");
    if let Some(first) = entries.first() {
        for (label, _, _) in &first.rows {
            s.push(',');
            s.push_str(label);
        }
    }
    s.push_str(",max_abs_deviation\n");
    for e in &entries {
        s.push_str(&format!("{:e},{}", e.conventions.cutoff, e.conventions.mass_kernel));
        for (_, got, want) in &e.rows {
            s.push_str(&format!(",{:.8}", got - want));
        }
        s.push_str(&format!(",{:.8}\n", e.max_abs_deviation));
    }
    emit(output.as_deref(), &s)
}
