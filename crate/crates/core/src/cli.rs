//! Command-line front end behind the `qphase` binary.
//!
//! Everything lives here so the binary stays a one-liner and the commands
//! can be driven from tests with in-memory output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::closed::{cross_check, pacs_moment_checks, CrossCheckReport, Verdict};
use crate::error::{Error, Result};
use crate::families::{Family, StateParams, StateSpec, TruncationReport};
use crate::phase::{bp_phase_report, witnesses, PhaseReport, WitnessSet};
use crate::sweep::{
    evaluate_state, figure_preset, format_float, run_sweep, validate_csv, Axis, RowStatus,
    SweepConfig, SweepRow, SweepTable,
};

pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "qphase",
    version,
    about = "Barnett–Pegg phase fluctuation of intermediate photon states"
)]
pub struct Cli {
    /// Truncation tolerance for infinite-support families
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Hard cap on the retained photon number
    #[arg(long = "nmax-cap", global = true)]
    pub nmax_cap: Option<usize>,
    /// Output file (report, sweep, verify) or directory (figure)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Human,
    /// JSON
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full metric printout for one state
    Report {
        #[command(flatten)]
        state: StateArgs,
        /// Higher-order antibunching orders, comma separated
        #[arg(long, value_delimiter = ',')]
        hoa: Option<Vec<usize>>,
    },
    /// Evaluate a 1- or 2-axis parameter grid
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        /// Swept parameter as name=start:stop:step (repeat for a second axis)
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        hoa: Option<Vec<usize>>,
    },
    /// Regenerate the data behind figure 1..5 as figure<id>.csv
    Figure {
        #[arg(required = true)]
        ids: Vec<u32>,
    },
    /// Compare the closed-form expression for a state with direct summation
    Verify {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Default, Args)]
pub struct StateArgs {
    /// TOML file with the same keys as a sweep config; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// binomial, gbs, nbs, hs, pacs or coherent
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long = "M", allow_negative_numbers = true)]
    pub big_m: Option<f64>,
    #[arg(long = "N", allow_negative_numbers = true)]
    pub big_n: Option<f64>,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub big_l: Option<f64>,
    /// Number of added photons (pacs)
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

impl StateArgs {
    fn flags(&self) -> [(&'static str, Option<f64>); 7] {
        [
            ("p", self.p),
            ("M", self.big_m),
            ("N", self.big_n),
            ("L", self.big_l),
            ("m", self.m),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ]
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Report { state, hoa } => {
            let config = resolve(cli, state, hoa.as_deref())?;
            let spec = single_point(&config)?;
            let text = render_report(
                &spec,
                &config.hoa_orders,
                cli.format.unwrap_or(Format::Human),
            )?;
            emit(cli.out.as_deref(), &text, out)?;
            Ok(0)
        }
        Command::Sweep { state, axes, hoa } => {
            let mut config = resolve(cli, state, hoa.as_deref())?;
            if !axes.is_empty() {
                config.axes = axes.iter().map(|a| Axis::parse(a)).collect::<Result<_>>()?;
            }
            let table = run_sweep(&config)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv_string(),
                Format::Human => table.to_human(),
                Format::Structured => to_json(&table)?,
            };
            let path = cli.out.clone().or(config.output.clone());
            emit(path.as_deref(), &text, out)?;
            if let (Some(path), Format::Csv) = (path, cli.format.unwrap_or(Format::Csv)) {
                check_emitted(&path, err)?;
            }
            Ok(0)
        }
        Command::Figure { ids } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            for &id in ids {
                let mut config = figure_preset(id)?;
                if let Some(eps) = cli.epsilon {
                    config.epsilon = eps;
                }
                if let Some(cap) = cli.nmax_cap {
                    config.nmax_cap = cap;
                }
                let table = run_sweep(&config)?;
                let path = dir.join(format!("figure{id}.csv"));
                table.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
                writeln!(out, "{}", path.display())?;
                check_emitted(&path, err)?;
            }
            Ok(0)
        }
        Command::Verify { state, tol } => {
            let config = resolve(cli, state, None)?;
            let spec = single_point(&config)?;
            let mut reports = vec![cross_check(&spec, *tol)?];
            if let StateParams::PhotonAddedCoherent { alpha, m } = spec.params {
                reports.extend(pacs_moment_checks(alpha, m, spec.truncation, *tol)?);
            }
            let text = render_checks(&spec, &reports, cli.format.unwrap_or(Format::Human))?;
            emit(cli.out.as_deref(), &text, out)?;
            Ok(verify_exit_code(&reports))
        }
    }
}

/// 3 if anything mismatched, otherwise 4 if anything could not be
/// evaluated, otherwise 0.
pub fn verify_exit_code(reports: &[CrossCheckReport]) -> i32 {
    let has = |v| reports.iter().any(|r| r.verdict == v);
    if has(Verdict::Mismatch) {
        Verdict::Mismatch.exit_code()
    } else if has(Verdict::ClosedFormUndefined) {
        Verdict::ClosedFormUndefined.exit_code()
    } else {
        Verdict::Match.exit_code()
    }
}

/// Config file (if any), then `--family`, parameter flags and global flags.
fn resolve(cli: &Cli, state: &StateArgs, hoa: Option<&[usize]>) -> Result<SweepConfig> {
    let mut config = match (&state.config, &state.family) {
        (Some(path), _) => SweepConfig::load(path)?,
        (None, Some(family)) => SweepConfig::new(family.parse()?),
        (None, None) => {
            return Err(Error::Config(
                "either --family or --config is required".into(),
            ))
        }
    };
    if let Some(family) = &state.family {
        config.family = family.parse::<Family>()?;
    }
    for (name, value) in state.flags() {
        if let Some(v) = value {
            if !config.family.param_names().contains(&name) {
                return Err(Error::Param(format!(
                    "--{name} is not a parameter of {}",
                    config.family
                )));
            }
            config.params.insert(name.to_string(), v);
        }
    }
    if let Some(eps) = cli.epsilon {
        config.epsilon = eps;
    }
    if let Some(cap) = cli.nmax_cap {
        config.nmax_cap = cap;
    }
    if let Some(orders) = hoa {
        config.hoa_orders = orders.to_vec();
    }
    Ok(config)
}

fn single_point(config: &SweepConfig) -> Result<StateSpec> {
    if !config.axes.is_empty() {
        return Err(Error::Config(
            "config defines sweep axes; use `sweep` for grids".into(),
        ));
    }
    if let Some(l) = config.hoa_orders.iter().find(|&&l| l < 2) {
        return Err(Error::Param(format!(
            "higher-order antibunching order {l} must be ≥ 2"
        )));
    }
    let params = StateParams::from_map(config.family, &config.params)?;
    params.validate()?;
    Ok(StateSpec::new(params).with_truncation(config.truncation()))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Re-reads a written CSV and warns about rows that break the invariants.
fn check_emitted(path: &Path, err: &mut dyn Write) -> Result<()> {
    let v = validate_csv(std::fs::File::open(path)?)?;
    for msg in &v.violations {
        writeln!(err, "warning: {}: {msg}", path.display())?;
    }
    writeln!(
        err,
        "{}: {} rows, {} ok, {} invariant violations",
        path.display(),
        v.rows,
        v.ok_rows,
        v.violations.len()
    )?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ReportOutput<'a> {
    spec: &'a StateSpec,
    truncation: TruncationReport,
    phase: PhaseReport,
    witnesses: WitnessSet,
}

fn render_report(spec: &StateSpec, hoa_orders: &[usize], format: Format) -> Result<String> {
    let (state, truncation) = spec.build()?;
    let top = hoa_orders.iter().copied().max().unwrap_or(0);
    let state = if top > state.n_max() {
        state.padded(top)
    } else {
        state
    };
    let phase = bp_phase_report(&state)?;
    let witnesses = witnesses(&state, hoa_orders)?;
    Ok(match format {
        Format::Structured => to_json(&ReportOutput {
            spec,
            truncation,
            phase,
            witnesses,
        })?,
        Format::Csv => {
            let table = SweepTable {
                family: spec.family(),
                hoa_orders: hoa_orders.to_vec(),
                rows: vec![SweepRow {
                    params: spec.params.values(),
                    metrics: Some(evaluate_state(&state, hoa_orders)?),
                    status: RowStatus::Ok,
                }],
            };
            table.to_csv_string()
        }
        Format::Human => {
            let f = format_float;
            let mut lines = vec![
                ("state".to_string(), spec.to_string()),
                ("n_max".into(), truncation.n_max.to_string()),
                ("residual".into(), f(truncation.residual_mass)),
                ("tail bound".into(), truncation.tail_bound_used.clone()),
                ("<N>".into(), f(phase.n_bar)),
                ("var N".into(), f(phase.photon_variance)),
                ("<a>".into(), f(phase.mean_a)),
                ("<C>".into(), f(phase.cos_mean)),
                ("<S>".into(), f(phase.sin_mean)),
                ("var C".into(), f(phase.var_c)),
                ("var S".into(), f(phase.var_s)),
                ("T".into(), f(phase.total_phase_noise)),
                ("b".into(), f(phase.b_factor)),
                ("U".into(), f(phase.u_value)),
                ("U reduced".into(), f(phase.u_reduced)),
                ("d_u".into(), f(phase.d_u)),
                ("amplitude noise".into(), f(phase.amplitude_noise)),
                ("antibunch".into(), f(witnesses.antibunch)),
            ];
            lines.extend(
                witnesses
                    .hoa
                    .iter()
                    .map(|(l, v)| (format!("hoa{l}"), f(*v))),
            );
            let verdict = if phase.d_u.abs() <= phase.u_uncertainty.max(1e-12) {
                "at the coherent level"
            } else if phase.d_u < 0.0 {
                "reduced below coherent"
            } else {
                "not reduced"
            };
            lines.push(("phase fluctuation".into(), verdict.into()));
            let width = lines
                .iter()
                .map(|(k, _)| k.chars().count())
                .max()
                .unwrap_or(0);
            lines
                .iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
    })
}

fn render_checks(spec: &StateSpec, reports: &[CrossCheckReport], format: Format) -> Result<String> {
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    Ok(match format {
        Format::Structured => to_json(&reports)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["family".to_string()];
            header.extend(spec.family().param_names().iter().map(|s| s.to_string()));
            header.extend(
                [
                    "quantity",
                    "closed",
                    "oracle",
                    "abs_diff",
                    "tolerance",
                    "verdict",
                ]
                .map(String::from),
            );
            w.write_record(&header)?;
            for r in reports {
                let mut rec = vec![r.family.tag().to_string()];
                rec.extend(r.params.values().into_iter().map(format_float));
                rec.extend([
                    r.quantity.label().to_string(),
                    opt(r.closed_value),
                    opt(r.oracle_value),
                    opt(r.abs_diff),
                    format_float(r.tolerance),
                    verdict_label(r.verdict).to_string(),
                ]);
                w.write_record(&rec)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                .expect("utf-8")
        }
        Format::Human => {
            let mut s = format!("{spec}\n");
            for r in reports {
                s.push_str(&format!(
                    "  {:<11} closed {:<20} oracle {:<20} |diff| {:<20} tol {}  {}\n",
                    r.quantity.label(),
                    r.closed_value
                        .map(format_float)
                        .unwrap_or_else(|| "-".into()),
                    r.oracle_value
                        .map(format_float)
                        .unwrap_or_else(|| "-".into()),
                    r.abs_diff.map(format_float).unwrap_or_else(|| "-".into()),
                    format_float(r.tolerance),
                    verdict_label(r.verdict),
                ));
                if let Some(note) = &r.note {
                    s.push_str(&format!("              note: {note}\n"));
                }
            }
            s
        }
    })
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Match => "MATCH",
        Verdict::Mismatch => "MISMATCH",
        Verdict::ClosedFormUndefined => "UNDEFINED",
    }
}
