//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use qcorr_core::cluster::{self, ClusterFamily, FamilyTag, ScanSpec};
use qcorr_core::locc::{self, FuzzConfig, FuzzReport, Generator, Measure};
use qcorr_core::measures::{self, CorrelationReport};
use qcorr_core::roof::{self, RoofConfig, RoofMeasure};
use qcorr_core::{DensityMatrix, C64};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format;

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Multipartite entanglement measures for few-qubit states")]
pub struct Cli {
    /// Seed for randomized runs
    #[arg(long, global = true, env = "QCORR_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Write output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation report of a pure state
    Measure(MeasureArgs),
    /// Closed forms next to the numeric pipeline for a cluster family
    Table(FamilyArgs),
    /// CSV grid over two raw coefficients of f1 or f2
    Scan(ScanArgs),
    /// Randomized monotonicity campaign
    Fuzz(FuzzArgs),
    /// Convex roof of a rank-2 mixture
    Roof(RoofArgs),
    /// Recompute the residual-correlation counterexample
    Repro,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["state", "family"]))]
pub struct MeasureArgs {
    /// State file with `<bitstring> <re> <im>` lines
    #[arg(long, value_name = "FILE")]
    pub state: Option<PathBuf>,
    /// Cluster family: f1, f2, f3, f6 or ghzN
    #[arg(long, requires = "coeffs")]
    pub family: Option<String>,
    /// Comma-separated raw coefficients (`re` or `re+imj`)
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: String,
    /// The two varied coefficients, e.g. `a,d`
    #[arg(long, default_value = "a,d")]
    pub vary: String,
    /// Range `lo,hi` shared by both varied coefficients
    #[arg(long, default_value = "0,5", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    /// Raw values of all four coefficients; varied entries are overwritten
    #[arg(long, default_value = "0.5,0.5,0.5,0.5", allow_hyphen_values = true)]
    pub base: String,
    /// Evaluate through the numeric pipeline instead of closed forms
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// ems, m_<q>, tau4, tau3_<triple> or tau2_<pair>
    #[arg(long, default_value = "ems")]
    pub measure: String,
    /// Cluster family tag or haar4
    #[arg(long, default_value = "f2")]
    pub generator: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Sampling range `lo,hi` for alpha
    #[arg(long, value_name = "LO,HI")]
    pub alpha_range: Option<String>,
    /// Sampling range `lo,hi` for beta
    #[arg(long, value_name = "LO,HI")]
    pub beta_range: Option<String>,
    /// Also sample random local unitaries around the diagonal POVM
    #[arg(long)]
    pub unitaries: bool,
}

#[derive(Debug, Args)]
pub struct RoofArgs {
    /// First eigenvector (state file)
    #[arg(long, value_name = "FILE")]
    pub psi1: PathBuf,
    /// Second eigenvector (state file)
    #[arg(long, value_name = "FILE")]
    pub psi2: PathBuf,
    /// Weight of the first vector
    #[arg(long)]
    pub p: f64,
    /// tau3 or tau4_f1; chosen from the qubit count when omitted
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value = "2,3,4")]
    pub m_values: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(std::io::stdout(), "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    eprintln!("qcorr: {}", msg.lines().next().unwrap_or("usage error").trim_start_matches("error: "));
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qcorr: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Measure(a) => emit(cli, &measure(cli, a)?),
        Command::Table(a) => emit(cli, &table(cli, a)?),
        Command::Scan(a) => emit(cli, &scan(a)?),
        Command::Fuzz(a) => emit(cli, &fuzz(cli, a)?),
        Command::Roof(a) => emit(cli, &roof_cmd(cli, a)?),
        Command::Repro => repro(cli),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn family_from(tag: &str, coeffs: &str) -> Result<ClusterFamily> {
    let tag = FamilyTag::parse(tag)?;
    Ok(ClusterFamily::new(tag, &format::parse_coefficients(coeffs)?)?)
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("{what} must be `lo,hi`, got {s:?}"));
    let [lo, hi] = parts[..] else {
        return Err(bad());
    };
    Ok((lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?))
}

fn measure(cli: &Cli, a: &MeasureArgs) -> Result<String> {
    let (state, known) = match (&a.state, &a.family, &a.coeffs) {
        (Some(path), _, _) => (format::read_state(path)?, None),
        (None, Some(tag), Some(coeffs)) => {
            let fam = family_from(tag, coeffs)?;
            (cluster::family_state(&fam)?, fam.tag.known_t3())
        }
        _ => return Err(CliError::Usage("give --state or --family with --coeffs".into())),
    };
    let report = measures::correlation_report(&state, known.as_ref())?;
    if cli.json {
        return Ok(format::to_json(&report)? + "\n");
    }
    Ok(report_text(&report))
}

fn report_text(r: &CorrelationReport) -> String {
    let mut s = String::new();
    let mut line = |name: String, v: f64| {
        let _ = writeln!(s, "{name:<12} {}", format::format_number(v));
    };
    for (k, &v) in &r.tau_k {
        line(format!("tau_{k}"), v);
    }
    for (k, &v) in &r.c2_pairs {
        line(format!("C2_{k}"), v);
    }
    for (k, &v) in &r.m_k {
        line(format!("M_{k}"), v);
    }
    line("E_ms".into(), r.e_ms);
    if let Some(t3) = &r.t3 {
        for (k, &v) in t3 {
            line(format!("t3_{k}"), v);
        }
    }
    if let Some(t4) = r.t4 {
        line("t4".into(), t4);
    }
    if let Some(res) = r.qcr_residual {
        line("qcr_residual".into(), res);
    }
    s
}

#[derive(Debug, Serialize)]
struct TableEntry {
    name: String,
    closed_form: f64,
    numeric: f64,
    difference: f64,
}

#[derive(Debug, Serialize)]
struct TableReport {
    family: String,
    coefficients: Vec<C64>,
    entries: Vec<TableEntry>,
    max_discrepancy: f64,
}

fn table(cli: &Cli, a: &FamilyArgs) -> Result<String> {
    let fam = family_from(&a.family, &a.coeffs)?;
    let closed = cluster::closed_form_measures(&fam)?;
    let numeric = cluster::numeric_measures(&fam)?;
    let entries: Vec<TableEntry> = closed
        .entries()
        .into_iter()
        .zip(numeric.entries())
        .map(|((name, c), (_, n))| TableEntry {
            name,
            closed_form: c,
            numeric: n,
            difference: (c - n).abs(),
        })
        .collect();
    let report = TableReport {
        family: fam.tag.name(),
        coefficients: fam.coefficients.clone(),
        max_discrepancy: closed.max_discrepancy(&numeric),
        entries,
    };
    if cli.json {
        return Ok(format::to_json(&report)? + "\n");
    }
    let mut s = format!("{:<10} {:>20} {:>20} {:>12}\n", "entry", "closed_form", "numeric", "difference");
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{:<10} {:>20} {:>20} {:>12.3e}",
            e.name,
            format::format_number(e.closed_form),
            format::format_number(e.numeric),
            e.difference
        );
    }
    let _ = writeln!(s, "max_discrepancy {:.3e}", report.max_discrepancy);
    Ok(s)
}

fn scan(a: &ScanArgs) -> Result<String> {
    let family = FamilyTag::parse(&a.family)?;
    let names: Vec<&str> = a.vary.split(',').map(str::trim).collect();
    let index = |n: &str| {
        let mut chars = n.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => cluster::coefficient_index(c),
            _ => None,
        }
    };
    let vary = match names[..] {
        [x, y] => match (index(x), index(y)) {
            (Some(i), Some(j)) => [i, j],
            _ => return Err(CliError::Usage(format!("--vary takes two of a,b,c,d, got {:?}", a.vary))),
        },
        _ => return Err(CliError::Usage(format!("--vary takes two of a,b,c,d, got {:?}", a.vary))),
    };
    let base = format::parse_coefficients(&a.base)?;
    let base: [C64; 4] = base
        .try_into()
        .map_err(|v: Vec<C64>| CliError::Usage(format!("--base needs 4 coefficients, got {}", v.len())))?;
    let spec = ScanSpec {
        family,
        vary,
        range: parse_pair(&a.range, "--range")?,
        steps: a.steps,
        base,
        numeric: a.numeric,
    };
    let rows = cluster::scan_grid(&spec)?;
    let mut buf = Vec::new();
    format::write_scan_csv(&mut buf, &family.name(), &rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn fuzz(cli: &Cli, a: &FuzzArgs) -> Result<String> {
    let generator = Generator::parse(&a.generator)?;
    let family = match generator {
        Generator::Family(tag) => Some(tag),
        Generator::Haar4 => None,
    };
    let measure = Measure::parse(&a.measure, family)?;
    let mut config = FuzzConfig::new(measure, generator, a.trials, cli.seed);
    if let Some(r) = &a.alpha_range {
        config.alpha_bounds = parse_pair(r, "--alpha-range")?;
    }
    if let Some(r) = &a.beta_range {
        config.beta_bounds = parse_pair(r, "--beta-range")?;
    }
    config.unitaries = a.unitaries;
    let report = locc::fuzz_campaign(&config)?;
    let mut s = fuzz_summary(&report);
    if cli.json {
        s.push_str(&format::to_json(&report)?);
        s.push('\n');
    }
    Ok(s)
}

fn fuzz_summary(r: &FuzzReport) -> String {
    format!(
        "measure={} generator={} trials={} seed={} violations={} min_delta={} mean_delta={}\n",
        r.measure,
        r.generator,
        r.trials,
        r.seed,
        r.violations,
        format::format_number(r.min_delta),
        format::format_number(r.mean_delta)
    )
}

fn roof_cmd(cli: &Cli, a: &RoofArgs) -> Result<String> {
    let psi1 = format::read_state(&a.psi1)?;
    let psi2 = format::read_state(&a.psi2)?;
    let p = a.p;
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage(format!("--p = {p} must lie in [0, 1]")));
    }
    let dm = DensityMatrix::mixture(&[(p, &psi1), (1.0 - p, &psi2)])?;
    let measure = match &a.measure {
        Some(m) => RoofMeasure::parse(m)?,
        None if dm.n_qubits() == 4 => RoofMeasure::Tau4F1,
        None => RoofMeasure::ThreeTangle,
    };
    let m_values = a
        .m_values
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("--m-values must be integers, got {:?}", a.m_values)))?;
    let config = RoofConfig {
        m_values,
        restarts: a.restarts,
        tolerance: a.tolerance,
        max_iterations: a.max_iterations,
        seed: cli.seed,
    };
    let result = roof::roof_minimize(&dm, measure, &config)?;
    Ok(format::to_json(&result)? + "\n")
}

fn repro(cli: &Cli) -> Result<()> {
    let rec = locc::counterexample_values()?;
    let text = if cli.json {
        format::to_json(&rec)? + "\n"
    } else {
        let mut s = String::new();
        for ((name, expected), value) in locc::COUNTEREXAMPLE_REFERENCE.iter().zip(rec.values()) {
            let _ = writeln!(
                s,
                "{name:<10} {:>16} (reference {expected})",
                format::format_number(value)
            );
        }
        s
    };
    emit(cli, &text)?;
    rec.check()?;
    Ok(())
}
