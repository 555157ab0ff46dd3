use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cylhardy::combinatorics::CombinatoricsTable;
use cylhardy::quadrature::QuadratureSpec;
use cylhardy::report::{combinatorics_csv, emit_outputs, run_suite, suite_statements, SuiteConfig, STATEMENTS, SUITES};
use cylhardy::verifiers::{sharpness_sweep, SweepStatement};

#[derive(Parser)]
#[command(name = "cylhardy", version, about = "Numerical verification of critical logarithmic Sobolev/Hardy identities and inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write the report.
    Run(RunArgs),
    /// Print the O(k,m) and a_k triangle.
    CombinatoricsTable {
        #[arg(long, default_value_t = 12)]
        k_max: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Rayleigh quotients along the extremal family as ε → 0.
    SharpnessSweep(SweepArgs),
    /// List statement ids and named suites.
    ListStatements,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Named suite; replaces the statement list of a config file.
    #[arg(long)]
    suite: Option<String>,
    /// TOML config; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    complex: Option<bool>,
    #[arg(long)]
    nonseparable: Option<bool>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Output directory (default: ./cylhardy-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// `critical-sobolev` (uses --p) or `higher-order` (uses --k).
    #[arg(long, default_value = "critical-sobolev")]
    statement: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
    epsilons: Vec<f64>,
    /// Allowed excess of the last ratio over 1.
    #[arg(long, default_value_t = 0.01)]
    bound: f64,
}

fn effective_config(a: &RunArgs) -> Result<SuiteConfig> {
    let mut c = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SuiteConfig::from_toml(&text)?
        }
        None => SuiteConfig::named(a.suite.as_deref().unwrap_or("default"))?,
    };
    if let (Some(name), Some(_)) = (&a.suite, &a.config) {
        c.suite = name.clone();
        c.statements = suite_statements(name)?.into_iter().map(String::from).collect();
    }
    if let Some(v) = a.seed {
        c.corpus.seed = v;
    }
    if let Some(v) = a.count {
        c.corpus.count = v;
    }
    if let Some(v) = a.complex {
        c.corpus.complex = v;
    }
    if let Some(v) = a.nonseparable {
        c.corpus.nonseparable = v;
    }
    if let Some(v) = a.rel_tol {
        c.quadrature.rel_tol = v;
    }
    if let Some(v) = a.abs_tol {
        c.quadrature.abs_tol = v;
    }
    if let Some(v) = &a.out {
        c.output.dir = Some(v.display().to_string());
    }
    if let Some(v) = &a.format {
        c.output.formats = v.clone();
    }
    Ok(c)
}

fn run(a: RunArgs) -> Result<bool> {
    let config = effective_config(&a)?;
    if a.print_config {
        print!("{}", config.to_toml()?);
        return Ok(true);
    }
    let mut report = run_suite(&config)?;
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    report.timestamp = Some(secs.to_string());
    let dir = PathBuf::from(config.output.dir.as_deref().unwrap_or("cylhardy-out"));
    let written = emit_outputs(&report, &dir, &config.output.formats)?;

    let s = &report.summary;
    println!("suite {} config {}", report.suite, &report.config_hash[..12]);
    for st in &s.statements {
        let mut worst = String::new();
        if let Some(r) = st.worst_identity_residual {
            worst.push_str(&format!("worst residual {r:.3e}  "));
        }
        if let Some(r) = st.min_inequality_residual {
            worst.push_str(&format!("min slack {r:.3e}"));
        }
        println!("  {:<18} {:>4} records {:>3} failed  {worst}", st.statement, st.records, st.failed);
    }
    for c in &report.checks {
        let v = if c.passed { "pass" } else { "FAIL" };
        println!("  check {:<16} {:<20} residual {:.3e} ≤ {:.0e}  {v}", c.path, c.setting, c.residual, c.tolerance);
    }
    for sw in &report.sweeps {
        let v = if sw.report.passed() { "pass" } else { "FAIL" };
        let last = sw.report.rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
        println!("  sweep {:<24} last ratio {last:.6}  {v}", sw.report.statement);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    println!(
        "records {}/{} passed, checks {}/{}, sweeps {}/{}",
        s.passed,
        s.records,
        s.checks - s.checks_failed,
        s.checks,
        s.sweeps - s.sweeps_failed,
        s.sweeps
    );
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(report.passed())
}

fn sweep(a: SweepArgs) -> Result<bool> {
    let stmt = match a.statement.as_str() {
        "critical-sobolev" => SweepStatement::CriticalSobolev { p: a.p },
        "higher-order" => SweepStatement::HigherOrder { k: a.k },
        other => bail!("unknown sweep statement `{other}` (expected critical-sobolev or higher-order)"),
    };
    let r = sharpness_sweep(stmt, a.delta, &a.epsilons, a.bound, &QuadratureSpec::default())?;
    print!("{}", r.to_csv());
    eprintln!(
        "{}: above one {}, decreasing {}, within bound {}, converged {} ({})",
        r.statement, r.above_one, r.decreasing, r.within_bound, r.converged, r.note
    );
    Ok(r.passed())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::CombinatoricsTable { k_max, format } => {
            match format {
                TableFormat::Csv => print!("{}", combinatorics_csv(k_max)?),
                TableFormat::Json => {
                    let rows = CombinatoricsTable::build(k_max)?.rows();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
            }
            Ok(true)
        }
        Command::SharpnessSweep(a) => sweep(a),
        Command::ListStatements => {
            for s in STATEMENTS {
                let class = serde_json::to_value(s.class)?;
                println!("{:<18} {:<10} {}", s.id, class.as_str().unwrap_or_default(), s.summary);
            }
            println!();
            for name in SUITES {
                println!("suite {name}: {}", suite_statements(name)?.join(" "));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
