//! `rtw`: exact treewidth with certificates for PACE `.gr` files.
//!
//! Exit codes: 0 success, 1 usage, 2 parse, 3 verification failure, 4 timeout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rtw_core::io::{emit_certificate, emit_td, parse_certificate, parse_gr};
use rtw_core::oracle::{self, ORACLE_MAX_N};
use rtw_core::pmc::DEFAULT_MAX_SOLUTIONS;
use rtw_core::solver::DEFAULT_UNIT_BUDGET;
use rtw_core::{compute_treewidth_with, verify_certificate, Graph, SolveError, SolverConfig};

#[derive(Parser)]
#[command(
    name = "rtw",
    version,
    about = "Exact treewidth with minimal-contraction certificates"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Search steps granted per edge index
    #[arg(long, global = true, default_value_t = DEFAULT_UNIT_BUDGET)]
    budget: u64,
    /// Wall-clock limit per instance, in seconds
    #[arg(long = "timeout-s", global = true)]
    timeout_s: Option<f64>,
    /// Shuffle equally ranked edges with this seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip safe-separator preprocessing
    #[arg(long = "no-safe-sep", global = true)]
    no_safe_sep: bool,
    /// Decompositions traced back when transferring PMCs
    #[arg(long = "max-solutions", global = true, default_value_t = DEFAULT_MAX_SOLUTIONS)]
    max_solutions: usize,
    /// error, warn, info, debug or trace
    #[arg(long = "log-level", global = true, default_value = "warn")]
    log_level: log::LevelFilter,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance, write the decomposition and certificate
    Solve {
        input: PathBuf,
        /// Decomposition output (default: input with extension .td)
        #[arg(long)]
        td: Option<PathBuf>,
        /// Certificate output (default: input with extension .cert)
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Check a certificate against a graph
    Verify { input: PathBuf, cert: PathBuf },
    /// Solve every .gr file in a directory and print a table
    Bench { dir: PathBuf },
    /// Brute-force treewidth of a small instance
    Oracle { input: PathBuf },
}

enum Failure {
    Usage(anyhow::Error),
    Parse(anyhow::Error),
    Verify(anyhow::Error),
    Timeout,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Verify(_) => 3,
            Failure::Timeout => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl Opts {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            unit_budget: self.budget,
            max_solutions: self.max_solutions,
            safe_separators: !self.no_safe_sep,
            deadline: self
                .timeout_s
                .map(|s| Instant::now() + Duration::from_secs_f64(s)),
            seed: self.seed,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Usage)
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse_gr(&read(path)?).map_err(|e| Failure::Parse(anyhow!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Usage)
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::Timeout => Failure::Timeout,
        other => Failure::Usage(anyhow!("solver failed: {other}")),
    }
}

fn solve(
    opts: &Opts,
    input: &Path,
    td: Option<PathBuf>,
    cert: Option<PathBuf>,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let c = compute_treewidth_with(&g, &opts.config()).map_err(solve_error)?;
    let td_text = emit_td(&g, &c.decomposition)
        .map_err(|v| Failure::Verify(anyhow!("solver produced an invalid decomposition: {v}")))?;
    let cert_text = emit_certificate(&g, &c)
        .map_err(|v| Failure::Verify(anyhow!("solver produced an invalid decomposition: {v}")))?;
    write(&td.unwrap_or_else(|| input.with_extension("td")), &td_text)?;
    write(
        &cert.unwrap_or_else(|| input.with_extension("cert")),
        &cert_text,
    )?;
    println!("tw = {}", c.width);
    Ok(())
}

fn verify(input: &Path, cert: &Path) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let doc = parse_certificate(&read(cert)?)
        .map_err(|e| Failure::Parse(anyhow!("{}: {e}", cert.display())))?;
    let c = doc
        .into_certificate(&g)
        .map_err(|e| Failure::Verify(anyhow!("witness: {e}")))?;
    verify_certificate(&g, &c).map_err(|f| Failure::Verify(anyhow!("{f}")))?;
    println!("ok: tw = {}", c.width);
    Ok(())
}

fn bench(opts: &Opts, dir: &Path) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "gr"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Usage(anyhow!("no .gr files in {}", dir.display())));
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "instance\tn\tm\twidth\ttime_s\ttimed_out");
    let (mut unparsed, mut failed, mut timeouts) = (0, 0, 0);
    for path in files {
        let name = path
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        let g = match load_graph(&path) {
            Ok(g) => g,
            Err(e) => {
                report(&e);
                unparsed += 1;
                continue;
            }
        };
        let start = Instant::now();
        let result = compute_treewidth_with(&g, &opts.config());
        let secs = start.elapsed().as_secs_f64();
        let (width, timed_out) = match result {
            Ok(c) => (c.width.to_string(), false),
            Err(SolveError::Timeout) => {
                timeouts += 1;
                ("-".to_string(), true)
            }
            Err(e) => {
                log::error!("{name}: {e}");
                failed += 1;
                ("-".to_string(), false)
            }
        };
        let _ = writeln!(
            out,
            "{name}\t{}\t{}\t{width}\t{secs:.3}\t{timed_out}",
            g.n(),
            g.m()
        );
        let _ = out.flush();
    }
    if unparsed > 0 {
        Err(Failure::Parse(anyhow!(
            "{unparsed} instance(s) could not be read"
        )))
    } else if failed > 0 {
        Err(Failure::Usage(anyhow!("{failed} instance(s) failed")))
    } else if timeouts > 0 {
        Err(Failure::Timeout)
    } else {
        Ok(())
    }
}

fn run_oracle(input: &Path) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let tw = oracle::treewidth(&g).ok_or_else(|| {
        Failure::Usage(anyhow!(
            "oracle handles at most {ORACLE_MAX_N} vertices, got {}",
            g.n()
        ))
    })?;
    println!("tw = {tw}");
    Ok(())
}

fn report(f: &Failure) {
    match f {
        Failure::Usage(e) => eprintln!("error: {e:#}"),
        Failure::Parse(e) => eprintln!("parse error: {e:#}"),
        Failure::Verify(e) => eprintln!("verification failed: {e:#}"),
        Failure::Timeout => eprintln!("timeout"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.opts.log_level)
        .init();
    let result = match cli.cmd {
        Cmd::Solve { input, td, cert } => solve(&cli.opts, &input, td, cert),
        Cmd::Verify { input, cert } => verify(&input, &cert),
        Cmd::Bench { dir } => bench(&cli.opts, &dir),
        Cmd::Oracle { input } => run_oracle(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code())
        }
    }
}
