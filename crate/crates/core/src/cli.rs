//! Command-line front end: `solve`, `bench`, `sweep` and `list`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchmarkCase};
use crate::config::{AcceptancePolicy, Algorithm, SolverConfig};
use crate::enhanced::solve_enhanced_with_genealogy;
use crate::error::{Error, Result};
use crate::expr::parse;
use crate::geometry::{BoxDomain, RngStream};
use crate::problem::{Problem, ScalarField};
use crate::report::{self, attach_coverage, export_points, median_row, to_table_row, ExportFormat, TableRow};
use crate::solver::{write_trace_csv, SolveReport};

/// Stream used to draw coverage reference points.
const REFERENCE_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Parser)]
#[command(name = "rootcover", version, about = "Cover the zero set of functions and systems with random chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and export the solutions.
    Solve(SolveArgs),
    /// Run a parameter study over several seeds.
    Bench(BenchArgs),
    /// Vary one parameter over a list of values.
    Sweep(SweepArgs),
    /// List benchmarks and suites.
    List,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Registered benchmark name.
    #[arg(long, conflicts_with_all = ["expr", "dim", "domain"])]
    pub bench: Option<String>,
    /// Field expression in x1..xd; repeat for a system.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Vec<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Box as `lo,hi;lo,hi;...`, or a single `lo,hi` for every axis.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
}

/// Options that change how a run executes but not the problem row.
#[derive(Debug, Clone, Default, Args)]
pub struct ExecArgs {
    #[arg(long)]
    pub algo: Option<Algorithm>,
    #[arg(long)]
    pub branching: Option<usize>,
    #[arg(long)]
    pub policy: Option<AcceptancePolicy>,
    /// Rescale each field by its mean magnitude on a pilot sample.
    #[arg(long)]
    pub normalize: bool,
    /// Evaluation budget; the run stops between rounds once it is spent.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "N")]
    pub n_solutions: Option<usize>,
    #[arg(long = "R0")]
    pub r0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Solution export path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: ExportFormat,
    /// Per-chain trace CSV (root-to-solution paths for the enhanced solver).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Genealogy CSV of the enhanced solver.
    #[arg(long)]
    pub genealogy: Option<PathBuf>,
    /// Reference points used for the fill distance, when the zero set is known.
    #[arg(long, default_value_t = 500)]
    pub reference: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub exec: ExecArgs,
    #[arg(long, default_value_t = 500)]
    pub reference: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// One of n, p, C, k, tol, N, R0, branching, seed.
    #[arg(long)]
    pub param: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub values: Vec<String>,
    #[arg(long, default_value_t = 500)]
    pub reference: usize,
}

/// Parses `lo,hi;lo,hi;...`. A single pair is replicated to `dim` axes.
pub fn parse_domain(s: &str, dim: usize) -> Result<BoxDomain> {
    let bad = || Error::InvalidArgument(format!("--domain: cannot parse `{s}` (expected lo,hi;lo,hi;...)"));
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = part.split_once(',').ok_or_else(bad)?;
        lower.push(lo.trim().parse::<f64>().map_err(|_| bad())?);
        upper.push(hi.trim().parse::<f64>().map_err(|_| bad())?);
    }
    if lower.len() == 1 && dim > 1 {
        lower = vec![lower[0]; dim];
        upper = vec![upper[0]; dim];
    }
    if lower.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "--domain has {} intervals but --dim is {dim}",
            lower.len()
        )));
    }
    BoxDomain::new(lower, upper)
}

/// The problem, its default config, and the registry case when there is one.
fn resolve_problem(args: &ProblemArgs) -> Result<(Problem, SolverConfig, Option<BenchmarkCase>)> {
    if let Some(name) = &args.bench {
        let case = bench::case(name)?;
        return Ok((case.problem.clone(), case.config.clone(), Some(case)));
    }
    if args.expr.is_empty() {
        return Err(Error::InvalidArgument("one of --bench or --expr is required".into()));
    }
    let dim = args
        .dim
        .ok_or_else(|| Error::InvalidArgument("--expr requires --dim".into()))?;
    let domain = parse_domain(
        args.domain
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--expr requires --domain".into()))?,
        dim,
    )?;
    let fields = args
        .expr
        .iter()
        .map(|src| Ok(ScalarField::new(dim, parse(src, dim)?).with_label(src.clone())))
        .collect::<Result<Vec<_>>>()?;
    let cfg = SolverConfig::default();
    Ok((Problem::new(fields, domain, cfg.tol)?, cfg, None))
}

impl ExecArgs {
    fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(v) = self.algo {
            cfg.algorithm = v;
        }
        if let Some(v) = self.branching {
            cfg.branching = v;
        }
        if let Some(v) = self.policy {
            cfg.policy = v;
        }
        if self.normalize {
            cfg.normalize = true;
        }
        if let Some(v) = self.budget {
            cfg.eval_budget = Some(v);
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
    }
}

impl ParamArgs {
    fn apply(&self, cfg: &mut SolverConfig) {
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(n, p, c, k, tol, n_solutions, seed);
        if self.r0.is_some() {
            cfg.r0 = self.r0;
        }
        self.exec.apply(cfg);
    }
}

/// Measures coverage when the case has a known zero set.
fn add_coverage(report: &mut SolveReport, case: Option<&BenchmarkCase>, reference: usize) -> Result<()> {
    if let Some(case) = case.filter(|c| c.reference.is_some() && reference > 0) {
        let mut rng = RngStream::new(report.config.seed, REFERENCE_STREAM);
        let refs = bench::reference_points(case, reference, &mut rng)?;
        attach_coverage(report, &refs)?;
    }
    Ok(())
}

fn run_with_coverage(
    problem: &Problem,
    cfg: &SolverConfig,
    case: Option<&BenchmarkCase>,
    reference: usize,
) -> Result<SolveReport> {
    let mut report = crate::run(problem, cfg)?;
    add_coverage(&mut report, case, reference)?;
    Ok(report)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn run_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (problem, mut cfg, case) = resolve_problem(&args.problem)?;
    args.params.apply(&mut cfg);
    cfg.record_traces = args.trace.is_some();
    if args.genealogy.is_some() && cfg.algorithm != Algorithm::Enhanced {
        return Err(Error::InvalidArgument("--genealogy requires --algo enhanced".into()));
    }

    let report = if let Some(path) = &args.genealogy {
        let (mut report, tree) = solve_enhanced_with_genealogy(&problem, &cfg, cfg.branching)?;
        let mut w = create(path)?;
        tree.write_csv(&mut w)?;
        w.flush()?;
        add_coverage(&mut report, case.as_ref(), args.reference)?;
        report
    } else {
        run_with_coverage(&problem, &cfg, case.as_ref(), args.reference)?
    };

    if let Some(path) = &args.out {
        let mut w = create(path)?;
        export_points(&report, args.format, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.trace {
        let mut w = create(path)?;
        write_trace_csv(&report.traces, report.dim, &mut w)?;
        w.flush()?;
    }
    writeln!(out, "{}", TableRow::HEADER)?;
    writeln!(out, "{}", to_table_row(&report).to_tsv())?;
    Ok(report::exit_code(&report))
}

pub fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let rows = bench::suite(&args.suite)?;
    if args.seeds.is_empty() {
        return Err(Error::InvalidArgument("--seeds must list at least one seed".into()));
    }
    let mut code = report::EXIT_OK;
    writeln!(out, "case\tseed\t{}", TableRow::HEADER)?;
    for row in rows {
        let case = bench::case(&row.case)?;
        let mut per_seed = Vec::new();
        for &seed in &args.seeds {
            let mut cfg = row.config.clone();
            args.exec.apply(&mut cfg);
            cfg.seed = seed;
            let report = run_with_coverage(&case.problem, &cfg, Some(&case), args.reference)?;
            if report.budget_stopped {
                code = report::EXIT_BUDGET;
            }
            let table_row = to_table_row(&report);
            writeln!(out, "{}\t{seed}\t{}", row.case, table_row.to_tsv())?;
            per_seed.push(table_row);
        }
        writeln!(out, "{}\tmedian\t{}", row.case, median_row(&per_seed)?.to_tsv())?;
    }
    Ok(code)
}

fn parse_value<T: std::str::FromStr>(name: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("--values: `{value}` is not valid for `{name}`")))
}

/// Sets one named parameter from its text form.
pub fn set_param(cfg: &mut SolverConfig, name: &str, value: &str) -> Result<()> {
    match name {
        "n" => cfg.n = parse_value(name, value)?,
        "p" => cfg.p = parse_value(name, value)?,
        "N" => cfg.n_solutions = parse_value(name, value)?,
        "branching" => cfg.branching = parse_value(name, value)?,
        "seed" => cfg.seed = parse_value(name, value)?,
        "C" => cfg.c = parse_value(name, value)?,
        "k" => cfg.k = parse_value(name, value)?,
        "tol" => cfg.tol = parse_value(name, value)?,
        "R0" => cfg.r0 = Some(parse_value(name, value)?),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "--param: unknown parameter `{name}` (expected n, p, C, k, tol, N, R0, branching or seed)"
            )))
        }
    }
    Ok(())
}

pub fn run_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let (problem, mut base, case) = resolve_problem(&args.problem)?;
    args.params.apply(&mut base);
    // validate every value before running anything
    let configs = args
        .values
        .iter()
        .map(|v| {
            let mut cfg = base.clone();
            set_param(&mut cfg, &args.param, v)?;
            cfg.validate()?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut code = report::EXIT_OK;
    writeln!(out, "param\tvalue\t{}", TableRow::HEADER)?;
    for (value, cfg) in args.values.iter().zip(configs) {
        let report = run_with_coverage(&problem, &cfg, case.as_ref(), args.reference)?;
        if report.budget_stopped {
            code = report::EXIT_BUDGET;
        }
        writeln!(out, "{}\t{value}\t{}", args.param, to_table_row(&report).to_tsv())?;
    }
    Ok(code)
}

pub fn run_list(out: &mut dyn Write) -> Result<i32> {
    writeln!(out, "name\tdim\tfields\treference\tdescription")?;
    for c in bench::registry() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            c.name,
            c.problem.dim(),
            c.problem.num_fields(),
            if c.reference.is_some() { "yes" } else { "no" },
            c.description
        )?;
    }
    writeln!(out)?;
    writeln!(out, "suites: {}", bench::SUITES.join(", "))?;
    Ok(report::EXIT_OK)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Solve(a) => run_solve(a, out),
        Command::Bench(a) => run_bench(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::List => run_list(out),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code: 0 on success, 1 on any error, 2 when a budget stopped a run.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => report::EXIT_OK,
                _ => report::EXIT_ERROR,
            };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            report::EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["rootcover"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn domain_syntax() {
        let d = parse_domain("-1,1;-2,3", 2).unwrap();
        assert_eq!(d.lower(), &[-1.0, -2.0]);
        assert_eq!(d.upper(), &[1.0, 3.0]);
        let d = parse_domain("-1,1", 3).unwrap();
        assert_eq!(d.lower(), &[-1.0; 3]);
        assert!(parse_domain("-1,1;0,1", 3).is_err());
        assert!(parse_domain("1,-1", 1).is_err());
        assert!(parse_domain("a,b", 1).is_err());
    }

    #[test]
    fn set_param_by_name() {
        let mut cfg = SolverConfig::default();
        set_param(&mut cfg, "C", "0.55").unwrap();
        set_param(&mut cfg, "N", "7").unwrap();
        set_param(&mut cfg, "R0", "0.3").unwrap();
        assert_eq!((cfg.c, cfg.n_solutions, cfg.r0), (0.55, 7, Some(0.3)));
        assert!(set_param(&mut cfg, "q", "1").is_err());
        assert!(set_param(&mut cfg, "n", "1.5").is_err());
    }

    #[test]
    fn solve_prints_table_row() {
        let (code, out, _) = run_args(&["solve", "--bench", "ex1", "--N", "5", "--seed", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], TableRow::HEADER);
        assert!(lines[1].starts_with("5\t0.01\t5\t0.75\t1\t1\t"));
    }

    #[test]
    fn errors_exit_one() {
        assert_eq!(run_args(&["solve", "--bench", "nope"]).0, 1);
        assert_eq!(run_args(&["solve", "--bench", "ex1", "--C", "0.2"]).0, 1);
        assert_eq!(run_args(&["solve", "--expr", "x1^2", "--dim", "1"]).0, 1);
        assert_eq!(run_args(&["solve", "--bench", "ex1", "--expr", "x1"]).0, 1);
        assert_eq!(run_args(&["solve", "--bench", "ex1", "--bogus"]).0, 1);
        assert_eq!(run_args(&["solve"]).0, 1);
        let (code, _, err) = run_args(&["sweep", "--bench", "ex1", "--param", "zz", "--values", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("zz"));
    }

    #[test]
    fn budget_stop_exits_two() {
        let (code, _, _) = run_args(&["solve", "--bench", "ex1", "--budget", "50", "--seed", "1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn sweep_rows_in_order() {
        let (code, out, _) = run_args(&[
            "sweep", "--bench", "ex2", "--N", "5", "--param", "C", "--values", "0.55,0.75,0.95",
        ]);
        assert_eq!(code, 0);
        let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
        assert_eq!(rows.len(), 3);
        for (row, v) in rows.iter().zip(["0.55", "0.75", "0.95"]) {
            assert_eq!(row[0], "C");
            assert_eq!(row[1], v);
            // C column of the table row
            assert_eq!(row[2 + 3], v);
        }
    }

    #[test]
    fn list_names_every_case() {
        let (code, out, _) = run_args(&["list"]);
        assert_eq!(code, 0);
        for name in bench::NAMES {
            assert!(out.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{name}");
        }
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["--help"]).0, 0);
    }
}
