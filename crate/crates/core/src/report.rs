//! Table rows and point-cloud export.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::coverage::coverage;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::solver::SolveReport;

/// Process exit code for a completed run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

/// `0` when the run reached its solution target, `2` when the budget stopped it.
pub fn exit_code(report: &SolveReport) -> i32 {
    if report.budget_stopped {
        EXIT_BUDGET
    } else {
        EXIT_OK
    }
}

/// One line of a results table: `n, tol, N, C, k, p, time, EC, fill distance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub tol: f64,
    #[serde(rename = "N")]
    pub n_solutions: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub k: f64,
    pub p: usize,
    pub time_seconds: f64,
    pub ec: f64,
    pub fill_distance: Option<f64>,
}

pub fn to_table_row(report: &SolveReport) -> TableRow {
    let cfg = &report.config;
    TableRow {
        n: cfg.n,
        tol: cfg.tol,
        n_solutions: cfg.n_solutions,
        c: cfg.c,
        k: cfg.k,
        p: cfg.p,
        time_seconds: report.elapsed_seconds,
        ec: report.ec,
        fill_distance: report.coverage.map(|c| c.fill_distance),
    }
}

impl TableRow {
    pub const HEADER: &'static str = "n\ttol\tN\tC\tk\tp\tTime\tEC\tfill";

    /// Tab-separated line in [`TableRow::HEADER`] order. Missing fill distance prints `-`.
    pub fn to_tsv(&self) -> String {
        let fill = self.fill_distance.map_or("-".to_string(), |f| format!("{f:.4}"));
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.2}\t{}",
            self.n, self.tol, self.n_solutions, self.c, self.k, self.p, self.time_seconds, self.ec, fill
        )
    }
}

/// Fills `report.coverage` against points on the true zero set. Leaves it
/// unset when the run found no solutions.
pub fn attach_coverage(report: &mut SolveReport, reference: &[Point]) -> Result<()> {
    if report.solutions.is_empty() {
        report.coverage = None;
        return Ok(());
    }
    let points: Vec<Point> = report.solutions.iter().map(|s| s.point.clone()).collect();
    report.coverage = Some(coverage(&points, reference)?);
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Column-wise median of time, EC and fill distance over rows that share a config.
pub fn median_row(rows: &[TableRow]) -> Result<TableRow> {
    let first = rows.first().ok_or(Error::EmptyInput("no rows"))?;
    let fills: Vec<f64> = rows.iter().filter_map(|r| r.fill_distance).collect();
    Ok(TableRow {
        time_seconds: median(rows.iter().map(|r| r.time_seconds).collect()),
        ec: median(rows.iter().map(|r| r.ec).collect()),
        fill_distance: (fills.len() == rows.len()).then(|| median(fills)),
        ..first.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        })
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    config: &'a SolverConfig,
    dim: usize,
    num_fields: usize,
    field_scales: &'a [f64],
    solutions: usize,
    total_evals: u64,
    ec: f64,
    time_seconds: f64,
    budget_stopped: bool,
}

#[derive(Serialize)]
struct JsonSolution<'a> {
    point: &'a [f64],
    residuals: &'a [f64],
    agg: f64,
    chain_id: u64,
    steps: u64,
}

#[derive(Serialize)]
struct JsonExport<'a> {
    metadata: Metadata<'a>,
    solutions: Vec<JsonSolution<'a>>,
}

/// Writes the solutions of `report`.
///
/// CSV has header `x1..xd,res_1..res_m,agg,chain_id,steps` and prints floats in
/// scientific notation with 17 significant digits. JSON holds a `metadata`
/// object and a `solutions` array; floats use the shortest representation that
/// parses back to the same value.
pub fn export_points<W: Write>(report: &SolveReport, format: ExportFormat, mut out: W) -> Result<()> {
    match format {
        ExportFormat::Csv => {
            let mut cols: Vec<String> = (1..=report.dim).map(|i| format!("x{i}")).collect();
            cols.extend((1..=report.num_fields).map(|j| format!("res_{j}")));
            cols.extend(["agg", "chain_id", "steps"].map(String::from));
            writeln!(out, "{}", cols.join(","))?;
            for s in &report.solutions {
                let mut line = String::new();
                for v in s.point.coords().iter().chain(&s.residuals.per_field) {
                    line.push_str(&format!("{v:.16e},"));
                }
                line.push_str(&format!("{:.16e},{},{}", s.residuals.aggregated, s.chain_id, s.steps_taken));
                writeln!(out, "{line}")?;
            }
        }
        ExportFormat::Json => {
            let doc = JsonExport {
                metadata: Metadata {
                    config: &report.config,
                    dim: report.dim,
                    num_fields: report.num_fields,
                    field_scales: &report.field_scales,
                    solutions: report.solutions.len(),
                    total_evals: report.total_evals,
                    ec: report.ec,
                    time_seconds: report.elapsed_seconds,
                    budget_stopped: report.budget_stopped,
                },
                solutions: report
                    .solutions
                    .iter()
                    .map(|s| JsonSolution {
                        point: s.point.coords(),
                        residuals: &s.residuals.per_field,
                        agg: s.residuals.aggregated,
                        chain_id: s.chain_id,
                        steps: s.steps_taken,
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}
