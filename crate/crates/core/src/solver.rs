//! The basic streaming chain solver.
//!
//! Each chain keeps its last two points `z_{i-1}, z_i` and the distance
//! `R_i` between them. A new point is drawn uniformly in the ball of radius
//! `R_i / 2 + k * r(z_i)` around `z_i` (where `r` is the aggregated residual)
//! and accepted only when `r(z_{i+1}) <= C * r(z_i)`. Chains that cannot
//! decrease die and are replaced by fresh uniform chains; chains that reach
//! `r <= tol` contribute their last point as a solution. Every round also
//! injects `p` new chains.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AcceptancePolicy, SolverConfig};
use crate::coverage::CoverageStats;
use crate::error::{Error, Result};
use crate::geometry::{distance, sample_ball, sample_box, Point, RngStream};
use crate::problem::{Problem, ResidualValue};

/// Stream id reserved for the normalization pilot sample.
pub(crate) const PILOT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainStatus {
    Alive,
    Dead,
    Solved,
}

/// One accepted point of a chain: `z_i`, `r(z_i)` and `R_i = |z_i - z_{i-1}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: u64,
    pub point: Point,
    pub residual: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub chain_id: u64,
    pub steps: Vec<TraceStep>,
}

/// Live state of one chain. The chain owns its random stream.
#[derive(Debug, Clone)]
pub struct Chain {
    pub id: u64,
    pub prev: Point,
    pub curr: Point,
    pub r: f64,
    pub res_prev: ResidualValue,
    pub res_curr: ResidualValue,
    pub step: u64,
    pub status: ChainStatus,
    pub trace: Option<Vec<TraceStep>>,
    /// Function evaluations spent by this chain, spawn included.
    pub evals: u64,
    /// Candidates evaluated after spawn (accepted or not).
    pub candidates: u64,
    rng: RngStream,
}

impl Chain {
    pub fn trace(&self) -> Option<ChainTrace> {
        self.trace.as_ref().map(|steps| ChainTrace {
            chain_id: self.id,
            steps: steps.clone(),
        })
    }
}

/// A point whose aggregated residual is within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub point: Point,
    pub residuals: ResidualValue,
    pub chain_id: u64,
    pub steps_taken: u64,
}

/// Outcome of a solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    /// Residual evaluations (points at which the system was evaluated).
    pub total_evals: u64,
    /// Sum of per-field counter increments; `num_fields * total_evals`.
    pub field_evals: u64,
    /// `total_evals / max(1, solutions)`.
    pub ec: f64,
    pub elapsed_seconds: f64,
    pub chains_started: u64,
    pub chains_died: u64,
    pub rounds: u64,
    pub budget_stopped: bool,
    pub dim: usize,
    pub num_fields: usize,
    /// Divisor applied to each field; all 1 unless the run normalized. Solution
    /// residuals are in these scaled units.
    pub field_scales: Vec<f64>,
    pub config: SolverConfig,
    pub coverage: Option<CoverageStats>,
    #[serde(skip)]
    pub traces: Vec<ChainTrace>,
}

pub(crate) fn efficiency(total_evals: u64, solutions: usize) -> f64 {
    total_evals as f64 / solutions.max(1) as f64
}

/// Applies `cfg.tol` and optional normalization. Returns the prepared problem and
/// the pilot evaluations spent.
pub(crate) fn prepare(problem: &Problem, cfg: &SolverConfig) -> Result<(Problem, u64)> {
    cfg.validate()?;
    let p = problem.with_tol(cfg.tol)?;
    if cfg.normalize {
        let mut rng = RngStream::new(cfg.seed, PILOT_STREAM);
        Ok((p.normalize(cfg.pilot_size, &mut rng)?, cfg.pilot_size as u64))
    } else {
        Ok((p, 0))
    }
}

pub(crate) fn field_scales(problem: &Problem) -> Vec<f64> {
    problem.fields().iter().map(|f| f.divisor()).collect()
}

pub(crate) struct Proposal {
    pub accepted: Option<(Point, ResidualValue)>,
    pub evals: u64,
}

/// Draws up to `attempts` candidates in `B(center, radius)` and returns the first
/// one with residual `<= threshold`. Candidates outside the domain are redrawn
/// without evaluation; running out of domain redraws ends the proposal.
pub(crate) fn propose(
    problem: &Problem,
    cfg: &SolverConfig,
    center: &Point,
    radius: f64,
    threshold: f64,
    attempts: usize,
    rng: &mut RngStream,
) -> Result<Proposal> {
    let domain = problem.domain();
    let mut evals = 0;
    for _ in 0..attempts {
        let mut candidate = None;
        for _ in 0..cfg.max_domain_retries {
            let z = sample_ball(center, radius, rng)?;
            if domain.contains(&z) {
                candidate = Some(z);
                break;
            }
        }
        let Some(z) = candidate else {
            return Ok(Proposal {
                accepted: None,
                evals,
            });
        };
        let rv = problem.evaluate(&z)?;
        evals += 1;
        if rv.aggregated <= threshold {
            return Ok(Proposal {
                accepted: Some((z, rv)),
                evals,
            });
        }
    }
    Ok(Proposal {
        accepted: None,
        evals,
    })
}

/// Starts a chain from two independent uniform points of the domain.
pub fn spawn_chain(problem: &Problem, cfg: &SolverConfig, id: u64, mut rng: RngStream) -> Result<Chain> {
    let domain = problem.domain();
    let prev = sample_box(domain, &mut rng);
    let curr = sample_box(domain, &mut rng);
    let res_prev = problem.evaluate(&prev)?;
    let res_curr = problem.evaluate(&curr)?;
    let r = distance(&prev, &curr)?;
    let status = if problem.is_solution(&res_curr) {
        ChainStatus::Solved
    } else {
        ChainStatus::Alive
    };
    let trace = cfg.record_traces.then(|| {
        vec![TraceStep {
            step: 1,
            point: curr.clone(),
            residual: res_curr.aggregated,
            r,
        }]
    });
    Ok(Chain {
        id,
        prev,
        curr,
        r,
        res_prev,
        res_curr,
        step: 1,
        status,
        trace,
        evals: 2,
        candidates: 0,
        rng,
    })
}

/// Advances an alive chain by one accepted point, or marks it dead.
pub fn step_chain(chain: &mut Chain, problem: &Problem, cfg: &SolverConfig) -> Result<()> {
    if chain.status != ChainStatus::Alive {
        return Err(Error::InvalidArgument(format!(
            "chain {} is not alive",
            chain.id
        )));
    }
    let radius = chain.r / 2.0 + cfg.k * chain.res_curr.aggregated;
    let threshold = cfg.c * chain.res_curr.aggregated;
    let attempts = match cfg.policy {
        AcceptancePolicy::Retry => cfg.max_candidate_retries,
        AcceptancePolicy::Strict => 1,
    };
    let proposal = propose(
        problem,
        cfg,
        &chain.curr,
        radius,
        threshold,
        attempts,
        &mut chain.rng,
    )?;
    chain.evals += proposal.evals;
    chain.candidates += proposal.evals;
    match proposal.accepted {
        None => chain.status = ChainStatus::Dead,
        Some((z, rv)) => {
            let old = std::mem::replace(&mut chain.curr, z);
            chain.prev = old;
            chain.res_prev = std::mem::replace(&mut chain.res_curr, rv);
            chain.r = distance(&chain.prev, &chain.curr)?;
            chain.step += 1;
            if let Some(trace) = chain.trace.as_mut() {
                trace.push(TraceStep {
                    step: chain.step,
                    point: chain.curr.clone(),
                    residual: chain.res_curr.aggregated,
                    r: chain.r,
                });
            }
            if problem.is_solution(&chain.res_curr) {
                chain.status = ChainStatus::Solved;
            }
        }
    }
    Ok(())
}

/// Right-hand side of the geometric bound on the step length `R_n` of a chain
/// whose residual decays as `a * C^i`:
///
/// `R0 / 2^n + a * k * C^(n-1) * sum_{j=0}^{n-1} (1 / (2C))^j`.
pub fn rn_bound(r0: f64, a: f64, k: f64, c: f64, n: u64) -> Result<f64> {
    if c.is_nan() || c <= 0.5 {
        return Err(Error::InvalidArgument(format!(
            "bound requires C > 1/2, got {c}"
        )));
    }
    if n == 0 || a.is_nan() || a < 0.0 || r0.is_nan() || r0 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bound requires n >= 1, a >= 0, R0 > 0 (n={n}, a={a}, R0={r0})"
        )));
    }
    let q = 1.0 / (2.0 * c);
    // geometric sum in closed form; q < 1 since C > 1/2
    let sum = (1.0 - q.powf(n as f64)) / (1.0 - q);
    Ok(r0 / 2f64.powf(n as f64) + a * k * c.powf((n - 1) as f64) * sum)
}

struct Population {
    chains: Vec<Chain>,
    next_id: u64,
    started: u64,
}

impl Population {
    fn spawn(&mut self, problem: &Problem, cfg: &SolverConfig) -> Result<()> {
        let id = self.next_id;
        self.next_id += 1;
        self.started += 1;
        self.chains
            .push(spawn_chain(problem, cfg, id, RngStream::new(cfg.seed, id))?);
        Ok(())
    }
}

fn step_all(
    chains: &mut [Chain],
    problem: &Problem,
    cfg: &SolverConfig,
    pool: Option<&rayon::ThreadPool>,
) -> Result<()> {
    let step = |c: &mut Chain| {
        if c.status == ChainStatus::Alive {
            step_chain(c, problem, cfg)
        } else {
            Ok(())
        }
    };
    let results: Vec<Result<()>> = match pool {
        Some(pool) => pool.install(|| chains.par_iter_mut().map(step).collect()),
        None => chains.iter_mut().map(step).collect(),
    };
    results.into_iter().collect()
}

pub(crate) fn thread_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Runs the basic solver until `cfg.n_solutions` solutions are found or the
/// evaluation budget is spent (checked between rounds).
pub fn solve(problem: &Problem, cfg: &SolverConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let counter_start = problem.field_eval_count();
    let (problem, pilot_evals) = prepare(problem, cfg)?;
    let pool = thread_pool(cfg.threads)?;

    let mut pop = Population {
        chains: Vec::with_capacity(cfg.n + cfg.p),
        next_id: 0,
        started: 0,
    };
    for _ in 0..cfg.n {
        pop.spawn(&problem, cfg)?;
    }

    let mut solutions = Vec::new();
    let mut traces = Vec::new();
    let mut retired_evals = 0u64;
    let mut died = 0u64;
    let mut rounds = 0u64;
    let mut budget_stopped = false;

    loop {
        // harvest in chain-id order
        let mut finished = 0usize;
        let mut keep = Vec::with_capacity(pop.chains.len());
        for chain in pop.chains.drain(..) {
            match chain.status {
                ChainStatus::Alive => keep.push(chain),
                status => {
                    finished += 1;
                    retired_evals += chain.evals;
                    if status == ChainStatus::Dead {
                        died += 1;
                    } else if solutions.len() < cfg.n_solutions {
                        solutions.push(Solution {
                            point: chain.curr.clone(),
                            residuals: chain.res_curr.clone(),
                            chain_id: chain.id,
                            steps_taken: chain.step,
                        });
                    }
                    if let Some(t) = chain.trace() {
                        traces.push(t);
                    }
                }
            }
        }
        pop.chains = keep;

        if solutions.len() >= cfg.n_solutions {
            break;
        }
        let spent = pilot_evals + retired_evals + pop.chains.iter().map(|c| c.evals).sum::<u64>();
        if cfg.eval_budget.is_some_and(|b| spent >= b) {
            budget_stopped = true;
            break;
        }

        for _ in 0..finished {
            pop.spawn(&problem, cfg)?;
        }
        rounds += 1;
        step_all(&mut pop.chains, &problem, cfg, pool.as_ref())?;
        for _ in 0..cfg.p {
            pop.spawn(&problem, cfg)?;
        }
    }

    for chain in &pop.chains {
        retired_evals += chain.evals;
        if let Some(t) = chain.trace() {
            traces.push(t);
        }
    }
    traces.sort_by_key(|t| t.chain_id);
    solutions.sort_by_key(|s| (s.chain_id, s.steps_taken));

    let total_evals = pilot_evals + retired_evals;
    Ok(SolveReport {
        ec: efficiency(total_evals, solutions.len()),
        solutions,
        total_evals,
        field_evals: problem.field_eval_count() - counter_start,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        chains_started: pop.started,
        chains_died: died,
        rounds,
        budget_stopped,
        dim: problem.dim(),
        num_fields: problem.num_fields(),
        field_scales: field_scales(&problem),
        config: cfg.clone(),
        coverage: None,
        traces,
    })
}

/// Writes one CSV record per accepted chain point:
/// `chain_id,step,x1..xd,residual,R`.
pub fn write_trace_csv<W: Write>(traces: &[ChainTrace], dim: usize, mut out: W) -> Result<()> {
    let mut header = String::from("chain_id,step");
    for i in 1..=dim {
        header.push_str(&format!(",x{i}"));
    }
    header.push_str(",residual,R");
    writeln!(out, "{header}")?;
    for t in traces {
        for s in &t.steps {
            let mut line = format!("{},{}", t.chain_id, s.step);
            for x in s.point.coords() {
                line.push_str(&format!(",{x:.16e}"));
            }
            line.push_str(&format!(",{:.16e},{:.16e}", s.residual, s.r));
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
