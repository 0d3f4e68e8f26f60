//! Genealogy-tree variant of the chain solver.
//!
//! Every accepted point becomes a node that stays eligible to produce
//! offspring in later steps, so one lucky ancestor keeps seeding new
//! descendants instead of being discarded after its first child. A child is
//! drawn in the ball of radius `R/2 + k * r(parent)` around its parent, where
//! `R` is the parent's distance to its own parent (`R0` for roots), and is kept
//! only when `r(child) <= C * r(parent)`.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{AcceptancePolicy, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{distance, sample_box, Point, RngStream};
use crate::problem::{Problem, ResidualValue};
use crate::solver::{efficiency, field_scales, prepare, propose, thread_pool, ChainTrace, Solution, SolveReport, TraceStep};

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub point: Point,
    pub residual: ResidualValue,
    /// Distance to the parent; `R0` for roots.
    pub r_to_parent: f64,
    pub generation: u64,
    pub eligible: bool,
    pub offspring_count: u64,
    /// Residual within tolerance; such nodes are harvested and stop reproducing.
    pub solved: bool,
    rng: RngStream,
}

impl TreeNode {
    fn new(
        id: u64,
        parent: Option<&TreeNode>,
        point: Point,
        residual: ResidualValue,
        r_to_parent: f64,
        seed: u64,
        tol: f64,
    ) -> Self {
        let solved = residual.aggregated <= tol;
        TreeNode {
            id,
            parent_id: parent.map(|p| p.id),
            point,
            residual,
            r_to_parent,
            generation: parent.map_or(0, |p| p.generation + 1),
            eligible: !solved,
            offspring_count: 0,
            solved,
            rng: RngStream::new(seed, id),
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent_id.is_none()
    }
}

/// Children proposed by one node, before ids are assigned.
struct Brood {
    children: Vec<(Point, ResidualValue, f64)>,
    evals: u64,
}

fn brood(node: &mut TreeNode, problem: &Problem, cfg: &SolverConfig, branching: usize) -> Result<Brood> {
    let radius = node.r_to_parent / 2.0 + cfg.k * node.residual.aggregated;
    let threshold = cfg.c * node.residual.aggregated;
    let attempts = match cfg.policy {
        AcceptancePolicy::Retry => cfg.max_candidate_retries,
        AcceptancePolicy::Strict => 1,
    };
    let mut out = Brood {
        children: Vec::new(),
        evals: 0,
    };
    for _ in 0..branching {
        let prop = propose(problem, cfg, &node.point, radius, threshold, attempts, &mut node.rng)?;
        out.evals += prop.evals;
        if let Some((z, rv)) = prop.accepted {
            let r = distance(&node.point, &z)?;
            out.children.push((z, rv, r));
        }
    }
    node.offspring_count += out.children.len() as u64;
    Ok(out)
}

/// Up to `branching` children of an eligible node, numbered from `first_id`.
/// The node stays eligible whether or not any child was accepted.
/// Returns the children and the evaluations spent.
pub fn offspring(
    node: &mut TreeNode,
    problem: &Problem,
    cfg: &SolverConfig,
    branching: usize,
    first_id: u64,
) -> Result<(Vec<TreeNode>, u64)> {
    if !node.eligible {
        return Err(Error::InvalidArgument(format!("node {} is not eligible", node.id)));
    }
    let b = brood(node, problem, cfg, branching)?;
    let parent: &TreeNode = node;
    let children = b
        .children
        .into_iter()
        .enumerate()
        .map(|(i, (z, rv, r))| TreeNode::new(first_id + i as u64, Some(parent), z, rv, r, cfg.seed, problem.tol()))
        .collect();
    Ok((children, b.evals))
}

/// Creates a root at a uniform point of the domain; costs one evaluation.
pub fn spawn_root(problem: &Problem, cfg: &SolverConfig, id: u64) -> Result<TreeNode> {
    let r0 = cfg.effective_r0(problem.domain().diameter());
    let mut rng = RngStream::new(cfg.seed, id);
    let z = sample_box(problem.domain(), &mut rng);
    let rv = problem.evaluate(&z)?;
    let mut node = TreeNode::new(id, None, z, rv, r0, cfg.seed, problem.tol());
    // keep drawing from the stream that produced the root point
    node.rng = rng;
    Ok(node)
}

/// Every node ever created, indexed by id. Pruned nodes stay in the record
/// (marked ineligible) so ancestry is always complete.
#[derive(Debug, Clone, Default)]
pub struct Genealogy {
    pub nodes: Vec<TreeNode>,
}

impl Genealogy {
    pub fn get(&self, id: u64) -> Option<&TreeNode> {
        self.nodes.get(id as usize)
    }

    /// Node ids from the root down to `id`.
    pub fn path(&self, id: u64) -> Vec<u64> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(parent) = self.get(cur).and_then(|n| n.parent_id) {
            path.push(parent);
            cur = parent;
        }
        path.reverse();
        path
    }

    /// Nodes that never produced offspring.
    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.offspring_count == 0)
    }

    /// Root-to-node path as a trace: step `t` is the node of generation `t`,
    /// `R` is its distance to its parent (`R0` for the root).
    pub fn path_trace(&self, id: u64) -> ChainTrace {
        let steps = self
            .path(id)
            .into_iter()
            .map(|i| {
                let n = &self.nodes[i as usize];
                TraceStep {
                    step: n.generation,
                    point: n.point.clone(),
                    residual: n.residual.aggregated,
                    r: n.r_to_parent,
                }
            })
            .collect();
        ChainTrace { chain_id: id, steps }
    }

    /// CSV `id,parent_id,generation,residual`; roots have an empty parent.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "id,parent_id,generation,residual")?;
        for n in &self.nodes {
            let parent = n.parent_id.map(|p| p.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{:.16e}", n.id, parent, n.generation, n.residual.aggregated)?;
        }
        Ok(())
    }
}

/// Runs the tree solver. See [`solve_enhanced_with_genealogy`].
pub fn solve_enhanced(problem: &Problem, cfg: &SolverConfig, branching: usize) -> Result<SolveReport> {
    solve_enhanced_with_genealogy(problem, cfg, branching).map(|(r, _)| r)
}

/// Runs the tree solver and also returns the full genealogy.
///
/// Each step every eligible node proposes up to `branching` children, then `p`
/// new roots are added. Children within tolerance are harvested as solutions.
/// When more than `cfg.max_population()` nodes are eligible, the non-root
/// nodes with the largest residuals are retired. With `record_traces`, the
/// report carries the root-to-solution path of every solution.
pub fn solve_enhanced_with_genealogy(
    problem: &Problem,
    cfg: &SolverConfig,
    branching: usize,
) -> Result<(SolveReport, Genealogy)> {
    if branching == 0 {
        return Err(Error::InvalidArgument("branching must be >= 1".into()));
    }
    let start = Instant::now();
    let counter_start = problem.field_eval_count();
    let (problem, pilot_evals) = prepare(problem, cfg)?;
    let pool = thread_pool(cfg.threads)?;
    let cap = cfg.max_population();

    let mut tree = Genealogy::default();
    let mut evals = pilot_evals;
    let mut solutions = Vec::new();
    let mut rounds = 0u64;
    let mut budget_stopped = false;

    let add = |tree: &mut Genealogy, node: TreeNode, solutions: &mut Vec<Solution>| {
        if node.solved && solutions.len() < cfg.n_solutions {
            solutions.push(Solution {
                point: node.point.clone(),
                residuals: node.residual.clone(),
                chain_id: node.id,
                steps_taken: node.generation,
            });
        }
        tree.nodes.push(node);
    };

    for _ in 0..cfg.n {
        let id = tree.nodes.len() as u64;
        let root = spawn_root(&problem, cfg, id)?;
        evals += 1;
        add(&mut tree, root, &mut solutions);
    }

    while solutions.len() < cfg.n_solutions {
        if cfg.eval_budget.is_some_and(|b| evals >= b) {
            budget_stopped = true;
            break;
        }
        rounds += 1;

        let work = |n: &mut TreeNode| -> Option<(u64, Result<Brood>)> {
            n.eligible.then(|| (n.id, brood(n, &problem, cfg, branching)))
        };
        let broods: Vec<(u64, Result<Brood>)> = match &pool {
            Some(pool) => pool.install(|| tree.nodes.par_iter_mut().filter_map(work).collect()),
            None => tree.nodes.iter_mut().filter_map(work).collect(),
        };

        // merge in parent-id order
        for (parent_id, b) in broods {
            let b = b?;
            evals += b.evals;
            for (z, rv, r) in b.children {
                let id = tree.nodes.len() as u64;
                let parent = &tree.nodes[parent_id as usize];
                let child = TreeNode::new(id, Some(parent), z, rv, r, cfg.seed, problem.tol());
                add(&mut tree, child, &mut solutions);
            }
        }
        for _ in 0..cfg.p {
            let id = tree.nodes.len() as u64;
            let root = spawn_root(&problem, cfg, id)?;
            evals += 1;
            add(&mut tree, root, &mut solutions);
        }

        if let Some(cap) = cap {
            prune(&mut tree, cap);
        }
    }

    let traces = if cfg.record_traces {
        solutions.iter().map(|s| tree.path_trace(s.chain_id)).collect()
    } else {
        Vec::new()
    };
    solutions.sort_by_key(|s| (s.chain_id, s.steps_taken));
    let report = SolveReport {
        ec: efficiency(evals, solutions.len()),
        solutions,
        total_evals: evals,
        field_evals: problem.field_eval_count() - counter_start,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        chains_started: tree.nodes.iter().filter(|n| n.is_root()).count() as u64,
        chains_died: 0,
        rounds,
        budget_stopped,
        dim: problem.dim(),
        num_fields: problem.num_fields(),
        field_scales: field_scales(&problem),
        config: cfg.clone(),
        coverage: None,
        traces,
    };
    Ok((report, tree))
}

/// Retires the worst non-root eligible nodes until at most `cap` are eligible
/// (or only roots remain).
fn prune(tree: &mut Genealogy, cap: usize) {
    let eligible = tree.nodes.iter().filter(|n| n.eligible).count();
    if eligible <= cap {
        return;
    }
    let mut candidates: Vec<usize> = tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.eligible && !n.is_root())
        .map(|(i, _)| i)
        .collect();
    candidates.sort_by(|&a, &b| {
        let (na, nb) = (&tree.nodes[a], &tree.nodes[b]);
        nb.residual
            .aggregated
            .total_cmp(&na.residual.aggregated)
            .then(nb.id.cmp(&na.id))
    });
    for i in candidates.into_iter().take(eligible - cap) {
        tree.nodes[i].eligible = false;
    }
}
