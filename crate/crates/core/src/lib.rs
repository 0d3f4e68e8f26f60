//! Stochastic solver for the zero sets of scalar functions and systems on a
//! box domain. Many short random chains each shrink the residual by a fixed
//! factor per step; the chain end points form a point cloud covering the
//! solution set rather than a single root.

pub mod bench;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod enhanced;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod problem;
pub mod report;
pub mod solver;

pub use config::{AcceptancePolicy, Algorithm, PopulationCap, SolverConfig};
pub use error::{Error, Result};
pub use geometry::{BoxDomain, Point, RngStream};
pub use problem::{Problem, ResidualValue, ScalarField};
pub use solver::{solve, SolveReport, Solution};

/// Runs the solver selected by `cfg.algorithm`.
pub fn run(problem: &Problem, cfg: &SolverConfig) -> Result<SolveReport> {
    match cfg.algorithm {
        Algorithm::Basic => solver::solve(problem, cfg),
        Algorithm::Enhanced => enhanced::solve_enhanced(problem, cfg, cfg.branching),
    }
}
