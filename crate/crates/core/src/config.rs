use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a chain reacts to a candidate that fails the decrease test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AcceptancePolicy {
    /// Redraw up to `max_candidate_retries` candidates before the chain dies.
    #[default]
    Retry,
    /// One candidate per step; a failing candidate kills the chain.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Independent chains with restart and streaming injection.
    #[default]
    Basic,
    /// Genealogy tree where every ancestor keeps producing offspring.
    Enhanced,
}

/// Upper bound on the number of active nodes kept by the enhanced solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PopulationCap {
    /// `10 * n * branching + 100`.
    #[default]
    Auto,
    Unbounded,
    Max(usize),
}

/// Every tunable of a run. Defaults reproduce the first row of the
/// quadratic-circle parameter study (n=5, tol=0.01, N=1000, C=0.75, k=1, p=1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Chains started at initialization.
    pub n: usize,
    /// Fresh chains injected each round.
    pub p: usize,
    /// Decrease factor in `[1/2, 1]`.
    pub c: f64,
    /// Gain from residual to sampling radius.
    pub k: f64,
    pub tol: f64,
    /// Number of solutions requested.
    pub n_solutions: usize,
    /// Initial radius; `None` means a tenth of the domain diameter.
    pub r0: Option<f64>,
    pub max_candidate_retries: usize,
    pub max_domain_retries: usize,
    pub eval_budget: Option<u64>,
    pub seed: u64,
    pub policy: AcceptancePolicy,
    pub normalize: bool,
    pub pilot_size: usize,
    pub algorithm: Algorithm,
    /// Offspring per eligible node per step (enhanced only).
    pub branching: usize,
    pub population_cap: PopulationCap,
    pub threads: usize,
    pub record_traces: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 5,
            p: 1,
            c: 0.75,
            k: 1.0,
            tol: 0.01,
            n_solutions: 1000,
            r0: None,
            max_candidate_retries: 50,
            max_domain_retries: 50,
            eval_budget: None,
            seed: 0,
            policy: AcceptancePolicy::Retry,
            normalize: false,
            pilot_size: 100,
            algorithm: Algorithm::Basic,
            branching: 1,
            population_cap: PopulationCap::Auto,
            threads: 1,
            record_traces: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if !(0.5..=1.0).contains(&self.c) {
            return bad(format!("C must lie in [0.5, 1], got {}", self.c));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.n_solutions == 0 {
            return bad("N must be >= 1".into());
        }
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0 && r0.is_finite()) {
                return bad(format!("R0 must be positive, got {r0}"));
            }
        }
        if self.max_candidate_retries == 0 || self.max_domain_retries == 0 {
            return bad("retry caps must be >= 1".into());
        }
        if self.pilot_size == 0 {
            return bad("pilot size must be >= 1".into());
        }
        if self.branching == 0 {
            return bad("branching must be >= 1".into());
        }
        if self.threads == 0 {
            return bad("threads must be >= 1".into());
        }
        Ok(())
    }

    /// `r0` or the diameter-based fallback.
    pub fn effective_r0(&self, domain_diameter: f64) -> f64 {
        self.r0.unwrap_or(domain_diameter / 10.0)
    }

    pub fn max_population(&self) -> Option<usize> {
        match self.population_cap {
            PopulationCap::Auto => Some(10 * self.n * self.branching + 100),
            PopulationCap::Unbounded => None,
            PopulationCap::Max(m) => Some(m),
        }
    }
}

impl fmt::Display for AcceptancePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AcceptancePolicy::Retry => "retry",
            AcceptancePolicy::Strict => "strict",
        })
    }
}

impl FromStr for AcceptancePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "retry" => Ok(AcceptancePolicy::Retry),
            "strict" => Ok(AcceptancePolicy::Strict),
            _ => Err(Error::InvalidArgument(format!("unknown policy `{s}`"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Basic => "basic",
            Algorithm::Enhanced => "enhanced",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Algorithm::Basic),
            "enhanced" => Ok(Algorithm::Enhanced),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm `{s}`"))),
        }
    }
}
