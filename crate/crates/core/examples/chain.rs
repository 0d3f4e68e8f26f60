//! Step a single chain by hand and compare its step lengths with the
//! geometric bound that holds when the residual decays like a * C^i.

use rootcover::bench;
use rootcover::solver::{rn_bound, spawn_chain, step_chain, ChainStatus};
use rootcover::{RngStream, SolverConfig};

fn main() -> rootcover::Result<()> {
    let case = bench::case("ex4")?;
    let cfg = SolverConfig {
        record_traces: true,
        ..case.config.clone()
    };
    let mut chain = spawn_chain(&case.problem, &cfg, 0, RngStream::new(2, 0))?;
    while chain.status == ChainStatus::Alive {
        step_chain(&mut chain, &case.problem, &cfg)?;
    }
    println!("chain ended {:?} after {} evaluations", chain.status, chain.evals);

    let trace = chain.trace().expect("traces recorded");
    let a = trace.steps[0].residual;
    let r1 = trace.steps[0].r;
    println!("{:>4} {:>12} {:>12} {:>12}", "i", "residual", "R", "bound");
    for (i, s) in trace.steps.iter().enumerate() {
        let bound = if i == 0 { r1 } else { rn_bound(2.0 * r1, a, cfg.k, cfg.c, i as u64)? };
        println!("{i:>4} {:>12.5e} {:>12.5e} {:>12.5e}", s.residual, s.r, bound);
    }
    Ok(())
}
