//! Measure how well the solutions cover a zero set that is known exactly.

use rootcover::bench;
use rootcover::coverage::coverage;
use rootcover::{Point, RngStream};

fn main() -> rootcover::Result<()> {
    for name in ["sphere2", "sphere3", "cube3"] {
        let case = bench::case(name)?;
        let reference = bench::reference_points(&case, 500, &mut RngStream::new(7, 0))?;
        for n_solutions in [50, 500] {
            let cfg = rootcover::SolverConfig {
                n_solutions,
                seed: 1,
                ..case.config.clone()
            };
            let report = rootcover::solve(&case.problem, &cfg)?;
            let points: Vec<Point> = report.solutions.iter().map(|s| s.point.clone()).collect();
            let c = coverage(&points, &reference)?;
            println!(
                "{name:8} N={n_solutions:4}: fill {:.4}, mean gap {:.4}, dispersion {:.4}",
                c.fill_distance, c.mean_gap, c.solution_dispersion
            );
        }
    }
    Ok(())
}
