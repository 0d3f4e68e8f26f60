//! Solve two equations at once: two circles whose zero sets meet in two points.
//! Residuals are combined with the max norm, so a solution satisfies both.

use rootcover::bench::{self, two_circle_intersections};

fn main() -> rootcover::Result<()> {
    let case = bench::case("multi1")?;
    let cfg = rootcover::SolverConfig {
        n_solutions: 100,
        seed: 1,
        ..case.config.clone()
    };
    let report = rootcover::solve(&case.problem, &cfg)?;
    println!("{} solutions, EC {:.1}", report.solutions.len(), report.ec);
    println!("field scales after normalization: {:?}", report.field_scales);

    for target in two_circle_intersections() {
        let near: Vec<_> = report
            .solutions
            .iter()
            .filter(|s| rootcover::geometry::distance(&s.point, &target).unwrap() < 0.1)
            .collect();
        let mean = |i: usize| near.iter().map(|s| s.point[i]).sum::<f64>() / near.len().max(1) as f64;
        println!(
            "intersection ({:.4}, {:.4}): {} solutions nearby, centroid ({:.4}, {:.4})",
            target[0],
            target[1],
            near.len(),
            mean(0),
            mean(1)
        );
    }
    Ok(())
}
