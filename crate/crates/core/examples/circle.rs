//! Cover the circle x1^2 + x2^2 = 0.5 with the basic chain solver.

use rootcover::report::to_table_row;
use rootcover::{solve, BoxDomain, Problem, ScalarField, SolverConfig};

fn main() -> rootcover::Result<()> {
    let f = ScalarField::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 0.5);
    let problem = Problem::new(vec![f], BoxDomain::cube(2, -1.0, 1.0)?, 0.01)?;
    let cfg = SolverConfig {
        n: 5,
        p: 1,
        c: 0.75,
        k: 1.0,
        tol: 0.01,
        n_solutions: 1000,
        seed: 42,
        ..SolverConfig::default()
    };

    let report = solve(&problem, &cfg)?;
    let row = to_table_row(&report);
    println!(
        "{} solutions, {} evaluations, EC {:.2}, {} chains started ({} died)",
        report.solutions.len(),
        report.total_evals,
        row.ec,
        report.chains_started,
        report.chains_died
    );
    for s in report.solutions.iter().take(5) {
        let r = s.point.coords().iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("  {:?}  |x| = {r:.4}  residual {:.2e}", s.point.coords(), s.residuals.aggregated);
    }
    Ok(())
}
