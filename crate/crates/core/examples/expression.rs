//! Build a problem from formula text instead of Rust closures.

use rootcover::expr::parse;
use rootcover::{BoxDomain, Problem, ScalarField, SolverConfig};

fn main() -> rootcover::Result<()> {
    // a lemniscate-like quartic curve
    let src = "(x1^2 + x2^2)^2 - 2*(x1^2 - x2^2) - 0.1";
    let expr = parse(src, 2)?;
    println!("parsed: {expr}");
    println!("value at origin: {}", expr.evaluate(&[0.0, 0.0]));

    let field = ScalarField::new(2, expr).with_label(src);
    let problem = Problem::new(vec![field], BoxDomain::cube(2, -2.0, 2.0)?, 0.01)?;
    let cfg = SolverConfig {
        n: 10,
        n_solutions: 200,
        k: 0.5,
        seed: 5,
        ..SolverConfig::default()
    };
    let report = rootcover::solve(&problem, &cfg)?;
    println!("{} solutions, EC {:.1}", report.solutions.len(), report.ec);

    match parse("sin(x1) + x3", 2) {
        Err(e) => println!("rejected as expected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
