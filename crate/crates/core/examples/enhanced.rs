//! Compare the basic chain solver with the genealogy-tree variant, where
//! every accepted point keeps producing offspring.

use rootcover::bench;
use rootcover::enhanced::solve_enhanced_with_genealogy;

fn main() -> rootcover::Result<()> {
    let case = bench::case("ex1")?;
    let cfg = rootcover::SolverConfig {
        seed: 3,
        ..case.config.clone()
    };

    let basic = rootcover::solve(&case.problem, &cfg)?;
    println!("basic:    {} solutions, {} evals, EC {:.2}", basic.solutions.len(), basic.total_evals, basic.ec);

    for branching in [1, 2, 4] {
        let (report, tree) = solve_enhanced_with_genealogy(&case.problem, &cfg, branching)?;
        let deepest = tree.nodes.iter().map(|n| n.generation).max().unwrap_or(0);
        let roots = tree.nodes.iter().filter(|n| n.is_root()).count();
        println!(
            "enhanced (branching {branching}): {} solutions, {} evals, EC {:.2}, {} nodes from {roots} roots, depth {deepest}",
            report.solutions.len(),
            report.total_evals,
            report.ec,
            tree.nodes.len()
        );
    }
    Ok(())
}
