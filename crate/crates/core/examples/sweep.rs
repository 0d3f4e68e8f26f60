//! A small parameter study: the decrease factor C on the quartic/cubic
//! benchmark, with medians over five seeds.

use rootcover::bench;
use rootcover::report::{median_row, to_table_row, TableRow};

fn main() -> rootcover::Result<()> {
    println!("{}", TableRow::HEADER);
    for row in bench::suite("ex2-C")? {
        let case = bench::case(&row.case)?;
        let rows = (0..5)
            .map(|seed| {
                let cfg = rootcover::SolverConfig { seed, ..row.config.clone() };
                rootcover::solve(&case.problem, &cfg).map(|r| to_table_row(&r))
            })
            .collect::<rootcover::Result<Vec<_>>>()?;
        println!("{}", median_row(&rows)?.to_tsv());
    }
    Ok(())
}
