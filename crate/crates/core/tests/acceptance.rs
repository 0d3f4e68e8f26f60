//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{check_trace, close, median, naive_eval, random_node};
use rootcover::bench::{self, two_circle_intersections};
use rootcover::enhanced::solve_enhanced_with_genealogy;
use rootcover::expr::parse;
use rootcover::geometry::sample_box;
use rootcover::report::{attach_coverage, export_points, ExportFormat};
use rootcover::solver::{solve, spawn_chain, step_chain, ChainStatus};
use rootcover::{RngStream, SolveReport, SolverConfig};

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn run(name: &str, cfg: &SolverConfig) -> SolveReport {
    let case = bench::case(name).unwrap();
    solve(&case.problem, cfg).unwrap()
}

fn with(name: &str, f: impl Fn(&mut SolverConfig)) -> SolverConfig {
    let mut cfg = bench::case(name).unwrap().config;
    f(&mut cfg);
    cfg
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn invariant_suite() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut steps_checked = 0usize;
    for name in ["ex1", "ex2", "ex3", "ex4", "ex5", "ex6"] {
        let case = bench::case(name).unwrap();
        let cfg = SolverConfig {
            record_traces: true,
            ..case.config.clone()
        };
        for id in 0..200u64 {
            let mut chain = spawn_chain(&case.problem, &cfg, id, RngStream::new(0, id)).unwrap();
            while chain.status == ChainStatus::Alive {
                step_chain(&mut chain, &case.problem, &cfg).unwrap();
            }
            let trace = chain.trace().unwrap();
            steps_checked += trace.steps.len();
            if let Err(e) = check_trace(&trace.steps, cfg.c, cfg.k) {
                failures.push(format!("{name} chain {id}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 60.0;
    Outcome::new(
        pass,
        format!(
            "1200 chains, {steps_checked} trace points, {} violations, {secs:.1}s (< 60s){}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn circle(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] - 0.5
}

fn example_one() -> Outcome {
    let mut ecs = Vec::new();
    let mut ok = true;
    let mut slowest: f64 = 0.0;
    for seed in SEEDS {
        let start = Instant::now();
        let r = run("ex1", &with("ex1", |c| c.seed = seed));
        slowest = slowest.max(start.elapsed().as_secs_f64());
        ok &= r.solutions.len() == 1000;
        ok &= r.solutions.iter().all(|s| s.residuals.aggregated <= 0.01 && circle(s.point.coords()).abs() <= 0.01);
        ecs.push(r.ec);
    }
    let m = median(ecs.clone());
    let pass = ok && (2.0..=20.0).contains(&m) && slowest < 30.0;
    Outcome::new(
        pass,
        format!(
            "solutions valid: {ok}; EC per seed {}; median EC {m:.3} (band [2, 20]); slowest {slowest:.2}s (< 30s)",
            fmt_list(&ecs)
        ),
    )
}

fn coverage_in_n() -> Outcome {
    let case = bench::case("ex1").unwrap();
    let reference = bench::reference_points(&case, 500, &mut RngStream::new(2024, 0)).unwrap();
    let mut medians = Vec::new();
    for n in [5, 100, 300] {
        let fills: Vec<f64> = SEEDS
            .iter()
            .map(|&seed| {
                let mut r = run("ex1", &with("ex1", |c| {
                    c.seed = seed;
                    c.n = n;
                }));
                attach_coverage(&mut r, &reference).unwrap();
                r.coverage.unwrap().fill_distance
            })
            .collect();
        medians.push(median(fills));
    }
    let pass = medians[0] > medians[1] && medians[1] > medians[2];
    Outcome::new(
        pass,
        format!("median fill distance at n = 5, 100, 300: {} (must strictly decrease)", fmt_list(&medians)),
    )
}

/// Median over seeds of `metric` for each value of the varied parameter.
fn medians_over(name: &str, values: &[f64], set: fn(&mut SolverConfig, f64), metric: fn(&SolveReport) -> f64) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let per_seed = SEEDS
                .iter()
                .map(|&seed| {
                    let r = run(name, &with(name, |c| {
                        c.seed = seed;
                        set(c, v);
                    }));
                    metric(&r)
                })
                .collect();
            median(per_seed)
        })
        .collect()
}

fn c_cost() -> Outcome {
    let m = medians_over("ex2", &[0.55, 0.75, 0.95], |c, v| c.c = v, |r| r.total_evals as f64);
    let pass = m[0] > m[1] && m[1] > m[2];
    Outcome::new(pass, format!("ex2 median total evals at C = .55, .75, .95: {}", fmt_list(&m)))
}

fn k_cost() -> Outcome {
    let m = medians_over("ex3", &[0.005, 0.05, 0.25], |c, v| c.k = v, |r| r.ec);
    let pass = m[0] < m[1] && m[1] < m[2];
    Outcome::new(pass, format!("ex3 median EC at k = .005, .05, .25: {}", fmt_list(&m)))
}

fn tol_cost() -> Outcome {
    let m = medians_over("ex5", &[0.15, 0.75, 1.5], |c, v| c.tol = v, |r| r.ec);
    let pass = m[0] > m[1] && m[1] > m[2];
    Outcome::new(pass, format!("ex5 median EC at tol = .15, .75, 1.5: {}", fmt_list(&m)))
}

fn two_circles() -> Outcome {
    // x2 = x1 - 0.2 after subtracting the two equations; then 2 x1^2 - 0.4 x1 - 0.46 = 0
    let disc: f64 = 0.4 * 0.4 + 8.0 * 0.46;
    let analytic: Vec<[f64; 2]> = [1.0, -1.0]
        .iter()
        .map(|s| {
            let x1 = (0.4 + s * disc.sqrt()) / 4.0;
            [x1, x1 - 0.2]
        })
        .collect();
    for (p, q) in two_circle_intersections().iter().zip(&analytic) {
        assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
    }
    let dist = |x: &[f64], q: &[f64; 2]| ((x[0] - q[0]).powi(2) + (x[1] - q[1]).powi(2)).sqrt();
    let start = Instant::now();
    let mut near = true;
    let mut both_hit = true;
    let mut worst: f64 = 0.0;
    for seed in SEEDS {
        let r10 = run("multi1", &with("multi1", |c| c.seed = seed));
        near &= r10.solutions.len() == 10;
        for s in &r10.solutions {
            let d = analytic.iter().map(|q| dist(s.point.coords(), q)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            near &= d <= 0.1 && s.residuals.aggregated <= 0.01;
        }
        let r100 = run("multi1", &with("multi1", |c| {
            c.seed = seed;
            c.n_solutions = 100;
        }));
        for q in &analytic {
            both_hit &= r100.solutions.iter().any(|s| dist(s.point.coords(), q) <= 0.1);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        near && both_hit && secs < 30.0,
        format!("N=10 all within 0.1: {near} (worst {worst:.4}); N=100 hits both: {both_hit}; {secs:.1}s (< 30s)"),
    )
}

fn dimension_scaling() -> Outcome {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() - 0.5;
    let mut valid = true;
    let mut ecs = Vec::new();
    let mut slowest: f64 = 0.0;
    for name in ["sphere3", "sphere10"] {
        for seed in SEEDS {
            let start = Instant::now();
            let r = run(name, &with(name, |c| c.seed = seed));
            valid &= r.solutions.len() == 500;
            valid &= r.solutions.iter().all(|s| sphere(s.point.coords()).abs() <= 0.1);
            if name == "sphere10" {
                slowest = slowest.max(start.elapsed().as_secs_f64());
                ecs.push(r.ec);
            }
        }
    }
    let m = median(ecs.clone());
    Outcome::new(
        valid && m < 2000.0 && slowest < 300.0,
        format!(
            "solutions valid: {valid}; sphere10 EC {}; median {m:.1} (< 2000); slowest {slowest:.2}s (< 300s)",
            fmt_list(&ecs)
        ),
    )
}

fn enhanced_parity() -> Outcome {
    let case = bench::case("ex1").unwrap();
    let mut ok = true;
    let mut paths = 0usize;
    let mut notes = Vec::new();
    for seed in SEEDS {
        let cfg = SolverConfig {
            seed,
            eval_budget: Some(1_000_000),
            ..case.config.clone()
        };
        let (r, tree) = solve_enhanced_with_genealogy(&case.problem, &cfg, 1).unwrap();
        let valid = r.solutions.len() == 1000
            && !r.budget_stopped
            && r.total_evals <= 1_000_000
            && r.solutions.iter().all(|s| circle(s.point.coords()).abs() <= 0.01);
        ok &= valid;
        for leaf in tree.leaves() {
            paths += 1;
            let trace = tree.path_trace(leaf.id);
            if let Err(e) = check_trace(&trace.steps, cfg.c, cfg.k) {
                ok = false;
                notes.push(format!("seed {seed} node {}: {e}", leaf.id));
            }
        }
        notes.push(format!("seed {seed}: {} evals", r.total_evals));
    }
    Outcome::new(ok, format!("{paths} root-to-leaf paths checked; {}", notes.join(", ")))
}

fn export(r: &SolveReport, format: ExportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    export_points(r, format, &mut buf).unwrap();
    buf
}

/// JSON export with the wall-clock time and the thread count removed.
fn comparable_json(r: &SolveReport) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&export(r, ExportFormat::Json)).unwrap();
    let meta = v["metadata"].as_object_mut().unwrap();
    meta.remove("time_seconds");
    meta["config"].as_object_mut().unwrap().remove("threads");
    v
}

fn determinism() -> Outcome {
    let mut mismatches = Vec::new();
    for name in bench::NAMES {
        let cfg = with(name, |c| c.seed = 11);
        let a = run(name, &cfg);
        let b = run(name, &cfg);
        let c = run(name, &SolverConfig { threads: 4, ..cfg.clone() });
        let csv = export(&a, ExportFormat::Csv);
        if csv != export(&b, ExportFormat::Csv) || csv != export(&c, ExportFormat::Csv) {
            mismatches.push(format!("{name} csv"));
        }
        let json = comparable_json(&a);
        if json != comparable_json(&b) || json != comparable_json(&c) {
            mismatches.push(format!("{name} json"));
        }
    }
    for name in ["ex1", "multi1"] {
        let case = bench::case(name).unwrap();
        let cfg = with(name, |c| c.seed = 5);
        let a = solve_enhanced_with_genealogy(&case.problem, &cfg, 2).unwrap().0;
        let b = solve_enhanced_with_genealogy(&case.problem, &SolverConfig { threads: 4, ..cfg }, 2)
            .unwrap()
            .0;
        if export(&a, ExportFormat::Csv) != export(&b, ExportFormat::Csv) {
            mismatches.push(format!("{name} enhanced csv"));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{} benchmarks, 1 vs 1 vs 4 threads, plus enhanced ex1/multi1; mismatches: {:?}",
            bench::NAMES.len(),
            mismatches
        ),
    )
}

type Field = Box<dyn Fn(&[f64]) -> f64>;

/// Independent hard-coded versions of the registry fields.
fn oracle_fields(name: &str) -> Vec<Field> {
    let trig = |x: &[f64]| {
        let g = |t: f64| {
            let s = (t - 0.9).powi(2);
            8.0 * (7.0 * s).powi(2).sin() + 6.0 * (14.0 * s).powi(2).sin() + s
        };
        g(x[0]) + g(x[1]) - 15.0
    };
    let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0].powi(2)).powi(2) - 50.0;
    let rastr = |x: &[f64]| {
        x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>() + 20.0 - 60.0
    };
    match name {
        "ex1" => vec![Box::new(circle)],
        "ex2" => vec![Box::new(|x: &[f64]| x[0].powi(4) + x[1].powi(3) - 0.5)],
        "ex3" => vec![Box::new(rosen)],
        "ex4" => vec![Box::new(|x: &[f64]| {
            (x[0] - 0.5).powi(2) + 3.0 * x[0] * x[1] - x[1].powi(3) - 2.25
        })],
        "ex5" => vec![Box::new(trig)],
        "ex6" => vec![Box::new(rastr)],
        "multi1" => vec![
            Box::new(circle),
            Box::new(|x: &[f64]| (x[0] - 0.2).powi(2) + (x[1] + 0.2).powi(2) - 0.5),
        ],
        "multi2" => vec![Box::new(rosen), Box::new(rastr)],
        "multi3" => vec![Box::new(circle), Box::new(trig)],
        s if s.starts_with("sphere") => vec![Box::new(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() - 0.5)],
        s if s.starts_with("cube") => vec![Box::new(|x: &[f64]| {
            x.iter().copied().reduce(f64::max).unwrap() - 0.5
        })],
        _ => unreachable!("{name}"),
    }
}

fn parser_oracle() -> Outcome {
    let mut rng = RngStream::new(77, 0);
    let mut disagreements = 0usize;
    let mut evaluated = 0usize;
    while evaluated < 10_000 {
        let dim = 1 + (rng.uniform(0.0, 4.0) as usize).min(3);
        let node = random_node(&mut rng, 5, dim);
        let expr = parse(&node.to_string(), dim).unwrap();
        if expr.root() != &node {
            disagreements += 1;
        }
        let x: Vec<f64> = (0..dim).map(|_| rng.uniform(-3.0, 3.0)).collect();
        if !close(expr.evaluate(&x), naive_eval(&node, &x), 1e-12) {
            disagreements += 1;
        }
        evaluated += 1;
    }

    let mut formula_mismatch = Vec::new();
    for case in bench::registry() {
        let dim = case.problem.dim();
        let oracles = oracle_fields(&case.name);
        let exprs: Vec<_> = case.formulas.iter().map(|f| parse(f, dim).unwrap()).collect();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..1000 {
            let z = sample_box(case.problem.domain(), &mut rng);
            for ((e, o), field) in exprs.iter().zip(&oracles).zip(case.problem.fields()) {
                let want = o(z.coords());
                if !close(e.evaluate(z.coords()), want, 1e-12) || !close(field.value(z.coords()), want, 1e-12) {
                    formula_mismatch.push(case.name.clone());
                }
            }
        }
    }
    formula_mismatch.dedup();
    Outcome::new(
        disagreements == 0 && formula_mismatch.is_empty(),
        format!(
            "{evaluated} random expression/point pairs, {disagreements} disagreements; registry formula mismatches: {formula_mismatch:?}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("invariant suite", invariant_suite),
        ("example 1 reproduction", example_one),
        ("coverage monotone in n", coverage_in_n),
        ("C-cost ordering", c_cost),
        ("k-cost ordering", k_cost),
        ("tol-cost ordering", tol_cost),
        ("two-circle system", two_circles),
        ("dimension scaling", dimension_scaling),
        ("enhanced-variant parity", enhanced_parity),
        ("determinism", determinism),
        ("parser oracle", parser_oracle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {:>2} {name}: {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
