//! Benchmark registry: the worked examples, the sphere and cube families in
//! several dimensions, and three simultaneous systems. Each case carries its
//! default parameter row and, where the zero set is known in closed form, a
//! generator of exact reference points for coverage measurement.

use std::f64::consts::PI;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, Point, RngStream};
use crate::problem::{Problem, ScalarField};

/// Closed-form description of (part of) the zero set.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSet {
    /// Sphere `|x| = radius` centered at the origin.
    Sphere { radius: f64 },
    /// `{x in [lower, 1]^d : max_i x_i = level}`.
    CubeSurface { lower: f64, level: f64 },
    /// A finite zero set.
    Points(Vec<Point>),
}

/// A named problem with its default parameters.
#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub name: String,
    pub description: String,
    /// Field formulas in the expression syntax, one per field.
    pub formulas: Vec<String>,
    pub problem: Problem,
    pub config: SolverConfig,
    pub reference: Option<ReferenceSet>,
}

type Func = fn(&[f64]) -> f64;

fn circle(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] - 0.5
}

fn shifted_circle(x: &[f64]) -> f64 {
    let (a, b) = (x[0] - 0.2, x[1] + 0.2);
    a * a + b * b - 0.5
}

fn chair(x: &[f64]) -> f64 {
    x[0].powi(4) + x[1].powi(3) - 0.5
}

fn rosenbrock_level(x: &[f64]) -> f64 {
    let a = 1.0 - x[0];
    let b = x[1] - x[0] * x[0];
    a * a + 100.0 * b * b - 50.0
}

fn polynomial(x: &[f64]) -> f64 {
    let a = x[0] - 0.5;
    a * a + 3.0 * x[0] * x[1] - x[1].powi(3) - 2.25
}

fn trig_term(v: f64) -> f64 {
    let s = (v - 0.9) * (v - 0.9);
    let a = 7.0 * s;
    let b = 14.0 * s;
    8.0 * (a * a).sin() + 6.0 * (b * b).sin() + s
}

fn trigonometric(x: &[f64]) -> f64 {
    trig_term(x[0]) + trig_term(x[1]) - 15.0
}

fn rastrigin_level(x: &[f64]) -> f64 {
    20.0 + x[0] * x[0] - 10.0 * (2.0 * PI * x[0]).cos() + x[1] * x[1]
        - 10.0 * (2.0 * PI * x[1]).cos()
        - 60.0
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() - 0.5
}

fn cube(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 0.5
}

const CIRCLE: &str = "x1^2+x2^2-0.5";
const SHIFTED_CIRCLE: &str = "(x1-0.2)^2+(x2+0.2)^2-0.5";
const CHAIR: &str = "x1^4+x2^3-0.5";
const ROSENBROCK_LEVEL: &str = "(1-x1)^2+100*(x2-x1^2)^2-50";
const POLYNOMIAL: &str = "(x1-0.5)^2+3*x1*x2-x2^3-2.25";
const TRIGONOMETRIC: &str = "8*sin((7*(x1-0.9)^2)^2)+6*sin((14*(x1-0.9)^2)^2)+(x1-0.9)^2\
+8*sin((7*(x2-0.9)^2)^2)+6*sin((14*(x2-0.9)^2)^2)+(x2-0.9)^2-15";
const RASTRIGIN_LEVEL: &str = "20+x1^2-10*cos(2*pi*x1)+x2^2-10*cos(2*pi*x2)-60";

/// Stable benchmark identifiers, in registry order.
pub const NAMES: [&str; 17] = [
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "sphere2", "sphere3", "sphere4", "sphere10",
    "cube2", "cube3", "cube4", "cube10", "multi1", "multi2", "multi3",
];

fn sphere_formula(d: usize) -> String {
    let terms: Vec<String> = (1..=d).map(|i| format!("x{i}^2")).collect();
    format!("{}-0.5", terms.join("+"))
}

fn cube_formula(d: usize) -> String {
    let mut s = "x1".to_string();
    for i in 2..=d {
        s = format!("max({s},x{i})");
    }
    format!("{s}-0.5")
}

/// Row parameters `(n, tol, N, C, k, p)` as listed in the parameter studies.
fn row(n: usize, tol: f64, n_solutions: usize, c: f64, k: f64, p: usize) -> SolverConfig {
    SolverConfig {
        n,
        tol,
        n_solutions,
        c,
        k,
        p,
        ..SolverConfig::default()
    }
}

/// Systems mix fields of very different magnitudes; they run on fields rescaled
/// by their mean magnitude so no single field dominates the sampling radius.
fn system_row(n_solutions: usize) -> SolverConfig {
    SolverConfig {
        normalize: true,
        ..row(20, 0.01, n_solutions, 0.75, 1.0, 1)
    }
}

fn square(half: f64) -> BoxDomain {
    BoxDomain::cube(2, -half, half).expect("valid box")
}

fn build(
    name: &str,
    description: &str,
    fields: Vec<(Func, String)>,
    domain: BoxDomain,
    config: SolverConfig,
    reference: Option<ReferenceSet>,
) -> BenchmarkCase {
    let dim = domain.dim();
    let formulas = fields.iter().map(|(_, s)| s.clone()).collect();
    let fields = fields
        .into_iter()
        .map(|(f, s)| ScalarField::new(dim, f).with_label(s))
        .collect();
    let problem = Problem::new(fields, domain, config.tol).expect("valid benchmark");
    BenchmarkCase {
        name: name.to_string(),
        description: description.to_string(),
        formulas,
        problem,
        config,
        reference,
    }
}

fn sphere_n(d: usize) -> usize {
    match d {
        2 => 5,
        3 => 25,
        4 => 75,
        _ => 1000,
    }
}

/// Builds one case by name.
pub fn case(name: &str) -> Result<BenchmarkCase> {
    let half_sqrt = 0.5f64.sqrt();
    let c = match name {
        "ex1" => build(
            name,
            "quadratic: circle of radius sqrt(0.5)",
            vec![(circle, CIRCLE.into())],
            square(1.0),
            row(5, 0.01, 1000, 0.75, 1.0, 1),
            Some(ReferenceSet::Sphere { radius: half_sqrt }),
        ),
        "ex2" => build(
            name,
            "chair-shaped quartic/cubic",
            vec![(chair, CHAIR.into())],
            square(1.0),
            row(10, 0.015, 1000, 0.55, 1.0, 1),
            None,
        ),
        "ex3" => build(
            name,
            "Rosenbrock level set at 50",
            vec![(rosenbrock_level, ROSENBROCK_LEVEL.into())],
            square(2.0),
            row(10, 3.0, 1000, 0.75, 0.005, 1),
            None,
        ),
        "ex4" => build(
            name,
            "two-component cubic polynomial",
            vec![(polynomial, POLYNOMIAL.into())],
            square(2.0),
            row(10, 0.04, 1000, 0.75, 0.25, 1),
            None,
        ),
        "ex5" => build(
            name,
            "oscillating trigonometric sum",
            vec![(trigonometric, TRIGONOMETRIC.into())],
            square(2.0),
            row(10, 0.15, 1000, 0.75, 0.25, 1),
            None,
        ),
        "ex6" => build(
            name,
            "Rastrigin level set at 60",
            vec![(rastrigin_level, RASTRIGIN_LEVEL.into())],
            square(5.0),
            row(10, 0.4, 1000, 0.75, 0.025, 1),
            None,
        ),
        "sphere2" | "sphere3" | "sphere4" | "sphere10" => {
            let d: usize = name["sphere".len()..].parse().expect("digits");
            build(
                name,
                &format!("sphere of radius sqrt(0.5) in dimension {d}"),
                vec![(sphere, sphere_formula(d))],
                BoxDomain::cube(d, -1.0, 1.0)?,
                row(sphere_n(d), 0.1, 500, 0.75, 1.0, 1),
                Some(ReferenceSet::Sphere { radius: half_sqrt }),
            )
        }
        "cube2" | "cube3" | "cube4" | "cube10" => {
            let d: usize = name["cube".len()..].parse().expect("digits");
            build(
                name,
                &format!("cube surface max(x) = 0.5 in dimension {d}"),
                vec![(cube, cube_formula(d))],
                BoxDomain::cube(d, -1.0, 1.0)?,
                row(sphere_n(d), 0.1, 500, 0.75, 1.0, 1),
                Some(ReferenceSet::CubeSurface {
                    lower: -1.0,
                    level: 0.5,
                }),
            )
        }
        "multi1" => build(
            name,
            "two circles shifted by (0.2, -0.2)",
            vec![(circle, CIRCLE.into()), (shifted_circle, SHIFTED_CIRCLE.into())],
            square(1.0),
            system_row(10),
            Some(ReferenceSet::Points(two_circle_intersections().to_vec())),
        ),
        "multi2" => build(
            name,
            "Rosenbrock level set and Rastrigin level set",
            vec![
                (rosenbrock_level, ROSENBROCK_LEVEL.into()),
                (rastrigin_level, RASTRIGIN_LEVEL.into()),
            ],
            square(5.0),
            system_row(100),
            None,
        ),
        "multi3" => build(
            name,
            "circle and trigonometric sum",
            vec![(circle, CIRCLE.into()), (trigonometric, TRIGONOMETRIC.into())],
            square(1.0),
            system_row(100),
            None,
        ),
        _ => return Err(Error::UnknownBenchmark(name.to_string())),
    };
    Ok(c)
}

/// Every registered case, in [`NAMES`] order.
pub fn registry() -> Vec<BenchmarkCase> {
    NAMES.iter().map(|n| case(n).expect("registered")).collect()
}

/// The two common zeros of the `multi1` circles: `x1 = (0.2 ± sqrt(0.96)) / 2`,
/// `x2 = x1 - 0.2`.
pub fn two_circle_intersections() -> [Point; 2] {
    let s = 0.96f64.sqrt();
    let a = (0.2 + s) / 2.0;
    let b = (0.2 - s) / 2.0;
    [Point::new(vec![a, a - 0.2]), Point::new(vec![b, b - 0.2])]
}

/// `count` points lying exactly on the case's zero set.
pub fn reference_points(case: &BenchmarkCase, count: usize, rng: &mut RngStream) -> Result<Vec<Point>> {
    let dim = case.problem.dim();
    let Some(set) = &case.reference else {
        return Err(Error::NoReferenceSet(case.name.clone()));
    };
    let pts = match set {
        ReferenceSet::Sphere { radius } if dim == 2 => (0..count)
            .map(|_| {
                let t = rng.uniform(0.0, 2.0 * PI);
                Point::new(vec![radius * t.cos(), radius * t.sin()])
            })
            .collect(),
        ReferenceSet::Sphere { radius } => (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                Point::new(v.into_iter().map(|x| radius * x / norm).collect())
            })
            .collect(),
        ReferenceSet::CubeSurface { lower, level } => (0..count)
            .map(|_| {
                // faces are congruent, so a uniform face index gives uniform area
                let face = (rng.uniform(0.0, dim as f64) as usize).min(dim - 1);
                let coords = (0..dim)
                    .map(|i| if i == face { *level } else { rng.uniform(*lower, *level) })
                    .collect();
                Point::new(coords)
            })
            .collect(),
        ReferenceSet::Points(points) => (0..count).map(|i| points[i % points.len()].clone()).collect(),
    };
    Ok(pts)
}

/// One row of a parameter study.
#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub case: String,
    /// Name of the varied column, or `None` for a fixed-config suite.
    pub varied: Option<&'static str>,
    pub config: SolverConfig,
}

pub const SUITES: [&str; 9] = [
    "ex1-n", "ex2-C", "ex3-k", "ex4-p", "ex5-tol", "ex6-N", "spheres", "cubes", "multi",
];

/// Rows of a named parameter study.
pub fn suite(name: &str) -> Result<Vec<SuiteRow>> {
    fn vary(case_name: &str, column: &'static str, f: impl Fn(&mut SolverConfig, usize)) -> Vec<SuiteRow> {
        let base = case(case_name).expect("registered").config;
        (0..3)
            .map(|i| {
                let mut config = base.clone();
                f(&mut config, i);
                SuiteRow {
                    case: case_name.to_string(),
                    varied: Some(column),
                    config,
                }
            })
            .collect()
    }
    fn fixed(names: &[&str]) -> Vec<SuiteRow> {
        names
            .iter()
            .map(|n| SuiteRow {
                case: n.to_string(),
                varied: None,
                config: case(n).expect("registered").config,
            })
            .collect()
    }
    let rows = match name {
        "ex1-n" => vary("ex1", "n", |c, i| c.n = [5, 100, 300][i]),
        "ex2-C" => vary("ex2", "C", |c, i| c.c = [0.55, 0.75, 0.95][i]),
        "ex3-k" => vary("ex3", "k", |c, i| c.k = [0.005, 0.05, 0.25][i]),
        "ex4-p" => vary("ex4", "p", |c, i| c.p = [1, 3, 5][i]),
        "ex5-tol" => vary("ex5", "tol", |c, i| c.tol = [0.15, 0.75, 1.5][i]),
        "ex6-N" => vary("ex6", "N", |c, i| c.n_solutions = [100, 1000, 2000][i]),
        "spheres" => fixed(&["sphere2", "sphere3", "sphere4", "sphere10"]),
        "cubes" => fixed(&["cube2", "cube3", "cube4", "cube10"]),
        "multi" => fixed(&["multi1", "multi2", "multi3"]),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite `{name}` (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(rows)
}
