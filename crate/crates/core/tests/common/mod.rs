#![allow(dead_code)]

use rootcover::expr::{BinaryOp, Func, Node, UnaryOp};
use rootcover::solver::{rn_bound, TraceStep};
use rootcover::RngStream;

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Checks the per-trace invariants: residual decrease by `c`, step-length
/// recursion, geometric residual decay from the first residual, and the
/// closed-form bound on `R_n`.
pub fn check_trace(steps: &[TraceStep], c: f64, k: f64) -> Result<(), String> {
    let Some(first) = steps.first() else {
        return Ok(());
    };
    let a = first.residual;
    let r1 = first.r;
    for (i, w) in steps.windows(2).enumerate() {
        let (s, t) = (&w[0], &w[1]);
        if t.residual > c * s.residual + 1e-12 {
            return Err(format!("decrease violated at {i}: {} > {c} * {}", t.residual, s.residual));
        }
        if t.r > s.r / 2.0 + k * s.residual + 1e-12 {
            return Err(format!("step length violated at {i}: {} > {}/2 + {k}*{}", t.r, s.r, s.residual));
        }
    }
    for (i, s) in steps.iter().enumerate() {
        if s.residual > a * c.powi(i as i32) + 1e-12 {
            return Err(format!("decay violated at {i}: {} > {a} * {c}^{i}", s.residual));
        }
        if i >= 1 && r1 > 0.0 {
            let bound = rn_bound(2.0 * r1, a, k, c, i as u64).map_err(|e| e.to_string())?;
            if s.r > bound + 1e-9 {
                return Err(format!("R bound violated at {i}: {} > {bound}", s.r));
            }
        }
    }
    Ok(())
}

/// Random expression tree in `dim` variables. Constants are non-negative,
/// as the parser never produces signed literals.
pub fn random_node(rng: &mut RngStream, depth: u32, dim: usize) -> Node {
    let leaf = depth == 0 || rng.uniform(0.0, 1.0) < 0.25;
    if leaf {
        return if rng.uniform(0.0, 1.0) < 0.5 {
            Node::Var((rng.uniform(0.0, dim as f64) as usize).min(dim - 1))
        } else if rng.uniform(0.0, 1.0) < 0.5 {
            Node::Const(rng.uniform(0.0, 10.0).floor())
        } else {
            Node::Const(rng.uniform(0.0, 5.0))
        };
    }
    let sub = |rng: &mut RngStream| Box::new(random_node(rng, depth - 1, dim));
    match (rng.uniform(0.0, 8.0) as usize).min(7) {
        0 => Node::Unary(UnaryOp::Neg, sub(rng)),
        1 => Node::Binary(BinaryOp::Add, sub(rng), sub(rng)),
        2 => Node::Binary(BinaryOp::Sub, sub(rng), sub(rng)),
        3 => Node::Binary(BinaryOp::Mul, sub(rng), sub(rng)),
        4 => Node::Binary(BinaryOp::Div, sub(rng), sub(rng)),
        5 => Node::Binary(BinaryOp::Pow, sub(rng), sub(rng)),
        _ => {
            let f = Func::ALL[(rng.uniform(0.0, Func::ALL.len() as f64) as usize).min(Func::ALL.len() - 1)];
            let args = (0..f.arity()).map(|_| random_node(rng, depth - 1, dim)).collect();
            Node::Call(f, args)
        }
    }
}

/// Plain recursive evaluation, written independently of the library's
/// postfix machine.
pub fn naive_eval(node: &Node, x: &[f64]) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var(i) => x[*i],
        Node::Unary(UnaryOp::Neg, a) => -naive_eval(a, x),
        Node::Binary(op, a, b) => {
            let (a, b) = (naive_eval(a, x), naive_eval(b, x));
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => a / b,
                BinaryOp::Pow => a.powf(b),
            }
        }
        Node::Call(f, args) => {
            let v: Vec<f64> = args.iter().map(|a| naive_eval(a, x)).collect();
            match f {
                Func::Sin => v[0].sin(),
                Func::Cos => v[0].cos(),
                Func::Tan => v[0].tan(),
                Func::Exp => v[0].exp(),
                Func::Log => v[0].ln(),
                Func::Sqrt => v[0].sqrt(),
                Func::Abs => v[0].abs(),
                Func::Min => v[0].min(v[1]),
                Func::Max => v[0].max(v[1]),
            }
        }
    }
}

/// Equal up to `tol` relative to `max(1, |b|)`; NaN matches NaN and
/// infinities must match exactly.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * b.abs().max(1.0)
}
