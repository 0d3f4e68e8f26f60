//! Residual fields, evaluation counting and max-aggregation for systems.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_box, BoxDomain, Point, RngStream};

/// A real-valued map on R^d. Implementations must be pure.
pub trait ScalarFn: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> ScalarFn for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// One residual field `f_j` with its evaluation counter.
///
/// Clones share the counter, so evaluations made through any clone (or through
/// a normalized copy) are visible from the original.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    func: Arc<dyn ScalarFn>,
    divisor: f64,
    label: String,
    evals: Arc<AtomicU64>,
}

impl ScalarField {
    pub fn new(dim: usize, func: impl ScalarFn + 'static) -> Self {
        Self::from_arc(dim, Arc::new(func))
    }

    pub fn from_arc(dim: usize, func: Arc<dyn ScalarFn>) -> Self {
        ScalarField {
            dim,
            func,
            divisor: 1.0,
            label: String::new(),
            evals: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Scale applied by [`normalize`]; the field value is `f(x) / divisor`.
    pub fn divisor(&self) -> f64 {
        self.divisor
    }

    /// Signed value `f(x) / divisor`; counts one evaluation.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.func.eval(x) / self.divisor
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("divisor", &self.divisor)
            .field("evals", &self.eval_count())
            .finish()
    }
}

/// `|f_j(z)|` per field plus their maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualValue {
    pub per_field: Vec<f64>,
    pub aggregated: f64,
}

impl ResidualValue {
    pub fn from_fields(per_field: Vec<f64>) -> Self {
        let aggregated = per_field.iter().copied().fold(0.0, f64::max);
        ResidualValue {
            per_field,
            aggregated,
        }
    }
}

/// A system `f_1(x) = ... = f_m(x) = 0` on a box, with an absolute tolerance.
#[derive(Debug, Clone)]
pub struct Problem {
    fields: Vec<ScalarField>,
    domain: BoxDomain,
    tol: f64,
}

impl Problem {
    pub fn new(fields: Vec<ScalarField>, domain: BoxDomain, tol: f64) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidArgument(
                "a problem needs at least one field".into(),
            ));
        }
        for f in &fields {
            if f.dim() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    got: f.dim(),
                });
            }
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {tol}"
            )));
        }
        Ok(Problem {
            fields,
            domain,
            tol,
        })
    }

    pub fn fields(&self) -> &[ScalarField] {
        &self.fields
    }

    pub fn num_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(&self, tol: f64) -> Result<Self> {
        Problem::new(self.fields.clone(), self.domain.clone(), tol)
    }

    /// Sum of per-field evaluation counters.
    pub fn field_eval_count(&self) -> u64 {
        self.fields.iter().map(ScalarField::eval_count).sum()
    }

    pub fn reset_counts(&self) {
        self.fields.iter().for_each(ScalarField::reset_count);
    }

    /// Evaluates every field at `z`.
    pub fn evaluate(&self, z: &Point) -> Result<ResidualValue> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        let mut per_field = Vec::with_capacity(self.fields.len());
        for (j, f) in self.fields.iter().enumerate() {
            let v = f.value(z.coords());
            if !v.is_finite() {
                return Err(Error::FieldEvaluation {
                    field: j,
                    value: v,
                    point: z.coords().to_vec(),
                });
            }
            per_field.push(v.abs());
        }
        Ok(ResidualValue::from_fields(per_field))
    }

    pub fn is_solution(&self, rv: &ResidualValue) -> bool {
        rv.aggregated <= self.tol
    }

    /// Rescales each field by the mean of `|f_j|` over `pilot_size` uniform
    /// points of the domain. Scales below 1e-12 are replaced by 1. The zero set
    /// is unchanged; pilot evaluations are counted on the shared counters.
    pub fn normalize(&self, pilot_size: usize, rng: &mut RngStream) -> Result<Problem> {
        if pilot_size == 0 {
            return Err(Error::InvalidArgument("pilot size must be >= 1".into()));
        }
        let mut sums = vec![0.0; self.fields.len()];
        for _ in 0..pilot_size {
            let z = sample_box(&self.domain, rng);
            let rv = self.evaluate(&z)?;
            for (s, v) in sums.iter_mut().zip(&rv.per_field) {
                *s += v;
            }
        }
        let fields = self
            .fields
            .iter()
            .zip(sums)
            .map(|(f, sum)| {
                let mean = sum / pilot_size as f64;
                let scale = if mean < 1e-12 { 1.0 } else { mean };
                let mut g = f.clone();
                g.divisor *= scale;
                g
            })
            .collect();
        Problem::new(fields, self.domain.clone(), self.tol)
    }
}
