//! Points, boxes, seeded random streams and the two samplers every chain step
//! relies on: uniform in a box and uniform in a closed ball.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self + offset`, coordinate-wise.
    pub fn offset(&self, offset: &[f64]) -> Point {
        debug_assert_eq!(self.0.len(), offset.len());
        Point(self.0.iter().zip(offset).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Axis-aligned closed box `[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidArgument("domain must have d >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "domain side {i} must satisfy lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p
                .coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Length of the main diagonal.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

/// A seeded random stream. Equal `(seed, stream_id)` pairs give identical
/// draw sequences; distinct stream ids give independent sequences.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u: f64 = self.rng.random();
        // u in [0, 1) so the result stays inside [lo, hi] up to rounding; clamp the rounding.
        (lo + (hi - lo) * u).clamp(lo, hi)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draws a point with independent uniform coordinates in `domain`.
pub fn sample_box(domain: &BoxDomain, rng: &mut RngStream) -> Point {
    Point(
        domain
            .lower
            .iter()
            .zip(&domain.upper)
            .map(|(lo, hi)| rng.uniform(*lo, *hi))
            .collect(),
    )
}

/// Uniform direction on the unit sphere in R^dim.
fn unit_direction(dim: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Offset vector uniform in the closed ball of the given radius around the origin.
pub fn sample_ball_offset(dim: usize, radius: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ball radius must be finite and >= 0, got {radius}"
        )));
    }
    if radius == 0.0 {
        return Ok(vec![0.0; dim]);
    }
    let dir = unit_direction(dim, rng);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / dim as f64);
    Ok(dir.into_iter().map(|x| x * r).collect())
}

/// Point uniform in the closed ball `B(center, radius)`.
pub fn sample_ball(center: &Point, radius: f64, rng: &mut RngStream) -> Result<Point> {
    if radius == 0.0 {
        return Ok(center.clone());
    }
    let off = sample_ball_offset(center.dim(), radius, rng)?;
    Ok(center.offset(&off))
}

/// Euclidean distance.
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(sq_dist(a.coords(), b.coords()).sqrt())
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
