//! Sampled volumes of signed sums of spherical tetrahedra.
//!
//! A spherical tetrahedron with linearly independent vertices is the trace on
//! `S³` of a simplicial cone, so its volume is `2π²` times the probability that
//! an isotropic Gaussian vector lands in the cone. All cones of a sum share one
//! sample stream; each sample contributes the integer `Σ sign_i [x ∈ cone_i]`,
//! which keeps the estimate and its variance exact under any chunk scheduling.

use nalgebra::{Matrix4, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpherePoint;
use crate::numeric::TWO_PI_SQ;
use crate::{Error, Result};

const CHUNK: u64 = 1 << 16;
/// Barycentric slack for cone membership.
const MEMBERSHIP_SLACK: f64 = 1e-12;
/// `|det|` below which a tetrahedron is treated as degenerate.
const DEGENERATE_DET: f64 = 1e-14;

/// Source of sample directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStream {
    /// ChaCha8 Gaussian vectors; chunk `k` reads stream `k` of the seed.
    Pseudorandom { seed: u64 },
    /// Four-dimensional Halton points mapped through Box–Muller.
    Halton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub samples: u64,
    pub stream: PointStream,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { samples: 10_000_000, stream: PointStream::Pseudorandom { seed: 42 } }
    }
}

impl OracleOptions {
    pub fn seeded(samples: u64, seed: u64) -> Self {
        Self { samples, stream: PointStream::Pseudorandom { seed } }
    }
}

/// An estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledVolume {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

struct Cone {
    inverse: Matrix4<f64>,
    weight: i64,
}

impl Cone {
    fn contains(&self, x: &Vector4<f64>) -> bool {
        (0..4).all(|r| self.inverse.row(r).transpose().dot(x) >= -MEMBERSHIP_SLACK)
    }
}

/// Estimates `Σ w_i · V_or(T_i)` for tetrahedra `T_i` with integer weights
/// `w_i` (given as `f64`, rounded), where `V_or(T) = sgn det(T) · vol(T)`.
pub fn signed_cone_sum(terms: &[([SpherePoint; 4], f64)], options: &OracleOptions) -> Result<SampledVolume> {
    let mut cones = Vec::with_capacity(terms.len());
    for (vertices, weight) in terms {
        let m = Matrix4::from_columns(&vertices.map(|v| *v.vector()));
        let det = m.determinant();
        if det.abs() < DEGENERATE_DET {
            continue;
        }
        let inverse = m.try_inverse().ok_or_else(|| Error::DegenerateFace("singular tetrahedron".into()))?;
        let w = weight.round() as i64 * if det > 0.0 { 1 } else { -1 };
        if w != 0 {
            cones.push(Cone { inverse, weight: w });
        }
    }
    let n = options.samples;
    if n == 0 {
        return Err(Error::Parse("sample count must be positive".into()));
    }
    if cones.is_empty() {
        return Ok(SampledVolume { estimate: 0.0, stderr: 0.0, samples: n });
    }
    let chunks = n.div_ceil(CHUNK);
    let score = |x: &Vector4<f64>| -> i64 { cones.iter().filter(|c| c.contains(x)).map(|c| c.weight).sum() };
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            let mut acc = (0i64, 0i64);
            let mut push = |x: Vector4<f64>| {
                let w = score(&x);
                acc.0 += w;
                acc.1 += w * w;
            };
            match options.stream {
                PointStream::Pseudorandom { seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k);
                    for _ in 0..len {
                        push(Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng)));
                    }
                }
                PointStream::Halton => {
                    for i in 0..len {
                        push(halton_gaussian(k * CHUNK + i + 1));
                    }
                }
            }
            acc
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = (sum_sq as f64 / nf - mean * mean).max(0.0);
    Ok(SampledVolume { estimate: TWO_PI_SQ * mean, stderr: TWO_PI_SQ * (var / nf).sqrt(), samples: n })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn halton_gaussian(index: u64) -> Vector4<f64> {
    let u = [2, 3, 5, 7].map(|b| radical_inverse(index, b));
    let pair = |a: f64, b: f64| {
        let r = (-2.0 * a.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * b;
        (r * t.cos(), r * t.sin())
    };
    let (x1, x2) = pair(u[0], u[1]);
    let (x3, x4) = pair(u[2], u[3]);
    Vector4::new(x1, x2, x3, x4)
}
