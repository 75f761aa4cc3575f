//! Spherical geometry kernel on the unit 3-sphere `S³ ⊂ R⁴`.
//!
//! Points are unit vectors, geodesic distance is the angle between them, and
//! `R⁴` carries its standard orientation. Everything above this module only
//! ever talks to the sphere through these primitives.

mod sampling;

use std::ops::{Index, Neg};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::numeric::{acos_clamped, sqrt_clamped, wrap_positive, CLAMP_BAND, TWO_PI_SQ};
use crate::{Error, Result};

pub use sampling::{signed_cone_sum, OracleOptions, PointStream, SampledVolume};

/// Cross-product norm below which three points are treated as spanning less
/// than a plane through the origin.
const DEGENERATE_SPAN: f64 = 1e-12;

/// A point of `S³`, stored as a unit vector of `R⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vector4<f64>);

impl SpherePoint {
    /// Normalizes `(x1, x2, x3, x4)`. Returns `None` for the zero vector.
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Option<Self> {
        Self::from_vector(Vector4::new(x1, x2, x3, x4))
    }

    pub fn from_vector(v: Vector4<f64>) -> Option<Self> {
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| Self(v / n))
    }

    /// Standard basis point `e_{i+1}`.
    pub fn basis(i: usize) -> Self {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        Self(v)
    }

    pub fn vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    /// Image under an orthogonal map of `R⁴`.
    pub fn transform(&self, m: &Matrix4<f64>) -> Self {
        Self(m * self.0)
    }

    pub fn max_abs_diff(&self, other: &SpherePoint) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Neg for SpherePoint {
    type Output = SpherePoint;
    fn neg(self) -> SpherePoint {
        self.antipode()
    }
}

impl Index<usize> for SpherePoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Geodesic distance, in `[0, π]`.
pub fn dist(u: &SpherePoint, v: &SpherePoint) -> f64 {
    // Near 0 and π the arccos of the inner product loses digits; the chord
    // form keeps full relative accuracy there.
    let d = (u.0 - v.0).norm();
    let s = (u.0 + v.0).norm();
    2.0 * d.atan2(s)
}

/// Area of the spherical triangle with side-length cosines `c1, c2, c3`.
///
/// Each vertex angle follows from the spherical law of cosines; the area is the
/// angle excess. Sides of length 0 or π leave the vertex angles undefined.
pub fn triangle_area(c1: f64, c2: f64, c3: f64) -> Result<f64> {
    triangle_area_banded(c1, c2, c3, CLAMP_BAND)
}

/// [`triangle_area`] with an explicit clamp band for the angle cosines.
pub fn triangle_area_banded(c1: f64, c2: f64, c3: f64, band: f64) -> Result<f64> {
    let c = [c1, c2, c3];
    if c.iter().any(|x| 1.0 - x.abs() < DEGENERATE_SPAN) {
        return Err(Error::DegenerateFace(format!(
            "side cosines ({c1}, {c2}, {c3}) include a side of length 0 or π"
        )));
    }
    let mut excess = -std::f64::consts::PI;
    for i in 0..3 {
        let (cj, ck) = (c[(i + 1) % 3], c[(i + 2) % 3]);
        let denom = ((1.0 - cj * cj) * (1.0 - ck * ck)).sqrt();
        excess += acos_clamped((c[i] - cj * ck) / denom, band, "triangle angle")?;
    }
    Ok(excess)
}

/// Cosine of leg `a` of a spherical triangle with sides `a, b, π/2` whose angles
/// opposite `a` and `b` are `alpha` and `beta`.
pub fn right_triangle_side(alpha: f64, beta: f64) -> Result<f64> {
    let (ca, cb) = (alpha.cos(), beta.cos());
    let denom = sqrt_clamped(1.0 - ca * ca * cb * cb, CLAMP_BAND, "right triangle")?;
    if denom < DEGENERATE_SPAN {
        return Err(Error::Domain { context: "right triangle angles", value: alpha });
    }
    Ok(ca * beta.sin() / denom)
}

/// The vector `n` with `⟨n, x⟩ = det(a, b, c, x)` for all `x`.
///
/// It is orthogonal to `a, b, c` and satisfies `det(a, b, c, n) = |n|² ≥ 0`.
pub fn cross4(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let minor = |skip: usize| {
        let rows: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
        let m = |r: usize, v: &Vector4<f64>| v[rows[r]];
        m(0, a) * (m(1, b) * m(2, c) - m(2, b) * m(1, c)) - m(0, b) * (m(1, a) * m(2, c) - m(2, a) * m(1, c))
            + m(0, c) * (m(1, a) * m(2, b) - m(2, a) * m(1, b))
    };
    // Cofactor expansion of det(a, b, c, x) along the last column.
    Vector4::new(-minor(0), minor(1), -minor(2), minor(3))
}

pub fn det4(a: &SpherePoint, b: &SpherePoint, c: &SpherePoint, d: &SpherePoint) -> f64 {
    Matrix4::from_columns(&[a.0, b.0, c.0, d.0]).determinant()
}

/// Unit normal of the great 2-sphere through the positively oriented triangle
/// `(x0, x1, x2)`, chosen so that `det(x0, x1, x2, m) > 0`.
pub fn face_normal(x0: &SpherePoint, x1: &SpherePoint, x2: &SpherePoint) -> Result<Vector4<f64>> {
    let n = cross4(&x0.0, &x1.0, &x2.0);
    let norm = n.norm();
    if norm < DEGENERATE_SPAN {
        return Err(Error::DegenerateFace(format!(
            "vertices {:?}, {:?}, {:?} span less than a plane",
            x0.coords(),
            x1.coords(),
            x2.coords()
        )));
    }
    Ok(n / norm)
}

fn unit(v: Vector4<f64>, what: &str) -> Result<Vector4<f64>> {
    let n = v.norm();
    if n < DEGENERATE_SPAN {
        return Err(Error::DegenerateFace(format!("{what} has no well-defined direction")));
    }
    Ok(v / n)
}

/// Oriented dihedral angle, in `[0, 2π)`, at the edge `uv` between the faces
/// `(u, v, w1)` and `(v, u, w2)`, both listed in positive cyclic order.
///
/// `at ∈ (0, 1)` selects the point of the edge where the tangent frames are
/// built; the angle does not depend on it. A flat, unfolded pair of faces gives
/// `π`. Swapping the roles of the faces, i.e. calling with `(v, u, w2, w1)`,
/// gives the same angle.
pub fn oriented_dihedral_angle(
    u: &SpherePoint,
    v: &SpherePoint,
    w1: &SpherePoint,
    w2: &SpherePoint,
    at: f64,
) -> Result<f64> {
    let p = unit(u.0 * (1.0 - at) + v.0 * at, "edge point")?;
    let e = unit(v.0 - p * v.0.dot(&p), "edge tangent")?;
    let inward = |w: &SpherePoint| unit(w.0 - p * w.0.dot(&p) - e * w.0.dot(&e), "face direction");
    let n1 = inward(w1)?;
    let n2 = inward(w2)?;
    let m1 = face_normal(u, v, w1)?;
    let phi = (-n2.dot(&m1)).atan2(n2.dot(&n1));
    Ok(wrap_positive(phi, 2.0 * std::f64::consts::PI))
}

/// A volume class in `R / 2π²Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeClass {
    representative: f64,
    lifted: Option<f64>,
}

impl VolumeClass {
    /// Class of a real lift, remembering the lift.
    pub fn from_real(x: f64) -> Self {
        Self { representative: wrap_positive(x, TWO_PI_SQ), lifted: Some(x) }
    }

    pub fn from_representative(x: f64) -> Self {
        Self { representative: wrap_positive(x, TWO_PI_SQ), lifted: None }
    }

    /// Representative in `[0, 2π²)`.
    pub fn representative(&self) -> f64 {
        self.representative
    }

    pub fn lifted(&self) -> Option<f64> {
        self.lifted
    }

    /// Distance between the classes on the circle of length `2π²`.
    pub fn distance(&self, other: &VolumeClass) -> f64 {
        let d = wrap_positive(self.representative - other.representative, TWO_PI_SQ);
        d.min(TWO_PI_SQ - d)
    }
}

/// Oriented volume of the spherical tetrahedron `c1 c2 c3 c4`, estimated by
/// sampling, with its standard error.
///
/// The orientation sign is `sgn det(c1, c2, c3, c4)`; a degenerate tetrahedron
/// has volume zero with no error.
pub fn tetra_volume_oriented(
    vertices: [SpherePoint; 4],
    options: &OracleOptions,
) -> Result<(VolumeClass, f64)> {
    let s = signed_cone_sum(&[(vertices, 1.0)], options)?;
    Ok((VolumeClass::from_real(s.estimate), s.stderr))
}
