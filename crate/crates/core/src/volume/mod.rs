//! Oriented volume of the exotic octahedron, modulo `2π²`.
//!
//! Cutting the octahedron into the four tetrahedra around the diagonal `a₁b₁`
//! and sweeping them along meridians from `±a₂` (resp. `±b₂`) turns the volume
//! into two triangle areas `A₁(y)`, `A₂(y)` of the diagonal cosine `y`:
//!
//! ```text
//! 𝒱 = −(δ₁ sgn(p₂) π/2) (ε₁ A₁(y) − ε₂ A₂(y))
//! ```
//!
//! The sampled decompositions in this module are an independent check of that
//! formula and also apply to antipode variants.

mod profile;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::configspace::{state_from_y, y_bounds, y_of_state, Component};
use crate::numeric::{sqrt_clamped, wrap_centered, CLAMP_BAND, TANGENCY_BAND, TWO_PI_SQ};
use crate::octa::{build, ExoticParams, FaceId, FlexState, Octahedron, Sign, VertexId};
use crate::sphere::{cross4, signed_cone_sum, triangle_area_banded, OracleOptions, PointStream, SampledVolume, SpherePoint, VolumeClass};
use crate::{Error, Result};

pub use profile::{
    bellows_sweep, lift_representatives, loop_increment, volume_profile, BellowsOptions, BellowsReport, ComponentSpread,
    MaskEntry, ProfileRow, SpotCheck, VolumeProfile,
};

/// The two area functions of a valid family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaFunctions {
    pub p1: f64,
    pub p2: f64,
    /// `rⱼ = (1 − qⱼ²)^{−1/2}`.
    pub r: [f64; 2],
}

impl AreaFunctions {
    pub fn new(p: &ExoticParams) -> Self {
        let r = |q: f64| (1.0 - q * q).sqrt().recip();
        Self { p1: p.p1, p2: p.p2, r: [r(p.q1), r(p.q2)] }
    }

    /// `Aⱼ(y)`, the area of the triangle with side cosines `y, rⱼp₁, rⱼp₂`.
    ///
    /// `j` is 1 or 2. The clamp band is the tangency band because `A₂`
    /// touches its branch points at both ends of `[y_min, y_max]`.
    pub fn area(&self, j: usize, y: f64) -> Result<f64> {
        let r = self.r[j - 1];
        triangle_area_banded(y, r * self.p1, r * self.p2, TANGENCY_BAND)
    }

    /// `Fⱼ(y) = −y² + 2rⱼ²p₁p₂y − rⱼ²(p₁² + p₂²) + 1`.
    pub fn f(&self, j: usize, y: f64) -> f64 {
        let r2 = self.r[j - 1].powi(2);
        -y * y + 2.0 * r2 * self.p1 * self.p2 * y - r2 * (self.p1 * self.p1 + self.p2 * self.p2) + 1.0
    }

    /// `Aⱼ′(y) = (rⱼ(p₁ + p₂) − y − 1) / ((y + 1) √Fⱼ(y))`, valid for all signs
    /// of `p₁, p₂`.
    pub fn derivative(&self, j: usize, y: f64) -> Result<f64> {
        let r = self.r[j - 1];
        let root = sqrt_clamped(self.f(j, y), CLAMP_BAND, "area derivative")?;
        if root == 0.0 {
            return Err(Error::Domain { context: "area derivative at a tangency point", value: y });
        }
        Ok((r * (self.p1 + self.p2) - y - 1.0) / ((y + 1.0) * root))
    }
}

/// Real value of the closed form at state `s`; it is continuous along each
/// component, so it serves as its own lift.
pub fn closed_form_real(p: &ExoticParams, s: &FlexState) -> Result<f64> {
    p.check()?;
    let (lo, hi) = p.theta_bounds();
    if !(s.theta >= lo - 1e-12 && s.theta <= hi + 1e-12) {
        return Err(Error::ThetaOutOfRange { theta: s.theta, min: lo, max: hi });
    }
    let areas = AreaFunctions::new(p);
    let y = y_of_state(p, s)?;
    let (a1, a2) = (areas.area(1, y)?, areas.area(2, y)?);
    Ok(-(s.delta1.value() * p.p2.signum() * std::f64::consts::FRAC_PI_2) * (s.eps1.value() * a1 - s.eps2.value() * a2))
}

pub fn closed_form_volume(p: &ExoticParams, s: &FlexState) -> Result<VolumeClass> {
    closed_form_real(p, s).map(VolumeClass::from_real)
}

/// How to split an octahedron into signed tetrahedra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Decomposition {
    /// Cone over the eight oriented faces from an apex chosen off every face
    /// sphere. Works for any octahedron.
    ApexSum,
    /// Cone from the given apex.
    ApexAt([f64; 4]),
    /// The four tetrahedra around the diagonal `a₁b₁`.
    DiagonalA1B1,
}

/// Signed tetrahedra `(o, x₀, x₁, x₂)` over the positively oriented faces.
pub fn apex_terms(o: &Octahedron, apex: &SpherePoint) -> Vec<([SpherePoint; 4], f64)> {
    FaceId::ALL
        .iter()
        .map(|f| {
            let [x, y, z] = f.oriented().map(|v| o[v]);
            ([*apex, x, y, z], 1.0)
        })
        .collect()
}

/// `V(b₁a₁a₂a₃) − V(b₁a₁a₂b₃) − V(b₁a₁b₂a₃) + V(b₁a₁b₂b₃)`, oriented.
pub fn diagonal_terms(o: &Octahedron) -> Vec<([SpherePoint; 4], f64)> {
    use VertexId::*;
    [(A2, A3, 1.0), (A2, B3, -1.0), (B2, A3, -1.0), (B2, B3, 1.0)]
        .iter()
        .map(|&(u, v, w)| ([o[B1], o[A1], o[u], o[v]], w))
        .collect()
}

/// Smallest `|sin|` of the distance from `x` to any face sphere.
pub fn face_clearance(o: &Octahedron, x: &SpherePoint) -> f64 {
    FaceId::ALL
        .iter()
        .map(|f| {
            let [a, b, c] = f.oriented().map(|v| *o[v].vector());
            let n = cross4(&a, &b, &c);
            (n.dot(x.vector()) / n.norm()).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

const APEX_ATTEMPTS: usize = 64;
const APEX_CLEARANCE: f64 = 0.05;

/// A deterministic apex with face clearance at least 0.05.
pub fn choose_apex(o: &Octahedron, seed: u64) -> Result<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..APEX_ATTEMPTS {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if let Some(x) = SpherePoint::new(v[0], v[1], v[2], v[3]) {
            if face_clearance(o, &x) > APEX_CLEARANCE {
                return Ok(x);
            }
        }
    }
    Err(Error::ApexSelection(APEX_ATTEMPTS))
}

/// Sampled oriented volume of any octahedron.
pub fn decomposition_volume(o: &Octahedron, form: Decomposition, options: &OracleOptions) -> Result<SampledVolume> {
    let terms = match form {
        Decomposition::ApexSum => {
            let seed = match options.stream {
                PointStream::Pseudorandom { seed } => seed,
                PointStream::Halton => 0,
            };
            apex_terms(o, &choose_apex(o, seed)?)
        }
        Decomposition::ApexAt(x) => {
            let apex = SpherePoint::new(x[0], x[1], x[2], x[3]).ok_or(Error::ApexSelection(0))?;
            apex_terms(o, &apex)
        }
        Decomposition::DiagonalA1B1 => diagonal_terms(o),
    };
    signed_cone_sum(&terms, options)
}

/// Circular distance between a sampled estimate and a reference, in units of
/// the estimate's standard error.
pub fn sigma_distance(sampled: &SampledVolume, reference: f64) -> f64 {
    let d = wrap_centered(sampled.estimate - reference, TWO_PI_SQ).abs();
    if sampled.stderr == 0.0 {
        if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        d / sampled.stderr
    }
}

/// Coefficients `c₀..c₄` of `Q(y) = g₁²F₂ − g₂²F₁` with `gⱼ = rⱼ(p₁+p₂) − y − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QPoly {
    pub coeffs: [f64; 5],
    pub areas: AreaFunctions,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl QPoly {
    pub fn new(p: &ExoticParams) -> Self {
        let areas = AreaFunctions::new(p);
        let (p1, p2) = (p.p1, p.p2);
        let f = |r: f64| [1.0 - r * r * (p1 * p1 + p2 * p2), 2.0 * r * r * p1 * p2, -1.0];
        let g = |r: f64| [r * (p1 + p2) - 1.0, -1.0];
        let [r1, r2] = areas.r;
        let t1 = poly_mul(&poly_mul(&g(r1), &g(r1)), &f(r2));
        let t2 = poly_mul(&poly_mul(&g(r2), &g(r2)), &f(r1));
        let coeffs = std::array::from_fn(|i| t1[i] - t2[i]);
        Self { coeffs, areas }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    pub fn c3_plus_c0(&self) -> f64 {
        self.coeffs[3] + self.coeffs[0]
    }

    /// `2(r₂ − r₁) r₁r₂ (p₁ + p₂)(p₁² + p₂²)`, a shorter closed form for
    /// `c₃ + c₀`. It drops a term; see [`QPoly::expanded_c3_plus_c0`].
    pub fn short_form_c3_plus_c0(&self) -> f64 {
        let [r1, r2] = self.areas.r;
        let (p1, p2) = (self.areas.p1, self.areas.p2);
        2.0 * (r2 - r1) * r1 * r2 * (p1 + p2) * (p1 * p1 + p2 * p2)
    }

    /// `2(r₂ − r₁)(p₁² + p₂²)(r₁r₂(p₁ + p₂) − r₁ − r₂)`, from expanding `Q`.
    pub fn expanded_c3_plus_c0(&self) -> f64 {
        let [r1, r2] = self.areas.r;
        let (p1, p2) = (self.areas.p1, self.areas.p2);
        2.0 * (r2 - r1) * (p1 * p1 + p2 * p2) * (r1 * r2 * (p1 + p2) - r1 - r2)
    }

    /// `c₃ = 2(r₂ − r₁)(p₁p₂(r₁ + r₂) − p₁ − p₂)`.
    pub fn c3_closed_form(&self) -> f64 {
        let [r1, r2] = self.areas.r;
        let (p1, p2) = (self.areas.p1, self.areas.p2);
        2.0 * (r2 - r1) * (p1 * p2 * (r1 + r2) - p1 - p2)
    }

    /// Whether some coefficient is nonzero beyond `tol`.
    pub fn is_nonzero(&self, tol: f64) -> bool {
        self.coeffs.iter().any(|c| c.abs() > tol)
    }

    /// `(y+1)² F₁F₂ (A₁′² − A₂′²)`, which equals `Q(y)` on the open interval.
    pub fn from_derivatives(&self, y: f64) -> Result<f64> {
        let a = &self.areas;
        let (d1, d2) = (a.derivative(1, y)?, a.derivative(2, y)?);
        Ok((y + 1.0).powi(2) * a.f(1, y) * a.f(2, y) * (d1 * d1 - d2 * d2))
    }
}

pub fn derivative_and_q(p: &ExoticParams) -> Result<QPoly> {
    p.check()?;
    Ok(QPoly::new(p))
}

/// Both sides of the `ε₂`-gap identity at `y₀` on `Γ₊`: the volume difference
/// between the two states over `y₀` (reduced mod `2π²`) and
/// `sgn(p₂) π A₂(y₀)`.
pub fn eps2_gap(p: &ExoticParams, y0: f64) -> Result<(f64, f64)> {
    let plus = state_from_y(p, y0, Component::Plus, Sign::Plus)?;
    let minus = state_from_y(p, y0, Component::Plus, Sign::Minus)?;
    let diff = closed_form_real(p, &plus)? - closed_form_real(p, &minus)?;
    let expected = p.p2.signum() * std::f64::consts::PI * AreaFunctions::new(p).area(2, y0)?;
    Ok((wrap_centered(diff - expected, TWO_PI_SQ) + expected, expected))
}

/// Evenly spread interior points of `(y_min, y_max)`.
pub fn interior_y(p: &ExoticParams, n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = y_bounds(p)?;
    Ok((1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect())
}

/// Result of the discrete Schläfli comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchlafliCheck {
    /// Global sign `s` with `dV = s · ½ Σ ℓₑ dφₑ`.
    pub sign: i8,
    pub max_error: f64,
    pub nodes: usize,
}

/// Compares `dV/dθ` with `½ Σₑ ℓₑ dφₑ/dθ` by central differences at the
/// given states.
pub fn schlafli_check(p: &ExoticParams, states: &[FlexState], h: f64) -> Result<SchlafliCheck> {
    let mut sign = 0i8;
    let mut max_error: f64 = 0.0;
    let lengths = build(p, states.first().ok_or_else(|| Error::Parse("no states".into()))?)?.edge_lengths();
    for s in states {
        let at = |theta: f64| FlexState { theta, ..*s };
        let (lo, hi) = (at(s.theta - h), at(s.theta + h));
        let dv = (closed_form_real(p, &hi)? - closed_form_real(p, &lo)?) / (2.0 * h);
        let (phi_lo, phi_hi) = (build(p, &lo)?.dihedral_angles()?, build(p, &hi)?.dihedral_angles()?);
        let rhs: f64 = (0..12)
            .map(|e| 0.5 * lengths.0[e] * wrap_centered(phi_hi[e] - phi_lo[e], 2.0 * std::f64::consts::PI) / (2.0 * h))
            .sum();
        if sign == 0 {
            sign = if dv * rhs >= 0.0 { 1 } else { -1 };
        }
        let err = (dv - f64::from(sign) * rhs).abs() / dv.abs().max(1.0);
        max_error = max_error.max(err);
    }
    Ok(SchlafliCheck { sign, max_error, nodes: states.len() })
}
