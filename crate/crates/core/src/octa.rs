//! Octahedron combinatorics and the exotic flexible family.
//!
//! The family lives in `R⁴ = L₁ ⊕ L₂` with `L₁ = span(e₁, e₂)` and
//! `L₂ = span(e₃, e₄)`: `a₁, b₁` sit on the great circle of `L₁`, `a₂, b₂` on
//! that of `L₂`, and `a₃, b₃` are mirror images under `x₃ ↦ −x₃`. The flex
//! parameter is the angle `θ` of `a₃` above `L₁`.

use std::fmt;
use std::ops::{Index, Mul, Neg};
use std::str::FromStr;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::numeric::{sqrt_clamped, CLAMP_BAND};
use crate::sphere::{cross4, dist, oriented_dihedral_angle, SpherePoint};
use crate::{Error, Result};

/// Slack on the `θ` interval ends.
const THETA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexId {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl VertexId {
    pub const ALL: [VertexId; 6] = [Self::A1, Self::A2, Self::A3, Self::B1, Self::B2, Self::B3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    /// `1`, `2` or `3`.
    pub fn level(self) -> usize {
        self.index() % 3 + 1
    }

    pub fn is_b(self) -> bool {
        self.index() >= 3
    }

    /// The vertex not joined to this one by an edge.
    pub fn opposite(self) -> Self {
        Self::from_index((self.index() + 3) % 6)
    }

    pub fn new(level: usize, b: bool) -> Self {
        Self::from_index(level - 1 + if b { 3 } else { 0 })
    }

    /// Exchanges levels 1 and 2, keeping the letter.
    pub fn swap_levels(self) -> Self {
        match self.level() {
            1 => Self::new(2, self.is_b()),
            2 => Self::new(1, self.is_b()),
            _ => self,
        }
    }

    pub fn label(self) -> &'static str {
        ["a1", "a2", "a3", "b1", "b2", "b3"][self.index()]
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for VertexId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown vertex {s:?}")))
    }
}

/// An unordered edge, stored with its endpoints in label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(VertexId, VertexId);

impl EdgeId {
    /// The twelve edges: every pair except the three diagonals `aᵢbᵢ`.
    pub const ALL: [EdgeId; 12] = {
        use VertexId::*;
        [
            EdgeId(A1, A2),
            EdgeId(A1, A3),
            EdgeId(A1, B2),
            EdgeId(A1, B3),
            EdgeId(A2, A3),
            EdgeId(A2, B1),
            EdgeId(A2, B3),
            EdgeId(A3, B1),
            EdgeId(A3, B2),
            EdgeId(B1, B2),
            EdgeId(B1, B3),
            EdgeId(B2, B3),
        ]
    };

    pub fn new(u: VertexId, v: VertexId) -> Option<Self> {
        if u == v || u.opposite() == v {
            None
        } else if u < v {
            Some(Self(u, v))
        } else {
            Some(Self(v, u))
        }
    }

    pub fn endpoints(self) -> (VertexId, VertexId) {
        (self.0, self.1)
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|e| *e == self).expect("edge list is complete")
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// Face `u₁u₂u₃` with `uⱼ ∈ {aⱼ, bⱼ}`.
///
/// The orientation of `a₁a₂a₃` is the listed order; each replacement of an
/// `a` by a `b` reverses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    b: [bool; 3],
}

impl FaceId {
    pub const ALL: [FaceId; 8] = [
        FaceId { b: [false, false, false] },
        FaceId { b: [false, false, true] },
        FaceId { b: [false, true, false] },
        FaceId { b: [false, true, true] },
        FaceId { b: [true, false, false] },
        FaceId { b: [true, false, true] },
        FaceId { b: [true, true, false] },
        FaceId { b: [true, true, true] },
    ];

    pub fn new(b1: bool, b2: bool, b3: bool) -> Self {
        Self { b: [b1, b2, b3] }
    }

    /// `[u₁, u₂, u₃]` in level order.
    pub fn vertices(self) -> [VertexId; 3] {
        [0, 1, 2].map(|i| VertexId::new(i + 1, self.b[i]))
    }

    /// The vertices in positive cyclic order.
    pub fn oriented(self) -> [VertexId; 3] {
        let [u1, u2, u3] = self.vertices();
        if self.b.iter().filter(|&&x| x).count() % 2 == 0 {
            [u1, u2, u3]
        } else {
            [u1, u3, u2]
        }
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.b[v.level() - 1] == v.is_b()
    }

    /// `(u, v, w)` with `u → v` in the positive cyclic order, if the edge lies on
    /// this face.
    pub fn directed_edge(self, u: VertexId, v: VertexId) -> Option<VertexId> {
        let o = self.oriented();
        (0..3).find(|&i| o[i] == u && o[(i + 1) % 3] == v).map(|i| o[(i + 2) % 3])
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.vertices();
        write!(f, "{a}{b}{c}")
    }
}

impl FromStr for FaceId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.to_string() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown face {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of `x`, with zero counted as positive.
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

macro_rules! serialize_as_display {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_display!(EdgeId, FaceId, AntipodeMask);

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value() as i8)
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(serde::de::Error::custom(format!("sign must be 1 or -1, got {other}"))),
        }
    }
}

/// Cosines of the four free edge lengths: `p₁ = ⟨a₁,a₃⟩`, `p₂ = ⟨b₁,a₃⟩`,
/// `q₁ = ⟨a₂,a₃⟩`, `q₂ = ⟨b₂,a₃⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExoticParams {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

/// A failed inequality of [`ExoticParams::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails ({})", self.constraint, self.detail)
    }
}

impl ExoticParams {
    pub fn new(p1: f64, p2: f64, q1: f64, q2: f64) -> Self {
        Self { p1, p2, q1, q2 }
    }

    /// Validated constructor.
    pub fn checked(p1: f64, p2: f64, q1: f64, q2: f64) -> Result<Self> {
        let p = Self::new(p1, p2, q1, q2);
        p.check()?;
        Ok(p)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p1, self.p2, self.q1, self.q2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// All failed invariants; empty for a valid canonical family.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let [p1, p2, q1, q2] = self.as_array();
        if !self.as_array().iter().all(|x| x.is_finite()) {
            out.push(Violation { constraint: "finite", detail: format!("{self:?}") });
            return out;
        }
        for (name, x) in [("p1", p1), ("p2", p2), ("q1", q1), ("q2", q2)] {
            if x.abs() >= 1.0 {
                out.push(Violation { constraint: "|x|<1", detail: format!("{name} = {x}") });
            }
        }
        if p1.abs() >= p2.abs() {
            out.push(Violation { constraint: "|p1|<|p2|", detail: format!("|p1| = {}, |p2| = {}", p1.abs(), p2.abs()) });
        }
        if q1.abs() >= q2.abs() {
            out.push(Violation { constraint: "|q1|<|q2|", detail: format!("|q1| = {}, |q2| = {}", q1.abs(), q2.abs()) });
        }
        let r = self.p2 * self.p2 + self.q2 * self.q2;
        if r >= 1.0 {
            out.push(Violation { constraint: "p2²+q2²<1", detail: format!("p2²+q2² = {r}") });
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    /// `(θ_min, θ_max) = (arcsin max|qⱼ|, arccos max|pⱼ|)`.
    pub fn theta_bounds(&self) -> (f64, f64) {
        let q = self.q1.abs().max(self.q2.abs());
        let p = self.p1.abs().max(self.p2.abs());
        (q.asin(), p.acos())
    }

    /// Whether the construction is realizable at all (without the canonical
    /// ordering): `max pⱼ² + max qⱼ² < 1`.
    pub fn is_realizable(&self) -> bool {
        let p = self.p1.abs().max(self.p2.abs());
        let q = self.q1.abs().max(self.q2.abs());
        self.as_array().iter().all(|x| x.is_finite()) && p * p + q * q < 1.0
    }
}

impl fmt::Display for ExoticParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.p1, self.p2, self.q1, self.q2)
    }
}

impl FromStr for ExoticParams {
    type Err = Error;
    /// Parses `p1,p2,q1,q2`.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let a: [f64; 4] =
            v.try_into().map_err(|_| Error::Parse(format!("expected four comma-separated values, got {s:?}")))?;
        Ok(Self::from_array(a))
    }
}

/// A point of the configuration space: the angle `θ` and the four branch signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexState {
    pub theta: f64,
    pub delta1: Sign,
    pub delta2: Sign,
    pub eps1: Sign,
    pub eps2: Sign,
}

impl FlexState {
    pub fn new(theta: f64, delta1: Sign, delta2: Sign, eps1: Sign, eps2: Sign) -> Self {
        Self { theta, delta1, delta2, eps1, eps2 }
    }

    pub fn signs(&self) -> [Sign; 4] {
        [self.delta1, self.delta2, self.eps1, self.eps2]
    }

    pub fn with_signs(theta: f64, s: [Sign; 4]) -> Self {
        Self::new(theta, s[0], s[1], s[2], s[3])
    }

    /// All four signs reversed.
    pub fn flipped(&self) -> Self {
        Self::new(self.theta, -self.delta1, -self.delta2, -self.eps1, -self.eps2)
    }
}

/// Six labeled vertices with the fixed octahedral combinatorics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Octahedron {
    vertices: [SpherePoint; 6],
}

impl Index<VertexId> for Octahedron {
    type Output = SpherePoint;
    fn index(&self, v: VertexId) -> &SpherePoint {
        &self.vertices[v.index()]
    }
}

/// Gram-sense span threshold for faces.
const FACE_SPAN: f64 = 1e-12;

impl Octahedron {
    /// Wraps six vertices given in [`VertexId::ALL`] order, rejecting degenerate faces.
    pub fn from_vertices(vertices: [SpherePoint; 6]) -> Result<Self> {
        let o = Self { vertices };
        for f in FaceId::ALL {
            let [x, y, z] = f.oriented().map(|v| o[v].vector());
            if cross4(x, y, z).norm() < FACE_SPAN {
                return Err(Error::DegenerateFace(f.to_string()));
            }
        }
        Ok(o)
    }

    pub fn vertices(&self) -> &[SpherePoint; 6] {
        &self.vertices
    }

    /// Flattened coordinates in `R²⁴`.
    pub fn embedding(&self) -> [f64; 24] {
        let mut out = [0.0; 24];
        for (i, v) in self.vertices.iter().enumerate() {
            out[4 * i..4 * i + 4].copy_from_slice(&v.coords());
        }
        out
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        let (u, v) = e.endpoints();
        dist(&self[u], &self[v])
    }

    pub fn edge_lengths(&self) -> EdgeLengths {
        EdgeLengths(EdgeId::ALL.map(|e| self.edge_length(e)))
    }

    /// The two faces at `e = uv` as `(w1, w2)` with faces `(u, v, w1)` and
    /// `(v, u, w2)` positively oriented.
    pub fn edge_wings(e: EdgeId) -> (VertexId, VertexId) {
        let (u, v) = e.endpoints();
        let mut w1 = None;
        let mut w2 = None;
        for f in FaceId::ALL {
            if let Some(w) = f.directed_edge(u, v) {
                w1 = Some(w);
            }
            if let Some(w) = f.directed_edge(v, u) {
                w2 = Some(w);
            }
        }
        (w1.expect("edge has a forward face"), w2.expect("edge has a backward face"))
    }

    /// Oriented dihedral angle `φ_uv ∈ [0, 2π)` at edge `e`.
    pub fn dihedral_angle(&self, e: EdgeId) -> Result<f64> {
        let (u, v) = e.endpoints();
        let (w1, w2) = Self::edge_wings(e);
        oriented_dihedral_angle(&self[u], &self[v], &self[w1], &self[w2], 0.5)
    }

    pub fn dihedral_angles(&self) -> Result<[f64; 12]> {
        let mut out = [0.0; 12];
        for (i, e) in EdgeId::ALL.iter().enumerate() {
            out[i] = self.dihedral_angle(*e)?;
        }
        Ok(out)
    }

    /// The same octahedron with each masked vertex replaced by its antipode.
    pub fn antipode_variant(&self, m: AntipodeMask) -> Result<Self> {
        let mut v = self.vertices;
        for id in m.vertices() {
            v[id.index()] = -v[id.index()];
        }
        Self::from_vertices(v)
    }

    /// Image under an orthogonal map followed by relabeling: the new vertex `i`
    /// is `M · self[perm(i)]`.
    pub fn transformed(&self, m: &Matrix4<f64>, perm: &[VertexId; 6]) -> Self {
        Self { vertices: std::array::from_fn(|i| self[perm[i]].transform(m)) }
    }

    pub fn max_vertex_diff(&self, other: &Octahedron) -> f64 {
        (0..6).map(|i| self.vertices[i].max_abs_diff(&other.vertices[i])).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLengths(pub [f64; 12]);

impl Index<EdgeId> for EdgeLengths {
    type Output = f64;
    fn index(&self, e: EdgeId) -> &f64 {
        &self.0[e.index()]
    }
}

impl EdgeLengths {
    pub fn max_abs_diff(&self, other: &EdgeLengths) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Vertices of the exotic octahedron at state `s`.
///
/// Requires only realizability and `θ` within bounds, so sign-flipped and
/// relabeled parameter sets are accepted too.
pub fn build(p: &ExoticParams, s: &FlexState) -> Result<Octahedron> {
    if !p.is_realizable() {
        return Err(Error::InvalidParams(p.validate()));
    }
    let (lo, hi) = p.theta_bounds();
    if !(s.theta >= lo - THETA_SLACK && s.theta <= hi + THETA_SLACK) {
        return Err(Error::ThetaOutOfRange { theta: s.theta, min: lo, max: hi });
    }
    let (sn, c) = s.theta.sin_cos();
    let circle = |x: f64, sign: Sign, scale: f64| -> Result<(f64, f64)> {
        let u = x / scale;
        Ok((u, sign.value() * sqrt_clamped((1.0 - u) * (1.0 + u), CLAMP_BAND, "exotic vertex")?))
    };
    let (a1x, a1y) = circle(p.p1, s.delta1, c)?;
    let (b1x, b1y) = circle(p.p2, s.delta2, c)?;
    let (a2x, a2y) = circle(p.q1, s.eps1, sn)?;
    let (b2x, b2y) = circle(p.q2, s.eps2, sn)?;
    let pt = |x: [f64; 4]| SpherePoint::new(x[0], x[1], x[2], x[3]).expect("nonzero vertex");
    Octahedron::from_vertices([
        pt([a1x, a1y, 0.0, 0.0]),
        pt([0.0, 0.0, a2x, a2y]),
        pt([c, 0.0, sn, 0.0]),
        pt([b1x, b1y, 0.0, 0.0]),
        pt([0.0, 0.0, b2x, b2y]),
        pt([c, 0.0, -sn, 0.0]),
    ])
}

/// A subset of the six vertices to replace by antipodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AntipodeMask(u8);

impl AntipodeMask {
    pub const EMPTY: AntipodeMask = AntipodeMask(0);

    /// Bit `i` stands for `VertexId::ALL[i]`.
    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 64).then_some(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn of(vs: &[VertexId]) -> Self {
        Self(vs.iter().fold(0, |acc, v| acc | 1 << v.index()))
    }

    pub fn all() -> impl Iterator<Item = AntipodeMask> {
        (0..64).map(AntipodeMask)
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 >> v.index() & 1 == 1
    }

    pub fn vertices(self) -> impl Iterator<Item = VertexId> {
        VertexId::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

impl fmt::Display for AntipodeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vertices().map(VertexId::label).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl FromStr for AntipodeMask {
    type Err = Error;
    /// Parses `{a1,b3}`, `a1,b3` or `{}`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut m = 0u8;
        for t in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            m |= 1 << t.parse::<VertexId>()?.index();
        }
        Ok(Self(m))
    }
}

/// Source of one transformed sign: `new = factor · old[source]`, with sources
/// indexed as `(δ₁, δ₂, ε₁, ε₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateMap {
    /// Whether `θ ↦ π/2 − θ`.
    pub complement_theta: bool,
    pub sources: [(usize, Sign); 4],
}

impl StateMap {
    pub const IDENTITY: StateMap =
        StateMap { complement_theta: false, sources: [(0, Sign::Plus), (1, Sign::Plus), (2, Sign::Plus), (3, Sign::Plus)] };

    pub fn apply(&self, s: &FlexState) -> FlexState {
        let old = s.signs();
        let theta = if self.complement_theta { std::f64::consts::FRAC_PI_2 - s.theta } else { s.theta };
        FlexState::with_signs(theta, self.sources.map(|(i, f)| f * old[i]))
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &StateMap) -> StateMap {
        StateMap {
            complement_theta: self.complement_theta != first.complement_theta,
            sources: self.sources.map(|(i, f)| {
                let (j, g) = first.sources[i];
                (j, f * g)
            }),
        }
    }
}

/// Description of an antipode variant as a member of the exotic family.
///
/// For every state `s`, vertex `i` of `antipode_variant(build(p, s), mask)`
/// equals `matrix · build(params, state_map(s))[relabel[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedVariant {
    pub mask: AntipodeMask,
    pub params: ExoticParams,
    pub relabel: [VertexId; 6],
    pub matrix: Matrix4<f64>,
    pub state_map: StateMap,
    /// Orientation character of the relabeling on the face list.
    pub relabel_orientation: Sign,
    /// Whether the roles of the `p` and `q` pairs ended up exchanged.
    pub swapped_roles: bool,
}

impl NormalizedVariant {
    pub fn state(&self, s: &FlexState) -> FlexState {
        self.state_map.apply(s)
    }

    /// Factor relating oriented volumes: `V(variant) = factor · V(build(params, state(s)))`.
    pub fn volume_factor(&self) -> f64 {
        self.relabel_orientation.value() * self.matrix.determinant().signum()
    }

    /// Rebuilds the variant from its normalized description.
    pub fn rebuild(&self, s: &FlexState) -> Result<Octahedron> {
        Ok(build(&self.params, &self.state(s))?.transformed(&self.matrix, &self.relabel))
    }
}

/// The relabeling `aⱼ ↔ bⱼ` at one level: odd on faces.
fn swap_letters(level: usize, perm: &mut [VertexId; 6]) {
    for v in perm.iter_mut() {
        if v.level() == level {
            *v = v.opposite();
        }
    }
}

/// Rewrites an antipode variant of the exotic family as an isometric,
/// relabeled member of the family.
///
/// Negating `a₁, b₁, a₂, b₂` negates `p₁, p₂, q₁, q₂` together with the
/// matching branch sign. Negating `b₃` or `a₃` exchanges the two circles
/// (`p ↔ q`, levels `1 ↔ 2`, `θ ↦ π/2 − θ`). Elementary steps are applied in
/// vertex order and the result is re-canonicalized.
pub fn normalize_variant(p: &ExoticParams, mask: AntipodeMask) -> NormalizedVariant {
    use VertexId::*;
    let mut params = *p;
    let mut perm = VertexId::ALL;
    let mut matrix = Matrix4::identity();
    let mut state_map = StateMap::IDENTITY;
    let mut orientation = Sign::Plus;
    let mut swapped = false;

    for old in mask.vertices() {
        let slot = perm[old.index()];
        let (mut step_map, mut step_matrix, mut step_perm) = (StateMap::IDENTITY, Matrix4::identity(), None);
        match slot {
            A1 | B1 | A2 | B2 => {
                let k = match slot {
                    A1 => 0,
                    B1 => 1,
                    A2 => 2,
                    _ => 3,
                };
                let mut a = params.as_array();
                a[k] = -a[k];
                params = ExoticParams::from_array(a);
                step_map.sources[k].1 = Sign::Minus;
            }
            A3 | B3 => {
                let [p1, p2, q1, q2] = params.as_array();
                let flip = if slot == A3 { -1.0 } else { 1.0 };
                params = ExoticParams::new(flip * q1, flip * q2, flip * p1, flip * p2);
                step_map = StateMap {
                    complement_theta: true,
                    sources: [(2, Sign::Plus), (3, Sign::Plus), (0, Sign::Plus), (1, Sign::Plus)],
                };
                // The new vertices are R · (masked old vertices, levels swapped);
                // the old ones are therefore Rᵀ · new.
                let r = if slot == A3 {
                    Matrix4::new(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
                } else {
                    Matrix4::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
                };
                step_matrix = r.transpose();
                step_perm = Some(VertexId::swap_levels as fn(VertexId) -> VertexId);
                orientation = -orientation;
                swapped = !swapped;
            }
        }
        state_map = step_map.compose(&state_map);
        matrix *= step_matrix;
        if let Some(f) = step_perm {
            perm = perm.map(f);
        }
    }

    // Re-canonicalize: |p1| < |p2| and |q1| < |q2| by renaming within a level.
    let mut a = params.as_array();
    for (level, (i, j)) in [(1, (0, 1)), (2, (2, 3))] {
        if a[i].abs() > a[j].abs() {
            a.swap(i, j);
            swap_letters(level, &mut perm);
            let s = state_map.sources;
            state_map.sources[i] = s[j];
            state_map.sources[j] = s[i];
            orientation = -orientation;
        }
    }
    params = ExoticParams::from_array(a);

    NormalizedVariant { mask, params, relabel: perm, matrix, state_map, relabel_orientation: orientation, swapped_roles: swapped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    use Sign::{Minus, Plus};
    use VertexId::*;

    fn pstar() -> ExoticParams {
        ExoticParams::new(0.1, 0.6, 0.2, 0.5)
    }

    fn state(theta: f64, s: [Sign; 4]) -> FlexState {
        FlexState::with_signs(theta, s)
    }

    fn all_signs() -> impl Iterator<Item = [Sign; 4]> {
        (0..16u8).map(|b| [0, 1, 2, 3].map(|i| if b >> i & 1 == 1 { Minus } else { Plus }))
    }

    #[test]
    fn face_list_is_a_closed_oriented_surface() {
        for e in EdgeId::ALL {
            let (u, v) = e.endpoints();
            let fwd = FaceId::ALL.iter().filter(|f| f.directed_edge(u, v).is_some()).count();
            let back = FaceId::ALL.iter().filter(|f| f.directed_edge(v, u).is_some()).count();
            assert_eq!((fwd, back), (1, 1), "edge {e}");
        }
        assert_eq!(FaceId::ALL[0].oriented(), [A1, A2, A3]);
        assert_eq!(FaceId::new(false, false, true).oriented(), [A1, B3, A2]);
    }

    #[test]
    fn labels_roundtrip() {
        for v in VertexId::ALL {
            assert_eq!(v.label().parse::<VertexId>().unwrap(), v);
        }
        for f in FaceId::ALL {
            assert_eq!(f.to_string().parse::<FaceId>().unwrap(), f);
        }
        assert_eq!("b1b2a3".parse::<FaceId>().unwrap(), FaceId::new(true, true, false));
        for m in AntipodeMask::all() {
            assert_eq!(m.to_string().parse::<AntipodeMask>().unwrap(), m);
        }
        assert_eq!("{}".parse::<AntipodeMask>().unwrap(), AntipodeMask::EMPTY);
    }

    #[test]
    fn validate_examples() {
        assert!(pstar().validate().is_empty());
        let v = ExoticParams::new(0.6, 0.6, 0.2, 0.5).validate();
        assert!(v.iter().any(|x| x.constraint == "|p1|<|p2|"), "{v:?}");
        let v = ExoticParams::new(0.1, 0.9, 0.2, 0.7).validate();
        assert!(v.iter().any(|x| x.constraint == "p2²+q2²<1"), "{v:?}");
        assert!(ExoticParams::new(0.1, 0.6, 0.5, 0.5).validate().iter().any(|x| x.constraint == "|q1|<|q2|"));
        assert!(!ExoticParams::new(f64::NAN, 0.6, 0.2, 0.5).validate().is_empty());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn theta_bounds_examples() {
        let (lo, hi) = pstar().theta_bounds();
        assert_abs_diff_eq!(lo, 0.5f64.asin(), epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 0.6f64.acos(), epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 0.523599, epsilon = 1e-6);
        assert_abs_diff_eq!(hi, 0.927295, epsilon = 1e-6);
        let (lo, _) = ExoticParams::new(0.1, 0.6, 0.0, 1e-12).theta_bounds();
        assert!(lo < 1e-11);
        let (_, hi) = ExoticParams::new(0.0, 1e-12, 0.2, 0.5).theta_bounds();
        assert_abs_diff_eq!(hi, FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn build_inner_products() {
        let p = pstar();
        for s in all_signs() {
            let o = build(&p, &state(0.7, s)).unwrap();
            assert_abs_diff_eq!(o[A1].dot(&o[A3]), p.p1, epsilon = 1e-12);
            assert_abs_diff_eq!(o[B1].dot(&o[A3]), p.p2, epsilon = 1e-12);
            assert_abs_diff_eq!(o[A2].dot(&o[A3]), p.q1, epsilon = 1e-12);
            assert_abs_diff_eq!(o[B2].dot(&o[A3]), p.q2, epsilon = 1e-12);
            for u in [A1, B1] {
                for v in [A2, B2] {
                    assert_abs_diff_eq!(o[u].dot(&o[v]), 0.0, epsilon = 1e-15);
                }
            }
            let (sn, c) = 0.7f64.sin_cos();
            assert_eq!(o[A3].coords(), [c, 0.0, sn, 0.0]);
            assert_eq!(o[B3].coords(), [c, 0.0, -sn, 0.0]);
        }
    }

    #[test]
    fn build_rejects_theta_out_of_range() {
        assert!(matches!(build(&pstar(), &state(0.2, [Plus; 4])), Err(Error::ThetaOutOfRange { .. })));
        assert!(matches!(build(&pstar(), &state(1.2, [Plus; 4])), Err(Error::ThetaOutOfRange { .. })));
        let (lo, hi) = pstar().theta_bounds();
        assert!(build(&pstar(), &state(lo, [Plus; 4])).is_ok());
        assert!(build(&pstar(), &state(hi, [Plus; 4])).is_ok());
    }

    #[test]
    fn edge_length_relations() {
        let p = pstar();
        let o = build(&p, &state(0.75, [Plus, Minus, Plus, Minus])).unwrap();
        let l = o.edge_lengths();
        let e = |u, v| EdgeId::new(u, v).unwrap();
        for (u, v) in [(A1, A2), (A1, B2), (B1, A2), (B1, B2)] {
            assert_abs_diff_eq!(l[e(u, v)], FRAC_PI_2, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(l[e(A1, A3)], l[e(A1, B3)], epsilon = 1e-12);
        assert_abs_diff_eq!(l[e(B1, A3)], l[e(B1, B3)], epsilon = 1e-12);
        assert_abs_diff_eq!(l[e(A2, A3)] + l[e(A2, B3)], std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(l[e(B2, A3)] + l[e(B2, B3)], std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn edge_lengths_constant_across_states() {
        let p = pstar();
        let (lo, hi) = p.theta_bounds();
        let base = build(&p, &state(lo, [Plus; 4])).unwrap().edge_lengths();
        for k in 0..=20 {
            let theta = lo + (hi - lo) * k as f64 / 20.0;
            for s in all_signs() {
                let l = build(&p, &state(theta, s)).unwrap().edge_lengths();
                assert!(l.max_abs_diff(&base) < 1e-12);
            }
        }
    }

    #[test]
    fn sign_flip_is_half_turn() {
        let p = pstar();
        let rot = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0));
        for s in all_signs() {
            let st = state(0.66, s);
            let a = build(&p, &st).unwrap();
            let b = build(&p, &st.flipped()).unwrap();
            assert!(a.transformed(&rot, &VertexId::ALL).max_vertex_diff(&b) < 1e-12);
        }
        assert_abs_diff_eq!(rot.determinant(), 1.0);
    }

    #[test]
    fn four_branches_are_distinct() {
        let p = pstar();
        let octs: Vec<_> = [[Plus, Plus], [Plus, Minus], [Minus, Plus], [Minus, Minus]]
            .iter()
            .map(|[d2, e2]| build(&p, &state(0.7, [Plus, *d2, Plus, *e2])).unwrap())
            .collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(octs[i].max_vertex_diff(&octs[j]) > 1e-3);
            }
        }
    }

    #[test]
    fn antipode_variant_basics() {
        let o = build(&pstar(), &state(0.7, [Plus; 4])).unwrap();
        assert_eq!(o.antipode_variant(AntipodeMask::EMPTY).unwrap(), o);
        let m = AntipodeMask::of(&[A1]);
        let v = o.antipode_variant(m).unwrap();
        assert_abs_diff_eq!(v[A1].dot(&v[A3]), -0.1, epsilon = 1e-12);
        for m in AntipodeMask::all() {
            assert_eq!(o.antipode_variant(m).unwrap().antipode_variant(m).unwrap(), o);
        }
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_variant(&pstar(), AntipodeMask::of(&[A1]));
        assert_eq!(n.params, ExoticParams::new(-0.1, 0.6, 0.2, 0.5));
        assert!(!n.swapped_roles);
        assert_eq!(n.relabel, VertexId::ALL);
        let n = normalize_variant(&pstar(), AntipodeMask::of(&[B3]));
        assert_eq!(n.params, ExoticParams::new(0.2, 0.5, 0.1, 0.6));
        assert_eq!(n.relabel, [A2, A1, A3, B2, B1, B3]);
        assert!(n.swapped_roles);
    }

    #[test]
    fn normalized_variants_rebuild_exactly() {
        let p = pstar();
        let (lo, hi) = p.theta_bounds();
        for m in AntipodeMask::all() {
            let n = normalize_variant(&p, m);
            assert!(n.params.validate().is_empty(), "{m}: {:?}", n.params);
            assert_abs_diff_eq!(n.matrix.determinant().abs(), 1.0, epsilon = 1e-14);
            for s in all_signs() {
                // At the interval ends a square root of a rounding-level
                // radicand limits agreement to about 1e-8.
                for (theta, tol) in [(lo, 1e-7), (0.6, 1e-12), (0.8, 1e-12), (hi, 1e-7)] {
                    let st = state(theta, s);
                    let direct = build(&p, &st).unwrap().antipode_variant(m).unwrap();
                    let rebuilt = n.rebuild(&st).unwrap();
                    assert!(direct.max_vertex_diff(&rebuilt) < tol, "mask {m}");
                }
            }
        }
    }

    #[test]
    fn canonicalization_on_unordered_input() {
        let raw = ExoticParams::new(0.6, 0.1, 0.5, 0.2);
        let n = normalize_variant(&raw, AntipodeMask::of(&[A2]));
        assert_eq!(n.params, ExoticParams::new(0.1, 0.6, 0.2, -0.5));
        assert_eq!(n.relabel_orientation, Plus);
        let st = state(0.8, [Plus, Minus, Plus, Plus]);
        let direct = build(&raw, &st).unwrap().antipode_variant(n.mask).unwrap();
        assert!(direct.max_vertex_diff(&n.rebuild(&st).unwrap()) < 1e-12);
    }

    #[test]
    fn state_map_composition() {
        let a = StateMap { complement_theta: true, sources: [(2, Plus), (3, Minus), (0, Plus), (1, Plus)] };
        let b = StateMap { complement_theta: false, sources: [(1, Minus), (0, Plus), (3, Plus), (2, Minus)] };
        let s = state(FRAC_PI_4 / 2.0, [Plus, Minus, Minus, Plus]);
        let lhs = b.compose(&a).apply(&s);
        let rhs = b.apply(&a.apply(&s));
        assert_eq!(lhs.signs(), rhs.signs());
        assert_abs_diff_eq!(lhs.theta, rhs.theta, epsilon = 1e-15);
    }
}
