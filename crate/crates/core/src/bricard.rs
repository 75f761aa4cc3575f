//! Vertex links and their biquadratic relations.
//!
//! The link of a vertex `u` is the spherical quadrilateral traced by the unit
//! tangents of the four edges at `u`. Its sides are the face angles at `u` and
//! its angles are the dihedral angles of those edges. For consecutive link
//! vertices the half-angle tangents `t₁, t₂` satisfy a biquadratic relation
//! whose coefficients depend only on the sides.

use serde::Serialize;

use crate::numeric::{acos_clamped, CLAMP_BAND};
use crate::octa::{build, EdgeId, ExoticParams, FaceId, FlexState, Octahedron, Sign, VertexId};
use crate::sphere::SpherePoint;
use crate::{Error, Result};

/// A point `(X : Y)` of the real projective line, normalized to `X² + Y² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projective {
    pub x: f64,
    pub y: f64,
}

impl Projective {
    /// `tan(φ/2)` as `(sin(φ/2) : cos(φ/2))`.
    pub fn half_angle(phi: f64) -> Self {
        let (x, y) = (0.5 * phi).sin_cos();
        Self { x, y }
    }

    pub fn new(x: f64, y: f64) -> Self {
        let n = x.hypot(y);
        Self { x: x / n, y: y / n }
    }

    pub fn from_finite(t: f64) -> Self {
        Self::new(t, 1.0)
    }

    pub fn infinity() -> Self {
        Self { x: 1.0, y: 0.0 }
    }

    /// `t ↦ 1/t`.
    pub fn reciprocal(self) -> Self {
        Self { x: self.y, y: self.x }
    }

    /// `t ↦ −t`.
    pub fn negate(self) -> Self {
        Self { x: -self.x, y: self.y }
    }

    /// Affine value `X/Y`, infinite at `Y = 0`.
    pub fn value(self) -> f64 {
        self.x / self.y
    }
}

/// The link of one vertex: neighbors `v₁..v₄` in the cyclic order of the
/// faces `(u v₁ v₂), (u v₂ v₃), (u v₃ v₄), (u v₄ v₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkQuad {
    pub vertex: VertexId,
    pub neighbors: [VertexId; 4],
    /// `α, β, γ, δ = ∠v₁uv₂, ∠v₂uv₃, ∠v₃uv₄, ∠v₄uv₁`.
    pub sides: [f64; 4],
    /// Oriented dihedral angles at the edges `uvᵢ`.
    pub angles: [f64; 4],
}

impl LinkQuad {
    pub fn tangents(&self) -> [Projective; 4] {
        self.angles.map(Projective::half_angle)
    }

    /// Coefficient sides for the pair `(t_{uvᵢ}, t_{uvᵢ₊₁})`.
    ///
    /// `α` is the side between the two link vertices, `β` the other side at
    /// `vᵢ`, `δ` the other side at `vᵢ₊₁` and `γ` the opposite side. With `β`
    /// and `δ` exchanged the realized tangents leave the curve.
    pub fn pair_sides(&self, i: usize) -> [f64; 4] {
        let s = |k: usize| self.sides[(i + k) % 4];
        [s(0), s(3), s(2), s(1)]
    }

    /// Residuals of the four consecutive pairs.
    pub fn residuals(&self) -> [f64; 4] {
        let t = self.tangents();
        std::array::from_fn(|i| biquad_residual(&biquad_coeffs(self.pair_sides(i)), t[i], t[(i + 1) % 4]))
    }
}

/// Neighbors of `u` in positive cyclic order, starting from the one of lowest
/// label.
pub fn link_cycle(u: VertexId) -> [VertexId; 4] {
    let faces: Vec<[VertexId; 3]> = FaceId::ALL
        .iter()
        .filter(|f| f.contains(u))
        .map(|f| {
            let o = f.oriented();
            let k = o.iter().position(|&v| v == u).expect("face contains u");
            [o[k], o[(k + 1) % 3], o[(k + 2) % 3]]
        })
        .collect();
    let start = VertexId::ALL.into_iter().find(|&v| v != u && v != u.opposite()).expect("neighbor exists");
    let mut out = [start; 4];
    for i in 1..4 {
        let prev = out[i - 1];
        out[i] = faces.iter().find(|f| f[1] == prev).expect("link is a 4-cycle")[2];
    }
    out
}

fn angle_at(u: &SpherePoint, v: &SpherePoint, w: &SpherePoint) -> Result<f64> {
    // Law of cosines for the triangle u v w, angle at u.
    let (cv, cw, cvw) = (u.dot(v), u.dot(w), v.dot(w));
    let denom = ((1.0 - cv * cv) * (1.0 - cw * cw)).sqrt();
    if denom < 1e-14 {
        return Err(Error::DegenerateFace(format!("angle at {:?}", u.coords())));
    }
    acos_clamped((cvw - cv * cw) / denom, CLAMP_BAND, "face angle")
}

pub fn vertex_link(o: &Octahedron, u: VertexId) -> Result<LinkQuad> {
    let n = link_cycle(u);
    let mut sides = [0.0; 4];
    let mut angles = [0.0; 4];
    for i in 0..4 {
        sides[i] = angle_at(&o[u], &o[n[i]], &o[n[(i + 1) % 4]])?;
        angles[i] = o.dihedral_angle(EdgeId::new(u, n[i]).expect("neighbors are adjacent"))?;
    }
    Ok(LinkQuad { vertex: u, neighbors: n, sides, angles })
}

/// Coefficients of `A t₁²t₂² + B t₁² + 2C t₁t₂ + D t₂² + E = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct BiquadCoeffs {
    pub A: f64,
    pub B: f64,
    pub C: f64,
    pub D: f64,
    pub E: f64,
}

impl BiquadCoeffs {
    pub fn as_array(&self) -> [f64; 5] {
        [self.A, self.B, self.C, self.D, self.E]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Coefficients for a quadrilateral with `t₁, t₂` at the endpoints of side
/// `α`, where `β` is the other side at `t₁` and `δ` the other side at `t₂`.
pub fn biquad_coeffs([alpha, beta, gamma, delta]: [f64; 4]) -> BiquadCoeffs {
    let cg = gamma.cos();
    BiquadCoeffs {
        A: cg - (alpha + beta + delta).cos(),
        B: cg - (alpha + beta - delta).cos(),
        C: -2.0 * beta.sin() * delta.sin(),
        D: cg - (alpha - beta + delta).cos(),
        E: cg - (alpha - beta - delta).cos(),
    }
}

/// Homogeneous residual, scaled by the largest coefficient magnitude.
pub fn biquad_residual(c: &BiquadCoeffs, t1: Projective, t2: Projective) -> f64 {
    let (x1, y1, x2, y2) = (t1.x, t1.y, t2.x, t2.y);
    let v = c.A * x1 * x1 * x2 * x2
        + c.B * x1 * x1 * y2 * y2
        + 2.0 * c.C * x1 * y1 * x2 * y2
        + c.D * y1 * y1 * x2 * x2
        + c.E * y1 * y1 * y2 * y2;
    let scale = c.max_abs();
    if scale == 0.0 {
        0.0
    } else {
        v / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadKind {
    Isogram,
    Antiisogram,
    Deltoid,
    Antideltoid,
    Generic,
}

/// Which sides the classification matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pairing {
    /// `α ~ γ` and `β ~ δ`.
    Opposite,
    /// `α ~ β` and `γ ~ δ`.
    AbCd,
    /// `β ~ γ` and `δ ~ α`.
    BcDa,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadClass {
    pub kind: QuadKind,
    pub pairing: Pairing,
}

/// Classifies sides `(α, β, γ, δ)`; the first matching class in the order
/// isogram, antiisogram, deltoid, antideltoid wins.
pub fn classify_quad(sides: [f64; 4], tol: f64) -> QuadClass {
    use std::f64::consts::PI;
    let [a, b, c, d] = sides;
    let eq = |x: f64, y: f64| (x - y).abs() < tol;
    let sup = |x: f64, y: f64| (x + y - PI).abs() < tol;
    let class = |kind, pairing| QuadClass { kind, pairing };
    if eq(a, c) && eq(b, d) {
        class(QuadKind::Isogram, Pairing::Opposite)
    } else if sup(a, c) && sup(b, d) {
        class(QuadKind::Antiisogram, Pairing::Opposite)
    } else if eq(a, b) && eq(c, d) {
        class(QuadKind::Deltoid, Pairing::AbCd)
    } else if eq(b, c) && eq(d, a) {
        class(QuadKind::Deltoid, Pairing::BcDa)
    } else if sup(a, b) && sup(c, d) {
        class(QuadKind::Antideltoid, Pairing::AbCd)
    } else if sup(b, c) && sup(d, a) {
        class(QuadKind::Antideltoid, Pairing::BcDa)
    } else {
        class(QuadKind::Generic, Pairing::None)
    }
}

/// Outcome of [`exotic_face_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub states: usize,
    pub link_a1: QuadKind,
    pub link_a2: QuadKind,
    pub nu1: i8,
    pub nu2: i8,
    /// `max |cos ℓ(a₂a₃) + cos ℓ(a₂b₃)|` and the same for `b₂`.
    pub edge_relation_error: f64,
    pub max_residual: f64,
    pub failures: Vec<String>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Cosine-relation sign `ν` at `u`: `cos ∠(v, u, w) = ν cos ∠(v, u, w')` for
/// the link neighbors `w, w'` on the opposite level.
fn nu_sign(o: &Octahedron, u: VertexId, other: VertexId, tol: f64) -> Option<i8> {
    let c3a = angle_at(&o[u], &o[other], &o[VertexId::A3]).ok()?.cos();
    let c3b = angle_at(&o[u], &o[other], &o[VertexId::B3]).ok()?.cos();
    if (c3a - c3b).abs() < tol {
        Some(1)
    } else if (c3a + c3b).abs() < tol {
        Some(-1)
    } else {
        None
    }
}

/// Checks along `n` states that `a₂` has a deltoid link and `a₁` an
/// antideltoid link, that neither is an (anti)isogram, and reports the
/// cosine-relation signs `(ν₁, ν₂)`.
pub fn exotic_face_check(p: &ExoticParams, n: usize, tol: f64) -> Result<WitnessReport> {
    p.check()?;
    let (lo, hi) = p.theta_bounds();
    let mut report = WitnessReport {
        states: 0,
        link_a1: QuadKind::Generic,
        link_a2: QuadKind::Generic,
        nu1: 0,
        nu2: 0,
        edge_relation_error: 0.0,
        max_residual: 0.0,
        failures: Vec::new(),
    };
    let signs = [Sign::Plus, Sign::Minus];
    let mut nu = (None::<i8>, None::<i8>);
    for k in 0..n {
        // Interior nodes only; the ends put vertices on branch points.
        let theta = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        for (d2, e2) in signs.iter().flat_map(|d| signs.iter().map(move |e| (*d, *e))) {
            let s = FlexState::new(theta, Sign::Plus, d2, Sign::Plus, e2);
            let o = build(p, &s)?;
            report.states += 1;
            let l1 = vertex_link(&o, VertexId::A1)?;
            let l2 = vertex_link(&o, VertexId::A2)?;
            let k1 = classify_quad(l1.sides, tol).kind;
            let k2 = classify_quad(l2.sides, tol).kind;
            if k1 != QuadKind::Antideltoid {
                report.failures.push(format!("theta {theta}: link of a1 is {k1:?}"));
            }
            if k2 != QuadKind::Deltoid {
                report.failures.push(format!("theta {theta}: link of a2 is {k2:?}"));
            }
            report.link_a1 = k1;
            report.link_a2 = k2;
            for l in [&l1, &l2] {
                for r in l.residuals() {
                    report.max_residual = report.max_residual.max(r.abs());
                }
            }
            let e = |u, v| o.edge_length(EdgeId::new(u, v).expect("edge")).cos();
            use VertexId::*;
            report.edge_relation_error = report
                .edge_relation_error
                .max((e(A2, A3) + e(A2, B3)).abs())
                .max((e(B2, A3) + e(B2, B3)).abs());
            for (slot, u, other) in [(0, A1, A2), (1, A2, A1)] {
                let v = nu_sign(&o, u, other, tol);
                let cur = if slot == 0 { &mut nu.0 } else { &mut nu.1 };
                match (v, *cur) {
                    (None, _) => report.failures.push(format!("theta {theta}: no cosine relation at {u}")),
                    (Some(x), None) => *cur = Some(x),
                    (Some(x), Some(y)) if x != y => {
                        return Err(Error::Ambiguous(format!("cosine-relation sign at {u} changes along the flex")))
                    }
                    _ => {}
                }
            }
        }
    }
    report.nu1 = nu.0.unwrap_or(0);
    report.nu2 = nu.1.unwrap_or(0);
    if (report.nu1, report.nu2) != (-1, 1) {
        report.failures.push(format!("(nu1, nu2) = ({}, {})", report.nu1, report.nu2));
    }
    if report.edge_relation_error > tol {
        report.failures.push(format!("edge cosine relation off by {:e}", report.edge_relation_error));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn pstar() -> ExoticParams {
        ExoticParams::new(0.1, 0.6, 0.2, 0.5)
    }

    #[test]
    fn coefficient_fixtures() {
        let c = biquad_coeffs([FRAC_PI_3; 4]);
        for (got, want) in c.as_array().iter().zip([1.5, 0.0, -1.5, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let c = biquad_coeffs([FRAC_PI_3, FRAC_PI_2, FRAC_PI_3, FRAC_PI_2]);
        for (got, want) in c.as_array().iter().zip([1.0, 0.0, -2.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn isogram_factors_into_real_branches() {
        // A z² + 2C z + E in z = t₁t₂: discriminant 4C² − 4AE.
        let c = biquad_coeffs([FRAC_PI_3, FRAC_PI_2, FRAC_PI_3, FRAC_PI_2]);
        assert_abs_diff_eq!(c.B, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.D, 0.0, epsilon = 1e-15);
        let disc = 4.0 * c.C * c.C - 4.0 * c.A * c.E;
        assert_abs_diff_eq!(disc, 12.0, epsilon = 1e-12);
    }

    #[test]
    fn residual_trivial_cases() {
        let c = BiquadCoeffs { A: 1.0, B: 2.0, C: -1.0, D: 0.0, E: 0.0 };
        let zero = Projective::from_finite(0.0);
        assert_eq!(biquad_residual(&c, zero, Projective::from_finite(0.7)), 0.0);
        let scaled = BiquadCoeffs { A: 3.0, B: 6.0, C: -3.0, D: 0.0, E: 0.0 };
        let t = (Projective::from_finite(0.3), Projective::from_finite(-1.2));
        assert_abs_diff_eq!(biquad_residual(&c, t.0, t.1), biquad_residual(&scaled, t.0, t.1), epsilon = 1e-15);
    }

    #[test]
    fn classification_examples() {
        let k = |s| classify_quad(s, 1e-9).kind;
        assert_eq!(k([FRAC_PI_3, FRAC_PI_2, FRAC_PI_3, FRAC_PI_2]), QuadKind::Isogram);
        assert_eq!(k([FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3, FRAC_PI_2]), QuadKind::Antiisogram);
        assert_eq!(k([FRAC_PI_3, FRAC_PI_3, FRAC_PI_4, FRAC_PI_4]), QuadKind::Deltoid);
        assert_eq!(k([FRAC_PI_3, 2.0 * FRAC_PI_3, FRAC_PI_4, 3.0 * FRAC_PI_4]), QuadKind::Antideltoid);
        assert_eq!(k([0.3, 0.5, 0.7, 0.9]), QuadKind::Generic);
    }

    #[test]
    fn classification_under_rotation() {
        let s = [FRAC_PI_3, FRAC_PI_3, FRAC_PI_4, FRAC_PI_4];
        let r = [s[1], s[2], s[3], s[0]];
        assert_eq!(classify_quad(s, 1e-9).pairing, Pairing::AbCd);
        assert_eq!(classify_quad(r, 1e-9), QuadClass { kind: QuadKind::Deltoid, pairing: Pairing::BcDa });
    }

    #[test]
    fn link_of_a2_sides() {
        let p = pstar();
        let o = build(&p, &FlexState::new(0.7, Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus)).unwrap();
        let l = vertex_link(&o, VertexId::A2).unwrap();
        use VertexId::*;
        assert_eq!(l.neighbors, [A1, B3, B1, A3]);
        // δ side is ∠a3 a2 a1.
        assert_abs_diff_eq!(l.sides[3].cos(), 0.1 / 0.96f64.sqrt(), epsilon = 1e-12);
        assert_eq!(classify_quad(l.sides, 1e-9).kind, QuadKind::Deltoid);
    }

    #[test]
    fn link_cycles_follow_face_orientation() {
        for u in VertexId::ALL {
            let n = link_cycle(u);
            for i in 0..4 {
                let (v, w) = (n[i], n[(i + 1) % 4]);
                assert!(FaceId::ALL.iter().any(|f| f.directed_edge(u, v) == Some(w)));
            }
        }
    }

    #[test]
    fn realized_links_satisfy_relation() {
        let p = pstar();
        let (lo, hi) = p.theta_bounds();
        for k in 1..20 {
            let theta = lo + (hi - lo) * k as f64 / 20.0;
            for b in 0..4u8 {
                let d2 = if b & 1 == 0 { Sign::Plus } else { Sign::Minus };
                let e2 = if b & 2 == 0 { Sign::Plus } else { Sign::Minus };
                let o = build(&p, &FlexState::new(theta, Sign::Plus, d2, Sign::Plus, e2)).unwrap();
                for u in VertexId::ALL {
                    for r in vertex_link(&o, u).unwrap().residuals() {
                        assert!(r.abs() < 1e-9, "vertex {u}, theta {theta}: {r:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn perturbed_tangents_leave_the_curve() {
        let o = build(&pstar(), &FlexState::new(0.7, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus)).unwrap();
        let l = vertex_link(&o, VertexId::A1).unwrap();
        let c = biquad_coeffs(l.pair_sides(0));
        let t1 = Projective::half_angle(l.angles[0] + 0.05);
        let t2 = Projective::half_angle(l.angles[1]);
        assert!(biquad_residual(&c, t1, t2).abs() > 1e-6);
    }

    #[test]
    fn face_check_on_reference_family() {
        let r = exotic_face_check(&pstar(), 16, 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!((r.nu1, r.nu2), (-1, 1));
        assert_eq!(r.link_a1, QuadKind::Antideltoid);
        assert_eq!(r.link_a2, QuadKind::Deltoid);
    }

    #[test]
    fn face_check_rejects_equal_q_moduli() {
        let p = ExoticParams::new(0.1, 0.6, -0.5, 0.5);
        assert!(exotic_face_check(&p, 4, 1e-9).is_err());
        let o = build(&p, &FlexState::new(0.7, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus)).unwrap();
        let k = classify_quad(vertex_link(&o, VertexId::A1).unwrap().sides, 1e-9).kind;
        assert!(matches!(k, QuadKind::Isogram | QuadKind::Antiisogram), "{k:?}");
    }
}
