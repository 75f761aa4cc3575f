//! Jacobi elliptic functions and the kind of the exotic family with respect
//! to each face.
//!
//! For a face `u₁u₂u₃` put `t₁ = t(u₂u₃)`, `t₂ = t(u₃u₁)`, `t₃ = t(u₁u₂)`. Each
//! of `t₁, t₂` is either of `dn` type (never `0` or `∞`) or of `cn/sn` type
//! (passes through both). The kind counts the `cn/sn`-type tangents, and the
//! type is read off from whether the dihedral angle becomes flat at an end of
//! the `θ` interval.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::bricard::Projective;
use crate::configspace::{tangents_along, trace_component, Component, ComponentTrace};
use crate::octa::{build, EdgeId, ExoticParams, FaceId, VertexId};
use crate::sphere::det4;
use crate::{Error, Result};

/// `|sin φ|` below which a dihedral angle counts as flat.
pub const FLAT_THRESHOLD: f64 = 1e-7;
/// A flat angle must be clearly separated from merely small ones.
const AMBIGUITY_BAND: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticModulus {
    pub k: f64,
    pub k_prime: f64,
    /// Real quarter-period.
    #[serde(rename = "K")]
    pub quarter_period: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Modulus(k));
        }
        let k_prime = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, k_prime, quarter_period: FRAC_PI_2 / agm(1.0, k_prime) })
    }

    pub fn jacobi(&self, u: f64) -> Jacobi {
        jacobi_with(u, self.k, self.k_prime)
    }
}

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    a
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2 AGM(1, k′))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    EllipticModulus::new(k).map(|m| m.quarter_period)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `(sn, cn, dn)(u, k)` by the descending Landen (AGM) scheme.
pub fn jacobi(u: f64, k: f64) -> Result<Jacobi> {
    EllipticModulus::new(k).map(|m| m.jacobi(u))
}

fn jacobi_with(u: f64, k: f64, k_prime: f64) -> Jacobi {
    if k == 0.0 {
        let (sn, cn) = u.sin_cos();
        return Jacobi { sn, cn, dn: 1.0 };
    }
    // Descend to a near-trivial modulus, then climb back through the Landen
    // recurrence for dn and cn/sn.
    let mut em = Vec::with_capacity(16);
    let mut en = Vec::with_capacity(16);
    let (mut a, mut emc, mut c) = (1.0f64, k_prime * k_prime, 1.0);
    for _ in 0..16 {
        em.push(a);
        emc = emc.sqrt();
        en.push(emc);
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= 1e-9 * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let (sn, cn) = (u * c).sin_cos();
    if sn == 0.0 {
        return Jacobi { sn, cn, dn: 1.0 };
    }
    let mut dn = 1.0;
    let mut a = cn / sn;
    c *= a;
    for (b, e) in em.iter().zip(&en).rev() {
        a *= c;
        c *= dn;
        dn = (e + a) / (b + a);
        a = c / b;
    }
    let s = (c * c + 1.0).sqrt().recip().copysign(sn);
    Jacobi { sn: s, cn: c * s, dn }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    First,
    Second,
    Third,
}

impl Kind {
    /// Kind with `n` tangents of `cn/sn` type.
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => Self::First,
            1 => Self::Second,
            _ => Self::Third,
        }
    }

    /// Expected sign of `a·b` in `t₃ = a t + b/t`.
    pub fn fit_sign(self) -> f64 {
        if self == Self::First {
            1.0
        } else {
            -1.0
        }
    }
}

/// The kind claimed for each face when `|p₁| < |p₂|` and `|q₁| < |q₂|`.
pub fn reference_kind(face: FaceId) -> Kind {
    match (face.contains(VertexId::B1), face.contains(VertexId::B2)) {
        (false, false) => Kind::First,
        (true, true) => Kind::Third,
        _ => Kind::Second,
    }
}

/// Where a tangent's dihedral angle goes flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flat {
    Never,
    AtThetaMin,
    AtThetaMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentEvidence {
    pub edge: EdgeId,
    /// Smallest `|sin φ|` at nodes with `θ = θ_min` and `θ = θ_max`.
    pub sin_at_min: f64,
    pub sin_at_max: f64,
    /// Smallest `|sin φ|` anywhere else on the traces.
    pub sin_elsewhere: f64,
    /// Largest `|det|` of the matching tetrahedron at the flat endpoint.
    pub tetra_det: Option<f64>,
    pub flat: Flat,
}

impl TangentEvidence {
    pub fn is_cn_sn(&self) -> bool {
        self.flat != Flat::Never
    }
}

/// The kind together with what it was read from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindLabel {
    pub face: FaceId,
    pub kind: Kind,
    pub t1: TangentEvidence,
    pub t2: TangentEvidence,
}

impl KindLabel {
    /// 1 or 2 for the first `dn`-type tangent, if any.
    pub fn dn_index(&self) -> Option<usize> {
        [(1, &self.t1), (2, &self.t2)].into_iter().find(|(_, e)| !e.is_cn_sn()).map(|(i, _)| i)
    }
}

/// `(t₁, t₂, t₃)` edges of a face `u₁u₂u₃`.
pub fn face_edges(face: FaceId) -> [EdgeId; 3] {
    let [u1, u2, u3] = face.vertices();
    let e = |a, b| EdgeId::new(a, b).expect("face edge");
    [e(u2, u3), e(u3, u1), e(u1, u2)]
}

fn tangent_evidence(p: &ExoticParams, traces: &[ComponentTrace], edge: EdgeId, pivot: [VertexId; 2]) -> Result<TangentEvidence> {
    let (lo, hi) = p.theta_bounds();
    let (mut at_min, mut at_max, mut elsewhere) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut dets = (0.0f64, 0.0f64);
    for trace in traces {
        for node in &trace.nodes {
            let o = build(p, &node.state)?;
            let s = o.dihedral_angle(edge)?.sin().abs();
            let (u, v) = edge.endpoints();
            let det = det4(&o[pivot[0]], &o[pivot[1]], &o[u], &o[v]).abs();
            if node.state.theta == lo {
                at_min = at_min.min(s);
                dets.0 = dets.0.max(det);
            } else if node.state.theta == hi {
                at_max = at_max.min(s);
                dets.1 = dets.1.max(det);
            } else {
                elsewhere = elsewhere.min(s);
            }
        }
    }
    let flat = match (at_min < FLAT_THRESHOLD, at_max < FLAT_THRESHOLD) {
        (true, false) => Flat::AtThetaMin,
        (false, true) => Flat::AtThetaMax,
        (false, false) => {
            if at_min.min(at_max) < AMBIGUITY_BAND {
                return Err(Error::Ambiguous(format!("edge {edge}: |sin φ| reaches {:.3e} but not {FLAT_THRESHOLD:e}", at_min.min(at_max))));
            }
            Flat::Never
        }
        (true, true) => return Err(Error::Ambiguous(format!("edge {edge} is flat at both ends of the θ interval"))),
    };
    let tetra_det = match flat {
        Flat::Never => None,
        Flat::AtThetaMin => Some(dets.0),
        Flat::AtThetaMax => Some(dets.1),
    };
    Ok(TangentEvidence { edge, sin_at_min: at_min, sin_at_max: at_max, sin_elsewhere: elsewhere, tetra_det, flat })
}

fn traces_for(p: &ExoticParams, n: usize) -> Result<Vec<ComponentTrace>> {
    Component::BOTH.iter().map(|&c| trace_component(p, c, n)).collect()
}

/// Kind of the family with respect to `face`, from `n`-node traces of both
/// components.
pub fn classify_kind(p: &ExoticParams, face: FaceId, n: usize) -> Result<KindLabel> {
    classify_on(p, face, &traces_for(p, n)?)
}

fn classify_on(p: &ExoticParams, face: FaceId, traces: &[ComponentTrace]) -> Result<KindLabel> {
    let [e1, e2, _] = face_edges(face);
    let t1 = tangent_evidence(p, traces, e1, [VertexId::A1, VertexId::B1])?;
    let t2 = tangent_evidence(p, traces, e2, [VertexId::A2, VertexId::B2])?;
    let kind = Kind::from_count(usize::from(t1.is_cn_sn()) + usize::from(t2.is_cn_sn()));
    Ok(KindLabel { face, kind, t1, t2 })
}

/// One way of matching the data to `t₃ = a t + b/t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FitVariant {
    /// 1 or 2: which of `t₁, t₂` plays `t`.
    pub index: usize,
    pub invert_t: bool,
    pub invert_t3: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual of `X₃X Y = a X²Y₃ + b Y²Y₃` over normalized
    /// projective coordinates.
    pub residual: f64,
    pub sign_ab: f64,
    pub variant: FitVariant,
}

fn fit_one(series: &[[Projective; 3]], v: FitVariant) -> Option<(f64, f64, f64)> {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let rows: Vec<(f64, f64, f64)> = series
        .iter()
        .map(|triple| {
            let t = if v.invert_t { triple[v.index - 1].reciprocal() } else { triple[v.index - 1] };
            let t3 = if v.invert_t3 { triple[2].reciprocal() } else { triple[2] };
            (t.x * t.x * t3.y, t.y * t.y * t3.y, t3.x * t.x * t.y)
        })
        .collect();
    for &(c1, c2, rhs) in &rows {
        s11 += c1 * c1;
        s12 += c1 * c2;
        s22 += c2 * c2;
        r1 += c1 * rhs;
        r2 += c2 * rhs;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * (s11 * s22).max(f64::MIN_POSITIVE) {
        return None;
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let ss: f64 = rows.iter().map(|&(c1, c2, rhs)| (rhs - a * c1 - b * c2).powi(2)).sum();
    Some((a, b, (ss / rows.len() as f64).sqrt()))
}

/// Least-squares fit of `t₃ = a t + b/t`, with `t` one of `t₁, t₂` (`index`,
/// or both when `None`), either one possibly inverted, and `t₃` possibly
/// inverted. The best variant must reach `tol`.
///
/// Both indices usually fit exactly, with different inversions of `t₃`; the
/// sign of `a·b` separates the kinds only when `t` is a `dn`-type tangent
/// (or, at third-kind faces, either one).
pub fn structural_fit(series: &[[Projective; 3]], face: FaceId, index: Option<usize>, tol: f64) -> Result<StructuralFit> {
    let mut best: Option<StructuralFit> = None;
    let indices = index.map_or(vec![1, 2], |i| vec![i]);
    for index in indices {
        for invert_t in [false, true] {
            for invert_t3 in [false, true] {
                let variant = FitVariant { index, invert_t, invert_t3 };
                if let Some((a, b, residual)) = fit_one(series, variant) {
                    if best.is_none_or(|f| residual < f.residual) {
                        best = Some(StructuralFit { a, b, residual, sign_ab: (a * b).signum(), variant });
                    }
                }
            }
        }
    }
    match best {
        Some(f) if f.residual < tol => Ok(f),
        other => Err(Error::FitFailed { face: face.to_string(), best: other.map_or(f64::INFINITY, |f| f.residual) }),
    }
}

/// `(t₁, t₂, t₃)` of `face` at every node of a trace.
pub fn face_series(trace: &ComponentTrace, face: FaceId) -> Result<Vec<[Projective; 3]>> {
    let idx = face_edges(face).map(EdgeId::index);
    Ok(tangents_along(trace)?.into_iter().map(|t| idx.map(|i| t[i])).collect())
}

/// `min|t| / max|t|` of a `dn`-type tangent along the traces.
fn k_prime_estimate(series: &[[Projective; 3]], index: usize) -> f64 {
    let (lo, hi) = series.iter().map(|t| t[index - 1].value().abs()).fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    lo / hi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceKindReport {
    pub label: Kind,
    pub residual: f64,
    pub sign_ab: f64,
    /// From a `dn`-type tangent; absent at third-kind faces.
    pub k_prime_estimate: Option<f64>,
    pub evidence: KindLabel,
    pub fit: StructuralFit,
}

/// Kind, fit and modulus estimate for all eight faces.
pub fn kind_report(p: &ExoticParams, n: usize, fit_tol: f64) -> Result<BTreeMap<String, FaceKindReport>> {
    let traces = traces_for(p, n)?;
    let mut out = BTreeMap::new();
    for face in FaceId::ALL {
        let label = classify_on(p, face, &traces)?;
        let mut series = Vec::new();
        for t in &traces {
            series.extend(face_series(t, face)?);
        }
        let dn_index = label.dn_index();
        let fit = structural_fit(&series, face, dn_index, fit_tol)?;
        out.insert(
            face.to_string(),
            FaceKindReport {
                label: label.kind,
                residual: fit.residual,
                sign_ab: fit.sign_ab,
                k_prime_estimate: dn_index.map(|i| k_prime_estimate(&series, i)),
                evidence: label,
                fit,
            },
        );
    }
    Ok(out)
}
