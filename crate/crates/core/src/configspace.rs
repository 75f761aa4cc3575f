//! The configuration curve of the exotic family.
//!
//! For fixed edge lengths the configuration space has two closed components
//! `Γ₊` (`δ₁ε₁ = 1`) and `Γ₋` (`δ₁ε₁ = −1`), exchanged by the reflection
//! `x₄ ↦ −x₄`. With `δ₁ = +1` fixed, each component is a loop of four
//! `θ`-legs: `δ₂` flips at `θ_max`, `ε₂` flips at `θ_min`.
//!
//! The natural flex parameter is `y = ⟨a₁, b₁⟩`, the cosine of the `a₁b₁`
//! diagonal; in `(x, y)` with `x = cos⁻²θ` the curve is a hyperbola.

use serde::Serialize;

use crate::bricard::Projective;
use crate::numeric::{acos_clamped, chebyshev_lobatto, sqrt_clamped, CLAMP_BAND};
use crate::octa::{build, ExoticParams, FlexState, Octahedron, Sign, VertexId};
use crate::{Error, Result};

/// Magnitude of a branch square root below which its sign carries no
/// information.
const IMMATERIAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Component {
    Plus,
    Minus,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::Plus, Component::Minus];

    /// `δ₁ε₁` on this component.
    pub fn sign(self) -> Sign {
        match self {
            Component::Plus => Sign::Plus,
            Component::Minus => Sign::Minus,
        }
    }

    pub fn of_state(s: &FlexState) -> Self {
        if s.delta1 * s.eps1 == Sign::Plus {
            Component::Plus
        } else {
            Component::Minus
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Plus => "plus",
            Component::Minus => "minus",
        }
    }
}

fn branch_root(a: f64, b: f64, scale2: f64) -> Result<f64> {
    // √((1 − a²/scale²)(1 − b²/scale²)), each factor clamped.
    let f = |x: f64| sqrt_clamped(1.0 - x * x / scale2, CLAMP_BAND, "branch radicand");
    Ok(f(a)? * f(b)?)
}

/// `y = p₁p₂/cos²θ + δ₁δ₂ √((1 − p₁²/cos²θ)(1 − p₂²/cos²θ))`.
pub fn y_of_state(p: &ExoticParams, s: &FlexState) -> Result<f64> {
    let c2 = s.theta.cos().powi(2);
    Ok(p.p1 * p.p2 / c2 + (s.delta1 * s.delta2).value() * branch_root(p.p1, p.p2, c2)?)
}

/// `(y_min, y_max)`, both attained at `θ = θ_min`.
pub fn y_bounds(p: &ExoticParams) -> Result<(f64, f64)> {
    let w = 1.0 - p.q2 * p.q2;
    let r = sqrt_clamped((w - p.p1 * p.p1) * (w - p.p2 * p.p2), CLAMP_BAND, "y bounds")?;
    Ok(((p.p1 * p.p2 - r) / w, (p.p1 * p.p2 + r) / w))
}

/// `y² − 2p₁p₂xy + (p₁² + p₂²)x − 1`.
pub fn hyperbola_residual(p: &ExoticParams, x: f64, y: f64) -> f64 {
    y * y - 2.0 * p.p1 * p.p2 * x * y + (p.p1 * p.p1 + p.p2 * p.p2) * x - 1.0
}

/// Cosines of the three diagonals `aᵢbᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalCosines {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

impl DiagonalCosines {
    /// `x = cos⁻²θ`, from `y₃ = cos 2θ`.
    pub fn x(&self) -> f64 {
        2.0 / (1.0 + self.y3)
    }
}

pub fn diagonals(o: &Octahedron) -> DiagonalCosines {
    use VertexId::*;
    DiagonalCosines { y1: o[A1].dot(&o[B1]), y2: o[A2].dot(&o[B2]), y3: o[A3].dot(&o[B3]) }
}

/// The diagonals in closed form.
pub fn diagonals_of_state(p: &ExoticParams, s: &FlexState) -> Result<DiagonalCosines> {
    let s2 = s.theta.sin().powi(2);
    let y2 = p.q1 * p.q2 / s2 + (s.eps1 * s.eps2).value() * branch_root(p.q1, p.q2, s2)?;
    Ok(DiagonalCosines { y1: y_of_state(p, s)?, y2, y3: (2.0 * s.theta).cos() })
}

/// A state reconstructed from diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveredState {
    pub state: FlexState,
    /// `θ = θ_max`: both values of `δ₂` give the same octahedron.
    pub delta2_immaterial: bool,
    /// `θ = θ_min`: both values of `ε₂` give the same octahedron.
    pub eps2_immaterial: bool,
}

/// Recovers the state with `δ₁ = +1` on the given component.
///
/// The diagonals are blind to the reflection `x₄ ↦ −x₄`, which flips `ε₁`
/// and `ε₂` together, so the component has to be supplied.
pub fn recover_state(
    p: &ExoticParams,
    d: &DiagonalCosines,
    component: Component,
    tol: f64,
) -> Result<RecoveredState> {
    let theta = 0.5 * acos_clamped(d.y3, CLAMP_BAND, "diagonal y3")?;
    let (lo, hi) = p.theta_bounds();
    if theta < lo - tol || theta > hi + tol {
        return Err(Error::InconsistentDiagonals(format!("theta {theta} outside [{lo}, {hi}]")));
    }
    let theta = theta.clamp(lo, hi);
    let (sn, c) = theta.sin_cos();
    let r1 = branch_root(p.p1, p.p2, c * c)?;
    let r2 = branch_root(p.q1, p.q2, sn * sn)?;
    let off1 = d.y1 - p.p1 * p.p2 / (c * c);
    let off2 = d.y2 - p.q1 * p.q2 / (sn * sn);
    for (off, r, name) in [(off1, r1, "y1"), (off2, r2, "y2")] {
        if (off.abs() - r).abs() > tol {
            return Err(Error::InconsistentDiagonals(format!("{name} misses both branches by {:e}", (off.abs() - r).abs())));
        }
    }
    let eps1 = component.sign();
    let state = FlexState::new(theta, Sign::Plus, Sign::of(off1), eps1, eps1 * Sign::of(off2));
    Ok(RecoveredState { state, delta2_immaterial: r1 < IMMATERIAL, eps2_immaterial: r2 < IMMATERIAL })
}

/// The state with `δ₁ = +1` and diagonal cosine `y`, on the `ε₂` branch given.
pub fn state_from_y(p: &ExoticParams, y: f64, component: Component, eps2: Sign) -> Result<FlexState> {
    let denom = p.p1 * p.p1 + p.p2 * p.p2 - 2.0 * p.p1 * p.p2 * y;
    let x = (1.0 - y * y) / denom;
    if x.is_nan() || x < 1.0 - CLAMP_BAND {
        return Err(Error::Domain { context: "y outside the hyperbola branch", value: y });
    }
    let theta = acos_clamped(x.recip().sqrt(), CLAMP_BAND, "theta from y")?;
    let (lo, hi) = p.theta_bounds();
    let theta = theta.clamp(lo, hi);
    let delta2 = Sign::of(y - p.p1 * p.p2 * x);
    Ok(FlexState::new(theta, Sign::Plus, delta2, component.sign(), component.sign() * eps2))
}

/// One node of a traced loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceNode {
    pub state: FlexState,
    pub arc: f64,
    /// Leg `0..4` in the order `(+,+), (−,+), (−,−), (+,−)` of `(δ₂, ε₂)`.
    pub leg: usize,
    /// At a leg junction, the value of the sign that flips here on the
    /// previous leg.
    pub junction: Option<Sign>,
}

/// A closed, ordered sampling of one component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentTrace {
    pub params: ExoticParams,
    pub component: Component,
    pub nodes: Vec<TraceNode>,
    /// Chordal length of the closing segment from the last node to the first.
    pub closing_arc: f64,
}

/// `(δ₂, ε₂)` and direction (rising in `θ`?) of each leg.
pub const LEGS: [(Sign, Sign, bool); 4] =
    [(Sign::Plus, Sign::Plus, true), (Sign::Minus, Sign::Plus, false), (Sign::Minus, Sign::Minus, true), (Sign::Plus, Sign::Minus, false)];

fn chord(a: &Octahedron, b: &Octahedron) -> f64 {
    let (x, y) = (a.embedding(), b.embedding());
    x.iter().zip(y.iter()).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Samples a component with `n` nodes, Chebyshev–Lobatto spaced in `θ` on each
/// leg. Each leg contains its starting junction but not its end.
pub fn trace_component(p: &ExoticParams, component: Component, n: usize) -> Result<ComponentTrace> {
    p.check()?;
    if n < 8 {
        return Err(Error::Parse(format!("a trace needs at least 8 nodes, got {n}")));
    }
    let (lo, hi) = p.theta_bounds();
    let eps1 = component.sign();
    let mut nodes = Vec::with_capacity(n);
    let mut prev: Option<Octahedron> = None;
    let mut arc = 0.0;
    let mut first = None;
    for (leg, &(d2, e2, rising)) in LEGS.iter().enumerate() {
        let m = n / 4 + usize::from(leg < n % 4);
        let grid = chebyshev_lobatto(lo, hi, m);
        for k in 0..m {
            let theta = if rising { grid[k] } else { grid[m - k] };
            let state = FlexState::new(theta, Sign::Plus, d2, eps1, eps1 * e2);
            let o = build(p, &state)?;
            if let Some(q) = &prev {
                arc += chord(q, &o);
            } else {
                first = Some(o);
            }
            let junction = (k == 0).then(|| {
                let (pd2, pe2, _) = LEGS[(leg + 3) % 4];
                if rising {
                    eps1 * pe2
                } else {
                    pd2
                }
            });
            nodes.push(TraceNode { state, arc, leg, junction });
            prev = Some(o);
        }
    }
    let closing_arc = chord(prev.as_ref().expect("nodes"), first.as_ref().expect("nodes"));
    Ok(ComponentTrace { params: *p, component, nodes, closing_arc })
}

impl ComponentTrace {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &FlexState> {
        self.nodes.iter().map(|n| &n.state)
    }

    pub fn octahedra(&self) -> Result<Vec<Octahedron>> {
        self.states().map(|s| build(&self.params, s)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.arc) + self.closing_arc
    }
}

/// Oriented dihedral angles at the twelve edges (in `EdgeId::ALL` order) at
/// every node.
pub fn dihedral_series(trace: &ComponentTrace) -> Result<Vec<[f64; 12]>> {
    trace.octahedra()?.iter().map(Octahedron::dihedral_angles).collect()
}

/// Half-angle tangents at the twelve edges along the trace.
pub fn tangents_along(trace: &ComponentTrace) -> Result<Vec<[Projective; 12]>> {
    Ok(dihedral_series(trace)?.into_iter().map(|a| a.map(Projective::half_angle)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octa::EdgeId;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;
    use Sign::{Minus, Plus};

    fn pstar() -> ExoticParams {
        ExoticParams::new(0.1, 0.6, 0.2, 0.5)
    }

    #[test]
    fn y_examples() {
        let p = pstar();
        let s = FlexState::new(0.7, Plus, Plus, Plus, Plus);
        let y = y_of_state(&p, &s).unwrap();
        // Independent evaluation: a₁ and b₁ as angles on the L₁ circle.
        let c = 0.7f64.cos();
        let (t1, t2) = ((0.1 / c).acos(), (0.6 / c).acos());
        assert_abs_diff_eq!(y, (t1 - t2).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(y, 0.7174, epsilon = 5e-5);
        let o = build(&p, &s).unwrap();
        assert_abs_diff_eq!(y, diagonals(&o).y1, epsilon = 1e-12);
        let (_, hi) = p.theta_bounds();
        let at_max = y_of_state(&p, &FlexState::new(hi, Plus, Minus, Plus, Plus)).unwrap();
        assert_abs_diff_eq!(at_max, 0.1 / 0.6, epsilon = 1e-7);
    }

    #[test]
    fn y_bound_examples() {
        let p = pstar();
        let (ymin, ymax) = y_bounds(&p).unwrap();
        assert_abs_diff_eq!(ymax, 0.79629, epsilon = 1e-5);
        assert_abs_diff_eq!(ymin, -0.63629, epsilon = 1e-5);
        let (lo, _) = p.theta_bounds();
        assert_abs_diff_eq!(y_of_state(&p, &FlexState::new(lo, Plus, Plus, Plus, Plus)).unwrap(), ymax, epsilon = 1e-12);
        assert_abs_diff_eq!(y_of_state(&p, &FlexState::new(lo, Plus, Minus, Plus, Plus)).unwrap(), ymin, epsilon = 1e-12);
        assert!(ymin < 0.1 / 0.6 && 0.1 / 0.6 < ymax);
    }

    #[test]
    fn hyperbola_examples() {
        let p = pstar();
        for theta in [0.55, 0.7, 0.9] {
            for d2 in [Plus, Minus] {
                let s = FlexState::new(theta, Plus, d2, Plus, Plus);
                let x = theta.cos().powi(-2);
                assert!(hyperbola_residual(&p, x, y_of_state(&p, &s).unwrap()).abs() < 1e-12);
            }
        }
        // Tangency at x = 1/p₂²: the quadratic in y has a double root.
        let x = 1.0 / (p.p2 * p.p2);
        let (b, c) = (-2.0 * p.p1 * p.p2 * x, (p.p1 * p.p1 + p.p2 * p.p2) * x - 1.0);
        assert_abs_diff_eq!(b * b - 4.0 * c, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hyperbola_residual(&p, 2.0, 0.0), (p.p1 * p.p1 + p.p2 * p.p2) * 2.0 - 1.0);
    }

    #[test]
    fn diagonal_closed_forms() {
        let p = pstar();
        for b in 0..16u8 {
            let sg = |i: u8| if b >> i & 1 == 1 { Minus } else { Plus };
            let s = FlexState::new(0.66, sg(0), sg(1), sg(2), sg(3));
            let d = diagonals(&build(&p, &s).unwrap());
            let e = diagonals_of_state(&p, &s).unwrap();
            assert_abs_diff_eq!(d.y1, e.y1, epsilon = 1e-12);
            assert_abs_diff_eq!(d.y2, e.y2, epsilon = 1e-12);
            assert_abs_diff_eq!(d.y3, (2.0 * 0.66f64).cos(), epsilon = 1e-12);
        }
        let s = FlexState::new(FRAC_PI_4, Plus, Plus, Plus, Plus);
        assert_abs_diff_eq!(diagonals(&build(&pstar(), &s).unwrap()).y3, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn recovery_roundtrip_and_endpoints() {
        let p = pstar();
        let (lo, hi) = p.theta_bounds();
        for comp in Component::BOTH {
            for (d2, e2) in [(Plus, Plus), (Minus, Plus), (Plus, Minus), (Minus, Minus)] {
                let s = FlexState::new(0.71, Plus, d2, comp.sign(), comp.sign() * e2);
                let d = diagonals(&build(&p, &s).unwrap());
                let r = recover_state(&p, &d, comp, 1e-9).unwrap();
                assert_eq!(r.state.signs(), s.signs());
                assert_abs_diff_eq!(r.state.theta, 0.71, epsilon = 1e-10);
                assert!(!r.delta2_immaterial && !r.eps2_immaterial);
            }
        }
        let d = diagonals(&build(&p, &FlexState::new(lo, Plus, Plus, Plus, Minus)).unwrap());
        let r = recover_state(&p, &d, Component::Plus, 1e-9).unwrap();
        assert!(r.eps2_immaterial);
        assert_abs_diff_eq!(r.state.theta, lo, epsilon = 1e-8);
        let d = diagonals(&build(&p, &FlexState::new(hi, Plus, Minus, Plus, Plus)).unwrap());
        assert!(recover_state(&p, &d, Component::Plus, 1e-9).unwrap().delta2_immaterial);
        let bogus = DiagonalCosines { y1: 0.99, y2: 0.0, y3: 0.1 };
        assert!(matches!(recover_state(&p, &bogus, Component::Plus, 1e-9), Err(Error::InconsistentDiagonals(_))));
    }

    #[test]
    fn state_from_y_inverts_y() {
        let p = pstar();
        for theta in [0.6, 0.75, 0.9] {
            for d2 in [Plus, Minus] {
                let s = FlexState::new(theta, Plus, d2, Plus, Minus);
                let y = y_of_state(&p, &s).unwrap();
                let back = state_from_y(&p, y, Component::Plus, Minus).unwrap();
                assert_abs_diff_eq!(back.theta, theta, epsilon = 1e-10);
                assert_eq!(back.signs(), s.signs());
            }
        }
    }

    #[test]
    fn trace_structure() {
        let p = pstar();
        let t = trace_component(&p, Component::Plus, 64).unwrap();
        assert_eq!(t.len(), 64);
        assert!(t.nodes.windows(2).all(|w| w[1].arc > w[0].arc));
        assert!(t.closing_arc > 0.0);
        let legs: Vec<(Sign, Sign)> =
            (0..4).map(|l| t.nodes.iter().find(|n| n.leg == l).map(|n| (n.state.delta2, n.state.eps2)).unwrap()).collect();
        assert_eq!(legs, vec![(Plus, Plus), (Minus, Plus), (Minus, Minus), (Plus, Minus)]);
        let (lo, hi) = p.theta_bounds();
        assert_eq!(t.nodes[0].state.theta, lo);
        assert_eq!(t.nodes[16].state.theta, hi);
        assert_eq!(t.nodes[0].junction, Some(Minus));
        // Every interior θ of leg 0 appears on all four legs.
        for k in 1..16 {
            let theta = t.nodes[k].state.theta;
            let count = t.nodes.iter().filter(|n| (n.state.theta - theta).abs() < 1e-15).count();
            assert_eq!(count, 4);
        }
        let ys: Vec<f64> = t.states().map(|s| y_of_state(&p, s).unwrap()).collect();
        let (ymin, ymax) = y_bounds(&p).unwrap();
        let imax = (0..64).max_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
        let imin = (0..64).min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
        assert_eq!((imax, imin), (0, 32));
        assert_abs_diff_eq!(ys[0], ymax, epsilon = 1e-12);
        assert_abs_diff_eq!(ys[32], ymin, epsilon = 1e-12);
        // Strictly monotone on the two arcs between the extremes.
        assert!(ys[..33].windows(2).all(|w| w[1] < w[0]));
        assert!(ys[32..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn odd_node_counts_are_spread_over_legs() {
        let t = trace_component(&pstar(), Component::Minus, 10).unwrap();
        assert_eq!(t.len(), 10);
        assert!(t.states().all(|s| s.eps1 == Minus));
    }

    #[test]
    fn degenerate_dihedral_angles_at_the_ends() {
        let p = pstar();
        let t = trace_component(&p, Component::Plus, 32).unwrap();
        let series = dihedral_series(&t).unwrap();
        let idx = |u, v| EdgeId::new(u, v).unwrap().index();
        use VertexId::*;
        // Leg 1 starts at θ_max.
        assert!(series[8][idx(B1, A3)].sin().abs() < 1e-7);
        assert!(series[0][idx(B2, A3)].sin().abs() < 1e-7);
        for a in &series {
            for e in [idx(A1, A2), idx(A2, A3), idx(A1, A3)] {
                assert!(a[e].sin().abs() > 1e-3);
            }
        }
    }
}
