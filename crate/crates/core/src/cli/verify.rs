//! The invariant suite behind `exoflex verify` and `exoflex elliptic-check`.

use serde::Serialize;

use super::Scenario;
use crate::bricard::exotic_face_check;
use crate::configspace::{diagonals, recover_state, trace_component, y_bounds, ComponentTrace};
use crate::elliptic::{elliptic_k, kind_report, reference_kind, EllipticModulus};
use crate::octa::FaceId;
use crate::sphere::OracleOptions;
use crate::volume::{
    bellows_sweep, closed_form_real, decomposition_volume, derivative_and_q, eps2_gap, interior_y, loop_increment,
    schlafli_check, sigma_distance, volume_profile, AreaFunctions, BellowsOptions, Decomposition,
};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The worst observed value of the checked quantity.
    pub measured: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, measured: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name, passed: measured < limit, measured, limit, detail: detail.into() }
    }

    fn flag(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, measured: f64::from(u8::from(passed)), limit: 1.0, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { checks, passed }
    }
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> f64) -> f64 {
    items.into_iter().map(f).fold(0.0, f64::max)
}

fn trace_checks(s: &Scenario, trace: &ComponentTrace, out: &mut Vec<Check>) -> Result<()> {
    let p = trace.params;
    let tol = &s.tolerances;
    let octa = trace.octahedra()?;
    let lengths = octa[0].edge_lengths();
    let drift = max_over(&octa, |o| o.edge_lengths().max_abs_diff(&lengths));
    out.push(Check::below("edge lengths constant", drift, tol.roundtrip, trace.component.name()));

    let mut bricard: f64 = 0.0;
    for o in &octa {
        for v in crate::octa::VertexId::ALL {
            let link = crate::bricard::vertex_link(o, v)?;
            bricard = bricard.max(link.residuals().into_iter().fold(0.0, f64::max));
        }
    }
    out.push(Check::below("biquadratic residuals", bricard, tol.geometric, trace.component.name()));

    let (lo, hi) = p.theta_bounds();
    let mut recovery: f64 = 0.0;
    let mut sign_errors = 0;
    for (node, o) in trace.nodes.iter().zip(&octa) {
        if node.state.theta == lo || node.state.theta == hi {
            continue;
        }
        let r = recover_state(&p, &diagonals(o), trace.component, tol.geometric.max(1e-9))?;
        recovery = recovery.max((r.state.theta - node.state.theta).abs());
        sign_errors += usize::from(r.state.signs() != node.state.signs());
    }
    out.push(Check::below("state recovery from diagonals", recovery, 1e-10, format!("{sign_errors} sign mismatches")));
    if sign_errors > 0 {
        out.last_mut().expect("just pushed").passed = false;
    }

    let interior: Vec<_> = trace.nodes.iter().filter(|n| n.junction.is_none()).map(|n| n.state).collect();
    let schlafli = schlafli_check(&p, &interior, 1e-6)?;
    out.push(Check::below("angle-variation formula", schlafli.max_error, 1e-4, format!("sign {}", schlafli.sign)));

    let profile = volume_profile(&p, trace.component, trace.len())?;
    out.push(Check::below("loop increment", loop_increment(&profile).abs(), 1e-6, trace.component.name()));
    out.push(Check::flag(
        "profile nonconstant",
        profile.spread > tol.nonconstant && profile.spread >= profile.gap_bound() - 1e-6,
        format!("spread {} vs π·max A₂ {}", profile.spread, profile.gap_bound()),
    ));

    let stride = (trace.len() / 4).max(1);
    let mut worst: f64 = 0.0;
    for (i, node) in trace.nodes.iter().enumerate().skip(stride / 2).step_by(stride) {
        let opts = OracleOptions::seeded(s.mc_samples, s.seed.wrapping_add(i as u64));
        let sampled = decomposition_volume(&octa[i], Decomposition::ApexSum, &opts)?;
        worst = worst.max(sigma_distance(&sampled, closed_form_real(&p, &node.state)?));
    }
    out.push(Check::below("closed form vs sampled volume (σ)", worst, tol.oracle_sigmas, trace.component.name()));
    Ok(())
}

/// Runs the full suite on the scenario's family.
pub fn run_suite(s: &Scenario) -> Result<SuiteReport> {
    let p = s.exotic_params();
    p.check()?;
    let tol = &s.tolerances;
    let mut checks = Vec::new();

    let witness = exotic_face_check(&p, 32, tol.classification)?;
    checks.push(Check::flag(
        "link structure",
        witness.passed() && (witness.nu1, witness.nu2) == (-1, 1),
        format!(
            "a1 {:?}, a2 {:?}, (ν₁, ν₂) = ({}, {}); {}",
            witness.link_a1,
            witness.link_a2,
            witness.nu1,
            witness.nu2,
            witness.failures.join("; ")
        ),
    ));

    for c in s.component.components() {
        trace_checks(s, &trace_component(&p, c, s.samples)?, &mut checks)?;
    }

    let gap = max_over(interior_y(&p, 50)?, |y| eps2_gap(&p, y).map_or(f64::INFINITY, |(a, b)| (a - b).abs()));
    checks.push(Check::below("ε₂ gap identity", gap, tol.geometric, "50 interior y"));

    let areas = AreaFunctions::new(&p);
    let (ylo, yhi) = y_bounds(&p)?;
    let ends = areas.area(2, ylo)?.abs().max(areas.area(2, yhi)?.abs());
    checks.push(Check::below("A₂ vanishes at both ends", ends, tol.endpoint, ""));
    let tau = 2.0 * std::f64::consts::PI;
    let in_range = interior_y(&p, 200)?
        .into_iter()
        .all(|y| [1, 2].iter().all(|&j| areas.area(j, y).is_ok_and(|a| a > 0.0 && a < tau)));
    checks.push(Check::flag("0 < Aⱼ < 2π inside", in_range, ""));

    let q = derivative_and_q(&p)?;
    checks.push(Check::below("c₃ + c₀ from the expansion", (q.c3_plus_c0() - q.expanded_c3_plus_c0()).abs(), 1e-9, ""));
    checks.push(Check::flag("Q not identically zero", q.is_nonzero(1e-9), format!("{:?}", q.coeffs)));
    let h = 1e-5;
    let fd = max_over(interior_y(&p, 20)?, |y| {
        max_over([1, 2], |j| {
            let d = (areas.area(j, y + h).unwrap_or(f64::NAN) - areas.area(j, y - h).unwrap_or(f64::NAN)) / (2.0 * h);
            (d - areas.derivative(j, y).unwrap_or(f64::NAN)).abs()
        })
    });
    checks.push(Check::below("Aⱼ′ vs finite differences", if fd.is_nan() { f64::INFINITY } else { fd }, 1e-6, ""));

    let bellows = bellows_sweep(
        &p,
        &BellowsOptions { nodes: s.samples, threshold: tol.nonconstant, masks: s.antipode_masks()?, ..Default::default() },
    )?;
    checks.push(Check::flag(
        "every antipode variant nonconstant",
        bellows.confirmed(),
        format!("{} masks, smallest spread {}", bellows.masks.len(), bellows.min_spread()),
    ));
    let short = bellows
        .masks
        .values()
        .flat_map(|m| m.components.values())
        .map(|c| c.gap_bound - c.spread)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::below("every variant spread clears π·max A₂", short, 1e-6, "largest shortfall"));

    let kinds = kind_report(&p, s.samples.min(256), tol.fit)?;
    let table_ok = FaceId::ALL.iter().all(|&f| {
        let expected = reference_kind(f);
        let r = &kinds[&f.to_string()];
        r.label == expected && r.sign_ab == expected.fit_sign()
    });
    checks.push(Check::flag("kind table and fit signs", table_ok, ""));
    checks.push(Check::below("structural fit residual", max_over(kinds.values(), |r| r.residual), tol.fit, ""));

    Ok(SuiteReport::new(checks))
}

/// Identities of the elliptic kernel.
pub fn elliptic_suite() -> Result<SuiteReport> {
    let mut checks = vec![Check::below(
        "K(0) = π/2",
        (elliptic_k(0.0)? - std::f64::consts::FRAC_PI_2).abs(),
        1e-14,
        "",
    )];
    let (mut pyth, mut dn_id, mut range, mut quarter) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in [0.1, 0.5, 0.9] {
        let m = EllipticModulus::new(k)?;
        for i in -500..=500 {
            let j = m.jacobi(i as f64 * 0.0271);
            pyth = pyth.max((j.sn * j.sn + j.cn * j.cn - 1.0).abs());
            dn_id = dn_id.max((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs());
            range = range.max((m.k_prime - j.dn).max(j.dn - 1.0).max(0.0));
        }
        let q = m.jacobi(m.quarter_period);
        quarter = quarter.max((q.sn - 1.0).abs().max(q.cn.abs()).max((q.dn - m.k_prime).abs()));
        checks.push(Check::below("k² + k′² = 1", (k * k + m.k_prime * m.k_prime - 1.0).abs(), 1e-14, format!("k = {k}")));
    }
    checks.push(Check::below("sn² + cn² = 1", pyth, 1e-12, "k ∈ {0.1, 0.5, 0.9}"));
    checks.push(Check::below("dn² + k²sn² = 1", dn_id, 1e-12, ""));
    checks.push(Check::below("k′ ≤ dn ≤ 1", range, 1e-12, ""));
    checks.push(Check::below("quarter-period values", quarter, 1e-10, "sn(K) = 1, cn(K) = 0, dn(K) = k′"));
    let increasing = (1..100).all(|i| elliptic_k(i as f64 / 100.0).unwrap_or(0.0) > elliptic_k((i - 1) as f64 / 100.0).unwrap_or(0.0));
    checks.push(Check::flag("K increasing", increasing, ""));
    Ok(SuiteReport::new(checks))
}
