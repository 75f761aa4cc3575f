//! Volume along a traced component, its continuous lift, and the sweep over
//! antipode variants.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{closed_form_real, decomposition_volume, sigma_distance, AreaFunctions, Decomposition};
use crate::configspace::{trace_component, y_of_state, Component, ComponentTrace};
use crate::numeric::{wrap_centered, wrap_positive, TWO_PI_SQ};
use crate::octa::{build, normalize_variant, AntipodeMask, ExoticParams, FlexState, NormalizedVariant};
use crate::sphere::{OracleOptions, VolumeClass};
use crate::Result;

/// One CSV row of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub arc: f64,
    pub theta: f64,
    pub delta2: i8,
    pub eps2: i8,
    pub y: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "V_lifted")]
    pub v_lifted: f64,
    #[serde(rename = "V_mod")]
    pub v_mod: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeProfile {
    #[serde(skip)]
    pub trace: ComponentTrace,
    pub rows: Vec<ProfileRow>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    /// Largest step of the lift between consecutive nodes, closing step included.
    pub max_jump: f64,
    /// Continued value at the first node after one full loop.
    pub closing_value: f64,
}

impl VolumeProfile {
    pub fn lifted(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.v_lifted)
    }

    pub fn classes(&self) -> Vec<VolumeClass> {
        self.rows.iter().map(|r| VolumeClass::from_real(r.v_lifted)).collect()
    }

    /// `π · max A₂` over the nodes.
    pub fn gap_bound(&self) -> f64 {
        std::f64::consts::PI * self.rows.iter().map(|r| r.a2).fold(0.0, f64::max)
    }

    /// `π · max min(A₂, 2π − A₂)`: the two `ε₂` partners over one `y` differ
    /// by `π A₂` modulo `2π²`, so the lift must spread at least this far.
    pub fn circular_gap_bound(&self) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        std::f64::consts::PI * self.rows.iter().map(|r| r.a2.min(tau - r.a2)).fold(0.0, f64::max)
    }
}

/// Continues representatives by choosing, at each step, the value within `π²`
/// of the previous one. `start` must agree with `reps[0]` modulo `2π²`.
pub fn lift_representatives(reps: &[f64], start: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(reps.len());
    let mut prev = start;
    for (i, r) in reps.iter().enumerate() {
        let v = if i == 0 { start } else { prev + wrap_centered(r - prev, TWO_PI_SQ) };
        out.push(v);
        prev = v;
    }
    out
}

fn summarize(trace: ComponentTrace, raw: Vec<(f64, f64, f64, f64)>) -> VolumeProfile {
    let reps: Vec<f64> = raw.iter().map(|r| wrap_positive(r.3, TWO_PI_SQ)).collect();
    let lifted = lift_representatives(&reps, raw[0].3);
    let last = *lifted.last().expect("nonempty trace");
    let closing_value = last + wrap_centered(reps[0] - last, TWO_PI_SQ);
    let mut max_jump = (closing_value - last).abs();
    for w in lifted.windows(2) {
        max_jump = max_jump.max((w[1] - w[0]).abs());
    }
    let (min, max) = lifted.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let rows = trace
        .nodes
        .iter()
        .zip(raw.iter().zip(lifted.iter().zip(&reps)))
        .map(|(n, (&(y, a1, a2, _), (&v, &rep)))| ProfileRow {
            arc: n.arc,
            theta: n.state.theta,
            delta2: n.state.delta2.value() as i8,
            eps2: n.state.eps2.value() as i8,
            y,
            a1,
            a2,
            v_lifted: v,
            v_mod: rep,
        })
        .collect();
    VolumeProfile { trace, rows, min, max, spread: max - min, max_jump, closing_value }
}

/// `(y, A₁, A₂, 𝒱)` of a variant at the trace state `s`, all in the variant's
/// own family.
fn variant_values(nv: &NormalizedVariant, s: &FlexState) -> Result<(f64, f64, f64, f64)> {
    let t = nv.state(s);
    let areas = AreaFunctions::new(&nv.params);
    let y = y_of_state(&nv.params, &t)?;
    Ok((y, areas.area(1, y)?, areas.area(2, y)?, nv.volume_factor() * closed_form_real(&nv.params, &t)?))
}

fn variant_profile(trace: &ComponentTrace, nv: &NormalizedVariant) -> Result<VolumeProfile> {
    let raw = trace.nodes.iter().map(|n| variant_values(nv, &n.state)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(trace.clone(), raw))
}

/// Closed-form volume along `trace_component(p, component, n)`, lifted.
pub fn volume_profile(p: &ExoticParams, component: Component, n: usize) -> Result<VolumeProfile> {
    let trace = trace_component(p, component, n)?;
    variant_profile(&trace, &normalize_variant(p, AntipodeMask::EMPTY))
}

/// Lifted change of the volume over one full loop.
pub fn loop_increment(profile: &VolumeProfile) -> f64 {
    profile.closing_value - profile.rows[0].v_lifted
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellowsOptions {
    pub nodes: usize,
    /// Verdict threshold on each spread.
    pub threshold: f64,
    /// Sampled spot checks per mask and component; 0 disables them.
    pub spot_checks: usize,
    pub mc_samples: u64,
    pub seed: u64,
    /// Allowed distance, in standard errors, of a spot check.
    pub sigmas: f64,
    /// Restricts the sweep; all 64 masks when `None`.
    pub masks: Option<Vec<AntipodeMask>>,
}

impl Default for BellowsOptions {
    fn default() -> Self {
        Self { nodes: 512, threshold: 1e-3, spot_checks: 0, mc_samples: 1_000_000, seed: 42, sigmas: 4.0, masks: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotCheck {
    pub node: usize,
    pub closed_form: f64,
    pub sampled: f64,
    pub stderr: f64,
    pub sigmas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSpread {
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    /// [`VolumeProfile::circular_gap_bound`] of the variant's own family.
    pub gap_bound: f64,
    /// `π · max A₂` of the unmodified family along the same trace.
    pub reference_gap_bound: f64,
    pub loop_increment: f64,
    pub max_jump: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spot_checks: Vec<SpotCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskEntry {
    /// Smaller of the two component spreads.
    pub spread: f64,
    /// Range of the component with the smaller spread.
    pub min: f64,
    pub max: f64,
    pub verdict: &'static str,
    pub components: BTreeMap<&'static str, ComponentSpread>,
}

impl MaskEntry {
    pub fn is_nonconstant(&self) -> bool {
        self.verdict == "nonconstant"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellowsReport {
    pub params: ExoticParams,
    pub nodes: usize,
    pub threshold: f64,
    pub masks: BTreeMap<String, MaskEntry>,
    pub verdict: &'static str,
    /// Whether every sampled spot check landed within the allowed band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spot_checks_within_sigmas: Option<bool>,
}

impl BellowsReport {
    pub fn confirmed(&self) -> bool {
        self.verdict == "counterexample confirmed"
    }

    pub fn min_spread(&self) -> f64 {
        self.masks.values().map(|m| m.spread).fold(f64::INFINITY, f64::min)
    }

    pub fn spot_checks(&self) -> impl Iterator<Item = &SpotCheck> {
        self.masks.values().flat_map(|m| m.components.values()).flat_map(|c| c.spot_checks.iter())
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn task_seed(seed: u64, mask: AntipodeMask, component: Component, node: usize) -> u64 {
    let tag = (u64::from(mask.bits()) << 40) | ((component as u64) << 32) | node as u64;
    splitmix(seed ^ splitmix(tag))
}

fn spot_check(
    p: &ExoticParams,
    state: &FlexState,
    nv_value: f64,
    mask: AntipodeMask,
    node: usize,
    seed: u64,
    samples: u64,
) -> Result<SpotCheck> {
    let o = build(p, state)?.antipode_variant(mask)?;
    let sampled = decomposition_volume(&o, Decomposition::ApexSum, &OracleOptions::seeded(samples, seed))?;
    Ok(SpotCheck {
        node,
        closed_form: wrap_positive(nv_value, TWO_PI_SQ),
        sampled: wrap_positive(sampled.estimate, TWO_PI_SQ),
        stderr: sampled.stderr,
        sigmas: sigma_distance(&sampled, nv_value),
    })
}

/// Volume profiles of all 64 antipode variants on both components.
pub fn bellows_sweep(p: &ExoticParams, options: &BellowsOptions) -> Result<BellowsReport> {
    let traces = Component::BOTH.map(|c| trace_component(p, c, options.nodes));
    let traces = [traces[0].clone()?, traces[1].clone()?];
    let identity = normalize_variant(p, AntipodeMask::EMPTY);
    let reference_gaps =
        traces.iter().map(|t| variant_profile(t, &identity).map(|v| v.gap_bound())).collect::<Result<Vec<_>>>()?;
    let masks: Vec<AntipodeMask> = options.masks.clone().unwrap_or_else(|| AntipodeMask::all().collect());
    let entries = masks
        .par_iter()
        .map(|&mask| -> Result<(String, MaskEntry)> {
            let nv = normalize_variant(p, mask);
            let mut components = BTreeMap::new();
            for (trace, &reference) in traces.iter().zip(&reference_gaps) {
                let profile = variant_profile(trace, &nv)?;
                let mut spots = Vec::new();
                if let Some(stride) = trace.len().checked_div(options.spot_checks) {
                    let stride = stride.max(1);
                    for node in (stride / 2..trace.len()).step_by(stride).take(options.spot_checks) {
                        let seed = task_seed(options.seed, mask, trace.component, node);
                        let v = profile.rows[node].v_lifted;
                        spots.push(spot_check(p, &trace.nodes[node].state, v, mask, node, seed, options.mc_samples)?);
                    }
                }
                components.insert(
                    trace.component.name(),
                    ComponentSpread {
                        spread: profile.spread,
                        min: profile.min,
                        max: profile.max,
                        gap_bound: profile.circular_gap_bound(),
                        reference_gap_bound: reference,
                        loop_increment: loop_increment(&profile),
                        max_jump: profile.max_jump,
                        spot_checks: spots,
                    },
                );
            }
            let narrow = components
                .values()
                .min_by(|a, b| a.spread.total_cmp(&b.spread))
                .expect("two components");
            let verdict = if narrow.spread > options.threshold { "nonconstant" } else { "constant" };
            let entry = MaskEntry { spread: narrow.spread, min: narrow.min, max: narrow.max, verdict, components };
            Ok((mask.to_string(), entry))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let spots_ok = entries
        .values()
        .flat_map(|m| m.components.values())
        .flat_map(|c| c.spot_checks.iter())
        .all(|c| c.sigmas <= options.sigmas);
    let all = entries.values().all(MaskEntry::is_nonconstant);
    Ok(BellowsReport {
        params: *p,
        nodes: options.nodes,
        threshold: options.threshold,
        masks: entries,
        verdict: if all { "counterexample confirmed" } else { "not confirmed" },
        spot_checks_within_sigmas: (options.spot_checks > 0).then_some(spots_ok),
    })
}
