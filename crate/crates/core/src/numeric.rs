//! Tolerance ledger and guarded elementary functions.
//!
//! Branch points of the flex sit exactly on the ends of the θ interval, where
//! `arccos` and `sqrt` arguments land on their boundary up to rounding. The
//! helpers here clamp inside a narrow band and report anything further out.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Band within which `arccos`/`sqrt` arguments are clamped to their domain.
pub const CLAMP_BAND: f64 = 1e-9;
/// Relaxed band for the tangency endpoints of the second area function.
pub const TANGENCY_BAND: f64 = 1e-6;

pub const TWO_PI_SQ: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Named tolerances used by the invariant suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Geometric identities (Bricard residuals, hyperbola, lengths across sweeps).
    pub geometric: f64,
    /// Constructed-value roundtrips (inner products, edge lengths).
    pub roundtrip: f64,
    /// Oracle comparisons, in standard errors.
    pub oracle_sigmas: f64,
    /// Endpoint values of the second area function.
    pub endpoint: f64,
    /// `|sin φ|` below which a dihedral angle counts as zero or straight.
    pub degeneracy: f64,
    /// Structural-fit residual.
    pub fit: f64,
    /// Minimum volume spread for a profile to count as nonconstant.
    pub nonconstant: f64,
    /// Side-length equality tolerance in quadrilateral classification.
    pub classification: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geometric: 1e-9,
            roundtrip: 1e-12,
            oracle_sigmas: 4.0,
            endpoint: 1e-6,
            degeneracy: 1e-7,
            fit: 1e-8,
            nonconstant: 1e-3,
            classification: 1e-9,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 8] = [
        "geometric",
        "roundtrip",
        "oracle_sigmas",
        "endpoint",
        "degeneracy",
        "fit",
        "nonconstant",
        "classification",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Parse(format!("tolerance {key} must be positive, got {value}")));
        }
        let slot = match key {
            "geometric" => &mut self.geometric,
            "roundtrip" => &mut self.roundtrip,
            "oracle_sigmas" => &mut self.oracle_sigmas,
            "endpoint" => &mut self.endpoint,
            "degeneracy" => &mut self.degeneracy,
            "fit" => &mut self.fit,
            "nonconstant" => &mut self.nonconstant,
            "classification" => &mut self.classification,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown tolerance key {key:?} (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Clamp `x` into `[-1, 1]` if it is within `band` of that interval.
pub fn clamp_unit(x: f64, band: f64, context: &'static str) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + band {
        Ok(x.signum())
    } else {
        Err(Error::Domain { context, value: x })
    }
}

pub fn acos_clamped(x: f64, band: f64, context: &'static str) -> Result<f64> {
    clamp_unit(x, band, context).map(f64::acos)
}

/// Square root of a nonnegative quantity, treating values in `[-band, 0)` as zero.
pub fn sqrt_clamped(x: f64, band: f64, context: &'static str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -band {
        Ok(0.0)
    } else {
        Err(Error::Domain { context, value: x })
    }
}

/// Representative of `x` modulo `period` in `[0, period)`.
pub fn wrap_positive(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can return `period` itself for tiny negative x.
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Representative of `x` modulo `period` in `(-period/2, period/2]`.
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    let r = wrap_positive(x, period);
    if r > period / 2.0 {
        r - period
    } else {
        r
    }
}

/// Chebyshev–Lobatto abscissae on `[lo, hi]`: `m + 1` points, endpoints included,
/// ascending.
pub fn chebyshev_lobatto(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..=m)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == m {
                hi
            } else {
                mid - half * (std::f64::consts::PI * k as f64 / m as f64).cos()
            }
        })
        .collect()
}
