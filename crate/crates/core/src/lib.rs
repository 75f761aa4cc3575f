//! Exotic flexible octahedra in the unit 3-sphere.
//!
//! The crate builds the four-parameter family of exotic flexible octahedra,
//! traces its two closed configuration curves, evaluates the oriented volume
//! modulo `2π²` in closed form and by an independent Monte-Carlo decomposition,
//! and classifies the family against the Jacobi elliptic parametrizations.
//!
//! Modules, bottom-up:
//!
//! - [`sphere`]: spherical kernel (distances, triangle areas, oriented
//!   dihedral angles, sampled tetrahedron volumes).
//! - [`octa`]: octahedron combinatorics, the exotic constructor and antipode
//!   variants.
//! - [`bricard`]: vertex links, biquadratic relations, quadrilateral classes.
//! - [`configspace`]: the components `Γ₊`, `Γ₋`, diagonals and state recovery.
//! - [`volume`]: closed-form and sampled oriented volume, profiles, the
//!   64-variant sweep.
//! - [`elliptic`]: AGM-based Jacobi functions and the per-face kind table.
//! - [`cli`]: scenario files, report writers and the `exoflex` command.
//!
//! Examples, one per capability:
//!
//! ```text
//! cargo run --example flex_construction     # build a family, edge lengths stay fixed
//! cargo run --example vertex_links          # link classes and biquadratic residuals
//! cargo run --example configuration_loops   # trace Γ₊, Γ₋ and recover states
//! cargo run --release --example volume_oracle -- 4000000
//! cargo run --example bellows_sweep         # all 64 antipode variants
//! cargo run --example q_polynomial          # the quartic and A′
//! cargo run --example volume_lift           # loop increments, 0 or a full 2π²
//! cargo run --example elliptic_kinds        # per-face kinds and fits
//! cargo run --example jacobi                # sn, cn, dn and K
//! cargo run --example cli_scenario          # the command line, in-process
//! ```

pub mod bricard;
pub mod cli;
pub mod configspace;
pub mod elliptic;
mod error;
pub mod numeric;
pub mod octa;
pub mod sphere;
pub mod volume;

pub use error::{Error, Result};
pub use octa::{AntipodeMask, ExoticParams, FlexState, Octahedron, Sign, VertexId};
pub use sphere::{SpherePoint, VolumeClass};
