//! Classifies every vertex link and evaluates the biquadratic relations
//! between neighboring dihedral tangents.

use exoflex::bricard::{classify_quad, exotic_face_check, vertex_link};
use exoflex::octa::build;
use exoflex::{ExoticParams, FlexState, Sign, VertexId};

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(0.1, 0.6, 0.2, 0.5)?;
    let (lo, hi) = p.theta_bounds();
    let o = build(&p, &FlexState::new(0.5 * (lo + hi), Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus))?;
    for v in VertexId::ALL {
        let link = vertex_link(&o, v)?;
        let class = classify_quad(link.sides, 1e-9);
        let worst = link.residuals().into_iter().fold(0.0, f64::max);
        println!("{:>2}: {:?} ({:?}), worst residual {worst:.1e}", v.label(), class.kind, class.pairing);
    }

    let w = exotic_face_check(&p, 64, 1e-9)?;
    println!("a1 {:?}, a2 {:?}, (nu1, nu2) = ({}, {})", w.link_a1, w.link_a2, w.nu1, w.nu2);
    Ok(())
}
