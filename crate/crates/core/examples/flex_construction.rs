//! Builds the reference family at a few angles and shows that the twelve edge
//! lengths stay put while the shape moves.

use exoflex::octa::build;
use exoflex::{ExoticParams, FlexState, Sign};

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(0.1, 0.6, 0.2, 0.5)?;
    let (lo, hi) = p.theta_bounds();
    println!("theta in [{lo:.6}, {hi:.6}]");

    let first = build(&p, &FlexState::new(lo, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus))?;
    for k in 0..=4 {
        let theta = lo + (hi - lo) * k as f64 / 4.0;
        let o = build(&p, &FlexState::new(theta, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus))?;
        println!(
            "theta {theta:.4}: max edge drift {:.1e}, max vertex move {:.4}",
            o.edge_lengths().max_abs_diff(&first.edge_lengths()),
            o.max_vertex_diff(&first)
        );
    }
    Ok(())
}
