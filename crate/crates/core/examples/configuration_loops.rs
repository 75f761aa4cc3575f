//! Traces both closed components and recovers each state from the three
//! diagonals alone.

use exoflex::configspace::{diagonals, recover_state, trace_component, Component};
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(-0.15, 0.55, 0.1, 0.45)?;
    for c in Component::BOTH {
        let trace = trace_component(&p, c, 256)?;
        let mut worst: f64 = 0.0;
        for (node, o) in trace.nodes.iter().zip(trace.octahedra()?) {
            let r = recover_state(&p, &diagonals(&o), c, 1e-9)?;
            if !(r.delta2_immaterial || r.eps2_immaterial) {
                assert_eq!(r.state.signs(), node.state.signs());
                worst = worst.max((r.state.theta - node.state.theta).abs());
            }
        }
        println!(
            "{}: {} nodes, loop length {:.4}, closing gap {:.2e}, worst theta recovery {worst:.1e}",
            c.name(),
            trace.len(),
            trace.total_length(),
            trace.closing_arc
        );
    }
    Ok(())
}
