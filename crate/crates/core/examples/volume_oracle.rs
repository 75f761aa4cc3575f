//! Compares the closed-form volume with two sampled decompositions.
//!
//! ```text
//! cargo run --release --example volume_oracle -- 4000000
//! ```

use exoflex::configspace::{trace_component, Component};
use exoflex::sphere::OracleOptions;
use exoflex::volume::{closed_form_real, decomposition_volume, sigma_distance, Decomposition};
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let p = ExoticParams::checked(0.1, 0.6, 0.2, 0.5)?;
    let trace = trace_component(&p, Component::Plus, 64)?;
    for node in trace.nodes.iter().skip(5).step_by(16) {
        let o = exoflex::octa::build(&p, &node.state)?;
        let exact = closed_form_real(&p, &node.state)?;
        print!("theta {:.4}: closed form {exact:+.6}", node.state.theta);
        for (seed, name, form) in [(7, "apex", Decomposition::ApexSum), (8, "diagonal", Decomposition::DiagonalA1B1)] {
            let s = decomposition_volume(&o, form, &OracleOptions::seeded(samples, seed))?;
            print!(", {name} {:+.6} ({:.1} sigma)", s.estimate, sigma_distance(&s, exact));
        }
        println!();
    }
    Ok(())
}
