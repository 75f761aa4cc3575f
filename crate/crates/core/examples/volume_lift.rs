//! Lifts the volume profile to the reals and measures what one loop adds.
//! For families with `p₂ < 0` a full `2π²` appears.

use exoflex::configspace::Component;
use exoflex::numeric::TWO_PI_SQ;
use exoflex::volume::{loop_increment, volume_profile};
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    for p in [ExoticParams::new(0.1, 0.6, 0.2, 0.5), ExoticParams::new(-0.1, -0.6, 0.2, 0.5)] {
        p.check()?;
        for c in Component::BOTH {
            let profile = volume_profile(&p, c, 512)?;
            let inc = loop_increment(&profile);
            println!(
                "{:?} {}: spread {:.6}, largest step {:.2e}, loop increment {inc:+.6} ({:+.3} turns)",
                p.as_array(),
                c.name(),
                profile.spread,
                profile.max_jump,
                inc / TWO_PI_SQ
            );
        }
    }
    Ok(())
}
