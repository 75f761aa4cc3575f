//! Sweeps all 64 antipode variants and prints the smallest volume spreads.

use exoflex::volume::{bellows_sweep, BellowsOptions};
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(0.1, 0.6, 0.2, 0.5)?;
    let report = bellows_sweep(&p, &BellowsOptions::default())?;
    let mut entries: Vec<_> = report.masks.iter().collect();
    entries.sort_by(|a, b| a.1.spread.total_cmp(&b.1.spread));
    for (mask, e) in entries.iter().take(6) {
        println!("{mask:<16} spread {:.6} ({})", e.spread, e.verdict);
    }
    println!("{} masks: {}", report.masks.len(), report.verdict);
    Ok(())
}
