//! Jacobi elliptic functions and the complete integral from the AGM.

use exoflex::elliptic::{elliptic_k, EllipticModulus};

fn main() -> exoflex::Result<()> {
    for k in [0.0, 0.5, 0.9, 0.999] {
        println!("K({k}) = {:.15}", elliptic_k(k)?);
    }
    let m = EllipticModulus::new(0.8)?;
    for i in 0..=8 {
        let u = m.quarter_period * i as f64 / 4.0;
        let j = m.jacobi(u);
        println!("u {u:.4}: sn {:+.6} cn {:+.6} dn {:.6}", j.sn, j.cn, j.dn);
    }
    Ok(())
}
