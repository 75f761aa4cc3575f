//! Labels each face by the kind of its elliptic parametrization and fits the
//! structural relation between its three tangents.

use exoflex::elliptic::kind_report;
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(0.05, 0.7, -0.25, 0.6)?;
    for (face, r) in kind_report(&p, 256, 1e-8)? {
        println!(
            "{face}: {:?} (t1 {:?}, t2 {:?}), residual {:.1e}, sign(ab) {:+}, k' {:?}",
            r.label, r.evidence.t1.flat, r.evidence.t2.flat, r.residual, r.sign_ab, r.k_prime_estimate
        );
    }
    Ok(())
}
