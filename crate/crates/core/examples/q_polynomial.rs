//! The quartic whose vanishing would make the volume constant, and the
//! derivative of the area functions it comes from.

use exoflex::configspace::y_bounds;
use exoflex::volume::{derivative_and_q, AreaFunctions};
use exoflex::ExoticParams;

fn main() -> exoflex::Result<()> {
    let p = ExoticParams::checked(0.1, 0.6, 0.2, 0.5)?;
    let q = derivative_and_q(&p)?;
    println!("coefficients c0..c4: {:?}", q.coeffs);
    println!("c3 + c0            = {:+.12}", q.c3_plus_c0());
    println!("expanded c3 + c0   = {:+.12}", q.expanded_c3_plus_c0());
    println!("shorter c3 + c0    = {:+.12}", q.short_form_c3_plus_c0());
    println!("Q nonzero: {}", q.is_nonzero(1e-9));

    let a = AreaFunctions::new(&p);
    let (lo, hi) = y_bounds(&p)?;
    for k in 1..5 {
        let y = lo + (hi - lo) * k as f64 / 5.0;
        println!("y {y:+.4}: A1 {:.6}, A2 {:.6}, A1' {:+.6}, A2' {:+.6}", a.area(1, y)?, a.area(2, y)?, a.derivative(1, y)?, a.derivative(2, y)?);
    }
    Ok(())
}
