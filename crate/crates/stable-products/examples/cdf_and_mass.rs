//! Distribution function and half-line masses of a product.
//!
//! cargo run --release --example cdf_and_mass

use stable_products::{ProductDensity, ProductParams, Result, Side};

fn main() -> Result<()> {
    let pp = ProductParams::unit(0.7, 0.6, 0.8, 0.7)?;
    let d = ProductDensity::new(pp)?;
    let pos = d.half_line_mass(Side::Positive)?;
    let neg = d.half_line_mass(Side::Negative)?;
    println!(
        "P(>0) = {pos:.12} (p1q1 + p2q2 = {:.12})",
        pp.positive_mass()
    );
    println!("P(<0) = {neg:.12}, total - 1 = {:.1e}", pos + neg - 1.0);

    let table = d.cdf_table()?;
    for &x in &[-100.0, -1.0, -0.01, 0.01, 1.0, 100.0] {
        println!("F({x:>7}) = {:.10}  table {:.10}", d.cdf(x)?, table.eval(x));
    }
    Ok(())
}
