//! Product of two iid stable variables, including the Gaussian case K₀(|x|/2)/(2π).
//!
//! cargo run --example iid_product

use std::f64::consts::PI;

use stable_products::product_density::product_density_iid;
use stable_products::special_functions::bessel_k0;
use stable_products::Result;

fn main() -> Result<()> {
    for &x in &[0.1, 0.5, 1.0, 4.0] {
        let g = product_density_iid(x, 2.0, 0.5)?;
        let k = bessel_k0(x / 2.0)? / (2.0 * PI);
        println!("gaussian x={x}: {g:.15e} vs {k:.15e}");
    }
    for &(alpha, p1) in &[(1.5, 0.6), (0.7, 0.9), (0.5, 1.0)] {
        let row: Vec<String> = [-2.0, -0.2, 0.2, 2.0]
            .iter()
            .map(|&x| product_density_iid(x, alpha, p1).map(|g| format!("{g:.6e}")))
            .collect::<Result<_>>()?;
        println!("alpha={alpha} p1={p1}: {}", row.join("  "));
    }
    Ok(())
}
