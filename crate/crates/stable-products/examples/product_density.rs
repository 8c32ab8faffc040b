//! Density of X₁X₂ for independent stable factors, one parameter set per region.
//!
//! cargo run --example product_density

use stable_products::{ProductDensity, ProductParams, Result};

fn main() -> Result<()> {
    let sets = [
        (1.8, 1.5, 0.55, 0.5),
        (0.7, 0.6, 0.8, 0.7),
        (0.75, 1.2, 0.6, 0.5),
    ];
    for &(a1, a2, p, q) in &sets {
        let d = ProductDensity::new(ProductParams::unit(a1, a2, p, q)?)?;
        println!(
            "alpha=({a1}, {a2}) p1={p} q1={q} region={}",
            d.region().name()
        );
        for &x in &[-5.0, -0.5, 0.01, 0.5, 5.0, 500.0] {
            let e = d.eval(x)?;
            println!(
                "  g({x:>6}) = {:.15e} [{}, err {:.1e}]",
                e.value, e.method, e.error_estimate
            );
        }
    }

    // α₁ + α₂ = 2α₁α₂ has no convergent expansion and is rejected.
    match ProductParams::unit(1.5, 0.75, 0.5, 0.5).and_then(ProductDensity::new) {
        Ok(_) => unreachable!(),
        Err(e) => println!("boundary set: {e}"),
    }

    // Scales enter through c₁^{1/α₁} c₂^{1/α₂}.
    let scaled = ProductParams::with_scales(1.8, 1.5, 0.55, 0.5, 2.0, 0.5)?;
    println!(
        "scaled g(1) = {:.15e}",
        ProductDensity::new(scaled)?.density(1.0)?
    );
    Ok(())
}
