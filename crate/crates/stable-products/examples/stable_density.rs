//! Density of a single strictly stable law by each evaluation method.
//!
//! cargo run --example stable_density

use stable_products::{Result, StableDensity, StableParams};

fn main() -> Result<()> {
    let d = StableDensity::new(StableParams::new(1.5, 0.6, 1.0)?);
    println!(
        "{:>6} {:>22} {:>10} {:>22}",
        "x", "density", "method", "fourier"
    );
    for &x in &[-4.0, -1.0, -0.25, 0.25, 1.0, 4.0, 20.0] {
        let e = d.eval(x)?;
        let (f, _) = d.fourier(x)?;
        println!(
            "{x:>6} {:>22.15e} {:>10} {f:>22.15e}",
            e.value,
            e.method.as_str()
        );
    }

    // Heavy tails of a one-sided law with α < 1.
    let skewed = StableDensity::new(StableParams::unit(0.7, 0.9)?);
    for &x in &[3.0, 30.0, 300.0] {
        let a = skewed.asymptotic(x)?;
        println!(
            "alpha=0.7 p1=0.9 f({x}) = {:.15e} ({} tail terms)",
            a.value, a.terms_used
        );
    }
    println!("P(X > 2) = {:.12}", 1.0 - d.cdf(2.0)?);
    Ok(())
}
