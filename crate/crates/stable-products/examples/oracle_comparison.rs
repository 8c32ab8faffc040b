//! Series dispatcher against the convolution integral and the Mellin–Barnes contour.
//!
//! cargo run --release --example oracle_comparison

use stable_products::oracles::{contour_density, convolution_density, ContourSpec};
use stable_products::{ProductDensity, ProductParams, Result, Side};

fn main() -> Result<()> {
    let pp = ProductParams::unit(0.8, 1.9, 0.9, 0.52)?;
    let d = ProductDensity::new(pp)?;
    let spec = ContourSpec::default();
    println!(
        "{:>7} {:>22} {:>10} {:>10}",
        "x", "dispatcher", "conv gap", "contour gap"
    );
    for &x in &[-3.0, -0.4, 0.05, 0.4, 1.0, 3.0, 12.0] {
        let s = d.density(x)?;
        let side = if x > 0.0 {
            Side::Positive
        } else {
            Side::Negative
        };
        let v = convolution_density(x, &pp)?.value;
        let c = contour_density(x.abs(), &pp, &spec, side)?.value;
        println!(
            "{x:>7} {s:>22.15e} {:>10.1e} {:>10.1e}",
            (s - v).abs(),
            (s - c).abs()
        );
    }

    // Any abscissa inside the fundamental strip gives the same value.
    for a in [0.3, 0.5, 0.8] {
        let c = contour_density(1.0, &pp, &spec.with_abscissa(a)?, Side::Positive)?;
        println!(
            "abscissa {a}: {:.15e} (err {:.1e})",
            c.value, c.error_estimate
        );
    }
    Ok(())
}
