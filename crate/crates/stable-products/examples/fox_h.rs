//! The Fox H-function view of stable and product densities.
//!
//! cargo run --release --example fox_h

use stable_products::fox_h::{
    h2244_product, h_stable, verify_difference_identity, verify_sum_identity, HFunctionSpec,
};
use stable_products::oracles::ContourSpec;
use stable_products::Result;

fn main() -> Result<()> {
    let h = HFunctionSpec::stable(1.5, 0.6)?;
    let c = h.contour(0.8, &ContourSpec::default())?;
    // H¹¹₂₂ carries a factor α relative to the density.
    println!(
        "H{:?}(0.8)/alpha: contour {:.15e}, density {:.15e}",
        h.indices(),
        c.value / 1.5,
        h_stable(0.8, 1.5, 0.6)?
    );

    let hp = HFunctionSpec::product(1.5, 1.8, 0.6, 0.5)?;
    println!("product layout {:?}: upper {:?}", hp.indices(), hp.upper());
    println!(
        "H22_44 value at 0.5: {:.15e}",
        h2244_product(0.5, 1.5, 1.8, 0.6, 0.5)?
    );

    println!(
        "sum identity residual: {:.2e}",
        verify_sum_identity(0.5, 1.5, 1.8, 0.6, 0.5)?
    );
    let check = verify_difference_identity(0.5, 1.5, 1.8, 0.6, 0.5)?;
    println!(
        "difference identity residual {:.2e} using {}",
        check.residual,
        check.convention.describe()
    );
    for (conv, r) in &check.candidates {
        println!("  {:<60} {r:.2e}", conv.describe());
    }
    Ok(())
}
