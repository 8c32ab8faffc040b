//! Tabulating a density on a grid and writing CSV and JSON.
//!
//! cargo run --example density_table

use std::io::stdout;

use stable_products::table::{grid, max_discrepancy, DensityTable};
use stable_products::{Error, ProductDensity, ProductParams, Result};

fn main() -> Result<()> {
    let pp = ProductParams::unit(1.8, 1.5, 0.55, 0.5)?;
    let d = ProductDensity::new(pp)?;
    let xs = grid(-2.0, 2.0, 9)?;
    // The origin is a logarithmic singularity; it becomes an "unsupported" row.
    let mut t = DensityTable::tabulate(&xs, |x| d.eval(x), |e| matches!(e, Error::Origin))?;
    t.add_column("reflected", |x| {
        ProductDensity::new(pp.reflected())?.density(x)
    })?;
    t.add_summary("max_discrepancy", max_discrepancy(&t));
    t.write_csv(stdout().lock())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&t.to_json()["summary"]).unwrap()
    );
    Ok(())
}
