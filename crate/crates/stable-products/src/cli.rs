//! Command-line front end. `run` parses arguments, writes to the given
//! streams and returns the process exit code.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter
//! error, 3 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::oracles::{
    contour_density, convolution_density, ks_distance_par, sample_products, ContourSpec,
    EmpiricalCdf,
};
use crate::product_density::{ProductDensity, ProductParams, Region};
use crate::stable_core::{Side, StableDensity, StableParams};
use crate::table::{grid, max_discrepancy, DensityTable, SCHEMA_VERSION};
use crate::verify::{self, VerifyOptions};
use crate::{DensityEval, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "STABLE_PRODUCTS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "stable-products",
    version,
    about = "Densities of stable laws and of products of independent stable variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a stable density.
    Stable(StableArgs),
    /// Tabulate the density of a product of two independent stable variables.
    Product(ProductArgs),
    /// Draw product samples and report their agreement with the model CDF.
    Sample(SampleArgs),
    /// Run the invariant and oracle suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long)]
    points: usize,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StableMethod {
    Auto,
    Series,
    Asymptotic,
    Fourier,
}

#[derive(Args, Debug)]
struct StableArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    p1: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = StableMethod::Auto)]
    method: StableMethod,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct FactorArgs {
    #[arg(long)]
    alpha1: f64,
    #[arg(long)]
    alpha2: f64,
    #[arg(long)]
    p1: f64,
    #[arg(long)]
    q1: f64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
}

impl FactorArgs {
    fn params(&self) -> Result<ProductParams> {
        ProductParams::with_scales(self.alpha1, self.alpha2, self.p1, self.q1, self.c1, self.c2)
    }
}

#[derive(Args, Debug)]
struct ProductArgs {
    #[command(flatten)]
    factors: FactorArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Add convolution and contour columns and the largest discrepancy.
    #[arg(long)]
    compare_oracles: bool,
    /// Abscissa of the contour, 0 < a < 1.
    #[arg(long, default_value_t = 0.5)]
    contour_abscissa: f64,
    #[arg(long, default_value_t = 60.0)]
    contour_height: f64,
    #[arg(long, default_value_t = 4096)]
    contour_nodes: usize,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    factors: FactorArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// File receiving one sample per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Points per parameter set; 1 gives a quick smoke run.
    #[arg(long, default_value_t = 25)]
    grid_size: usize,
    /// Replace every check's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::Domain(_)
        | Error::BoundaryRegion { .. }
        | Error::WrongRegion { .. }
        | Error::Origin
        | Error::Unsupported(_) => EXIT_USAGE,
        Error::Pole { .. }
        | Error::NonConvergent(_)
        | Error::Quadrature { .. }
        | Error::Accuracy(_)
        | Error::Io(_) => EXIT_NUMERIC,
    }
}

/// Applies the thread cap from the environment to the global pool; later
/// calls have no effect.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Stable(a) => cmd_stable(&a, out),
        Command::Product(a) => cmd_product(&a, out),
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(table: &DensityTable, json: bool, out: &mut dyn Write) -> Result<i32> {
    if json {
        writeln!(out, "{}", table.to_json()).map_err(|e| Error::Io(e.to_string()))?;
    } else {
        table.write_csv(&mut *out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_stable(a: &StableArgs, out: &mut dyn Write) -> Result<i32> {
    let d = StableDensity::new(StableParams::new(a.alpha, a.p1, a.c)?);
    let xs = grid(a.grid.xmin, a.grid.xmax, a.grid.points)?;
    let method = a.method;
    let table = DensityTable::tabulate(
        &xs,
        |x| {
            let wrap = |value: f64, method: Method, error_estimate: f64| DensityEval {
                value,
                method,
                error_estimate,
            };
            match method {
                StableMethod::Auto => d.eval(x),
                StableMethod::Series => d
                    .series(x)
                    .map(|e| wrap(e.value, Method::Series, e.error_estimate())),
                StableMethod::Asymptotic => d
                    .asymptotic(x)
                    .map(|e| wrap(e.value, Method::Asymptotic, e.error_estimate())),
                StableMethod::Fourier => d.fourier(x).map(|(v, e)| wrap(v, Method::Fourier, e)),
            }
        },
        |_| false,
    )?;
    emit(&table, a.grid.json, out)
}

fn cmd_product(a: &ProductArgs, out: &mut dyn Write) -> Result<i32> {
    let pp = a.factors.params()?;
    if pp.region() == Region::Boundary {
        return Err(Error::BoundaryRegion {
            alpha1: a.factors.alpha1,
            alpha2: a.factors.alpha2,
        });
    }
    let spec = ContourSpec::new(a.contour_abscissa, a.contour_height, a.contour_nodes)?;
    let d = ProductDensity::new(pp)?;
    let xs = grid(a.grid.xmin, a.grid.xmax, a.grid.points)?;
    let mut table = DensityTable::tabulate(&xs, |x| d.eval(x), |e| matches!(e, Error::Origin))?;
    if a.compare_oracles {
        table.add_column("convolution", |x| Ok(convolution_density(x, &pp)?.value))?;
        table.add_column("contour", |x| {
            let side = if x > 0.0 {
                Side::Positive
            } else {
                Side::Negative
            };
            let s = pp.scale_factor();
            Ok(contour_density(x.abs() / s, &pp.unit_scale(), &spec, side)?.value / s)
        })?;
        let gap = max_discrepancy(&table);
        table.add_summary("max_discrepancy", gap);
    }
    emit(&table, a.grid.json, out)
}

fn cmd_sample(a: &SampleArgs, out: &mut dyn Write) -> Result<i32> {
    let pp = a.factors.params()?;
    let samples = sample_products(&pp, a.n, a.seed)?;
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut file = BufWriter::new(File::create(&a.out).map_err(io)?);
    for v in &samples {
        writeln!(file, "{v}").map_err(io)?;
    }
    file.flush().map_err(io)?;
    let e = EmpiricalCdf::from_samples(samples)?;
    let ks = match pp.region() {
        Region::Boundary => None,
        _ => {
            let table = ProductDensity::new(pp)?.cdf_table()?;
            Some(ks_distance_par(&e, |x| table.eval(x)))
        }
    };
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "n": a.n,
        "seed": a.seed,
        "out": a.out,
        "positive_fraction": e.positive_fraction(),
        "expected_positive_fraction": pp.positive_mass(),
        "ks_distance": ks,
    });
    writeln!(out, "{summary}").map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = verify::run(VerifyOptions {
        grid_size: a.grid_size,
        tolerance: a.tolerance,
        seed: a.seed,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Io(e.to_string()))?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["stable-products"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn gaussian_single_row() {
        let (code, out, _) = call(&[
            "stable", "--alpha", "2", "--p1", "0.5", "--xmin", "0", "--xmax", "0", "--points", "1",
        ]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert!((row[1].parse::<f64>().unwrap() - 0.282_094_791_8).abs() < 1e-10);
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = call(&[
            "stable", "--alpha", "1.5", "--p1", "0.9", "--xmin", "0", "--xmax", "1", "--points",
            "3",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("[1−1/α, 1/α]"), "{err}");
        let (code, _, err) = call(&[
            "product", "--alpha1", "1", "--alpha2", "1", "--p1", "0.5", "--q1", "0.5", "--xmin",
            "1", "--xmax", "2", "--points", "2",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("α₁+α₂=2α₁α₂"), "{err}");
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn numeric_failure_code() {
        let (code, _, _) = call(&[
            "stable", "--alpha", "0.7", "--p1", "0.9", "--method", "series", "--xmin", "2",
            "--xmax", "3", "--points", "2",
        ]);
        assert_eq!(code, EXIT_NUMERIC);
    }

    #[test]
    fn origin_row_is_marked() {
        let (code, out, _) = call(&[
            "product", "--alpha1", "2", "--alpha2", "2", "--p1", "0.5", "--q1", "0.5", "--xmin",
            "-1", "--xmax", "1", "--points", "3",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(2).unwrap(), "0,,unsupported,");
    }
}
