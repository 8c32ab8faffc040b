//! Densities of strictly stable laws and of the product of two independent
//! strictly stable random variables.
//!
//! Every analytic representation (power series, tail expansions, Mellin–Barnes
//! residue sums, Fox H-function identities) is paired with an independent
//! numerical oracle: Fourier inversion, multiplicative-convolution quadrature,
//! contour integration of the Mellin transform, and Monte Carlo sampling.

pub mod cli;
pub mod error;
pub mod fox_h;
pub mod oracles;
pub mod product_density;
mod quadrature;
pub mod series;
pub mod special_functions;
pub mod stable_core;
pub mod table;
pub mod verify;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use product_density::{ProductDensity, ProductParams, Region};
pub use series::SeriesEval;
pub use special_functions::ComplexValue;
pub use stable_core::{Side, StableDensity, StableParams};

/// How a density value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Asymptotic,
    Fourier,
    Convolution,
    Contour,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Asymptotic => "asymptotic",
            Method::Fourier => "fourier",
            Method::Convolution => "convolution",
            Method::Contour => "contour",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A density value with its provenance and error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEval {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}
