//! Reference computations that share no series code with the product module:
//! multiplicative convolution of two stable densities, trapezoidal inversion
//! of the Mellin transform along a vertical line, and Monte Carlo sampling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::product_density::{classify_region, ProductParams, Region};
use crate::quadrature::{self, Tolerance};
use crate::stable_core::{mellin_transform, sample_unchecked, Side, StableDensity};

/// Vertical line Re s = a, truncated at |Im s| ≤ half_height, sampled at `nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    a: f64,
    half_height: f64,
    nodes: usize,
}

impl ContourSpec {
    pub fn new(a: f64, half_height: f64, nodes: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "contour abscissa must satisfy 0 < a < 1, got {a}"
            )));
        }
        if !(half_height > 0.0 && half_height.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half_height must be positive, got {half_height}"
            )));
        }
        if nodes < 64 {
            return Err(Error::InvalidParameter(format!(
                "at least 64 nodes required, got {nodes}"
            )));
        }
        Ok(Self {
            a,
            half_height,
            nodes,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn half_height(&self) -> f64 {
        self.half_height
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn with_abscissa(&self, a: f64) -> Result<Self> {
        Self::new(a, self.half_height, self.nodes)
    }
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            a: 0.5,
            half_height: 60.0,
            nodes: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// g(x) = ∫ f₁(x/y) f₂(y) dy/|y|, integrated over y = ±eᵗ.
pub fn convolution_density(x: f64, pp: &ProductParams) -> Result<OracleValue> {
    let f1 = StableDensity::new(*pp.first());
    let f2 = StableDensity::new(*pp.second());
    convolution_with(x, &f1, &f2)
}

pub(crate) fn convolution_with(
    x: f64,
    f1: &StableDensity,
    f2: &StableDensity,
) -> Result<OracleValue> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "convolution oracle requires finite x ≠ 0, got {x}"
        )));
    }
    let a_min = f1.params().alpha().min(f2.params().alpha());
    let s1 = f1.params().scale_factor();
    let s2 = f2.params().scale_factor();
    // Both tails decay at least like e^{−(1+α)|t|} away from the balance point.
    let centre = 0.5 * ((x.abs() / s1).ln() + s2.ln());
    let half_width = 40.0 / (1.0 + a_min).min(1.5) + 0.5 * (x.abs() / s1 / s2).ln().abs();
    let pts = quadrature::breakpoints(centre - half_width, centre + half_width, 0.5);
    let r = quadrature::integrate(
        |t| {
            let y = t.exp();
            Ok(f1.density(x / y)? * f2.density(y)? + f1.density(-x / y)? * f2.density(-y)?)
        },
        &pts,
        Tolerance::new(1e-12, 1e-11),
    )?;
    if !r.converged && r.error > 1e-9 {
        return Err(Error::Quadrature { estimate: r.error });
    }
    Ok(OracleValue {
        value: r.value,
        error_estimate: r.error,
    })
}

fn strip_check(s: Complex64, pp: &ProductParams) -> Result<()> {
    let top = pp.first().alpha().min(pp.second().alpha()) + 1.0;
    if s.re > 0.0 && s.re < top {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Re s = {} outside the strip (0, {top})",
            s.re
        )))
    }
}

/// G₁(s) (positive side) or G₂(s) (negative side): Mellin transform of the product density restricted to one half-line.
pub fn mellin_product_transform(s: Complex64, pp: &ProductParams, side: Side) -> Result<Complex64> {
    strip_check(s, pp)?;
    let (a, b) = (pp.first(), pp.second());
    let f1p = mellin_transform(s, a, Side::Positive)?;
    let f1n = mellin_transform(s, a, Side::Negative)?;
    let f2p = mellin_transform(s, b, Side::Positive)?;
    let f2n = mellin_transform(s, b, Side::Negative)?;
    Ok(match side {
        Side::Positive => f1p * f2p + f1n * f2n,
        Side::Negative => f1p * f2n + f1n * f2p,
    })
}

/// (1/π)∫₀^H Re[x^{−s} K(s)] dt along s = a + it by the trapezoid rule.
///
/// The error estimate combines the step-halving difference with the size
/// of the integrand at the truncation height.
pub fn contour_integral<K>(x: f64, kernel: K, spec: &ContourSpec) -> Result<OracleValue>
where
    K: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "contour integral requires x > 0, got {x}"
        )));
    }
    let lx = x.ln();
    let n = spec.nodes;
    let h = spec.half_height / (n - 1) as f64;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let s = Complex64::new(spec.a, j as f64 * h);
            Ok(((-s * lx).exp() * kernel(s)?).re)
        })
        .collect::<Result<_>>()?;
    let trapezoid = |stride: usize| {
        let last = (n - 1) / stride * stride;
        let inner: f64 = values[..=last].iter().step_by(stride).sum();
        (inner - 0.5 * (values[0] + values[last])) * h * stride as f64
    };
    let fine = trapezoid(1);
    let coarse = trapezoid(2);
    let tail = values[n - 1].abs().max(values[n - 2].abs()) * spec.half_height;
    if tail > 1e-6 {
        return Err(Error::Accuracy(format!(
            "integrand still of size {:.3e} at height {}",
            values[n - 1].abs(),
            spec.half_height
        )));
    }
    Ok(OracleValue {
        value: fine / PI,
        error_estimate: ((fine - coarse).abs() + tail) / PI,
    })
}

/// Inverse Mellin transform of G₁ (or G₂) on Re s = a. `x` is the distance from the origin.
pub fn contour_density(
    x: f64,
    pp: &ProductParams,
    spec: &ContourSpec,
    side: Side,
) -> Result<OracleValue> {
    contour_integral(x, |s| mellin_product_transform(s, pp, side), spec)
}

/// Sorted sample with its step-function CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empty sample".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("sample contains NaN".into()));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of sample points ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn positive_fraction(&self) -> f64 {
        1.0 - self.eval(0.0)
    }
}

const CHUNK: usize = 1 << 16;

/// Draws `n` products X₁X₂ in parallel. Each chunk of the output uses its own
/// ChaCha8 stream keyed by one seed drawn from `rng`, so the result depends
/// only on the state of `rng`.
pub fn monte_carlo_product<R: Rng + ?Sized>(
    pp: &ProductParams,
    n: usize,
    rng: &mut R,
) -> Result<EmpiricalCdf> {
    EmpiricalCdf::from_samples(sample_products(pp, n, rng.random())?)
}

/// The raw, unsorted sample behind [`monte_carlo_product`].
pub fn sample_products(pp: &ProductParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least 10000 draws, got {n}"
        )));
    }
    if pp.first().alpha() == 1.0 || pp.second().alpha() == 1.0 {
        return Err(Error::Unsupported(
            "products with α = 1 are not sampled".into(),
        ));
    }
    let (a, b) = (*pp.first(), *pp.second());
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(i as u64);
            let len = CHUNK.min(n - i * CHUNK);
            (0..len)
                .map(|_| sample_unchecked(&a, &mut r) * sample_unchecked(&b, &mut r))
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// sup |Fₙ − F| over the sample, counting both sides of each jump.
pub fn ks_distance<F: Fn(f64) -> f64>(e: &EmpiricalCdf, model: F) -> f64 {
    let n = e.len() as f64;
    e.sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Same as [`ks_distance`] with the model evaluated in parallel.
pub fn ks_distance_par<F: Fn(f64) -> f64 + Sync>(e: &EmpiricalCdf, model: F) -> f64 {
    let n = e.len() as f64;
    e.sorted
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .reduce(|| 0.0, f64::max)
}

/// Whether the oracle comparisons are meaningful for these parameters.
pub fn comparable(pp: &ProductParams) -> bool {
    classify_region(pp) != Region::Boundary
}
