//! Headless invariant and oracle suite with a JSON report.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fox_h::{verify_difference_identity, verify_sum_identity, DifferenceConvention};
use crate::oracles::{
    contour_density, convolution_density, ks_distance_par, sample_products, ContourSpec,
    EmpiricalCdf,
};
use crate::product_density::{classify_alphas, ProductDensity, ProductParams, Region};
use crate::quadrature::{self, Tolerance};
use crate::special_functions::bessel_k0;
use crate::stable_core::{mellin_transform, p1_bounds, Side, StableDensity, StableParams};
use crate::table::SCHEMA_VERSION;

/// Parameter sets (α₁, α₂, p₁, q₁) spanning both regions.
pub const REFERENCE_SETS: [(f64, f64, f64, f64); 6] = [
    (2.0, 2.0, 0.5, 0.5),
    (1.8, 1.5, 0.55, 0.5),
    (0.8, 1.9, 0.9, 0.52),
    (0.5, 0.5, 1.0, 1.0),
    (0.7, 0.6, 0.8, 0.7),
    (0.75, 1.2, 0.6, 0.5),
];

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Points per parameter set; randomized checks run 8× this many trials.
    pub grid_size: usize,
    /// Replaces every default tolerance when set.
    pub tolerance: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_size: 25,
            tolerance: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub trials: usize,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub passed: bool,
    pub grid_size: usize,
    pub difference_convention: Option<DifferenceConvention>,
    pub difference_convention_formula: Option<&'static str>,
    pub checks: Vec<CheckResult>,
}

struct Suite {
    opts: VerifyOptions,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn tol(&self, default: f64) -> f64 {
        self.opts.tolerance.unwrap_or(default)
    }

    /// Runs `f`, which returns (largest error, trial count).
    fn check<F>(&mut self, name: &'static str, default_tol: f64, f: F)
    where
        F: FnOnce() -> Result<(f64, usize)>,
    {
        let tolerance = self.tol(default_tol);
        let start = Instant::now();
        let outcome = f();
        let seconds = start.elapsed().as_secs_f64();
        let result = match outcome {
            Ok((max_error, trials)) => CheckResult {
                name,
                passed: max_error <= tolerance,
                max_error,
                tolerance,
                trials,
                seconds,
                detail: None,
            },
            Err(e) => CheckResult {
                name,
                passed: false,
                max_error: f64::INFINITY,
                tolerance,
                trials: 0,
                seconds,
                detail: Some(e.to_string()),
            },
        };
        self.checks.push(result);
    }
}

fn unit(a1: f64, a2: f64, p: f64, q: f64) -> Result<ProductParams> {
    ProductParams::unit(a1, a2, p, q)
}

/// Log-spaced |x| in [0.05, 5] with alternating signs.
fn sample_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = if n == 1 {
                0.5
            } else {
                i as f64 / (n - 1) as f64
            };
            let x = 0.05 * 100f64.powf(t);
            if i % 2 == 0 {
                x
            } else {
                -x
            }
        })
        .collect()
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

/// Random admissible product parameters away from the region boundary.
fn random_params(rng: &mut ChaCha8Rng, scaled: bool) -> Result<ProductParams> {
    loop {
        let a1: f64 = rng.random_range(0.3..=2.0);
        let a2: f64 = rng.random_range(0.3..=2.0);
        if (a1 + a2 - 2.0 * a1 * a2).abs() < 0.1 || classify_alphas(a1, a2) == Region::Boundary {
            continue;
        }
        let draw = |rng: &mut ChaCha8Rng, a: f64| {
            let (lo, hi) = p1_bounds(a);
            lo + (hi - lo) * rng.random_range(0.02..=1.0)
        };
        let p = draw(rng, a1);
        let q = draw(rng, a2);
        let (c1, c2) = if scaled {
            (rng.random_range(0.2..5.0), rng.random_range(0.2..5.0))
        } else {
            (1.0, 1.0)
        };
        return ProductParams::with_scales(a1, a2, p, q, c1, c2);
    }
}

fn random_x(rng: &mut ChaCha8Rng) -> f64 {
    let x = 10f64.powf(rng.random_range(-1.3..1.3));
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

fn randomized<F>(rng: &mut ChaCha8Rng, trials: usize, mut f: F) -> Result<(f64, usize)>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for _ in 0..trials {
        worst = worst.max(f(rng)?);
    }
    Ok((worst, trials))
}

pub fn run(opts: VerifyOptions) -> Report {
    let g = opts.grid_size.max(1);
    let mut suite = Suite {
        opts,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let trials = 8 * g;

    suite.check("gaussian_product_bessel", 1e-8, || {
        let d = ProductDensity::new(unit(2.0, 2.0, 0.5, 0.5)?)?;
        let xs = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
        let mut worst = 0.0f64;
        for &x in xs.iter().take(g.min(xs.len())) {
            let want = bessel_k0(x / 2.0)? / (2.0 * PI);
            worst = worst.max((d.density(x)? / want - 1.0).abs());
        }
        Ok((worst, g.min(xs.len())))
    });

    suite.check("oracle_triangle", 1e-6, || {
        let spec = ContourSpec::default();
        let mut worst = 0.0f64;
        let mut n = 0;
        for &(a1, a2, p, q) in &REFERENCE_SETS {
            let pp = unit(a1, a2, p, q)?;
            let d = ProductDensity::new(pp)?;
            for x in sample_points(g) {
                let side = if x > 0.0 {
                    Side::Positive
                } else {
                    Side::Negative
                };
                let s = d.density(x)?;
                let v = convolution_density(x, &pp)?.value;
                let c = contour_density(x.abs(), &pp, &spec, side)?.value;
                worst = worst
                    .max((s - v).abs())
                    .max((s - c).abs())
                    .max((v - c).abs());
                n += 1;
            }
        }
        Ok((worst, n))
    });

    suite.check("commutativity", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, false)?;
            let x = random_x(rng);
            let a = ProductDensity::new(pp)?.density(x)?;
            let b = ProductDensity::new(pp.swapped())?.density(x)?;
            Ok(rel_gap(a, b))
        })
    });

    suite.check("parameter_reflection", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, false)?;
            let x = random_x(rng);
            let a = ProductDensity::new(pp)?.density(x)?;
            let b = ProductDensity::new(pp.reflected())?.density(x)?;
            Ok(rel_gap(a, b))
        })
    });

    suite.check("argument_reflection", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, false)?;
            let x = random_x(rng);
            let a = ProductDensity::new(pp.mirrored())?.density(x)?;
            let b = ProductDensity::new(pp)?.density(-x)?;
            Ok(rel_gap(a, b))
        })
    });

    suite.check("scaling", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, true)?;
            let x = random_x(rng);
            let s = pp.scale_factor();
            let a = ProductDensity::new(pp)?.density(x)?;
            let b = ProductDensity::new(pp.unit_scale())?.density(x / s)? / s;
            Ok(rel_gap(a, b))
        })
    });

    suite.check("symmetry_absorption", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, false)?;
            let pp =
                ProductParams::new(*pp.first(), StableParams::unit(pp.second().alpha(), 0.5)?)?;
            let x = random_x(rng);
            let d = ProductDensity::new(pp)?;
            Ok(rel_gap(d.density(x)?, d.density(-x)?))
        })
    });

    suite.check("iid_consistency", 1e-12, || {
        randomized(&mut rng, trials, |rng| {
            let pp = random_params(rng, false)?;
            let (a, p) = (pp.first().alpha(), pp.first().p1());
            if classify_alphas(a, a) == Region::Boundary || (a - 1.0).abs() < 0.05 {
                return Ok(0.0);
            }
            let x = random_x(rng);
            let general = ProductDensity::new(unit(a, a, p, p)?)?.density(x)?;
            let iid = ProductDensity::iid(a, p)?.density(x)?;
            Ok(rel_gap(general, iid))
        })
    });

    let mass_sets = &REFERENCE_SETS[..g.min(REFERENCE_SETS.len())];
    suite.check("normalization", 1e-5, || {
        let mut worst = 0.0f64;
        for &(a1, a2, p, q) in mass_sets {
            let d = ProductDensity::new(unit(a1, a2, p, q)?)?;
            let total = d.half_line_mass(Side::Positive)? + d.half_line_mass(Side::Negative)?;
            worst = worst.max((total - 1.0).abs());
        }
        Ok((worst, mass_sets.len()))
    });

    suite.check("positive_mass", 1e-5, || {
        let mut worst = 0.0f64;
        for &(a1, a2, p, q) in mass_sets {
            let pp = unit(a1, a2, p, q)?;
            let d = ProductDensity::new(pp)?;
            worst = worst.max((d.half_line_mass(Side::Positive)? - pp.positive_mass()).abs());
        }
        Ok((worst, mass_sets.len()))
    });

    let levels = g.clamp(2, 5);
    suite.check("stable_series_vs_fourier", 1e-8, || {
        let mut worst = 0.0f64;
        let mut n = 0;
        for &alpha in &[1.2, 1.5, 1.8, 2.0] {
            let (lo, hi) = p1_bounds(alpha);
            for i in 0..levels {
                let p1 = lo + (hi - lo) * i as f64 / (levels - 1) as f64;
                let d = StableDensity::new(StableParams::unit(alpha, p1)?);
                for j in 0..g {
                    let x = if g == 1 {
                        0.5
                    } else {
                        -1.0 + 2.0 * j as f64 / (g - 1) as f64
                    };
                    worst = worst.max((d.series(x)?.value - d.fourier(x)?.0).abs());
                    n += 1;
                }
            }
        }
        Ok((worst, n))
    });

    suite.check("stable_asymptotic_vs_fourier", 1e-8, || {
        let mut worst = 0.0f64;
        let mut n = 0;
        for &alpha in &[0.5, 0.7, 0.9] {
            for i in 0..levels {
                let p1 = 0.02 + 0.98 * i as f64 / (levels - 1) as f64;
                let d = StableDensity::new(StableParams::unit(alpha, p1)?);
                for j in 0..g {
                    let x = 2.0 * 25f64.powf(j as f64 / g as f64);
                    let f = d.fourier(x)?.0;
                    if f > 1e-300 {
                        worst = worst.max((d.asymptotic(x)?.value / f - 1.0).abs());
                    }
                    n += 1;
                }
            }
        }
        Ok((worst, n))
    });

    suite.check("stable_mellin_vs_quadrature", 1e-7, || {
        let points = 20.min(4 * g);
        let mut worst = 0.0f64;
        for i in 0..points {
            let (alpha, p1) = if i % 2 == 0 { (1.5, 0.6) } else { (0.7, 0.9) };
            let sigma = 0.3 + 0.9 * ((i / 2) % 5) as f64 / 4.0;
            let tau = [0.0, 0.7][(i / 10) % 2] + 0.1 * (i % 3) as f64;
            let s = Complex64::new(sigma, tau);
            let p = StableParams::unit(alpha, p1)?;
            let want = mellin_transform(s, &p, Side::Positive)?;
            let got = mellin_by_quadrature(s, &p)?;
            worst = worst.max((want - got).norm());
        }
        Ok((worst, points))
    });

    suite.check("stable_mellin_at_one", 0.0, || {
        let mut worst = 0.0f64;
        for &(alpha, p1) in &[(0.5, 1.0), (0.7, 0.3), (1.5, 0.6), (2.0, 0.5), (1.2, 0.2)] {
            let f = mellin_transform(
                Complex64::new(1.0, 0.0),
                &StableParams::unit(alpha, p1)?,
                Side::Positive,
            )?;
            worst = worst.max((f.re - p1).abs()).max(f.im.abs());
        }
        Ok((worst, 5))
    });

    let mc_n = (40_000 * g).clamp(10_000, 1_000_000);
    let mc_sets = [(1.5, 0.6), (0.7, 0.9)];
    let mut fractions = Vec::new();
    suite.check("monte_carlo_ks", 1.5 * 1.95 / (mc_n as f64).sqrt(), || {
        let mut worst = 0.0f64;
        for (i, &(a, p)) in mc_sets.iter().enumerate() {
            let pp = unit(a, a, p, p)?;
            let table = ProductDensity::new(pp)?.cdf_table()?;
            let e = EmpiricalCdf::from_samples(sample_products(&pp, mc_n, opts.seed + i as u64)?)?;
            fractions.push((e.positive_fraction() - pp.positive_mass()).abs());
            worst = worst.max(ks_distance_par(&e, |x| table.eval(x)));
        }
        Ok((worst, mc_sets.len()))
    });
    suite.check(
        "monte_carlo_positive_fraction",
        2.0 / (mc_n as f64).sqrt(),
        || {
            if fractions.is_empty() {
                return Err(crate::Error::Accuracy("sampling failed".into()));
            }
            Ok((
                fractions.iter().copied().fold(0.0, f64::max),
                fractions.len(),
            ))
        },
    );

    let fox_levels = g.min(3);
    let fox_grid = fox_grid(fox_levels);
    suite.check("fox_h_sum_identity", 1e-8, || {
        let mut worst = 0.0f64;
        for &(a1, a2, p, q) in &fox_grid {
            worst = worst.max(verify_sum_identity(0.5, a1, a2, p, q)?);
        }
        Ok((worst, fox_grid.len()))
    });

    let mut selected: Option<DifferenceConvention> = None;
    suite.check("fox_h_difference_identity", 1e-8, || {
        let mut worst = 0.0f64;
        for &(a1, a2, p, q) in &fox_grid {
            let c = verify_difference_identity(0.5, a1, a2, p, q)?;
            // Terms cancel identically when p₁+q₁ = 1, so such points cannot discriminate.
            if (p + q - 1.0).abs() > 1e-12 {
                match selected {
                    None => selected = Some(c.convention),
                    Some(s) if s != c.convention => {
                        return Err(crate::Error::Accuracy(
                            "different grid points select different conventions".into(),
                        ))
                    }
                    _ => {}
                }
            }
            worst = worst.max(c.residual);
        }
        Ok((worst, fox_grid.len()))
    });

    suite.check("asymptotic_consistency", 1e-4, || {
        // Below x ≈ 20 no truncation of the expansion reaches 1e-4 for this law.
        let pp = unit(1.5, 1.5, 0.6, 0.6)?;
        let d = ProductDensity::new(pp)?;
        let spec = ContourSpec::default();
        let mut worst = 0.0f64;
        for &x in &[20.0, 50.0] {
            let reference = contour_density(x, &pp, &spec, Side::Positive)?.value;
            worst = worst.max((d.right_form(x)?.value / reference - 1.0).abs());
        }
        Ok((worst, 2))
    });

    let passed = suite.checks.iter().all(|c| c.passed);
    Report {
        schema: SCHEMA_VERSION,
        passed,
        grid_size: g,
        difference_convention: selected,
        difference_convention_formula: selected.map(|c| c.describe()),
        checks: suite.checks,
    }
}

/// Left-region grid with α₁, α₂ ∈ {1.3, 1.6, 1.9} and asymmetries spread over the admissible range.
fn fox_grid(levels: usize) -> Vec<(f64, f64, f64, f64)> {
    let alphas = [1.3, 1.6, 1.9];
    let fracs: &[f64] = match levels {
        1 => &[0.3],
        2 => &[0.2, 0.7],
        _ => &[0.2, 0.5, 0.8],
    };
    let mut out = Vec::new();
    for &a1 in &alphas[..levels] {
        for &a2 in &alphas[..levels] {
            for &fp in fracs {
                for &fq in fracs {
                    let (lp, hp) = p1_bounds(a1);
                    let (lq, hq) = p1_bounds(a2);
                    out.push((a1, a2, lp + fp * (hp - lp), lq + fq * (hq - lq)));
                }
            }
        }
    }
    out
}

/// ∫₀^∞ x^{s−1} f(x) dx by quadrature in ln x.
fn mellin_by_quadrature(s: Complex64, p: &StableParams) -> Result<Complex64> {
    let d = StableDensity::new(*p);
    let lo = -45.0 / s.re;
    let hi = 45.0 / (1.0 + p.alpha() - s.re);
    let pts = quadrature::breakpoints(lo, hi, 1.0);
    let part = |take_re: bool| {
        quadrature::integrate(
            |u| {
                let w = (s * u).exp() * d.density(u.exp())?;
                Ok(if take_re { w.re } else { w.im })
            },
            &pts,
            Tolerance::new(1e-12, 1e-11),
        )
    };
    let re = part(true)?;
    let im = part(false)?;
    Ok(Complex64::new(re.value, im.value))
}
