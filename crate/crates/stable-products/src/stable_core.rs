//! Strictly stable laws in the (α, p₁, c) parametrization.
//!
//! The characteristic function is
//! `φ(k) = exp(−c|k|^α · exp(−iθ·sgn k))` with `θ = α(p₁ − p₂)π/2`,
//! where `p₁ = P(X > 0)` and `p₂ = 1 − p₁`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::series::{Expansion, Mode, SeriesEval, Term, MAX_TERMS};
use crate::special_functions::{ln_gamma, ln_gamma_complex, sin_pi, ComplexValue};
use crate::{DensityEval, Method};

/// Slack allowed on the admissibility bounds so that values like `p₁ = 1/α`
/// computed in floating point are accepted.
const BOUND_SLACK: f64 = 1e-12;

/// Which half-line a one-sided quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

/// Parameters (α, p₁, c) of a strictly stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableParams {
    alpha: f64,
    p1: f64,
    c: f64,
}

impl StableParams {
    pub fn new(alpha: f64, p1: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "α = {alpha} outside (0, 2]"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale c = {c} must be > 0"
            )));
        }
        let (lo, hi) = p1_bounds(alpha);
        if !(p1 >= lo - BOUND_SLACK && p1 <= hi + BOUND_SLACK) {
            let range = if alpha > 1.0 {
                "[1−1/α, 1/α]"
            } else {
                "[0, 1]"
            };
            return Err(Error::InvalidParameter(format!(
                "p₁ = {p1} outside {range} = [{lo:.6}, {hi:.6}] for α = {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            p1: p1.clamp(lo, hi),
            c,
        })
    }

    /// Unit-scale law (c = 1).
    pub fn unit(alpha: f64, p1: f64) -> Result<Self> {
        Self::new(alpha, p1, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Law of −X: asymmetry p₁ and p₂ exchanged.
    pub fn reflected(&self) -> Self {
        Self {
            p1: self.p2(),
            ..*self
        }
    }

    pub fn with_scale(&self, c: f64) -> Result<Self> {
        Self::new(self.alpha, self.p1, c)
    }

    /// c^{1/α}, the factor relating this law to its unit-scale version.
    pub fn scale_factor(&self) -> f64 {
        self.c.powf(1.0 / self.alpha)
    }

    /// θ = α(p₁ − p₂)π/2.
    pub fn theta(&self) -> f64 {
        self.alpha * (self.p1 - self.p2()) * FRAC_PI_2
    }

    pub fn is_symmetric(&self) -> bool {
        self.p1 == 0.5
    }

    fn is_asymmetric_cauchy(&self) -> bool {
        self.alpha == 1.0 && !self.is_symmetric()
    }
}

/// Admissible interval for p₁ given α.
pub fn p1_bounds(alpha: f64) -> (f64, f64) {
    if alpha > 1.0 {
        (1.0 - 1.0 / alpha, 1.0 / alpha)
    } else {
        (0.0, 1.0)
    }
}

/// Characteristic function φ(k).
pub fn char_fn(k: f64, p: &StableParams) -> ComplexValue {
    if k == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let rot = Complex64::from_polar(1.0, -p.theta() * k.signum());
    (-p.c * k.abs().powf(p.alpha) * rot).exp()
}

/// Cached coefficient tables for one law at unit scale.
#[derive(Debug, Clone)]
pub struct StableDensity {
    params: StableParams,
    scale: f64,
    /// Power series in x^{k−1}; index 0 for x > 0, 1 for x < 0.
    small: [Expansion; 2],
    /// Tail expansion in x^{−αk−1}.
    large: [Expansion; 2],
}

const ACCEPT_ABS: f64 = 1e-14;
const ACCEPT_REL: f64 = 1e-12;

fn acceptable(e: &SeriesEval) -> bool {
    e.error_estimate() <= ACCEPT_ABS + ACCEPT_REL * e.value.abs()
}

impl StableDensity {
    pub fn new(params: StableParams) -> Self {
        let a = params.alpha;
        let small_mode = if a >= 1.0 {
            Mode::Convergent
        } else {
            Mode::Asymptotic
        };
        let large_mode = if a <= 1.0 {
            Mode::Convergent
        } else {
            Mode::Asymptotic
        };
        let small = |skew: f64| {
            let terms = (1..=MAX_TERMS)
                .map(|k| {
                    let kf = k as f64;
                    Term {
                        ln_scale: ln_gamma(kf / a + 1.0).unwrap()
                            - ln_gamma(kf + 1.0).unwrap()
                            - PI.ln(),
                        power: kf - 1.0,
                        a: sin_pi(skew * kf),
                        a_env: 1.0,
                        ..Term::default()
                    }
                })
                .collect();
            Expansion::new(terms, small_mode)
        };
        let large = |skew: f64| {
            let terms = (1..=MAX_TERMS)
                .map(|k| {
                    let kf = k as f64;
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    Term {
                        ln_scale: ln_gamma(a * kf + 1.0).unwrap()
                            - ln_gamma(kf + 1.0).unwrap()
                            - PI.ln(),
                        power: -a * kf - 1.0,
                        a: sign * sin_pi(a * skew * kf),
                        a_env: 1.0,
                        ..Term::default()
                    }
                })
                .collect();
            Expansion::new(terms, large_mode)
        };
        Self {
            params,
            scale: params.scale_factor(),
            small: [small(params.p2()), small(params.p1)],
            large: [large(params.p1), large(params.p2())],
        }
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    /// Unit-scale argument and half-line index.
    fn reduce(&self, x: f64) -> (f64, usize) {
        let y = x / self.scale;
        if y < 0.0 {
            (-y, 1)
        } else {
            (y, 0)
        }
    }

    fn law_on_side(&self, side: usize) -> StableParams {
        if side == 0 {
            self.params
        } else {
            self.params.reflected()
        }
    }

    pub fn series(&self, x: f64) -> Result<SeriesEval> {
        let p = &self.params;
        if p.is_asymmetric_cauchy() {
            return Err(Error::Unsupported(
                "series paths exclude α = 1 with p₁ ≠ ½".into(),
            ));
        }
        let (y, side) = self.reduce(x);
        if p.alpha <= 1.0 && y >= 1.0 {
            return Err(Error::NonConvergent(format!(
                "power series for α = {} requires |x| < 1 at unit scale, got {y}",
                p.alpha
            )));
        }
        let e = if y == 0.0 {
            let q = self.law_on_side(side).p2();
            SeriesEval::exact((ln_gamma(1.0 / p.alpha + 1.0)? - PI.ln()).exp() * sin_pi(q))
        } else {
            self.small[side].eval(y)
        };
        Ok(e.divided(self.scale))
    }

    pub fn asymptotic(&self, x: f64) -> Result<SeriesEval> {
        let p = &self.params;
        if x == 0.0 {
            return Err(Error::Domain("tail expansion is undefined at x = 0".into()));
        }
        if p.is_asymmetric_cauchy() {
            return Err(Error::Unsupported(
                "series paths exclude α = 1 with p₁ ≠ ½".into(),
            ));
        }
        let (y, side) = self.reduce(x);
        if p.alpha == 1.0 && y <= 1.0 {
            return Err(Error::NonConvergent(format!(
                "Cauchy tail series requires |x| > 1 at unit scale, got {y}"
            )));
        }
        Ok(self.large[side].eval(y).divided(self.scale))
    }

    /// Fourier inversion along a rotated ray in the complex k-plane.
    pub fn fourier(&self, x: f64) -> Result<(f64, f64)> {
        let (y, side) = self.reduce(x);
        let law = self.law_on_side(side);
        let (value, err) = fourier_unit(y, law.alpha, law.theta())?;
        Ok((value / self.scale, err / self.scale))
    }

    /// Best available value: whichever series certifies its accuracy, else Fourier.
    pub fn eval(&self, x: f64) -> Result<DensityEval> {
        let candidates = [
            (Method::Series, self.series(x)),
            (Method::Asymptotic, self.asymptotic(x)),
        ];
        let best = candidates
            .into_iter()
            .filter_map(|(m, r)| r.ok().map(|e| (m, e)))
            .filter(|(_, e)| acceptable(e))
            .min_by(|a, b| a.1.error_estimate().total_cmp(&b.1.error_estimate()));
        if let Some((method, e)) = best {
            return Ok(DensityEval {
                value: e.value,
                method,
                error_estimate: e.error_estimate(),
            });
        }
        let (value, err) = self.fourier(x)?;
        Ok(DensityEval {
            value,
            method: Method::Fourier,
            error_estimate: err,
        })
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }

    /// ∫ₓ^∞ f for x ≥ 0 (side Positive) or ∫_{−∞}^{−x} f (side Negative).
    pub fn tail_mass(&self, x: f64, side: Side) -> Result<f64> {
        debug_assert!(x >= 0.0);
        let s = if side == Side::Positive { 0 } else { 1 };
        let sign = if s == 0 { 1.0 } else { -1.0 };
        let y0 = x / self.scale;
        let tail = self.large[s].integrated(true);
        let mut cut = y0.max(1.0);
        let mut tail_value = None;
        while cut < 1e12 {
            let e = tail.eval(cut);
            if (self.params.alpha != 1.0 || cut > 1.0) && e.error_estimate() <= 1e-15 {
                tail_value = Some(e.value);
                break;
            }
            cut *= 2.0;
        }
        let tail_value = tail_value.ok_or_else(|| {
            Error::Accuracy("tail expansion did not reach the requested accuracy".into())
        })?;
        if cut <= y0 {
            return Ok(tail_value);
        }
        let body = integrate_log_scale(
            |y| Ok(self.density(sign * y * self.scale)? * self.scale),
            y0,
            cut,
        )?;
        Ok(body + tail_value)
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("cdf of NaN".into()));
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        if x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let p1 = self.params.p1;
        let y = x.abs() / self.scale;
        let side = if x >= 0.0 {
            Side::Positive
        } else {
            Side::Negative
        };
        let near = if y < 1.0 {
            let sign = if x >= 0.0 { 1.0 } else { -1.0 };
            let inner = integrate_log_scale(
                |t| Ok(self.density(sign * t * self.scale)? * self.scale),
                0.0,
                y,
            )?;
            Some(inner)
        } else {
            None
        };
        Ok(match (side, near) {
            (Side::Positive, Some(inner)) => 1.0 - p1 + inner,
            (Side::Positive, None) => 1.0 - self.tail_mass(x, Side::Positive)?,
            (Side::Negative, Some(inner)) => (1.0 - p1) - inner,
            (Side::Negative, None) => self.tail_mass(-x, Side::Negative)?,
        })
    }
}

/// ∫ₐᵇ g(y) dy for 0 ≤ a < b, integrating in u = ln y.
pub(crate) fn integrate_log_scale<F>(mut g: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b <= a {
        return Ok(0.0);
    }
    let lo = if a > 0.0 { a.ln() } else { b.ln() - 45.0 };
    let pts = quadrature::breakpoints(lo, b.ln(), 0.5);
    let r = quadrature::integrate(
        |u| {
            let y = u.exp();
            Ok(g(y)? * y)
        },
        &pts,
        Tolerance::new(1e-13, 1e-12),
    )?;
    if !r.converged && r.error > 1e-10 {
        return Err(Error::Quadrature { estimate: r.error });
    }
    Ok(r.value)
}

/// f(x) for x ≥ 0 at unit scale, by integrating along k = t·e^{iβ}.
///
/// β is chosen inside the sector where both `e^{−ikx}` and `φ(k)` decay, so
/// the integrand is exponentially damped and barely oscillates.
fn fourier_unit(x: f64, alpha: f64, theta: f64) -> Result<(f64, f64)> {
    let beta = 0.5 * ((theta - FRAC_PI_2) / alpha).max(-FRAC_PI_2);
    let psi = alpha * beta - theta;
    let (sb, cb) = beta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let decay = |t: f64| -x * t * sb + t.powf(alpha) * cp;
    let mut t_hi = 1.0f64;
    while decay(t_hi) < 45.0 + t_hi.ln().max(0.0) && t_hi < 1e300 {
        t_hi *= 2.0;
    }
    let u_lo = -42.0;
    let u_hi = t_hi.ln();
    let pts = quadrature::breakpoints(u_lo, u_hi, 1.0);
    let r = quadrature::integrate(
        |u| {
            let t = u.exp();
            let ta = t.powf(alpha);
            let re = x * t * sb - ta * cp;
            let im = -x * t * cb - ta * sp;
            Ok(re.exp() * (im + beta).cos() * t)
        },
        &pts,
        Tolerance::new(1e-14, 1e-12),
    )?;
    if !r.converged && r.error > 1e-11 {
        return Err(Error::Quadrature {
            estimate: r.error / PI,
        });
    }
    Ok((r.value / PI, r.error / PI))
}

/// Series representation of f (power series in x^{k−1}).
pub fn density_series(x: f64, p: &StableParams) -> Result<SeriesEval> {
    StableDensity::new(*p).series(x)
}

/// Tail expansion of f in powers x^{−αk−1}.
pub fn density_asymptotic(x: f64, p: &StableParams) -> Result<SeriesEval> {
    StableDensity::new(*p).asymptotic(x)
}

/// Density value from whichever representation is accurate at x.
pub fn density(x: f64, p: &StableParams) -> Result<f64> {
    StableDensity::new(*p).density(x)
}

pub fn density_fourier(x: f64, p: &StableParams) -> Result<f64> {
    Ok(StableDensity::new(*p).fourier(x)?.0)
}

/// sin(z)/z, continued analytically through z = 0.
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Mellin transform ∫₀^∞ x^{s−1} f(±x) dx on the strip 0 < Re s < α+1.
pub fn mellin_transform(s: ComplexValue, p: &StableParams, side: Side) -> Result<ComplexValue> {
    let a = p.alpha;
    if !(s.re > 0.0 && s.re < a + 1.0) {
        return Err(Error::Domain(format!(
            "Mellin variable s = {s} outside the strip 0 < Re s < {}",
            a + 1.0
        )));
    }
    let skew = match side {
        Side::Positive => p.p1,
        Side::Negative => p.p2(),
    };
    if skew == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let one_minus = 1.0 - s;
    // (1/απ)Γ(s)Γ((1−s)/α)sin(p(1−s)π) = p·Γ(s)·Γ(1+(1−s)/α)·sinc(p(1−s)π)
    let lg = ln_gamma_complex(s)? + ln_gamma_complex(1.0 + one_minus / a)?;
    let scale = (s - 1.0) * (p.c.ln() / a);
    Ok(skew * (lg + scale).exp() * sinc(skew * PI * one_minus))
}

/// One Chambers–Mallows–Stuck variate.
pub fn sample<R: Rng + ?Sized>(p: &StableParams, rng: &mut R) -> Result<f64> {
    if p.is_asymmetric_cauchy() {
        return Err(Error::Unsupported("sampling α = 1 requires p₁ = ½".into()));
    }
    Ok(sample_unchecked(p, rng))
}

pub(crate) fn sample_unchecked<R: Rng + ?Sized>(p: &StableParams, rng: &mut R) -> f64 {
    let a = p.alpha;
    let theta = p.theta();
    let v = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * (u - 0.5);
        }
    };
    let w = -(1.0 - rng.random::<f64>()).ln();
    let scale = p.scale_factor();
    if a == 1.0 {
        return scale * v.tan();
    }
    let num = (a * v + theta).sin();
    let den = v.cos().powf(1.0 / a);
    let tail = ((v - a * v - theta).cos() / w).powf((1.0 - a) / a);
    scale * num / den * tail
}
