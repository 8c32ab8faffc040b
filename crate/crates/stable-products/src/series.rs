//! Summation of residue series whose terms have the shape
//! `exp(ln_scale + power·ln x)·(a + b·ln x)`.
//!
//! Coefficients are kept in log space so that Γ-ratios beyond k≈170 never
//! overflow, and each term carries an envelope (its magnitude with the
//! oscillatory trigonometric factors replaced by one) that drives truncation.

use serde::Serialize;

/// Outcome of evaluating a series at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude bound of the first omitted term.
    pub trunc_estimate: f64,
    pub converged: bool,
    /// Accumulated floating-point error bound of the partial sum.
    pub roundoff: f64,
}

impl SeriesEval {
    pub fn error_estimate(&self) -> f64 {
        self.trunc_estimate + self.roundoff
    }

    pub(crate) fn exact(value: f64) -> Self {
        Self {
            value,
            terms_used: 1,
            trunc_estimate: 0.0,
            converged: true,
            roundoff: f64::EPSILON * value.abs(),
        }
    }

    pub(crate) fn divided(self, divisor: f64) -> Self {
        Self {
            value: self.value / divisor,
            trunc_estimate: self.trunc_estimate / divisor.abs(),
            roundoff: self.roundoff / divisor.abs(),
            ..self
        }
    }
}

/// Hard cap on the number of terms of any series.
pub(crate) const MAX_TERMS: usize = 400;

const STOP_RATIO: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Convergent,
    /// Divergent expansion summed up to its smallest term.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Term {
    pub ln_scale: f64,
    pub power: f64,
    pub a: f64,
    pub b: f64,
    pub a_env: f64,
    pub b_env: f64,
}

impl Term {
    fn magnitude(&self, lx: f64) -> f64 {
        (self.ln_scale + self.power * lx).exp()
    }

    fn value_env(&self, lx: f64) -> (f64, f64, f64) {
        let m = self.magnitude(lx);
        let value = if self.b == 0.0 {
            m * self.a
        } else {
            m * (self.a + self.b * lx)
        };
        let env = m * (self.a_env + self.b_env * lx.abs());
        let digits = 8.0 + self.ln_scale.abs() + (self.power * lx).abs();
        (value, env, env * f64::EPSILON * digits)
    }

    /// Term of the antiderivative that vanishes at 0 (`above == false`, power > −1)
    /// or at ∞ (`above == true`, power < −1), taken with the sign of ∫ₓ^∞.
    fn integrated(&self, above: bool) -> Term {
        let q = self.power + 1.0;
        let sign = if above { -1.0 } else { 1.0 };
        Term {
            ln_scale: self.ln_scale,
            power: q,
            a: sign * (self.a / q - self.b / (q * q)),
            b: sign * self.b / q,
            a_env: self.a_env / q.abs() + self.b_env / (q * q),
            b_env: self.b_env / q.abs(),
        }
    }
}

/// A precomputed residue series in one variable.
#[derive(Debug, Clone)]
pub(crate) struct Expansion {
    pub terms: Vec<Term>,
    pub mode: Mode,
}

impl Expansion {
    pub fn new(terms: Vec<Term>, mode: Mode) -> Self {
        Self { terms, mode }
    }

    pub fn eval(&self, x: f64) -> SeriesEval {
        debug_assert!(x > 0.0);
        sum_terms(&self.terms, x.ln(), self.mode)
    }

    /// Termwise antiderivative: ∫ₓ^∞ of the expansion when `above`, ∫₀ˣ otherwise.
    pub fn integrated(&self, above: bool) -> Expansion {
        Expansion {
            terms: self.terms.iter().map(|t| t.integrated(above)).collect(),
            mode: self.mode,
        }
    }
}

pub(crate) fn sum_terms(terms: &[Term], lx: f64, mode: Mode) -> SeriesEval {
    match mode {
        Mode::Convergent => sum_convergent(terms, lx),
        Mode::Asymptotic => sum_asymptotic(terms, lx),
    }
}

fn sum_convergent(terms: &[Term], lx: f64) -> SeriesEval {
    let mut sum = 0.0;
    let mut peak = 0.0f64;
    let mut roundoff = 0.0;
    let mut last_env = f64::INFINITY;
    for (i, t) in terms.iter().enumerate() {
        let (value, env, err) = t.value_env(lx);
        if !env.is_finite() {
            return SeriesEval {
                value: sum,
                terms_used: i.max(1),
                trunc_estimate: f64::INFINITY,
                converged: false,
                roundoff: f64::INFINITY,
            };
        }
        sum += value;
        roundoff += err;
        peak = peak.max(env);
        last_env = env;
        if env <= STOP_RATIO * sum.abs().max(peak) || env < f64::MIN_POSITIVE {
            return SeriesEval {
                value: sum,
                terms_used: i + 1,
                trunc_estimate: env,
                converged: true,
                roundoff,
            };
        }
    }
    SeriesEval {
        value: sum,
        terms_used: terms.len().max(1),
        trunc_estimate: last_env,
        converged: false,
        roundoff,
    }
}

fn sum_asymptotic(terms: &[Term], lx: f64) -> SeriesEval {
    let mut best = (0usize, f64::INFINITY);
    let mut envs = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let (_, env, _) = t.value_env(lx);
        if !env.is_finite() || env > 1e30 * best.1 {
            break;
        }
        envs.push(env);
        if env < best.1 {
            best = (i, env);
        }
        if env < f64::MIN_POSITIVE {
            break;
        }
    }
    let stop = best.0;
    let mut sum = 0.0;
    let mut roundoff = 0.0;
    for t in &terms[..stop] {
        let (value, _, err) = t.value_env(lx);
        sum += value;
        roundoff += err;
    }
    let trunc = if envs.is_empty() {
        f64::INFINITY
    } else {
        best.1
    };
    SeriesEval {
        value: sum,
        terms_used: stop.max(1),
        trunc_estimate: trunc,
        converged: trunc <= STOP_RATIO * sum.abs() || trunc < f64::MIN_POSITIVE,
        roundoff,
    }
}
