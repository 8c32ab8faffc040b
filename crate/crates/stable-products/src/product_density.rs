//! Density of X₁·X₂ for independent strictly stable X₁, X₂.
//!
//! The Mellin transform of the product density is a ratio of gamma functions
//! whose residues give two series: one from the double poles at s = 1−k
//! (powers x^{k−1} with a log x companion) and one from the poles at
//! s = 1+α_j·k (powers x^{−α_j k−1}). Which of the two converges depends on the
//! sign of α₁+α₂−2α₁α₂; the other is an asymptotic expansion.
//!
//! When α₁k₁ = α₂k₂ for some integers the two right-hand pole families collide
//! and the collision is summed as a single double-pole residue.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::series::{Expansion, Mode, SeriesEval, Term, MAX_TERMS};
use crate::special_functions::{
    cos_pi, digamma, digamma_reflection_difference, ln_gamma, ln_gamma_signed, sin_pi,
};
use crate::stable_core::{integrate_log_scale, mellin_transform, Side, StableParams};
use crate::{DensityEval, Method};

const ACCEPT_ABS: f64 = 1e-14;
const ACCEPT_REL: f64 = 1e-12;

/// Relative distance below which α₁k₁ and α₂k₂ are treated as one pole.
const COINCIDENCE: f64 = 1e-9;

const PI2: f64 = PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// α₁+α₂ < 2α₁α₂: the series in x^{k−1} converges.
    Left,
    /// α₁+α₂ > 2α₁α₂: the series in x^{−αk−1} converges.
    Right,
    Boundary,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Left => "Left",
            Region::Right => "Right",
            Region::Boundary => "Boundary",
        }
    }
}

/// Region of the stability indices. α = 1 is treated as a boundary case.
pub fn classify_alphas(a1: f64, a2: f64) -> Region {
    let d = a1 + a2 - 2.0 * a1 * a2;
    if a1 == 1.0 || a2 == 1.0 || d.abs() <= 1e-12 {
        Region::Boundary
    } else if d < 0.0 {
        Region::Left
    } else {
        Region::Right
    }
}

pub fn classify_region(pp: &ProductParams) -> Region {
    classify_alphas(pp.first.alpha(), pp.second.alpha())
}

/// Parameters of the two factors: (α₁, p₁, c₁) and (α₂, q₁, c₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductParams {
    first: StableParams,
    second: StableParams,
}

impl ProductParams {
    pub fn new(first: StableParams, second: StableParams) -> Result<Self> {
        if first.p1() == 0.0 || second.p1() == 0.0 {
            return Err(Error::InvalidParameter(
                "asymmetry parameters p₁ and q₁ must be non-zero".into(),
            ));
        }
        Ok(Self { first, second })
    }

    /// Unit-scale factors (α₁, p₁) and (α₂, q₁).
    pub fn unit(a1: f64, a2: f64, p1: f64, q1: f64) -> Result<Self> {
        Self::new(StableParams::unit(a1, p1)?, StableParams::unit(a2, q1)?)
    }

    pub fn with_scales(a1: f64, a2: f64, p1: f64, q1: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(
            StableParams::new(a1, p1, c1)?,
            StableParams::new(a2, q1, c2)?,
        )
    }

    pub fn first(&self) -> &StableParams {
        &self.first
    }

    pub fn second(&self) -> &StableParams {
        &self.second
    }

    pub fn region(&self) -> Region {
        classify_region(self)
    }

    /// Factors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            first: self.second,
            second: self.first,
        }
    }

    /// Both asymmetries reflected: (p₂, q₂). The product law is unchanged.
    pub fn reflected(&self) -> Self {
        Self {
            first: self.first.reflected(),
            second: self.second.reflected(),
        }
    }

    /// Second factor reflected: the law of −X₁X₂.
    pub fn mirrored(&self) -> Self {
        Self {
            first: self.first,
            second: self.second.reflected(),
        }
    }

    /// P(X₁X₂ > 0) = p₁q₁ + p₂q₂.
    pub fn positive_mass(&self) -> f64 {
        self.first.p1() * self.second.p1() + self.first.p2() * self.second.p2()
    }

    /// c₁^{1/α₁}·c₂^{1/α₂}.
    pub fn scale_factor(&self) -> f64 {
        self.first.scale_factor() * self.second.scale_factor()
    }

    pub fn unit_scale(&self) -> Self {
        Self {
            first: self
                .first
                .with_scale(1.0)
                .expect("unit scale is admissible"),
            second: self
                .second
                .with_scale(1.0)
                .expect("unit scale is admissible"),
        }
    }

    fn key(&self) -> [f64; 6] {
        [
            self.first.alpha(),
            self.first.p1(),
            self.first.c(),
            self.second.alpha(),
            self.second.p1(),
            self.second.c(),
        ]
    }

    /// Representative of the parametrizations describing the same product law.
    fn canonical(&self) -> Self {
        [
            *self,
            self.swapped(),
            self.reflected(),
            self.reflected().swapped(),
        ]
        .into_iter()
        .min_by(|a, b| {
            a.key()
                .iter()
                .zip(b.key().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap()
    }
}

/// The auxiliary functions of the residue series at a given log|x|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub p1: f64,
    pub q1: f64,
    pub ln_abs_x: f64,
}

impl AuxCoefficients {
    /// ξ(k) = 2ψ(k) − ψ(k/α₁)/α₁ − ψ(k/α₂)/α₂ − log|x|.
    pub fn xi(&self, k: usize) -> f64 {
        let k = k as f64;
        let (a1, a2) = (self.alpha1, self.alpha2);
        2.0 * psi(k) - psi(k / a1) / a1 - psi(k / a2) / a2 - self.ln_abs_x
    }

    /// ξ̃(k) = ξ(k) + (p₁−p₂)(ψ(p₁k) − ψ(1−p₁k)) for identical factors (α = α₁).
    ///
    /// Infinite when p₁k is an integer; the series uses sin²(p₁kπ)·ξ̃(k),
    /// which stays finite.
    pub fn xi_tilde(&self, k: usize) -> f64 {
        let kf = k as f64;
        let a = self.alpha1;
        let base = 2.0 * psi(kf) - 2.0 / a * psi(kf / a) - self.ln_abs_x;
        let z = self.p1 * kf;
        base + (2.0 * self.p1 - 1.0) * digamma_reflection_difference(z)
    }

    /// ζ(k) = (2/α)ψ(k+1) − 2ψ(αk+1) + log|x| with α = α₁.
    pub fn zeta(&self, k: usize) -> f64 {
        let k = k as f64;
        let a = self.alpha1;
        2.0 / a * psi(k + 1.0) - 2.0 * psi(a * k + 1.0) + self.ln_abs_x
    }

    /// ζ̃(k, p) = ½ζ(k) + p(ψ(αpk) − ψ(1−αpk)).
    pub fn zeta_tilde(&self, k: usize, p: f64) -> f64 {
        let z = self.alpha1 * p * k as f64;
        0.5 * self.zeta(k) + p * digamma_reflection_difference(z)
    }

    /// φ(k; α, p₁, q₁) = cos(α(p₁−q₁)kπ) − cos(αkπ)·cos(α(p₁−q₂)kπ).
    pub fn phi_coef(&self, k: usize, alpha: f64) -> f64 {
        let k = k as f64;
        let q2 = 1.0 - self.q1;
        cos_pi(alpha * (self.p1 - self.q1) * k)
            - cos_pi(alpha * k) * cos_pi(alpha * (self.p1 - q2) * k)
    }
}

fn psi(x: f64) -> f64 {
    digamma(x).expect("digamma argument is positive")
}

fn lgamma(x: f64) -> f64 {
    ln_gamma(x).expect("gamma argument is positive")
}

fn ln_factorial(k: usize) -> f64 {
    lgamma(k as f64 + 1.0)
}

/// Series in x^{k−1}: the full density (two asymmetry pairs combined).
fn left_terms(a1: f64, a2: f64, p: f64, q: f64) -> Vec<Term> {
    let aux = AuxCoefficients {
        alpha1: a1,
        alpha2: a2,
        p1: p,
        q1: q,
        ln_abs_x: 0.0,
    };
    let p2 = 1.0 - p;
    (1..=MAX_TERMS)
        .map(|k| {
            let kf = k as f64;
            let ss = sin_pi(p * kf) * sin_pi(q * kf);
            let xi0 = aux.xi(k);
            Term {
                ln_scale: lgamma(kf / a1 + 1.0) + lgamma(kf / a2 + 1.0) - 2.0 * ln_factorial(k),
                power: kf - 1.0,
                a: 2.0 / PI2 * ss * xi0
                    + (p2 - q) / PI * sin_pi((p + q) * kf)
                    + (p - q) / PI * sin_pi((p - q) * kf),
                b: -2.0 / PI2 * ss,
                a_env: 2.0 / PI2 * xi0.abs() + ((p2 - q).abs() + (p - q).abs()) / PI,
                b_env: 2.0 / PI2,
            }
        })
        .collect()
}

/// Series in x^{k−1} for the single-pair Mellin–Barnes integral g̃.
fn pair_left_terms(a1: f64, a2: f64, p: f64, q: f64) -> Vec<Term> {
    let aux = AuxCoefficients {
        alpha1: a1,
        alpha2: a2,
        p1: p,
        q1: q,
        ln_abs_x: 0.0,
    };
    (1..=MAX_TERMS)
        .map(|k| {
            let kf = k as f64;
            let ss = sin_pi(p * kf) * sin_pi(q * kf);
            let xi0 = aux.xi(k);
            Term {
                ln_scale: lgamma(kf / a1 + 1.0) + lgamma(kf / a2 + 1.0) - 2.0 * ln_factorial(k),
                power: kf - 1.0,
                a: ss * xi0 / PI2 - (p + q) / (2.0 * PI) * sin_pi((p + q) * kf)
                    + (p - q) / (2.0 * PI) * sin_pi((p - q) * kf),
                b: -ss / PI2,
                a_env: xi0.abs() / PI2 + ((p + q).abs() + (p - q).abs()) / (2.0 * PI),
                b_env: 1.0 / PI2,
            }
        })
        .collect()
}

/// Series in x^{k−1} for identical factors; `negative` evaluates at −|x|.
fn iid_left_terms(a: f64, p: f64, negative: bool) -> Vec<Term> {
    let aux = AuxCoefficients {
        alpha1: a,
        alpha2: a,
        p1: p,
        q1: p,
        ln_abs_x: 0.0,
    };
    let skew = 2.0 * p - 1.0;
    (1..=MAX_TERMS)
        .map(|k| {
            let kf = k as f64;
            let s = sin_pi(p * kf);
            let c = cos_pi(p * kf);
            let xi0 = aux.xi(k);
            // sin²(pkπ)·(ψ(pk) − ψ(1−pk)) = −π·sin(pkπ)·cos(pkπ)
            let sign = if negative && k % 2 == 0 { -1.0 } else { 1.0 };
            Term {
                ln_scale: 2.0 * lgamma(kf / a + 1.0) - 2.0 * ln_factorial(k),
                power: kf - 1.0,
                a: sign * 2.0 / PI2 * (s * s * xi0 - skew * PI * s * c),
                b: -sign * 2.0 / PI2 * s * s,
                a_env: 2.0 / PI2 * (xi0.abs() + PI * skew.abs()),
                b_env: 2.0 / PI2,
            }
        })
        .collect()
}

/// Series in x^{−αk−1} for identical factors with x > 0.
fn iid_right_terms(a: f64, p: f64) -> Vec<Term> {
    let aux = AuxCoefficients {
        alpha1: a,
        alpha2: a,
        p1: p,
        q1: p,
        ln_abs_x: 0.0,
    };
    let max_k = MAX_TERMS;
    (1..=max_k)
        .map(|k| {
            let kf = k as f64;
            let half_zeta = 0.5 * aux.zeta(k);
            let mut av = 0.0;
            let mut bv = 0.0;
            for skew in [p, 1.0 - p] {
                let s = sin_pi(a * skew * kf);
                let c = cos_pi(a * skew * kf);
                // sin²·(ψ(αpk) − ψ(1−αpk)) = −π·sin·cos
                av += 2.0 / PI2 * (s * s * half_zeta - skew * PI * s * c);
                bv += s * s / PI2;
            }
            Term {
                ln_scale: 2.0 * lgamma(a * kf + 1.0) - 2.0 * ln_factorial(k),
                power: -a * kf - 1.0,
                a: av,
                b: bv,
                a_env: 4.0 / PI2 * (half_zeta.abs() + PI),
                b_env: 2.0 / PI2,
            }
        })
        .collect()
}

/// Series in x^{−αk−1} for α₁ = α₂ = α, summed over asymmetry pairs.
fn equal_alpha_terms(a: f64, pairs: &[(f64, f64)]) -> Vec<Term> {
    let aux = AuxCoefficients {
        alpha1: a,
        alpha2: a,
        p1: 0.5,
        q1: 0.5,
        ln_abs_x: 0.0,
    };
    let n = pairs.len() as f64;
    (1..=MAX_TERMS)
        .map(|k| {
            let kf = k as f64;
            let zeta0 = aux.zeta(k);
            let mut av = 0.0;
            let mut bv = 0.0;
            let mut trig_env = 0.0;
            for &(p, q) in pairs {
                let ss = sin_pi(a * p * kf) * sin_pi(a * q * kf);
                av += ss * zeta0 / PI2
                    - ((p + q) * sin_pi(a * (p + q) * kf) - (p - q) * sin_pi(a * (p - q) * kf))
                        / (2.0 * PI);
                bv += ss / PI2;
                trig_env += ((p + q).abs() + (p - q).abs()) / (2.0 * PI);
            }
            Term {
                ln_scale: 2.0 * lgamma(a * kf + 1.0) - 2.0 * ln_factorial(k),
                power: -a * kf - 1.0,
                a: av,
                b: bv,
                a_env: n * zeta0.abs() / PI2 + trig_env,
                b_env: n / PI2,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Pole {
    /// k-th pole of Γ((1−s)/α_j), j ∈ {0, 1}.
    Simple { family: usize, k: usize },
    /// α₁k₁ = α₂k₂.
    Double { k1: usize, k2: usize },
}

/// Poles s = 1+m of Γ((1−s)/α₁)Γ((1−s)/α₂), ordered by m.
fn right_poles(a1: f64, a2: f64) -> Vec<(f64, Pole)> {
    let m_max = MAX_TERMS as f64 * a1.min(a2) * (1.0 + 1e-12);
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (family, a) in [(0, a1), (1, a2)] {
        let mut k = 1;
        while a * k as f64 <= m_max {
            all.push((a * k as f64, family, k));
            k += 1;
        }
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::with_capacity(all.len());
    let mut i = 0;
    while i < all.len() {
        let (m, family, k) = all[i];
        if i + 1 < all.len() {
            let (m2, family2, k2) = all[i + 1];
            if family2 != family && (m2 - m).abs() <= COINCIDENCE * m {
                let (k1, k2) = if family == 0 { (k, k2) } else { (k2, k) };
                out.push((a1 * k1 as f64, Pole::Double { k1, k2 }));
                i += 2;
                continue;
            }
        }
        out.push((m, Pole::Simple { family, k }));
        i += 1;
    }
    out
}

/// Series in x^{−m−1} from the right-hand poles for α₁ ≠ α₂.
fn right_terms(a1: f64, a2: f64, pairs: &[(f64, f64)]) -> Vec<Term> {
    let n = pairs.len() as f64;
    let alphas = [a1, a2];
    right_poles(a1, a2)
        .into_iter()
        .map(|(m, pole)| match pole {
            Pole::Simple { family, k } => {
                let big = alphas[family];
                let other = alphas[1 - family];
                let kf = k as f64;
                let (lg, sg) = ln_gamma_signed(-m / other).expect("coincident poles are merged");
                let phi: f64 = pairs
                    .iter()
                    .map(|&(p, q)| sin_pi(big * p * kf) * sin_pi(big * q * kf))
                    .sum();
                let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
                Term {
                    ln_scale: 2.0 * lgamma(1.0 + m) - ln_factorial(k) + lg
                        - other.ln()
                        - 2.0 * PI.ln(),
                    power: -m - 1.0,
                    a: parity * sg * phi,
                    b: 0.0,
                    a_env: n,
                    b_env: 0.0,
                }
            }
            Pole::Double { k1, k2 } => {
                let mut ss = 0.0;
                let mut sd = 0.0;
                let mut trig_env = 0.0;
                for &(p, q) in pairs {
                    let (sp, cp) = (sin_pi(p * m), cos_pi(p * m));
                    let (sq, cq) = (sin_pi(q * m), cos_pi(q * m));
                    ss += sp * sq;
                    sd += p * cp * sq + q * sp * cq;
                    trig_env += p.abs() + q.abs();
                }
                let parity = if (k1 + k2) % 2 == 0 { 1.0 } else { -1.0 };
                let psi_part =
                    2.0 * psi(1.0 + m) - psi(k2 as f64 + 1.0) / a2 - psi(k1 as f64 + 1.0) / a1;
                Term {
                    ln_scale: 2.0 * lgamma(1.0 + m)
                        - ln_factorial(k1)
                        - ln_factorial(k2)
                        - 2.0 * PI.ln(),
                    power: -m - 1.0,
                    a: -parity * (psi_part * ss + PI * sd),
                    b: parity * ss,
                    a_env: n * psi_part.abs() + PI * trig_env,
                    b_env: n,
                }
            }
        })
        .collect()
}

/// Right-hand residue series for any pair set, choosing the equal-α form when α₁ = α₂.
fn right_form_terms(a1: f64, a2: f64, pairs: &[(f64, f64)]) -> Vec<Term> {
    if a1 == a2 {
        equal_alpha_terms(a1, pairs)
    } else {
        right_terms(a1, a2, pairs)
    }
}

/// Residue expansions and Mellin kernel for one half-line of a product law
/// at unit scale.
#[derive(Debug, Clone)]
struct HalfLine {
    a1: f64,
    a2: f64,
    pairs: Vec<(f64, f64)>,
    left: Expansion,
    right: Expansion,
    region: Region,
}

impl HalfLine {
    fn new(a1: f64, a2: f64, pairs: Vec<(f64, f64)>, left: Vec<Term>, right: Vec<Term>) -> Self {
        let region = classify_alphas(a1, a2);
        let (lm, rm) = match region {
            Region::Right => (Mode::Asymptotic, Mode::Convergent),
            _ => (Mode::Convergent, Mode::Asymptotic),
        };
        Self {
            a1,
            a2,
            pairs,
            left: Expansion::new(left, lm),
            right: Expansion::new(right, rm),
            region,
        }
    }

    /// Full density g(x) for x > 0 with asymmetries (p, q).
    fn density(a1: f64, a2: f64, p: f64, q: f64) -> Self {
        let pairs = vec![(p, q), (1.0 - p, 1.0 - q)];
        let right = right_form_terms(a1, a2, &pairs);
        Self::new(a1, a2, pairs, left_terms(a1, a2, p, q), right)
    }

    /// Density of the product of two copies of (α, p) on one half-line.
    fn iid(a: f64, p: f64, negative: bool) -> Self {
        let left = iid_left_terms(a, p, negative);
        if negative {
            let pairs = vec![(p, 1.0 - p), (1.0 - p, p)];
            let right = equal_alpha_terms(a, &pairs);
            Self::new(a, a, pairs, left, right)
        } else {
            let pairs = vec![(p, p), (1.0 - p, 1.0 - p)];
            Self::new(a, a, pairs, left, iid_right_terms(a, p))
        }
    }

    /// The single-pair integral g̃.
    fn tilde(a1: f64, a2: f64, p: f64, q: f64) -> Self {
        let pairs = vec![(p, q)];
        let right = right_form_terms(a1, a2, &pairs);
        Self::new(a1, a2, pairs, pair_left_terms(a1, a2, p, q), right)
    }

    fn primary(&self, y: f64) -> SeriesEval {
        match self.region {
            Region::Right => self.right.eval(y),
            _ => self.left.eval(y),
        }
    }

    fn secondary(&self, y: f64) -> SeriesEval {
        match self.region {
            Region::Right => self.left.eval(y),
            _ => self.right.eval(y),
        }
    }

    /// Every pair has a one-sided factor pointing away from this half-line.
    fn is_null(&self) -> bool {
        self.pairs.iter().all(|&(p, q)| p == 0.0 || q == 0.0)
    }

    fn eval(&self, y: f64) -> Result<DensityEval> {
        self.eval_tol(y, ACCEPT_ABS, ACCEPT_REL)
    }

    /// Value for integration, where a looser series acceptance avoids the
    /// Mellin–Barnes fallback.
    fn eval_loose(&self, y: f64) -> Result<f64> {
        Ok(self.eval_tol(y, 1e-13, 1e-9)?.value)
    }

    fn eval_tol(&self, y: f64, abs: f64, rel: f64) -> Result<DensityEval> {
        if self.is_null() {
            return Ok(DensityEval {
                value: 0.0,
                method: Method::Series,
                error_estimate: 0.0,
            });
        }
        let first = self.primary(y);
        let second = self.secondary(y);
        let pick = [(first, true), (second, false)]
            .into_iter()
            .filter(|(e, _)| e.error_estimate() <= abs + rel * e.value.abs())
            .min_by(|a, b| a.0.error_estimate().total_cmp(&b.0.error_estimate()));
        if let Some((e, is_primary)) = pick {
            let method = if is_primary {
                Method::Series
            } else {
                Method::Asymptotic
            };
            return Ok(DensityEval {
                value: e.value,
                method,
                error_estimate: e.error_estimate(),
            });
        }
        let (value, err) = mellin_barnes(y, self.a1, self.a2, &self.pairs)?;
        Ok(DensityEval {
            value,
            method: Method::Contour,
            error_estimate: err,
        })
    }

    /// ∫_y^∞ of this half-line density (y ≥ 0).
    fn mass_above(&self, y: f64) -> Result<f64> {
        if self.is_null() {
            return Ok(0.0);
        }
        let tail = self.right.integrated(true);
        let mut cut = y.max(1.0);
        let tail_value = loop {
            let e = tail.eval(cut);
            if e.error_estimate() <= 1e-15 {
                break e.value;
            }
            cut *= 2.0;
            if cut > 1e12 {
                return Err(Error::Accuracy(
                    "tail expansion did not reach the requested accuracy".into(),
                ));
            }
        };
        let body = integrate_log_scale(|t| self.eval_loose(t), y, cut.max(y))?;
        Ok(body + tail_value)
    }

    /// ∫₀^y of this half-line density.
    fn mass_below(&self, y: f64) -> Result<f64> {
        integrate_log_scale(|t| self.eval_loose(t), 0.0, y)
    }
}

/// Σ over pairs of F₁(s; p)·F₂(s; q) at unit scales.
pub(crate) fn mellin_kernel(
    s: Complex64,
    a1: f64,
    a2: f64,
    pairs: &[(f64, f64)],
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for &(p, q) in pairs {
        let f1 = mellin_transform(s, &StableParams::unit(a1, p)?, Side::Positive)?;
        let f2 = mellin_transform(s, &StableParams::unit(a2, q)?, Side::Positive)?;
        total += f1 * f2;
    }
    Ok(total)
}

/// Decay rate of the Mellin kernel along vertical lines.
pub(crate) fn kernel_decay(a1: f64, a2: f64, pairs: &[(f64, f64)]) -> f64 {
    let widest = pairs.iter().map(|&(p, q)| p + q).fold(0.0, f64::max);
    PI * (1.0 + 0.5 / a1 + 0.5 / a2 - widest)
}

/// Inverse Mellin transform along Re s = a by adaptive quadrature in Im s.
fn mellin_barnes(y: f64, a1: f64, a2: f64, pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    let width = 1.0 + a1.min(a2);
    let a = if y <= 1.0 { 0.25 * width } else { 0.75 * width };
    let kappa = kernel_decay(a1, a2, pairs);
    if kappa <= 1e-3 {
        return Err(Error::Unsupported(
            "Mellin kernel does not decay along vertical lines".into(),
        ));
    }
    let ly = y.ln();
    let t_max = 50.0 / kappa + 20.0;
    let step = if ly.abs() > 0.5 {
        (PI / ly.abs()).min(1.0)
    } else {
        1.0
    };
    let pts = quadrature::breakpoints(0.0, t_max, step);
    let r = quadrature::integrate(
        |t| {
            let s = Complex64::new(a, t);
            let k = mellin_kernel(s, a1, a2, pairs)?;
            Ok(((-s * ly).exp() * k).re)
        },
        &pts,
        Tolerance::new(1e-15, 1e-13),
    )?;
    if !r.converged && r.error > 1e-11 {
        return Err(Error::Quadrature {
            estimate: r.error / PI,
        });
    }
    Ok((r.value / PI, r.error / PI))
}

/// Product density with cached coefficient tables for both half-lines.
#[derive(Debug, Clone)]
pub struct ProductDensity {
    params: ProductParams,
    scale: f64,
    halves: [HalfLine; 2],
}

impl ProductDensity {
    pub fn new(pp: ProductParams) -> Result<Self> {
        let region = pp.region();
        if region == Region::Boundary {
            return Err(Error::BoundaryRegion {
                alpha1: pp.first.alpha(),
                alpha2: pp.second.alpha(),
            });
        }
        let unit = pp.unit_scale();
        let half = |q: ProductParams| {
            let c = q.canonical();
            HalfLine::density(
                c.first.alpha(),
                c.second.alpha(),
                c.first.p1(),
                c.second.p1(),
            )
        };
        Ok(Self {
            params: pp,
            scale: pp.scale_factor(),
            halves: [half(unit), half(unit.mirrored())],
        })
    }

    /// Identical factors (α, p₁), using the dedicated identical-factor series.
    pub fn iid(alpha: f64, p1: f64) -> Result<Self> {
        let pp = ProductParams::unit(alpha, alpha, p1, p1)?;
        if pp.region() == Region::Boundary {
            return Err(Error::BoundaryRegion {
                alpha1: alpha,
                alpha2: alpha,
            });
        }
        let p1 = pp.first.p1();
        Ok(Self {
            params: pp,
            scale: 1.0,
            halves: [
                HalfLine::iid(alpha, p1, false),
                HalfLine::iid(alpha, p1, true),
            ],
        })
    }

    pub fn params(&self) -> &ProductParams {
        &self.params
    }

    pub fn region(&self) -> Region {
        self.params.region()
    }

    fn reduce(&self, x: f64) -> Result<(f64, usize)> {
        if x == 0.0 {
            return Err(Error::Origin);
        }
        if x.is_nan() {
            return Err(Error::Domain("product density of NaN".into()));
        }
        let y = x / self.scale;
        Ok(if y > 0.0 { (y, 0) } else { (-y, 1) })
    }

    pub fn eval(&self, x: f64) -> Result<DensityEval> {
        let (y, side) = self.reduce(x)?;
        if y.is_infinite() {
            return Ok(DensityEval {
                value: 0.0,
                method: Method::Asymptotic,
                error_estimate: 0.0,
            });
        }
        let e = self.halves[side].eval(y)?;
        Ok(DensityEval {
            value: e.value / self.scale,
            error_estimate: e.error_estimate / self.scale,
            ..e
        })
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }

    /// Series in x^{k−1} (convergent in the Left region, asymptotic as x→0 otherwise).
    pub fn left_form(&self, x: f64) -> Result<SeriesEval> {
        let (y, side) = self.reduce(x)?;
        Ok(self.halves[side].left.eval(y).divided(self.scale))
    }

    /// Series in x^{−αk−1} (convergent in the Right region, asymptotic as x→∞ otherwise).
    pub fn right_form(&self, x: f64) -> Result<SeriesEval> {
        let (y, side) = self.reduce(x)?;
        Ok(self.halves[side].right.eval(y).divided(self.scale))
    }

    /// Tabulated CDF for fast repeated evaluation (KS statistics).
    pub fn cdf_table(&self) -> Result<CdfTable> {
        CdfTable::build(self)
    }

    /// ∫₀^∞ g over one half-line by quadrature and termwise tail integration.
    pub fn half_line_mass(&self, side: Side) -> Result<f64> {
        let i = if side == Side::Positive { 0 } else { 1 };
        self.halves[i].mass_above(0.0)
    }

    /// P(X ≤ x), anchored at P(X > 0) = p₁q₁ + p₂q₂.
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
        let positive = self.params.positive_mass();
        if x == 0.0 {
            return Ok(1.0 - positive);
        }
        let y = x.abs() / self.scale;
        Ok(if x > 0.0 {
            if y <= 1.0 {
                1.0 - positive + self.halves[0].mass_below(y)?
            } else {
                1.0 - self.halves[0].mass_above(y)?
            }
        } else if y <= 1.0 {
            1.0 - positive - self.halves[1].mass_below(y)?
        } else {
            self.halves[1].mass_above(y)?
        })
    }
}

/// Product CDF tabulated on a log-spaced grid of |x| with cubic Hermite
/// interpolation in ln|x|, for evaluation at many points.
#[derive(Debug, Clone)]
pub struct CdfTable {
    scale: f64,
    at_zero: f64,
    side_mass: [f64; 2],
    u0: f64,
    h: f64,
    decay: f64,
    /// Mass beyond eᵘ on each half-line and its derivative in u.
    nodes: [Vec<(f64, f64)>; 2],
}

const TABLE_STEP: f64 = 1.0 / 16.0;
const TABLE_U0: f64 = -25.0;

impl CdfTable {
    fn build(d: &ProductDensity) -> Result<Self> {
        let a_min = d.params.first.alpha().min(d.params.second.alpha());
        let n = ((25.0 / a_min + 5.0 - TABLE_U0) / TABLE_STEP).ceil() as usize;
        let u = |j: usize| TABLE_U0 + j as f64 * TABLE_STEP;
        let positive = d.params.positive_mass();
        let mut nodes: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
        for (i, half) in d.halves.iter().enumerate() {
            let flux: Vec<(f64, f64)> = (0..=n)
                .into_par_iter()
                .map(|j| {
                    let y = u(j).exp();
                    let slope = half.eval_loose(y)? * y;
                    if j == n {
                        return Ok((half.mass_above(y)?, slope));
                    }
                    let r = quadrature::integrate(
                        |t| Ok(half.eval_loose(t.exp())? * t.exp()),
                        &[u(j), u(j + 1)],
                        Tolerance::new(1e-16, 1e-12),
                    )?;
                    Ok((r.value, slope))
                })
                .collect::<Result<_>>()?;
            let mut tail = flux[n].0;
            let mut side = vec![(0.0, 0.0); n + 1];
            for j in (0..=n).rev() {
                if j < n {
                    tail += flux[j].0;
                }
                side[j] = (tail, -flux[j].1);
            }
            nodes[i] = side;
        }
        Ok(Self {
            scale: d.scale,
            at_zero: 1.0 - positive,
            side_mass: [positive, 1.0 - positive],
            u0: TABLE_U0,
            h: TABLE_STEP,
            decay: a_min,
            nodes,
        })
    }

    fn mass_beyond(&self, y: f64, side: usize) -> f64 {
        let nodes = &self.nodes[side];
        let last = nodes.len() - 1;
        let y0 = self.u0.exp();
        if y <= y0 {
            let total = self.side_mass[side];
            return total - (total - nodes[0].0) * y / y0;
        }
        let t = (y.ln() - self.u0) / self.h;
        if t >= last as f64 {
            return nodes[last].0 * (-self.decay * (t - last as f64) * self.h).exp();
        }
        let j = t.floor() as usize;
        let s = t - j as f64;
        let ((g0, d0), (g1, d1)) = (nodes[j], nodes[j + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * g0
            + (s3 - 2.0 * s2 + s) * self.h * d0
            + (-2.0 * s3 + 3.0 * s2) * g1
            + (s3 - s2) * self.h * d1
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == 0.0 {
            return self.at_zero;
        }
        let y = x.abs() / self.scale;
        if x > 0.0 {
            1.0 - self.mass_beyond(y, 0)
        } else {
            self.mass_beyond(y, 1)
        }
    }
}

/// Density of X₁·X₂ at x ≠ 0.
pub fn product_density(x: f64, pp: &ProductParams) -> Result<f64> {
    ProductDensity::new(*pp)?.density(x)
}

/// Density of the product of two independent copies of (α, p₁) at unit scale.
pub fn product_density_iid(x: f64, alpha: f64, p1: f64) -> Result<f64> {
    ProductDensity::iid(alpha, p1)?.density(x)
}

pub fn product_cdf(x: f64, pp: &ProductParams) -> Result<f64> {
    ProductDensity::new(*pp)?.cdf(x)
}

fn check_tilde(a1: f64, a2: f64, p1: f64, q1: f64) -> Result<Region> {
    ProductParams::unit(a1, a2, p1, q1)?;
    Ok(classify_alphas(a1, a2))
}

/// g̃(x) from the series in x^{k−1}; requires the Left region.
pub fn g_tilde_left(x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<SeriesEval> {
    let region = check_tilde(a1, a2, p1, q1)?;
    if region != Region::Left {
        return Err(region_error(region, "Left", a1, a2));
    }
    positive_arg(x)?;
    Ok(HalfLine::tilde(a1, a2, p1, q1).left.eval(x))
}

/// g̃(x) from the series in x^{−αk−1}; requires the Right region.
pub fn g_tilde_right(x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<SeriesEval> {
    let region = check_tilde(a1, a2, p1, q1)?;
    if region != Region::Right {
        return Err(region_error(region, "Right", a1, a2));
    }
    positive_arg(x)?;
    Ok(HalfLine::tilde(a1, a2, p1, q1).right.eval(x))
}

fn positive_arg(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("g̃ requires finite x > 0, got {x}")))
    }
}

fn region_error(region: Region, expected: &'static str, a1: f64, a2: f64) -> Error {
    match region {
        Region::Boundary => Error::BoundaryRegion {
            alpha1: a1,
            alpha2: a2,
        },
        other => Error::WrongRegion {
            expected,
            actual: other.name(),
        },
    }
}

/// Evaluator for g̃ choosing between both residue series and the Mellin–Barnes integral.
#[derive(Debug, Clone)]
pub struct GTilde {
    half: HalfLine,
}

impl GTilde {
    pub fn new(a1: f64, a2: f64, p1: f64, q1: f64) -> Result<Self> {
        let region = check_tilde(a1, a2, p1, q1)?;
        if region == Region::Boundary {
            return Err(Error::BoundaryRegion {
                alpha1: a1,
                alpha2: a2,
            });
        }
        Ok(Self {
            half: HalfLine::tilde(a1, a2, p1, q1),
        })
    }

    pub fn eval(&self, x: f64) -> Result<DensityEval> {
        positive_arg(x)?;
        self.half.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::bessel_k0;

    fn pd(a1: f64, a2: f64, p: f64, q: f64) -> ProductDensity {
        ProductDensity::new(ProductParams::unit(a1, a2, p, q).unwrap()).unwrap()
    }

    /// Independent check: direct trapezoid inverse Mellin on Re s = a.
    fn contour(x: f64, a1: f64, a2: f64, pairs: &[(f64, f64)]) -> f64 {
        let a = 0.5;
        let h = 0.01;
        let mut sum = 0.0;
        for j in 0..12000 {
            let t = j as f64 * h;
            let s = Complex64::new(a, t);
            let v = ((-s * x.ln()).exp() * mellin_kernel(s, a1, a2, pairs).unwrap()).re;
            sum += if j == 0 { 0.5 * v } else { v };
        }
        sum * h / PI
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_alphas(1.5, 1.5), Region::Left);
        assert_eq!(classify_alphas(0.5, 0.5), Region::Right);
        assert_eq!(classify_alphas(1.0, 1.0), Region::Boundary);
        assert_eq!(classify_alphas(0.75, 1.5), Region::Boundary);
        assert_eq!(classify_alphas(0.8, 1.9), Region::Left);
        assert_eq!(classify_alphas(0.75, 1.2), Region::Right);
        assert_eq!(classify_alphas(1.0, 1.7), Region::Boundary);
    }

    #[test]
    fn gaussian_product_is_bessel() {
        let d = pd(2.0, 2.0, 0.5, 0.5);
        for &x in &[0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 15.0] {
            let want = bessel_k0(x / 2.0).unwrap() / (2.0 * PI);
            let got = d.density(x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-11,
                "x={x} got={got} want={want}"
            );
            assert_eq!(d.density(-x).unwrap(), got);
        }
        // K₀(½)/(2π) at x = 1
        assert!((d.density(1.0).unwrap() - 0.147_125_864_674_301_9).abs() < 1e-13);
    }

    #[test]
    fn iid_gaussian_matches_closed_form() {
        let want = bessel_k0(0.25).unwrap() / (2.0 * PI);
        assert!((product_density_iid(0.5, 2.0, 0.5).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn left_series_matches_contour() {
        for &(a1, a2, p, q, x) in &[(1.6, 1.4, 0.55, 0.5, 0.8), (1.8, 1.5, 0.55, 0.5, 2.0)] {
            let e = g_tilde_left(x, a1, a2, p, q).unwrap();
            let c = contour(x, a1, a2, &[(p, q)]);
            assert!((e.value - c).abs() < 1e-10, "{} vs {c}", e.value);
            let full = pd(a1, a2, p, q).density(x).unwrap();
            let c = contour(x, a1, a2, &[(p, q), (1.0 - p, 1.0 - q)]);
            assert!((full - c).abs() < 1e-10);
        }
    }

    #[test]
    fn right_series_matches_contour() {
        for &(a1, a2, p, q, x) in &[
            (0.4, 0.7, 0.8, 0.9, 1.5),
            (0.5, 0.5, 1.0, 1.0, 2.0),
            (0.75, 1.2, 0.6, 0.5, 0.9),
            (0.7, 0.6, 0.8, 0.7, 0.3),
        ] {
            let e = g_tilde_right(x, a1, a2, p, q).unwrap();
            let c = contour(x, a1, a2, &[(p, q)]);
            assert!((e.value - c).abs() < 1e-10, "{a1} {a2}: {} vs {c}", e.value);
        }
    }

    #[test]
    fn merged_poles_match_contour() {
        // α₁/α₂ rational: 0.6·7 = 0.7·6 and 0.4·7 = 0.7·4
        for &(a1, a2, p, q, x) in &[(0.7, 0.6, 0.8, 0.7, 0.2), (0.4, 0.7, 0.3, 0.6, 0.5)] {
            let poles = right_poles(a1, a2);
            assert!(poles.iter().any(|(_, p)| matches!(p, Pole::Double { .. })));
            let d = pd(a1, a2, p, q);
            let e = d.right_form(x).unwrap();
            let c = contour(x, a1, a2, &[(p, q), (1.0 - p, 1.0 - q)]);
            assert!((e.value - c).abs() < 1e-10, "{} vs {c}", e.value);
        }
    }

    #[test]
    fn merged_pole_formula_reduces_to_equal_alpha_form() {
        let pairs = [(0.6, 0.7), (0.4, 0.3)];
        let merged = Expansion::new(
            right_terms(0.7, 0.7 * (1.0 + 1e-13), &pairs),
            Mode::Convergent,
        );
        let direct = Expansion::new(equal_alpha_terms(0.7, &pairs), Mode::Convergent);
        for &x in &[0.3, 1.0, 4.0] {
            let (m, d) = (merged.eval(x).value, direct.eval(x).value);
            assert!(
                (m - d).abs() < 1e-11 * d.abs().max(1e-3),
                "x={x}: {m} vs {d}"
            );
        }
    }

    #[test]
    fn pair_sums_reproduce_full_density() {
        for &(a1, a2, p, q) in &[
            (1.6, 1.4, 0.55, 0.5),
            (1.9, 1.3, 0.48, 0.7),
            (0.8, 1.9, 0.9, 0.5),
        ] {
            let g = Expansion::new(left_terms(a1, a2, p, q), Mode::Convergent);
            let t1 = Expansion::new(pair_left_terms(a1, a2, p, q), Mode::Convergent);
            let t2 = Expansion::new(pair_left_terms(a1, a2, 1.0 - p, 1.0 - q), Mode::Convergent);
            for &x in &[0.2, 0.9, 1.7] {
                let lhs = t1.eval(x).value + t2.eval(x).value;
                assert!((lhs - g.eval(x).value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn iid_series_agree_with_general_series() {
        for &(a, p) in &[(1.5, 0.6), (1.8, 0.5), (1.3, 0.25)] {
            let general = pd(a, a, p, p);
            let iid = ProductDensity::iid(a, p).unwrap();
            for &x in &[-2.0, -0.4, 0.3, 1.0, 3.0] {
                let (g, i) = (general.left_form(x).unwrap(), iid.left_form(x).unwrap());
                assert!((g.value - i.value).abs() < 1e-13, "a={a} p={p} x={x}");
            }
        }
        for &(a, p) in &[(0.6, 0.8), (0.5, 1.0), (0.9, 0.3)] {
            let general = pd(a, a, p, p);
            let iid = ProductDensity::iid(a, p).unwrap();
            for &x in &[-2.0, 0.5, 1.0, 3.0] {
                let (g, i) = (general.right_form(x).unwrap(), iid.right_form(x).unwrap());
                assert!((g.value - i.value).abs() < 1e-13, "a={a} p={p} x={x}");
            }
        }
    }

    #[test]
    fn aux_coefficients_match_definitions() {
        let aux = AuxCoefficients {
            alpha1: 1.5,
            alpha2: 1.5,
            p1: 0.6,
            q1: 0.55,
            ln_abs_x: 0.3,
        };
        let k = 3;
        let xi = 2.0 * psi(3.0) - 2.0 / 1.5 * psi(2.0) - 0.3;
        assert!((aux.xi(k) - xi).abs() < 1e-14);
        let tilde = xi + 0.2 * (psi(1.8) - psi(1.0 - 1.8));
        assert!((aux.xi_tilde(k) - tilde).abs() < 1e-12);
        let zeta = 2.0 / 1.5 * psi(4.0) - 2.0 * psi(5.5) + 0.3;
        assert!((aux.zeta(k) - zeta).abs() < 1e-14);
        let zt = 0.5 * zeta + 0.6 * (psi(2.7) - psi(1.0 - 2.7));
        assert!((aux.zeta_tilde(k, 0.6) - zt).abs() < 1e-12);
        let sum_ss = sin_pi(1.5 * 0.6 * 3.0) * sin_pi(1.5 * 0.55 * 3.0)
            + sin_pi(1.5 * 0.4 * 3.0) * sin_pi(1.5 * 0.45 * 3.0);
        assert!((aux.phi_coef(k, 1.5) - sum_ss).abs() < 1e-14);
    }

    #[test]
    fn symmetric_factor_kills_even_terms() {
        let terms = pair_left_terms(1.5, 1.5, 0.5, 0.5);
        for (i, t) in terms.iter().enumerate().take(20) {
            if (i + 1) % 2 == 0 {
                assert_eq!(t.b, 0.0);
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ProductDensity::new(ProductParams::unit(1.0, 1.0, 0.5, 0.5).unwrap()),
            Err(Error::BoundaryRegion { .. })
        ));
        assert!(ProductParams::unit(0.5, 0.5, 0.0, 1.0).is_err());
        assert_eq!(pd(1.5, 1.5, 0.5, 0.5).density(0.0), Err(Error::Origin));
        assert!(matches!(
            g_tilde_left(1.0, 0.5, 0.5, 1.0, 1.0),
            Err(Error::WrongRegion { .. })
        ));
        assert!(matches!(
            g_tilde_right(1.0, 1.5, 1.5, 0.5, 0.5),
            Err(Error::WrongRegion { .. })
        ));
    }

    #[test]
    fn right_form_leading_term() {
        // Γ(3/2)²/π²·x^{−3/2}·(4ψ(2) − 2ψ(3/2) + ln x) dominates as x → ∞
        let x: f64 = 1e8;
        let e = g_tilde_right(x, 0.5, 0.5, 1.0, 1.0).unwrap();
        let lead = PI / 4.0 / PI2 * x.powf(-1.5) * (4.0 * psi(2.0) - 2.0 * psi(1.5) + x.ln());
        assert!((e.value / lead - 1.0).abs() < 1e-3, "{}", e.value / lead);
    }

    #[test]
    fn cdf_anchor_and_limits() {
        let d = pd(1.5, 1.3, 0.6, 0.55);
        assert_eq!(d.cdf(0.0).unwrap(), 1.0 - (0.6 * 0.55 + 0.4 * 0.45));
        assert_eq!(d.cdf(f64::INFINITY).unwrap(), 1.0);
        let g = pd(2.0, 2.0, 0.5, 0.5);
        // ½ + ∫₀¹ K₀(t/2)/(2π) dt
        let inner =
            integrate_log_scale(|t| Ok(bessel_k0(t / 2.0)? / (2.0 * PI)), 0.0, 1.0).unwrap();
        assert!((g.cdf(1.0).unwrap() - (0.5 + inner)).abs() < 1e-12);
        assert!((g.cdf(-1.0).unwrap() - (0.5 - inner)).abs() < 1e-12);
        let mut prev = 0.0;
        for &x in &[-50.0, -3.0, -0.5, -0.01, 0.01, 0.5, 3.0, 50.0] {
            let c = d.cdf(x).unwrap();
            assert!(c >= prev && c <= 1.0);
            prev = c;
        }
        let table = d.cdf_table().unwrap();
        for &x in &[-20.0, -1.0, -0.2, 0.3, 1.0, 7.0] {
            assert!((table.eval(x) - d.cdf(x).unwrap()).abs() < 1e-9, "x={x}");
        }
        let lo = d.cdf(0.999_999).unwrap();
        let hi = d.cdf(1.000_001).unwrap();
        assert!((hi - lo).abs() < 1e-6);
    }
}
