//! The two Fox H-function layouts that describe stable densities and the
//! single-pair product integral g̃, with the sum and difference relations.
//!
//! Values are routed to the residue series; the general Mellin–Barnes kernel
//! is kept for independent contour evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::{contour_integral, ContourSpec, OracleValue};
use crate::product_density::{GTilde, ProductDensity, ProductParams};
use crate::series::{Expansion, Mode, Term, MAX_TERMS};
use crate::special_functions::{ln_gamma, ln_gamma_complex, sin_pi};
use crate::stable_core::{self, StableParams};

/// H^{mn}_{pq} with upper pairs (a_j, A_j) and lower pairs (b_j, B_j).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HFunctionSpec {
    m: usize,
    n: usize,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
}

impl HFunctionSpec {
    /// Scale coefficients A_j, B_j must be non-negative; a zero coefficient
    /// arises from a one-sided factor and makes the gamma factor constant.
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(Error::InvalidParameter(format!(
                "H-function indices need m ≤ q and n ≤ p, got m={m}, n={n}, p={}, q={}",
                upper.len(),
                lower.len()
            )));
        }
        if upper
            .iter()
            .chain(lower.iter())
            .any(|&(_, c)| c.is_nan() || c < 0.0)
        {
            return Err(Error::InvalidParameter(
                "H-function scale coefficients must be non-negative".into(),
            ));
        }
        Ok(Self { m, n, upper, lower })
    }

    /// Layout with f(x; α, p₁) = (1/α)·H¹¹₂₂ for x > 0.
    pub fn stable(alpha: f64, p1: f64) -> Result<Self> {
        let p = StableParams::unit(alpha, p1)?;
        let (p1, p2) = (p.p1(), p.p2());
        Self::new(
            1,
            1,
            vec![((alpha - 1.0) / alpha, 1.0 / alpha), (p2, p1)],
            vec![(0.0, 1.0), (p2, p1)],
        )
    }

    /// Layout with g̃(x; α₁, α₂, p₁, q₁) = (1/(α₁α₂))·H²²₄₄ for x > 0.
    pub fn product(a1: f64, a2: f64, p1: f64, q1: f64) -> Result<Self> {
        let pp = ProductParams::unit(a1, a2, p1, q1)?;
        let (p1, p2) = (pp.first().p1(), pp.first().p2());
        let (q1, q2) = (pp.second().p1(), pp.second().p2());
        Ok(Self::product_unchecked(a1, a2, (p1, p2), (q1, q2)))
    }

    fn product_unchecked(a1: f64, a2: f64, p: (f64, f64), q: (f64, f64)) -> Self {
        Self {
            m: 2,
            n: 2,
            upper: vec![
                ((a1 - 1.0) / a1, 1.0 / a1),
                ((a2 - 1.0) / a2, 1.0 / a2),
                (p.1, p.0),
                (q.1, q.0),
            ],
            lower: vec![(0.0, 1.0), (0.0, 1.0), (p.1, p.0), (q.1, q.0)],
        }
    }

    pub fn indices(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.upper.len(), self.lower.len())
    }

    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }

    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }

    /// (α, p₁) when this is the stable layout.
    pub fn stable_parameters(&self) -> Option<(f64, f64)> {
        if self.indices() != (1, 1, 2, 2)
            || self.lower[0] != (0.0, 1.0)
            || self.upper[1] != self.lower[1]
        {
            return None;
        }
        let alpha = 1.0 / self.upper[0].1;
        Some((alpha, self.upper[1].1))
    }

    /// (α₁, α₂, p₁, q₁) when this is the product layout.
    pub fn product_parameters(&self) -> Option<(f64, f64, f64, f64)> {
        if self.indices() != (2, 2, 4, 4)
            || self.lower[0] != (0.0, 1.0)
            || self.lower[1] != (0.0, 1.0)
            || self.upper[2..] != self.lower[2..]
        {
            return None;
        }
        Some((
            1.0 / self.upper[0].1,
            1.0 / self.upper[1].1,
            self.upper[2].1,
            self.upper[3].1,
        ))
    }

    /// Mellin–Barnes integrand without the x^{−s} factor.
    pub fn kernel(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut log = Complex64::new(0.0, 0.0);
        for (j, &(b, beta)) in self.lower.iter().enumerate() {
            if j < self.m {
                log += ln_gamma_complex(b + beta * s)?;
            } else {
                match ln_gamma_complex(one - b - beta * s) {
                    Ok(v) => log -= v,
                    Err(Error::Pole { .. }) => return Ok(Complex64::new(0.0, 0.0)),
                    Err(e) => return Err(e),
                }
            }
        }
        for (j, &(a, alpha)) in self.upper.iter().enumerate() {
            if j < self.n {
                log += ln_gamma_complex(one - a - alpha * s)?;
            } else {
                match ln_gamma_complex(a + alpha * s) {
                    Ok(v) => log -= v,
                    Err(Error::Pole { .. }) => return Ok(Complex64::new(0.0, 0.0)),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(log.exp())
    }

    /// H(x) by trapezoidal integration of the kernel along Re s = a.
    pub fn contour(&self, x: f64, spec: &ContourSpec) -> Result<OracleValue> {
        contour_integral(x, |s| self.kernel(s), spec)
    }
}

fn positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "H-function argument must be positive, got {x}"
        )))
    }
}

/// (1/α)·H¹¹₂₂ = f(x; α, p₁) for x > 0.
pub fn h_stable(x: f64, alpha: f64, p1: f64) -> Result<f64> {
    positive(x)?;
    stable_core::density(x, &StableParams::unit(alpha, p1)?)
}

/// (1/(α₁α₂))·H²²₄₄ = g̃(x; α₁, α₂, p₁, q₁) for x > 0.
pub fn h2244_product(x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<f64> {
    positive(x)?;
    Ok(GTilde::new(a1, a2, p1, q1)?.eval(x)?.value)
}

/// The two H²²₄₄ values with asymmetry pairs (p₂,p₁),(q₂,q₁) and (p₁,p₂),(q₁,q₂), by contour integration.
fn h_pair(x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<(f64, f64)> {
    let pp = ProductParams::unit(a1, a2, p1, q1)?;
    let (p1, p2) = (pp.first().p1(), pp.first().p2());
    let (q1, q2) = (pp.second().p1(), pp.second().p2());
    let spec = ContourSpec::default();
    let first = HFunctionSpec::product_unchecked(a1, a2, (p1, p2), (q1, q2)).contour(x, &spec)?;
    let second = HFunctionSpec::product_unchecked(a1, a2, (p2, p1), (q2, q1)).contour(x, &spec)?;
    Ok((first.value, second.value))
}

/// |H[(p₂,p₁),(q₂,q₁)] + H[(p₁,p₂),(q₁,q₂)] − α₁α₂·g(x)| with the H-functions from contour integration.
pub fn verify_sum_identity(x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<f64> {
    positive(x)?;
    let (h1, h2) = h_pair(x, a1, a2, p1, q1)?;
    let g = ProductDensity::new(ProductParams::unit(a1, a2, p1, q1)?)?.density(x)?;
    Ok((h1 + h2 - a1 * a2 * g).abs())
}

/// Candidate readings of the series for the difference of the two H-functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceConvention {
    /// +(1/π)Σ Γ(k/α₁)Γ(k/α₂)·sin((p₁+q₁)kπ)·x^{k−1}/((k−1)!)²
    PrintedPlus,
    /// The same series with the opposite sign.
    PrintedMinus,
    /// +(1/π)Σ Γ(k/α₁+1)Γ(k/α₂+1)·sin((p₁+q₁)kπ)·x^{k−1}/((k−1)!)²
    ShiftedPlus,
    ShiftedMinus,
}

impl DifferenceConvention {
    pub const ALL: [DifferenceConvention; 4] = [
        DifferenceConvention::PrintedPlus,
        DifferenceConvention::PrintedMinus,
        DifferenceConvention::ShiftedPlus,
        DifferenceConvention::ShiftedMinus,
    ];

    pub fn describe(&self) -> &'static str {
        match self {
            Self::PrintedPlus => {
                "+(1/pi) sum Gamma(k/a1) Gamma(k/a2) sin((p1+q1) k pi) x^(k-1) / ((k-1)!)^2"
            }
            Self::PrintedMinus => {
                "-(1/pi) sum Gamma(k/a1) Gamma(k/a2) sin((p1+q1) k pi) x^(k-1) / ((k-1)!)^2"
            }
            Self::ShiftedPlus => {
                "+(1/pi) sum Gamma(k/a1+1) Gamma(k/a2+1) sin((p1+q1) k pi) x^(k-1) / ((k-1)!)^2"
            }
            Self::ShiftedMinus => {
                "-(1/pi) sum Gamma(k/a1+1) Gamma(k/a2+1) sin((p1+q1) k pi) x^(k-1) / ((k-1)!)^2"
            }
        }
    }

    /// Evaluates the candidate series at x.
    pub fn series(&self, x: f64, a1: f64, a2: f64, p1: f64, q1: f64) -> Result<f64> {
        positive(x)?;
        let (shift, sign) = match self {
            Self::PrintedPlus => (0.0, 1.0),
            Self::PrintedMinus => (0.0, -1.0),
            Self::ShiftedPlus => (1.0, 1.0),
            Self::ShiftedMinus => (1.0, -1.0),
        };
        let terms = (1..=MAX_TERMS)
            .map(|k| {
                let kf = k as f64;
                Ok(Term {
                    ln_scale: ln_gamma(kf / a1 + shift)? + ln_gamma(kf / a2 + shift)?
                        - 2.0 * ln_gamma(kf)?,
                    power: kf - 1.0,
                    a: sign * sin_pi((p1 + q1) * kf) / PI,
                    a_env: 1.0 / PI,
                    ..Term::default()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Expansion::new(terms, Mode::Convergent).eval(x).value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceCheck {
    pub convention: DifferenceConvention,
    pub residual: f64,
    /// Residual of every candidate against the contour value of the difference.
    pub candidates: Vec<(DifferenceConvention, f64)>,
}

/// Compares H[(p₂,p₁),(q₂,q₁)] − H[(p₁,p₂),(q₁,q₂)] with each candidate series
/// and selects the one with the smallest residual.
pub fn verify_difference_identity(
    x: f64,
    a1: f64,
    a2: f64,
    p1: f64,
    q1: f64,
) -> Result<DifferenceCheck> {
    positive(x)?;
    if !(a1 > 1.0 && a2 > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the difference relation assumes α₁, α₂ > 1, got ({a1}, {a2})"
        )));
    }
    let (h1, h2) = h_pair(x, a1, a2, p1, q1)?;
    let diff = h1 - h2;
    let candidates = DifferenceConvention::ALL
        .iter()
        .map(|c| Ok((*c, (diff - c.series(x, a1, a2, p1, q1)?).abs())))
        .collect::<Result<Vec<_>>>()?;
    let &(convention, residual) = candidates
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four candidates");
    Ok(DifferenceCheck {
        convention,
        residual,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::bessel_k0;

    #[test]
    fn layouts_round_trip() {
        let h = HFunctionSpec::product(1.6, 1.4, 0.55, 0.5).unwrap();
        assert_eq!(h.indices(), (2, 2, 4, 4));
        let (a1, a2, p1, q1) = h.product_parameters().unwrap();
        assert!((a1 - 1.6).abs() < 1e-15 && (a2 - 1.4).abs() < 1e-15);
        assert_eq!((p1, q1), (0.55, 0.5));
        assert_eq!(h.stable_parameters(), None);
        let s = HFunctionSpec::stable(1.5, 0.6).unwrap();
        let (alpha, p) = s.stable_parameters().unwrap();
        assert!((alpha - 1.5).abs() < 1e-15);
        assert_eq!(p, 0.6);
        assert!(HFunctionSpec::new(3, 0, vec![], vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn stable_layout_is_the_density() {
        assert!((h_stable(0.5, 1.0, 0.5).unwrap() - 0.254_647_908_947_032_5).abs() < 1e-12);
        let gauss = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert!((h_stable(1.0, 2.0, 0.5).unwrap() - gauss).abs() < 1e-14);
        for &(alpha, p1, x) in &[(1.5, 0.6, 0.7), (0.7, 0.9, 2.0), (1.2, 0.5, 0.3)] {
            let h = HFunctionSpec::stable(alpha, p1).unwrap();
            let c = h.contour(x, &ContourSpec::default()).unwrap().value / alpha;
            assert!(
                (c - h_stable(x, alpha, p1).unwrap()).abs() < 1e-10,
                "{alpha} {p1}"
            );
        }
    }

    #[test]
    fn product_layout_is_g_tilde() {
        let want = bessel_k0(0.5).unwrap() / (4.0 * PI);
        assert!((h2244_product(1.0, 2.0, 2.0, 0.5, 0.5).unwrap() - want).abs() < 1e-13);
        for &(a1, a2, p1, q1, x) in &[(1.6, 1.4, 0.55, 0.5, 0.8), (0.4, 0.7, 0.8, 0.9, 1.5)] {
            let h = HFunctionSpec::product(a1, a2, p1, q1).unwrap();
            let c = h.contour(x, &ContourSpec::default()).unwrap().value / (a1 * a2);
            assert!((c - h2244_product(x, a1, a2, p1, q1).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn sum_identity() {
        assert!(verify_sum_identity(1.0, 2.0, 2.0, 0.5, 0.5).unwrap() < 1e-10);
        assert!(verify_sum_identity(0.5, 1.8, 1.4, 0.55, 0.52).unwrap() < 1e-8);
    }

    #[test]
    fn difference_identity_selects_negative_sign() {
        let check = verify_difference_identity(0.5, 1.5, 1.5, 0.6, 0.6).unwrap();
        assert_eq!(check.convention, DifferenceConvention::PrintedMinus);
        assert!(check.residual < 1e-8);
        // p₁ + q₁ = 1 kills every term
        let check = verify_difference_identity(0.8, 1.7, 1.3, 0.55, 0.45).unwrap();
        assert!(check.residual < 1e-10);
        assert!(verify_difference_identity(0.5, 0.8, 1.5, 0.6, 0.5).is_err());
    }

    #[test]
    fn difference_series_limit_at_origin() {
        let c = DifferenceConvention::PrintedPlus;
        let lead = crate::special_functions::ln_gamma(1.0 / 1.5)
            .unwrap()
            .exp()
            .powi(2)
            * sin_pi(1.2)
            / PI;
        assert!((c.series(1e-12, 1.5, 1.5, 0.6, 0.6).unwrap() - lead).abs() < 1e-10);
    }
}
