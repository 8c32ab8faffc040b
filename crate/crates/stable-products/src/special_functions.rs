//! Real and complex gamma-family functions and the Bessel function K₀.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex number used for characteristic functions and Mellin variables.
pub type ComplexValue = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this real part the gamma functions are shifted up by recurrence
/// before Stirling's series is applied.
const STIRLING_THRESHOLD: f64 = 7.0;

/// B₂ₖ / (2k(2k−1)) for k = 1..10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// B₂ₖ / 2k for k = 1..10, used by the digamma asymptotic series.
const DIGAMMA_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174611.0 / 6600.0,
];

/// (−1)ᵏ ζ(k)/k for k = 2..30: Taylor coefficients of ln Γ(1+z) + γz.
const LN_GAMMA_TAYLOR: [f64; 29] = [
    0.822_467_033_424_113_2,
    -0.400_685_634_386_531_4,
    0.270_580_808_427_784_55,
    -0.207_385_551_028_673_98,
    0.169_557_176_997_408_2,
    -0.144_049_896_768_846_12,
    0.125_509_669_524_743_04,
    -0.111_334_265_869_564_69,
    0.100_099_457_512_781_81,
    -0.090_954_017_145_829_04,
    0.083_353_840_546_109,
    -0.076_932_516_411_352_19,
    0.071_432_946_295_361_34,
    -0.066_668_705_882_420_47,
    0.062_500_955_141_213_04,
    -0.058_823_978_658_684_58,
    0.055_555_767_627_403_61,
    -0.052_631_679_379_616_66,
    0.050_000_047_698_101_69,
    -0.047_619_070_330_142_23,
    0.045_454_556_293_204_67,
    -0.043_478_266_053_040_26,
    0.041_666_669_150_341_21,
    -0.040_000_001_192_140_14,
    0.038_461_539_034_675_19,
    -0.037_037_037_312_989_33,
    0.035_714_285_847_333_36,
    -0.034_482_758_684_919_3,
    0.033_333_333_364_377_58,
];

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r <= -1.0 {
        r += 2.0;
    }
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// cos(πx) with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    let mut r = (x % 2.0).abs();
    if r > 1.0 {
        r = 2.0 - r;
    }
    if r == 0.5 {
        0.0
    } else if r > 0.5 {
        -(PI * (1.0 - r)).cos()
    } else {
        (PI * r).cos()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn stirling_real(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// ln Γ(1+z) for |z| ≤ 0.2 from its Taylor series.
fn ln_gamma_1p_taylor(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = z * z;
    for c in LN_GAMMA_TAYLOR {
        let term = c * pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= z;
    }
    sum - EULER_GAMMA * z
}

/// Natural logarithm of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if (x - 1.0).abs() <= 0.2 {
        return Ok(ln_gamma_1p_taylor(x - 1.0));
    }
    if (x - 2.0).abs() <= 0.2 {
        let z = x - 2.0;
        return Ok(ln_gamma_1p_taylor(z) + z.ln_1p());
    }
    if x >= STIRLING_THRESHOLD {
        return Ok(stirling_real(x));
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_THRESHOLD {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(stirling_real(shifted) - product.ln())
}

/// ln|Γ(x)| together with the sign of Γ(x), for any real x that is not a pole.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("Γ has a pole at {x}")));
    }
    if x > 0.0 {
        return Ok((ln_gamma(x)?, 1.0));
    }
    // Γ(x)Γ(1−x) = π / sin(πx)
    let s = sin_pi(x);
    let ln_abs = PI.ln() - s.abs().ln() - ln_gamma(1.0 - x)?;
    Ok((ln_abs, s.signum()))
}

fn stirling_complex(s: Complex64) -> Complex64 {
    let inv = s.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    (s - 0.5) * s.ln() - s + HALF_LN_2PI + series
}

/// Principal branch of ln Γ(s), continuous away from the non-positive real axis.
pub fn ln_gamma_complex(s: ComplexValue) -> Result<ComplexValue> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!(
            "ln_gamma_complex requires finite s, got {s}"
        )));
    }
    if s.im == 0.0 && is_nonpositive_integer(s.re) {
        return Err(Error::Pole {
            index: (-s.re) as u64,
        });
    }
    let mut z = s;
    let mut logs = Complex64::new(0.0, 0.0);
    while z.re < STIRLING_THRESHOLD && !(z.re >= 0.0 && z.im.abs() >= STIRLING_THRESHOLD) {
        logs += z.ln();
        z += 1.0;
    }
    Ok(stirling_complex(z) - logs)
}

/// Γ(s) for complex s.
pub fn gamma_complex(s: ComplexValue) -> Result<ComplexValue> {
    Ok(ln_gamma_complex(s)?.exp())
}

/// Digamma function ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("digamma has a pole at {x}")));
    }
    if x < 0.5 {
        // ψ(1−x) − ψ(x) = π cot(πx)
        return Ok(digamma(1.0 - x)? - PI * cos_pi(x) / sin_pi(x));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// ψ(z) − ψ(1−z) = −π cot(πz), exact at the poles of cot only through the caller.
pub(crate) fn digamma_reflection_difference(z: f64) -> f64 {
    -PI * cos_pi(z) / sin_pi(z)
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("bessel_k0 requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 2.0 {
        Ok(k0_series(x))
    } else {
        Ok(k0_integral(x))
    }
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-18 * tail {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// K₀(x) = ∫₀^∞ exp(−x cosh t) dt by the trapezoidal rule, which converges
/// geometrically for this analytic, doubly decaying integrand.
fn k0_integral(x: f64) -> f64 {
    let h = (PI * PI / 2.0) / (0.3 * x + 40.0);
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let half = (0.5 * t).sinh();
        let term = (-2.0 * x * half * half).exp();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        j += 1;
    }
    (-x).exp() * h * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_reference_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-16);
        assert!(rel(ln_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
        let cases = [
            (7.5, 7.534_364_236_758_733),
            (1.1, -0.049_872_441_259_839_724),
            (2.05, 0.021_937_091_667_171_835),
            (0.001, 6.907_178_885_383_854),
            (1000.0, 5_905.220_423_209_181),
        ];
        for (x, want) in cases {
            assert!(rel(ln_gamma(x).unwrap(), want) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn ln_gamma_at_branch_boundaries() {
        let cases = [
            (0.8, 0.152_059_678_399_837_55),
            (1.2, -0.085_374_090_003_315_84),
            (1.8, -0.071_083_872_914_372_15),
            (2.2, 0.096_947_466_790_638_87),
            (0.3, 1.095_797_994_818_075_6),
            (3.7, 1.428_072_326_665_388_1),
            (6.9, 6.392_744_456_405_596),
        ];
        for (x, want) in cases {
            assert!(rel(ln_gamma(x).unwrap(), want) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn signed_gamma_on_negative_axis() {
        // Γ(−0.5) = −2√π
        let (l, s) = ln_gamma_signed(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert!(rel(l.exp(), 2.0 * PI.sqrt()) < 1e-14);
        // Γ(−1.5) = 4√π/3
        let (l, s) = ln_gamma_signed(-1.5).unwrap();
        assert_eq!(s, 1.0);
        assert!(rel(l.exp(), 4.0 * PI.sqrt() / 3.0) < 1e-14);
        assert!(ln_gamma_signed(-3.0).is_err());
    }

    #[test]
    fn complex_reference_values() {
        let z = ln_gamma_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!(z.norm() < 1e-15);
        let z = ln_gamma_complex(Complex64::new(0.5, 0.0)).unwrap();
        assert!((z.re - 0.5 * PI.ln()).abs() < 2e-15 && z.im == 0.0);
        let cases = [
            (
                (2.0, 3.0),
                (-2.092_851_753_092_733_3, 2.302_396_543_466_867_6),
            ),
            (
                (-3.5, 0.5),
                (-2.197_949_943_452_405, -11.870_658_484_233_089),
            ),
            (
                (0.3, -40.0),
                (-62.650_686_053_968_13, -107.241_560_579_886_68),
            ),
        ];
        for ((sr, si), (wr, wi)) in cases {
            let z = ln_gamma_complex(Complex64::new(sr, si)).unwrap();
            let w = Complex64::new(wr, wi);
            assert!((z - w).norm() < 1e-12 * w.norm(), "s={sr}+{si}i got {z}");
        }
    }

    #[test]
    fn complex_reflection_formula() {
        let s = Complex64::new(2.0, 3.0);
        let lhs = gamma_complex(s).unwrap() * gamma_complex(1.0 - s).unwrap();
        let rhs = PI / (s * PI).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn complex_pole_carries_index() {
        assert_eq!(
            ln_gamma_complex(Complex64::new(-3.0, 0.0)),
            Err(Error::Pole { index: 3 })
        );
        assert_eq!(
            ln_gamma_complex(Complex64::new(0.0, 0.0)),
            Err(Error::Pole { index: 0 })
        );
    }

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        let cases = [
            (0.3, -3.502_524_222_200_133),
            (-2.7, -1.115_347_129_140_687),
            (500.0, 6.213_607_765_088_992),
        ];
        for (x, want) in cases {
            assert!((digamma(x).unwrap() - want).abs() < 1e-13, "x={x}");
        }
        assert!(digamma(1.461_632_144_968_362_3).unwrap().abs() < 1e-15);
        assert!(digamma(0.0).is_err() && digamma(-4.0).is_err());
    }

    #[test]
    fn bessel_k0_reference_values() {
        let cases = [
            (0.001, 7.023_688_800_562_381),
            (0.5, 0.924_419_071_227_665_9),
            (1.0, 0.421_024_438_240_708_3),
            (2.0, 0.113_893_872_749_533_44),
            (5.0, 0.003_691_098_334_042_594_3),
            (10.0, 1.778_006_231_616_765_2e-5),
            (25.0, 3.464_161_562_213_114_4e-12),
            (50.0, 3.410_167_749_789_495_5e-23),
        ];
        for (x, want) in cases {
            assert!(rel(bessel_k0(x).unwrap(), want) < 1e-12, "x={x}");
        }
        assert!(bessel_k0(0.0).is_err());
    }

    #[test]
    fn bessel_k0_large_argument_behaviour() {
        // K₀(x)·eˣ·√(2x/π) = 1 − 1/(8x) + 9/(128x²) − 225/(3072x³) + …
        let x = 50.0;
        let ratio = bessel_k0(x).unwrap() * x.exp() * (2.0 * x / PI).sqrt();
        let series = 1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x) - 225.0 / (3072.0 * x * x * x)
            + 11025.0 / (98304.0 * x.powi(4));
        assert!((ratio - series).abs() < 1e-8);
        assert!((ratio - 1.0).abs() < 3e-3);
    }

    #[test]
    fn trig_helpers_are_exact_at_lattice_points() {
        for k in -6..=6 {
            assert_eq!(sin_pi(k as f64), 0.0);
            assert_eq!(cos_pi(k as f64 + 0.5), 0.0);
        }
        assert!((sin_pi(0.3) - (0.3 * PI).sin()).abs() < 1e-16);
        assert!((cos_pi(-2.3) - (2.3 * PI).cos()).abs() < 1e-15);
        assert!((sin_pi(-1.7) - (-1.7 * PI).sin()).abs() < 1e-15);
    }
}
