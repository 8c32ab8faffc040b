//! Globally adaptive Gauss–Kronrod (10/21 point) integration on finite intervals.

use crate::error::Result;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    let mut values = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        values[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` and bisecting the worst panel until the tolerance is met.
pub(crate) fn integrate<F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut panels = Vec::with_capacity(points.len() + 64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            panels.push(kronrod(&mut f, w[0], w[1])?);
        }
    }
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                converged: true,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Ok(QuadResult {
                value,
                error,
                converged: true,
            });
        };
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= tol.max_intervals || !(mid > p.a && mid < p.b) {
            return Ok(QuadResult {
                value,
                error,
                converged: false,
            });
        }
        panels[worst] = kronrod(&mut f, p.a, mid)?;
        panels.push(kronrod(&mut f, mid, p.b)?);
    }
}

/// Evenly spaced breakpoints covering `[a, b]` with panels no wider than `width`.
pub(crate) fn breakpoints(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    #[test]
    fn kronrod_rule_integrates_polynomials_exactly() {
        let r = integrate(ok(|x| x.powi(20)), &[-1.0, 1.0], Tolerance::new(1e-14, 0.0)).unwrap();
        assert!((r.value - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity_is_resolved_by_bisection() {
        let r = integrate(
            ok(|x| x.sqrt().ln()),
            &[0.0, 1.0],
            Tolerance::new(1e-12, 0.0),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value + 0.5).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_integral() {
        let pts = breakpoints(0.0, 40.0, 1.0);
        let r = integrate(
            ok(|x| (5.0 * x).cos() * (-x).exp()),
            &pts,
            Tolerance::new(1e-14, 0.0),
        )
        .unwrap();
        let exact =
            1.0 / 26.0 * (1.0 - (-40.0f64).exp() * ((200.0f64).cos() - 5.0 * (200.0f64).sin()));
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            abs: 1e-15,
            rel: 0.0,
            max_intervals: 3,
        };
        let r = integrate(ok(|x| 1.0 / x.abs().sqrt()), &[-1.0, 1.0], tol).unwrap();
        assert!(!r.converged);
    }
}
