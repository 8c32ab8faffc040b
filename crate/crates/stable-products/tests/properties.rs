use proptest::prelude::*;
use stable_products::product_density::{product_density_iid, ProductDensity};
use stable_products::stable_core::p1_bounds;
use stable_products::{ProductParams, StableParams};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

prop_compose! {
    fn factor()(alpha in 0.3f64..=2.0, t in 0.02f64..=1.0) -> (f64, f64) {
        let (lo, hi) = p1_bounds(alpha);
        (alpha, lo + (hi - lo) * t)
    }
}

prop_compose! {
    fn pair()((a1, p) in factor(), (a2, q) in factor()) -> (f64, f64, f64, f64) {
        (a1, a2, p, q)
    }
}

fn admissible(a1: f64, a2: f64) -> bool {
    (a1 + a2 - 2.0 * a1 * a2).abs() > 0.1
}

fn arg() -> impl Strategy<Value = f64> {
    (-1.3f64..1.3, any::<bool>())
        .prop_map(|(e, neg)| if neg { -(10f64.powf(e)) } else { 10f64.powf(e) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutative((a1, a2, p, q) in pair(), x in arg()) {
        prop_assume!(admissible(a1, a2));
        let pp = ProductParams::unit(a1, a2, p, q).unwrap();
        let g = ProductDensity::new(pp).unwrap().density(x).unwrap();
        let h = ProductDensity::new(pp.swapped()).unwrap().density(x).unwrap();
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn reflecting_both_factors((a1, a2, p, q) in pair(), x in arg()) {
        prop_assume!(admissible(a1, a2));
        let pp = ProductParams::unit(a1, a2, p, q).unwrap();
        let g = ProductDensity::new(pp).unwrap().density(x).unwrap();
        let h = ProductDensity::new(pp.reflected()).unwrap().density(x).unwrap();
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn reflecting_one_factor_mirrors((a1, a2, p, q) in pair(), x in arg()) {
        prop_assume!(admissible(a1, a2));
        let pp = ProductParams::unit(a1, a2, p, q).unwrap();
        let g = ProductDensity::new(pp).unwrap().density(x).unwrap();
        let h = ProductDensity::new(pp.mirrored()).unwrap().density(-x).unwrap();
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn scale_covariance((a1, a2, p, q) in pair(), c1 in 0.2f64..5.0, c2 in 0.2f64..5.0, x in arg()) {
        prop_assume!(admissible(a1, a2));
        let pp = ProductParams::with_scales(a1, a2, p, q, c1, c2).unwrap();
        let s = pp.scale_factor();
        let g = ProductDensity::new(pp).unwrap().density(x).unwrap();
        let h = ProductDensity::new(pp.unit_scale()).unwrap().density(x / s).unwrap() / s;
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn symmetric_factor_gives_even_density((a1, p) in factor(), a2 in 0.3f64..=2.0, x in arg()) {
        prop_assume!(admissible(a1, a2));
        let pp = ProductParams::new(StableParams::unit(a1, p).unwrap(), StableParams::unit(a2, 0.5).unwrap()).unwrap();
        let d = ProductDensity::new(pp).unwrap();
        let (g, h) = (d.density(x).unwrap(), d.density(-x).unwrap());
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn iid_path_agrees((a, p) in factor(), x in arg()) {
        prop_assume!((a - 1.0).abs() > 0.05);
        let g = ProductDensity::new(ProductParams::unit(a, a, p, p).unwrap()).unwrap().density(x).unwrap();
        let h = product_density_iid(x, a, p).unwrap();
        prop_assert!(close(g, h), "{g} vs {h}");
    }

    #[test]
    fn density_is_nonnegative((a1, a2, p, q) in pair(), x in arg()) {
        prop_assume!(admissible(a1, a2));
        let g = ProductDensity::new(ProductParams::unit(a1, a2, p, q).unwrap()).unwrap().density(x).unwrap();
        prop_assert!(g >= -1e-15, "{g}");
    }
}
