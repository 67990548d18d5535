use approx::assert_relative_eq;
use kernred::kernelops::{apply_h, apply_r, associativity_check, KernelQuery};
use kernred::level::{averaging_operator, decompose_plateaus, level_analysis};
use kernred::quadrature::GaussLegendre;
use kernred::rearrange::rearrangement;
use kernred::verify::{digest, run_suite_config, EnsembleSpec, SuiteConfig};
use kernred::{Grid, IndexFunction, StepFunction};
use proptest::prelude::*;

fn q(alpha: f64, m: u32) -> KernelQuery {
    KernelQuery::new(IndexFunction::power(1.0, alpha).unwrap(), m).unwrap()
}

fn f_example() -> StepFunction {
    StepFunction::from_pieces(&[(1.0, 2.0, 2.0), (3.0, 5.0, 1.0)]).unwrap()
}

#[test]
fn hardy_operator_for_identity_index() {
    // I(t) = t, m = 1: R f(t) = F(t)/t and H f(t) = ∫_t^∞ f(s)/s ds
    let f = f_example();
    let grid = Grid::log(0.5, 10.0, 31).unwrap();
    let r = apply_r(&q(1.0, 1), &f, &grid).unwrap();
    let h = apply_h(&q(1.0, 1), &f, &grid).unwrap();
    for (k, &t) in grid.points().iter().enumerate() {
        let big_f = f.integrate(0.0, t).unwrap();
        assert_relative_eq!(r.values()[k], big_f / t, max_relative = 1e-13);
        let want: f64 = f
            .cells()
            .filter(|c| c.end > t && c.value > 0.0)
            .map(|c| c.value * (c.end / c.start.max(t)).ln())
            .sum();
        assert_relative_eq!(h.values()[k], want, max_relative = 1e-13, epsilon = 1e-300);
    }
}

#[test]
fn second_order_kernel_by_direct_quadrature() {
    // R_I^2 f(t) = (1/I(t)) ∫_0^t f(s) ln(t/s) ds for I(t) = t
    let f = f_example();
    let rule = GaussLegendre::new(20);
    let grid = Grid::log(1.5, 8.0, 9).unwrap();
    let r = apply_r(&q(1.0, 2), &f, &grid).unwrap();
    for (k, &t) in grid.points().iter().enumerate() {
        let mut want = 0.0;
        for c in f.cells().filter(|c| c.start < t) {
            let b = c.end.min(t);
            want += c.value * rule.integrate_graded(|s| (t / s).ln(), c.start, b);
        }
        assert_relative_eq!(r.values()[k], want / t, max_relative = 1e-10);
    }
}

#[test]
fn plateau_of_constant_index() {
    // I ≡ 1, m = 1, f = χ(0,1): R f* = min(t, 1) so G ≡ 1 and E = (0, 1)
    let f = StepFunction::indicator(0.0, 1.0).unwrap();
    let grid = Grid::log(1e-3, 10.0, 61).unwrap();
    let dec = decompose_plateaus(&q(0.0, 1), &f, &grid).unwrap();
    assert_eq!(dec.intervals, vec![(0.0, 1.0)]);
    assert_eq!(dec.plateau_values, vec![1.0]);
    let a = averaging_operator(&f, &dec).unwrap();
    assert_eq!(a, f);
}

#[test]
fn level_function_dominates_and_is_non_increasing_beyond_support() {
    let f = f_example();
    let grid = Grid::log(1e-2, 100.0, 121).unwrap();
    let la = level_analysis(&q(1.0, 2), &f, &grid).unwrap();
    for (r, g) in la.r.values().iter().zip(la.g.values()) {
        assert!(g >= r);
    }
    assert!(la.g.values().windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(la.fstar, rearrangement(&f));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associativity_for_random_pairs(
        a in prop::collection::vec((1u32..8, 0u32..6), 1..5),
        b in prop::collection::vec((1u32..8, 0u32..6), 1..5),
        alpha in prop_oneof![Just(0.0), Just(1.0), Just(0.5)],
        m in 1u32..=2,
    ) {
        let mk = |cells: &[(u32, u32)]| {
            let mut t = 0.0;
            let mut pieces = Vec::new();
            for &(w, v) in cells {
                pieces.push((t, t + w as f64 / 4.0, v as f64));
                t += w as f64 / 4.0;
            }
            StepFunction::from_pieces(&pieces).unwrap()
        };
        let (f, g) = (mk(&a), mk(&b));
        let qq = q(alpha, m);
        let tol = if qq.closed_form() { 1e-6 } else { 1e-4 };
        let r = associativity_check(&qq, &f, &g, tol);
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn r_is_monotone_and_linear(s in 1u32..40, k in 1u32..6) {
        let f = f_example();
        let t = s as f64 / 4.0;
        let qq = q(1.0, 2);
        let base = qq.r_value(&f, t).unwrap().to_f64();
        let scaled = qq.r_value(&f.scale(k as f64).unwrap(), t).unwrap().to_f64();
        prop_assert!((scaled - k as f64 * base).abs() <= 1e-12 * scaled.max(1e-300));
        let bigger = f.add(&StepFunction::indicator(0.0, 6.0).unwrap());
        prop_assert!(qq.r_value(&bigger, t).unwrap().to_f64() >= base);
    }
}

#[test]
fn ensembles_and_reports_are_deterministic() {
    let spec = EnsembleSpec::default().with_seed(42).with_count(10);
    let a: Vec<String> = spec.samples().iter().map(digest).collect();
    let b: Vec<String> = spec.samples().iter().map(digest).collect();
    assert_eq!(a, b);
    let other: Vec<String> = spec.clone().with_seed(43).samples().iter().map(digest).collect();
    assert_ne!(a, other);

    let cfg = SuiteConfig::parse(
        "chain_grid = 128\n[checks]\nhardy_littlewood = 20\ndominance = 5\n[[chain]]\nindex = \"power:c=1,alpha=1\"\norders = [1]\nexponents = [2]\nsamples = 3\n",
    )
    .unwrap();
    let r1 = run_suite_config(&cfg, std::path::Path::new(".")).unwrap();
    let r2 = run_suite_config(&cfg, std::path::Path::new(".")).unwrap();
    assert!(r1.pass);
    assert_eq!(r1.to_json(), r2.to_json());
}
