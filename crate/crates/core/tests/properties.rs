use dg2inst::config::{parse_grid, parse_kv, parse_rational, parse_triple, RunConfig};
use dg2inst::solvers::lambert_w0;
use dg2inst::solvers::series::{residual_polynomial, vanishing_series};
use dg2inst::solvers::tan_root::{branch_window, solve_tan_target, RootSign};
use dg2inst::{InvariantForm, RadialScalar};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn close(a: &InvariantForm, b: &InvariantForm, r: f64) -> bool {
    let (ta, tb) = (a.evaluate(r).unwrap(), b.evaluate(r).unwrap());
    let scale = 1.0 + ta.max_abs().max(tb.max_abs());
    let ok = ta.iter().chain(tb.iter()).all(|(m, _)| (ta.get(m) - tb.get(m)).abs() <= 1e-12 * scale);
    ok
}

/// Form of the given degree with up to three monomials and polynomial
/// coefficients.
fn form(degree: usize) -> impl Strategy<Value = InvariantForm> {
    let term = (
        proptest::sample::subsequence((0..7).collect::<Vec<_>>(), degree),
        proptest::collection::vec(-3i32..=3, 3),
    );
    proptest::collection::vec(term, 1..=3).prop_map(move |terms| {
        terms.into_iter().fold(InvariantForm::zero(degree), |acc, (idx, c)| {
            let coeff = RadialScalar::polynomial(&c.iter().map(|&x| x as f64).collect::<Vec<_>>());
            acc.add(&InvariantForm::monomial(&idx, coeff)).unwrap()
        })
    })
}

fn sign(p: usize, q: usize) -> f64 {
    if p * q % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graded_commutativity(
        (p, q, a, b) in (0usize..=3, 0usize..=3)
            .prop_flat_map(|(p, q)| (Just(p), Just(q), form(p), form(q)))
    ) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale_by(sign(p, q));
        prop_assert!(close(&ab, &ba, 1.7));
    }

    #[test]
    fn associativity(a in form(1), b in form(2), c in form(2)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 2.3));
    }

    #[test]
    fn leibniz(a in form(2), b in form(2)) {
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).unwrap()
            .add(&a.wedge(&b.d().unwrap()).unwrap().scale_by(sign(2, 1))).unwrap();
        prop_assert!(close(&lhs, &rhs, 1.3));
    }

    #[test]
    fn d_squared_vanishes(a in form(2)) {
        let dd = a.d().unwrap().d().unwrap();
        prop_assert!(dd.evaluate(3.1).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn z2_symmetry(r in 2.25f64..1e4, c in 0.0f64..1.5) {
        let t = 16.0 * (r - 2.25) * (r + 2.25);
        let pos = solve_tan_target(t, c, 0, RootSign::Positive).unwrap();
        let neg = solve_tan_target(t, -c, 0, RootSign::Negative).unwrap();
        prop_assert!((pos.f + neg.f).abs() <= 1e-12 * pos.f.abs().max(1.0));
    }

    #[test]
    fn one_sign_change_per_window(big_c in 1e-3f64..1e4, c in 0.0f64..1.5, k in 0u32..5) {
        let (lo_full, hi) = branch_window(c, k);
        let lo = lo_full.max(0.0).max(3.0 * (k as f64 * PI - c));
        let g = |y: f64| 24.0 * y * (y / 3.0 + c).sin() - 24.0 * big_c * (y / 3.0 + c).cos();
        let n = 400;
        let samples: Vec<f64> = (1..n).map(|i| g(lo + (hi - lo) * i as f64 / n as f64)).collect();
        let changes = samples.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        prop_assert!(changes <= 1);
        let root = solve_tan_target(24.0 * big_c, c, k, RootSign::Positive).unwrap();
        prop_assert!(root.f > lo && root.f < hi);
        prop_assert!(root.residual < 1e-13);
    }

    #[test]
    fn lambert_relation(x in -0.3678f64..1e6) {
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-14 * x.abs().max(1.0));
    }

    #[test]
    fn vanishing_series_residual_order(slope in 0.01f64..50.0, order in 2usize..10) {
        let p = vanishing_series(slope, order);
        let res = residual_polynomial(&p);
        let scale = p.iter().fold(1.0f64, |m, c| m.max(c.abs())).powi(3);
        prop_assert!(res[..=order].iter().all(|c| c.abs() <= 1e-9 * scale));
    }

    #[test]
    fn flat_limit_monotone(k in 1i32..6) {
        let near = dg2inst::solvers::principal_profile(FRAC_PI_2 - 10f64.powi(-k)).unwrap().at(10.0);
        let nearer = dg2inst::solvers::principal_profile(FRAC_PI_2 - 10f64.powi(-k - 1)).unwrap().at(10.0);
        prop_assert!(nearer < near);
    }

    #[test]
    fn parsers_never_panic(s in ".{0,64}") {
        let _ = parse_kv(&s);
        let _ = parse_triple(&s);
        let _ = parse_grid(&s);
        let _ = parse_rational(&s);
        let _ = RunConfig::from_text(&s);
    }

    #[test]
    fn grid_round_trip(lo in 0.01f64..10.0, span in 0.1f64..100.0, n in 2usize..1000) {
        let g = parse_grid(&format!("{lo}:{}:{n}:log", lo + span)).unwrap();
        let spec = g.resolve(dg2inst::grid::GridSpec::linear(0.0, 1.0, 2)).unwrap();
        let pts = spec.points().unwrap();
        prop_assert_eq!(pts.len(), n);
        prop_assert_eq!(pts[0], lo);
        prop_assert_eq!(pts[n - 1], lo + span);
    }
}
