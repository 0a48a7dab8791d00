use carleson::dyadic::{
    dyadic_cover_endpoints, dyadic_hl_maximal, dyadic_maximal_function, hl_maximal, CoverOrder, DyadicInterval,
    MaximalConfig, ScaleWindow, Shift, Step, StepFunction,
};
use carleson::expr::{parse_expression, Binary, Expr, Unary, Var, VarContext};
use carleson::growth::GrowthFunction;
use carleson::halfplane::{measure_of_square, Atom, CarlesonSquare, Interval, Measure, QuadratureConfig};
use carleson::multiplier::{omega_eval, OmegaWindow};
use carleson::special::beta_value;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn step_function() -> impl Strategy<Value = StepFunction> {
    (-4.0..4.0f64, prop::collection::vec((0.01..3.0f64, 0.0..2.0f64, 0.05..5.0f64), 1..5)).prop_map(|(x0, pieces)| {
        let mut x = x0;
        let mut steps = Vec::new();
        for (len, gap, h) in pieces {
            steps.push(Step { a: x, b: x + len, height: h });
            x += len + gap;
        }
        StepFunction::new(steps).unwrap()
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0..100.0f64).prop_map(Expr::Const),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::Y)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let unary = prop_oneof![Just(Unary::Neg), Just(Unary::Abs), Just(Unary::Exp), Just(Unary::Log), Just(Unary::Sqrt)];
        let binary = prop_oneof![Just(Binary::Add), Just(Binary::Sub), Just(Binary::Mul), Just(Binary::Div), Just(Binary::Pow)];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, a)| Expr::Unary(op, Box::new(a))),
            (binary, inner.clone(), inner).prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cover_contains_within_six_and_is_shortest(a in -1e3..1e3f64, e in -8.0..3.0f64) {
        let b = a + 10f64.powf(e);
        let j = dyadic_cover_endpoints(a, b, CoverOrder::SmallestFirst).unwrap();
        let (ea, eb) = (exact(a), exact(b));
        prop_assert!(j.left_exact() <= ea && eb <= j.right_exact());
        let six = BigRational::from_integer(BigInt::from(6));
        prop_assert!(j.right_exact() - j.left_exact() <= six * (&eb - &ea));
        // No interval of the next finer scale, in either grid, contains [a, b).
        for beta in [Shift::Zero, Shift::Third] {
            let finer = DyadicInterval::containing(beta, j.j + 1, a).unwrap();
            prop_assert!(!(finer.left_exact() <= ea.clone() && eb.clone() <= finer.right_exact()));
        }
    }

    #[test]
    fn children_partition_parent(k in -1000i64..1000, j in -20i32..40, third in any::<bool>()) {
        let beta = if third { Shift::Third } else { Shift::Zero };
        let d = DyadicInterval::new(beta, j, k);
        let [c0, c1] = d.children();
        prop_assert_eq!(c0.left_exact(), d.left_exact());
        prop_assert_eq!(c0.right_exact(), c1.left_exact());
        prop_assert_eq!(c1.right_exact(), d.right_exact());
        prop_assert_eq!(c0.parent(), d);
        prop_assert_eq!(c1.parent(), d);
    }

    #[test]
    fn luxemburg_of_power_is_lp_norm(f in step_function(), p in 1.0..4.0f64) {
        let lp: f64 = f.steps().iter().map(|s| s.height.powf(p) * (s.b - s.a)).sum::<f64>().powf(1.0 / p);
        let n = f.luxemburg(&GrowthFunction::power(p), 1e-13).unwrap().norm;
        prop_assert!(((n - lp) / lp).abs() < 1e-10, "{} vs {}", n, lp);
    }

    #[test]
    fn dyadic_maximal_step_function_matches_pointwise(f in step_function(), x in -5.0..15.0f64, third in any::<bool>()) {
        let beta = if third { Shift::Third } else { Shift::Zero };
        let w = ScaleWindow { j_min: -12, j_max: 24 };
        let m = dyadic_maximal_function(&f, beta, w).unwrap();
        let direct = dyadic_hl_maximal(&f, x, beta, w).unwrap().value;
        prop_assert!((m.eval(x) - direct).abs() <= 1e-12 * direct.max(1e-300), "{} vs {}", m.eval(x), direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hardy_littlewood_dominated_by_six_dyadic(f in step_function(), x in -4.0..10.0f64) {
        let cfg = MaximalConfig::default();
        let hl = hl_maximal(&f, x, &cfg).unwrap().value;
        let dy = [Shift::Zero, Shift::Third]
            .into_iter()
            .map(|b| dyadic_hl_maximal(&f, x, b, cfg.window).unwrap().value)
            .fold(0.0, f64::max);
        prop_assert!(hl <= 6.0 * dy * (1.0 + 1e-9), "M f = {}, 6 max_β M^β f = {}", hl, 6.0 * dy);
    }
}

proptest! {
    #[test]
    fn invert_evaluate_identity(p in 0.3..5.0f64, a in 0.0..3.0f64, e in -6.0..6.0f64) {
        let phi = GrowthFunction::power_log(p, a);
        let t = 10f64.powf(e);
        let back = phi.invert(phi.value(t), 1e-13).unwrap();
        prop_assert!(((back - t) / t).abs() < 1e-9);
    }

    #[test]
    fn omega_of_powers_is_a_power(p in 0.3..5.0f64, q in 1.0..9.0f64, alpha in 0.0..3.0f64, e in -20.0..20.0f64) {
        let w = OmegaWindow::hardy(&GrowthFunction::power(p), &GrowthFunction::power(q), alpha).unwrap();
        let t = 10f64.powf(e);
        let want = t.powf(1.0 / p - (2.0 + alpha) / q);
        prop_assert!(((omega_eval(&w, t).unwrap() - want) / want).abs() < 1e-9);
    }

    #[test]
    fn infix_round_trip(e in expr()) {
        let back = parse_expression(&e.to_infix(), VarContext::Plane).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn beta_recurrence(m in 0.1..20.0f64, n in 0.1..20.0f64) {
        let b = beta_value(m, n).unwrap();
        prop_assert!(((beta_value(n, m).unwrap() - b) / b).abs() < 1e-12);
        let split = beta_value(m + 1.0, n).unwrap() + beta_value(m, n + 1.0).unwrap();
        prop_assert!(((split - b) / b).abs() < 1e-11);
    }

    #[test]
    fn atomic_box_mass_counts_atoms(
        atoms in prop::collection::vec((-3.0..3.0f64, 0.001..3.0f64, 0.1..2.0f64), 0..12),
        c in -2.0..2.0f64,
        len in 0.1..4.0f64,
    ) {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(x, y, mass)| Atom { x, y, mass }).collect();
        let i = Interval::new(c, len).unwrap();
        let want: f64 = atoms
            .iter()
            .filter(|a| a.x >= c - len / 2.0 && a.x <= c + len / 2.0 && a.y <= len)
            .map(|a| a.mass)
            .sum();
        let got = measure_of_square(&Measure::Atomic(atoms), &CarlesonSquare::new(i), &QuadratureConfig::default()).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
    }
}
