use ncg_model_triples::{build_circle_dirac, build_finite_even, multiplication_operator, validate_triple, WindingSymbol};
use ncg_operator_core::{kernel_dimension, operator_function, DenseOperator, Operator, ScalarFn, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_p(seed: u64, rows: usize, cols: usize, rank: usize) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = nalgebra::DMatrix::<C64>::zeros(rows, cols);
    for _ in 0..rank {
        let x = nalgebra::DVector::<C64>::from_fn(rows, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let y = nalgebra::DVector::<C64>::from_fn(cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        m += x * y.adjoint();
    }
    DenseOperator::from_matrix(m)
}

fn symbol_strategy() -> impl Strategy<Value = WindingSymbol> {
    proptest::collection::vec((-3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 1..4).prop_filter_map("nonzero", |v| {
        WindingSymbol::new(v.into_iter().map(|(k, a, b)| (k, C64::new(a, b)))).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mckean_singer_is_independent_of_t(seed in any::<u64>(), dp in 1usize..5, dm in 1usize..5, rank in 0usize..5, t in 0.01f64..5.0) {
        let rank = rank.min(dp).min(dm);
        let p = random_p(seed, dm, dp, rank);
        let triple = build_finite_even(dp, dm, &p, vec![]).unwrap();
        let heat = operator_function(&triple.dirac, &ScalarFn::heat(t)).unwrap();
        let gamma = triple.grading.clone().unwrap();
        let str_heat = gamma.compose(&heat).unwrap().trace(0).unwrap().value;
        let index = kernel_dimension(&p, 1e-8) as f64 - kernel_dimension(&p.adjoint(), 1e-8) as f64;
        prop_assert!((str_heat.re - index).abs() < 1e-8, "{} vs {index}", str_heat.re);
        prop_assert!(str_heat.im.abs() < 1e-12);
        prop_assert!(validate_triple(&triple).all_passed());
    }

    #[test]
    fn symbols_multiply_like_operators(a in symbol_strategy(), b in symbol_strategy()) {
        let ta = multiplication_operator(&a).unwrap();
        let tb = multiplication_operator(&b).unwrap();
        let tab = multiplication_operator(&a.mul(&b)).unwrap();
        prop_assert!(ta.compose(&tb).unwrap().distance(&tab, 16).unwrap() < 1e-12);
        let adj = multiplication_operator(&a.conj()).unwrap();
        prop_assert!(ta.adjoint().distance(&adj, 16).unwrap() < 1e-15);
    }

    #[test]
    fn symbol_derivative_matches_finite_difference(a in symbol_strategy(), theta in 0.0f64..6.28) {
        let h = 1e-6;
        let fd = (a.eval(theta + h) - a.eval(theta - h)) / (2.0 * h);
        prop_assert!((fd - a.derivative(theta)).norm() < 1e-6);
    }
}

#[test]
fn circle_defect_is_summable_at_declared_p() {
    // (1 + D^2)^{-s/2} is trace class for s > 1 and p = 1.5 sits inside that range
    let t = build_circle_dirac();
    let defect = operator_function(&t.dirac, &ScalarFn::defect()).unwrap();
    let v = defect.trace(512).unwrap();
    let exact = std::f64::consts::PI / std::f64::consts::PI.tanh();
    assert!((v.value.re - exact).abs() <= v.tail_bound + 1e-12);
    assert!(v.tail_bound <= 2.0 / 512.0);
    let f = operator_function(&t.dirac, &ScalarFn::bounded_transform()).unwrap();
    let one: Operator = t.identity();
    let f2 = f.compose(&f).unwrap();
    let gap = one.sub(&f2).unwrap();
    assert!(gap.distance(&defect, 64).unwrap() < 1e-14);
}
