mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sacurv::identities::{
    bridge_residual, bridge_trace_residual, cooo_residual, duu_residual, the2_divergence,
    theo1_residual, TheoremInputs,
};
use sacurv::newton::Operator;
use sacurv::sacrel::{ConventionData, SacParams, SpectrumConvention};
use sacurv::{Matrix, Rational, Scalar, Zero};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn nonzero(rng: &mut impl Rng) -> Rational {
    loop {
        let v = small_rational(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Inputs built from a random diagonal `A_E*` under the full convention,
/// with random derivatives, `τ(E)` and `c`.
fn random_inputs(rng: &mut impl Rng, a: Rational) -> TheoremInputs<Rational> {
    let n = rng.gen_range(1..=6);
    let screen: Vec<Rational> = (0..n).map(|_| small_rational(rng)).collect();
    let mut values = vec![q(0, 1)];
    values.extend(screen.iter().cloned());
    let mut gram = vec![q(0, 1)];
    gram.extend((0..n).map(|_| q(1, 1)));
    let op = Operator::new(Matrix::diagonal(&values), Matrix::diagonal(&gram))
        .unwrap()
        .with_radical_slot(0);
    let p = SacParams::new(nonzero(rng), a, SpectrumConvention::Full).unwrap();
    let data = ConventionData::new(&op, &p).unwrap();
    let r = rng.gen_range(1..=n);
    let mut inp = TheoremInputs::from_convention(&data, r)
        .unwrap()
        .with_spectrum(screen);
    inp.c = small_rational(rng);
    inp.tau_e = small_rational(rng);
    inp.e_s_rstar = small_rational(rng);
    inp.e_phi_r = small_rational(rng);
    inp.e_j_rstar = small_rational(rng);
    inp
}

fn sign(r: usize) -> Rational {
    if r % 2 == 0 {
        q(1, 1)
    } else {
        q(-1, 1)
    }
}

#[test]
fn leaf_relation_reduces_to_flatness_criterion_when_xi_is_in_the_screen() {
    let mut r = rng(21);
    for _ in 0..300 {
        let mut inp = random_inputs(&mut r, q(0, 1));
        inp.c = q(0, 1);
        inp.e_j_rstar = q(0, 1);
        assert!(inp.tr_n.is_zero() && inp.tr_a_n.is_zero() && inp.tr_a2_n.is_zero());
        let theo1 = theo1_residual(&inp).unwrap();
        let cooo = cooo_residual(&inp).unwrap();
        assert_eq!(theo1, sign(inp.r) * cooo);
    }
}

#[test]
fn supplied_traces_are_consistent_with_the_spectrum() {
    let mut r = rng(22);
    for _ in 0..200 {
        let a = small_rational(&mut r);
        let inp = random_inputs(&mut r, a);
        for (label, v) in inp.consistency() {
            assert!(v.is_zero(), "{label}: {v}");
        }
    }
}

#[test]
fn deleted_square_sum_matches_the_trace_form() {
    let mut r = rng(23);
    for _ in 0..200 {
        let inp = random_inputs(&mut r, q(0, 1));
        let k = inp.kstar.clone().unwrap();
        let mut full = vec![q(0, 1)];
        full.extend(k.iter().cloned());
        assert!(bridge_residual(&k, inp.r).is_zero());
        assert!(bridge_trace_residual(&full, inp.r).is_zero());
        // with τ(E) = 0 the two flatness residuals coincide
        let mut flat = inp.clone();
        flat.tau_e = q(0, 1);
        assert_eq!(duu_residual(&flat).unwrap(), cooo_residual(&flat).unwrap());
    }
}

#[test]
fn flatness_inputs_solved_for_the_curvature_derivative_give_zero() {
    let mut r = rng(24);
    for _ in 0..200 {
        let mut inp = random_inputs(&mut r, q(0, 1));
        let phi_r = inp.phi.powi(inp.r as u32);
        let bracket = inp.tr_a2_t.clone() + inp.tau_e.clone() * inp.tr_a_t.clone();
        inp.e_s_rstar = (sign(inp.r - 1) * phi_r.clone() * bracket
            - inp.e_phi_r.clone() * inp.sr_star.clone())
            / phi_r;
        assert!(cooo_residual(&inp).unwrap().is_zero());
    }
}

#[test]
fn divergence_with_constant_data_reduces_to_curvature_product() {
    let mut r = rng(25);
    for _ in 0..200 {
        let mut inp = random_inputs(&mut r, q(0, 1));
        inp.e_s_rstar = q(0, 1);
        inp.e_phi_r = q(0, 1);
        inp.e_j_rstar = q(0, 1);
        let phi_r = inp.phi.powi(inp.r as u32);
        let expected =
            sign(inp.r) * phi_r * inp.sr_star.clone() * (inp.tau_e.clone() - inp.s1_star.clone());
        assert_eq!(the2_divergence(&inp).unwrap(), expected);
    }
}

#[test]
fn order_zero_is_rejected() {
    let inp = TheoremInputs::<Rational>::zero(0, 3);
    assert!(theo1_residual(&inp).is_err());
    assert!(the2_divergence(&inp).is_err());
}

type Evaluator = fn(&TheoremInputs<Rational>) -> Rational;

fn evaluators() -> Vec<(&'static str, Evaluator)> {
    vec![
        ("theo1", |i| theo1_residual(i).unwrap()),
        ("cooo", |i| cooo_residual(i).unwrap()),
        ("duu", |i| duu_residual(i).unwrap()),
        ("the2", |i| the2_divergence(i).unwrap()),
    ]
}

fn set_derivative(inp: &mut TheoremInputs<Rational>, which: usize, v: Rational) {
    match which {
        0 => inp.e_s_rstar = v,
        1 => inp.e_phi_r = v,
        _ => inp.e_j_rstar = v,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn evaluators_are_affine_in_each_derivative(
        seed in 0u64..10_000,
        which in 0usize..3,
        x in -20i64..20,
        y in -20i64..20,
    ) {
        let mut r = rng(seed);
        let base = random_inputs(&mut r, q(0, 1));
        let at = |v: Rational| {
            let mut inp = base.clone();
            set_derivative(&mut inp, which, v);
            inp
        };
        let (x, y) = (q(x, 3), q(y, 5));
        for (name, f) in evaluators() {
            let lhs = f(&at(x.clone() + y.clone())) + f(&at(q(0, 1)));
            let rhs = f(&at(x.clone())) + f(&at(y.clone()));
            prop_assert_eq!(lhs, rhs, "{}", name);
        }
    }

    #[test]
    fn bridge_identity_on_random_spectra(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = random_spectrum(&mut r, 8);
        for ord in 1..=k.len() {
            let lhs: Rational = (0..k.len())
                .map(|i| k[i].clone() * k[i].clone() * sigma_brute_deleted(&k, ord - 1, i))
                .fold(q(0, 1), |acc, v| acc + v);
            let rhs = sigma_brute(&k, 1) * sigma_brute(&k, ord)
                - q(ord as i64 + 1, 1) * sigma_brute(&k, ord + 1);
            prop_assert_eq!(lhs, rhs);
            prop_assert!(bridge_residual(&k, ord).is_zero());
        }
    }
}
