use sacurv::fixtures;
use sacurv::framecalc::{
    derive_geometry, detect_sac, induced_geometry, screen_change, screen_change_report,
    CheckStatus, FixtureCheck, FixtureError, FrameFixture, SacForm,
};
use sacurv::{Matrix, Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn load(name: &str) -> FrameFixture<Rational> {
    fixtures::load(name).expect("bundled").expect("valid")
}

fn diag(v: &[(i64, i64)]) -> Matrix<Rational> {
    Matrix::diagonal(&v.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>())
}

#[test]
fn conformal_example_shape_operators() {
    let f = load("example_r9");
    let g = derive_geometry(&f, 0.0).unwrap();
    assert_eq!(
        g.a_estar.entries(),
        &diag(&[(0, 1), (1, 1), (1, 1), (1, 1), (0, 1), (0, 1), (0, 1)])
    );
    assert_eq!(
        g.a_n.entries(),
        &diag(&[(0, 1), (-1, 4), (-1, 4), (-1, 4), (0, 1), (0, 1), (0, 1)])
    );
    assert!(g.tau.iter().all(|v| *v == q(0, 1)));
    assert!(g.rho.iter().all(|v| *v == q(0, 1)));
    let det = detect_sac(&g, 0.0).unwrap();
    assert_eq!(det.phi, q(-1, 4));
    assert_eq!(det.a, q(0, 1));
    assert_eq!(det.form, SacForm::MinusAI);
    assert!(g.failed_checks().is_empty());
    let torsion = g
        .checks
        .iter()
        .find(|c| c.check == FixtureCheck::AmbientTorsion)
        .unwrap();
    assert!(matches!(torsion.status, CheckStatus::Passed { .. }));
}

#[test]
fn almost_conformal_example_detects_lambda_xi_form() {
    let f = load("example_sac");
    let g = derive_geometry(&f, 0.0).unwrap();
    let z4 = f.index_of("Z4").unwrap();
    let z1 = f.index_of("Z1").unwrap();
    assert_eq!(g.a_estar.entries()[(z4, z1)], q(1, 1));
    assert_eq!(g.a_n.entries()[(z4, z1)], q(-1, 2));
    let det = detect_sac(&g, 0.0).unwrap();
    assert_eq!(det.phi, q(-1, 2));
    assert_eq!(det.form, SacForm::LambdaXi);
    assert!(g.kstar_spectrum(0.0).is_none());
}

#[test]
fn totally_geodesic_fixture_has_vanishing_forms() {
    let f = load("flat_geodesic");
    let g = derive_geometry(&f, 0.0).unwrap();
    assert!(g.b.is_zero_matrix());
    assert!(g.c.is_zero_matrix());
    assert!(g.d.is_zero_matrix());
    assert!(g.a_estar.entries().is_zero_matrix());
    assert!(g
        .checks
        .iter()
        .all(|c| matches!(c.status, CheckStatus::Passed { .. })));
    assert!(detect_sac(&g, 0.0).is_none());
}

#[test]
fn perturbed_transversal_operator_is_not_detected() {
    let mut f = load("example_r9");
    let z1 = f.index_of("Z1").unwrap();
    let n = f.n_index();
    f.connection[z1][n][z1] = q(1, 3);
    let g = induced_geometry(&f, 0.0);
    assert!(detect_sac(&g, 0.0).is_none());
}

#[test]
fn inconsistent_strict_fixture_names_the_failing_check() {
    let mut f = load("example_r9");
    let z1 = f.index_of("Z1").unwrap();
    let n = f.n_index();
    f.connection[z1][z1][n] = q(2, 1);
    let err = derive_geometry(&f, 0.0).unwrap_err().to_string();
    assert!(err.contains("screen_shape_operator"), "{err}");
}

#[test]
fn fixture_invariants_are_enforced() {
    let src = fixtures::source("example_r9").unwrap();
    let bad = src.replace(
        "a = \"E\"\nb = \"N\"\nvalue = \"1\"",
        "a = \"E\"\nb = \"N\"\nvalue = \"2\"",
    );
    let err = FrameFixture::<Rational>::from_toml_str(&bad).unwrap_err();
    assert!(matches!(err, FixtureError::Invariant { .. }), "{err}");
    let bad = src.replace("dimension = 9", "dimension = 8");
    assert!(matches!(
        FrameFixture::<Rational>::from_toml_str(&bad),
        Err(FixtureError::Dimension { .. })
    ));
    let bad = src.replace("signature = \"--+++++++\"", "signature = \"-++++++++\"");
    assert!(matches!(
        FrameFixture::<Rational>::from_toml_str(&bad),
        Err(FixtureError::Signature { .. })
    ));
    assert!(matches!(
        FrameFixture::<Rational>::from_toml_str("name = 3"),
        Err(FixtureError::Syntax(_))
    ));
}

#[test]
fn fixtures_round_trip_through_toml() {
    for name in fixtures::names() {
        let f = load(name);
        let again = FrameFixture::<Rational>::from_toml_str(&f.to_toml_string()).unwrap();
        assert_eq!(f, again, "{name}");
    }
}

#[test]
fn float_mode_matches_exact_mode() {
    let f: FrameFixture<f64> = fixtures::load("example_r9").unwrap().unwrap();
    let g = derive_geometry(&f, 1e-12).unwrap();
    let det = detect_sac(&g, 1e-12).unwrap();
    assert!((det.phi + 0.25).abs() < 1e-15);
}

#[test]
fn zero_screen_change_is_identity() {
    for name in fixtures::names() {
        let f = load(name);
        let zeros = vec![q(0, 1); f.n()];
        let ch = screen_change(&f, &zeros, None, 0.0).unwrap();
        assert_eq!(ch.fixture, f, "{name}");
    }
}

#[test]
fn screen_change_on_totally_geodesic_fixture_keeps_newton_transforms() {
    let f = load("flat_geodesic");
    let rep = screen_change_report(&f, &[q(3, 2), q(-2, 1)], 0.0).unwrap();
    assert_eq!(rep.a_estar_after, rep.a_estar_before);
    for s in &rep.steps {
        assert_eq!(s.after, s.before, "r = {}", s.r);
    }
    let g = derive_geometry(&rep.change.fixture, 0.0).unwrap();
    assert!(g.failed_checks().is_empty());
}

#[test]
fn screen_change_on_conformal_example_decomposes_exactly() {
    let f = load("example_r9");
    let mut c = vec![q(0, 1); f.n()];
    c[0] = q(1, 1);
    let rep = screen_change_report(&f, &c, 0.0).unwrap();
    assert_eq!(rep.uniqueness_residual, q(0, 1));
    assert_ne!(rep.a_estar_after, rep.a_estar_before);
    assert!(rep
        .steps
        .iter()
        .any(|s| !s.correction_term.is_zero_matrix()));
    for s in &rep.steps {
        assert_eq!(s.residual, q(0, 1), "r = {}", s.r);
    }
    let g = induced_geometry(&rep.change.fixture, 0.0);
    let torsion = g
        .checks
        .iter()
        .find(|c| c.check == FixtureCheck::AmbientTorsion)
        .unwrap();
    assert!(matches!(torsion.status, CheckStatus::Passed { .. }));
}

#[test]
fn screen_change_rejects_wrong_coefficient_count() {
    let f = load("example_r9");
    assert!(screen_change(&f, &[q(1, 1)], None, 0.0).is_err());
    let singular = Matrix::zeros(6, 6);
    assert!(screen_change(&f, &vec![q(0, 1); 6], Some(&singular), 0.0).is_err());
}
