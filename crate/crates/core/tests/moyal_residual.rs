use proptest::prelude::*;

use wigner_carrier::error::Error;
use wigner_carrier::grid::{GridSpec, PhaseField, Potential};
use wigner_carrier::residual::{
    hahn_jordan_split, minimality_check, moyal_residual, residual_diagnostics, residual_orders,
};
use wigner_carrier::wigner::superposition_02_wigner;

/// Fourth-order central third derivative in p.
fn fd_third(f: impl Fn(f64) -> f64, p: f64, h: f64) -> f64 {
    (-f(p + 3.0 * h) + 8.0 * f(p + 2.0 * h) - 13.0 * f(p + h) + 13.0 * f(p - h)
        - 8.0 * f(p - 2.0 * h)
        + f(p - 3.0 * h))
        / (8.0 * h * h * h)
}

#[test]
fn quartic_residual_matches_finite_differences() {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    for lambda in [0.02, 0.05] {
        let r = moyal_residual(&w, &Potential::quartic(lambda));
        let mut err = 0.0f64;
        for i in (0..g.n_q).step_by(7) {
            let q = g.q(i);
            for j in (0..g.n_p).step_by(5) {
                let p = g.p(j);
                let expected = -lambda * q * fd_third(|x| superposition_02_wigner(q, x), p, 0.01);
                err = err.max((r.at(i, j) - expected).abs());
            }
        }
        assert!(err <= 1e-7, "lambda {lambda}: {err:e}");
    }
}

#[test]
fn harmonic_residual_vanishes() {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    assert_eq!(moyal_residual(&w, &Potential::harmonic()).max_abs(), 0.0);
    let d = residual_diagnostics(&w, &Potential::harmonic());
    assert_eq!((d.chi_q, d.activity), (0.0, 0.0));
    assert!(residual_orders(&Potential::polynomial(vec![1.0, -2.0, 0.5]).unwrap()).is_empty());
}

#[test]
fn residual_is_linear_in_lambda() {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    let base = moyal_residual(&w, &Potential::quartic(1.0));
    for lambda in [1e-3, 0.02, 0.05, 0.7] {
        let r = moyal_residual(&w, &Potential::quartic(lambda));
        let e = base.scaled(lambda);
        assert!(r.sub(&e).unwrap().l2_norm() <= 1e-12 * e.l2_norm());
    }
}

#[test]
fn sextic_residual_has_two_orders() {
    let v = Potential::polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.01]).unwrap();
    assert_eq!(residual_orders(&v), vec![3, 5]);
}

#[test]
fn quartic_residual_has_zero_mass_and_balanced_parts() {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    let d = residual_diagnostics(&w, &Potential::quartic(0.02));
    assert!(d.chi_q > 0.0);
    assert!((d.source_mass - d.sink_mass).abs() <= 1e-12);
    assert!(
        moyal_residual(&w, &Potential::quartic(0.02))
            .integral()
            .abs()
            <= 1e-13
    );
}

#[test]
fn inconsistent_decomposition_is_rejected() {
    let g = GridSpec::new(4, 1.0, 4, 1.0).unwrap();
    let k = PhaseField::from_fn(g, |q, p| q - p);
    let split = hahn_jordan_split(&k);
    let wrong = split.positive_part.scaled(2.0);
    assert!(matches!(
        minimality_check(&k, &wrong, &split.negative_part),
        Err(Error::DecompositionMismatch { .. })
    ));
}

fn field() -> impl Strategy<Value = PhaseField> {
    (
        1e-3f64..1e3,
        prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], 144),
    )
        .prop_map(|(scale, v)| {
            PhaseField::new(
                GridSpec::new(12, 0.5, 12, 0.5).unwrap(),
                v.into_iter().map(|x| x * scale).collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hahn_jordan_properties(k in field(), pad in prop::collection::vec(0.0f64..2.0, 144)) {
        let s = hahn_jordan_split(&k);
        prop_assert!(s.disjoint());
        prop_assert_eq!(s.reconstruct(), k.clone());
        prop_assert!(s.positive_part.min() >= 0.0 && s.negative_part.min() >= 0.0);
        let scale = k.l1_norm().max(1.0);
        prop_assert!((s.activity() - k.l1_norm()).abs() <= 1e-12 * scale);

        let m = minimality_check(&k, &s.positive_part, &s.negative_part).unwrap();
        prop_assert!(m.holds);
        prop_assert!(m.excess.abs() <= 1e-12 * scale);

        let pad = PhaseField::new(k.grid, pad.into_iter().map(|x| x * k.max_abs()).collect()).unwrap();
        let plus = |a: &PhaseField| PhaseField::new(k.grid, a.values.iter().zip(&pad.values).map(|(x, y)| x + y).collect()).unwrap();
        let m = minimality_check(&k, &plus(&s.positive_part), &plus(&s.negative_part)).unwrap();
        prop_assert!(m.holds);
        prop_assert!((m.excess - 2.0 * pad.integral()).abs() <= 1e-10 * scale);
    }
}
