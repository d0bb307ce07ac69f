use proptest::prelude::*;

use wigner_carrier::error::Error;
use wigner_carrier::grid::{GridSpec, PhaseField};
use wigner_carrier::paths::{
    default_envelope, ensemble_from_wigner_fields, integral_identity_check,
    interference_parity_stats, normalized_signed_integral, ratio_decomposition, theta_reflect,
    PathEnsemble, ThetaMap, DEFAULT_ENVELOPE_EPSILON,
};
use wigner_carrier::schrodinger::init_superposition_02;
use wigner_carrier::wigner::{superposition_02_wigner, wigner_from_wavefunction};

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn ensemble() -> impl Strategy<Value = PathEnsemble> {
    (2usize..80).prop_flat_map(|n| {
        let law = prop::collection::vec(0.01f64..1.0, n).prop_map(normalized);
        let weight = prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => -5.0f64..5.0], n);
        (law.clone(), law, weight.clone(), weight).prop_filter_map(
            "common support",
            |(pf, pr, wf, wr)| {
                let e = PathEnsemble::new(pf, pr, wf, wr).ok()?;
                ratio_decomposition(&e, e.default_weight_floor()).ok()?;
                Some(e)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pathwise_and_integral_identities(e in ensemble()) {
        let floor = e.default_weight_floor();
        let d = ratio_decomposition(&e, floor).unwrap();
        for i in d.included() {
            let f = e.forward_mass(i);
            prop_assert!((d.ratio(i) * e.reverse_mass(i) - f).abs() <= 1e-12 * f.abs());
            prop_assert_eq!(d.a_mag[i], d.a_cl[i] + d.a_w[i]);
            prop_assert!(d.a_sign[i] == 1 || d.a_sign[i] == -1);
        }
        let id = integral_identity_check(&e, floor).unwrap();
        prop_assert!(id.residual <= 1e-12);
        let total_f: f64 = (0..e.len()).map(|i| e.forward_mass(i)).sum();
        let total_r: f64 = (0..e.len()).map(|i| e.reverse_mass(i)).sum();
        let included_f: f64 = d.included().map(|i| e.forward_mass(i)).sum();
        prop_assert!((included_f + id.excluded_forward_mass - total_f).abs() <= 1e-12);
        prop_assert!((id.rhs + id.excluded_reverse_mass - total_r).abs() <= 1e-12);
    }
}

#[test]
fn theta_symmetric_field_has_trivial_ratios() {
    let g = GridSpec::balanced();
    let w = wigner_from_wavefunction(&init_superposition_02(g).unwrap(), &g).unwrap();
    let reflected = theta_reflect(&w).unwrap();
    assert_eq!(reflected, w);
    let e = ensemble_from_wigner_fields(
        &w,
        &reflected,
        &default_envelope(&w, DEFAULT_ENVELOPE_EPSILON),
    )
    .unwrap();
    let floor = e.default_weight_floor();
    let d = ratio_decomposition(&e, floor).unwrap();
    assert!(d.included_count() > 0);
    for i in d.included() {
        assert_eq!(d.a_sign[i], 1);
        assert!(d.a_mag[i].abs() <= 1e-10);
    }
    let (count, mass) = interference_parity_stats(&d, &e);
    assert_eq!((count, mass), (0.0, 0.0));
    let s = normalized_signed_integral(&e, floor).unwrap();
    assert!((s - 1.0).abs() <= 1e-12);
}

#[test]
fn momentum_asymmetric_field_has_negative_parity_paths() {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, |q, p| {
        superposition_02_wigner(q, p) * (1.0 + 0.3 * p.tanh())
    });
    let e =
        ensemble_from_wigner_fields(&w, &theta_reflect(&w).unwrap(), &default_envelope(&w, 1e-8))
            .unwrap();
    let d = ratio_decomposition(&e, e.default_weight_floor()).unwrap();
    assert!(d.included().any(|i| d.a_mag[i].abs() > 1e-3));
    let id = integral_identity_check(&e, e.default_weight_floor()).unwrap();
    assert!(id.residual <= 1e-12);
}

#[test]
fn theta_map_reverses_momentum() {
    assert_eq!(ThetaMap.apply((0.3, -1.2)), (0.3, 1.2));
    assert_eq!(ThetaMap.mirror_index(0, 8), 0);
    assert_eq!(ThetaMap.mirror_index(3, 8), 5);
    assert_eq!(ThetaMap.reverse_protocol(&vec![1, 2]), vec![1, 2]);
    assert!(GridSpec::new(4, 0.5, 5, 0.5).is_err());
}

#[test]
fn invalid_ensembles_are_rejected() {
    assert!(matches!(
        PathEnsemble::new(
            vec![0.5, 0.6],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            vec![1.0, 1.0]
        ),
        Err(Error::InvalidEnsemble(_))
    ));
    assert!(PathEnsemble::new(
        vec![1.0, 0.0],
        vec![0.5, 0.5],
        vec![1.0, 1.0],
        vec![1.0, 1.0]
    )
    .is_err());
    assert!(PathEnsemble::new(vec![1.0], vec![0.5, 0.5], vec![1.0], vec![1.0, 1.0]).is_err());
    let e = PathEnsemble::new(
        vec![0.5, 0.5],
        vec![0.5, 0.5],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    )
    .unwrap();
    assert!(matches!(
        ratio_decomposition(&e, 0.0),
        Err(Error::EmptySupport)
    ));
    let id = integral_identity_check(&e, 0.0).unwrap();
    assert_eq!((id.lhs, id.rhs), (0.0, 0.0));
    assert_eq!(
        (id.excluded_forward_mass, id.excluded_reverse_mass),
        (0.5, 0.5)
    );
    assert!(ratio_decomposition(&e, -1.0).is_err());
}

#[test]
fn envelope_must_be_positive() {
    let g = GridSpec::new(8, 0.5, 8, 0.5).unwrap();
    let w = PhaseField::from_fn(g, |_, _| 0.25);
    let mut env = PhaseField::from_fn(g, |_, _| 0.25);
    env.values[3] = 0.0;
    assert!(matches!(
        ensemble_from_wigner_fields(&w, &w, &env),
        Err(Error::NonPositiveEnvelope { index: 3, .. })
    ));
    let env = PhaseField::from_fn(g, |_, _| 0.5);
    assert!(matches!(
        ensemble_from_wigner_fields(&w, &w, &env),
        Err(Error::InvalidEnsemble(_))
    ));
}
