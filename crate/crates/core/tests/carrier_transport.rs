use std::f64::consts::PI;

use wigner_carrier::carrier::{
    classical_flow, liouville_step, rotate_exact_harmonic, FlowConfig, Integrator, Interpolation,
    TransportMap,
};
use wigner_carrier::grid::{GridSpec, PhaseField, Potential};
use wigner_carrier::reconstruction::{evolve_classical_only, EvolutionConfig};
use wigner_carrier::wigner::superposition_02_wigner;

fn rotated_exact(g: GridSpec, t: f64) -> PhaseField {
    let (s, c) = t.sin_cos();
    PhaseField::from_fn(g, |q, p| {
        superposition_02_wigner(q * c - p * s, q * s + p * c)
    })
}

#[test]
fn harmonic_transport_is_rigid_rotation() {
    let g = GridSpec::balanced();
    let w0 = PhaseField::from_fn(g, superposition_02_wigner);
    let run =
        evolve_classical_only(&w0, &Potential::harmonic(), &EvolutionConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for (t, w) in run.times.iter().zip(&run.snapshots) {
        worst = worst.max(w.max_abs_diff(&rotated_exact(g, *t)).unwrap());
    }
    assert!(worst <= 2e-4, "{worst:e}");
    assert!((run.snapshots.last().unwrap().integral() - 1.0).abs() <= 1e-9);
}

#[test]
fn interpolation_order_controls_error() {
    let g = GridSpec::balanced();
    let w0 = PhaseField::from_fn(g, superposition_02_wigner);
    let exact = rotated_exact(g, 0.3);
    let err = |m| {
        rotate_exact_harmonic(&w0, 0.3, m)
            .max_abs_diff(&exact)
            .unwrap()
    };
    let (c, q, s) = (
        err(Interpolation::Cubic),
        err(Interpolation::Quintic),
        err(Interpolation::Septic),
    );
    assert!(s < q && q < c, "{c:e} {q:e} {s:e}");
    assert!(s <= 1e-5);
}

#[test]
fn transport_carries_expectations_along_trajectories() {
    // ∫ W(t) f = ∫ W(0) f∘Φ_t for any observable f.
    let g = GridSpec::balanced();
    let v = Potential::quartic(0.05);
    let w0 = PhaseField::from_fn(g, |q, p| {
        (-((q - 1.0).powi(2) + (p + 0.5).powi(2)) / 0.5).exp() / (0.5 * PI)
    });
    let cfg = FlowConfig::new(0.01);
    let steps = 50;
    let mut w = w0.clone();
    for _ in 0..steps {
        w = liouville_step(&w, &v, &cfg).unwrap();
    }
    let t = steps as f64 * cfg.dt;
    let (mut q_ref, mut p_ref) = (0.0, 0.0);
    let (mut q_num, mut p_num) = (0.0, 0.0);
    for i in 0..g.n_q {
        for j in 0..g.n_p {
            let (q, p) = (g.q(i), g.p(j));
            let a = w0.at(i, j);
            if a > 1e-16 {
                let (qt, pt) = classical_flow((q, p), &v, t, 1e-3);
                q_ref += a * qt;
                p_ref += a * pt;
            }
            q_num += w.at(i, j) * q;
            p_num += w.at(i, j) * p;
        }
    }
    let cell = g.cell();
    assert!(
        ((q_num - q_ref) * cell).abs() <= 1e-6,
        "{} {}",
        q_num * cell,
        q_ref * cell
    );
    assert!(
        ((p_num - p_ref) * cell).abs() <= 1e-6,
        "{} {}",
        p_num * cell,
        p_ref * cell
    );
}

#[test]
fn verlet_and_rk4_agree_on_short_flows() {
    let v = Potential::quartic(0.02);
    let z = (1.2, -0.4);
    let a = classical_flow(z, &v, 1.0, 1e-3);
    let b = wigner_carrier::carrier::classical_flow_with(z, &v, 1.0, 1e-3, Integrator::Verlet);
    assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6);
    let back = classical_flow(a, &v, -1.0, 1e-3);
    assert!((back.0 - z.0).abs() < 1e-12 && (back.1 - z.1).abs() < 1e-12);
}

#[test]
fn foot_points_outside_the_grid_give_zero() {
    let g = GridSpec::reduced();
    let w = PhaseField::from_fn(g, |_, _| 1.0);
    let shifted = TransportMap::from_foot_points(g, Interpolation::Septic, |q, p| (q + 100.0, p))
        .apply(&w)
        .unwrap();
    assert_eq!(shifted.max_abs(), 0.0);
}

#[test]
fn zero_step_is_identity() {
    let g = GridSpec::reduced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    assert_eq!(
        liouville_step(&w, &Potential::quartic(0.05), &FlowConfig::new(0.0)).unwrap(),
        w
    );
    assert!(liouville_step(&w, &Potential::harmonic(), &FlowConfig::new(-1.0)).is_err());
}
