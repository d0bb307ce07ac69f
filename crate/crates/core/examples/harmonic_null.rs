//! Harmonic potential: the carrier alone is exact and the residual vanishes.

use wigner_carrier::grid::{GridSpec, PhaseField, Potential};
use wigner_carrier::reconstruction::{evolve_classical_only, EvolutionConfig};
use wigner_carrier::residual::{moyal_residual, residual_diagnostics};
use wigner_carrier::wigner::superposition_02_wigner;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GridSpec::balanced();
    let v = Potential::harmonic();
    let w0 = PhaseField::from_fn(g, superposition_02_wigner);
    println!("residual L2 norm {:e}", moyal_residual(&w0, &v).l2_norm());

    let cfg = EvolutionConfig::default();
    let run = evolve_classical_only(&w0, &v, &cfg)?;
    let mut worst = 0.0f64;
    for (t, w) in run.times.iter().zip(&run.snapshots) {
        let (s, c) = t.sin_cos();
        let exact = PhaseField::from_fn(g, |q, p| {
            superposition_02_wigner(q * c - p * s, q * s + p * c)
        });
        worst = worst.max(w.max_abs_diff(&exact)?);
        assert_eq!(residual_diagnostics(w, &v).chi_q, 0.0);
    }
    let last = run.snapshots.last().unwrap();
    println!(
        "{} steps to t = {:.6}",
        cfg.time.n_steps(),
        run.times.last().unwrap()
    );
    println!("max rotation error {worst:.3e}");
    println!("final norm error {:.3e}", (last.integral() - 1.0).abs());
    Ok(())
}
