//! Quartic well: carrier-only transport drifts from the Schrödinger reference,
//! carrier plus signed residual follows it.
//!
//! `cargo run --release --example quartic_reconstruct -- 0.05`

use wigner_carrier::grid::{GridSpec, Potential};
use wigner_carrier::reconstruction::{
    evolve_classical_only, evolve_with_residual, l2_error, EvolutionConfig,
};
use wigner_carrier::schrodinger::{evolve_tdse, init_superposition_02};
use wigner_carrier::wigner::wigner_from_wavefunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0.02);
    let g = GridSpec::balanced();
    let v = Potential::quartic(lambda);
    let cfg = EvolutionConfig::default();

    let psi0 = init_superposition_02(g)?;
    let tdse = evolve_tdse(&psi0, &v, &cfg.time)?;
    let w0 = wigner_from_wavefunction(&psi0, &g)?;
    let reference = wigner_from_wavefunction(tdse.snapshots.last().unwrap(), &g)?;

    let classical = evolve_classical_only(&w0, &v, &cfg)?;
    let corrected = evolve_with_residual(&w0, &v, &cfg)?;
    let ec = l2_error(classical.snapshots.last().unwrap(), &reference)?;
    let eq = l2_error(corrected.snapshots.last().unwrap(), &reference)?;

    println!(
        "lambda {lambda}, t_f {:.6}, norm drift {:.2e}",
        cfg.time.t_final, tdse.max_norm_drift
    );
    println!(
        "classical  L2 error abs {:.3e} rel {:.3e}",
        ec.absolute, ec.relative
    );
    println!(
        "corrected  L2 error abs {:.3e} rel {:.3e}",
        eq.absolute, eq.relative
    );
    println!("improvement {:.0}", ec.absolute / eq.absolute);
    Ok(())
}
