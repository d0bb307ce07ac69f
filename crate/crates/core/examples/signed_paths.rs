//! Signed path ratios built from Wigner fields and from a random ensemble.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wigner_carrier::bench::{pathwise_identity_residual, random_ensemble};
use wigner_carrier::grid::{GridSpec, Potential};
use wigner_carrier::paths::{
    default_envelope, ensemble_from_wigner_fields, integral_identity_check,
    interference_parity_stats, ratio_decomposition, theta_reflect, DEFAULT_ENVELOPE_EPSILON,
};
use wigner_carrier::schrodinger::{evolve_tdse, init_superposition_02, TdseConfig};
use wigner_carrier::wigner::wigner_from_wavefunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GridSpec::balanced();
    let psi0 = init_superposition_02(g)?;
    let run = evolve_tdse(&psi0, &Potential::quartic(0.05), &TdseConfig::default())?;

    for (label, psi) in [("t = 0", &psi0), ("t = t_f", run.snapshots.last().unwrap())] {
        let w = wigner_from_wavefunction(psi, &g)?;
        let e = ensemble_from_wigner_fields(
            &w,
            &theta_reflect(&w)?,
            &default_envelope(&w, DEFAULT_ENVELOPE_EPSILON),
        )?;
        let floor = e.default_weight_floor();
        let d = ratio_decomposition(&e, floor)?;
        let (count, mass) = interference_parity_stats(&d, &e);
        let a_mag = d.included().fold(0.0f64, |m, i| m.max(d.a_mag[i].abs()));
        let id = integral_identity_check(&e, floor)?;
        println!(
            "{label}: {} paths, max |a_mag| {a_mag:.3e}, a_sign = -1 for {count:.3} by count {mass:.3} by mass, identity residual {:.1e}",
            d.included_count(),
            id.residual
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let e = random_ensemble(&mut rng, 20, 0.2)?;
    let floor = e.default_weight_floor();
    let id = integral_identity_check(&e, floor)?;
    println!(
        "random ensemble: lhs {:.6} rhs {:.6}, pathwise residual {:.1e}",
        id.lhs,
        id.rhs,
        pathwise_identity_residual(&e, floor)?
    );
    Ok(())
}
