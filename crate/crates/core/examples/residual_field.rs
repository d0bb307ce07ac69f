//! The Moyal residual of the quartic superposition and its source/sink split.

use wigner_carrier::grid::{GridSpec, PhaseField, Potential};
use wigner_carrier::residual::{
    hahn_jordan_split, minimality_check, moyal_residual, residual_diagnostics,
};
use wigner_carrier::wigner::superposition_02_wigner;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GridSpec::balanced();
    let w = PhaseField::from_fn(g, superposition_02_wigner);
    let v = Potential::quartic(0.02);

    let q = moyal_residual(&w, &v);
    let split = hahn_jordan_split(&q);
    let d = residual_diagnostics(&w, &v);
    println!(
        "chi_Q {:.4e}, epsilon_Q {:.4e}",
        d.chi_q,
        d.epsilon_q.unwrap_or(f64::NAN)
    );
    println!(
        "source {:.6e} sink {:.6e} net {:.1e}",
        d.source_mass,
        d.sink_mass,
        q.integral()
    );
    println!(
        "disjoint {}, exact {}",
        split.disjoint(),
        split.reconstruct() == q
    );

    // Any other decomposition K = K1 − K2 pays twice the padding.
    let pad = PhaseField::from_fn(g, |q, p| 1e-3 * (-(q * q + p * p)).exp());
    let plus = |a: &PhaseField| PhaseField {
        grid: g,
        values: a
            .values
            .iter()
            .zip(&pad.values)
            .map(|(x, y)| x + y)
            .collect(),
    };
    let m = minimality_check(&q, &plus(&split.positive_part), &plus(&split.negative_part))?;
    println!(
        "padded excess {:.6e} = 2 x {:.6e}",
        m.excess,
        pad.integral()
    );

    for lambda in [0.01, 0.04] {
        let r = moyal_residual(&w, &Potential::quartic(lambda));
        println!("lambda {lambda}: |Q|_2 {:.6e}", r.l2_norm());
    }
    Ok(())
}
