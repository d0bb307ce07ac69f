//! ψ → W → ρ(x, x′) for the benchmark superposition, with marginals and purity.

use wigner_carrier::grid::GridSpec;
use wigner_carrier::schrodinger::init_superposition_02;
use wigner_carrier::wigner::{
    inverse_wigner, marginals, purity, superposition_02_wigner, wigner_direct_quadrature,
    wigner_from_wavefunction,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GridSpec::balanced();
    let psi = init_superposition_02(g)?;
    let w = wigner_from_wavefunction(&psi, &g)?;

    let mut closed = 0.0f64;
    for i in 0..g.n_q {
        for j in 0..g.n_p {
            closed = closed.max((w.at(i, j) - superposition_02_wigner(g.q(i), g.p(j))).abs());
        }
    }
    let (rho_q, _) = marginals(&w);
    let marginal = rho_q
        .iter()
        .zip(psi.density())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("grid {}x{}, dq {} dp {:.6}", g.n_q, g.n_p, g.dq, g.dp);
    println!(
        "norm {:.15}, purity {:.12}, min W {:.6}",
        w.integral(),
        purity(&w),
        w.min()
    );
    println!("max |W - closed form| {closed:.3e}");
    println!("max |rho_q - |psi|^2| {marginal:.3e}");
    println!(
        "max |rho(x,x') - psi psi*| {:.3e}",
        inverse_wigner(&w)?.max_abs_diff_from_pure(&psi)
    );

    // The direct sum is cubic in the grid size, so check it on a small grid.
    let small = GridSpec::for_wigner(32, 0.45)?;
    let psi = wigner_carrier::grid::WaveField::from_fn(small, |q| {
        num_complex::Complex64::from_polar((-(q - 0.5) * (q - 0.5) / 2.0).exp(), 0.7 * q)
    });
    let fft = wigner_from_wavefunction(&psi, &small)?;
    let direct = wigner_direct_quadrature(&psi, &small)?;
    println!(
        "32-point FFT vs direct sum {:.3e}",
        fft.max_abs_diff(&direct)?
    );
    Ok(())
}
