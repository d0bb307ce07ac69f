//! Two Fokker–Planck runs whose drifts differ but whose position marginals agree.

use wigner_carrier::underdetermination::{
    axis_variances, fokker_planck_evolve, gaussian_density, moment_orthogonal_demo,
    null_current_demo, square_grid, DemoConfig, DiffusionField, StaticDrift,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = DemoConfig::default();

    let grid = square_grid(cfg.n, cfg.h)?;
    let p0 = gaussian_density(grid, 0.0, 0.0, 1.0, 1.0);
    let heat = fokker_planck_evolve(
        &p0,
        &StaticDrift::zeros(grid),
        &DiffusionField::isotropic(grid, cfg.diffusion),
        cfg.dt,
        cfg.steps,
    )?;
    let (v0, _) = axis_variances(&p0);
    let (v1, w1) = axis_variances(heat.snapshots.last().unwrap());
    let t = heat.times.last().unwrap();
    println!(
        "variance growth q {:.6e} p {:.6e} (D·t = {:.6e})",
        v1 - v0,
        w1 - v0,
        cfg.diffusion * t
    );

    let null = null_current_demo(&cfg)?;
    println!(
        "null current: drift L2 difference {:.3e}",
        null.drift_l2_difference
    );
    println!(
        "  max marginal difference {:.3e} over {} steps",
        null.max_marginal_difference, null.steps
    );
    println!(
        "  max density difference {:.3e}, mass drift {:.3e}",
        null.max_density_difference, null.mass_drift
    );

    for order in [1, 2] {
        let m = moment_orthogonal_demo(&cfg, order)?;
        println!(
            "orthogonal current N={order}: low moments {:.3e}, M_{} change {:.3e}",
            m.max_low_moment_difference,
            order + 1,
            m.next_moment_difference
        );
    }
    Ok(())
}
