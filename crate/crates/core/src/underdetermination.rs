//! Position marginals do not fix the phase-space current.
//!
//! A positive density `P(q,p,t)` obeys `∂_tP + ∂_qJ_q + ∂_pJ_p = 0` with
//! `J_i = A_iP − ½∂_j(D_ijP)`. The Born density only sees the p-integrated
//! current, so a null current `(∂_pC, −∂_qC)` or a q-current orthogonal in p
//! to low-order polynomials changes the drift without changing the marginal
//! (or the first few conditional moments).
//!
//! Derivatives are spectral and time stepping is classical RK4, which keeps
//! the update conservative to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseField};
use crate::spectral::{derivative_p, derivative_q};

/// Density below which drift recovery falls back to the base drift.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// RK4 stays stable for `dt·λ ≤ 2.5`, with `λ` the largest generator modulus.
const RK4_STABILITY: f64 = 2.5;

/// Negative undershoot tolerated without a warning flag.
pub const UNDERSHOOT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentPair {
    pub j_q: PhaseField,
    pub j_p: PhaseField,
}

impl CurrentPair {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            j_q: PhaseField::zeros(grid),
            j_p: PhaseField::zeros(grid),
        }
    }

    fn plus(&self, other: &CurrentPair) -> Self {
        Self {
            j_q: add(&self.j_q, &other.j_q, 1.0),
            j_p: add(&self.j_p, &other.j_p, 1.0),
        }
    }
}

fn add(a: &PhaseField, b: &PhaseField, s: f64) -> PhaseField {
    PhaseField {
        grid: a.grid,
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x + s * y)
            .collect(),
    }
}

fn mul(a: &PhaseField, b: &PhaseField) -> PhaseField {
    PhaseField {
        grid: a.grid,
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    }
}

/// `(J_q + ∂_pC, J_p − ∂_qC)`.
pub fn null_current_perturbation(j: &CurrentPair, c: &PhaseField) -> Result<CurrentPair> {
    j.j_q.grid.ensure_same(&c.grid)?;
    j.j_p.grid.ensure_same(&c.grid)?;
    Ok(CurrentPair {
        j_q: add(&j.j_q, &derivative_p(c, 1), 1.0),
        j_p: add(&j.j_p, &derivative_q(c, 1), -1.0),
    })
}

/// `∂_qJ_q + ∂_pJ_p`.
pub fn divergence(j: &CurrentPair) -> PhaseField {
    add(&derivative_q(&j.j_q, 1), &derivative_p(&j.j_p, 1), 1.0)
}

/// `∑_p J_q·dp` per position.
pub fn marginal_current(j_q: &PhaseField) -> Vec<f64> {
    let g = j_q.grid;
    (0..g.n_q)
        .map(|i| j_q.row(i).iter().sum::<f64>() * g.dp)
        .collect()
}

/// `M_k(q) = ∑_p p^k P·dp` for `k = 0..=n`.
pub fn moment_constraints(p: &PhaseField, n: usize) -> Vec<Vec<f64>> {
    let g = p.grid;
    (0..=n)
        .map(|k| {
            (0..g.n_q)
                .map(|i| {
                    p.row(i)
                        .iter()
                        .enumerate()
                        .map(|(j, v)| g.p(j).powi(k as i32) * v)
                        .sum::<f64>()
                        * g.dp
                })
                .collect()
        })
        .collect()
}

/// Symmetric diffusion matrix field.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    pub d_qq: PhaseField,
    pub d_qp: PhaseField,
    pub d_pp: PhaseField,
}

impl DiffusionField {
    pub fn isotropic(grid: GridSpec, d: f64) -> Self {
        let c = PhaseField::from_fn(grid, |_, _| d);
        Self {
            d_qq: c.clone(),
            d_qp: PhaseField::zeros(grid),
            d_pp: c,
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::isotropic(grid, 0.0)
    }

    pub fn grid(&self) -> GridSpec {
        self.d_qq.grid
    }

    /// Pointwise positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let g = self.grid();
        g.ensure_same(&self.d_qp.grid)?;
        g.ensure_same(&self.d_pp.grid)?;
        for k in 0..g.len() {
            let (a, b, c) = (
                self.d_qq.values[k],
                self.d_qp.values[k],
                self.d_pp.values[k],
            );
            let tol = 1e-14 * (a.abs() + c.abs()).max(1.0);
            if !(a.is_finite() && b.is_finite() && c.is_finite())
                || a < -tol
                || c < -tol
                || a * c - b * b < -tol
            {
                return Err(Error::InvalidConfig(format!(
                    "diffusion is not positive semidefinite at index {k}: ({a}, {b}, {c})"
                )));
            }
        }
        Ok(())
    }
}

/// A drift field, possibly depending on the current density.
pub trait Drift {
    /// `(A_q, A_p)` evaluated for density `p`.
    fn evaluate(&self, p: &PhaseField) -> (PhaseField, PhaseField);
}

/// A drift that does not depend on the density.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticDrift {
    pub a_q: PhaseField,
    pub a_p: PhaseField,
}

impl StaticDrift {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            a_q: PhaseField::zeros(grid),
            a_p: PhaseField::zeros(grid),
        }
    }
}

impl Drift for StaticDrift {
    fn evaluate(&self, _p: &PhaseField) -> (PhaseField, PhaseField) {
        (self.a_q.clone(), self.a_p.clone())
    }
}

/// `J_i = A_iP − ½∂_j(D_ijP)`.
pub fn fokker_planck_current(
    p: &PhaseField,
    a_q: &PhaseField,
    a_p: &PhaseField,
    d: &DiffusionField,
) -> CurrentPair {
    let (dqq, dqp, dpp) = (mul(&d.d_qq, p), mul(&d.d_qp, p), mul(&d.d_pp, p));
    let spread_q = add(&derivative_q(&dqq, 1), &derivative_p(&dqp, 1), 1.0);
    let spread_p = add(&derivative_q(&dqp, 1), &derivative_p(&dpp, 1), 1.0);
    CurrentPair {
        j_q: add(&mul(a_q, p), &spread_q, -0.5),
        j_p: add(&mul(a_p, p), &spread_p, -0.5),
    }
}

/// `A_i = (J_i + ½∂_j(D_ijP))/P` where `P ≥ floor`, `fallback` elsewhere.
pub fn drift_from_current(
    j: &CurrentPair,
    p: &PhaseField,
    d: &DiffusionField,
    floor: f64,
    fallback: &StaticDrift,
) -> (PhaseField, PhaseField) {
    let zero = PhaseField::zeros(p.grid);
    // The zero-drift current is exactly −½∂_j(D_ijP).
    let spread = fokker_planck_current(p, &zero, &zero, d);
    let recover = |ji: &PhaseField, si: &PhaseField, base: &PhaseField| {
        let values = (0..p.values.len())
            .map(|k| {
                let rho = p.values[k];
                if rho >= floor {
                    (ji.values[k] - si.values[k]) / rho
                } else {
                    base.values[k]
                }
            })
            .collect();
        PhaseField {
            grid: p.grid,
            values,
        }
    };
    (
        recover(&j.j_q, &spread.j_q, &fallback.a_q),
        recover(&j.j_p, &spread.j_p, &fallback.a_p),
    )
}

/// Drift realizing `J_base(P) + extra` for whatever density it is evaluated on.
#[derive(Debug, Clone)]
pub struct RecoveredDrift {
    pub base: StaticDrift,
    pub extra: CurrentPair,
    pub diffusion: DiffusionField,
    pub floor: f64,
}

impl Drift for RecoveredDrift {
    fn evaluate(&self, p: &PhaseField) -> (PhaseField, PhaseField) {
        let j = fokker_planck_current(p, &self.base.a_q, &self.base.a_p, &self.diffusion)
            .plus(&self.extra);
        drift_from_current(&j, p, &self.diffusion, self.floor, &self.base)
    }
}

#[derive(Debug, Clone)]
pub struct FpRun {
    pub times: Vec<f64>,
    pub snapshots: Vec<PhaseField>,
    /// `max_t |∑P(t) − ∑P(0)|·dq·dp`.
    pub mass_drift: f64,
    pub min_value: f64,
    /// Set when some snapshot undershoots below `−UNDERSHOOT_TOLERANCE`.
    pub positivity_warning: bool,
}

fn stiffness(a_q: &PhaseField, a_p: &PhaseField, d: &DiffusionField) -> f64 {
    let g = a_q.grid;
    let kq = std::f64::consts::PI / g.dq;
    let kp = std::f64::consts::PI / g.dp;
    a_q.max_abs() * kq
        + a_p.max_abs() * kp
        + 0.5
            * (d.d_qq.max_abs() * kq * kq
                + d.d_pp.max_abs() * kp * kp
                + 2.0 * d.d_qp.max_abs() * kq * kp)
}

fn rhs(p: &PhaseField, drift: &dyn Drift, d: &DiffusionField, dt: f64) -> Result<PhaseField> {
    let (a_q, a_p) = drift.evaluate(p);
    let lambda = stiffness(&a_q, &a_p, d);
    if dt * lambda > RK4_STABILITY {
        return Err(Error::Cfl {
            dt,
            limit: RK4_STABILITY / lambda,
        });
    }
    Ok(divergence(&fokker_planck_current(p, &a_q, &a_p, d)).scaled(-1.0))
}

/// `∂_tP = −∂_i(A_iP) + ½∂_i∂_j(D_ijP)` by RK4, returning `steps + 1` snapshots.
pub fn fokker_planck_evolve(
    p0: &PhaseField,
    drift: &dyn Drift,
    diffusion: &DiffusionField,
    dt: f64,
    steps: usize,
) -> Result<FpRun> {
    p0.grid.ensure_same(&diffusion.grid())?;
    diffusion.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if p0.min() < -UNDERSHOOT_TOLERANCE {
        return Err(Error::InvalidConfig(format!(
            "initial density has minimum {}",
            p0.min()
        )));
    }
    let mass0 = p0.integral();
    let mut run = FpRun {
        times: vec![0.0],
        snapshots: vec![p0.clone()],
        mass_drift: 0.0,
        min_value: p0.min(),
        positivity_warning: false,
    };
    let mut p = p0.clone();
    for step in 0..steps {
        let k1 = rhs(&p, drift, diffusion, dt)?;
        let k2 = rhs(&add(&p, &k1, 0.5 * dt), drift, diffusion, dt)?;
        let k3 = rhs(&add(&p, &k2, 0.5 * dt), drift, diffusion, dt)?;
        let k4 = rhs(&add(&p, &k3, dt), drift, diffusion, dt)?;
        for k in 0..p.values.len() {
            p.values[k] +=
                dt / 6.0 * (k1.values[k] + 2.0 * k2.values[k] + 2.0 * k3.values[k] + k4.values[k]);
        }
        let min = p.min();
        run.min_value = run.min_value.min(min);
        run.positivity_warning |= min < -UNDERSHOOT_TOLERANCE;
        run.mass_drift = run.mass_drift.max((p.integral() - mass0).abs());
        run.times.push((step + 1) as f64 * dt);
        run.snapshots.push(p.clone());
    }
    Ok(run)
}

/// Normalized Gaussian density with independent axes.
pub fn gaussian_density(
    grid: GridSpec,
    q0: f64,
    p0: f64,
    sigma_q: f64,
    sigma_p: f64,
) -> PhaseField {
    let mut f = PhaseField::from_fn(grid, |q, p| {
        (-(q - q0).powi(2) / (2.0 * sigma_q * sigma_q)
            - (p - p0).powi(2) / (2.0 * sigma_p * sigma_p))
            .exp()
    });
    let total = f.integral();
    for v in &mut f.values {
        *v /= total;
    }
    f
}

/// Variance of the q and p marginals.
pub fn axis_variances(p: &PhaseField) -> (f64, f64) {
    let g = p.grid;
    let mass = p.integral();
    let (mut mq, mut mp, mut qq, mut pp) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..g.n_q {
        for j in 0..g.n_p {
            let v = p.at(i, j) * g.cell();
            mq += g.q(i) * v;
            mp += g.p(j) * v;
            qq += g.q(i) * g.q(i) * v;
            pp += g.p(j) * g.p(j) * v;
        }
    }
    let (mq, mp) = (mq / mass, mp / mass);
    (qq / mass - mq * mq, pp / mass - mp * mp)
}

/// Square grid of `n` points per axis with step `h`.
pub fn square_grid(n: usize, h: f64) -> Result<GridSpec> {
    GridSpec::new(n, h, n, h)
}

/// Settings shared by the two demonstrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub n: usize,
    pub h: f64,
    pub diffusion: f64,
    pub dt: f64,
    pub steps: usize,
    /// Amplitude of the stream function or of the orthogonal current.
    pub amplitude: f64,
    pub floor: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n: 128,
            h: 0.125,
            diffusion: 0.1,
            dt: 1e-3,
            steps: 100,
            amplitude: 0.05,
            floor: DEFAULT_DENSITY_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullCurrentReport {
    pub steps: usize,
    /// `‖A′ − A‖₂` at t = 0 over both components.
    pub drift_l2_difference: f64,
    /// Max over snapshots of `max_q |ρ′ − ρ|`.
    pub max_marginal_difference: f64,
    pub max_density_difference: f64,
    pub max_divergence_difference: f64,
    pub max_marginal_current: f64,
    pub mass_drift: f64,
    pub positivity_warning: bool,
    pub times: Vec<f64>,
    /// `max_q |ρ′ − ρ|` per snapshot.
    pub marginal_differences: Vec<f64>,
    /// `max |P′ − P|` per snapshot.
    pub density_differences: Vec<f64>,
}

fn position_marginal(p: &PhaseField) -> Vec<f64> {
    moment_constraints(p, 0).remove(0)
}

fn max_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Stream-function bump `C = a·exp(−|z − z₀|²/(2w²))`.
pub fn bump_stream_function(
    grid: GridSpec,
    amplitude: f64,
    centre: (f64, f64),
    width: f64,
) -> PhaseField {
    PhaseField::from_fn(grid, |q, p| {
        amplitude
            * (-((q - centre.0).powi(2) + (p - centre.1).powi(2)) / (2.0 * width * width)).exp()
    })
}

/// Runs the unperturbed and null-current-perturbed Fokker–Planck equations
/// from the same Gaussian and compares their marginals.
pub fn null_current_demo(cfg: &DemoConfig) -> Result<NullCurrentReport> {
    let grid = square_grid(cfg.n, cfg.h)?;
    let p0 = gaussian_density(grid, 0.0, 0.0, 1.0, 1.0);
    let d = DiffusionField::isotropic(grid, cfg.diffusion);
    let base = StaticDrift::zeros(grid);
    let c = bump_stream_function(grid, cfg.amplitude, (0.5, -0.3), 0.5);
    let extra = null_current_perturbation(&CurrentPair::zeros(grid), &c)?;
    let perturbed = RecoveredDrift {
        base: base.clone(),
        extra: extra.clone(),
        diffusion: d.clone(),
        floor: cfg.floor,
    };

    let (aq, ap) = perturbed.evaluate(&p0);
    let drift_l2_difference = (aq.l2_norm().powi(2) + ap.l2_norm().powi(2)).sqrt();
    let j0 = fokker_planck_current(&p0, &base.a_q, &base.a_p, &d);
    let max_divergence_difference = divergence(&j0.plus(&extra)).max_abs_diff(&divergence(&j0))?;
    let max_marginal_current = marginal_current(&extra.j_q)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let a = fokker_planck_evolve(&p0, &base, &d, cfg.dt, cfg.steps)?;
    let b = fokker_planck_evolve(&p0, &perturbed, &d, cfg.dt, cfg.steps)?;
    let mut marginal_differences = Vec::with_capacity(a.snapshots.len());
    let mut density_differences = Vec::with_capacity(a.snapshots.len());
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        marginal_differences.push(max_vec_diff(&position_marginal(x), &position_marginal(y)));
        density_differences.push(x.max_abs_diff(y)?);
    }
    let max_of = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(NullCurrentReport {
        steps: cfg.steps,
        drift_l2_difference,
        max_marginal_difference: max_of(&marginal_differences),
        max_density_difference: max_of(&density_differences),
        max_divergence_difference,
        max_marginal_current,
        mass_drift: a.mass_drift.max(b.mass_drift),
        positivity_warning: a.positivity_warning || b.positivity_warning,
        times: a.times,
        marginal_differences,
        density_differences,
    })
}

/// `He_{n}(p) e^{−p²}` orthogonalized on the grid against `1, p, …, p^{n−1}`.
pub fn orthogonal_profile(grid: &GridSpec, n: usize) -> Vec<f64> {
    let ps = grid.p_axis();
    let hermite = |x: f64| {
        let (mut a, mut b) = (1.0, x);
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = x * b - k as f64 * a;
            a = b;
            b = c;
        }
        b
    };
    let mut phi: Vec<f64> = ps.iter().map(|&p| hermite(p) * (-p * p).exp()).collect();
    // Subtract ∑_b c_b p^b e^{−p²} so that ∑_j φ_j p_j^a = 0 for a < n.
    // A second pass removes the round-off left by the first.
    let weight: Vec<f64> = ps.iter().map(|p| (-p * p).exp()).collect();
    let m: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    ps.iter()
                        .zip(&weight)
                        .map(|(p, w)| p.powi((a + b) as i32) * w)
                        .sum()
                })
                .collect()
        })
        .collect();
    for _ in 0..2 {
        let r: Vec<f64> = (0..n)
            .map(|a| ps.iter().zip(&phi).map(|(p, f)| p.powi(a as i32) * f).sum())
            .collect();
        let coef = solve(m.clone(), r);
        for (j, p) in ps.iter().enumerate() {
            phi[j] -= (0..n).map(|b| coef[b] * p.powi(b as i32)).sum::<f64>() * weight[j];
        }
    }
    phi
}

/// Gaussian elimination with partial pivoting for a small dense system.
fn solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Vec<f64> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (r[row] - s) / m[row][row];
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: usize,
    /// Max over snapshots, `k ≤ order` and q of `|M_k′ − M_k|`.
    pub max_low_moment_difference: f64,
    /// Max over q of `|M_{order+1}′ − M_{order+1}|` at the final snapshot.
    pub next_moment_difference: f64,
}

/// Perturbs the q-current by `c(q)φ(p)` with `φ ⟂ {1, …, p^order}` and
/// compares the conditional moments of the two runs.
pub fn moment_orthogonal_demo(cfg: &DemoConfig, order: usize) -> Result<MomentReport> {
    let grid = square_grid(cfg.n, cfg.h)?;
    let p0 = gaussian_density(grid, 0.0, 0.0, 1.0, 1.0);
    let d = DiffusionField::isotropic(grid, cfg.diffusion);
    let base = StaticDrift::zeros(grid);
    let phi = orthogonal_profile(&grid, order + 1);
    let j_q = PhaseField::from_fn(grid, |q, _| cfg.amplitude * (-(q - 0.5).powi(2)).exp());
    let mut j_q = j_q;
    for i in 0..grid.n_q {
        for j in 0..grid.n_p {
            j_q.values[grid.index(i, j)] *= phi[j];
        }
    }
    let extra = CurrentPair {
        j_q,
        j_p: PhaseField::zeros(grid),
    };
    let perturbed = RecoveredDrift {
        base: base.clone(),
        extra,
        diffusion: d.clone(),
        floor: cfg.floor,
    };
    let a = fokker_planck_evolve(&p0, &base, &d, cfg.dt, cfg.steps)?;
    let b = fokker_planck_evolve(&p0, &perturbed, &d, cfg.dt, cfg.steps)?;
    let mut low = 0.0f64;
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        let (mx, my) = (moment_constraints(x, order), moment_constraints(y, order));
        for k in 0..=order {
            low = low.max(max_vec_diff(&mx[k], &my[k]));
        }
    }
    let last_a = moment_constraints(a.snapshots.last().unwrap(), order + 1);
    let last_b = moment_constraints(b.snapshots.last().unwrap(), order + 1);
    Ok(MomentReport {
        order,
        max_low_moment_difference: low,
        next_moment_difference: max_vec_diff(&last_a[order + 1], &last_b[order + 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        square_grid(64, 0.25).unwrap()
    }

    #[test]
    fn null_current_leaves_divergence_and_marginal_current() {
        let g = grid();
        let c = bump_stream_function(g, 0.3, (0.2, -0.4), 0.6);
        let j = CurrentPair {
            j_q: PhaseField::from_fn(g, |q, p| p * (-(q * q + p * p) / 2.0).exp()),
            j_p: PhaseField::from_fn(g, |q, p| -q * (-(q * q + p * p) / 2.0).exp()),
        };
        let jp = null_current_perturbation(&j, &c).unwrap();
        assert!(divergence(&jp).max_abs_diff(&divergence(&j)).unwrap() < 1e-10);
        let dm = marginal_current(&jp.j_q.sub(&j.j_q).unwrap());
        assert!(dm.iter().all(|v| v.abs() < 1e-12));
        let same = null_current_perturbation(&j, &PhaseField::zeros(g)).unwrap();
        assert_eq!(same, j);
    }

    #[test]
    fn marginal_current_of_shifted_gaussian() {
        let g = square_grid(128, 0.125).unwrap();
        for (p0, scale) in [(0.0, 0.0), (1.0, 1.0)] {
            let p = gaussian_density(g, 0.0, p0, 1.0, 1.0);
            let jq = PhaseField::from_fn(g, |_, pv| pv)
                .values
                .iter()
                .zip(&p.values)
                .map(|(a, b)| a * b)
                .collect();
            let jq = PhaseField {
                grid: g,
                values: jq,
            };
            let rho = moment_constraints(&p, 0).remove(0);
            for (m, r) in marginal_current(&jq).iter().zip(&rho) {
                assert!((m - scale * r).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn moments_of_unit_gaussian() {
        let g = square_grid(128, 0.125).unwrap();
        let p = gaussian_density(g, 0.3, 0.0, 0.8, 1.0);
        let m = moment_constraints(&p, 2);
        for i in 0..g.n_q {
            assert!(m[1][i].abs() < 1e-10);
            assert!((m[2][i] - m[0][i]).abs() < 1e-8);
        }
    }

    #[test]
    fn still_density_stays_put() {
        let g = grid();
        let p0 = gaussian_density(g, 0.0, 0.0, 1.0, 1.0);
        let run = fokker_planck_evolve(
            &p0,
            &StaticDrift::zeros(g),
            &DiffusionField::zeros(g),
            0.01,
            5,
        )
        .unwrap();
        assert!(run.snapshots.iter().all(|s| *s == p0));
    }

    #[test]
    fn cfl_and_semidefinite_checks() {
        let g = grid();
        let p0 = gaussian_density(g, 0.0, 0.0, 1.0, 1.0);
        let d = DiffusionField::isotropic(g, 0.1);
        assert!(matches!(
            fokker_planck_evolve(&p0, &StaticDrift::zeros(g), &d, 10.0, 1),
            Err(Error::Cfl { .. })
        ));
        let mut bad = d.clone();
        bad.d_qp = PhaseField::from_fn(g, |_, _| 1.0);
        assert!(fokker_planck_evolve(&p0, &StaticDrift::zeros(g), &bad, 1e-3, 1).is_err());
    }

    #[test]
    fn profile_is_orthogonal_to_low_monomials() {
        let g = square_grid(128, 0.125).unwrap();
        let phi = orthogonal_profile(&g, 3);
        for a in 0..3 {
            let s: f64 = g
                .p_axis()
                .iter()
                .zip(&phi)
                .map(|(p, f)| p.powi(a) * f)
                .sum::<f64>()
                * g.dp;
            assert!(s.abs() < 1e-13, "{a}: {s}");
        }
        let s3: f64 = g
            .p_axis()
            .iter()
            .zip(&phi)
            .map(|(p, f)| p.powi(3) * f)
            .sum::<f64>()
            * g.dp;
        assert!(s3.abs() > 1.0);
    }
}
