//! Reference Schrödinger evolution on the position axis.
//!
//! The propagator is a split-operator scheme with periodic boundaries: the
//! potential acts as a diagonal phase in position space and the kinetic term
//! as a diagonal phase in momentum space. Every sub-propagator is a pure phase,
//! so the discrete evolution is unitary up to FFT round-off.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Potential, WaveField};
use crate::spectral::{wavenumbers, Fft1d};

/// Points per edge used for boundary-mass monitoring.
pub const BOUNDARY_WIDTH: usize = 4;

/// Boundary mass above which a state counts as unresolved.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Composition used inside one reference step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitOrder {
    /// Symmetric half-potential / kinetic / half-potential product.
    Strang,
    /// Triple-jump composition of three Strang products (fourth order).
    Fourth,
}

/// Time axis shared by the reference run and every Wigner evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdseConfig {
    /// Nominal step; the actual step is `t_final / n_steps()`.
    pub dt: f64,
    pub t_final: f64,
    /// Saved snapshots including `t = 0` and `t = t_final`.
    pub n_samples: usize,
    /// Split-operator substeps per step of the reference propagator.
    pub substeps: usize,
    pub order: SplitOrder,
}

impl Default for TdseConfig {
    fn default() -> Self {
        Self {
            dt: 0.005,
            t_final: std::f64::consts::FRAC_PI_2,
            n_samples: 65,
            substeps: 4,
            order: SplitOrder::Fourth,
        }
    }
}

impl TdseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_final must be non-negative, got {}",
                self.t_final
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidConfig(
                "at least two snapshots are required".into(),
            ));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be at least 1".into()));
        }
        let n = self.n_steps();
        if self.t_final > 0.0 && n + 1 < self.n_samples {
            return Err(Error::InvalidConfig(format!(
                "{} snapshots requested but only {n} steps",
                self.n_samples
            )));
        }
        // t_final/dt must round to the step count; the step is then adjusted
        // by less than half a step over the whole run.
        let ratio = self.t_final / self.dt;
        if n > 0 && (ratio - n as f64).abs() > 0.5 + 1e-9 {
            return Err(Error::InvalidConfig(
                "t_final/dt is not near an integer".into(),
            ));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Step actually taken, `t_final / n_steps`.
    pub fn step(&self) -> f64 {
        let n = self.n_steps();
        if n == 0 {
            0.0
        } else {
            self.t_final / n as f64
        }
    }

    /// Step indices at which snapshots are saved: the nearest steps to
    /// `k·t_final/(n_samples−1)`.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let n = self.n_steps();
        let m = self.n_samples - 1;
        (0..self.n_samples)
            .map(|k| ((k * n) as f64 / m as f64).round() as usize)
            .collect()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        let h = self.step();
        self.snapshot_steps()
            .iter()
            .map(|&s| s as f64 * h)
            .collect()
    }
}

/// Snapshots and monitors from one reference run.
#[derive(Debug, Clone)]
pub struct TdseRun {
    pub times: Vec<f64>,
    pub snapshots: Vec<WaveField>,
    /// Largest `|‖ψ(t)‖² − ‖ψ(0)‖²|` over all snapshots.
    pub max_norm_drift: f64,
    /// Largest boundary mass over all snapshots.
    pub max_boundary_mass: f64,
    /// Set when the boundary mass exceeded [`BOUNDARY_TOLERANCE`]; the run still completes.
    pub boundary_flagged: bool,
}

/// Normalized harmonic-oscillator eigenfunction `n` from the Hermite-function recurrence.
pub fn hermite_eigenstate(grid: GridSpec, n: usize) -> Result<WaveField> {
    let values: Vec<Complex64> = grid
        .q_axis()
        .into_iter()
        .map(|q| Complex64::new(hermite_function(n, q), 0.0))
        .collect();
    let psi = WaveField { grid, values };
    check_resolved(&psi)?;
    Ok(psi)
}

/// `(|0⟩ + |2⟩)/√2`.
pub fn init_superposition_02(grid: GridSpec) -> Result<WaveField> {
    let a = hermite_eigenstate(grid, 0)?;
    let b = hermite_eigenstate(grid, 2)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x + y) * s)
        .collect();
    Ok(WaveField { grid, values })
}

/// `ψ_n(q) = (2ⁿ n! √π)^{-1/2} H_n(q) e^{-q²/2}` via the stable three-term recurrence.
pub fn hermite_function(n: usize, q: f64) -> f64 {
    let mut prev = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * q * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * q * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_resolved(psi: &WaveField) -> Result<()> {
    let edge = psi.boundary_mass(BOUNDARY_WIDTH);
    if edge > BOUNDARY_TOLERANCE {
        return Err(Error::Unresolved(format!("boundary mass {edge:e}")));
    }
    // Spectral tail: mass in the top quarter of the wavenumber band.
    let n = psi.values.len();
    let plan = Fft1d::new(n);
    let mut buf = psi.values.clone();
    plan.forward(&mut buf);
    let k = wavenumbers(n, psi.grid.dq);
    let k_cut = 0.75 * std::f64::consts::PI / psi.grid.dq;
    let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    let tail: f64 = buf
        .iter()
        .zip(&k)
        .filter(|(_, kv)| kv.abs() > k_cut)
        .map(|(z, _)| z.norm_sqr())
        .sum();
    if total > 0.0 && tail / total > BOUNDARY_TOLERANCE {
        return Err(Error::Unresolved(format!(
            "spectral tail fraction {:e}",
            tail / total
        )));
    }
    Ok(())
}

/// Precomputed phases for one potential and step.
struct SplitPropagator {
    plan: Fft1d,
    /// `(half-potential phase, kinetic phase)` per Strang stage.
    stages: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl SplitPropagator {
    fn new(grid: GridSpec, potential: &Potential, h: f64, order: SplitOrder) -> Self {
        let weights: Vec<f64> = match order {
            SplitOrder::Strang => vec![1.0],
            SplitOrder::Fourth => {
                let c = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - c);
                vec![w1, -c * w1, w1]
            }
        };
        let q = grid.q_axis();
        let k = wavenumbers(grid.n_q, grid.dq);
        let stages = weights
            .iter()
            .map(|&w| {
                let tau = w * h;
                let v = q
                    .iter()
                    .map(|&x| Complex64::from_polar(1.0, -0.5 * tau * potential.value(x)))
                    .collect();
                let t = k
                    .iter()
                    .map(|&kv| Complex64::from_polar(1.0, -0.5 * tau * kv * kv))
                    .collect();
                (v, t)
            })
            .collect();
        Self {
            plan: Fft1d::new(grid.n_q),
            stages,
        }
    }

    fn apply(&self, psi: &mut [Complex64]) {
        for (v, t) in &self.stages {
            mul_in_place(psi, v);
            self.plan.forward(psi);
            mul_in_place(psi, t);
            self.plan.inverse(psi);
            mul_in_place(psi, v);
        }
    }
}

fn mul_in_place(a: &mut [Complex64], b: &[Complex64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x *= y;
    }
}

/// Propagates `psi` under `H = p²/2 + V(q)` and returns the snapshots.
pub fn evolve_tdse(psi: &WaveField, potential: &Potential, cfg: &TdseConfig) -> Result<TdseRun> {
    cfg.validate()?;
    let grid = psi.grid;
    let n_steps = cfg.n_steps();
    let h = cfg.step() / cfg.substeps as f64;
    let prop = SplitPropagator::new(grid, potential, h, cfg.order);
    let save_at = cfg.snapshot_steps();
    let norm0 = psi.norm_sqr();

    let mut state = psi.values.clone();
    let mut snapshots = Vec::with_capacity(cfg.n_samples);
    let mut times = Vec::with_capacity(cfg.n_samples);
    let mut max_norm_drift = 0.0f64;
    let mut max_boundary_mass = 0.0f64;
    let mut next = 0;
    for step in 0..=n_steps {
        while next < save_at.len() && save_at[next] == step {
            let snap = WaveField {
                grid,
                values: state.clone(),
            };
            max_norm_drift = max_norm_drift.max((snap.norm_sqr() - norm0).abs());
            max_boundary_mass = max_boundary_mass.max(snap.boundary_mass(BOUNDARY_WIDTH));
            times.push(step as f64 * cfg.step());
            snapshots.push(snap);
            next += 1;
        }
        if step == n_steps {
            break;
        }
        for _ in 0..cfg.substeps {
            prop.apply(&mut state);
        }
    }
    Ok(TdseRun {
        times,
        snapshots,
        max_norm_drift,
        max_boundary_mass,
        boundary_flagged: max_boundary_mass > BOUNDARY_TOLERANCE,
    })
}

/// `⟨ψ|p²/2 + V|ψ⟩` with the kinetic term evaluated spectrally.
pub fn energy_expectation(psi: &WaveField, potential: &Potential) -> f64 {
    let g = psi.grid;
    let plan = Fft1d::new(g.n_q);
    let k = wavenumbers(g.n_q, g.dq);
    let mut buf = psi.values.clone();
    plan.forward(&mut buf);
    for (z, kv) in buf.iter_mut().zip(&k) {
        *z *= 0.5 * kv * kv;
    }
    plan.inverse(&mut buf);
    let kinetic: f64 = psi
        .values
        .iter()
        .zip(&buf)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let pot: f64 = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm_sqr() * potential.value(g.q(i)))
        .sum();
    (kinetic + pot) * g.dq
}
