//! Classical carrier: Hamiltonian characteristics and semi-Lagrangian
//! Liouville transport of phase-space fields.
//!
//! A transport step evaluates the previous field at the backward foot point
//! `Φ_{−dt}(z)` of every grid node, using separable Lagrange interpolation.
//! Foot points outside the grid read as zero. For a time-independent
//! Hamiltonian the foot points and stencil weights of one step never change,
//! so [`TransportMap`] builds them once and applies them repeatedly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseField, Potential};
use crate::spectral::{derivative_p, derivative_q};

/// One-step integrator used for backtracing characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta.
    Rk4,
    /// Second-order Störmer–Verlet (kick–drift–kick).
    Verlet,
}

/// Separable Lagrange interpolation, named by polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Cubic,
    Quintic,
    Septic,
}

impl Interpolation {
    /// Stencil width per axis.
    pub fn points(self) -> usize {
        match self {
            Interpolation::Cubic => 4,
            Interpolation::Quintic => 6,
            Interpolation::Septic => 8,
        }
    }
}

const MAX_STENCIL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub integrator: Integrator,
    pub interpolation: Interpolation,
}

impl FlowConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            integrator: Integrator::Rk4,
            interpolation: Interpolation::Septic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "flow step must be >= 0, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// One integrator step of Hamilton's equations `q̇ = p`, `ṗ = −V′(q)` with signed step `h`.
pub fn flow_step(
    z: (f64, f64),
    potential: &Potential,
    h: f64,
    integrator: Integrator,
) -> (f64, f64) {
    let (q, p) = z;
    match integrator {
        Integrator::Rk4 => {
            let f = |q: f64, p: f64| (p, potential.force(q));
            let k1 = f(q, p);
            let k2 = f(q + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
            let k3 = f(q + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
            let k4 = f(q + h * k3.0, p + h * k3.1);
            (
                q + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                p + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            )
        }
        Integrator::Verlet => {
            let p_half = p + 0.5 * h * potential.force(q);
            let q1 = q + h * p_half;
            (q1, p_half + 0.5 * h * potential.force(q1))
        }
    }
}

/// Endpoint of the classical trajectory from `z` after time `t` (may be negative),
/// using steps no longer than `dt`.
pub fn classical_flow(z: (f64, f64), potential: &Potential, t: f64, dt: f64) -> (f64, f64) {
    classical_flow_with(z, potential, t, dt, Integrator::Rk4)
}

pub fn classical_flow_with(
    z: (f64, f64),
    potential: &Potential,
    t: f64,
    dt: f64,
    integrator: Integrator,
) -> (f64, f64) {
    if t == 0.0 {
        return z;
    }
    let n = if dt > 0.0 {
        (t.abs() / dt).ceil().max(1.0) as usize
    } else {
        1
    };
    let h = t / n as f64;
    (0..n).fold(z, |acc, _| flow_step(acc, potential, h, integrator))
}

/// Lagrange weights for the stencil starting at `base` evaluated at index coordinate `u`.
fn lagrange_weights(u: f64, base: isize, m: usize, w: &mut [f64; MAX_STENCIL]) {
    for r in 0..m {
        let xr = (base + r as isize) as f64;
        let mut num = 1.0;
        let mut den = 1.0;
        for s in 0..m {
            if s != r {
                let xs = (base + s as isize) as f64;
                num *= u - xs;
                den *= xr - xs;
            }
        }
        w[r] = num / den;
    }
}

#[derive(Debug, Clone, Copy)]
struct Stencil {
    base_q: isize,
    base_p: isize,
    wq: [f64; MAX_STENCIL],
    wp: [f64; MAX_STENCIL],
    /// False when the foot point lies outside the grid.
    inside: bool,
}

/// Precomputed foot points and interpolation weights for one transport step.
#[derive(Debug, Clone)]
pub struct TransportMap {
    grid: GridSpec,
    m: usize,
    stencils: Vec<Stencil>,
}

impl TransportMap {
    /// Builds the map `W′(z) = W(foot(z))`.
    pub fn from_foot_points(
        grid: GridSpec,
        interpolation: Interpolation,
        foot: impl Fn(f64, f64) -> (f64, f64) + Sync,
    ) -> Self {
        let m = interpolation.points();
        let half = (m / 2) as isize - 1;
        let stencils = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (iq, ip) = (idx / grid.n_p, idx % grid.n_p);
                let (qf, pf) = foot(grid.q(iq), grid.p(ip));
                let uq = qf / grid.dq + (grid.n_q / 2) as f64;
                let up = pf / grid.dp + (grid.n_p / 2) as f64;
                let mut s = Stencil {
                    base_q: 0,
                    base_p: 0,
                    wq: [0.0; MAX_STENCIL],
                    wp: [0.0; MAX_STENCIL],
                    inside: false,
                };
                let last_q = (grid.n_q - 1) as f64;
                let last_p = (grid.n_p - 1) as f64;
                if !(uq.is_finite() && up.is_finite())
                    || uq < 0.0
                    || up < 0.0
                    || uq > last_q
                    || up > last_p
                {
                    return s;
                }
                s.inside = true;
                s.base_q = uq.floor() as isize - half;
                s.base_p = up.floor() as isize - half;
                lagrange_weights(uq, s.base_q, m, &mut s.wq);
                lagrange_weights(up, s.base_p, m, &mut s.wp);
                s
            })
            .collect();
        Self { grid, m, stencils }
    }

    /// Semi-Lagrangian step map for `H = p²/2 + V` over `dt`.
    pub fn liouville(grid: GridSpec, potential: &Potential, cfg: &FlowConfig) -> Self {
        Self::from_foot_points(grid, cfg.interpolation, |q, p| {
            flow_step((q, p), potential, -cfg.dt, cfg.integrator)
        })
    }

    /// Exact harmonic rotation by angle `t`: foot point `Φ_{−t}(q,p)`.
    pub fn harmonic_rotation(grid: GridSpec, interpolation: Interpolation, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self::from_foot_points(grid, interpolation, move |q, p| {
            (q * c - p * s, q * s + p * c)
        })
    }

    pub fn apply(&self, w: &PhaseField) -> Result<PhaseField> {
        self.grid.ensure_same(&w.grid)?;
        let g = self.grid;
        let m = self.m;
        let (nq, np) = (g.n_q as isize, g.n_p as isize);
        let src = &w.values;
        let values = self
            .stencils
            .par_iter()
            .map(|s| {
                if !s.inside {
                    return 0.0;
                }
                let interior = s.base_q >= 0
                    && s.base_p >= 0
                    && s.base_q + m as isize <= nq
                    && s.base_p + m as isize <= np;
                let mut acc = 0.0;
                for a in 0..m {
                    let iq = s.base_q + a as isize;
                    if !interior && (iq < 0 || iq >= nq) {
                        continue;
                    }
                    let row = iq as usize * g.n_p;
                    let mut racc = 0.0;
                    for b in 0..m {
                        let ip = s.base_p + b as isize;
                        if !interior && (ip < 0 || ip >= np) {
                            continue;
                        }
                        racc += s.wp[b] * src[row + ip as usize];
                    }
                    acc += s.wq[a] * racc;
                }
                acc
            })
            .collect();
        Ok(PhaseField { grid: g, values })
    }
}

/// `W(Φ_{−t} z)` for the harmonic flow, i.e. rigid rotation by angle `t`.
pub fn rotate_exact_harmonic(w: &PhaseField, t: f64, interpolation: Interpolation) -> PhaseField {
    TransportMap::harmonic_rotation(w.grid, interpolation, t)
        .apply(w)
        .expect("map built on the field's grid")
}

/// One semi-Lagrangian Liouville step.
pub fn liouville_step(
    w: &PhaseField,
    potential: &Potential,
    cfg: &FlowConfig,
) -> Result<PhaseField> {
    cfg.validate()?;
    if cfg.dt == 0.0 {
        return Ok(w.clone());
    }
    TransportMap::liouville(w.grid, potential, cfg).apply(w)
}

/// `L_cl† W = −p ∂_q W + V′(q) ∂_p W` with spectral derivatives.
pub fn apply_classical_generator(w: &PhaseField, potential: &Potential) -> PhaseField {
    let g = w.grid;
    let dq = derivative_q(w, 1);
    let dp = derivative_p(w, 1);
    let mut out = PhaseField::zeros(g);
    for i in 0..g.n_q {
        let dv = potential.derivative(1, g.q(i));
        for j in 0..g.n_p {
            let idx = g.index(i, j);
            out.values[idx] = -g.p(j) * dq.values[idx] + dv * dp.values[idx];
        }
    }
    out
}
