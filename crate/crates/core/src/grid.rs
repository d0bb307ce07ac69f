//! Discretization of phase space, the field containers, and polynomial potentials.
//!
//! Units are dimensionless with ħ = m = ω = 1 throughout the crate.
//!
//! Axes are uniform and centred: with `n` points of spacing `h`, the i-th
//! coordinate is `(i - n/2)·h`, so each axis runs from `-n·h/2` to
//! `n·h/2 - h`. The momentum axis is dual to the chord axis of the Wigner
//! transform, `dp·dy·n_y = 2π`, and the two therefore share one FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Joint discretization of position, momentum and the Wigner chord variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_q: usize,
    pub n_p: usize,
    pub n_y: usize,
    pub dq: f64,
    pub dp: f64,
    pub dy: f64,
}

impl GridSpec {
    /// Phase-space grid with `n_q × n_p` points. The chord axis shares the
    /// momentum FFT, so `n_y = n_p` and `dy = 2π/(n_p·dp)`.
    pub fn new(n_q: usize, dq: f64, n_p: usize, dp: f64) -> Result<Self> {
        check_axis("q", n_q, dq)?;
        check_axis("p", n_p, dp)?;
        Ok(Self {
            n_q,
            n_p,
            n_y: n_p,
            dq,
            dp,
            dy: 2.0 * PI / (n_p as f64 * dp),
        })
    }

    /// Grid on which a wavefunction sampled with step `dq` can be Wigner
    /// transformed: `dy = dq`, `n_y = n_p = 2·n_q`, so the chord covers the
    /// full diameter of the position domain.
    pub fn for_wigner(n_q: usize, dq: f64) -> Result<Self> {
        check_axis("q", n_q, dq)?;
        let n_y = 2 * n_q;
        Ok(Self {
            n_q,
            n_p: n_y,
            n_y,
            dq,
            dp: 2.0 * PI / (n_y as f64 * dq),
            dy: dq,
        })
    }

    /// The benchmark grid: `n_q = 384`, `n_y = n_p = 768`, `dq = dy = 0.0625`.
    pub fn balanced() -> Self {
        Self::for_wigner(384, 0.0625).expect("balanced grid is valid")
    }

    /// A quarter-cost grid covering `|q| < 8` for quick runs.
    pub fn reduced() -> Self {
        Self::for_wigner(128, 0.125).expect("reduced grid is valid")
    }

    pub fn q_max(&self) -> f64 {
        self.n_q as f64 * self.dq / 2.0
    }

    pub fn p_max(&self) -> f64 {
        self.n_p as f64 * self.dp / 2.0
    }

    pub fn len(&self) -> usize {
        self.n_q * self.n_p
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn q(&self, i: usize) -> f64 {
        (i as f64 - (self.n_q / 2) as f64) * self.dq
    }

    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - (self.n_p / 2) as f64) * self.dp
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.n_y / 2) as f64) * self.dy
    }

    pub fn q_axis(&self) -> Vec<f64> {
        (0..self.n_q).map(|i| self.q(i)).collect()
    }

    pub fn p_axis(&self) -> Vec<f64> {
        (0..self.n_p).map(|j| self.p(j)).collect()
    }

    /// Phase-space cell area `dq·dp`.
    pub fn cell(&self) -> f64 {
        self.dq * self.dp
    }

    #[inline]
    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.n_p + ip
    }

    /// True when the chord samples `q ± y/2` land on the half-step position lattice.
    pub fn supports_wigner(&self) -> bool {
        (self.dy - self.dq).abs() <= 1e-12 * self.dq && self.n_y == self.n_p
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n_q == other.n_q
            && self.n_p == other.n_p
            && self.n_y == other.n_y
            && rel_eq(self.dq, other.dq)
            && rel_eq(self.dp, other.dp)
            && rel_eq(self.dy, other.dy)
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{}x{} (dq={}, dp={}) vs {}x{} (dq={}, dp={})",
                self.n_q, self.n_p, self.dq, self.dp, other.n_q, other.n_p, other.dq, other.dp
            )))
        }
    }
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn check_axis(name: &str, n: usize, h: f64) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "{name} axis needs an even point count >= 4, got {n}"
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "{name} step must be positive, got {h}"
        )));
    }
    Ok(())
}

/// Complex wavefunction samples on the position axis of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_q {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} position points",
                values.len(),
                grid.n_q
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_q).map(|i| f(grid.q(i))).collect();
        Self { grid, values }
    }

    /// `∑|ψ|²·dq`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dq
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        if s > 0.0 {
            for z in &mut self.values {
                *z /= s;
            }
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∑|ψ|²·dq` over the outermost `width` points at each end.
    pub fn boundary_mass(&self, width: usize) -> f64 {
        let n = self.values.len();
        let w = width.min(n / 2);
        let edge: f64 = self.values[..w]
            .iter()
            .chain(&self.values[n - w..])
            .map(|z| z.norm_sqr())
            .sum();
        edge * self.grid.dq
    }
}

/// Real, possibly signed samples on the `(q, p)` grid, stored q-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n_q,
                grid.n_p
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_q {
            let q = grid.q(i);
            for j in 0..grid.n_p {
                values.push(f(q, grid.p(j)));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.grid.index(iq, ip)]
    }

    pub fn row(&self, iq: usize) -> &[f64] {
        let n = self.grid.n_p;
        &self.values[iq * n..(iq + 1) * n]
    }

    /// `∑F·dq·dp`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell()
    }

    /// `∑|F|·dq·dp`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell()
    }

    /// Grid-weighted `sqrt(∑F²·dq·dp)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &PhaseField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn max_abs_diff(&self, other: &PhaseField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `∑|F|·dq·dp` over the outermost `width` cells along every edge.
    pub fn boundary_mass(&self, width: usize) -> f64 {
        let g = &self.grid;
        let wq = width.min(g.n_q / 2);
        let wp = width.min(g.n_p / 2);
        let mut s = 0.0;
        for i in 0..g.n_q {
            let q_edge = i < wq || i >= g.n_q - wq;
            for j in 0..g.n_p {
                if q_edge || j < wp || j >= g.n_p - wp {
                    s += self.at(i, j).abs();
                }
            }
        }
        s * g.cell()
    }
}

/// Largest polynomial degree accepted by [`Potential`].
pub const MAX_POTENTIAL_DEGREE: usize = 12;

/// Polynomial potential `V(q) = ∑ c_k q^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    coefficients: Vec<f64>,
}

impl Potential {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let mut c = coefficients;
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        if c.len() - 1 > MAX_POTENTIAL_DEGREE {
            return Err(Error::InvalidPotential(format!(
                "degree {} exceeds the supported maximum {MAX_POTENTIAL_DEGREE}",
                c.len() - 1
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite coefficient".into()));
        }
        Ok(Self { coefficients: c })
    }

    /// `V(q) = q²/2`.
    pub fn harmonic() -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.5],
        }
    }

    /// `V(q) = q²/2 + λq⁴`.
    pub fn quartic(lambda: f64) -> Self {
        Self::polynomial(vec![0.0, 0.0, 0.5, 0.0, lambda]).expect("quartic is a valid potential")
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficient of `q⁴`.
    pub fn lambda(&self) -> f64 {
        self.coefficients.get(4).copied().unwrap_or(0.0)
    }

    pub fn value(&self, q: f64) -> f64 {
        self.derivative(0, q)
    }

    pub fn force(&self, q: f64) -> f64 {
        -self.derivative(1, q)
    }

    /// Exact `d^order V / dq^order` at `q`; identically zero above the degree.
    pub fn derivative(&self, order: usize, q: f64) -> f64 {
        if order > self.degree() {
            return 0.0;
        }
        // Horner on the differentiated coefficients k!/(k-order)! c_k.
        let mut acc = 0.0;
        for k in (order..self.coefficients.len()).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|m| m as f64).product();
            acc = acc * q + falling * self.coefficients[k];
        }
        acc
    }

    /// Classical energy `p²/2 + V(q)`.
    pub fn hamiltonian(&self, q: f64, p: f64) -> f64 {
        0.5 * p * p + self.value(q)
    }

    /// True when every derivative of order three and above vanishes.
    pub fn is_quadratic(&self) -> bool {
        self.degree() <= 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_grid_matches_benchmark_dimensions() {
        let g = GridSpec::balanced();
        assert_eq!((g.n_q, g.n_y, g.n_p), (384, 768, 768));
        assert_eq!(g.dq, 0.0625);
        assert_eq!(g.dy, 0.0625);
        assert!((g.q_max() - 12.0).abs() < 1e-15);
        assert!((g.dp - 0.130_899_693_899_574_7).abs() < 1e-15);
        assert!((g.dp - 0.131).abs() < 5e-4);
        assert!((g.p_max() - 384.0 * g.dp).abs() < 1e-12);
        assert!((g.p_max() - 50.3).abs() < 0.05);
    }

    #[test]
    fn fft_duality_and_phase_volume() {
        for g in [
            GridSpec::balanced(),
            GridSpec::reduced(),
            GridSpec::for_wigner(32, 0.3).unwrap(),
            GridSpec::new(128, 0.125, 128, 0.125).unwrap(),
        ] {
            let dual = g.dp * g.dy * g.n_y as f64;
            assert!((dual / (2.0 * PI) - 1.0).abs() < 1e-14);
            let ones = PhaseField::from_fn(g, |_, _| 1.0);
            let area = (g.n_q as f64 * g.dq) * (g.n_p as f64 * g.dp);
            assert!((ones.integral() / area - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn axes_are_centred() {
        let g = GridSpec::balanced();
        assert_eq!(g.q(g.n_q / 2), 0.0);
        assert_eq!(g.p(g.n_p / 2), 0.0);
        assert!((g.q(0) + g.q_max()).abs() < 1e-12);
        assert!((g.q(1) + g.q(g.n_q - 1)).abs() < 1e-12);
    }

    #[test]
    fn odd_or_tiny_axes_rejected() {
        assert!(GridSpec::for_wigner(33, 0.1).is_err());
        assert!(GridSpec::for_wigner(2, 0.1).is_err());
        assert!(GridSpec::new(8, -1.0, 8, 1.0).is_err());
    }

    #[test]
    fn potential_derivatives() {
        let h = Potential::harmonic();
        for q in [-2.0, 0.0, 0.7] {
            assert_eq!(h.derivative(3, q), 0.0);
            assert_eq!(h.derivative(1, q), q);
        }
        let v = Potential::quartic(0.02);
        assert!((v.derivative(3, 1.0) - 0.48).abs() < 1e-15);
        assert_eq!(v.derivative(5, 1.3), 0.0);
        assert_eq!(v.derivative(7, -0.4), 0.0);
        assert!((v.derivative(1, 2.0) - (2.0 + 4.0 * 0.02 * 8.0)).abs() < 1e-14);
        assert!((v.derivative(4, 0.3) - 24.0 * 0.02).abs() < 1e-15);
        assert_eq!(v.lambda(), 0.02);
        assert!(Potential::polynomial(vec![1.0; 14]).is_err());
        assert_eq!(Potential::quartic(0.0), Potential::harmonic());
    }
}
