//! The signed Moyal residual, its Hahn–Jordan source/sink split, and the
//! residual-strength diagnostics.
//!
//! For `H = p²/2 + V(q)` the Wigner generator is the Liouville generator plus
//!
//! ```text
//! Q[W] = Σ_{n≥1} (−1)ⁿ/(2n+1)! · (1/2)^{2n} · V^{(2n+1)}(q) · ∂_p^{2n+1} W
//! ```
//!
//! which terminates for polynomial V. For `V = q²/2 + λq⁴` it is `−λq ∂_p³W`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::carrier::apply_classical_generator;
use crate::error::{Error, Result};
use crate::grid::{PhaseField, Potential};
use crate::spectral::{apply_along_p, wavenumbers};

/// Coefficient of `V^{(2n+1)} ∂_p^{2n+1}` in the residual series (ħ = 1).
pub fn moyal_coefficient(n: usize) -> f64 {
    let order = 2 * n + 1;
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / factorial * 0.25f64.powi(n as i32)
}

/// Odd derivative orders `2n+1 ≥ 3` at which `V^{(2n+1)}` is not identically zero.
pub fn residual_orders(potential: &Potential) -> Vec<usize> {
    (1..)
        .map(|n| 2 * n + 1)
        .take_while(|&order| order <= potential.degree())
        .collect()
}

/// Fourier symbol of `Q` along p at position `q` for chord wavenumber `k`:
/// `Σ_n c_n V^{(2n+1)}(q) (ik)^{2n+1}`, which is purely imaginary.
pub fn residual_symbol(potential: &Potential, q: f64, k: f64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for order in residual_orders(potential) {
        let n = (order - 1) / 2;
        let c = moyal_coefficient(n) * potential.derivative(order, q);
        s += c * Complex64::new(0.0, k).powu(order as u32);
    }
    s
}

/// `Q[W]`, with p-derivatives taken spectrally per position row.
pub fn moyal_residual(w: &PhaseField, potential: &Potential) -> PhaseField {
    let g = w.grid;
    if residual_orders(potential).is_empty() {
        return PhaseField::zeros(g);
    }
    let k = wavenumbers(g.n_p, g.dp);
    let nyquist = g.n_p / 2;
    let symbols: Vec<Vec<Complex64>> = (0..g.n_q)
        .map(|i| {
            let q = g.q(i);
            k.iter()
                .enumerate()
                .map(|(m, &kv)| {
                    // Odd-order symbols vanish on the unpaired Nyquist mode.
                    if m == nyquist {
                        Complex64::new(0.0, 0.0)
                    } else {
                        residual_symbol(potential, q, kv)
                    }
                })
                .collect()
        })
        .collect();
    apply_along_p(w, |i, m| symbols[i][m]).0
}

/// Pointwise positive and negative parts of a signed field.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSplit {
    pub positive_part: PhaseField,
    pub negative_part: PhaseField,
}

impl SignedSplit {
    /// `∑K⁺·dq·dp`.
    pub fn source_mass(&self) -> f64 {
        self.positive_part.integral()
    }

    /// `∑K⁻·dq·dp`.
    pub fn sink_mass(&self) -> f64 {
        self.negative_part.integral()
    }

    /// `∑(K⁺ + K⁻)·dq·dp`.
    pub fn activity(&self) -> f64 {
        self.source_mass() + self.sink_mass()
    }

    /// `K⁺ − K⁻`.
    pub fn reconstruct(&self) -> PhaseField {
        self.positive_part
            .sub(&self.negative_part)
            .expect("parts share a grid")
    }

    /// True when no grid point carries both a source and a sink.
    pub fn disjoint(&self) -> bool {
        self.positive_part
            .values
            .iter()
            .zip(&self.negative_part.values)
            .all(|(a, b)| *a == 0.0 || *b == 0.0)
    }
}

/// Hahn–Jordan split `K⁺ = max(K, 0)`, `K⁻ = max(−K, 0)`.
pub fn hahn_jordan_split(k: &PhaseField) -> SignedSplit {
    let g = k.grid;
    let positive = k
        .values
        .iter()
        .map(|&v| if v > 0.0 { v } else { 0.0 })
        .collect();
    let negative = k
        .values
        .iter()
        .map(|&v| if v < 0.0 { -v } else { 0.0 })
        .collect();
    SignedSplit {
        positive_part: PhaseField {
            grid: g,
            values: positive,
        },
        negative_part: PhaseField {
            grid: g,
            values: negative,
        },
    }
}

/// Outcome of comparing a positive decomposition against `|K|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimality {
    /// `K1 + K2 ≥ |K| − 1e-12` at every grid point.
    pub holds: bool,
    /// `∑(K1 + K2 − |K|)·dq·dp`.
    pub excess: f64,
}

/// Checks `K1 + K2 ≥ |K|` for a positive decomposition `K = K1 − K2`.
pub fn minimality_check(k: &PhaseField, k1: &PhaseField, k2: &PhaseField) -> Result<Minimality> {
    k.grid.ensure_same(&k1.grid)?;
    k.grid.ensure_same(&k2.grid)?;
    let scale = k.max_abs().max(1.0);
    let mut max_mismatch = 0.0f64;
    let mut holds = true;
    let mut excess = 0.0;
    for ((&kv, &a), &b) in k.values.iter().zip(&k1.values).zip(&k2.values) {
        if a < 0.0 || b < 0.0 {
            return Err(Error::DecompositionMismatch {
                max_mismatch: a.min(b),
            });
        }
        max_mismatch = max_mismatch.max((a - b - kv).abs());
        let gap = a + b - kv.abs();
        if gap < -1e-12 {
            holds = false;
        }
        excess += gap;
    }
    if max_mismatch > 1e-12 * scale {
        return Err(Error::DecompositionMismatch { max_mismatch });
    }
    Ok(Minimality {
        holds,
        excess: excess * k.grid.cell(),
    })
}

/// Residual-strength diagnostics for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualDiagnostics {
    /// `‖Q‖₂ / (‖L_cl†W‖₂ + ‖Q‖₂)`, zero when both vanish.
    pub chi_q: f64,
    /// `‖Q‖₂ / ‖L_cl†W‖₂`; `None` when the classical term vanishes.
    pub epsilon_q: Option<f64>,
    /// `∑|Q|·dq·dp`.
    pub activity: f64,
    pub source_mass: f64,
    pub sink_mass: f64,
    pub residual_l2: f64,
    pub classical_l2: f64,
}

pub fn residual_diagnostics(w: &PhaseField, potential: &Potential) -> ResidualDiagnostics {
    let residual = moyal_residual(w, potential);
    let classical = apply_classical_generator(w, potential);
    diagnostics_from_parts(&residual, &classical)
}

pub(crate) fn diagnostics_from_parts(
    residual: &PhaseField,
    classical: &PhaseField,
) -> ResidualDiagnostics {
    let rq = residual.l2_norm();
    let rc = classical.l2_norm();
    let split = hahn_jordan_split(residual);
    let chi_q = if rq + rc == 0.0 { 0.0 } else { rq / (rc + rq) };
    let epsilon_q = if rc > 0.0 { Some(rq / rc) } else { None };
    let source_mass = split.source_mass();
    let sink_mass = split.sink_mass();
    ResidualDiagnostics {
        chi_q,
        epsilon_q,
        activity: source_mass + sink_mass,
        source_mass,
        sink_mass,
        residual_l2: rq,
        classical_l2: rc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn bump(g: GridSpec) -> PhaseField {
        PhaseField::from_fn(g, |q, p| {
            (1.0 + 0.4 * q - 0.3 * p * p) * (-(q * q + p * p) / 2.0).exp()
        })
    }

    #[test]
    fn coefficients() {
        // n = 1: −(1/3!)(1/4) = −1/24, so V‴ = 24λq gives −λq.
        assert!((moyal_coefficient(1) + 1.0 / 24.0).abs() < 1e-17);
        assert!((moyal_coefficient(2) - 1.0 / (120.0 * 16.0)).abs() < 1e-18);
        assert_eq!(residual_orders(&Potential::harmonic()), Vec::<usize>::new());
        assert_eq!(residual_orders(&Potential::quartic(0.02)), vec![3]);
        let sextic = Potential::polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.01]).unwrap();
        assert_eq!(residual_orders(&sextic), vec![3, 5]);
    }

    #[test]
    fn quadratic_and_zero_lambda_residuals_vanish() {
        let g = GridSpec::for_wigner(32, 0.4).unwrap();
        let w = bump(g);
        assert_eq!(moyal_residual(&w, &Potential::harmonic()).max_abs(), 0.0);
        assert_eq!(moyal_residual(&w, &Potential::quartic(0.0)).max_abs(), 0.0);
    }

    #[test]
    fn quartic_residual_is_minus_lambda_q_third_derivative() {
        let g = GridSpec::for_wigner(64, 0.25).unwrap();
        let w = bump(g);
        let lambda = 0.03;
        let r = moyal_residual(&w, &Potential::quartic(lambda));
        let d3 = crate::spectral::derivative_p(&w, 3);
        for i in 0..g.n_q {
            for j in 0..g.n_p {
                let expect = -lambda * g.q(i) * d3.at(i, j);
                assert!((r.at(i, j) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn split_basics() {
        let g = GridSpec::for_wigner(16, 0.5).unwrap();
        let k = PhaseField::from_fn(g, |q, p| (q * 1.3 + p).sin());
        let s = hahn_jordan_split(&k);
        assert!(s.disjoint());
        assert_eq!(s.reconstruct(), k);
        assert!((s.activity() - k.l1_norm()).abs() < 1e-12);
        let flipped = hahn_jordan_split(&k.scaled(-1.0));
        assert_eq!(flipped.positive_part, s.negative_part);
        assert_eq!(flipped.negative_part, s.positive_part);
        let pos = PhaseField::from_fn(g, |q, _| q * q);
        assert!(hahn_jordan_split(&pos)
            .negative_part
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn minimality_rejects_bad_decompositions() {
        let g = GridSpec::for_wigner(8, 0.5).unwrap();
        let k = PhaseField::from_fn(g, |q, p| q - p);
        let s = hahn_jordan_split(&k);
        let m = minimality_check(&k, &s.positive_part, &s.negative_part).unwrap();
        assert!(m.holds && m.excess.abs() < 1e-12);
        let wrong = s.positive_part.scaled(2.0);
        assert!(matches!(
            minimality_check(&k, &wrong, &s.negative_part),
            Err(Error::DecompositionMismatch { .. })
        ));
    }

    #[test]
    fn diagnostics_conventions() {
        let g = GridSpec::for_wigner(32, 0.4).unwrap();
        let zero = PhaseField::zeros(g);
        let d = residual_diagnostics(&zero, &Potential::quartic(0.02));
        assert_eq!(d.chi_q, 0.0);
        assert_eq!(d.epsilon_q, None);
        let w = bump(g);
        let h = residual_diagnostics(&w, &Potential::harmonic());
        assert_eq!(h.chi_q, 0.0);
        assert_eq!(h.epsilon_q, Some(0.0));
        let q = residual_diagnostics(&w, &Potential::quartic(0.02));
        assert!(q.chi_q > 0.0 && q.chi_q < 1.0);
        assert!((q.source_mass + q.sink_mass - q.activity).abs() < 1e-15);
    }
}
