//! Wigner transform of pure states, its inverse, marginals and Weyl expectations.
//!
//! Convention: `W(q,p) = (1/2π) ∫ dy e^{-ipy} ψ(q+y/2) ψ*(q−y/2)`.
//!
//! With `dy = dq` the chord endpoints `q ± y/2` fall on the half-step
//! position lattice. Those samples come from band-limited refinement of ψ,
//! and ψ is taken to be zero outside the position domain.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseField, WaveField};
use crate::spectral::{refine_half_step, Fft1d};

/// A Wigner field together with the largest imaginary part discarded when
/// taking the real part of the transform.
#[derive(Debug, Clone)]
pub struct WignerTransform {
    pub field: PhaseField,
    pub max_imag: f64,
}

fn check_compatible(psi: &WaveField, grid: &GridSpec) -> Result<()> {
    if !grid.supports_wigner() {
        return Err(Error::GridMismatch(format!(
            "Wigner transform needs dy = dq and n_y = n_p (dq={}, dy={}, n_y={}, n_p={})",
            grid.dq, grid.dy, grid.n_y, grid.n_p
        )));
    }
    if psi.grid.n_q != grid.n_q || (psi.grid.dq - grid.dq).abs() > 1e-12 * grid.dq {
        return Err(Error::GridMismatch(format!(
            "wavefunction has {} points of step {}, grid has {} of step {}",
            psi.grid.n_q, psi.grid.dq, grid.n_q, grid.dq
        )));
    }
    if grid.n_y < 2 * grid.n_q {
        return Err(Error::GridMismatch(format!(
            "chord axis of {} points cannot span the {}-point position domain",
            grid.n_y, grid.n_q
        )));
    }
    Ok(())
}

/// Samples of ψ on the half-step lattice: index `m` is `x = (m − n_q)·dq/2`.
pub fn chord_samples(psi: &WaveField) -> Vec<Complex64> {
    refine_half_step(&psi.values)
}

/// `ψ(q_i + y_j/2) ψ*(q_i − y_j/2)` for one position row.
fn chord_product(fine: &[Complex64], i: usize, j: usize, n_y: usize) -> Complex64 {
    let s = j as isize - (n_y / 2) as isize;
    let plus = 2 * i as isize + s;
    let minus = 2 * i as isize - s;
    let len = fine.len() as isize;
    if plus < 0 || minus < 0 || plus >= len || minus >= len {
        return Complex64::new(0.0, 0.0);
    }
    fine[plus as usize] * fine[minus as usize].conj()
}

#[inline]
fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// FFT-based Wigner transform, also reporting the discarded imaginary part.
///
/// The chord product is Hermitian in y. Its real part is even and its
/// imaginary part odd, giving the p-even and p-odd parts of W. Each part is
/// transformed on its own and (anti)symmetrized over `p ↔ −p`, so a real
/// wavefunction yields a field that is exactly even in p.
pub fn wigner_transform(psi: &WaveField, grid: &GridSpec) -> Result<WignerTransform> {
    check_compatible(psi, grid)?;
    let g = *grid;
    let n = g.n_y;
    let fine = chord_samples(psi);
    let plan = Fft1d::new(n);
    let pref = g.dy / (2.0 * PI);
    let half_sign = parity(n / 2);
    let mut values = vec![0.0; g.len()];
    let max_imag = values
        .par_chunks_mut(g.n_p)
        .enumerate()
        .map(|(i, row)| {
            // e^{-i p_k y_j} = e^{-2πi kj/N} (−1)^{k+j+N/2} on centred axes.
            let chord: Vec<Complex64> = (0..n).map(|j| chord_product(&fine, i, j, n)).collect();
            let transform = |part: &dyn Fn(Complex64) -> Complex64| -> Vec<Complex64> {
                let mut buf: Vec<Complex64> = chord
                    .iter()
                    .enumerate()
                    .map(|(j, z)| part(*z) * parity(j))
                    .collect();
                plan.forward(&mut buf);
                buf.iter()
                    .enumerate()
                    .map(|(k, z)| z * (pref * parity(k) * half_sign))
                    .collect()
            };
            let even = transform(&|z| Complex64::new(z.re, 0.0));
            let odd = if chord.iter().any(|z| z.im != 0.0) {
                Some(transform(&|z| Complex64::new(0.0, z.im)))
            } else {
                None
            };
            let mut imag = 0.0f64;
            for k in 0..n {
                let mirror = (n - k) % n;
                let mut w = 0.5 * (even[k].re + even[mirror].re);
                imag = imag.max(even[k].im.abs());
                if let Some(odd) = &odd {
                    w += 0.5 * (odd[k].re - odd[mirror].re);
                    imag = imag.max(odd[k].im.abs());
                }
                row[k] = w;
            }
            imag
        })
        .reduce(|| 0.0, f64::max);
    Ok(WignerTransform {
        field: PhaseField { grid: g, values },
        max_imag,
    })
}

/// Wigner function of a pure state on `grid`.
pub fn wigner_from_wavefunction(psi: &WaveField, grid: &GridSpec) -> Result<PhaseField> {
    wigner_transform(psi, grid).map(|t| t.field)
}

/// Direct `O(n_q·n_y·n_p)` evaluation of the defining chord integral.
///
/// Uses the same half-step samples as the FFT path but sums the phases
/// explicitly. Intended for small grids.
pub fn wigner_direct_quadrature(psi: &WaveField, grid: &GridSpec) -> Result<PhaseField> {
    check_compatible(psi, grid)?;
    let g = *grid;
    let fine = chord_samples(psi);
    let pref = g.dy / (2.0 * PI);
    let mut values = vec![0.0; g.len()];
    for i in 0..g.n_q {
        for k in 0..g.n_p {
            let p = g.p(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..g.n_y {
                let f = chord_product(&fine, i, j, g.n_y);
                acc += f * Complex64::from_polar(1.0, -p * g.y(j));
            }
            values[g.index(i, k)] = pref * acc.re;
        }
    }
    Ok(PhaseField { grid: g, values })
}

/// Position and momentum marginals, `∑_p W·dp` per q and `∑_q W·dq` per p.
pub fn marginals(w: &PhaseField) -> (Vec<f64>, Vec<f64>) {
    let g = w.grid;
    let rho_q = (0..g.n_q)
        .map(|i| w.row(i).iter().sum::<f64>() * g.dp)
        .collect();
    let mut rho_p = vec![0.0; g.n_p];
    for i in 0..g.n_q {
        for (acc, v) in rho_p.iter_mut().zip(w.row(i)) {
            *acc += v;
        }
    }
    for v in &mut rho_p {
        *v *= g.dq;
    }
    (rho_q, rho_p)
}

/// `∫dq dp W·A_W` by grid quadrature.
pub fn weyl_expectation(w: &PhaseField, symbol: impl Fn(f64, f64) -> f64) -> f64 {
    let g = w.grid;
    let mut acc = 0.0;
    for i in 0..g.n_q {
        let q = g.q(i);
        for (j, v) in w.row(i).iter().enumerate() {
            acc += v * symbol(q, g.p(j));
        }
    }
    acc * g.cell()
}

/// Wigner purity `2π ∑W²·dq·dp`; one for pure states.
pub fn purity(w: &PhaseField) -> f64 {
    2.0 * PI * w.values.iter().map(|v| v * v).sum::<f64>() * w.grid.cell()
}

/// Position-space two-point function `ρ(x, x′)` on the position grid.
#[derive(Debug, Clone)]
pub struct TwoPointFunction {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl TwoPointFunction {
    pub fn at(&self, a: usize, b: usize) -> Complex64 {
        self.values[a * self.n + b]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|a| self.at(a, a).re).collect()
    }

    /// `max |ρ(x,x′) − ρ*(x′,x)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for a in 0..self.n {
            for b in a..self.n {
                m = m.max((self.at(a, b) - self.at(b, a).conj()).norm());
            }
        }
        m
    }

    /// `max |ρ(x,x′) − ψ(x)ψ*(x′)|`.
    pub fn max_abs_diff_from_pure(&self, psi: &WaveField) -> f64 {
        let mut m = 0.0f64;
        for a in 0..self.n {
            for b in 0..self.n {
                let d = self.at(a, b) - psi.values[a] * psi.values[b].conj();
                m = m.max(d.norm());
            }
        }
        m
    }
}

/// Inverse transform `ρ(x,x′) = ∫dp e^{ip(x−x′)} W((x+x′)/2, p)`.
///
/// Odd chords have their midpoint on the half-step lattice; those values are
/// obtained by band-limited refinement along q at fixed chord.
pub fn inverse_wigner(w: &PhaseField) -> Result<TwoPointFunction> {
    let g = w.grid;
    if !g.supports_wigner() || g.n_y < 2 * g.n_q {
        return Err(Error::GridMismatch(
            "field grid does not support the inverse transform".into(),
        ));
    }
    let n = g.n_p;
    let plan = Fft1d::new(n);
    let half_sign = parity(n / 2);
    // chord[i][j] = ρ(q_i + y_j/2, q_i − y_j/2)
    let chord: Vec<Vec<Complex64>> = (0..g.n_q)
        .into_par_iter()
        .map(|i| {
            let mut buf: Vec<Complex64> = w
                .row(i)
                .iter()
                .enumerate()
                .map(|(k, &v)| Complex64::new(v * parity(k), 0.0))
                .collect();
            plan.inverse(&mut buf);
            buf.iter()
                .enumerate()
                .map(|(j, z)| z * (g.dp * n as f64 * parity(j) * half_sign))
                .collect()
        })
        .collect();

    let nq = g.n_q;
    let mut values = vec![Complex64::new(0.0, 0.0); nq * nq];
    let offset = (n / 2) as isize;
    // For each chord s = a − b, refine the column along q and read index a + b.
    let columns: Vec<(isize, Vec<Complex64>)> = (-(nq as isize - 1)..=(nq as isize - 1))
        .into_par_iter()
        .map(|s| {
            let j = (s + offset) as usize;
            let col: Vec<Complex64> = (0..nq).map(|i| chord[i][j]).collect();
            (s, refine_half_step(&col))
        })
        .collect();
    for (s, fine) in columns {
        for a in 0..nq {
            let b = a as isize - s;
            if b < 0 || b >= nq as isize {
                continue;
            }
            let b = b as usize;
            values[a * nq + b] = fine[a + b];
        }
    }
    Ok(TwoPointFunction { n: nq, values })
}

/// Closed form of the Wigner function of `(|0⟩ + |2⟩)/√2`:
/// `(1/π) e^{−r²} (1 − 2r² + r⁴ + √2(q² − p²))` with `r² = q² + p²`.
pub fn superposition_02_wigner(q: f64, p: f64) -> f64 {
    let r2 = q * q + p * p;
    (-r2).exp() / PI * (1.0 - 2.0 * r2 + r2 * r2 + std::f64::consts::SQRT_2 * (q * q - p * p))
}
