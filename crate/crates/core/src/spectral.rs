//! FFT plumbing: wavenumbers, spectral derivatives, row/column multipliers and
//! band-limited refinement onto a half-step lattice.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::PhaseField;

/// Forward/inverse plan pair for one transform length. The inverse is scaled by `1/n`.
#[derive(Clone)]
pub struct Fft1d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft1d").field("n", &self.n).finish()
    }
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
}

/// Angular wavenumbers in FFT order for `n` samples of spacing `h`.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|m| if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 } * dk)
        .collect()
}

/// Fourier symbol `(ik)^order`. For odd orders the unpaired Nyquist mode is
/// zeroed so real input stays real.
pub fn derivative_symbols(n: usize, h: f64, order: u32) -> Vec<Complex64> {
    let k = wavenumbers(n, h);
    let ik = |kv: f64| Complex64::new(0.0, kv).powu(order);
    k.iter()
        .enumerate()
        .map(|(m, &kv)| {
            if order % 2 == 1 && n % 2 == 0 && m == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                ik(kv)
            }
        })
        .collect()
}

/// Spectral derivative of periodic real samples.
pub fn derivative(data: &[f64], h: f64, order: u32) -> Vec<f64> {
    let n = data.len();
    let plan = Fft1d::new(n);
    let symbols = derivative_symbols(n, h, order);
    let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan.forward(&mut buf);
    for (z, s) in buf.iter_mut().zip(&symbols) {
        *z *= s;
    }
    plan.inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Applies a per-row Fourier multiplier along the momentum axis.
///
/// `symbol(iq, m)` is the multiplier for FFT mode `m` of row `iq`. Returns the
/// real part of the result and the largest discarded imaginary part.
pub fn apply_along_p<F>(field: &PhaseField, symbol: F) -> (PhaseField, f64)
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    let g = field.grid;
    let plan = Fft1d::new(g.n_p);
    let mut out = vec![0.0; g.len()];
    let imag = out
        .par_chunks_mut(g.n_p)
        .enumerate()
        .map(|(iq, row_out)| {
            let mut buf: Vec<Complex64> = field
                .row(iq)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            plan.forward(&mut buf);
            for (m, z) in buf.iter_mut().enumerate() {
                *z *= symbol(iq, m);
            }
            plan.inverse(&mut buf);
            let mut imag = 0.0f64;
            for (o, z) in row_out.iter_mut().zip(&buf) {
                *o = z.re;
                imag = imag.max(z.im.abs());
            }
            imag
        })
        .reduce(|| 0.0, f64::max);
    (
        PhaseField {
            grid: g,
            values: out,
        },
        imag,
    )
}

/// Applies a per-column Fourier multiplier along the position axis.
pub fn apply_along_q<F>(field: &PhaseField, symbol: F) -> PhaseField
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    let g = field.grid;
    let plan = Fft1d::new(g.n_q);
    let columns: Vec<Vec<f64>> = (0..g.n_p)
        .into_par_iter()
        .map(|ip| {
            let mut buf: Vec<Complex64> = (0..g.n_q)
                .map(|iq| Complex64::new(field.at(iq, ip), 0.0))
                .collect();
            plan.forward(&mut buf);
            for (m, z) in buf.iter_mut().enumerate() {
                *z *= symbol(ip, m);
            }
            plan.inverse(&mut buf);
            buf.into_iter().map(|z| z.re).collect()
        })
        .collect();
    let mut out = vec![0.0; g.len()];
    for (ip, col) in columns.iter().enumerate() {
        for (iq, v) in col.iter().enumerate() {
            out[g.index(iq, ip)] = *v;
        }
    }
    PhaseField {
        grid: g,
        values: out,
    }
}

/// `∂_p^order F` by FFT per position row.
pub fn derivative_p(field: &PhaseField, order: u32) -> PhaseField {
    let g = field.grid;
    let s = derivative_symbols(g.n_p, g.dp, order);
    apply_along_p(field, |_, m| s[m]).0
}

/// `∂_q^order F` by FFT per momentum column.
pub fn derivative_q(field: &PhaseField, order: u32) -> PhaseField {
    let g = field.grid;
    let s = derivative_symbols(g.n_q, g.dq, order);
    apply_along_q(field, |_, m| s[m])
}

/// Band-limited (trigonometric) interpolation onto the half-step lattice.
///
/// Returns `2n` samples: even entries are the input, odd entries are the
/// periodic interpolant midway between neighbours.
pub fn refine_half_step(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let coarse = Fft1d::new(n);
    let fine = Fft1d::new(2 * n);
    let mut spectrum = values.to_vec();
    coarse.forward(&mut spectrum);
    let mut padded = vec![Complex64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    for m in 0..n {
        if n % 2 == 0 && m == half {
            // Split the Nyquist mode symmetrically so real data stays real.
            padded[half] += spectrum[m] * 0.5;
            padded[2 * n - half] += spectrum[m] * 0.5;
        } else if m < n.div_ceil(2) {
            padded[m] = spectrum[m];
        } else {
            padded[m + n] = spectrum[m];
        }
    }
    fine.inverse(&mut padded);
    // The fine inverse divides by 2n; the coarse spectrum carried a factor n.
    for z in padded.iter_mut() {
        *z *= 2.0;
    }
    for (k, v) in values.iter().enumerate() {
        padded[2 * k] = *v;
    }
    if values.iter().all(|z| z.im == 0.0) {
        for z in padded.iter_mut() {
            z.im = 0.0;
        }
    }
    padded
}
