//! Forward/reverse signed path measures on finite ensembles.
//!
//! A path carries a positive carrier probability and a signed weight in both
//! directions, `dμ_F = W_F dP_F` and `dμ_RΘ = W_RΘ dP_RΘ`. On the common
//! support the ratio factors as `a_sign · exp(a_mag)` with
//! `a_mag = a_cl + a_w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseField;

/// Tolerance on the normalization of both path laws.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Relative weight floor used when none is given.
pub const DEFAULT_RELATIVE_FLOOR: f64 = 1e-12;

/// Regularizer added to `|W|` by [`default_envelope`].
pub const DEFAULT_ENVELOPE_EPSILON: f64 = 1e-8;

/// Neumaier-compensated sum; plain summation drifts past the normalization
/// tolerance on grid-sized ensembles.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    p_forward: Vec<f64>,
    p_reverse: Vec<f64>,
    w_forward: Vec<f64>,
    w_reverse: Vec<f64>,
    labels: Option<Vec<(f64, f64)>>,
}

impl PathEnsemble {
    pub fn new(
        p_forward: Vec<f64>,
        p_reverse: Vec<f64>,
        w_forward: Vec<f64>,
        w_reverse: Vec<f64>,
    ) -> Result<Self> {
        let n = p_forward.len();
        if n == 0 {
            return Err(Error::InvalidEnsemble("ensemble has no paths".into()));
        }
        if p_reverse.len() != n || w_forward.len() != n || w_reverse.len() != n {
            return Err(Error::InvalidEnsemble(format!(
                "length mismatch: {} / {} / {} / {}",
                n,
                p_reverse.len(),
                w_forward.len(),
                w_reverse.len()
            )));
        }
        for (name, probs) in [("forward", &p_forward), ("reverse", &p_reverse)] {
            if let Some((i, v)) = probs
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
            {
                return Err(Error::InvalidEnsemble(format!(
                    "{name} probability {v} at path {i}"
                )));
            }
            let total = compensated_sum(probs.iter().copied());
            if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(Error::InvalidEnsemble(format!(
                    "{name} probabilities sum to {total}"
                )));
            }
        }
        if w_forward.iter().chain(&w_reverse).any(|w| !w.is_finite()) {
            return Err(Error::InvalidEnsemble("non-finite weight".into()));
        }
        Ok(Self {
            p_forward,
            p_reverse,
            w_forward,
            w_reverse,
            labels: None,
        })
    }

    /// Attaches a terminal phase-space point to every path.
    pub fn with_labels(mut self, labels: Vec<(f64, f64)>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} labels for {} paths",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.p_forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_forward.is_empty()
    }

    pub fn p_forward(&self) -> &[f64] {
        &self.p_forward
    }

    pub fn p_reverse(&self) -> &[f64] {
        &self.p_reverse
    }

    pub fn w_forward(&self) -> &[f64] {
        &self.w_forward
    }

    pub fn w_reverse(&self) -> &[f64] {
        &self.w_reverse
    }

    pub fn labels(&self) -> Option<&[(f64, f64)]> {
        self.labels.as_deref()
    }

    /// Signed forward mass `W_F·P_F` of path `i`.
    pub fn forward_mass(&self, i: usize) -> f64 {
        self.w_forward[i] * self.p_forward[i]
    }

    /// Signed reversed mass `W_RΘ·P_RΘ` of path `i`.
    pub fn reverse_mass(&self, i: usize) -> f64 {
        self.w_reverse[i] * self.p_reverse[i]
    }

    /// `1e-12 · max(|W_F|, |W_RΘ|)`.
    pub fn default_weight_floor(&self) -> f64 {
        let m = self
            .w_forward
            .iter()
            .chain(&self.w_reverse)
            .fold(0.0f64, |a, w| a.max(w.abs()));
        DEFAULT_RELATIVE_FLOOR * m
    }
}

/// Per-path ratio data. Vectors are indexed by path; excluded paths hold
/// `a_sign = 0` and zero log-ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioDecomposition {
    pub weight_floor: f64,
    pub excluded: Vec<bool>,
    pub a_sign: Vec<i8>,
    pub a_mag: Vec<f64>,
    /// `log(P_F/P_RΘ)`.
    pub a_cl: Vec<f64>,
    /// `log(|W_F|/|W_RΘ|)`.
    pub a_w: Vec<f64>,
}

impl RatioDecomposition {
    pub fn included(&self) -> impl Iterator<Item = usize> + '_ {
        self.excluded
            .iter()
            .enumerate()
            .filter(|(_, x)| !**x)
            .map(|(i, _)| i)
    }

    pub fn included_count(&self) -> usize {
        self.excluded.iter().filter(|x| !**x).count()
    }

    /// `a_sign · exp(a_mag)` for path `i`.
    pub fn ratio(&self, i: usize) -> f64 {
        f64::from(self.a_sign[i]) * self.a_mag[i].exp()
    }
}

fn check_floor(weight_floor: f64) -> Result<()> {
    if !(weight_floor >= 0.0 && weight_floor.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "weight floor must be ≥ 0, got {weight_floor}"
        )));
    }
    Ok(())
}

fn excluded_mask(e: &PathEnsemble, weight_floor: f64) -> Vec<bool> {
    e.w_forward
        .iter()
        .zip(&e.w_reverse)
        .map(|(a, b)| a.abs() <= weight_floor || b.abs() <= weight_floor)
        .collect()
}

pub fn ratio_decomposition(e: &PathEnsemble, weight_floor: f64) -> Result<RatioDecomposition> {
    check_floor(weight_floor)?;
    let excluded = excluded_mask(e, weight_floor);
    if excluded.iter().all(|x| *x) {
        return Err(Error::EmptySupport);
    }
    let n = e.len();
    let mut d = RatioDecomposition {
        weight_floor,
        excluded,
        a_sign: vec![0; n],
        a_mag: vec![0.0; n],
        a_cl: vec![0.0; n],
        a_w: vec![0.0; n],
    };
    for i in 0..n {
        if d.excluded[i] {
            continue;
        }
        let (wf, wr) = (e.w_forward[i], e.w_reverse[i]);
        d.a_sign[i] = if (wf > 0.0) == (wr > 0.0) { 1 } else { -1 };
        d.a_cl[i] = (e.p_forward[i] / e.p_reverse[i]).ln();
        d.a_w[i] = (wf.abs() / wr.abs()).ln();
        d.a_mag[i] = d.a_cl[i] + d.a_w[i];
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralIdentity {
    /// `∑_{Ω₀} W_F·a_sign·exp(−a_mag)·P_F`.
    pub lhs: f64,
    /// `∑_{Ω₀} W_RΘ·P_RΘ`.
    pub rhs: f64,
    pub residual: f64,
    /// `∑ W_F·P_F` over excluded paths.
    pub excluded_forward_mass: f64,
    /// `∑ W_RΘ·P_RΘ` over excluded paths.
    pub excluded_reverse_mass: f64,
}

/// Restricted integral identity. An empty common support gives `lhs = rhs = 0`.
pub fn integral_identity_check(e: &PathEnsemble, weight_floor: f64) -> Result<IntegralIdentity> {
    check_floor(weight_floor)?;
    let mut out = IntegralIdentity {
        lhs: 0.0,
        rhs: 0.0,
        residual: 0.0,
        excluded_forward_mass: 0.0,
        excluded_reverse_mass: 0.0,
    };
    let d = match ratio_decomposition(e, weight_floor) {
        Ok(d) => d,
        Err(Error::EmptySupport) => {
            out.excluded_forward_mass = (0..e.len()).map(|i| e.forward_mass(i)).sum();
            out.excluded_reverse_mass = (0..e.len()).map(|i| e.reverse_mass(i)).sum();
            return Ok(out);
        }
        Err(err) => return Err(err),
    };
    for i in 0..e.len() {
        if d.excluded[i] {
            out.excluded_forward_mass += e.forward_mass(i);
            out.excluded_reverse_mass += e.reverse_mass(i);
        } else {
            out.lhs += e.forward_mass(i) * f64::from(d.a_sign[i]) * (-d.a_mag[i]).exp();
            out.rhs += e.reverse_mass(i);
        }
    }
    out.residual = (out.lhs - out.rhs).abs();
    Ok(out)
}

/// `∑ a_sign·exp(−a_mag)·dμ_F / ∑ dμ_F` over the common support.
pub fn normalized_signed_integral(e: &PathEnsemble, weight_floor: f64) -> Result<f64> {
    let d = ratio_decomposition(e, weight_floor)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in d.included() {
        num += e.forward_mass(i) * f64::from(d.a_sign[i]) * (-d.a_mag[i]).exp();
        den += e.forward_mass(i);
    }
    Ok(num / den)
}

/// Fraction of included paths with `a_sign = −1`, by count and by `|W_F|·P_F`.
pub fn interference_parity_stats(d: &RatioDecomposition, e: &PathEnsemble) -> (f64, f64) {
    let mut count = 0usize;
    let mut negative = 0usize;
    let mut mass = 0.0;
    let mut negative_mass = 0.0;
    for i in d.included() {
        let m = e.forward_mass(i).abs();
        count += 1;
        mass += m;
        if d.a_sign[i] < 0 {
            negative += 1;
            negative_mass += m;
        }
    }
    if count == 0 {
        return (0.0, 0.0);
    }
    let by_mass = if mass > 0.0 {
        negative_mass / mass
    } else {
        0.0
    };
    (negative as f64 / count as f64, by_mass)
}

/// The momentum-reversal involution `Θ(q,p) = (q,−p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThetaMap;

impl ThetaMap {
    pub fn apply(&self, z: (f64, f64)) -> (f64, f64) {
        (z.0, -z.1)
    }

    /// Protocol reversal. Closed systems have a fixed Hamiltonian, so this is the identity.
    pub fn reverse_protocol<T: Clone>(&self, protocol: &T) -> T {
        protocol.clone()
    }

    /// Momentum index of `−p_j` on a centred axis of `n` points.
    pub fn mirror_index(&self, j: usize, n: usize) -> usize {
        (n - j) % n
    }
}

/// `W(q,p) → W(q,−p)` on the grid.
///
/// On a centred axis `p_j = (j − n/2)dp` the mirror of index `j` is
/// `n − j`; the endpoint `−p_max` has no partner inside the grid and maps to
/// itself through periodic wrap.
pub fn theta_reflect(w: &PhaseField) -> Result<PhaseField> {
    let g = w.grid;
    if g.n_p % 2 != 0 {
        return Err(Error::GridMismatch(format!(
            "momentum axis of {} points is not centred",
            g.n_p
        )));
    }
    let theta = ThetaMap;
    let mut values = vec![0.0; g.len()];
    for i in 0..g.n_q {
        let row = w.row(i);
        for j in 0..g.n_p {
            values[g.index(i, j)] = row[theta.mirror_index(j, g.n_p)];
        }
    }
    Ok(PhaseField { grid: g, values })
}

/// Envelope `∝ |W| + ε`, normalized so that `∑ envelope·dq·dp = 1`.
pub fn default_envelope(w: &PhaseField, epsilon: f64) -> PhaseField {
    let mut env: Vec<f64> = w.values.iter().map(|v| v.abs() + epsilon).collect();
    let total = compensated_sum(env.iter().copied()) * w.grid.cell();
    for v in &mut env {
        *v /= total;
    }
    PhaseField {
        grid: w.grid,
        values: env,
    }
}

/// One path per grid cell: `P_F = P_RΘ = envelope·dq·dp`,
/// `W_F = W_fwd/envelope`, `W_RΘ = W_rev/envelope`.
///
/// `w_rev` must already be pulled back through [`theta_reflect`].
pub fn ensemble_from_wigner_fields(
    w_fwd: &PhaseField,
    w_rev: &PhaseField,
    envelope: &PhaseField,
) -> Result<PathEnsemble> {
    let g = w_fwd.grid;
    g.ensure_same(&w_rev.grid)?;
    g.ensure_same(&envelope.grid)?;
    if let Some((index, &value)) = envelope
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonPositiveEnvelope { index, value });
    }
    let cell = g.cell();
    let total = compensated_sum(envelope.values.iter().copied()) * cell;
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::InvalidEnsemble(format!(
            "envelope integrates to {total}"
        )));
    }
    // Renormalize the discrete law so it sums to one to round-off.
    let raw: Vec<f64> = envelope.values.iter().map(|v| v * cell).collect();
    let sum = compensated_sum(raw.iter().copied());
    let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
    let wf = w_fwd
        .values
        .iter()
        .zip(&envelope.values)
        .map(|(w, e)| w / e)
        .collect();
    let wr = w_rev
        .values
        .iter()
        .zip(&envelope.values)
        .map(|(w, e)| w / e)
        .collect();
    let labels = (0..g.n_q)
        .flat_map(|i| (0..g.n_p).map(move |j| (g.q(i), g.p(j))))
        .collect();
    PathEnsemble::new(probs.clone(), probs, wf, wr)?.with_labels(labels)
}
