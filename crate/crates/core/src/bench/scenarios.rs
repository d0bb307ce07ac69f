use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::config::{Scenario, ScenarioConfig};
use super::output::{emit_field_csv, field_file_name, write_json, Table};
use crate::carrier::rotate_exact_harmonic;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseField, Potential};
use crate::paths::{
    default_envelope, ensemble_from_wigner_fields, integral_identity_check,
    interference_parity_stats, normalized_signed_integral, ratio_decomposition, theta_reflect,
    PathEnsemble, DEFAULT_ENVELOPE_EPSILON,
};
use crate::reconstruction::{
    compute_diagnostics, evolve_classical_only_with, evolve_with_residual_with, DiagnosticsRecord,
};
use crate::residual::{hahn_jordan_split, minimality_check, moyal_residual, residual_diagnostics};
use crate::schrodinger::{evolve_tdse, init_superposition_02, TdseRun};
use crate::underdetermination::{
    axis_variances, fokker_planck_evolve, gaussian_density, moment_orthogonal_demo,
    null_current_demo, square_grid, DemoConfig, DiffusionField, StaticDrift,
};
use crate::wigner::{marginals, superposition_02_wigner, wigner_from_wavefunction};

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Columns of `series.csv` for Wigner-field scenarios, after `run,index,time`.
pub const DIAGNOSTIC_COLUMNS: [&str; 17] = [
    "wigner_norm_error",
    "marginal_error_q",
    "marginal_error_p",
    "l2_error_abs",
    "l2_error_rel",
    "total_variation",
    "sign_cancellation_ratio",
    "negativity_mass",
    "residual_activity",
    "chi_q",
    "boundary_leakage",
    "moment_q",
    "moment_p",
    "moment_q2",
    "moment_p2",
    "moment_energy",
    "max_abs_error",
];

/// What a scenario produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub summary: Value,
    pub files: Vec<PathBuf>,
}

/// Runs one scenario and writes `summary.json`, `series.csv` and any field dumps into `cfg.out`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let mut files = Vec::new();
    let (headline, series) = match cfg.scenario {
        Scenario::HarmonicNull => harmonic_null(cfg, &mut files)?,
        Scenario::QuarticCompare => quartic_runs(cfg, false, &mut files)?,
        Scenario::QuarticReconstruct => quartic_runs(cfg, true, &mut files)?,
        Scenario::QuarticResidualField => quartic_residual_field(cfg, &mut files)?,
        Scenario::SignedPathDemo => signed_path_demo(cfg, &mut files)?,
        Scenario::UnderdeterminationDemo => underdetermination_demo()?,
    };
    let mut summary = Map::new();
    summary.insert("schema_version".into(), json!(SCHEMA_VERSION));
    summary.insert("scenario".into(), json!(cfg.scenario.name()));
    summary.insert("config".into(), to_value(cfg)?);
    for (k, v) in headline {
        summary.insert(k, v);
    }
    let summary = Value::Object(summary);
    let series_path = cfg.out.join("series.csv");
    series.write(&series_path)?;
    let summary_path = cfg.out.join("summary.json");
    write_json(&summary, &summary_path)?;
    files.insert(0, series_path);
    files.insert(0, summary_path);
    Ok(ScenarioOutcome { summary, files })
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn grid_value(g: &GridSpec) -> Value {
    json!({
        "n_q": g.n_q, "n_p": g.n_p, "n_y": g.n_y,
        "dq": g.dq, "dp": g.dp, "dy": g.dy,
        "q_max": g.q_max(), "p_max": g.p_max(),
    })
}

fn diagnostic_row(d: &DiagnosticsRecord, max_abs_error: f64) -> Vec<f64> {
    vec![
        d.time,
        d.wigner_norm_error,
        d.marginal_error_q,
        d.marginal_error_p,
        d.l2_error_abs,
        d.l2_error_rel,
        d.total_variation,
        d.sign_cancellation_ratio,
        d.negativity_mass,
        d.residual_activity,
        d.chi_q,
        d.boundary_leakage,
        d.moments.q,
        d.moments.p,
        d.moments.q2,
        d.moments.p2,
        d.moments.energy,
        max_abs_error,
    ]
}

fn header(extra: &[&str]) -> Vec<String> {
    ["run", "index", "time"]
        .iter()
        .chain(DIAGNOSTIC_COLUMNS.iter())
        .chain(extra.iter())
        .map(|s| s.to_string())
        .collect()
}

fn max_abs_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// The Schrödinger reference shared by the Wigner-field scenarios.
struct Reference {
    grid: GridSpec,
    potential: Potential,
    tdse: TdseRun,
    w0: PhaseField,
    initial_marginal_error: f64,
    time_steps: usize,
}

impl Reference {
    fn new(cfg: &ScenarioConfig, potential: Potential) -> Result<Self> {
        let grid = cfg.grid()?;
        let psi0 = init_superposition_02(grid)?;
        let tdse = evolve_tdse(&psi0, &potential, &cfg.time())?;
        let w0 = wigner_from_wavefunction(&psi0, &grid)?;
        let initial_marginal_error = max_abs_vec_diff(&marginals(&w0).0, &psi0.density());
        let time_steps = cfg.time().n_steps();
        Ok(Self {
            grid,
            potential,
            tdse,
            w0,
            initial_marginal_error,
            time_steps,
        })
    }

    fn wigner(&self, index: usize) -> Result<PhaseField> {
        wigner_from_wavefunction(&self.tdse.snapshots[index], &self.grid)
    }

    fn last(&self) -> usize {
        self.tdse.snapshots.len() - 1
    }

    fn common(&self) -> Vec<(String, Value)> {
        vec![
            ("grid".into(), grid_value(&self.grid)),
            ("lambda".into(), json!(self.potential.lambda())),
            ("snapshots".into(), json!(self.tdse.times.len())),
            ("time_steps".into(), json!(self.time_steps)),
            ("t_final".into(), json!(self.tdse.times[self.last()])),
            ("norm_drift".into(), json!(self.tdse.max_norm_drift)),
            (
                "max_wavefunction_boundary_mass".into(),
                json!(self.tdse.max_boundary_mass),
            ),
            (
                "initial_marginal_error".into(),
                json!(self.initial_marginal_error),
            ),
        ]
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Run {
    Reference,
    Classical,
    Corrected,
    /// Single-shot interpolated rotation of `W(0)`, harmonic only.
    Rotation,
}

impl Run {
    fn name(self) -> &'static str {
        match self {
            Run::Reference => "reference",
            Run::Classical => "classical",
            Run::Corrected => "corrected",
            Run::Rotation => "exact-rotation",
        }
    }
}

/// Per-run aggregates over all snapshots.
struct RunStats {
    first: DiagnosticsRecord,
    last: DiagnosticsRecord,
    last_field: PhaseField,
    max_norm_error: f64,
    max_boundary_leakage: f64,
    max_chi_q: f64,
    min_chi_q: f64,
    /// Column-wise maxima of the extra columns.
    max_extra: Vec<f64>,
    snapshots: usize,
}

impl RunStats {
    fn value(&self) -> Result<Value> {
        Ok(json!({
            "initial": to_value(&self.first)?,
            "final": to_value(&self.last)?,
            "max_wigner_norm_error": self.max_norm_error,
            "max_boundary_leakage": self.max_boundary_leakage,
            "max_chi_q": self.max_chi_q,
            "min_chi_q": self.min_chi_q,
            "snapshots": self.snapshots,
        }))
    }
}

type Extra<'a> = &'a dyn Fn(f64, &PhaseField) -> Vec<f64>;

/// Evolves one run, writing a series row per snapshot and optional dumps of
/// the first and last fields. `extra(t, W)` fills the trailing columns.
fn track(
    cfg: &ScenarioConfig,
    reference: &Reference,
    run: Run,
    series: &mut Table,
    files: &mut Vec<PathBuf>,
    extra: Option<Extra<'_>>,
) -> Result<RunStats> {
    let last_index = reference.last();
    let mut stats: Option<RunStats> = None;
    let mut observe = |index: usize, t: f64, w: &PhaseField| -> Result<()> {
        let reference_w = reference.wigner(index)?;
        let d = compute_diagnostics(w, &reference_w, &reference.potential, t)?;
        let max_abs = w.max_abs_diff(&reference_w)?;
        let mut row = diagnostic_row(&d, max_abs);
        let e = extra.map(|f| f(t, w)).unwrap_or_default();
        row.extend(&e);
        series.push(run.name(), index, &row);
        if cfg.dump_fields && (index == 0 || index == last_index) {
            let path = cfg.out.join(field_file_name(run.name(), t));
            emit_field_csv(w, &path)?;
            files.push(path);
        }
        let s = stats.get_or_insert_with(|| RunStats {
            first: d,
            last: d,
            last_field: w.clone(),
            max_norm_error: 0.0,
            max_boundary_leakage: 0.0,
            max_chi_q: d.chi_q,
            min_chi_q: d.chi_q,
            max_extra: vec![0.0; e.len()],
            snapshots: 0,
        });
        s.last = d;
        s.max_norm_error = s.max_norm_error.max(d.wigner_norm_error);
        s.max_boundary_leakage = s.max_boundary_leakage.max(d.boundary_leakage);
        s.max_chi_q = s.max_chi_q.max(d.chi_q);
        s.min_chi_q = s.min_chi_q.min(d.chi_q);
        for (m, v) in s.max_extra.iter_mut().zip(&e) {
            *m = m.max(*v);
        }
        s.snapshots += 1;
        if index == last_index {
            s.last_field = w.clone();
        }
        Ok(())
    };
    let evo = cfg.evolution();
    match run {
        Run::Reference => {
            for (index, &t) in reference.tdse.times.iter().enumerate() {
                observe(index, t, &reference.wigner(index)?)?;
            }
        }
        Run::Rotation => {
            for (index, &t) in reference.tdse.times.iter().enumerate() {
                observe(
                    index,
                    t,
                    &rotate_exact_harmonic(&reference.w0, t, cfg.interpolation),
                )?;
            }
        }
        Run::Classical => {
            evolve_classical_only_with(&reference.w0, &reference.potential, &evo, &mut observe)?
        }
        Run::Corrected => {
            evolve_with_residual_with(&reference.w0, &reference.potential, &evo, &mut observe)?
        }
    }
    stats.ok_or_else(|| Error::InvalidConfig("run produced no snapshots".into()))
}

type Headline = Vec<(String, Value)>;

fn harmonic_null(cfg: &ScenarioConfig, files: &mut Vec<PathBuf>) -> Result<(Headline, Table)> {
    let reference = Reference::new(cfg, Potential::harmonic())?;
    let grid = reference.grid;
    let exact = |t: f64, w: &PhaseField| {
        let (c, s) = (t.cos(), t.sin());
        let rotated = PhaseField::from_fn(grid, |q, p| {
            superposition_02_wigner(q * c - p * s, q * s + p * c)
        });
        w.max_abs_diff(&rotated).expect("same grid")
    };
    let extra = |t: f64, w: &PhaseField| {
        let residual = moyal_residual(w, &Potential::harmonic()).l2_norm() / w.l2_norm();
        vec![exact(t, w), residual]
    };
    let mut series = Table::new(&header(&["exact_rotation_error", "residual_norm"]));
    let mut stats = Vec::new();
    for run in [
        Run::Reference,
        Run::Rotation,
        Run::Classical,
        Run::Corrected,
    ] {
        stats.push(track(
            cfg,
            &reference,
            run,
            &mut series,
            files,
            Some(&extra),
        )?);
    }
    let [reference_stats, rotation, carrier, corrected]: [RunStats; 4] =
        stats.try_into().ok().expect("four runs");
    let residual_norm = stats_max(&[&reference_stats, &rotation, &carrier, &corrected], 1);
    let max_chi_q = [&reference_stats, &rotation, &carrier, &corrected]
        .iter()
        .fold(0.0f64, |m, s| m.max(s.max_chi_q));
    let mut h = reference.common();
    h.extend([
        ("rotation_error".into(), json!(carrier.max_extra[0])),
        (
            "rotation_error_final".into(),
            json!(exact(carrier.last.time, &carrier.last_field)),
        ),
        (
            "interpolated_rotation_error".into(),
            json!(rotation.max_extra[0]),
        ),
        (
            "reference_rotation_error".into(),
            json!(reference_stats.max_extra[0]),
        ),
        (
            "carrier_vs_reference_max_abs".into(),
            json!(carrier
                .last_field
                .max_abs_diff(&reference_stats.last_field)?),
        ),
        ("residual_norm".into(), json!(residual_norm)),
        (
            "corrected_equals_carrier".into(),
            json!(corrected.last_field == carrier.last_field),
        ),
        ("max_chi_q".into(), json!(max_chi_q)),
        (
            "runs".into(),
            json!({
                "reference": reference_stats.value()?,
                "exact-rotation": rotation.value()?,
                "classical": carrier.value()?,
                "corrected": corrected.value()?,
            }),
        ),
    ]);
    Ok((h, series))
}

fn stats_max(runs: &[&RunStats], column: usize) -> f64 {
    runs.iter().fold(0.0f64, |m, s| m.max(s.max_extra[column]))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn quartic_runs(
    cfg: &ScenarioConfig,
    corrected: bool,
    files: &mut Vec<PathBuf>,
) -> Result<(Headline, Table)> {
    let reference = Reference::new(cfg, Potential::quartic(cfg.lambda))?;
    let mut series = Table::new(&header(&[]));
    let reference_stats = track(cfg, &reference, Run::Reference, &mut series, files, None)?;
    let classical = track(cfg, &reference, Run::Classical, &mut series, files, None)?;
    let mut h = reference.common();
    h.extend([
        ("classical_error".into(), json!(classical.last.l2_error_rel)),
        (
            "classical_error_abs".into(),
            json!(classical.last.l2_error_abs),
        ),
        (
            "classical_max_abs_error".into(),
            json!(classical
                .last_field
                .max_abs_diff(&reference_stats.last_field)?),
        ),
        ("chi_q_initial".into(), json!(reference_stats.first.chi_q)),
        ("chi_q_final".into(), json!(reference_stats.last.chi_q)),
    ]);
    let mut runs =
        json!({ "reference": reference_stats.value()?, "classical": classical.value()? });
    if corrected {
        let fixed = track(cfg, &reference, Run::Corrected, &mut series, files, None)?;
        let (m, r) = (fixed.last.moments, reference_stats.last.moments);
        h.extend([
            ("corrected_error".into(), json!(fixed.last.l2_error_rel)),
            ("corrected_error_abs".into(), json!(fixed.last.l2_error_abs)),
            (
                "improvement_ratio".into(),
                json!(classical.last.l2_error_abs / fixed.last.l2_error_abs),
            ),
            (
                "corrected_below_classical".into(),
                json!(fixed.last.l2_error_abs < classical.last.l2_error_abs),
            ),
            (
                "corrected_max_wigner_norm_error".into(),
                json!(fixed.max_norm_error),
            ),
            (
                "corrected_max_boundary_leakage".into(),
                json!(fixed.max_boundary_leakage),
            ),
            (
                "corrected_moment_errors".into(),
                json!({
                    "q2": relative(m.q2, r.q2),
                    "p2": relative(m.p2, r.p2),
                    "energy": relative(m.energy, r.energy),
                }),
            ),
        ]);
        runs["corrected"] = fixed.value()?;
    }
    h.push(("runs".into(), runs));
    Ok((h, series))
}

fn quartic_residual_field(
    cfg: &ScenarioConfig,
    files: &mut Vec<PathBuf>,
) -> Result<(Headline, Table)> {
    let reference = Reference::new(cfg, Potential::quartic(cfg.lambda))?;
    let v = &reference.potential;
    let mut series = Table::new(&[
        "run",
        "index",
        "time",
        "chi_q",
        "epsilon_q",
        "activity",
        "source_mass",
        "sink_mass",
        "residual_l2",
        "classical_l2",
    ]);
    let mut fields = Vec::new();
    for (index, &t) in reference.tdse.times.iter().enumerate() {
        let w = reference.wigner(index)?;
        let d = residual_diagnostics(&w, v);
        series.push(
            "reference",
            index,
            &[
                t,
                d.chi_q,
                d.epsilon_q.unwrap_or(f64::NAN),
                d.activity,
                d.source_mass,
                d.sink_mass,
                d.residual_l2,
                d.classical_l2,
            ],
        );
        if index == 0 || index == reference.last() {
            fields.push((t, w, d));
        }
    }
    let mut snapshots = Map::new();
    for (t, w, d) in &fields {
        let k = moyal_residual(w, v);
        let split = hahn_jordan_split(&k);
        let min = minimality_check(&k, &split.positive_part, &split.negative_part)?;
        let doubled = moyal_residual(w, &Potential::quartic(2.0 * cfg.lambda));
        let scale = k.max_abs();
        let linearity = if scale > 0.0 {
            doubled.max_abs_diff(&k.scaled(2.0))? / (2.0 * scale)
        } else {
            0.0
        };
        let label = if *t == 0.0 { "initial" } else { "final" };
        snapshots.insert(
            label.into(),
            json!({
                "time": t,
                "diagnostics": to_value(d)?,
                "disjoint": split.disjoint(),
                "reconstruction_error": split.reconstruct().max_abs_diff(&k)?,
                "minimality_holds": min.holds,
                "minimality_excess": min.excess,
                "linearity_error": linearity,
                "max_abs_residual": scale,
            }),
        );
        if cfg.dump_fields {
            for (name, f) in [
                ("residual", &k),
                ("residual_positive", &split.positive_part),
                ("residual_negative", &split.negative_part),
            ] {
                let path = cfg.out.join(field_file_name(name, *t));
                emit_field_csv(f, &path)?;
                files.push(path);
            }
        }
    }
    let (_, _, d0) = &fields[0];
    let mut h = reference.common();
    h.extend([
        ("source_mass".into(), json!(d0.source_mass)),
        ("sink_mass".into(), json!(d0.sink_mass)),
        ("activity".into(), json!(d0.activity)),
        ("chi_q_initial".into(), json!(d0.chi_q)),
        (
            "chi_q_final".into(),
            json!(fields.last().map(|f| f.2.chi_q)),
        ),
        ("snapshots".into(), Value::Object(snapshots)),
    ]);
    Ok((h, series))
}

/// A random ensemble with roughly `zero_fraction` of paths given a zero weight.
pub fn random_ensemble(rng: &mut impl Rng, n: usize, zero_fraction: f64) -> Result<PathEnsemble> {
    let law = |rng: &mut dyn rand::RngCore| {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect::<Vec<f64>>()
    };
    let pf = law(rng);
    let pr = law(rng);
    let weight = |rng: &mut dyn rand::RngCore| {
        (0..n)
            .map(|_| {
                if rng.gen_bool(zero_fraction) {
                    0.0
                } else {
                    rng.gen_range(-3.0..3.0)
                }
            })
            .collect::<Vec<f64>>()
    };
    let wf = weight(rng);
    let wr = weight(rng);
    PathEnsemble::new(pf, pr, wf, wr)
}

/// Largest `|a_sign·e^{a_mag}·W_RΘP_RΘ − W_FP_F| / |W_FP_F|` over included paths.
pub fn pathwise_identity_residual(e: &PathEnsemble, floor: f64) -> Result<f64> {
    let d = ratio_decomposition(e, floor)?;
    Ok(d.included().fold(0.0f64, |m, i| {
        let f = e.forward_mass(i);
        m.max((d.ratio(i) * e.reverse_mass(i) - f).abs() / f.abs())
    }))
}

fn signed_path_demo(cfg: &ScenarioConfig, files: &mut Vec<PathBuf>) -> Result<(Headline, Table)> {
    let reference = Reference::new(cfg, Potential::quartic(cfg.lambda))?;
    let w0 = &reference.w0;
    let reflected = theta_reflect(w0)?;
    let env0 = default_envelope(w0, DEFAULT_ENVELOPE_EPSILON);
    let symmetric = ensemble_from_wigner_fields(w0, &reflected, &env0)?;
    let floor = symmetric.default_weight_floor();
    let d0 = ratio_decomposition(&symmetric, floor)?;
    let max_a_mag = d0.included().fold(0.0f64, |m, i| m.max(d0.a_mag[i].abs()));
    let identical = ensemble_from_wigner_fields(w0, w0, &env0)?;
    let di = ratio_decomposition(&identical, identical.default_weight_floor())?;

    let mut series = Table::new(&[
        "run",
        "index",
        "time",
        "included_paths",
        "negative_parity_fraction_count",
        "negative_parity_fraction_mass",
        "identity_residual",
        "normalized_signed_integral",
    ]);
    let mut last = Value::Null;
    for (index, &t) in reference.tdse.times.iter().enumerate() {
        let w = reference.wigner(index)?;
        let e = ensemble_from_wigner_fields(
            &w,
            &theta_reflect(&w)?,
            &default_envelope(&w, DEFAULT_ENVELOPE_EPSILON),
        )?;
        let f = e.default_weight_floor();
        let d = ratio_decomposition(&e, f)?;
        let (by_count, by_mass) = interference_parity_stats(&d, &e);
        let id = integral_identity_check(&e, f)?;
        let norm = normalized_signed_integral(&e, f)?;
        series.push(
            "theta-self-comparison",
            index,
            &[
                t,
                d.included_count() as f64,
                by_count,
                by_mass,
                id.residual,
                norm,
            ],
        );
        if index == reference.last() {
            let negative_cells = d.included().filter(|&i| d.a_sign[i] < 0).count();
            last = json!({
                "time": t,
                "included_paths": d.included_count(),
                "negative_parity_cells": negative_cells,
                "negative_parity_fraction_count": by_count,
                "negative_parity_fraction_mass": by_mass,
                "identity": to_value(&id)?,
                "pathwise_identity_residual": pathwise_identity_residual(&e, f)?,
            });
            if cfg.dump_fields {
                let mut sign = PhaseField::zeros(w.grid);
                for i in d.included() {
                    sign.values[i] = f64::from(d.a_sign[i]);
                }
                let path = cfg.out.join(field_file_name("a_sign", t));
                emit_field_csv(&sign, &path)?;
                files.push(path);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut pathwise, mut integral, mut excluded_integral) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..100 {
        let zero_fraction = if k % 2 == 0 { 0.0 } else { 0.2 };
        let e = random_ensemble(&mut rng, 50, zero_fraction)?;
        pathwise = pathwise.max(pathwise_identity_residual(&e, 0.0)?);
        let id = integral_identity_check(&e, 0.0)?;
        if zero_fraction == 0.0 {
            integral = integral.max(id.residual);
        } else {
            excluded_integral = excluded_integral.max(id.residual);
        }
    }

    let mut h = reference.common();
    h.extend([
        (
            "theta_symmetric".into(),
            json!({
                "reflection_max_abs_difference": reflected.max_abs_diff(w0)?,
                "included_paths": d0.included_count(),
                "all_sign_positive": d0.included().all(|i| d0.a_sign[i] == 1),
                "max_abs_a_mag": max_a_mag,
            }),
        ),
        (
            "identical_fields".into(),
            json!({
                "all_sign_positive": di.included().all(|i| di.a_sign[i] == 1),
                "max_abs_a_mag": di.included().fold(0.0f64, |m, i| m.max(di.a_mag[i].abs())),
            }),
        ),
        ("final_self_comparison".into(), last),
        (
            "random_ensembles".into(),
            json!({
                "count": 100,
                "paths": 50,
                "seed": cfg.seed,
                "max_pathwise_residual": pathwise,
                "max_integral_residual": integral,
                "max_restricted_integral_residual": excluded_integral,
            }),
        ),
    ]);
    Ok((h, series))
}

fn underdetermination_demo() -> Result<(Headline, Table)> {
    let demo = DemoConfig::default();
    let grid = square_grid(demo.n, demo.h)?;
    let p0 = gaussian_density(grid, 0.0, 0.0, 1.0, 1.0);
    let heat = fokker_planck_evolve(
        &p0,
        &StaticDrift::zeros(grid),
        &DiffusionField::isotropic(grid, demo.diffusion),
        demo.dt,
        demo.steps,
    )?;
    let (vq0, vp0) = axis_variances(&p0);
    let (vq1, vp1) = axis_variances(heat.snapshots.last().expect("at least one snapshot"));
    let t = *heat.times.last().expect("at least one snapshot");
    let null = null_current_demo(&demo)?;
    let moments: Vec<Value> = [1usize, 2]
        .iter()
        .map(|&n| moment_orthogonal_demo(&demo, n).and_then(|m| to_value(&m)))
        .collect::<Result<_>>()?;

    let mut series = Table::new(&[
        "run",
        "index",
        "time",
        "marginal_difference",
        "density_difference",
    ]);
    for (i, &t) in null.times.iter().enumerate() {
        series.push(
            "null-current",
            i,
            &[t, null.marginal_differences[i], null.density_differences[i]],
        );
    }
    let h = vec![
        ("grid".into(), grid_value(&grid)),
        ("demo".into(), to_value(&demo)?),
        ("steps".into(), json!(null.steps)),
        (
            "drift_l2_difference".into(),
            json!(null.drift_l2_difference),
        ),
        (
            "max_marginal_difference".into(),
            json!(null.max_marginal_difference),
        ),
        (
            "max_density_difference".into(),
            json!(null.max_density_difference),
        ),
        (
            "max_divergence_difference".into(),
            json!(null.max_divergence_difference),
        ),
        (
            "max_marginal_current".into(),
            json!(null.max_marginal_current),
        ),
        (
            "mass_drift".into(),
            json!(null.mass_drift.max(heat.mass_drift)),
        ),
        (
            "positivity_warning".into(),
            json!(null.positivity_warning || heat.positivity_warning),
        ),
        (
            "variance_growth".into(),
            json!({
                "q": vq1 - vq0,
                "p": vp1 - vp0,
                "expected": demo.diffusion * t,
            }),
        ),
        ("moment_orthogonal".into(), Value::Array(moments)),
    ];
    Ok((h, series))
}
