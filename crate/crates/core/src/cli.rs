//! Command-line front end: temperature sweeps, figure presets, register
//! scaling and the validation report.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad configuration,
//! 3 numeric failure. CSV files carry the fixed header
//! `T,qfi,coherence,rel_error` with LF endings and 17-significant-digit
//! floats, so identical configurations produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dynamics::{build_channels, liouvillian, steady_state, SpectralResponse};
use crate::error::{Error, Result};
use crate::metrology::{
    find_peaks, qfi_approx_global, qfi_approx_n1, scaling_fit, sweep, temperature_grid, GridKind,
    Peak, QfiCurve,
};
use crate::model::{dressed_frame, dressed_hamiltonian, DmModelParams, ThermometerParams};
use crate::qcore::{partial_trace_op, trace_distance, trace_distance_op, Operator};
use crate::steady::{
    dd_probe_state, dm_probe_state, dressed_product_state, global_gibbs_probe,
    global_gibbs_probe_identical, probe_state_n1, probe_state_n2,
};
use crate::validate::{run_validation, ValidationOptions};
use crate::Real;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILURE: i32 = 1;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_NUMERIC_FAILURE: i32 = 3;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "THERMOQFI_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "thermoqfi",
    version,
    about = "Steady states and temperature-estimation bounds for ancilla-mediated qubit thermometers"
)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Temperature sweep writing one CSV + JSON sidecar per curve.
    Sweep(Box<SweepArgs>),
    /// Low-temperature peak growth with the number of thermalized qubits.
    Scaling(ScalingArgs),
    /// Oracle-equivalence suites and documented-discrepancy report.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Built-in parameter family: fig2, fig3, fig4, fig5a, fig5b or fig6.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON sweep configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV and sidecar files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Model: asymmetric-local, global-gibbs, dipole-dipole or dm.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    omega_p: Option<f64>,
    /// Ancilla frequencies, comma separated.
    #[arg(long, value_delimiter = ',')]
    omega_k: Option<Vec<f64>>,
    /// Ancilla-probe couplings, comma separated.
    #[arg(long, value_delimiter = ',')]
    g_k: Option<Vec<f64>>,
    /// Partner frequency for the pair models.
    #[arg(long)]
    omega_1: Option<f64>,
    /// Pair coupling for the pair models.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Grid spacing: log or linear.
    #[arg(long)]
    grid: Option<String>,
    /// Outputs to compute: qfi, coherence, rel_error, peaks (comma list).
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Cross-check the closed-form state against the Liouvillian null
    /// space at every grid point (asymmetric-local only).
    #[arg(long)]
    validate_numeric: bool,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, default_value_t = 1.0)]
    omega_p: f64,
    /// Shared ancilla frequency.
    #[arg(long, default_value_t = 0.03)]
    omega: f64,
    /// Shared coupling.
    #[arg(long, default_value_t = 0.01)]
    g: f64,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Debug hook: flip the detailed-balance exponent sign; the
    /// steady-state suite must then fail.
    #[arg(long)]
    inject_sign_flip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    AsymmetricLocal,
    GlobalGibbs,
    DipoleDipole,
    Dm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridChoice {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Qfi,
    Coherence,
    RelError,
    Peaks,
}

fn default_grid() -> GridChoice {
    GridChoice::Log
}

fn default_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::Qfi,
        OutputKind::Coherence,
        OutputKind::RelError,
        OutputKind::Peaks,
    ]
}

fn default_n_points() -> usize {
    400
}

/// One sweep scenario; the JSON file format mirrors this struct.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub omega_p: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega_k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g_k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_grid")]
    pub grid: GridChoice,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub validate_numeric: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min) {
            return Err(Error::Config(format!(
                "need 0 < t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.n_points < 3 {
            return Err(Error::Config(format!(
                "n_points must be at least 3, got {}",
                self.n_points
            )));
        }
        if self.omega_p <= 0.0 {
            return Err(Error::Config("omega_p must be positive".into()));
        }
        match self.model {
            ModelKind::AsymmetricLocal => {
                let n = self.omega_k.len();
                if n != self.g_k.len() {
                    return Err(Error::Config(
                        "omega_k and g_k must have equal lengths".into(),
                    ));
                }
                if !(1..=2).contains(&n) {
                    return Err(Error::Config(format!(
                        "asymmetric-local closed forms cover 1 or 2 ancillas, got {n}"
                    )));
                }
            }
            ModelKind::GlobalGibbs => {
                if self.omega_k.len() != self.g_k.len() {
                    return Err(Error::Config(
                        "omega_k and g_k must have equal lengths".into(),
                    ));
                }
                if self.omega_k.is_empty() {
                    return Err(Error::Config(
                        "global-gibbs needs at least one ancilla".into(),
                    ));
                }
            }
            ModelKind::DipoleDipole | ModelKind::Dm => {
                if self.omega_1.is_none() || self.g.is_none() {
                    return Err(Error::Config("pair models need omega_1 and g".into()));
                }
            }
        }
        if self.validate_numeric && self.model != ModelKind::AsymmetricLocal {
            return Err(Error::Config(
                "validate_numeric cross-checks the asymmetric-local model only".into(),
            ));
        }
        Ok(())
    }

    fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    fn params(&self) -> Result<ThermometerParams<Real>> {
        ThermometerParams::new(self.omega_p, self.omega_k.clone(), self.g_k.clone())
    }

    /// State family `T -> rho_probe` for the configured model.
    fn family(&self) -> Result<StateFamily> {
        match self.model {
            ModelKind::AsymmetricLocal => {
                let p = self.params()?;
                if p.n_ancilla() == 1 {
                    Ok(Box::new(move |t| Ok(probe_state_n1(&p, t)?.to_operator())))
                } else {
                    Ok(Box::new(move |t| Ok(probe_state_n2(&p, t)?.to_operator())))
                }
            }
            ModelKind::GlobalGibbs => {
                let p = self.params()?;
                Ok(Box::new(move |t| {
                    Ok(global_gibbs_probe(&p, t)?.to_operator())
                }))
            }
            ModelKind::DipoleDipole => {
                let (wp, w1, g) = (self.omega_p, self.omega_1.unwrap(), self.g.unwrap());
                Ok(Box::new(move |t| {
                    Ok(dd_probe_state(wp, w1, g, t)?.to_operator())
                }))
            }
            ModelKind::Dm => {
                let dm = DmModelParams::new(self.omega_1.unwrap(), self.omega_p, self.g.unwrap())?;
                Ok(Box::new(move |t| Ok(dm_probe_state(&dm, t)?.to_operator())))
            }
        }
    }
}

/// Boxed probe-state family `T -> rho` evaluated by the sweep machinery.
type StateFamily = Box<dyn Fn(Real) -> Result<Operator<Real>> + Sync>;

/// How the `qfi` column of a curve is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CurveKind {
    /// Finite-difference QFI of the model state family.
    Exact,
    /// One-ancilla weak-coupling closed form (local scheme).
    WeakCouplingN1,
    /// Weak-coupling closed form of the globally thermalized pair.
    WeakCouplingGlobal,
}

#[derive(Debug, Clone)]
struct CurveJob {
    name: String,
    kind: CurveKind,
    config: SweepConfig,
    note: Option<String>,
}

fn local_config(omega_p: f64, omega_k: &[f64], g_k: &[f64], t: (f64, f64)) -> SweepConfig {
    SweepConfig {
        model: ModelKind::AsymmetricLocal,
        omega_p,
        omega_k: omega_k.to_vec(),
        g_k: g_k.to_vec(),
        omega_1: None,
        g: None,
        t_min: t.0,
        t_max: t.1,
        n_points: default_n_points(),
        grid: GridChoice::Log,
        outputs: default_outputs(),
        validate_numeric: false,
    }
}

fn global_config(omega_p: f64, omega_k: &[f64], g_k: &[f64], t: (f64, f64)) -> SweepConfig {
    SweepConfig {
        model: ModelKind::GlobalGibbs,
        ..local_config(omega_p, omega_k, g_k, t)
    }
}

/// Built-in parameter families reproducing the bundled figure datasets.
pub fn preset_names() -> &'static [&'static str] {
    &["fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6"]
}

fn preset_jobs(name: &str) -> Result<Vec<CurveJob>> {
    let jobs = match name {
        "fig2" => [0.01, 0.02, 0.03, 0.04]
            .iter()
            .map(|&g| CurveJob {
                name: format!("fig2_g{g:.2}"),
                kind: CurveKind::Exact,
                config: local_config(1.0, &[0.04], &[g], (1e-3, 3.0)),
                note: None,
            })
            .collect(),
        "fig3" => vec![
            CurveJob {
                name: "fig3_exact".into(),
                kind: CurveKind::Exact,
                config: local_config(1.0, &[0.04], &[0.01], (1e-3, 3.0)),
                note: None,
            },
            CurveJob {
                name: "fig3_approx".into(),
                kind: CurveKind::WeakCouplingN1,
                config: local_config(1.0, &[0.04], &[0.01], (1e-3, 3.0)),
                note: Some(
                    "qfi column from the weak-coupling closed form; coherence from the exact state"
                        .into(),
                ),
            },
        ],
        "fig4" => [0.26, 0.30, 0.40]
            .iter()
            .map(|&wp| CurveJob {
                name: format!("fig4_wp{wp:.2}"),
                kind: CurveKind::Exact,
                config: local_config(wp, &[0.09, 0.17], &[0.003, 0.05], (1e-3, 3.0)),
                note: None,
            })
            .collect(),
        "fig5a" => vec![
            CurveJob {
                name: "fig5a_exact".into(),
                kind: CurveKind::Exact,
                config: global_config(1.0, &[0.02], &[0.02], (1e-3, 1.0)),
                note: None,
            },
            CurveJob {
                name: "fig5a_approx".into(),
                kind: CurveKind::WeakCouplingGlobal,
                config: global_config(1.0, &[0.02], &[0.02], (1e-3, 1.0)),
                note: Some(
                    "qfi column from the weak-coupling closed form, whose low-temperature term \
                     grows without bound toward T -> 0; see the validation report"
                        .into(),
                ),
            },
        ],
        "fig5b" => (1..=10)
            .map(|n| CurveJob {
                name: format!("fig5b_n{n:02}"),
                kind: CurveKind::Exact,
                config: global_config(1.0, &vec![0.03; n], &vec![0.01; n], (1e-3, 3.0)),
                note: None,
            })
            .collect(),
        "fig6" => {
            let note = "two parameter sets share g2 = 0.3; the second of them also moves \
                        omega_1 to 0.85";
            [
                (0.15, 0.09, "fig6_g2_0.15"),
                (0.20, 0.09, "fig6_g2_0.20"),
                (0.30, 0.09, "fig6_g2_0.30"),
                (0.30, 0.85, "fig6_g2_0.30_w1_0.85"),
            ]
            .iter()
            .map(|&(g2, w1, name)| CurveJob {
                name: name.into(),
                kind: CurveKind::Exact,
                config: global_config(1.0, &[w1, 0.2, 0.5], &[0.003, g2, 0.008], (1e-3, 3.0)),
                note: Some(note.into()),
            })
            .collect()
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (available: {})",
                preset_names().join(", ")
            )))
        }
    };
    Ok(jobs)
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the fixed-format curve CSV; never emits NaN or infinity. Where
/// the information vanishes below f64 resolution the error bound diverges
/// and is saturated at the largest finite value; the sidecar reports how
/// many rows were saturated.
fn write_curve_csv(path: &Path, curve: &QfiCurve<Real>, cfg: &SweepConfig) -> Result<usize> {
    let mut out = String::with_capacity(curve.temps.len() * 80 + 32);
    out.push_str("T,qfi,coherence,rel_error\n");
    let mut saturated = 0usize;
    for i in 0..curve.temps.len() {
        let rel = if cfg.wants(OutputKind::RelError) {
            if curve.rel_error[i].is_finite() {
                curve.rel_error[i]
            } else {
                saturated += 1;
                f64::MAX
            }
        } else {
            0.0
        };
        let row = [curve.temps[i], curve.qfi[i], curve.coherence[i], rel];
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite value at T = {}",
                curve.temps[i]
            )));
        }
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt17(v));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(saturated)
}

fn peaks_json(peaks: &[Peak<Real>]) -> serde_json::Value {
    json!(peaks
        .iter()
        .map(|p| json!({"T": p.temperature, "F": p.qfi}))
        .collect::<Vec<_>>())
}

/// Cross-check of the closed-form steady state against the Liouvillian
/// null space over the sweep grid; returns the worst trace distances.
fn numeric_cross_check(cfg: &SweepConfig, temps: &[Real]) -> Result<serde_json::Value> {
    let p = cfg.params()?;
    let frame = dressed_frame(&p)?;
    let h = dressed_hamiltonian(&p);
    let dims = vec![2usize; p.n_qubits()];
    let mut worst_full = 0.0f64;
    let mut worst_probe = 0.0f64;
    for &t in temps {
        let channels = build_channels(&p, &frame, t, &SpectralResponse::default())?;
        let numeric = steady_state(&liouvillian(&h, &channels))?;
        let analytic = dressed_product_state(&p, &frame, t)?;
        worst_full = worst_full.max(trace_distance(&numeric, &analytic)?);
        let u = crate::model::dressing_unitary(&p)?;
        let local = u.matmul(numeric.operator()).matmul(&u.dagger());
        let probe_numeric = partial_trace_op(&local, &dims, &[p.probe_site()])?;
        let closed = if p.n_ancilla() == 1 {
            probe_state_n1(&p, t)?.to_operator()
        } else {
            probe_state_n2(&p, t)?.to_operator()
        };
        worst_probe = worst_probe.max(trace_distance_op(&probe_numeric, &closed)?);
    }
    if worst_full > 1e-7 {
        return Err(Error::NumericalFailure(format!(
            "numeric steady state deviates from the closed form by {worst_full:.3e}"
        )));
    }
    Ok(json!({
        "steady_state_trace_distance_max": worst_full,
        "reduced_probe_trace_distance_max": worst_probe,
    }))
}

fn run_curve_job(job: &CurveJob, out_dir: &Path) -> Result<(PathBuf, usize)> {
    let started = Instant::now();
    let cfg = &job.config;
    cfg.validate()?;
    let kind = match cfg.grid {
        GridChoice::Log => GridKind::Log,
        GridChoice::Linear => GridKind::Linear,
    };
    let temps = temperature_grid(cfg.t_min, cfg.t_max, cfg.n_points, kind)?;
    let family = cfg.family()?;
    let mut curve = sweep(family.as_ref(), &temps)?;

    match job.kind {
        CurveKind::Exact => {}
        CurveKind::WeakCouplingN1 => {
            let p = cfg.params()?;
            let objective = move |t: Real| qfi_approx_n1(&p, t);
            curve.qfi = temps.iter().map(|&t| objective(t)).collect::<Result<_>>()?;
            curve.rel_error = temps
                .iter()
                .zip(curve.qfi.iter())
                .map(|(&t, &f)| {
                    if f > 0.0 {
                        1.0 / (t * f.sqrt())
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            curve.peaks = find_peaks(&temps, &curve.qfi, &objective)?;
        }
        CurveKind::WeakCouplingGlobal => {
            let (wp, w1, g) = (cfg.omega_p, cfg.omega_k[0], cfg.g_k[0]);
            let objective = move |t: Real| Ok(qfi_approx_global(wp, w1, g, t));
            curve.qfi = temps
                .iter()
                .map(|&t| qfi_approx_global(wp, w1, g, t))
                .collect();
            curve.rel_error = temps
                .iter()
                .zip(curve.qfi.iter())
                .map(|(&t, &f)| {
                    if f > 0.0 {
                        1.0 / (t * f.sqrt())
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            curve.peaks = find_peaks(&temps, &curve.qfi, &objective)?;
        }
    }

    let validation = if cfg.validate_numeric {
        Some(numeric_cross_check(cfg, &temps)?)
    } else {
        None
    };

    let csv_path = out_dir.join(format!("{}.csv", job.name));
    let saturated = write_curve_csv(&csv_path, &curve, cfg)?;

    let sidecar = json!({
        "curve": job.name,
        "config": cfg,
        "peaks": if cfg.wants(OutputKind::Peaks) { peaks_json(&curve.peaks) } else { serde_json::Value::Null },
        "fits": serde_json::Value::Null,
        "validation": validation,
        "note": job.note,
        "rel_error_saturated_rows": saturated,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    fs::write(
        out_dir.join(format!("{}.json", job.name)),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    Ok((csv_path, curve.peaks.len()))
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let jobs: Vec<CurveJob> = if let Some(preset) = &args.preset {
        if args.model.is_some()
            || args.omega_p.is_some()
            || args.omega_k.is_some()
            || args.g_k.is_some()
            || args.omega_1.is_some()
            || args.g.is_some()
            || args.t_min.is_some()
            || args.t_max.is_some()
            || args.n_points.is_some()
            || args.grid.is_some()
            || args.outputs.is_some()
            || args.validate_numeric
        {
            return Err(Error::Config(
                "preset parameter families are fixed; use --config or bare flags to customize"
                    .into(),
            ));
        }
        preset_jobs(preset)?
    } else {
        let mut cfg: SweepConfig = if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))?
        } else {
            // flags must specify the model from scratch
            let model = args
                .model
                .as_deref()
                .ok_or_else(|| Error::Config("need --preset, --config or --model".into()))?;
            SweepConfig {
                model: parse_model(model)?,
                omega_p: 1.0,
                omega_k: Vec::new(),
                g_k: Vec::new(),
                omega_1: None,
                g: None,
                t_min: 1e-3,
                t_max: 3.0,
                n_points: default_n_points(),
                grid: GridChoice::Log,
                outputs: default_outputs(),
                validate_numeric: false,
            }
        };
        apply_overrides(&mut cfg, args)?;
        vec![CurveJob {
            name: "sweep".into(),
            kind: CurveKind::Exact,
            config: cfg,
            note: None,
        }]
    };

    fs::create_dir_all(&args.out_dir)?;
    for job in &jobs {
        job.config.validate()?;
    }
    for job in &jobs {
        let (path, n_peaks) = run_curve_job(job, &args.out_dir)?;
        println!("wrote {} ({} peaks)", path.display(), n_peaks);
    }
    Ok(EXIT_OK)
}

fn parse_model(name: &str) -> Result<ModelKind> {
    match name {
        "asymmetric-local" => Ok(ModelKind::AsymmetricLocal),
        "global-gibbs" => Ok(ModelKind::GlobalGibbs),
        "dipole-dipole" => Ok(ModelKind::DipoleDipole),
        "dm" => Ok(ModelKind::Dm),
        other => Err(Error::Config(format!("unknown model '{other}'"))),
    }
}

fn apply_overrides(cfg: &mut SweepConfig, args: &SweepArgs) -> Result<()> {
    if let Some(model) = &args.model {
        cfg.model = parse_model(model)?;
    }
    if let Some(v) = args.omega_p {
        cfg.omega_p = v;
    }
    if let Some(v) = &args.omega_k {
        cfg.omega_k = v.clone();
    }
    if let Some(v) = &args.g_k {
        cfg.g_k = v.clone();
    }
    if let Some(v) = args.omega_1 {
        cfg.omega_1 = Some(v);
    }
    if let Some(v) = args.g {
        cfg.g = Some(v);
    }
    if let Some(v) = args.t_min {
        cfg.t_min = v;
    }
    if let Some(v) = args.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = args.n_points {
        cfg.n_points = v;
    }
    if let Some(g) = &args.grid {
        cfg.grid = match g.as_str() {
            "log" => GridChoice::Log,
            "linear" => GridChoice::Linear,
            other => return Err(Error::Config(format!("unknown grid '{other}'"))),
        };
    }
    if let Some(outs) = &args.outputs {
        let mut parsed = Vec::new();
        for o in outs {
            parsed.push(match o.as_str() {
                "qfi" => OutputKind::Qfi,
                "coherence" => OutputKind::Coherence,
                "rel_error" => OutputKind::RelError,
                "peaks" => OutputKind::Peaks,
                other => return Err(Error::Config(format!("unknown output '{other}'"))),
            });
        }
        cfg.outputs = parsed;
    }
    if args.validate_numeric {
        cfg.validate_numeric = true;
    }
    Ok(())
}

fn cmd_scaling(args: &ScalingArgs) -> Result<i32> {
    if args.n_max < 2 {
        return Err(Error::Config("n_max must be at least 2".into()));
    }
    if !(args.omega_p > 0.0 && args.omega > 0.0) {
        return Err(Error::Config("frequencies must be positive".into()));
    }
    let started = Instant::now();
    fs::create_dir_all(&args.out_dir)?;
    let temps = temperature_grid(1e-3, 3.0, 400, GridKind::Log)?;
    let mut rows = Vec::new();
    for n in 2..=args.n_max {
        let (omega, g, omega_p) = (args.omega, args.g, args.omega_p);
        let family =
            move |t: Real| Ok(global_gibbs_probe_identical(n, omega, g, omega_p, t)?.to_operator());
        let curve = sweep(&family, &temps)?;
        let peak = curve.peaks.first().copied().ok_or_else(|| {
            Error::NumericalFailure(format!("no admitted peak for register size {n}"))
        })?;
        let coherence = family(peak.temperature)?[(0, 1)].norm();
        rows.push((n, peak.temperature, peak.qfi, coherence));
    }

    let mut csv = String::from("N,T_peak,qfi_peak,coherence_peak\n");
    for &(n, t, f, c) in &rows {
        csv.push_str(&format!("{n},{},{},{}\n", fmt17(t), fmt17(f), fmt17(c)));
    }
    let csv_path = args.out_dir.join("scaling.csv");
    fs::write(&csv_path, csv)?;

    let ns: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let fs_: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let cs: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let mut warning = None;
    let fits = if ns.len() >= 4 {
        let qfi_fit = scaling_fit(&ns, &fs_)?;
        let coh_fit = scaling_fit(&ns, &cs)?;
        json!({
            "qfi": {"exponent": qfi_fit.exponent, "prefactor": qfi_fit.prefactor, "r_squared": qfi_fit.r_squared},
            "coherence": {"exponent": coh_fit.exponent, "prefactor": coh_fit.prefactor, "r_squared": coh_fit.r_squared},
        })
    } else {
        warning = Some("fewer than 4 register sizes: power-law fit skipped".to_string());
        serde_json::Value::Null
    };

    // dense-reduction spot check at the largest register up to 8
    let n_check = args.n_max.min(8);
    let dense_check = {
        let p = ThermometerParams::new(
            args.omega_p,
            vec![args.omega; n_check],
            vec![args.g; n_check],
        )?;
        let t_check = rows
            .iter()
            .find(|r| r.0 == n_check)
            .map(|r| r.1)
            .unwrap_or(0.0075);
        let h = crate::model::build_hamiltonian(&p);
        let rho = crate::qcore::gibbs_state(&h, t_check)?;
        let dims = vec![2usize; p.n_qubits()];
        let dense = partial_trace_op(rho.operator(), &dims, &[p.probe_site()])?;
        let fast =
            global_gibbs_probe_identical(n_check, args.omega, args.g, args.omega_p, t_check)?
                .to_operator();
        let td = trace_distance_op(&dense, &fast)?;
        if td > 1e-10 {
            return Err(Error::NumericalFailure(format!(
                "fast path deviates from the dense reduction by {td:.3e} at N = {n_check}"
            )));
        }
        json!({"n": n_check, "trace_distance": td})
    };

    let sidecar = json!({
        "config": {
            "omega_p": args.omega_p,
            "omega": args.omega,
            "g": args.g,
            "n_max": args.n_max,
        },
        "fits": fits,
        "dense_check": dense_check,
        "warning": warning,
        "rows": rows.iter().map(|&(n, t, f, c)| json!({
            "n": n, "t_peak": t, "qfi_peak": f, "coherence_peak": c,
        })).collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    fs::write(
        args.out_dir.join("scaling.json"),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", csv_path.display());
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let started = Instant::now();
    fs::create_dir_all(&args.out_dir)?;
    let opts = ValidationOptions {
        hooks: crate::dynamics::ChannelHooks {
            flip_balance_sign: args.inject_sign_flip,
        },
        ..ValidationOptions::default()
    };
    let report = run_validation::<Real>(&opts)?;
    print!("{}", report.render_text());
    let mut doc = report.to_json();
    doc["version"] = json!(env!("CARGO_PKG_VERSION"));
    doc["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    doc["inject_sign_flip"] = json!(args.inject_sign_flip);
    fs::write(
        args.out_dir.join("validation_report.json"),
        serde_json::to_string_pretty(&doc)? + "\n",
    )?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILURE
    })
}

fn classify(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Argument(_) => EXIT_BAD_CONFIG,
        _ => EXIT_NUMERIC_FAILURE,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Scaling(args) => cmd_scaling(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build worker pool: {e}");
            return EXIT_NUMERIC_FAILURE;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}
