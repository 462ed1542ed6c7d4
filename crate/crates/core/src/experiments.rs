//! Declarative scenarios: configuration schema, code-defined presets, the scenario runner,
//! parallel parameter sweeps and the CSV/JSON writers used by `oatsim`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boson::{input_state, truncation_recommendation, BosonInput, BosonSpace};
use crate::error::{Error, Result};
use crate::model::{h_atomic_drive, h_eff_tc, h_full_driven_tc, h_ideal_oat, AtomicDrive, CompositeOperators, DriveWaveform, ModelParams};
use crate::numerics::{kron_states, partial_trace_boson, QuantumState};
use crate::observables::{fidelity, purity, squeezing_parameter};
use crate::propagation::{evolve_lindblad, evolve_unitary_pulsed, evolve_unitary_static, lindblad_spec, MasterEquation, TimeGrid};
use crate::spin::{collective_operators, css_state, rotate, rotation_operator, Axis, CssSpec, SpinEnsemble, SpinOperators};
use crate::tolerances::{Tolerances, TOL};

fn default_chi() -> f64 {
    1.0
}

fn default_workers() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Initial coherent spin state `|θ, φ⟩`; defaults to the +x equator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpin {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl Default for InitialSpin {
    fn default() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }
}

/// Cavity drive as written in a config; pulse height defaults to π-area pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveSpec {
    Constant {
        omega0: f64,
    },
    PulseTrain {
        duty: f64,
        period: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        height: Option<f64>,
    },
}

impl DriveSpec {
    pub fn waveform(&self) -> Result<DriveWaveform> {
        let w = match *self {
            DriveSpec::Constant { omega0 } => DriveWaveform::Constant { omega0 },
            DriveSpec::PulseTrain { duty, period, offset, height: None } => {
                DriveWaveform::canonical_pulse_train(duty, period, offset)?
            }
            DriveSpec::PulseTrain { duty, period, offset, height: Some(height) } => {
                DriveWaveform::PulseTrain { offset, height, duty, period }
            }
        };
        w.validate()?;
        Ok(w)
    }
}

/// Which dynamics a scenario integrates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `-2χ a†a S_z + χ S_z²` on spins ⊗ mode.
    Dispersive,
    /// Dispersive model plus the cavity-drive term `Ω̃(t) S_x`.
    Driven,
    /// `strength · S_axis²` (plus optional `turn · S_x`) on the spins alone.
    IdealOat {
        axis: Axis,
        strength: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        turn: Option<f64>,
    },
    /// Full driven Tavis-Cummings model at `Δ′/g = ratio` with `χ = g²/Δ′` held fixed.
    FullTc {
        ratio: f64,
        /// Undo the `-χ S_z` Lamb shift the full model carries relative to the dispersive one.
        #[serde(default = "default_true")]
        lamb_compensation: bool,
    },
    /// Atoms driven directly instead of through the cavity.
    AtomicDrive { variant: AtomicDrive, omega0: f64, amplitude: f64 },
    /// Spin-only master equation with collective rate `gamma`.
    Lindblad { equation: MasterEquation, gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t_end: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Xi2,
    FidelityGhz,
    Purity,
    SxMean,
    MinVariance,
    TraceError,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Xi2,
        Observable::FidelityGhz,
        Observable::Purity,
        Observable::SxMean,
        Observable::MinVariance,
        Observable::TraceError,
    ];
}

fn all_observables() -> Vec<Observable> {
    Observable::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub n_atoms: usize,
    #[serde(default = "default_chi")]
    pub chi: f64,
    pub input: BosonInput,
    #[serde(default)]
    pub initial: InitialSpin,
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSpec>,
    pub time: TimeSpec,
    #[serde(default = "all_observables")]
    pub observables: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        SpinEnsemble::new(self.n_atoms)?;
        self.input.validate()?;
        if !(self.chi > 0.0 && self.chi.is_finite()) {
            return Err(Error::InvalidParameter(format!("chi = {} must be positive", self.chi)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("worker count must be at least 1".into()));
        }
        CssSpec::new(self.initial.theta, self.initial.phi)?;
        self.grid()?;
        if let Some(d) = &self.drive {
            d.waveform()?;
        }
        match self.model {
            ModelKind::FullTc { ratio, .. } if !(ratio > 0.0 && ratio.is_finite()) => {
                Err(Error::InvalidParameter(format!("Δ′/g ratio {ratio} must be positive")))
            }
            ModelKind::Lindblad { gamma, .. } if !(gamma >= 0.0 && gamma.is_finite()) => {
                Err(Error::InvalidParameter(format!("gamma {gamma} must be finite and >= 0")))
            }
            ModelKind::AtomicDrive { omega0, .. } if !(omega0 > 0.0) => {
                Err(Error::InvalidParameter(format!("atomic splitting {omega0} must be positive")))
            }
            _ => Ok(()),
        }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(0.0, self.time.t_end, self.time.steps)
    }

    fn drive_waveform(&self) -> Result<DriveWaveform> {
        match &self.drive {
            Some(d) => d.waveform(),
            None => Ok(DriveWaveform::Constant { omega0: 0.0 }),
        }
    }

    fn constant_drive(&self) -> Result<f64> {
        match self.drive_waveform()? {
            DriveWaveform::Constant { omega0 } => Ok(omega0),
            DriveWaveform::PulseTrain { .. } => {
                Err(Error::InvalidParameter(format!("model {:?} takes a constant drive only", self.model)))
            }
        }
    }

    /// Axis and signed strength of the ideal twist this scenario approximates.
    pub fn reference_twist(&self) -> Result<(Axis, f64)> {
        let chi = self.chi;
        Ok(match self.model {
            ModelKind::Dispersive | ModelKind::FullTc { .. } | ModelKind::AtomicDrive { .. } => (Axis::Z, chi),
            ModelKind::Driven => match self.drive_waveform()? {
                DriveWaveform::Constant { omega0 } if omega0 == 0.0 => (Axis::Z, chi),
                DriveWaveform::Constant { .. } => (Axis::X, -0.5 * chi),
                DriveWaveform::PulseTrain { .. } => (Axis::Y, chi),
            },
            ModelKind::IdealOat { axis, strength, .. } => (axis, strength),
            ModelKind::Lindblad { equation, .. } => equation.twist(chi).unwrap_or((Axis::Z, chi)),
        })
    }

    /// Sets a numeric field by name (the sweep axes).
    pub fn set_axis(&mut self, axis: &str, value: f64) -> Result<()> {
        let id = self.id.clone();
        let bad = || Error::InvalidParameter(format!("axis '{axis}' does not apply to scenario '{id}'"));
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidParameter(format!("{axis} needs a non-negative integer, got {v}")))
            }
        };
        match axis {
            "n_atoms" => self.n_atoms = as_count(value)?,
            "chi" => self.chi = value,
            "t_end" => self.time.t_end = value,
            "steps" => self.time.steps = as_count(value)?,
            "n_max" => self.n_max = Some(as_count(value)?),
            "theta" => self.initial.theta = value,
            "phi" => self.initial.phi = value,
            "alpha" => match &mut self.input {
                BosonInput::Coherent { alpha_re, .. } => *alpha_re = value,
                _ => return Err(bad()),
            },
            "nbar" => match &mut self.input {
                BosonInput::Thermal { nbar } => *nbar = value,
                _ => return Err(bad()),
            },
            "r" => match &mut self.input {
                BosonInput::Squeezed { r } => *r = value,
                _ => return Err(bad()),
            },
            "n0" => match &mut self.input {
                BosonInput::Fock { n0 } => *n0 = as_count(value)?,
                _ => return Err(bad()),
            },
            "omega0" | "duty" | "period" | "offset" | "height" => match (&mut self.drive, axis) {
                (Some(DriveSpec::Constant { omega0 }), "omega0") => *omega0 = value,
                (Some(DriveSpec::PulseTrain { duty, .. }), "duty") => *duty = value,
                (Some(DriveSpec::PulseTrain { period, .. }), "period") => *period = value,
                (Some(DriveSpec::PulseTrain { offset, .. }), "offset") => *offset = value,
                (Some(DriveSpec::PulseTrain { height, .. }), "height") => *height = Some(value),
                _ => return Err(bad()),
            },
            "gamma" => match &mut self.model {
                ModelKind::Lindblad { gamma, .. } => *gamma = value,
                _ => return Err(bad()),
            },
            "ratio" => match &mut self.model {
                ModelKind::FullTc { ratio, .. } => *ratio = value,
                _ => return Err(bad()),
            },
            "strength" => match &mut self.model {
                ModelKind::IdealOat { strength, .. } => *strength = value,
                _ => return Err(bad()),
            },
            "amplitude" => match &mut self.model {
                ModelKind::AtomicDrive { amplitude, .. } => *amplitude = value,
                _ => return Err(bad()),
            },
            _ => return Err(Error::InvalidParameter(format!("unknown sweep axis '{axis}'"))),
        }
        self.validate()
    }
}

/// Names accepted by [`ScenarioConfig::set_axis`].
pub const SWEEP_AXES: &[&str] = &[
    "n_atoms", "chi", "t_end", "steps", "n_max", "theta", "phi", "alpha", "nbar", "r", "n0", "omega0", "duty",
    "period", "offset", "height", "gamma", "ratio", "strength", "amplitude",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    pub xi2: f64,
    pub fidelity_ghz: f64,
    pub purity: f64,
    pub sx_mean: f64,
    pub min_variance: f64,
    pub trace_error: f64,
}

impl SampleRow {
    pub const COLUMNS: [&'static str; 7] = ["t", "xi2", "fidelity_ghz", "purity", "sx_mean", "min_variance", "trace_error"];

    fn values(&self) -> [f64; 7] {
        [self.t, self.xi2, self.fidelity_ghz, self.purity, self.sx_mean, self.min_variance, self.trace_error]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub config: ScenarioConfig,
    /// Fock cutoff used for the cavity mode (absent for spin-only models).
    pub n_max: Option<usize>,
    pub reference_twist: (Axis, f64),
    /// Samples where the mean spin vanished and ξ² was taken in the y–z plane.
    pub mean_spin_undefined_samples: usize,
    pub tolerances: Tolerances,
    pub crate_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix_seconds: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultSeries {
    pub rows: Vec<SampleRow>,
    pub metadata: RunMetadata,
}

impl ResultSeries {
    pub fn min_xi2(&self) -> f64 {
        self.rows.iter().map(|r| r.xi2).fold(f64::INFINITY, f64::min)
    }

    pub fn max_fidelity(&self) -> f64 {
        self.rows.iter().map(|r| r.fidelity_ghz).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = SampleRow::COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.values().iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serialises")
    }

    /// Writes `path` (CSV) and the JSON sidecar next to it.
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv())?;
        std::fs::write(sidecar_path(path), self.metadata_json() + "\n")
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// `e^{-i·sgn·(π/2)S_axis²}|init⟩`: the GHZ state the reference twist reaches.
pub fn ghz_target(ens: SpinEnsemble, ops: &SpinOperators, init: &QuantumState, twist: (Axis, f64)) -> Result<QuantumState> {
    let (axis, strength) = twist;
    let h = h_ideal_oat(axis, strength.signum(), None, ops)?;
    let grid = TimeGrid::new(vec![0.0, PI / 2.0])?;
    let out = evolve_unitary_static(&h, init, &grid)?;
    debug_assert_eq!(out[1].basis(), ens.basis());
    Ok(out[1].clone())
}

/// Runs one scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultSeries> {
    run_scenario_with(cfg, false)
}

fn spin_trajectory(cfg: &ScenarioConfig) -> Result<(Vec<QuantumState>, Option<usize>)> {
    let ens = SpinEnsemble::new(cfg.n_atoms)?;
    let grid = cfg.grid()?;
    let spin0 = css_state(ens, CssSpec::new(cfg.initial.theta, cfg.initial.phi)?);
    let mut params = ModelParams::new(cfg.n_atoms);
    params.chi = cfg.chi;
    let spin_ops = collective_operators(ens);

    let composite = |n_max: usize| -> Result<(CompositeOperators, QuantumState)> {
        let space = BosonSpace::new(n_max);
        let ops = CompositeOperators::new(ens, space);
        let psi = kron_states(&spin0, &input_state(space, &cfg.input)?)?;
        Ok((ops, psi))
    };
    let recommended = cfg.n_max.unwrap_or_else(|| truncation_recommendation(&cfg.input));
    let marginals = |states: Vec<QuantumState>| -> Result<Vec<QuantumState>> { states.iter().map(partial_trace_boson).collect() };

    match cfg.model {
        ModelKind::Dispersive => {
            cfg.constant_drive().and_then(|w| {
                if w == 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("the dispersive model takes no drive; use kind = \"driven\"".into()))
                }
            })?;
            let (ops, psi) = composite(recommended)?;
            let h = h_eff_tc(&params, &ops)?;
            Ok((marginals(evolve_unitary_static(&h, &psi, &grid)?)?, Some(recommended)))
        }
        ModelKind::Driven => {
            let waveform = cfg.drive_waveform()?;
            let (ops, psi) = composite(recommended)?;
            let states = evolve_unitary_pulsed(&params, &waveform, &ops, &psi, &grid)?;
            Ok((marginals(states)?, Some(recommended)))
        }
        ModelKind::IdealOat { axis, strength, turn } => {
            let h = h_ideal_oat(axis, strength, turn, &spin_ops)?;
            Ok((evolve_unitary_static(&h, &spin0, &grid)?, None))
        }
        ModelKind::FullTc { ratio, lamb_compensation } => {
            let n_max = cfg.n_max.unwrap_or(recommended + cfg.n_atoms);
            let full = ModelParams::dispersive(cfg.n_atoms, cfg.chi, ratio);
            let drive = cfg.constant_drive()?;
            let (ops, psi) = composite(n_max)?;
            let h = h_full_driven_tc(&full, drive, &ops)?;
            let states = marginals(evolve_unitary_static(&h, &psi, &grid)?)?;
            let states = if lamb_compensation {
                states
                    .iter()
                    .zip(grid.samples())
                    .map(|(s, &t)| rotate(s, &spin_ops, Axis::Z, cfg.chi * t))
                    .collect::<Result<Vec<_>>>()?
            } else {
                states
            };
            Ok((states, Some(n_max)))
        }
        ModelKind::AtomicDrive { variant, omega0, amplitude } => {
            params.omega0 = Some(omega0);
            let (ops, psi) = composite(recommended)?;
            let h = h_atomic_drive(&params, variant, amplitude, &ops)?;
            Ok((marginals(evolve_unitary_static(&h, &psi, &grid)?)?, Some(recommended)))
        }
        ModelKind::Lindblad { equation, gamma } => {
            params.gamma = Some(gamma);
            let spec = lindblad_spec(equation, &params, cfg.constant_drive()?, &spin_ops)?;
            Ok((evolve_lindblad(&spec, &spin0, &grid)?, None))
        }
    }
}

fn run_scenario_with(cfg: &ScenarioConfig, timestamp: bool) -> Result<ResultSeries> {
    cfg.validate()?;
    let ens = SpinEnsemble::new(cfg.n_atoms)?;
    let ops = collective_operators(ens);
    let twist = cfg.reference_twist()?;
    let spin0 = css_state(ens, CssSpec::new(cfg.initial.theta, cfg.initial.phi)?);
    let target = ghz_target(ens, &ops, &spin0, twist)?;
    let (states, n_max) = spin_trajectory(cfg)?;
    let grid = cfg.grid()?;
    let wants = |o: Observable| cfg.observables.contains(&o);

    let mut undefined = 0;
    let mut rows = Vec::with_capacity(states.len());
    for (state, &t) in states.iter().zip(grid.samples()) {
        let mut row = SampleRow {
            t,
            xi2: f64::NAN,
            fidelity_ghz: f64::NAN,
            purity: f64::NAN,
            sx_mean: f64::NAN,
            min_variance: f64::NAN,
            trace_error: f64::NAN,
        };
        if wants(Observable::Xi2) || wants(Observable::MinVariance) || wants(Observable::SxMean) {
            let r = squeezing_parameter(state, &ops)?;
            if !r.mean_spin_defined {
                undefined += 1;
            }
            if wants(Observable::Xi2) {
                row.xi2 = r.xi2;
            }
            if wants(Observable::MinVariance) {
                row.min_variance = r.min_variance;
            }
            if wants(Observable::SxMean) {
                row.sx_mean = r.mean_spin[0];
            }
        }
        if wants(Observable::FidelityGhz) {
            row.fidelity_ghz = fidelity(state, &target)?;
        }
        if wants(Observable::Purity) {
            row.purity = purity(state);
        }
        if wants(Observable::TraceError) {
            row.trace_error = (state.trace() - 1.0).abs();
        }
        rows.push(row);
    }
    let generated_unix_seconds = timestamp.then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    });
    Ok(ResultSeries {
        rows,
        metadata: RunMetadata {
            config: cfg.clone(),
            n_max,
            reference_twist: twist,
            mean_spin_undefined_samples: undefined,
            tolerances: TOL,
            crate_version: env!("CARGO_PKG_VERSION"),
            generated_unix_seconds,
        },
    })
}

/// Like [`run_scenario`], recording the wall-clock time in the metadata.
pub fn run_scenario_timestamped(cfg: &ScenarioConfig) -> Result<ResultSeries> {
    run_scenario_with(cfg, true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummaryRow {
    pub value: f64,
    pub min_xi2: f64,
    pub max_fidelity: f64,
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub result: Result<ResultSeries>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub axis: String,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Summary rows of the successful points, in input order.
    pub fn summary(&self) -> Vec<SweepSummaryRow> {
        self.points
            .iter()
            .filter_map(|p| {
                p.result.as_ref().ok().map(|r| SweepSummaryRow {
                    value: p.value,
                    min_xi2: r.min_xi2(),
                    max_fidelity: r.max_fidelity(),
                })
            })
            .collect()
    }

    pub fn failures(&self) -> Vec<(f64, &Error)> {
        self.points.iter().filter_map(|p| p.result.as_ref().err().map(|e| (p.value, e))).collect()
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{},min_xi2,max_fidelity\n", self.axis);
        for r in self.summary() {
            let _ = writeln!(out, "{:e},{:e},{:e}", r.value, r.min_xi2, r.max_fidelity);
        }
        out
    }
}

/// Runs `base` once per value of `axis` on up to `workers` threads; output keeps input order.
pub fn run_sweep(base: &ScenarioConfig, axis: &str, values: &[f64], workers: usize, timestamp: bool) -> Result<SweepResult> {
    if !SWEEP_AXES.contains(&axis) {
        return Err(Error::InvalidParameter(format!("unknown sweep axis '{axis}'")));
    }
    if workers == 0 {
        return Err(Error::InvalidParameter("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let mut cfg = base.clone();
                cfg.id = format!("{}[{axis}={value}]", base.id);
                let result = cfg.set_axis(axis, value).and_then(|_| run_scenario_with(&cfg, timestamp));
                SweepPoint { value, result }
            })
            .collect()
    });
    Ok(SweepResult { axis: axis.to_string(), points })
}

fn preset(id: &str, input: BosonInput, initial: InitialSpin, model: ModelKind, drive: Option<DriveSpec>, time: TimeSpec) -> ScenarioConfig {
    ScenarioConfig {
        id: id.to_string(),
        n_atoms: 10,
        chi: 1.0,
        input,
        initial,
        model,
        drive,
        time,
        observables: all_observables(),
        output: None,
        n_max: None,
        workers: 1,
    }
}

/// Every code-defined preset, in listing order.
pub fn presets() -> Vec<ScenarioConfig> {
    let coherent = BosonInput::coherent(1.0);
    let vacuum = BosonInput::Fock { n0: 0 };
    let north = InitialSpin { theta: 0.0, phi: 0.0 };
    let equator = InitialSpin::default();
    let squeeze_window = TimeSpec { t_end: 1.0, steps: 200 };
    // samples every π/400, so χt = π/2 is sample 200
    let ghz_window = TimeSpec { t_end: 0.6 * PI, steps: 240 };
    let long_window = TimeSpec { t_end: 4.0, steps: 800 };
    let constant = |omega0: f64| Some(DriveSpec::Constant { omega0 });
    let pulses = |duty: f64| Some(DriveSpec::PulseTrain { duty, period: 0.1, offset: 0.0, height: None });
    let twist_x = ModelKind::IdealOat { axis: Axis::X, strength: -0.5, turn: None };
    let twist_y = ModelKind::IdealOat { axis: Axis::Y, strength: 1.0, turn: None };
    let lindblad = |equation| ModelKind::Lindblad { equation, gamma: 0.01 };
    let dissipative = TimeSpec { t_end: 4.0, steps: 400 };
    vec![
        preset("fig2a_ideal", vacuum, north, twist_x, None, squeeze_window),
        preset("fig2a_red", coherent, equator, ModelKind::Dispersive, None, squeeze_window),
        preset("fig2a_blue", coherent, north, ModelKind::Driven, constant(16.0), squeeze_window),
        preset("fig2a_orange", coherent, north, ModelKind::Driven, constant(32.0), squeeze_window),
        preset("fig2a_cyan", coherent, north, ModelKind::Driven, constant(160.0), squeeze_window),
        preset("fig2b_red", coherent, equator, ModelKind::Dispersive, None, ghz_window),
        preset("fig2b_orange", coherent, north, ModelKind::Driven, constant(32.0), long_window),
        preset("fig2b_cyan", coherent, north, ModelKind::Driven, constant(160.0), long_window),
        preset("fig3a_ideal", vacuum, equator, twist_y, None, TimeSpec { t_end: 0.5, steps: 100 }),
        preset("fig3a_red", coherent, equator, ModelKind::Dispersive, None, TimeSpec { t_end: 0.5, steps: 100 }),
        preset("fig3a_orange", coherent, equator, ModelKind::Driven, pulses(0.3), TimeSpec { t_end: 0.5, steps: 100 }),
        preset("fig3a_cyan", coherent, equator, ModelKind::Driven, pulses(0.01), TimeSpec { t_end: 0.5, steps: 100 }),
        preset("fig3b_orange", coherent, equator, ModelKind::Driven, pulses(0.2), TimeSpec { t_end: 2.0, steps: 400 }),
        preset("fig3b_cyan", coherent, equator, ModelKind::Driven, pulses(0.04), TimeSpec { t_end: 2.0, steps: 400 }),
        preset("fig3b_red", coherent, equator, ModelKind::Driven, constant(0.0), TimeSpec { t_end: 2.0, steps: 400 }),
        preset("fig4_dephasing", vacuum, north, lindblad(MasterEquation::TwistDephasing), None, dissipative),
        preset("fig4_dephasing_doubled", vacuum, north, lindblad(MasterEquation::TwistDephasingDoubled), None, dissipative),
        preset("fig4_exchange", vacuum, equator, lindblad(MasterEquation::TwistExchange), None, dissipative),
    ]
}

pub fn preset_by_name(name: &str) -> Result<ScenarioConfig> {
    presets()
        .into_iter()
        .find(|p| p.id == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown preset '{name}'")))
}

/// Rotation about z applied to undo the full model's Lamb shift; exposed for comparisons.
pub fn lamb_shift_rotation(ops: &SpinOperators, chi_t: f64) -> Result<crate::numerics::OperatorMatrix> {
    rotation_operator(ops, Axis::Z, chi_t)
}
