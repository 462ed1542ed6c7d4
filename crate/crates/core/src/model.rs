//! Hamiltonian builders and cavity-drive waveforms.
//!
//! Units: the OAT rate χ sets the energy scale, times are in 1/χ and every rate
//! (drive amplitudes, decay) is in units of χ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boson::{ladder_operators, BosonOperators, BosonSpace};
use crate::error::{Error, Result};
use crate::numerics::{kron, BasisTag, OperatorMatrix};
use crate::spin::{collective_operators, Axis, SpinEnsemble, SpinOperators};
use crate::tolerances::TOL;

/// Physical constants of the atoms–cavity system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    /// OAT rate χ.
    pub chi: f64,
    /// Cavity–drive detuning Δ′ = ω − ω_d.
    pub delta_prime: Option<f64>,
    /// Single-atom coupling g.
    pub g: Option<f64>,
    /// Cavity linewidth κ.
    pub kappa: Option<f64>,
    /// Collective decay rate Γ; derived from χκ/Δ′ when not given.
    pub gamma: Option<f64>,
    /// Atomic splitting ω₀ (direct-atomic-driving comparison only).
    pub omega0: Option<f64>,
}

impl ModelParams {
    pub fn new(n_atoms: usize) -> Self {
        Self { n_atoms, chi: 1.0, delta_prime: None, g: None, kappa: None, gamma: None, omega0: None }
    }

    /// Dispersive parameters with Δ′/g = `ratio` at fixed χ = g²/Δ′.
    pub fn dispersive(n_atoms: usize, chi: f64, ratio: f64) -> Self {
        let g = chi * ratio;
        Self { chi, g: Some(g), delta_prime: Some(g * ratio), ..Self::new(n_atoms) }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        let rates = [
            ("chi", Some(self.chi)),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("omega0", self.omega0),
        ];
        for (name, v) in rates {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and >= 0")));
                }
            }
        }
        if let (Some(g), Some(dp)) = (self.g, self.delta_prime) {
            let implied = g * g / dp;
            if (implied - self.chi).abs() > 1e-9 * self.chi.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!("χ = {} but g²/Δ′ = {implied}", self.chi)));
            }
        }
        if let (Some(gamma), Some(kappa), Some(dp)) = (self.gamma, self.kappa, self.delta_prime) {
            let implied = self.chi * kappa / dp;
            if (implied - gamma).abs() > 1e-9 * gamma.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!("Γ = {gamma} but χκ/Δ′ = {implied}")));
            }
        }
        Ok(())
    }

    /// Collective decay rate Γ (explicit value, else χκ/Δ′, else 0).
    pub fn gamma(&self) -> f64 {
        match (self.gamma, self.kappa, self.delta_prime) {
            (Some(g), _, _) => g,
            (None, Some(k), Some(dp)) => self.chi * k / dp,
            _ => 0.0,
        }
    }

    pub fn ensemble(&self) -> Result<SpinEnsemble> {
        SpinEnsemble::new(self.n_atoms)
    }
}

/// Spin and boson operators embedded in the composite space, plus the spin-only set.
#[derive(Debug, Clone)]
pub struct CompositeOperators {
    pub spin_only: SpinOperators,
    pub boson_only: BosonOperators,
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub s_plus: OperatorMatrix,
    pub s_minus: OperatorMatrix,
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub number: OperatorMatrix,
}

impl CompositeOperators {
    pub fn new(ens: SpinEnsemble, space: BosonSpace) -> Self {
        let spin = collective_operators(ens);
        let boson = ladder_operators(space);
        let id_s = OperatorMatrix::identity(ens.basis());
        let id_b = OperatorMatrix::identity(space.basis());
        let on_spin = |op: &OperatorMatrix| kron(op, &id_b).expect("spin ⊗ boson");
        let on_boson = |op: &OperatorMatrix| kron(&id_s, op).expect("spin ⊗ boson");
        Self {
            sx: on_spin(&spin.sx),
            sy: on_spin(&spin.sy),
            sz: on_spin(&spin.sz),
            s_plus: on_spin(&spin.s_plus),
            s_minus: on_spin(&spin.s_minus),
            a: on_boson(&boson.a),
            a_dag: on_boson(&boson.a_dag),
            number: on_boson(&boson.number),
            spin_only: spin,
            boson_only: boson,
        }
    }

    pub fn basis(&self) -> BasisTag {
        self.sz.basis()
    }
}

fn check_ops(params: &ModelParams, ops: &CompositeOperators) -> Result<()> {
    match ops.basis() {
        BasisTag::Composite { n_atoms, .. } if n_atoms == params.n_atoms => Ok(()),
        found => Err(Error::BasisMismatch {
            expected: BasisTag::Composite { n_atoms: params.n_atoms, n_max: 0 },
            found,
        }),
    }
}

/// Dispersive Tavis-Cummings Hamiltonian `-2χ a†a S_z + χ S_z²`.
///
/// Built as a Kronecker product of diagonal factors, so the result is exactly diagonal.
pub fn h_eff_tc(params: &ModelParams, ops: &CompositeOperators) -> Result<OperatorMatrix> {
    check_ops(params, ops)?;
    let chi = params.chi;
    let spin = &ops.spin_only;
    let stark = kron(&spin.sz.scale(-2.0 * chi), &ops.boson_only.number)?;
    let id_b = OperatorMatrix::identity(ops.boson_only.number.basis());
    let oat = kron(&(&spin.sz * &spin.sz).scale(chi), &id_b)?;
    (stark + oat).checked_hermitian()
}

/// Cavity-driven effective Hamiltonian `Ω̃ S_x - 2χ a†a S_z + χ S_z²`.
pub fn h_eff_driven(params: &ModelParams, drive_value: f64, ops: &CompositeOperators) -> Result<OperatorMatrix> {
    let mut h = h_eff_tc(params, ops)?;
    if drive_value != 0.0 {
        h += &ops.sx.scale(drive_value);
    }
    h.checked_hermitian()
}

/// Rotating-frame driven TC Hamiltonian `Δ′ a†a + g(a† S₋ + a S₊) + Ω(a + a†)`.
pub fn h_full_driven_tc(params: &ModelParams, drive_value: f64, ops: &CompositeOperators) -> Result<OperatorMatrix> {
    check_ops(params, ops)?;
    let (Some(dp), Some(g)) = (params.delta_prime, params.g) else {
        return Err(Error::InvalidParameter("full TC Hamiltonian needs Δ′ and g".into()));
    };
    let mut h = ops.number.scale(dp);
    if g != 0.0 {
        h += &(&ops.a_dag * &ops.s_minus + &ops.a * &ops.s_plus).scale(g);
    }
    if drive_value != 0.0 {
        h += &(&ops.a + &ops.a_dag).scale(drive_value);
    }
    h.checked_hermitian()
}

/// `strength · S_axis²`, optionally plus a transverse `Ω₀ S_x` (twist-and-turn).
pub fn h_ideal_oat(axis: Axis, strength: f64, turn: Option<f64>, spin: &SpinOperators) -> Result<OperatorMatrix> {
    let s = spin.axis(axis);
    let mut h = (s * s).scale(strength);
    if let Some(omega) = turn {
        h += &spin.sx.scale(omega);
    }
    let sym = (&h + &h.dagger()).scale(0.5);
    sym.checked_hermitian()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomicDrive {
    /// Constant `Ω₀ S_x` drive applied to the atoms: `... - (Ω₀²/2ω₀) S_z`.
    ConstantDrive,
    /// `Ω₀ cos(ω₀t) S_x` drive: `... + (Ω₀/2) S_x - (Ω₀²/16ω₀) S_z`.
    OscillatingDrive,
}

/// Effective Hamiltonians for driving the atoms directly instead of the cavity.
pub fn h_atomic_drive(
    params: &ModelParams,
    variant: AtomicDrive,
    drive_amplitude: f64,
    ops: &CompositeOperators,
) -> Result<OperatorMatrix> {
    let base = h_eff_tc(params, ops)?;
    if drive_amplitude == 0.0 {
        return Ok(base);
    }
    let Some(w0) = params.omega0 else {
        return Err(Error::InvalidParameter("direct atomic driving needs ω₀".into()));
    };
    let w2 = drive_amplitude * drive_amplitude;
    let h = match variant {
        AtomicDrive::ConstantDrive => &base + &ops.sz.scale(-w2 / (2.0 * w0)),
        AtomicDrive::OscillatingDrive => {
            &(&base + &ops.sx.scale(drive_amplitude / 2.0)) + &ops.sz.scale(-w2 / (16.0 * w0))
        }
    };
    h.checked_hermitian()
}

/// Drive amplitude Ω̃(t) seen by the spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveWaveform {
    Constant { omega0: f64 },
    /// Square pulses of height `height` and width `duty * period`, centred on `t = k·period`,
    /// on top of a constant `offset`. Only the second half of the pulse at `t = 0` lies in `t ≥ 0`.
    PulseTrain { offset: f64, height: f64, duty: f64, period: f64 },
}

impl DriveWaveform {
    /// Pulse train whose full pulses each rotate the spins by π.
    pub fn canonical_pulse_train(duty: f64, period: f64, offset: f64) -> Result<Self> {
        let w = DriveWaveform::PulseTrain { offset, height: PI / (duty * period), duty, period };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DriveWaveform::Constant { omega0 } if !omega0.is_finite() => {
                Err(Error::InvalidParameter("drive amplitude must be finite".into()))
            }
            DriveWaveform::PulseTrain { duty, period, height, offset } => {
                if !(duty > 0.0 && duty <= 1.0) {
                    return Err(Error::InvalidParameter(format!("duty cycle {duty} outside (0, 1]")));
                }
                if !(period > 0.0 && period.is_finite()) {
                    return Err(Error::InvalidParameter(format!("pulse period {period} must be positive")));
                }
                if !(height.is_finite() && offset.is_finite()) {
                    return Err(Error::InvalidParameter("pulse height and offset must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn offset(&self) -> f64 {
        match *self {
            DriveWaveform::Constant { omega0 } => omega0,
            DriveWaveform::PulseTrain { offset, .. } => offset,
        }
    }

    /// `𝒜₀ d / ω` with `ω = 2π / period`; equals 1/2 for π pulses.
    pub fn pulse_area_ratio(&self) -> Option<f64> {
        match *self {
            DriveWaveform::PulseTrain { height, duty, period, .. } => Some(height * duty * period / (2.0 * PI)),
            DriveWaveform::Constant { .. } => None,
        }
    }

    /// Pulse edges strictly inside `(t0, t1)`, ascending.
    pub fn edges_between(&self, t0: f64, t1: f64) -> Vec<f64> {
        let DriveWaveform::PulseTrain { duty, period, .. } = *self else {
            return Vec::new();
        };
        if duty >= 1.0 {
            return Vec::new();
        }
        let half = 0.5 * duty * period;
        let mut edges = Vec::new();
        let k0 = ((t0 - half) / period).floor() as i64 - 1;
        let mut k = k0.max(0);
        loop {
            let centre = k as f64 * period;
            if centre - half > t1 {
                break;
            }
            for e in [centre - half, centre + half] {
                if e > t0 && e < t1 {
                    edges.push(e);
                }
            }
            k += 1;
        }
        edges
    }

    /// Total pulse-on time in `[0, t]`.
    fn on_time(&self, t: f64) -> f64 {
        let DriveWaveform::PulseTrain { duty, period, .. } = *self else {
            return 0.0;
        };
        let tau = duty * period;
        let half = 0.5 * tau;
        // on-time in [-τ/2, t] for pulses centred on multiples of the period
        let g = |x: f64| {
            let shifted = x + half;
            let full = (shifted / period).floor();
            full * tau + (shifted - full * period).min(tau)
        };
        g(t) - g(0.0)
    }

    pub fn integrated_area(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            DriveWaveform::Constant { omega0 } => omega0 * (t1 - t0),
            DriveWaveform::PulseTrain { offset, height, .. } => {
                offset * (t1 - t0) + height * (self.on_time(t1) - self.on_time(t0))
            }
        }
    }
}

/// Instantaneous drive amplitude Ω̃(t).
pub fn drive_value(w: &DriveWaveform, t: f64) -> f64 {
    match *w {
        DriveWaveform::Constant { omega0 } => omega0,
        DriveWaveform::PulseTrain { offset, height, duty, period } => {
            let phase = t.rem_euclid(period);
            let half = 0.5 * duty * period;
            if phase < half || period - phase < half {
                offset + height
            } else {
                offset
            }
        }
    }
}

/// Accumulated pulse-train rotation angle `∫₀ᵗ (Ω̃ - offset) dt'`.
///
/// With `canonical = true` the waveform must satisfy `𝒜₀d/ω = 1/2`, in which case the
/// angle equals `(m + 1/2)π` throughout the gap after the `m`-th full pulse.
pub fn step_phase(w: &DriveWaveform, t: f64, canonical: bool) -> Result<f64> {
    let ratio = w
        .pulse_area_ratio()
        .ok_or_else(|| Error::ConfigurationViolation("step phase needs a pulse train".into()))?;
    if canonical && (ratio - 0.5).abs() > TOL.canonical_drive {
        return Err(Error::ConfigurationViolation(format!("𝒜₀d/ω = {ratio}, expected 1/2")));
    }
    Ok(w.integrated_area(0.0, t) - w.offset() * t)
}
