//! Time evolution: closed-system propagation via cached eigensystems, pulse trains as
//! piecewise-constant segments, and Lindblad master equations.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{drive_value, h_eff_driven, h_ideal_oat, CompositeOperators, DriveWaveform, ModelParams};
use crate::numerics::{hermiticity_error, herm_eig, BasisTag, HermEig, OperatorMatrix, QuantumState};
use crate::spin::{Axis, SpinOperators};
use crate::tolerances::TOL;
use crate::C64;

/// Strictly increasing sample times; the first sample is the initial time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    samples: Vec<f64>,
}

impl TimeGrid {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidGrid("no samples".into()));
        }
        if samples.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!("samples not increasing at {} -> {}", w[0], w[1])));
        }
        Ok(Self { samples })
    }

    /// `steps + 1` equally spaced samples on `[t_start, t_end]`.
    pub fn uniform(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_end > t_start) {
            return Err(Error::InvalidGrid(format!("cannot split [{t_start}, {t_end}] into {steps} steps")));
        }
        let h = (t_end - t_start) / steps as f64;
        let mut samples: Vec<f64> = (0..=steps).map(|k| t_start + k as f64 * h).collect();
        samples[steps] = t_end;
        Self::new(samples)
    }

    /// Uniform grid from 0 with spacing `dt` up to (and including) the last multiple of `dt` not beyond `t_end`.
    pub fn with_step(t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidGrid(format!("step {dt} must be positive")));
        }
        let steps = (t_end / dt + 1e-9).floor() as usize;
        Self::uniform(0.0, steps as f64 * dt, steps)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.samples.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn expect_basis(expected: BasisTag, found: BasisTag) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::BasisMismatch { expected, found })
    }
}

fn apply_eig(eig: &HermEig, dt: f64, state: &QuantumState) -> Result<QuantumState> {
    Ok(match state {
        QuantumState::Vector { data, basis } => QuantumState::Vector { data: eig.apply_exp(dt, data), basis: *basis },
        QuantumState::Density { .. } => state.transformed(&eig.propagator(dt))?,
    })
}

/// `ψ(t_k) = exp(-iH(t_k - t_0)) ψ₀` (or `UρU†`) for a time-independent Hamiltonian.
pub fn evolve_unitary_static(h: &OperatorMatrix, state0: &QuantumState, grid: &TimeGrid) -> Result<Vec<QuantumState>> {
    expect_basis(h.basis(), state0.basis())?;
    let eig = herm_eig(h)?;
    let t0 = grid.t_start();
    grid.samples()
        .iter()
        .map(|&t| if t == t0 { Ok(state0.clone()) } else { apply_eig(&eig, t - t0, state0) })
        .collect()
}

/// Integration segments for a piecewise-constant drive: sample times merged with pulse edges.
fn segments(waveform: &DriveWaveform, grid: &TimeGrid) -> Result<Vec<(f64, f64, bool)>> {
    let mut out = Vec::new();
    for w in grid.samples().windows(2) {
        let (a, b) = (w[0], w[1]);
        // edges landing on a sample up to rounding would leave sliver segments
        let snap = 1e-9 * (b - a);
        let mut cuts = vec![a];
        cuts.extend(waveform.edges_between(a, b).into_iter().filter(|&e| e - a > snap && b - e > snap));
        cuts.push(b);
        let n = cuts.len();
        for (i, c) in cuts.windows(2).enumerate() {
            out.push((c[0], c[1], i + 2 == n));
        }
    }
    for &(a, b, _) in &out {
        let span = b - a;
        let eps = 1e-6 * span;
        if drive_value(waveform, a + eps) != drive_value(waveform, b - eps) {
            return Err(Error::StepTooCoarse { t: a });
        }
    }
    Ok(out)
}

/// Propagates under `H(Ω̃(t))` for a piecewise-constant drive, splitting every step at pulse edges.
///
/// `hamiltonian` is called once per distinct drive level and its eigensystem is reused.
pub fn evolve_piecewise<F>(
    waveform: &DriveWaveform,
    hamiltonian: F,
    state0: &QuantumState,
    grid: &TimeGrid,
) -> Result<Vec<QuantumState>>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    waveform.validate()?;
    let mut cache: HashMap<u64, HermEig> = HashMap::new();
    let mut state = state0.clone();
    let mut out = Vec::with_capacity(grid.len());
    out.push(state.clone());
    for (a, b, closes_step) in segments(waveform, grid)? {
        let level = drive_value(waveform, 0.5 * (a + b));
        let eig = match cache.entry(level.to_bits()) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                let h = hamiltonian(level)?;
                expect_basis(h.basis(), state0.basis())?;
                v.insert(herm_eig(&h)?)
            }
        };
        state = apply_eig(eig, b - a, &state)?;
        if closes_step {
            out.push(state.clone());
        }
    }
    Ok(out)
}

/// Effective driven dynamics in the composite space under a constant or pulsed cavity drive.
pub fn evolve_unitary_pulsed(
    params: &ModelParams,
    waveform: &DriveWaveform,
    ops: &CompositeOperators,
    state0: &QuantumState,
    grid: &TimeGrid,
) -> Result<Vec<QuantumState>> {
    evolve_piecewise(waveform, |omega| h_eff_driven(params, omega, ops), state0, grid)
}

/// Hamiltonian plus jump operators `(A_k, γ_k)` of `dρ/dt = -i[H,ρ] + Σ γ_k D[A_k]ρ`.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub hamiltonian: OperatorMatrix,
    pub channels: Vec<(OperatorMatrix, f64)>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: OperatorMatrix, channels: Vec<(OperatorMatrix, f64)>) -> Result<Self> {
        let hamiltonian = hamiltonian.checked_hermitian()?;
        for (op, rate) in &channels {
            expect_basis(hamiltonian.basis(), op.basis())?;
            if !(*rate >= 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!("decay rate {rate} must be finite and >= 0")));
            }
        }
        Ok(Self { hamiltonian, channels })
    }

    pub fn basis(&self) -> BasisTag {
        self.hamiltonian.basis()
    }

    /// Superoperator acting on row-major `vec(ρ)`, where `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.
    pub fn liouvillian(&self) -> DMatrix<C64> {
        let d = self.hamiltonian.dim();
        let id = DMatrix::<C64>::identity(d, d);
        let kr = crate::numerics::kron_dense;
        let h = self.hamiltonian.data();
        let minus_i = C64::new(0.0, -1.0);
        let mut l = (kr(h, &id) - kr(&id, &h.transpose())) * minus_i;
        for (op, rate) in &self.channels {
            if *rate == 0.0 {
                continue;
            }
            let a = op.data();
            let ada = a.adjoint() * a;
            let g = C64::new(*rate, 0.0);
            let half = C64::new(0.5 * rate, 0.0);
            l += kr(a, &a.map(|z| z.conj())) * g;
            l -= kr(&ada, &id) * half;
            l -= kr(&id, &ada.transpose()) * half;
        }
        l
    }

    /// `dρ/dt` in matrix form.
    pub fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        rhs_with(self.hamiltonian.data(), &self.channels, rho)
    }
}

fn rhs_with(h: &DMatrix<C64>, channels: &[(OperatorMatrix, f64)], rho: &DMatrix<C64>) -> DMatrix<C64> {
    let minus_i = C64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * minus_i;
    for (op, rate) in channels {
        if *rate == 0.0 {
            continue;
        }
        let a = op.data();
        let ad = a.adjoint();
        let ada = &ad * a;
        let term = a * rho * &ad - (&ada * rho + rho * &ada) * C64::new(0.5, 0.0);
        out += term * C64::new(*rate, 0.0);
    }
    out
}

fn row_major_vec(m: &DMatrix<C64>) -> DVector<C64> {
    let d = m.nrows();
    DVector::from_fn(d * d, |k, _| m[(k / d, k % d)])
}

fn row_major_unvec(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Checks trace, Hermiticity and positivity of an evolved density matrix at time `t`.
pub fn check_density(rho: &DMatrix<C64>, t: f64) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TOL.density_trace || tr.im.abs() > TOL.density_trace {
        return Err(Error::InvariantViolation { t, what: format!("trace {tr}") });
    }
    let herm = hermiticity_error(rho);
    if herm > TOL.density_hermitian {
        return Err(Error::InvariantViolation { t, what: format!("Hermiticity error {herm:.3e}") });
    }
    let sym = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min = sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < TOL.eigenvalue_floor {
        return Err(Error::PositivityViolation { t, min_eigenvalue: min });
    }
    Ok(())
}

/// Solves a time-independent master equation by exponentiating the Liouvillian once per distinct step.
pub fn evolve_lindblad(spec: &LindbladSpec, state0: &QuantumState, grid: &TimeGrid) -> Result<Vec<QuantumState>> {
    expect_basis(spec.basis(), state0.basis())?;
    let basis = spec.basis();
    let d = basis.dim();
    let rho0 = state0.density_matrix();
    check_density(&rho0, grid.t_start())?;
    let l = spec.liouvillian();
    let mut cache: HashMap<i64, DMatrix<C64>> = HashMap::new();
    let mut v = row_major_vec(&rho0);
    let mut out = Vec::with_capacity(grid.len());
    out.push(QuantumState::density_unchecked(rho0, basis)?);
    for w in grid.samples().windows(2) {
        let dt = w[1] - w[0];
        let key = (dt * 1e12).round() as i64;
        let prop = cache.entry(key).or_insert_with(|| (&l * C64::new(dt, 0.0)).exp());
        v = &*prop * v;
        let rho = row_major_unvec(&v, d);
        check_density(&rho, w[1])?;
        out.push(QuantumState::density_unchecked(rho, basis)?);
    }
    Ok(out)
}

fn rk4_interval<F>(h_of_t: &F, channels: &[(OperatorMatrix, f64)], rho: &DMatrix<C64>, a: f64, b: f64, n: usize) -> Result<DMatrix<C64>>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    let h = (b - a) / n as f64;
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut r = rho.clone();
    for k in 0..n {
        let t = a + k as f64 * h;
        let h0 = h_of_t(t)?;
        let hm = h_of_t(t + 0.5 * h)?;
        let h1 = h_of_t(t + h)?;
        let k1 = rhs_with(h0.data(), channels, &r) * hc;
        let k2 = rhs_with(hm.data(), channels, &(&r + &k1 * half)) * hc;
        let k3 = rhs_with(hm.data(), channels, &(&r + &k2 * half)) * hc;
        let k4 = rhs_with(h1.data(), channels, &(&r + &k3)) * hc;
        r += (k1 + (k2 + k3) * two + k4) * sixth;
    }
    Ok(r)
}

/// Adaptive RK4 for master equations with a time-dependent Hamiltonian.
///
/// Each sample interval is integrated with `n` and `2n` steps, doubling `n` until the two
/// results agree entrywise within the adaptive tolerance.
pub fn evolve_lindblad_adaptive<F>(
    h_of_t: F,
    channels: &[(OperatorMatrix, f64)],
    state0: &QuantumState,
    grid: &TimeGrid,
) -> Result<Vec<QuantumState>>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    let basis = state0.basis();
    for (op, _) in channels {
        expect_basis(basis, op.basis())?;
    }
    let mut rho = state0.density_matrix();
    check_density(&rho, grid.t_start())?;
    let mut out = vec![QuantumState::density_unchecked(rho.clone(), basis)?];
    let mut n = 1usize;
    for w in grid.samples().windows(2) {
        let (a, b) = (w[0], w[1]);
        expect_basis(basis, h_of_t(a)?.basis())?;
        n = (n / 2).max(1);
        let mut coarse = rk4_interval(&h_of_t, channels, &rho, a, b, n)?;
        loop {
            let fine = rk4_interval(&h_of_t, channels, &rho, a, b, 2 * n)?;
            let diff = crate::numerics::max_abs_diff(&coarse, &fine);
            n *= 2;
            coarse = fine;
            if diff.is_finite() && diff < TOL.adaptive_observable {
                break;
            }
            if n > 1 << 22 {
                return Err(Error::StepTooCoarse { t: a });
            }
        }
        rho = coarse;
        check_density(&rho, b)?;
        out.push(QuantumState::density_unchecked(rho.clone(), basis)?);
    }
    Ok(out)
}

/// Spin-only master equations for dissipative OAT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MasterEquation {
    /// `Ω̃ S_x + χ S_z²` with collective decay `S₋` at rate Γ (cavity left in vacuum).
    CollectiveDecay,
    /// `-(χ/2) S_x²` with `S_x` at Γ and `S_y`, `S_z` at Γ/2.
    TwistDephasing,
    /// As `TwistDephasing` with the twist doubled to `-χ S_x²`.
    TwistDephasingDoubled,
    /// `χ S_y²` with `S₋` and `S₊` each at Γ/2.
    TwistExchange,
}

impl MasterEquation {
    pub const ALL: [MasterEquation; 4] = [
        MasterEquation::CollectiveDecay,
        MasterEquation::TwistDephasing,
        MasterEquation::TwistDephasingDoubled,
        MasterEquation::TwistExchange,
    ];

    /// Axis and signed strength of the ideal twist this equation reduces to at Γ = 0.
    pub fn twist(&self, chi: f64) -> Option<(Axis, f64)> {
        match self {
            MasterEquation::CollectiveDecay => None,
            MasterEquation::TwistDephasing => Some((Axis::X, -0.5 * chi)),
            MasterEquation::TwistDephasingDoubled => Some((Axis::X, -chi)),
            MasterEquation::TwistExchange => Some((Axis::Y, chi)),
        }
    }
}

pub fn lindblad_spec(kind: MasterEquation, params: &ModelParams, drive: f64, spin: &SpinOperators) -> Result<LindbladSpec> {
    params.validate()?;
    let gamma = params.gamma();
    let chi = params.chi;
    match kind {
        MasterEquation::CollectiveDecay => {
            let h = &spin.sx.scale(drive) + &(&spin.sz * &spin.sz).scale(chi);
            LindbladSpec::new(h, vec![(spin.s_minus.clone(), gamma)])
        }
        MasterEquation::TwistDephasing | MasterEquation::TwistDephasingDoubled => {
            let (axis, strength) = kind.twist(chi).unwrap();
            let h = h_ideal_oat(axis, strength, None, spin)?;
            LindbladSpec::new(
                h,
                vec![(spin.sx.clone(), gamma), (spin.sy.clone(), 0.5 * gamma), (spin.sz.clone(), 0.5 * gamma)],
            )
        }
        MasterEquation::TwistExchange => {
            let (axis, strength) = kind.twist(chi).unwrap();
            let h = h_ideal_oat(axis, strength, None, spin)?;
            LindbladSpec::new(h, vec![(spin.s_minus.clone(), 0.5 * gamma), (spin.s_plus.clone(), 0.5 * gamma)])
        }
    }
}
