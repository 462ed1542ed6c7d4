//! Collective-spin (Dicke) space of `N` spin-1/2 atoms.
//!
//! Basis index `k = 0..=N` labels `|S, m⟩` with `m = k - S`, i.e. ascending `m`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, BasisTag, OperatorMatrix, QuantumState};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinEnsemble {
    n_atoms: usize,
}

impl SpinEnsemble {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("spin ensemble needs at least one atom".into()));
        }
        Ok(Self { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Total spin `S = N/2`.
    pub fn total_spin(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn basis(&self) -> BasisTag {
        BasisTag::Spin { n_atoms: self.n_atoms }
    }

    /// Magnetic quantum numbers in basis order.
    pub fn m_values(&self) -> impl Iterator<Item = f64> {
        let s = self.total_spin();
        (0..=self.n_atoms).map(move |k| k as f64 - s)
    }

    pub fn has_integer_spin(&self) -> bool {
        self.n_atoms % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis '{other}'"))),
        }
    }
}

/// Polar and azimuthal angle of a coherent spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CssSpec {
    pub theta: f64,
    pub phi: f64,
}

impl CssSpec {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("CSS polar angle {theta} outside [0, π]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!("CSS azimuth {phi} outside [0, 2π)")));
        }
        Ok(Self { theta, phi })
    }

    /// The equatorial state along +x, `|π/2, 0⟩`.
    pub fn equator_x() -> Self {
        Self { theta: FRAC_PI_2, phi: 0.0 }
    }

    /// The north pole `|0, 0⟩ = |S, S⟩`.
    pub fn north_pole() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub s_plus: OperatorMatrix,
    pub s_minus: OperatorMatrix,
}

impl SpinOperators {
    pub fn axis(&self, axis: Axis) -> &OperatorMatrix {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }

    pub fn basis(&self) -> BasisTag {
        self.sz.basis()
    }

    /// `n_x S_x + n_y S_y + n_z S_z`.
    pub fn along(&self, n: [f64; 3]) -> OperatorMatrix {
        let mut op = self.sx.scale(n[0]);
        op += &self.sy.scale(n[1]);
        op += &self.sz.scale(n[2]);
        op
    }
}

/// `S_z`, `S_±` from their Dicke matrix elements; `S_x`, `S_y` from the ladder operators.
pub fn collective_operators(ens: SpinEnsemble) -> SpinOperators {
    let basis = ens.basis();
    let s = ens.total_spin();
    let m: Vec<f64> = ens.m_values().collect();
    let sz = OperatorMatrix::from_real_diagonal(basis, &m).expect("diagonal has dimension N+1");
    // S+|S,m⟩ = sqrt(S(S+1) - m(m+1)) |S,m+1⟩
    let s_plus = OperatorMatrix::from_fn(basis, |i, j| {
        if i == j + 1 {
            C64::new((s * (s + 1.0) - m[j] * (m[j] + 1.0)).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let s_minus = s_plus.dagger();
    let sx = (&s_plus + &s_minus).scale(0.5).checked_hermitian().expect("S_x is Hermitian");
    let sy = (&s_plus - &s_minus)
        .scale_complex(C64::new(0.0, -0.5))
        .checked_hermitian()
        .expect("S_y is Hermitian");
    SpinOperators { sx, sy, sz, s_plus, s_minus }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Amplitudes `C_m = 2^{-S} binom(2S, S+m)^{1/2}` of `|π/2, 0⟩`.
pub fn css_equator_coefficients(ens: SpinEnsemble) -> Vec<f64> {
    let n = ens.n_atoms();
    let ln2 = std::f64::consts::LN_2;
    (0..=n).map(|k| (0.5 * ln_binomial(n, k) - ens.total_spin() * ln2).exp()).collect()
}

/// Coherent spin state `|θ, φ⟩ = exp(-iθ S_n)|S, S⟩` with `n = (-sin φ, cos φ, 0)`.
///
/// Evaluated in closed form: the amplitude on `|S, m⟩` is
/// `e^{i(S-m)φ} binom(2S, S+m)^{1/2} cos^{S+m}(θ/2) sin^{S-m}(θ/2)`.
pub fn css_state(ens: SpinEnsemble, spec: CssSpec) -> QuantumState {
    let n = ens.n_atoms();
    let s = ens.total_spin();
    let (c, sn) = ((spec.theta / 2.0).cos(), (spec.theta / 2.0).sin());
    let amps = DVector::from_iterator(
        n + 1,
        (0..=n).map(|k| {
            let up = k; // S + m
            let down = n - k; // S - m
            let mag = if (up > 0 && c == 0.0) || (down > 0 && sn == 0.0) {
                0.0
            } else {
                let mut ln = 0.5 * ln_binomial(n, k);
                if up > 0 {
                    ln += up as f64 * c.abs().ln();
                }
                if down > 0 {
                    ln += down as f64 * sn.abs().ln();
                }
                let sign = if c < 0.0 && up % 2 == 1 { -1.0 } else { 1.0 };
                sign * ln.exp()
            };
            let m = k as f64 - s;
            C64::from_polar(mag, (s - m) * spec.phi)
        }),
    );
    QuantumState::Vector { data: amps, basis: ens.basis() }
}

/// Applies `exp(-i angle S_axis)` to a spin state (vector or density matrix).
pub fn rotate(
    state: &QuantumState,
    ops: &SpinOperators,
    axis: Axis,
    angle: f64,
) -> Result<QuantumState> {
    let basis = ops.basis();
    if state.basis() != basis {
        return Err(Error::BasisMismatch { expected: basis, found: state.basis() });
    }
    if angle == 0.0 {
        return Ok(state.clone());
    }
    let u = rotation_operator(ops, axis, angle)?;
    state.transformed(&u)
}

pub fn rotation_operator(ops: &SpinOperators, axis: Axis, angle: f64) -> Result<OperatorMatrix> {
    let gen = ops.axis(axis);
    if axis == Axis::Z {
        return Ok(OperatorMatrix::from_fn(gen.basis(), |i, j| {
            if i == j {
                C64::from_polar(1.0, -angle * gen.get(i, i).re)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
    }
    Ok(herm_eig(gen)?.propagator(angle))
}

/// OAT state `e^{iφ S_z} e^{-i(μ/2) S_z²} |π/2, 0⟩`, with `μ = 2χt` the twisting phase.
///
/// With this normalisation `oat_state(μ = nμ', φ)` matches the reduced state of a Fock
/// input `|n₀⟩` at `χt = μ/2` rotated by `φ = n₀μ`, and `μ = π` gives the GHZ state.
pub fn oat_state(ens: SpinEnsemble, mu: f64, phi: f64) -> QuantumState {
    let coeffs = css_equator_coefficients(ens);
    let amps = DVector::from_iterator(
        ens.dim(),
        ens.m_values()
            .zip(coeffs)
            .map(|(m, c)| C64::from_polar(c, phi * m - 0.5 * mu * m * m)),
    );
    QuantumState::Vector { data: amps, basis: ens.basis() }
}

/// `|π/2, φ⟩` written as `e^{-iφ S_z}|π/2, 0⟩` (differs from [`css_state`] by a global phase).
fn equator_state_zphase(ens: SpinEnsemble, phi: f64) -> DVector<C64> {
    let coeffs = css_equator_coefficients(ens);
    DVector::from_iterator(
        ens.dim(),
        ens.m_values().zip(coeffs).map(|(m, c)| C64::from_polar(c, -phi * m)),
    )
}

/// GHZ state: equal-weight superposition of two antipodal equatorial coherent states.
///
/// For integer `S` the pair lies along ±x, `e^{-iπ/4}(|π/2,0⟩ + i|π/2,π⟩)/√2`; for
/// half-integer `S` it lies along ±y, `e^{-iπ/8}(|π/2,-π/2⟩ + |π/2,π/2⟩)/√2`. Both are
/// identical to `oat_state(π, 0)`.
pub fn ghz_state(ens: SpinEnsemble) -> QuantumState {
    let (a, b, wa, wb) = if ens.has_integer_spin() {
        let g = C64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_4);
        (equator_state_zphase(ens, 0.0), equator_state_zphase(ens, PI), g, g * C64::i())
    } else {
        let g = C64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_8);
        (equator_state_zphase(ens, -FRAC_PI_2), equator_state_zphase(ens, FRAC_PI_2), g, g)
    };
    let v = a * wa + b * wb;
    QuantumState::normalized(v, ens.basis()).expect("antipodal superposition has unit norm")
}
