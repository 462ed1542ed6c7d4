//! Truncated Fock space of the cavity mode and its input states.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{BasisTag, OperatorMatrix, QuantumState};
use crate::tolerances::TOL;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BosonSpace {
    pub n_max: usize,
}

impl BosonSpace {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn basis(&self) -> BasisTag {
        BasisTag::Boson { n_max: self.n_max }
    }
}

/// Initial state of the bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BosonInput {
    Fock { n0: usize },
    Coherent { alpha_re: f64, alpha_im: f64 },
    Thermal { nbar: f64 },
    Squeezed { r: f64 },
}

impl BosonInput {
    pub fn coherent(alpha: f64) -> Self {
        BosonInput::Coherent { alpha_re: alpha, alpha_im: 0.0 }
    }

    pub fn alpha(&self) -> Option<C64> {
        match *self {
            BosonInput::Coherent { alpha_re, alpha_im } => Some(C64::new(alpha_re, alpha_im)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BosonInput::Thermal { nbar } if !(nbar >= 0.0 && nbar.is_finite()) => {
                Err(Error::InvalidParameter(format!("thermal occupation {nbar} must be finite and >= 0")))
            }
            BosonInput::Squeezed { r } if !(r >= 0.0 && r.is_finite()) => {
                Err(Error::InvalidParameter(format!("squeezing parameter {r} must be finite and >= 0")))
            }
            BosonInput::Coherent { alpha_re, alpha_im } if !(alpha_re.is_finite() && alpha_im.is_finite()) => {
                Err(Error::InvalidParameter("coherent amplitude must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Mean photon number of the untruncated state.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            BosonInput::Fock { n0 } => n0 as f64,
            BosonInput::Coherent { alpha_re, alpha_im } => alpha_re * alpha_re + alpha_im * alpha_im,
            BosonInput::Thermal { nbar } => nbar,
            BosonInput::Squeezed { r } => r.sinh().powi(2),
        }
    }

    /// Photon-number probability `|c_n|²` of the untruncated state.
    pub fn probability(&self, n: usize) -> f64 {
        match *self {
            BosonInput::Fock { n0 } => {
                if n == n0 {
                    1.0
                } else {
                    0.0
                }
            }
            BosonInput::Coherent { .. } => {
                let a2 = self.mean_photons();
                if a2 == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                (-a2 + n as f64 * a2.ln() - ln_factorial(n)).exp()
            }
            BosonInput::Thermal { nbar } => {
                if nbar == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                ((n as f64) * (nbar / (1.0 + nbar)).ln()).exp() / (1.0 + nbar)
            }
            BosonInput::Squeezed { r } => {
                if n % 2 == 1 {
                    return 0.0;
                }
                if r == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                // (tanh r)^n n! / (2^n cosh r [(n/2)!]^2)
                let k = n / 2;
                let ln = n as f64 * (r.tanh() / 2.0).ln() + ln_factorial(n) - 2.0 * ln_factorial(k) - r.cosh().ln();
                ln.exp()
            }
        }
    }

    /// Fock amplitude `c_n` for pure inputs; `None` for the thermal mixture.
    pub fn amplitude(&self, n: usize) -> Option<C64> {
        match *self {
            BosonInput::Fock { .. } => Some(C64::new(self.probability(n), 0.0)),
            BosonInput::Coherent { alpha_re, alpha_im } => {
                let arg = alpha_im.atan2(alpha_re);
                Some(C64::from_polar(self.probability(n).sqrt(), n as f64 * arg))
            }
            BosonInput::Squeezed { .. } => {
                // squeezed vacuum along the real axis: c_{2k} ∝ (-tanh r)^k
                let sign = if (n / 2) % 2 == 1 { -1.0 } else { 1.0 };
                Some(C64::new(sign * self.probability(n).sqrt(), 0.0))
            }
            BosonInput::Thermal { .. } => None,
        }
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[derive(Debug, Clone)]
pub struct BosonOperators {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub number: OperatorMatrix,
}

/// Truncated ladder operators; `a†|n_max⟩ = 0`.
pub fn ladder_operators(space: BosonSpace) -> BosonOperators {
    let basis = space.basis();
    let a = OperatorMatrix::from_fn(basis, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a_dag = a.dagger();
    let diag: Vec<f64> = (0..space.dim()).map(|n| n as f64).collect();
    let number = OperatorMatrix::from_real_diagonal(basis, &diag).expect("dimension n_max+1");
    BosonOperators { a, a_dag, number }
}

/// Photon-number distribution over `0..=n_max`, renormalised, together with the
/// probability retained before renormalisation.
pub fn truncated_weights(input: &BosonInput, n_max: usize) -> Result<(Vec<f64>, f64)> {
    input.validate()?;
    let mut w: Vec<f64> = (0..=n_max).map(|n| input.probability(n)).collect();
    let retained: f64 = w.iter().sum();
    if retained < 1.0 - TOL.truncation_retained {
        return Err(Error::TruncationInsufficient { n_max, retained });
    }
    for x in &mut w {
        *x /= retained;
    }
    Ok((w, retained))
}

/// Builds the input state on the truncated space (density matrix for thermal light).
pub fn input_state(space: BosonSpace, input: &BosonInput) -> Result<QuantumState> {
    let (weights, retained) = truncated_weights(input, space.n_max)?;
    let dim = space.dim();
    match input {
        BosonInput::Thermal { .. } => {
            let diag = DVector::from_iterator(dim, weights.iter().map(|&w| C64::new(w, 0.0)));
            QuantumState::from_density(DMatrix::from_diagonal(&diag), space.basis())
        }
        _ => {
            let norm = retained.sqrt();
            let v = DVector::from_iterator(
                dim,
                (0..dim).map(|n| input.amplitude(n).expect("pure input") / norm),
            );
            QuantumState::normalized(v, space.basis())
        }
    }
}

/// Smallest `n_max` whose omitted tail probability is below the truncation tolerance.
///
/// Coherent inputs are additionally capped at `ceil(|α|² + 8|α| + 10)`.
pub fn truncation_recommendation(input: &BosonInput) -> usize {
    let tail_target = TOL.truncation_tail;
    match *input {
        BosonInput::Fock { n0 } => n0,
        BosonInput::Thermal { nbar } => {
            if nbar == 0.0 {
                return 0;
            }
            // tail beyond n is (n̄/(1+n̄))^{n+1}
            let q = nbar / (1.0 + nbar);
            let mut n = 0usize;
            let mut tail = q;
            while tail >= tail_target {
                n += 1;
                tail *= q;
            }
            n
        }
        BosonInput::Coherent { .. } => {
            let a2 = input.mean_photons();
            let cap = (a2 + 8.0 * a2.sqrt() + 10.0).ceil() as usize;
            smallest_with_tail(input, cap + 40, tail_target).min(cap)
        }
        BosonInput::Squeezed { r } => {
            if r == 0.0 {
                return 0;
            }
            let q = r.tanh().powi(2);
            // p_{2k} decays like q^k; scan well past the point where q^k < 1e-18
            let bound = 2 * ((1e-18f64.ln() / q.ln()).ceil() as usize) + 20;
            smallest_with_tail(input, bound, tail_target)
        }
    }
}

fn smallest_with_tail(input: &BosonInput, bound: usize, target: f64) -> usize {
    let p: Vec<f64> = (0..=bound).map(|n| input.probability(n)).collect();
    let mut tail = 0.0;
    let mut best = bound;
    for n in (0..=bound).rev() {
        // tail now holds Σ_{k > n} p_k
        if tail < target {
            best = n;
        } else {
            break;
        }
        tail += p[n];
    }
    best
}
