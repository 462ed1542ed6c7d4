//! Spin-squeezing parameter, fidelities, purity and quasiprobability maps on the sphere.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clebsch::{clebsch_gordan, Factorials};
use crate::error::{Error, Result};
use crate::numerics::{herm_eig, OperatorMatrix, QuantumState};
use crate::spin::{css_state, CssSpec, SpinEnsemble, SpinOperators};
use crate::tolerances::TOL;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    /// `ξ² = 4 (ΔS_⊥)²_min / N`.
    pub xi2: f64,
    /// Minimal variance perpendicular to the mean spin.
    pub min_variance: f64,
    /// Angle in `[0, π)` from `e₁` towards `e₂` of the least-noisy direction.
    pub optimal_angle: f64,
    /// Unit mean-spin direction.
    pub msd: [f64; 3],
    pub mean_spin: [f64; 3],
    /// False when `|⟨S⟩|` vanishes; the y–z plane is then used instead of the plane ⟂ MSD.
    pub mean_spin_defined: bool,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Perpendicular frame `(e₁, e₂)` with `e₁ ∝ ẑ × n` (x̂ when `n ∥ ẑ`) and `e₂ = n × e₁`.
pub fn perpendicular_frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let zn = cross([0.0, 0.0, 1.0], n);
    let e1 = if norm3(zn) < 1e-12 { [1.0, 0.0, 0.0] } else { normalize3(zn) };
    (e1, cross(n, e1))
}

/// Minimal eigenvalue and its direction angle in `[0, π)` for the 2×2 covariance `[[a, c], [c, b]]`.
pub(crate) fn min_quadrature(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + b);
    let r = (0.25 * (a - b) * (a - b) + c * c).sqrt();
    let angle = if r == 0.0 { 0.0 } else { (0.5 * ((c).atan2(0.5 * (a - b)) + PI)).rem_euclid(PI) };
    (mean - r, angle)
}

pub fn squeezing_parameter(state: &QuantumState, ops: &SpinOperators) -> Result<SqueezingReport> {
    let n_atoms = match ops.basis() {
        crate::numerics::BasisTag::Spin { n_atoms } => n_atoms,
        other => return Err(Error::BasisMismatch { expected: state.basis(), found: other }),
    };
    let mean = [
        state.expectation(&ops.sx)?.re,
        state.expectation(&ops.sy)?.re,
        state.expectation(&ops.sz)?.re,
    ];
    let len = norm3(mean);
    let defined = len >= TOL.mean_spin;
    let (msd, e1, e2) = if defined {
        let n = normalize3(mean);
        let (e1, e2) = perpendicular_frame(n);
        (n, e1, e2)
    } else {
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    };
    let s1 = ops.along(e1);
    let s2 = ops.along(e2);
    let m1 = state.expectation(&s1)?.re;
    let m2 = state.expectation(&s2)?.re;
    let v11 = state.expectation(&(&s1 * &s1))?.re - m1 * m1;
    let v22 = state.expectation(&(&s2 * &s2))?.re - m2 * m2;
    let v12 = 0.5 * state.expectation(&s1.anticommutator(&s2))?.re - m1 * m2;
    let (min_variance, optimal_angle) = min_quadrature(v11, v22, v12);
    Ok(SqueezingReport {
        xi2: 4.0 * min_variance / n_atoms as f64,
        min_variance,
        optimal_angle,
        msd,
        mean_spin: mean,
        mean_spin_defined: defined,
    })
}

/// `⟨ψ|ρ|ψ⟩` for a pure target.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    let psi = target
        .vector()
        .ok_or_else(|| Error::InvalidParameter("fidelity target must be a pure state".into()))?;
    if state.basis() != target.basis() {
        return Err(Error::BasisMismatch { expected: target.basis(), found: state.basis() });
    }
    Ok(match state {
        QuantumState::Vector { data, .. } => psi.dotc(data).norm_sqr(),
        QuantumState::Density { data, .. } => psi.dotc(&(data * psi)).re,
    })
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between two possibly mixed states.
pub fn mixed_fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    if rho.basis() != sigma.basis() {
        return Err(Error::BasisMismatch { expected: rho.basis(), found: sigma.basis() });
    }
    if sigma.is_vector() {
        return fidelity(rho, sigma);
    }
    if rho.is_vector() {
        return fidelity(sigma, rho);
    }
    let basis = rho.basis();
    let sqrt_psd = |m: &DMatrix<C64>| -> Result<DMatrix<C64>> {
        let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm_eig(&OperatorMatrix::new(sym, basis)?)?;
        let v = eig.vectors.data();
        let d = DMatrix::from_diagonal(&eig.values.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
        Ok(v * d * v.adjoint())
    };
    let sr = sqrt_psd(&rho.density_matrix())?;
    let inner = &sr * sigma.density_matrix() * &sr;
    let root = sqrt_psd(&inner)?;
    Ok(root.trace().re.powi(2))
}

/// `Tr ρ²` (1 for pure vectors).
pub fn purity(state: &QuantumState) -> f64 {
    match state {
        QuantumState::Vector { data, .. } => data.norm_squared().powi(2),
        QuantumState::Density { data, .. } => data.iter().map(|z| z.norm_sqr()).sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereMapKind {
    Husimi,
    Wigner,
}

/// Values on a `(θ, φ)` grid: `θ_i = iπ/r` for `i = 0..=r`, `φ_j = 2πj/(2r)` for `j < 2r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMap {
    pub kind: SphereMapKind,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// Row-major in θ.
    pub values: Vec<f64>,
    /// Exact sphere integral of the map (`4π/(2S+1)` for Husimi, `√(4π/(2S+1))` for Wigner).
    pub expected_integral: f64,
}

impl SphereMap {
    pub fn value(&self, i_theta: usize, j_phi: usize) -> f64 {
        self.values[i_theta * self.phis.len() + j_phi]
    }

    /// Trapezoidal `∫ f sinθ dθ dφ`.
    pub fn integral(&self) -> f64 {
        let nt = self.thetas.len();
        let np = self.phis.len();
        let dth = PI / (nt - 1) as f64;
        let dph = 2.0 * PI / np as f64;
        let mut acc = 0.0;
        for (i, &th) in self.thetas.iter().enumerate() {
            let w = if i == 0 || i + 1 == nt { 0.5 } else { 1.0 };
            let row: f64 = (0..np).map(|j| self.value(i, j)).sum();
            acc += w * th.sin() * row;
        }
        acc * dth * dph
    }

    /// Grid point of the largest value.
    pub fn argmax(&self) -> (f64, f64) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        let np = self.phis.len();
        (self.thetas[k / np], self.phis[k % np])
    }
}

/// Orthonormal normalised spherical harmonics `Y_k^q(θ, φ)` (Condon–Shortley phase) for `q ≥ 0`.
fn spherical_harmonics(kmax: usize, theta: f64, phi: f64) -> Vec<Vec<C64>> {
    let (x, s) = (theta.cos(), theta.sin());
    // normalised associated Legendre P̄_k^q with Condon–Shortley sign
    let mut p = vec![vec![0.0; kmax + 1]; kmax + 1];
    p[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for q in 1..=kmax {
        p[q][q] = -((2 * q + 1) as f64 / (2 * q) as f64).sqrt() * s * p[q - 1][q - 1];
    }
    for q in 0..kmax {
        p[q + 1][q] = ((2 * q + 3) as f64).sqrt() * x * p[q][q];
    }
    for q in 0..=kmax {
        for k in q + 2..=kmax {
            let (kf, qf) = (k as f64, q as f64);
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - qf * qf)).sqrt();
            let b = (((kf - 1.0).powi(2) - qf * qf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
            p[k][q] = a * (x * p[k - 1][q] - b * p[k - 2][q]);
        }
    }
    (0..=kmax)
        .map(|k| (0..=k).map(|q| C64::from_polar(p[k][q], q as f64 * phi)).collect())
        .collect()
}

/// Multipole operators `T_kq = Σ ⟨S m'; k q | S m⟩ √((2k+1)/(2S+1)) |m⟩⟨m'|` for `q ≥ 0`.
fn multipole_operators(ens: SpinEnsemble) -> Vec<Vec<DMatrix<C64>>> {
    let two_s = ens.n_atoms() as i64;
    let dim = ens.dim();
    let f = Factorials::new(4 * ens.n_atoms() + 4);
    (0..=two_s)
        .map(|k| {
            (0..=k)
                .map(|q| {
                    let norm = ((2 * k + 1) as f64 / (two_s + 1) as f64).sqrt();
                    let mut t = DMatrix::zeros(dim, dim);
                    for col in 0..dim {
                        let row = col + q as usize;
                        if row >= dim {
                            break;
                        }
                        let m2 = 2 * col as i64 - two_s;
                        let mm2 = 2 * row as i64 - two_s;
                        let cg = clebsch_gordan(&f, two_s, m2, 2 * k, 2 * q, two_s, mm2);
                        t[(row, col)] = C64::new(cg * norm, 0.0);
                    }
                    t
                })
                .collect()
        })
        .collect()
}

fn grid(resolution: usize) -> (Vec<f64>, Vec<f64>) {
    let thetas = (0..=resolution).map(|i| i as f64 * PI / resolution as f64).collect();
    let phis = (0..2 * resolution).map(|j| j as f64 * PI / resolution as f64).collect();
    (thetas, phis)
}

/// Husimi `Q(θ,φ) = ⟨θφ|ρ|θφ⟩` or spin Wigner function of a spin state.
pub fn sphere_map(state: &QuantumState, ens: SpinEnsemble, kind: SphereMapKind, resolution: usize) -> Result<SphereMap> {
    if resolution < 16 {
        return Err(Error::ResolutionTooLow(resolution));
    }
    if state.basis() != ens.basis() {
        return Err(Error::BasisMismatch { expected: ens.basis(), found: state.basis() });
    }
    let (thetas, phis) = grid(resolution);
    let rho = state.density_matrix();
    let two_s1 = (ens.n_atoms() + 1) as f64;
    let mut values = Vec::with_capacity(thetas.len() * phis.len());
    let expected_integral = match kind {
        SphereMapKind::Husimi => {
            for &th in &thetas {
                for &ph in &phis {
                    let css = css_state(ens, CssSpec { theta: th, phi: ph });
                    let v = css.vector().unwrap();
                    values.push(v.dotc(&(&rho * v)).re);
                }
            }
            4.0 * PI / two_s1
        }
        SphereMapKind::Wigner => {
            let t = multipole_operators(ens);
            // ρ_kq = Tr(ρ T_kq†)
            let coeffs: Vec<Vec<C64>> = t
                .iter()
                .map(|row| row.iter().map(|tkq| (&rho * tkq.adjoint()).trace()).collect())
                .collect();
            let kmax = ens.n_atoms();
            for &th in &thetas {
                for &ph in &phis {
                    let y = spherical_harmonics(kmax, th, ph);
                    let mut w = 0.0;
                    for k in 0..=kmax {
                        w += (coeffs[k][0] * y[k][0]).re;
                        for q in 1..=k {
                            // q and -q terms combine to 2 Re(ρ_kq Y_kq)
                            w += 2.0 * (coeffs[k][q] * y[k][q]).re;
                        }
                    }
                    values.push(w);
                }
            }
            (4.0 * PI / two_s1).sqrt()
        }
    };
    Ok(SphereMap { kind, thetas, phis, values, expected_integral })
}
