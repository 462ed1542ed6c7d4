//! Numerical thresholds shared by every module.

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Tolerances {
    /// Entrywise bound on `|M - M†|` for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Allowed deviation of a state-vector norm from 1.
    pub vector_norm: f64,
    /// Allowed deviation of a density-matrix trace from 1.
    pub density_trace: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub eigenvalue_floor: f64,
    /// Entrywise Hermiticity bound for evolved density matrices.
    pub density_hermitian: f64,
    /// Probability that may be discarded by a Fock truncation before it is rejected.
    pub truncation_retained: f64,
    /// Tail probability targeted by the truncation recommendation.
    pub truncation_tail: f64,
    /// Relative tolerance on the canonical pulse-area condition.
    pub canonical_drive: f64,
    /// Mean-spin length below which the mean-spin direction is undefined.
    pub mean_spin: f64,
    /// Observable change that ends step halving in the adaptive Lindblad integrator.
    pub adaptive_observable: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermitian: 1e-12,
    vector_norm: 1e-10,
    density_trace: 1e-10,
    eigenvalue_floor: -1e-8,
    density_hermitian: 1e-10,
    truncation_retained: 1e-10,
    truncation_tail: 1e-12,
    canonical_drive: 1e-9,
    mean_spin: 1e-9,
    adaptive_observable: 1e-8,
};
