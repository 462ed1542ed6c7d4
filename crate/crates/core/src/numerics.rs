//! Dense complex linear algebra with basis bookkeeping.
//!
//! Every operator carries a [`BasisTag`] describing the Hilbert space it acts
//! on. Composite operators always use the factor order spin ⊗ boson, so the
//! composite index of `|S,m⟩|n⟩` is `i_spin * (n_max + 1) + n`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::TOL;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisTag {
    /// Dicke space of `n_atoms` spin-1/2 particles, dimension `n_atoms + 1`.
    Spin { n_atoms: usize },
    /// Fock space truncated at `n_max`, dimension `n_max + 1`.
    Boson { n_max: usize },
    /// Spin ⊗ boson.
    Composite { n_atoms: usize, n_max: usize },
}

impl BasisTag {
    pub fn dim(&self) -> usize {
        match *self {
            BasisTag::Spin { n_atoms } => n_atoms + 1,
            BasisTag::Boson { n_max } => n_max + 1,
            BasisTag::Composite { n_atoms, n_max } => (n_atoms + 1) * (n_max + 1),
        }
    }

    pub fn spin_factor(&self) -> Option<BasisTag> {
        match *self {
            BasisTag::Spin { .. } => Some(*self),
            BasisTag::Composite { n_atoms, .. } => Some(BasisTag::Spin { n_atoms }),
            BasisTag::Boson { .. } => None,
        }
    }
}

fn expect_basis(expected: BasisTag, found: BasisTag) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::BasisMismatch { expected, found })
    }
}

/// Dense square operator on a tagged basis.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    data: DMatrix<C64>,
    basis: BasisTag,
    hermitian: bool,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorMatrix({:?}, hermitian: {}) {}", self.basis, self.hermitian, self.data)
    }
}

impl OperatorMatrix {
    pub fn new(data: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        let dim = basis.dim();
        if data.nrows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: data.nrows() });
        }
        if data.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: data.ncols() });
        }
        Ok(Self { data, basis, hermitian: false })
    }

    /// Builds an operator and checks Hermiticity, setting the flag on success.
    pub fn new_hermitian(data: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        Self::new(data, basis)?.checked_hermitian()
    }

    pub fn from_fn(basis: BasisTag, f: impl FnMut(usize, usize) -> C64) -> Self {
        let dim = basis.dim();
        Self { data: DMatrix::from_fn(dim, dim, f), basis, hermitian: false }
    }

    pub fn zeros(basis: BasisTag) -> Self {
        let dim = basis.dim();
        Self { data: DMatrix::zeros(dim, dim), basis, hermitian: true }
    }

    pub fn identity(basis: BasisTag) -> Self {
        let dim = basis.dim();
        Self { data: DMatrix::identity(dim, dim), basis, hermitian: true }
    }

    pub fn from_real_diagonal(basis: BasisTag, diag: &[f64]) -> Result<Self> {
        let dim = basis.dim();
        if diag.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: diag.len() });
        }
        let v = DVector::from_iterator(dim, diag.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Self { data: DMatrix::from_diagonal(&v), basis, hermitian: true })
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    /// Largest entrywise deviation `max |M - M†|`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.data)
    }

    pub fn checked_hermitian(mut self) -> Result<Self> {
        let dev = self.hermiticity_error();
        if dev > TOL.hermitian {
            return Err(Error::NotHermitian { max_deviation: dev, tolerance: TOL.hermitian });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn dagger(&self) -> Self {
        Self { data: self.data.adjoint(), basis: self.basis, hermitian: self.hermitian }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: &self.data * C64::new(s, 0.0), basis: self.basis, hermitian: self.hermitian }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { data: &self.data * s, basis: self.basis, hermitian: self.hermitian && s.im == 0.0 }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self * other + other * self
    }

    /// `Tr(A† B)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.dotc(&other.data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.data[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.data * v
    }

    fn combine(&self, other: &Self, op: &str) -> BasisTag {
        assert_eq!(self.basis, other.basis, "operator {op} across different bases");
        self.basis
    }
}

impl Add<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let basis = self.combine(rhs, "sum");
        OperatorMatrix { data: &self.data + &rhs.data, basis, hermitian: self.hermitian && rhs.hermitian }
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self + &rhs
    }
}

impl AddAssign<&OperatorMatrix> for OperatorMatrix {
    fn add_assign(&mut self, rhs: &OperatorMatrix) {
        self.combine(rhs, "sum");
        self.data += &rhs.data;
        self.hermitian &= rhs.hermitian;
    }
}

impl Sub<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let basis = self.combine(rhs, "difference");
        OperatorMatrix { data: &self.data - &rhs.data, basis, hermitian: self.hermitian && rhs.hermitian }
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self - &rhs
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(-1.0)
    }
}

impl Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let basis = self.combine(rhs, "product");
        OperatorMatrix { data: &self.data * &rhs.data, basis, hermitian: false }
    }
}

impl Mul for OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self * &rhs
    }
}

impl Mul<&OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Mul<OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

pub fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Pure state vector or density matrix on a tagged basis.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Vector { data: DVector<C64>, basis: BasisTag },
    Density { data: DMatrix<C64>, basis: BasisTag },
}

impl QuantumState {
    /// Wraps a normalised state vector.
    pub fn from_vector(data: DVector<C64>, basis: BasisTag) -> Result<Self> {
        if data.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: data.len() });
        }
        let norm = data.norm();
        if (norm - 1.0).abs() > TOL.vector_norm {
            return Err(Error::InvalidParameter(format!("state vector norm {norm} differs from 1")));
        }
        Ok(QuantumState::Vector { data, basis })
    }

    /// Normalises `data` before wrapping it.
    pub fn normalized(mut data: DVector<C64>, basis: BasisTag) -> Result<Self> {
        let norm = data.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        data /= C64::new(norm, 0.0);
        Self::from_vector(data, basis)
    }

    /// Wraps a density matrix after checking trace, Hermiticity and positivity.
    pub fn from_density(data: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        let state = Self::density_unchecked(data, basis)?;
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn density_unchecked(data: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        if data.nrows() != basis.dim() || data.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: data.nrows() });
        }
        Ok(QuantumState::Density { data, basis })
    }

    pub fn basis(&self) -> BasisTag {
        match self {
            QuantumState::Vector { basis, .. } | QuantumState::Density { basis, .. } => *basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis().dim()
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, QuantumState::Vector { .. })
    }

    pub fn vector(&self) -> Option<&DVector<C64>> {
        match self {
            QuantumState::Vector { data, .. } => Some(data),
            QuantumState::Density { .. } => None,
        }
    }

    /// Density matrix of the state (`|ψ⟩⟨ψ|` for vectors).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match self {
            QuantumState::Vector { data, .. } => data * data.adjoint(),
            QuantumState::Density { data, .. } => data.clone(),
        }
    }

    pub fn to_density(&self) -> QuantumState {
        QuantumState::Density { data: self.density_matrix(), basis: self.basis() }
    }

    pub fn trace(&self) -> f64 {
        match self {
            QuantumState::Vector { data, .. } => data.norm_squared(),
            QuantumState::Density { data, .. } => data.trace().re,
        }
    }

    /// `⟨A⟩ = Tr(ρ A)`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        expect_basis(self.basis(), op.basis())?;
        Ok(match self {
            QuantumState::Vector { data, .. } => data.dotc(&(op.data() * data)),
            QuantumState::Density { data, .. } => {
                // Tr(ρA) = Σ_ij ρ_ij A_ji
                let n = data.nrows();
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += data[(i, j)] * op.data()[(j, i)];
                    }
                }
                acc
            }
        })
    }

    /// Smallest eigenvalue of the density matrix (0 for pure vectors).
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            QuantumState::Vector { .. } => 0.0,
            QuantumState::Density { data, .. } => {
                let sym = (data + data.adjoint()) * C64::new(0.5, 0.0);
                sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Checks the norm (vectors) or trace, Hermiticity and eigenvalue floor (densities).
    pub fn validate(&self) -> Result<()> {
        match self {
            QuantumState::Vector { data, .. } => {
                let norm = data.norm();
                if (norm - 1.0).abs() > TOL.vector_norm {
                    return Err(Error::InvariantViolation { t: f64::NAN, what: format!("norm {norm}") });
                }
            }
            QuantumState::Density { data, .. } => {
                let tr = data.trace();
                if (tr.re - 1.0).abs() > TOL.density_trace || tr.im.abs() > TOL.density_trace {
                    return Err(Error::InvariantViolation { t: f64::NAN, what: format!("trace {tr}") });
                }
                let herm = hermiticity_error(data);
                if herm > TOL.density_hermitian {
                    return Err(Error::NotHermitian { max_deviation: herm, tolerance: TOL.density_hermitian });
                }
                let min = self.min_eigenvalue();
                if min < TOL.eigenvalue_floor {
                    return Err(Error::PositivityViolation { t: f64::NAN, min_eigenvalue: min });
                }
            }
        }
        Ok(())
    }

    /// Conjugates by a unitary: `U|ψ⟩` or `UρU†`.
    pub fn transformed(&self, u: &OperatorMatrix) -> Result<QuantumState> {
        expect_basis(self.basis(), u.basis())?;
        Ok(match self {
            QuantumState::Vector { data, basis } => QuantumState::Vector { data: u.data() * data, basis: *basis },
            QuantumState::Density { data, basis } => {
                QuantumState::Density { data: u.data() * data * u.data().adjoint(), basis: *basis }
            }
        })
    }
}

/// Eigendecomposition `M = V diag(λ) V†` of a Hermitian operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: DVector<f64>,
    pub vectors: OperatorMatrix,
    vectors_adj: DMatrix<C64>,
}

impl HermEig {
    pub fn basis(&self) -> BasisTag {
        self.vectors.basis()
    }

    /// `exp(-i M t)` assembled from the cached eigensystem.
    pub fn propagator(&self, t: f64) -> OperatorMatrix {
        let v = self.vectors.data();
        let mut scaled = v.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lambda * t);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
        OperatorMatrix {
            data: scaled * &self.vectors_adj,
            basis: self.basis(),
            hermitian: false,
        }
    }

    /// `exp(-i M t) ψ` without forming the propagator.
    pub fn apply_exp(&self, t: f64, psi: &DVector<C64>) -> DVector<C64> {
        let mut coeffs = &self.vectors_adj * psi;
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= C64::from_polar(1.0, -lambda * t);
        }
        self.vectors.data() * coeffs
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        let diag = DVector::from_iterator(self.values.len(), self.values.iter().map(|&l| C64::new(l, 0.0)));
        let data = self.vectors.data() * DMatrix::from_diagonal(&diag) * &self.vectors_adj;
        OperatorMatrix { data, basis: self.basis(), hermitian: false }
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Exactly diagonal inputs (every builder of a Stark/OAT Hamiltonian produces
/// one) are handled by sorting the diagonal, which keeps the eigenvectors as
/// exact basis vectors.
pub fn herm_eig(m: &OperatorMatrix) -> Result<HermEig> {
    let dev = m.hermiticity_error();
    if dev > TOL.hermitian {
        return Err(Error::NotHermitian { max_deviation: dev, tolerance: TOL.hermitian });
    }
    let n = m.dim();
    let (values, vectors) = if m.is_diagonal() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| m.get(a, a).re.total_cmp(&m.get(b, b).re));
        let values = DVector::from_iterator(n, order.iter().map(|&i| m.get(i, i).re));
        let mut v = DMatrix::<C64>::zeros(n, n);
        for (col, &row) in order.iter().enumerate() {
            v[(row, col)] = C64::new(1.0, 0.0);
        }
        (values, v)
    } else {
        let sym = (m.data() + m.data().adjoint()) * C64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let v = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, v)
    };
    let vectors_adj = vectors.adjoint();
    Ok(HermEig {
        values,
        vectors: OperatorMatrix { data: vectors, basis: m.basis(), hermitian: false },
        vectors_adj,
    })
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian_generator(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    Ok(herm_eig(h)?.propagator(t))
}

/// Kronecker product of raw matrices, `a` as the outer factor.
pub fn kron_dense(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `A ⊗ B` with `A` on the spin space and `B` on the boson space.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    match (a.basis(), b.basis()) {
        (BasisTag::Spin { n_atoms }, BasisTag::Boson { n_max }) => Ok(OperatorMatrix {
            data: kron_dense(a.data(), b.data()),
            basis: BasisTag::Composite { n_atoms, n_max },
            hermitian: a.hermitian && b.hermitian,
        }),
        (left, right) => Err(Error::BasisOrderViolation { left, right }),
    }
}

/// Kronecker product of two state vectors (spin ⊗ boson).
pub fn kron_states(spin: &QuantumState, boson: &QuantumState) -> Result<QuantumState> {
    let (n_atoms, n_max) = match (spin.basis(), boson.basis()) {
        (BasisTag::Spin { n_atoms }, BasisTag::Boson { n_max }) => (n_atoms, n_max),
        (left, right) => return Err(Error::BasisOrderViolation { left, right }),
    };
    let basis = BasisTag::Composite { n_atoms, n_max };
    Ok(match (spin, boson) {
        (QuantumState::Vector { data: a, .. }, QuantumState::Vector { data: b, .. }) => {
            QuantumState::Vector { data: a.kronecker(b), basis }
        }
        _ => QuantumState::Density { data: spin.density_matrix().kronecker(&boson.density_matrix()), basis },
    })
}

/// Traces out the boson factor of a composite state.
pub fn partial_trace_boson(rho: &QuantumState) -> Result<QuantumState> {
    let (n_atoms, n_max) = match rho.basis() {
        BasisTag::Composite { n_atoms, n_max } => (n_atoms, n_max),
        found => {
            return Err(Error::BasisMismatch { expected: BasisTag::Composite { n_atoms: 0, n_max: 0 }, found })
        }
    };
    let ds = n_atoms + 1;
    let db = n_max + 1;
    let out = match rho {
        QuantumState::Vector { data, .. } => {
            let mut out = DMatrix::<C64>::zeros(ds, ds);
            for i in 0..ds {
                for j in 0..=i {
                    let mut acc = C64::new(0.0, 0.0);
                    for n in 0..db {
                        acc += data[i * db + n] * data[j * db + n].conj();
                    }
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
            out
        }
        QuantumState::Density { data, .. } => DMatrix::from_fn(ds, ds, |i, j| {
            (0..db).map(|n| data[(i * db + n, j * db + n)]).sum()
        }),
    };
    QuantumState::density_unchecked(out, BasisTag::Spin { n_atoms })
}
