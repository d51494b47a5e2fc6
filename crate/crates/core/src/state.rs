//! Dense state vectors and density matrices over a qubit register.
//!
//! Basis index bit `k` is qubit `k`. Density matrices are stored column-major
//! (nalgebra's layout), so the storage slice is the column-stacked
//! vectorization: for one qubit `(ρ00, ρ10, ρ01, ρ11)`.

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliWord, QubitOperator};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = -1e-10;

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// Normalizes `amplitudes`; errors if the length is not a power of two or
    /// the vector is zero.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::MalformedInput(format!("state length {} is not a power of two", amplitudes.len()))
        })?;
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::MalformedInput("zero state vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
            num_qubits,
        })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = DVector::from_element(1 << num_qubits, ZERO);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Rotates the global phase so the first amplitude above 1e-12 is real
    /// and positive.
    fn canonical_phase(mut self) -> Self {
        if let Some(a) = self.amplitudes.iter().find(|a| a.norm() > 1e-12).copied() {
            let phase = a.conj() / a.norm();
            self.amplitudes *= phase;
        }
        self
    }
}

/// A (nominally) physical density matrix. Constructors that build states from
/// physics enforce the invariants; [`devectorize`] does not, so that arbitrary
/// vectors round-trip. Use [`DensityMatrix::validate`] to check.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    num_qubits: usize,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(entries)?;
        rho.validate_cheap()?;
        Ok(rho)
    }

    /// Only checks that the matrix is square with power-of-two dimension.
    pub fn from_matrix_unchecked(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::MalformedInput(format!(
                "density matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let num_qubits = qubits_for_dim(entries.nrows()).ok_or_else(|| {
            Error::MalformedInput(format!("dimension {} is not a power of two", entries.nrows()))
        })?;
        Ok(Self { entries, num_qubits })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self {
            entries: a * a.adjoint(),
            num_qubits: psi.num_qubits,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            entries: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
            num_qubits,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    fn validate_cheap(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::Validation(format!("density matrix not hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > NORM_TOLERANCE {
            return Err(Error::Validation(format!("density matrix trace {tr} != 1")));
        }
        Ok(())
    }

    /// Checks hermiticity, unit trace, and positivity.
    pub fn validate(&self) -> Result<()> {
        self.validate_cheap()?;
        let min = self.min_eigenvalue();
        if min < PSD_TOLERANCE {
            return Err(Error::Validation(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedDensityMatrix {
    vec: DVector<Complex64>,
    num_qubits: usize,
}

impl VectorizedDensityMatrix {
    pub fn new(vec: DVector<Complex64>) -> Result<Self> {
        let len = vec.len();
        let num_qubits = qubits_for_dim(len)
            .filter(|bits| bits % 2 == 0)
            .map(|bits| bits / 2)
            .ok_or_else(|| Error::MalformedInput(format!("vector length {len} is not a power of 4")))?;
        Ok(Self { vec, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.vec
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        self.vec.as_mut_slice()
    }
}

/// Column-stacks `rho`.
pub fn vectorize(rho: &DensityMatrix) -> VectorizedDensityMatrix {
    VectorizedDensityMatrix {
        vec: DVector::from_column_slice(rho.entries.as_slice()),
        num_qubits: rho.num_qubits,
    }
}

pub fn devectorize(v: &VectorizedDensityMatrix) -> DensityMatrix {
    let dim = 1 << v.num_qubits;
    DensityMatrix {
        entries: DMatrix::from_column_slice(dim, dim, v.vec.as_slice()),
        num_qubits: v.num_qubits,
    }
}

/// Dense matrix of `op` on `num_qubits` qubits.
pub fn operator_matrix(op: &QubitOperator, num_qubits: usize) -> DMatrix<Complex64> {
    let dim = 1usize << num_qubits;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (word, &coef) in op.iter() {
        for x in 0..dim {
            let (y, phase) = word.apply_to_basis(x as u64);
            m[(y as usize, x)] += coef * phase;
        }
    }
    m
}

fn check_hermitian(op: &QubitOperator, num_qubits: usize) -> Result<()> {
    if op.min_qubits() > num_qubits {
        return Err(Error::ContractViolation(format!(
            "operator acts on {} qubits, register has {num_qubits}",
            op.min_qubits()
        )));
    }
    if !op.is_hermitian(HERMITICITY_TOLERANCE) {
        return Err(Error::ContractViolation("operator is not hermitian".into()));
    }
    Ok(())
}

fn lowest_eigenpair(h: DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let eig = SymmetricEigen::new(h);
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty spectrum");
    let degenerate = eig
        .eigenvalues
        .iter()
        .filter(|&&e| (e - energy).abs() < 1e-9)
        .count();
    if degenerate > 1 {
        warn!("ground state is {degenerate}-fold degenerate at E = {energy}; using lowest-index eigenvector");
    }
    (energy, eig.eigenvectors.column(idx).into_owned())
}

/// Lowest eigenpair of a hermitian qubit operator over the full register.
pub fn ground_state(h: &QubitOperator, num_qubits: usize) -> Result<(f64, StateVector)> {
    check_hermitian(h, num_qubits)?;
    let (energy, v) = lowest_eigenpair(operator_matrix(h, num_qubits));
    Ok((energy, StateVector::new(v)?.canonical_phase()))
}

/// Lowest eigenpair restricted to basis states with `n_particles` set bits.
/// `h` must conserve the number of set bits (true for JW images of
/// number-conserving fermionic Hamiltonians).
pub fn ground_state_in_sector(
    h: &QubitOperator,
    num_qubits: usize,
    n_particles: usize,
) -> Result<(f64, StateVector)> {
    check_hermitian(h, num_qubits)?;
    if n_particles > num_qubits {
        return Err(Error::Domain(format!(
            "{n_particles} particles do not fit in {num_qubits} modes"
        )));
    }
    let basis: Vec<u64> = (0..1u64 << num_qubits)
        .filter(|x| x.count_ones() as usize == n_particles)
        .collect();
    let index: std::collections::HashMap<u64, usize> =
        basis.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut m = DMatrix::from_element(basis.len(), basis.len(), ZERO);
    for (col, &x) in basis.iter().enumerate() {
        // Single words may leave the sector; their images must cancel.
        let mut leaked: std::collections::HashMap<u64, Complex64> = std::collections::HashMap::new();
        for (word, &coef) in h.iter() {
            let (y, phase) = word.apply_to_basis(x);
            match index.get(&y) {
                Some(&row) => m[(row, col)] += coef * phase,
                None => *leaked.entry(y).or_insert(ZERO) += coef * phase,
            }
        }
        if leaked.values().any(|v| v.norm() > 1e-10) {
            return Err(Error::ContractViolation(
                "operator does not conserve particle number".into(),
            ));
        }
    }
    let (energy, v) = lowest_eigenpair(m);
    let mut full = DVector::from_element(1 << num_qubits, ZERO);
    for (i, &x) in basis.iter().enumerate() {
        full[x as usize] = v[i];
    }
    Ok((energy, StateVector::new(full)?.canonical_phase()))
}

/// `Tr(ρ W)` for a coefficient-free Pauli word.
pub fn expectation_word(rho: &DensityMatrix, word: &PauliWord) -> Complex64 {
    let m = &rho.entries;
    (0..rho.dim())
        .map(|x| {
            let (y, phase) = word.apply_to_basis(x as u64);
            m[(x, y as usize)] * phase
        })
        .sum()
}

/// `Tr(ρ P)` for a hermitian Pauli string.
pub fn expectation(rho: &DensityMatrix, p: &PauliString) -> f64 {
    (p.coefficient * expectation_word(rho, &p.word)).re
}

pub fn expectation_operator(rho: &DensityMatrix, op: &QubitOperator) -> Complex64 {
    op.iter()
        .map(|(w, &c)| c * expectation_word(rho, w))
        .sum()
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure reference (the squared Uhlmann
/// convention).
pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.dim() != psi.amplitudes.len() {
        return Err(Error::ContractViolation(format!(
            "dimension mismatch: density matrix {} vs state {}",
            rho.dim(),
            psi.amplitudes.len()
        )));
    }
    let a = psi.amplitudes();
    let f = (a.adjoint() * &rho.entries * a)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}
