//! One- and two-particle reduced density matrices.
//!
//! Conventions (spin-orbital indices, `n` orbitals):
//!
//! * `¹D_{ij} = ⟨c_i† c_j⟩`, `Tr ¹D = N`.
//! * `²D_{(i,j),(k,l)} = ⟨c_i† c_j† c_l c_k⟩`, stored as an `n² × n²` matrix
//!   with composite index `i·n + j`; `Tr ²D = N(N-1)`.
//! * `¹D_{ij} = Σ_k ²D_{(i,k),(j,k)} / (N-1)`.
//!
//! Only one representative per hermiticity/antisymmetry orbit is measured;
//! the rest is filled in by the sign rules.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::measurement::Expectations;
use crate::pauli::{jordan_wigner, FermionTerm, PauliWord, QubitOperator};
use crate::state::{expectation_word, max_abs, DensityMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Threshold above which assembly-time invariant violations are logged.
pub const ASSEMBLY_TOLERANCE: f64 = 1e-8;

/// Ordered pairs `(i, j)` with `i < j`: the row labels of the antisymmetric
/// block.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneRdm {
    entries: DMatrix<Complex64>,
}

impl OneRdm {
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::from_element(n, n, ZERO),
        }
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::MalformedInput("1-RDM must be square".into()));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * Complex64::new(factor, 0.0),
        }
    }

    /// Drops imaginary parts (the 1-RDM of a real state is real symmetric).
    pub fn real_part(&self) -> Self {
        Self {
            entries: self.entries.map(|z| Complex64::new(z.re, 0.0)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoRdm {
    entries: DMatrix<Complex64>,
    n: usize,
}

impl TwoRdm {
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::from_element(n * n, n * n, ZERO),
            n,
        }
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        let n = (dim as f64).sqrt().round() as usize;
        if !entries.is_square() || n * n != dim {
            return Err(Error::MalformedInput(format!(
                "2-RDM must be n²×n², got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.entries[(self.idx(i, j), self.idx(k, l))]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Writes `value` at `(i,j),(k,l)` and every image under the
    /// antisymmetry and hermiticity rules.
    pub fn set_orbit(&mut self, i: usize, j: usize, k: usize, l: usize, value: Complex64) {
        for (a, b, s1) in [(i, j, 1.0), (j, i, -1.0)] {
            for (c, d, s2) in [(k, l, 1.0), (l, k, -1.0)] {
                let v = value * (s1 * s2);
                let (r, col) = (self.idx(a, b), self.idx(c, d));
                self.entries[(r, col)] = v;
                self.entries[(col, r)] = v.conj();
            }
        }
    }

    /// The block over pairs `i < j`. For antisymmetric `²D` its eigenvalues
    /// are half those of the full matrix and its trace is `N(N-1)/2`.
    pub fn pair_block(&self) -> DMatrix<Complex64> {
        pair_block_of(&self.entries, self.n)
    }

    /// Rebuilds the full antisymmetric matrix from a pair block.
    pub fn from_pair_block(block: &DMatrix<Complex64>, n: usize) -> Self {
        Self {
            entries: full_from_pair_block(block, n),
            n,
        }
    }

    /// Orthogonal projection onto matrices that are antisymmetric in each
    /// index pair and hermitian.
    pub fn real_part(&self) -> Self {
        Self {
            entries: self.entries.map(|z| Complex64::new(z.re, 0.0)),
            n: self.n,
        }
    }

    pub fn antisymmetrized(&self) -> Self {
        Self {
            entries: antisymmetrize(&self.entries, self.n),
            n: self.n,
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn antisymmetry_error(&self) -> f64 {
        let n = self.n;
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        err = err
                            .max((v + self.get(j, i, k, l)).norm())
                            .max((v + self.get(i, j, l, k)).norm());
                    }
                }
            }
        }
        err
    }

    /// Smallest eigenvalue of the hermitian part of the pair block.
    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.pair_block())
    }

    pub fn frobenius_distance(&self, other: &TwoRdm) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

pub(crate) fn pair_block_of(m: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    let p = pairs(n);
    DMatrix::from_fn(p.len(), p.len(), |a, b| {
        let (i, j) = p[a];
        let (k, l) = p[b];
        m[(i * n + j, k * n + l)]
    })
}

pub(crate) fn full_from_pair_block(block: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    let p = pairs(n);
    let mut m = DMatrix::from_element(n * n, n * n, ZERO);
    for (a, &(i, j)) in p.iter().enumerate() {
        for (b, &(k, l)) in p.iter().enumerate() {
            let v = block[(a, b)];
            m[(i * n + j, k * n + l)] = v;
            m[(j * n + i, k * n + l)] = -v;
            m[(i * n + j, l * n + k)] = -v;
            m[(j * n + i, l * n + k)] = v;
        }
    }
    m
}

pub(crate) fn antisymmetrize(m: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    let swap = |x: usize| (x % n) * n + x / n;
    let dim = n * n;
    let a = DMatrix::from_fn(dim, dim, |r, c| {
        (m[(r, c)] - m[(swap(r), c)] - m[(r, swap(c))] + m[(swap(r), swap(c))]) * 0.25
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// A measured RDM entry, identified by its orbital indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RdmElement {
    One(usize, usize),
    Two(usize, usize, usize, usize),
}

impl RdmElement {
    pub fn fermion_term(&self) -> FermionTerm {
        match *self {
            RdmElement::One(i, j) => FermionTerm::one_body(i, j),
            RdmElement::Two(i, j, k, l) => FermionTerm::two_body(i, j, k, l),
        }
    }
}

impl fmt::Display for RdmElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdmElement::One(i, j) => write!(f, "1D({i},{j})"),
            RdmElement::Two(i, j, k, l) => write!(f, "2D({i},{j};{k},{l})"),
        }
    }
}

/// One representative per orbit: `i ≤ j` for ¹D; `i < j`, `k < l`,
/// `(i,j) ≤ (k,l)` for ²D.
pub fn minimal_elements(n: usize) -> Result<Vec<RdmElement>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 orbitals, got {n}")));
    }
    let mut out: Vec<RdmElement> = (0..n)
        .flat_map(|i| (i..n).map(move |j| RdmElement::One(i, j)))
        .collect();
    let p = pairs(n);
    for (a, &(i, j)) in p.iter().enumerate() {
        for &(k, l) in &p[a..] {
            out.push(RdmElement::Two(i, j, k, l));
        }
    }
    Ok(out)
}

/// Hermitian decomposition `A = R + i·M` of an element operator, both parts
/// mapped to qubits; each Pauli word in them is a real observable.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementOperator {
    pub real: QubitOperator,
    pub imag: QubitOperator,
}

pub fn element_operator(element: RdmElement) -> ElementOperator {
    let term = element.fermion_term();
    let a = jordan_wigner(&term);
    let a_dag = jordan_wigner(&term.adjoint());
    let half = Complex64::new(0.5, 0.0);
    let mut real = a.scaled(half);
    real.add_operator(&a_dag, half);
    let mut imag = a.scaled(Complex64::new(0.0, -0.5));
    imag.add_operator(&a_dag, Complex64::new(0.0, 0.5));
    ElementOperator { real, imag }
}

fn evaluate_real(op: &QubitOperator, exp: &Expectations) -> Result<f64> {
    let mut v = 0.0;
    for (w, c) in op.iter() {
        let e = if w.is_identity() {
            exp.get(w).copied().unwrap_or(1.0)
        } else {
            *exp
                .get(w)
                .ok_or_else(|| Error::IncompleteMeasurement(w.to_string()))?
        };
        v += c.re * e;
    }
    Ok(v)
}

/// Everything needed to measure the minimal RDM elements of `n` orbitals.
#[derive(Clone, Debug)]
pub struct RdmMeasurement {
    n: usize,
    elements: Vec<(RdmElement, ElementOperator)>,
}

impl RdmMeasurement {
    pub fn new(n: usize) -> Result<Self> {
        let elements = minimal_elements(n)?
            .into_iter()
            .map(|e| (e, element_operator(e)))
            .collect();
        Ok(Self { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Distinct non-identity Pauli words to be measured.
    pub fn words(&self) -> Vec<PauliWord> {
        let mut words: Vec<PauliWord> = self
            .elements
            .iter()
            .flat_map(|(_, op)| op.real.words().chain(op.imag.words()))
            .filter(|w| !w.is_identity())
            .cloned()
            .collect();
        words.sort();
        words.dedup();
        words
    }

    /// Element values from per-word expectations.
    pub fn evaluate(&self, exp: &Expectations) -> Result<ElementValues> {
        self.elements
            .iter()
            .map(|(e, op)| {
                let re = evaluate_real(&op.real, exp)?;
                let im = evaluate_real(&op.imag, exp)?;
                Ok((*e, Complex64::new(re, im)))
            })
            .collect()
    }

    /// Element values computed directly as `Tr(ρ A)`.
    pub fn exact(&self, rho: &DensityMatrix) -> ElementValues {
        self.elements
            .iter()
            .map(|(e, op)| {
                let re: Complex64 = op.real.iter().map(|(w, c)| c * expectation_word(rho, w)).sum();
                let im: Complex64 = op.imag.iter().map(|(w, c)| c * expectation_word(rho, w)).sum();
                (*e, Complex64::new(re.re, im.re))
            })
            .collect()
    }
}

pub type ElementValues = BTreeMap<RdmElement, Complex64>;

/// Fills both RDMs from the minimal elements by the conjugation and
/// antisymmetry rules.
pub fn assemble(values: &ElementValues, n: usize) -> Result<(OneRdm, TwoRdm)> {
    let mut d1 = OneRdm::zeros(n);
    let mut d2 = TwoRdm::zeros(n);
    for element in minimal_elements(n)? {
        let v = *values
            .get(&element)
            .ok_or_else(|| Error::IncompleteMeasurement(element.to_string()))?;
        match element {
            RdmElement::One(i, j) => {
                if i == j {
                    d1.entries[(i, i)] = Complex64::new(v.re, 0.0);
                } else {
                    d1.entries[(i, j)] = v;
                    d1.entries[(j, i)] = v.conj();
                }
            }
            RdmElement::Two(i, j, k, l) => {
                let v = if (i, j) == (k, l) { Complex64::new(v.re, 0.0) } else { v };
                d2.set_orbit(i, j, k, l, v);
            }
        }
    }
    Ok((d1, d2))
}

/// `¹D_{ij} = Σ_k ²D_{(i,k),(j,k)} / (N-1)`.
pub fn contract(d2: &TwoRdm, n_electrons: usize) -> Result<OneRdm> {
    if n_electrons < 2 {
        return Err(Error::Domain(format!(
            "contraction needs at least 2 electrons, got {n_electrons}"
        )));
    }
    let n = d2.n();
    let scale = 1.0 / (n_electrons as f64 - 1.0);
    let entries = DMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| d2.get(i, k, j, k)).sum::<Complex64>() * scale
    });
    Ok(OneRdm { entries })
}

/// `E = Σ h_pq ¹D_pq + ½ Σ (pq|rs) ²D_{(p,r),(q,s)} + E_nuc` with
/// chemists'-notation integrals over spin orbitals.
pub fn energy(h: &MolecularHamiltonian, d1: &OneRdm, d2: &TwoRdm) -> Result<f64> {
    let n = h.n_spin_orbitals();
    if d1.n() != n || d2.n() != n {
        return Err(Error::ContractViolation(format!(
            "RDM dimensions ({}, {}) do not match {n} spin orbitals",
            d1.n(),
            d2.n()
        )));
    }
    let mut e = Complex64::new(h.nuclear_repulsion(), 0.0);
    for p in 0..n {
        for q in 0..n {
            let hpq = h.one_body(p, q);
            if hpq != 0.0 {
                e += d1.get(p, q) * hpq;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = h.two_body(p, q, r, s);
                    if v != 0.0 {
                        e += d2.get(p, r, q, s) * (0.5 * v);
                    }
                }
            }
        }
    }
    Ok(e.re)
}

/// Deviations from the N-representability conditions checked here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintReport {
    pub hermiticity: f64,
    pub antisymmetry: f64,
    pub min_eigenvalue: f64,
    pub one_trace_error: f64,
    pub two_trace_error: f64,
    pub contraction_error: f64,
}

impl ConstraintReport {
    pub fn check(d1: &OneRdm, d2: &TwoRdm, n_electrons: usize) -> Result<Self> {
        let nf = n_electrons as f64;
        let contraction_error = max_abs(&(contract(d2, n_electrons)?.entries() - d1.entries()));
        Ok(Self {
            hermiticity: d1.hermiticity_error().max(d2.hermiticity_error()),
            antisymmetry: d2.antisymmetry_error(),
            min_eigenvalue: d2.min_eigenvalue().min(min_hermitian_eigenvalue(d1.entries())),
            one_trace_error: (d1.trace() - nf).abs(),
            two_trace_error: (d2.trace() - nf * (nf - 1.0)).abs(),
            contraction_error,
        })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.hermiticity <= tol
            && self.antisymmetry <= tol
            && self.min_eigenvalue >= -tol
            && self.one_trace_error <= tol
            && self.two_trace_error <= tol
            && self.contraction_error <= tol
    }
}

pub const FIDELITY_EIGEN_FLOOR: f64 = 1e-13;

/// Uhlmann fidelity `(Tr √(√A B √A))²` between the trace-normalized pair
/// blocks of two 2-RDMs (negative eigenvalues clipped first). Eigenvalues
/// below [`FIDELITY_EIGEN_FLOOR`] are treated as round-off and dropped, since
/// their square roots would otherwise shift the result at the 1e-8 level.
pub fn rdm_fidelity(a: &TwoRdm, b: &TwoRdm) -> f64 {
    let floor = |x: f64| if x < FIDELITY_EIGEN_FLOOR { 0.0 } else { x };
    let normalized_psd = |m: DMatrix<Complex64>| {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let lam = eig.eigenvalues.map(|x| x.max(0.0));
        let tr: f64 = lam.iter().sum();
        let lam = (lam / tr.max(f64::MIN_POSITIVE)).map(floor);
        (eig.eigenvectors, lam)
    };
    let (ua, la) = normalized_psd(a.pair_block());
    let (ub, lb) = normalized_psd(b.pair_block());
    let rebuild = |u: &DMatrix<Complex64>, l: nalgebra::DVector<f64>| {
        let d = DMatrix::from_diagonal(&l.map(|x| Complex64::new(x, 0.0)));
        u * d * u.adjoint()
    };
    let sqrt_a = rebuild(&ua, la.map(f64::sqrt));
    let bm = rebuild(&ub, lb);
    let m = &sqrt_a * bm * &sqrt_a;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let s: f64 = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|&x| floor(x).sqrt())
        .sum();
    (s * s).clamp(0.0, 1.0)
}

fn write_matrix<W: Write>(w: &mut W, header: &str, m: &DMatrix<Complex64>) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{} {}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

fn read_matrix<R: BufRead>(r: R, rank: usize) -> Result<DMatrix<Complex64>> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty input".into() })?;
    let header = header.map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let expected = format!("nrep-rdm{rank}");
    if fields.len() != 2 || fields[0] != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{expected} <n>`, got {header:?}"),
        });
    }
    let n: usize = fields[1].parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("bad orbital count {:?}", fields[1]),
    })?;
    let dim = if rank == 1 { n } else { n * n };
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    let mut row = 0;
    for (ln, line) in lines {
        let line = line.map_err(|e| Error::Parse { line: ln + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        if row == dim {
            return Err(Error::Parse { line: ln + 1, message: "too many rows".into() });
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: ln + 1, message: e.to_string() })?;
        if nums.len() != 2 * dim {
            return Err(Error::Parse {
                line: ln + 1,
                message: format!("expected {} numbers, got {}", 2 * dim, nums.len()),
            });
        }
        for c in 0..dim {
            m[(row, c)] = Complex64::new(nums[2 * c], nums[2 * c + 1]);
        }
        row += 1;
    }
    if row != dim {
        return Err(Error::Parse {
            line: row + 2,
            message: format!("expected {dim} rows, got {row}"),
        });
    }
    Ok(m)
}

impl OneRdm {
    /// Text format: header `nrep-rdm1 <n>`, then one line per row holding
    /// `re im` pairs in column order.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_matrix(w, &format!("nrep-rdm1 {}", self.n()), &self.entries)
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        Self::from_matrix(read_matrix(r, 1)?)
    }
}

impl TwoRdm {
    /// Text format: header `nrep-rdm2 <n>`, then `n²` rows of `re im` pairs
    /// over composite indices `i·n + j`.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_matrix(w, &format!("nrep-rdm2 {}", self.n), &self.entries)
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        Self::from_matrix(read_matrix(r, 2)?)
    }
}
