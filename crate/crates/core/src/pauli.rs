//! Pauli-string arithmetic and the Jordan-Wigner encoding.
//!
//! Qubit `k` of a register corresponds to bit `k` of a computational-basis
//! index (little-endian). Orbital `k` is mapped onto qubit `k`, and an
//! occupied orbital is the qubit state `|1⟩`, so `c_k†c_k = (1 - Z_k)/2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients with magnitude at or below this are dropped from a
/// [`QubitOperator`] unless another tolerance is configured.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-qubit product `self · other` as (phase, result); `None` is identity.
    pub fn multiply(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (X, X) | (Y, Y) | (Z, Z) => (ONE, None),
            (X, Y) => (I, Some(Z)),
            (Y, X) => (-I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, Y) => (-I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (X, Z) => (-I, Some(Y)),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A coefficient-free tensor product of Pauli matrices. Identity factors are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(BTreeMap<usize, Pauli>);

impl PauliWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        let mut ops = BTreeMap::new();
        ops.insert(qubit, pauli);
        Self(ops)
    }

    pub fn from_ops(ops: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self(ops.into_iter().collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.0.get(&qubit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.0.iter().map(|(&q, &p)| (q, p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of qubits needed to hold this word.
    pub fn min_qubits(&self) -> usize {
        self.0.keys().next_back().map_or(0, |&q| q + 1)
    }

    /// Bit mask of qubits carrying a non-identity factor.
    pub fn support_mask(&self) -> u64 {
        self.0.keys().fold(0, |m, &q| m | (1 << q))
    }

    /// Bit mask of qubits flipped by the word (X or Y factors).
    pub fn flip_mask(&self) -> u64 {
        self.0
            .iter()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (&q, _)| m | (1 << q))
    }

    /// Bit mask of qubits whose factor carries a sign on `|1⟩` (Y or Z).
    pub fn sign_mask(&self) -> u64 {
        self.0
            .iter()
            .filter(|(_, p)| matches!(p, Pauli::Y | Pauli::Z))
            .fold(0, |m, (&q, _)| m | (1 << q))
    }

    fn y_count(&self) -> u32 {
        self.0.values().filter(|p| **p == Pauli::Y).count() as u32
    }

    /// Action on a computational basis state: `W|x⟩ = phase · |x'⟩`.
    pub fn apply_to_basis(&self, x: u64) -> (u64, Complex64) {
        let sign = if (x & self.sign_mask()).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let phase = I.powu(self.y_count()) * sign;
        (x ^ self.flip_mask(), phase)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Parses `"X0 Y1 Z3"` (whitespace optional between factors) or `"I"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "I" {
            return Ok(Self::identity());
        }
        let mut ops = BTreeMap::new();
        let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            let pauli = match c {
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::MalformedInput(format!(
                        "unexpected character {other:?} in Pauli word {s:?}"
                    )))
                }
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let qubit: usize = digits.parse().map_err(|_| {
                Error::MalformedInput(format!("missing qubit index in Pauli word {s:?}"))
            })?;
            if ops.insert(qubit, pauli).is_some() {
                return Err(Error::MalformedInput(format!(
                    "qubit {qubit} repeated in Pauli word {s:?}"
                )));
            }
        }
        Ok(Self(ops))
    }
}

impl Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A weighted Pauli word.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub word: PauliWord,
    pub coefficient: Complex64,
}

impl PauliString {
    pub fn new(word: PauliWord, coefficient: Complex64) -> Self {
        Self { word, coefficient }
    }

    pub fn identity() -> Self {
        Self::new(PauliWord::identity(), ONE)
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        Self::new(PauliWord::single(qubit, pauli), ONE)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.coefficient.im.abs() <= tol
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::new(s.parse()?, ONE))
    }
}

/// Product of two Pauli strings with the phase from single-qubit algebra.
pub fn multiply(a: &PauliString, b: &PauliString) -> PauliString {
    let mut coefficient = a.coefficient * b.coefficient;
    let mut ops = a.word.0.clone();
    for (&q, &pb) in &b.word.0 {
        match ops.get(&q).copied() {
            None => {
                ops.insert(q, pb);
            }
            Some(pa) => {
                let (phase, result) = pa.multiply(pb);
                coefficient *= phase;
                match result {
                    Some(p) => {
                        ops.insert(q, p);
                    }
                    None => {
                        ops.remove(&q);
                    }
                }
            }
        }
    }
    PauliString::new(PauliWord(ops), coefficient)
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        multiply(self, rhs)
    }
}

/// True iff on every qubit the factors agree or one of them is identity.
pub fn qubit_wise_commutes(a: &PauliWord, b: &PauliWord) -> bool {
    a.0.iter()
        .all(|(q, pa)| b.0.get(q).is_none_or(|pb| pa == pb))
}

/// A sum of Pauli strings with like terms merged.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    terms: BTreeMap<PauliWord, Complex64>,
    tolerance: f64,
}

impl Default for QubitOperator {
    fn default() -> Self {
        Self::zero()
    }
}

impl QubitOperator {
    pub fn zero() -> Self {
        Self::with_tolerance(DEFAULT_DROP_TOLERANCE)
    }

    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            tolerance,
        }
    }

    pub fn identity(coefficient: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(PauliWord::identity(), coefficient);
        op
    }

    pub fn from_strings(strings: impl IntoIterator<Item = PauliString>) -> Self {
        let mut op = Self::zero();
        for s in strings {
            op.add_term(s.word, s.coefficient);
        }
        op
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn add_term(&mut self, word: PauliWord, coefficient: Complex64) {
        let entry = self.terms.entry(word.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += coefficient;
        if entry.norm() <= self.tolerance {
            self.terms.remove(&word);
        }
    }

    pub fn add_operator(&mut self, other: &QubitOperator, scale: Complex64) {
        for (w, c) in &other.terms {
            *self.terms.entry(w.clone()).or_insert(Complex64::new(0.0, 0.0)) += c * scale;
        }
        self.prune();
    }

    fn prune(&mut self) {
        let tol = self.tolerance;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn product(&self, other: &QubitOperator) -> Self {
        let mut out = Self::with_tolerance(self.tolerance.min(other.tolerance));
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let p = multiply(&PauliString::new(wa.clone(), *ca), &PauliString::new(wb.clone(), *cb));
                *out.terms.entry(p.word).or_insert(Complex64::new(0.0, 0.0)) += p.coefficient;
            }
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms
            .iter()
            .map(|(w, c)| PauliString::new(w.clone(), *c))
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> {
        self.terms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    /// Hermitian iff every coefficient is real (all Pauli words are hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn min_qubits(&self) -> usize {
        self.terms.keys().map(PauliWord::min_qubits).max().unwrap_or(0)
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;

    fn add(mut self, rhs: QubitOperator) -> QubitOperator {
        self.add_operator(&rhs, ONE);
        self
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+.6}{:+.6}i) {}", c.re, c.im, w)?;
        }
        Ok(())
    }
}

/// One factor of a fermionic monomial: orbital index and whether it is a
/// creation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub orbital: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(orbital: usize) -> Self {
        Self { orbital, dagger: true }
    }

    pub fn annihilate(orbital: usize) -> Self {
        Self { orbital, dagger: false }
    }
}

/// An ordered product of ladder operators with a scalar coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub operators: Vec<Ladder>,
    pub coefficient: Complex64,
}

impl FermionTerm {
    pub fn new(operators: Vec<Ladder>, coefficient: Complex64) -> Self {
        Self {
            operators,
            coefficient,
        }
    }

    /// `c_i† c_j`
    pub fn one_body(i: usize, j: usize) -> Self {
        Self::new(vec![Ladder::create(i), Ladder::annihilate(j)], ONE)
    }

    /// `c_i† c_j† c_l c_k`, the operator whose expectation is ²D_{(i,j),(k,l)}.
    pub fn two_body(i: usize, j: usize, k: usize, l: usize) -> Self {
        Self::new(
            vec![
                Ladder::create(i),
                Ladder::create(j),
                Ladder::annihilate(l),
                Ladder::annihilate(k),
            ],
            ONE,
        )
    }

    pub fn validate(&self, n_orbitals: usize) -> Result<()> {
        match self.operators.iter().find(|op| op.orbital >= n_orbitals) {
            Some(op) => Err(Error::Validation(format!(
                "orbital {} out of range for {n_orbitals} orbitals",
                op.orbital
            ))),
            None => Ok(()),
        }
    }

    pub fn adjoint(&self) -> Self {
        let operators = self
            .operators
            .iter()
            .rev()
            .map(|op| Ladder {
                orbital: op.orbital,
                dagger: !op.dagger,
            })
            .collect();
        Self::new(operators, self.coefficient.conj())
    }
}

/// JW image of a single ladder operator:
/// `c_k → Z_0…Z_{k-1} (X_k + iY_k)/2`, `c_k† → Z_0…Z_{k-1} (X_k - iY_k)/2`.
pub fn jordan_wigner_ladder(op: Ladder) -> QubitOperator {
    let string: Vec<(usize, Pauli)> = (0..op.orbital).map(|q| (q, Pauli::Z)).collect();
    let mut x = string.clone();
    x.push((op.orbital, Pauli::X));
    let mut y = string;
    y.push((op.orbital, Pauli::Y));
    let y_sign = if op.dagger { -0.5 } else { 0.5 };
    let mut out = QubitOperator::zero();
    out.add_term(PauliWord::from_ops(x), Complex64::new(0.5, 0.0));
    out.add_term(PauliWord::from_ops(y), I * y_sign);
    out
}

pub fn jordan_wigner(term: &FermionTerm) -> QubitOperator {
    let mut out = QubitOperator::identity(term.coefficient);
    for &op in &term.operators {
        out = out.product(&jordan_wigner_ladder(op));
    }
    out
}
