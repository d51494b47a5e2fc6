//! N-representability projections of a noisy 2-RDM.
//!
//! Sector matrices (composite index `i·n + j`):
//!
//! * two-hole: `²Q_{(i,j),(k,l)} = ⟨c_i c_j c_l† c_k†⟩`
//! * particle-hole: `²G_{(i,j),(k,l)} = ⟨c_i† c_j c_l† c_k⟩`
//!
//! Each is an affine function of `²D` and `¹D`. A projection maps `²D` into a
//! sector, replaces it by the Frobenius-nearest PSD matrix with the sector's
//! exact trace, and maps back. `²D` and `²Q` are projected on their
//! antisymmetric pair block (`i < j`), `²G` on the full matrix.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::rdm::{antisymmetrize, contract, energy, full_from_pair_block, pair_block_of, OneRdm, TwoRdm};

/// Energies closer than this are treated as equal when choosing the best
/// projection, so the D, Q, G order decides.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjectionKind {
    D,
    Q,
    G,
}

impl ProjectionKind {
    pub const ALL: [ProjectionKind; 3] = [ProjectionKind::D, ProjectionKind::Q, ProjectionKind::G];

    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionKind::D => "D",
            ProjectionKind::Q => "Q",
            ProjectionKind::G => "G",
        }
    }
}

impl fmt::Display for ProjectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(ProjectionKind::D),
            "Q" | "q" => Ok(ProjectionKind::Q),
            "G" | "g" => Ok(ProjectionKind::G),
            other => Err(Error::Config(format!("unknown projection kind {other:?}"))),
        }
    }
}

/// Settings for the iterative schemes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionConfig {
    pub alpha: f64,
    pub max_iterations: usize,
    pub convergence_tol: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_iterations: 10_000,
            convergence_tol: 1e-8,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Domain(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionOutcome {
    pub two_rdm: TwoRdm,
    pub one_rdm: OneRdm,
    /// The single projection applied last.
    pub kind: ProjectionKind,
    pub energy: f64,
    pub iterations: usize,
    /// Energy after each step of an iterative scheme (one entry for a
    /// single projection).
    pub energy_history: Vec<f64>,
    pub converged: bool,
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Affine part of `²Q_{(i,j),(k,l)}` (everything except `²D_{(k,l),(i,j)}`).
fn q_affine(d1: &OneRdm, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
    let mut v = Complex64::new(delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k), 0.0);
    if j == l {
        v -= d1.get(k, i);
    }
    if j == k {
        v += d1.get(l, i);
    }
    if i == l {
        v += d1.get(k, j);
    }
    if i == k {
        v -= d1.get(l, j);
    }
    v
}

fn check_dims(d2: &TwoRdm, d1: &OneRdm) -> Result<usize> {
    if d1.n() != d2.n() {
        return Err(Error::ContractViolation(format!(
            "1-RDM has {} orbitals, 2-RDM has {}",
            d1.n(),
            d2.n()
        )));
    }
    Ok(d2.n())
}

/// `²Q_{(i,j),(k,l)} = δ_ik δ_jl − δ_il δ_jk − δ_jl ¹D_ki + δ_jk ¹D_li
/// + δ_il ¹D_kj − δ_ik ¹D_lj + ²D_{(k,l),(i,j)}`.
pub fn d_to_q(d2: &TwoRdm, d1: &OneRdm) -> Result<DMatrix<Complex64>> {
    let n = check_dims(d2, d1)?;
    Ok(DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j, k, l) = (r / n, r % n, c / n, c % n);
        q_affine(d1, i, j, k, l) + d2.get(k, l, i, j)
    }))
}

/// Inverse of [`d_to_q`] for the same `¹D`.
pub fn q_to_d(q: &DMatrix<Complex64>, d1: &OneRdm) -> Result<TwoRdm> {
    let n = d1.n();
    if q.nrows() != n * n || q.ncols() != n * n {
        return Err(Error::ContractViolation("sector matrix dimension mismatch".into()));
    }
    TwoRdm::from_matrix(DMatrix::from_fn(n * n, n * n, |r, c| {
        let (k, l, i, j) = (r / n, r % n, c / n, c % n);
        q[(i * n + j, k * n + l)] - q_affine(d1, i, j, k, l)
    }))
}

/// `²G_{(i,j),(k,l)} = δ_jl ¹D_ik + ²D_{(i,l),(j,k)}`.
pub fn d_to_g(d2: &TwoRdm, d1: &OneRdm) -> Result<DMatrix<Complex64>> {
    let n = check_dims(d2, d1)?;
    Ok(DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j, k, l) = (r / n, r % n, c / n, c % n);
        let mut v = d2.get(i, l, j, k);
        if j == l {
            v += d1.get(i, k);
        }
        v
    }))
}

/// Inverse of [`d_to_g`]: `²D_{(a,b),(c,d)} = ²G_{(a,c),(d,b)} − δ_bc ¹D_ad`.
pub fn g_to_d(g: &DMatrix<Complex64>, d1: &OneRdm) -> Result<TwoRdm> {
    let n = d1.n();
    if g.nrows() != n * n || g.ncols() != n * n {
        return Err(Error::ContractViolation("sector matrix dimension mismatch".into()));
    }
    TwoRdm::from_matrix(DMatrix::from_fn(n * n, n * n, |r, col| {
        let (a, b, c, d) = (r / n, r % n, col / n, col % n);
        let mut v = g[(a * n + c, d * n + b)];
        if b == c {
            v -= d1.get(a, d);
        }
        v
    }))
}

/// Exact trace of the full `n² × n²` sector matrix for `N` electrons in `n`
/// spin orbitals.
pub fn sector_trace(kind: ProjectionKind, n: usize, n_electrons: usize) -> f64 {
    let (n, ne) = (n as f64, n_electrons as f64);
    match kind {
        ProjectionKind::D => ne * (ne - 1.0),
        ProjectionKind::Q => (n - ne) * (n - ne - 1.0),
        ProjectionKind::G => ne * (n - ne + 1.0),
    }
}

/// Frobenius-nearest PSD matrix with trace `target`: eigenvalues are shifted
/// by a common θ and clipped at zero.
pub fn psd_trace_project(m: &DMatrix<Complex64>, target: f64) -> Result<DMatrix<Complex64>> {
    if !(target > 0.0) {
        return Err(Error::Domain(format!("target trace must be positive, got {target}")));
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    if h.iter().all(|z| z.im == 0.0) {
        let eig = SymmetricEigen::new(h.map(|z| z.re));
        let theta = simplex_shift(eig.eigenvalues.as_slice(), target);
        let lam = eig.eigenvalues.map(|x| (x - theta).max(0.0));
        let u = &eig.eigenvectors;
        let out = u * DMatrix::from_diagonal(&lam) * u.transpose();
        return Ok(((&out + out.transpose()) * 0.5).map(|x| Complex64::new(x, 0.0)));
    }
    let eig = SymmetricEigen::new(h);
    let theta = simplex_shift(eig.eigenvalues.as_slice(), target);
    let lam = eig
        .eigenvalues
        .map(|x| Complex64::new((x - theta).max(0.0), 0.0));
    let u = &eig.eigenvectors;
    let out = u * DMatrix::from_diagonal(&lam) * u.adjoint();
    Ok((&out + out.adjoint()) * Complex64::new(0.5, 0.0))
}

/// The θ solving `Σ max(λ_i − θ, 0) = target`.
pub fn simplex_shift(eigenvalues: &[f64], target: f64) -> f64 {
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut partial = 0.0;
    let mut theta = sorted[0] - target;
    for (k, &lam) in sorted.iter().enumerate() {
        partial += lam;
        let t = (partial - target) / (k as f64 + 1.0);
        if lam > t {
            theta = t;
        } else {
            break;
        }
    }
    theta
}

/// Hermitian, antisymmetric `²D`, contracted `¹D` and energy for a
/// corrected 2-RDM.
fn finish(h: &MolecularHamiltonian, raw: TwoRdm, kind: ProjectionKind) -> Result<ProjectionOutcome> {
    let n = raw.n();
    let two_rdm = TwoRdm::from_matrix(antisymmetrize(raw.entries(), n))?;
    let one_rdm = contract(&two_rdm, h.n_electrons())?;
    let e = energy(h, &one_rdm, &two_rdm)?;
    Ok(ProjectionOutcome {
        two_rdm,
        one_rdm,
        kind,
        energy: e,
        iterations: 1,
        energy_history: vec![e],
        converged: true,
    })
}

/// A single D, Q or G projection.
pub fn project(kind: ProjectionKind, d2: &TwoRdm, d1: &OneRdm, h: &MolecularHamiltonian) -> Result<ProjectionOutcome> {
    let n = check_dims(d2, d1)?;
    if n != h.n_spin_orbitals() {
        return Err(Error::ContractViolation(format!(
            "RDMs have {n} orbitals, Hamiltonian has {}",
            h.n_spin_orbitals()
        )));
    }
    let target = sector_trace(kind, n, h.n_electrons());
    let corrected = match kind {
        ProjectionKind::D => {
            let block = psd_trace_project(&d2.pair_block(), 0.5 * target)?;
            TwoRdm::from_pair_block(&block, n)
        }
        ProjectionKind::Q => {
            let q = d_to_q(d2, d1)?;
            let block = psd_trace_project(&pair_block_of(&q, n), 0.5 * target)?;
            q_to_d(&full_from_pair_block(&block, n), d1)?
        }
        ProjectionKind::G => {
            let g = d_to_g(d2, d1)?;
            g_to_d(&psd_trace_project(&g, target)?, d1)?
        }
    };
    finish(h, corrected, kind)
}

/// Applies D, Q and G once each and keeps the lowest energy; near-ties go
/// to the earlier kind in D, Q, G order.
pub fn best_of_three(d2: &TwoRdm, d1: &OneRdm, h: &MolecularHamiltonian) -> Result<ProjectionOutcome> {
    let all = all_projections(d2, d1, h)?;
    Ok(select_best(all))
}

/// All three single projections, in D, Q, G order.
pub fn all_projections(d2: &TwoRdm, d1: &OneRdm, h: &MolecularHamiltonian) -> Result<[ProjectionOutcome; 3]> {
    Ok([
        project(ProjectionKind::D, d2, d1, h)?,
        project(ProjectionKind::Q, d2, d1, h)?,
        project(ProjectionKind::G, d2, d1, h)?,
    ])
}

/// Lowest-energy outcome with the D, Q, G tie-break.
pub fn select_best<I: IntoIterator<Item = ProjectionOutcome>>(outcomes: I) -> ProjectionOutcome {
    let outcomes: Vec<ProjectionOutcome> = outcomes.into_iter().collect();
    let min = outcomes
        .iter()
        .map(|o| o.energy)
        .fold(f64::INFINITY, f64::min);
    outcomes
        .into_iter()
        .find(|o| o.energy <= min + TIE_TOLERANCE)
        .expect("at least one outcome")
}

/// `²D_{i+1} = α·B(²D_i) + (1−α)·²D_i` with `B` the best single projection,
/// until the Frobenius step falls below the tolerance. The `¹D` used by the
/// sector maps follows the same mixing.
pub fn partial_projection_iterate(
    d2: &TwoRdm,
    d1: &OneRdm,
    h: &MolecularHamiltonian,
    cfg: &ProjectionConfig,
) -> Result<ProjectionOutcome> {
    cfg.validate()?;
    let a = Complex64::new(cfg.alpha, 0.0);
    let b = Complex64::new(1.0 - cfg.alpha, 0.0);
    let mut cur2 = d2.clone();
    let mut cur1 = d1.clone();
    let mut history = Vec::new();
    let mut kind = ProjectionKind::D;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let best = best_of_three(&cur2, &cur1, h)?;
        kind = best.kind;
        let next2 = TwoRdm::from_matrix(best.two_rdm.entries() * a + cur2.entries() * b)?;
        let next1 = OneRdm::from_matrix(best.one_rdm.entries() * a + cur1.entries() * b)?;
        let step = next2.frobenius_distance(&cur2);
        cur2 = next2;
        cur1 = next1;
        history.push(energy(h, &contract(&cur2, h.n_electrons())?, &cur2)?);
        if step < cfg.convergence_tol {
            converged = true;
            break;
        }
    }
    let out = finish(h, cur2, kind)?;
    Ok(ProjectionOutcome {
        iterations,
        energy_history: history,
        converged,
        ..out
    })
}

/// Applies the projections cyclically in `order` until a full cycle moves
/// `²D` by less than the tolerance or the step budget runs out. Every step
/// maps through the input `¹D`; feeding back the contracted `¹D` makes
/// Q/G cycles diverge.
pub fn alternating_sequence(
    d2: &TwoRdm,
    d1: &OneRdm,
    h: &MolecularHamiltonian,
    order: &[ProjectionKind],
    cfg: &ProjectionConfig,
) -> Result<ProjectionOutcome> {
    if order.is_empty() {
        return Err(Error::Domain("projection order must not be empty".into()));
    }
    cfg.validate()?;
    let mut cur2 = d2.clone();
    let mut cycle_start = d2.clone();
    let mut history = Vec::new();
    let mut last: Option<ProjectionOutcome> = None;
    let mut converged = false;
    let mut steps = 0;
    'outer: while steps < cfg.max_iterations {
        for &kind in order {
            let out = project(kind, &cur2, d1, h)?;
            steps += 1;
            history.push(out.energy);
            cur2 = out.two_rdm.clone();
            last = Some(out);
            if steps >= cfg.max_iterations {
                break 'outer;
            }
        }
        if cur2.frobenius_distance(&cycle_start) < cfg.convergence_tol {
            converged = true;
            break;
        }
        cycle_start = cur2.clone();
    }
    let last = last.expect("at least one step");
    Ok(ProjectionOutcome {
        iterations: steps,
        energy_history: history,
        converged,
        ..last
    })
}
