//! Dense Fock-space oracles shared by the integration tests. Nothing here
//! goes through the library's Pauli or Jordan-Wigner code.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nrep::{DensityMatrix, MolecularHamiltonian, OneRdm, StateVector, TwoRdm};

pub type CMat = DMatrix<Complex64>;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// FCI energies of the bundled files from an independent quantum chemistry
/// code (same integrals).
pub const H2_FCI: [(&str, f64); 6] = [
    ("0.50", -1.0551597944706248),
    ("0.74", -1.1372838344885023),
    ("1.00", -1.1011503302326187),
    ("1.50", -0.9981493534714101),
    ("2.00", -0.9486411121761853),
    ("2.50", -0.9360549199556059),
];
pub const LIH_FCI: f64 = -7.882324378883488;

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Annihilator of mode `k` on `n` modes: `c_k|x⟩ = (-1)^{#occupied below k}
/// |x − e_k⟩` when mode `k` is occupied (bit set).
pub fn annihilator(n: usize, k: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for x in 0..dim {
        if x & (1 << k) != 0 {
            let sign = if (x & ((1 << k) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(x ^ (1 << k), x)] = c(sign);
        }
    }
    m
}

pub fn creator(n: usize, k: usize) -> CMat {
    annihilator(n, k).adjoint()
}

pub struct Fock {
    pub n: usize,
    pub a: Vec<CMat>,
    pub ad: Vec<CMat>,
}

impl Fock {
    pub fn new(n: usize) -> Self {
        let a: Vec<CMat> = (0..n).map(|k| annihilator(n, k)).collect();
        let ad = a.iter().map(|m| m.adjoint()).collect();
        Self { n, a, ad }
    }

    /// `c_i† c_j`
    pub fn one(&self, i: usize, j: usize) -> CMat {
        &self.ad[i] * &self.a[j]
    }

    /// `c_i† c_j† c_l c_k`
    pub fn two(&self, i: usize, j: usize, k: usize, l: usize) -> CMat {
        &self.ad[i] * &self.ad[j] * &self.a[l] * &self.a[k]
    }

    /// `c_i c_j c_l† c_k†`
    pub fn two_hole(&self, i: usize, j: usize, k: usize, l: usize) -> CMat {
        &self.a[i] * &self.a[j] * &self.ad[l] * &self.ad[k]
    }

    /// `c_i† c_j c_l† c_k`
    pub fn particle_hole(&self, i: usize, j: usize, k: usize, l: usize) -> CMat {
        &self.ad[i] * &self.a[j] * &self.ad[l] * &self.a[k]
    }

    /// `Σ h_pq c_p†c_q + ½ Σ (pq|rs) c_p†c_r†c_s c_q + e_nuc` built from the
    /// ladder matrices.
    pub fn hamiltonian(&self, h: &MolecularHamiltonian) -> CMat {
        let n = self.n;
        let dim = 1 << n;
        let mut m = CMat::identity(dim, dim) * c(h.nuclear_repulsion());
        for p in 0..n {
            for q in 0..n {
                let v = h.one_body(p, q);
                if v != 0.0 {
                    m += self.one(p, q) * c(v);
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = h.two_body(p, q, r, s);
                        if v != 0.0 {
                            m += &self.ad[p] * &self.ad[r] * &self.a[s] * &self.a[q] * c(0.5 * v);
                        }
                    }
                }
            }
        }
        m
    }
}

pub fn trace_product(rho: &CMat, op: &CMat) -> Complex64 {
    (rho * op).trace()
}

/// Eigenvalues of a hermitian matrix restricted to basis states with
/// `particles` set bits, ascending.
pub fn sector_spectrum(m: &CMat, particles: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|x| x.count_ones() as usize == particles).collect();
    let sub = CMat::from_fn(idx.len(), idx.len(), |r, col| m[(idx[r], idx[col])]);
    let mut e: Vec<f64> = SymmetricEigen::new(sub).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn spectrum(m: &CMat) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    StateVector::new(DVector::from_fn(1 << n, |_, _| random_complex(rng))).unwrap()
}

/// Random state supported on basis states with `particles` set bits.
pub fn random_sector_state(n: usize, particles: usize, rng: &mut ChaCha8Rng) -> StateVector {
    StateVector::new(DVector::from_fn(1 << n, |x, _| {
        if x.count_ones() as usize == particles {
            random_complex(rng)
        } else {
            c(0.0)
        }
    }))
    .unwrap()
}

/// Mixture of `rank` random pure states.
pub fn random_density(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    let mut total = 0.0;
    for _ in 0..rank {
        let w: f64 = rng.gen_range(0.1..1.0);
        let psi = random_state(n, rng);
        let v = psi.amplitudes();
        m += v * v.adjoint() * c(w);
        total += w;
    }
    DensityMatrix::new(m / c(total)).unwrap()
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(dim, dim, |_, _| random_complex(rng));
    (&a + a.adjoint()) * c(0.5)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Embeds a single-qubit operator on `qubit` of an `n`-qubit register with
/// qubit k at bit k of the basis index (so the highest qubit is the
/// leftmost tensor factor).
pub fn embed(op: &CMat, qubit: usize, n: usize) -> CMat {
    let mut m = CMat::identity(1, 1);
    for q in (0..n).rev() {
        let f = if q == qubit { op.clone() } else { CMat::identity(2, 2) };
        m = kron(&m, &f);
    }
    m
}

/// RDMs from direct traces against the ladder matrices.
pub fn direct_rdms(fock: &Fock, rho: &CMat) -> (OneRdm, TwoRdm) {
    let n = fock.n;
    let d1 = DMatrix::from_fn(n, n, |i, j| trace_product(rho, &fock.one(i, j)));
    let d2 = DMatrix::from_fn(n * n, n * n, |r, col| {
        trace_product(rho, &fock.two(r / n, r % n, col / n, col % n))
    });
    (OneRdm::from_matrix(d1).unwrap(), TwoRdm::from_matrix(d2).unwrap())
}


/// Dykstra's alternating projections between the PSD cone and the
/// hyperplane `Tr X = t`; converges to the projection onto their
/// intersection.
pub fn dykstra(m: &CMat, t: f64) -> CMat {
    let dim = m.nrows();
    let psd = |x: &CMat| {
        let eig = SymmetricEigen::new((x + x.adjoint()) * c(0.5));
        let lam = eig.eigenvalues.map(|v| c(v.max(0.0)));
        &eig.eigenvectors * CMat::from_diagonal(&lam) * eig.eigenvectors.adjoint()
    };
    let plane = |x: &CMat| x + CMat::identity(dim, dim) * c((t - x.trace().re) / dim as f64);
    let mut x = m.clone();
    let mut p = CMat::zeros(dim, dim);
    let mut q = CMat::zeros(dim, dim);
    for _ in 0..200_000 {
        let y = psd(&(&x + &p));
        p = &x + &p - &y;
        let next = plane(&(&y + &q));
        q = &y + &q - &next;
        let step = max_abs(&(&next - &x));
        x = next;
        if step < 1e-15 {
            break;
        }
    }
    x
}

