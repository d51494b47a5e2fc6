//! Fermionic operators mapped to Pauli strings, and a check that the images
//! keep the canonical anticommutation relations.
//!
//! cargo run --example jordan_wigner -- [n_orbitals]

use num_complex::Complex64;

use nrep::pauli::{jordan_wigner, jordan_wigner_ladder, Ladder};
use nrep::{FermionTerm, QubitOperator};

fn anticommutator(a: &QubitOperator, b: &QubitOperator) -> QubitOperator {
    let mut out = a.product(b);
    out.add_operator(&b.product(a), Complex64::new(1.0, 0.0));
    out
}

fn main() {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().expect("n_orbitals")).unwrap_or(4);

    for k in 0..n {
        println!("c_{k}  = {}", jordan_wigner_ladder(Ladder::annihilate(k)));
    }
    println!();
    println!("n_0       = {}", jordan_wigner(&FermionTerm::one_body(0, 0)));
    println!("c†_0 c_1  = {}", jordan_wigner(&FermionTerm::one_body(0, 1)));
    if n >= 4 {
        println!("c†_0 c†_1 c_3 c_2 = {}", jordan_wigner(&FermionTerm::two_body(0, 1, 3, 2)));
    }

    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ci = jordan_wigner_ladder(Ladder::annihilate(i));
            let cj = jordan_wigner_ladder(Ladder::annihilate(j));
            let cj_dag = jordan_wigner_ladder(Ladder::create(j));
            let expected = if i == j { 1.0 } else { 0.0 };
            let mixed = anticommutator(&ci, &cj_dag);
            let same = anticommutator(&ci, &cj);
            let mut dev = (mixed.coefficient(&Default::default()) - expected).norm();
            for (w, c) in mixed.iter().chain(same.iter()) {
                if !w.is_identity() {
                    dev = dev.max(c.norm());
                }
            }
            dev = dev.max(same.coefficient(&Default::default()).norm());
            worst = worst.max(dev);
        }
    }
    println!("\nmax deviation from {{c_i, c†_j}} = δ_ij, {{c_i, c_j}} = 0 over {n} orbitals: {worst:.1e}");
}
