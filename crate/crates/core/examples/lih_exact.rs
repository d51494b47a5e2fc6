//! LiH at 1.6 Å on 12 qubits: FCI energy in the 4-electron sector and the
//! size of the minimal RDM measurement.
//!
//! cargo run --release --example lih_exact

use std::path::Path;

use nrep::hamiltonian::read_fcidump;
use nrep::measurement::build_plan;
use nrep::rdm::RdmMeasurement;
use nrep::state::ground_state_in_sector;

fn main() -> nrep::Result<()> {
    let h = read_fcidump(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lih_1.60.fcidump"))?;
    let n = h.n_spin_orbitals();
    let op = h.to_qubit_operator();
    println!("{n} spin orbitals, {} electrons, {} Pauli terms", h.n_electrons(), op.len());

    let (e, _) = ground_state_in_sector(&op, n, h.n_electrons())?;
    println!("FCI energy {e:.10}");

    let measurement = RdmMeasurement::new(n)?;
    let words = measurement.words();
    let plan = build_plan(&words);
    println!(
        "{} RDM elements, {} Pauli words, {} qubit-wise commuting groups",
        measurement.num_elements(),
        plan.num_words(),
        plan.groups.len()
    );
    Ok(())
}
