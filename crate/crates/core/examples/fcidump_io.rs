//! Reads an FCIDUMP file, writes it back in canonical form, and checks that
//! the re-read integrals give the same ground-state energy.
//!
//! cargo run --release --example fcidump_io -- [path.fcidump]

use std::path::PathBuf;

use nrep::hamiltonian::Fcidump;
use nrep::state::ground_state_in_sector;

fn main() -> nrep::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/h2_0.74.fcidump"));
    let text = std::fs::read_to_string(&path).map_err(|e| nrep::Error::io(&path, e))?;
    let dump = Fcidump::parse(&text)?;
    println!(
        "{}: NORB={} NELEC={} MS2={} core energy {:.10}",
        path.display(),
        dump.norb,
        dump.nelec,
        dump.ms2,
        dump.core_energy
    );

    let canonical = dump.to_text();
    println!("canonical form has {} lines", canonical.lines().count());
    let again = Fcidump::parse(&canonical)?;

    let mut energies = Vec::new();
    for d in [&dump, &again] {
        let h = d.to_hamiltonian()?;
        let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), h.n_spin_orbitals(), h.n_electrons())?;
        energies.push(e);
    }
    println!("FCI energy {:.12} (re-read: {:.12})", energies[0], energies[1]);
    Ok(())
}
