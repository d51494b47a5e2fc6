//! Hubbard chains as test Hamiltonians: exact ground-state energies and
//! the damping-noise projection errors at half filling.
//!
//! cargo run --release --example hubbard

use std::path::Path;

use nrep::experiment::{run, ExperimentConfig};
use nrep::hubbard;
use nrep::state::ground_state_in_sector;

fn main() -> nrep::Result<()> {
    println!("two sites, t = 1, two electrons: E = (U - sqrt(U² + 16)) / 2");
    for u in [0.0, 1.0, 4.0, 8.0] {
        let h = hubbard(2, 1.0, u, 2)?;
        let (e, _) = ground_state_in_sector(&h.to_qubit_operator(), 4, 2)?;
        println!("  U = {u}: {e:.10} (closed form {:.10})", (u - (u * u + 16.0f64).sqrt()) / 2.0);
    }

    let cfg = ExperimentConfig::new(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/hubbard_sweep.toml"));
    println!("\ndamping 1e-2, exact expectations");
    println!("{:>8} {:>12} {:>11} {:>11} {:>11} {:>11}", "system", "E_exact", "raw", "D", "Q", "G");
    for r in run(&cfg)? {
        println!(
            "{:>8} {:>12.8} {:>+11.3e} {:>+11.3e} {:>+11.3e} {:>+11.3e}",
            r.geometry, r.fci_energy, r.raw_error, r.d_error, r.q_error, r.g_error
        );
    }
    Ok(())
}
