//! Effect of the three single-qubit channels on the H2 ground state at
//! 0.74 Å: state fidelity, particle number, and whether the assembled RDMs
//! still satisfy the basic N-representability constraints.
//!
//! cargo run --example noise_channels

use std::path::Path;

use nrep::experiment::Reference;
use nrep::hamiltonian::load_sweep;
use nrep::noise::apply_channel;
use nrep::rdm::{assemble, ConstraintReport};
use nrep::state::fidelity;
use nrep::{ChannelKind, NoiseChannel};

fn main() -> nrep::Result<()> {
    let sweep = load_sweep(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"))?;
    let point = sweep.into_iter().find(|p| p.label == "0.74").expect("0.74 in sweep");
    let reference = Reference::new(point)?;
    let n = reference.point.hamiltonian.n_spin_orbitals();
    let n_electrons = reference.point.hamiltonian.n_electrons();

    println!(
        "{:>13} {:>7} {:>10} {:>10} {:>10} {:>10}",
        "channel", "rate", "p", "fidelity", "Tr 1D", "min eig 2D"
    );
    for kind in [ChannelKind::Dephasing, ChannelKind::Damping, ChannelKind::Depolarizing] {
        for rate in [1e-3, 1e-2, 1e-1] {
            let channel = NoiseChannel::new(kind, rate)?;
            let rho = apply_channel(&reference.density, &channel);
            let (d1, d2) = assemble(&reference.measurement.exact(&rho), n)?;
            let report = ConstraintReport::check(&d1, &d2, n_electrons)?;
            println!(
                "{:>13} {:>7.0e} {:>10.3e} {:>10.6} {:>10.6} {:>10.2e}  {}",
                kind.to_string(),
                rate,
                channel.probability(),
                fidelity(&rho, &reference.state)?,
                d1.trace(),
                report.min_eigenvalue,
                if report.passes(1e-9) { "constraints hold" } else { "constraints violated" }
            );
        }
    }
    Ok(())
}
