//! Single D, Q and G projections of a damped H2 2-RDM and the best-of-three
//! selection, with the smallest eigenvalue of each sector before and after.
//!
//! cargo run --release --example nrep_projection -- [distance] [rate]

use std::path::Path;

use nrep::experiment::Reference;
use nrep::hamiltonian::load_sweep;
use nrep::noise::apply_channel;
use nrep::projection::{all_projections, d_to_g, d_to_q, select_best};
use nrep::rdm::{assemble, contract, rdm_fidelity};
use nrep::{ChannelKind, NoiseChannel};

fn min_eig(m: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn main() -> nrep::Result<()> {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "1.50".into());
    let rate: f64 = args.next().map(|s| s.parse().expect("rate")).unwrap_or(1e-2);

    let sweep = load_sweep(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"))?;
    let point = sweep.into_iter().find(|p| p.label == label).expect("distance in sweep");
    let reference = Reference::new(point)?;
    let h = &reference.point.hamiltonian;
    let n = h.n_spin_orbitals();
    let rho = apply_channel(&reference.density, &NoiseChannel::new(ChannelKind::Damping, rate)?);
    let (d1, d2) = assemble(&reference.measurement.exact(&rho), n)?;

    let sectors = |d2: &nrep::TwoRdm, d1: &nrep::OneRdm| -> nrep::Result<[f64; 3]> {
        Ok([d2.min_eigenvalue(), min_eig(&d_to_q(d2, d1)?), min_eig(&d_to_g(d2, d1)?)])
    };
    let fci = reference.fci_energy;
    let raw = nrep::rdm::energy(h, &d1, &d2)?;
    let [ed, eq, eg] = sectors(&d2, &d1)?;
    println!("H2 {label} Å, damping {rate}: FCI {fci:.8}");
    println!("{:>6} {:>12} {:>11} {:>10} {:>10} {:>10} {:>9}", "", "energy", "error", "min D", "min Q", "min G", "fidelity");
    println!(
        "{:>6} {:>12.8} {:>+11.3e} {:>+10.2e} {:>+10.2e} {:>+10.2e} {:>9.6}",
        "raw", raw, raw - fci, ed, eq, eg, rdm_fidelity(&d2, &reference.two_rdm)
    );

    let outcomes = all_projections(&d2, &d1, h)?;
    for o in &outcomes {
        let d1c = contract(&o.two_rdm, h.n_electrons())?;
        let [ed, eq, eg] = sectors(&o.two_rdm, &d1c)?;
        println!(
            "{:>6} {:>12.8} {:>+11.3e} {:>+10.2e} {:>+10.2e} {:>+10.2e} {:>9.6}",
            o.kind.to_string(),
            o.energy,
            o.energy - fci,
            ed,
            eq,
            eg,
            rdm_fidelity(&o.two_rdm, &reference.two_rdm)
        );
    }
    let best = select_best(outcomes);
    println!("best of three: {} ({:+.3e})", best.kind, best.energy - fci);
    Ok(())
}
