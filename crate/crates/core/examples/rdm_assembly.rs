//! Assembles 1- and 2-RDMs from measured element values, reads off the
//! energy, and writes the RDMs in the text format.
//!
//! cargo run --release --example rdm_assembly -- [out_dir]

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nrep::experiment::Reference;
use nrep::hamiltonian::load_sweep;
use nrep::measurement::{build_plan, measure_all, ShotConfig};
use nrep::noise::apply_channel;
use nrep::rdm::{assemble, contract, energy, ConstraintReport};
use nrep::{ChannelKind, NoiseChannel};

fn main() -> nrep::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let sweep = load_sweep(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"))?;
    let point = sweep.into_iter().find(|p| p.label == "1.50").expect("1.50 in sweep");
    let reference = Reference::new(point)?;
    let h = &reference.point.hamiltonian;
    let n = h.n_spin_orbitals();
    let rho = apply_channel(&reference.density, &NoiseChannel::new(ChannelKind::Damping, 1e-2)?);

    let plan = build_plan(&reference.measurement.words());
    for (label, shots) in [("exact", ShotConfig::exact()), ("1000 shots", ShotConfig::new(1000, 1, 3)?)] {
        let expectations = measure_all(&rho, &plan, &shots)?.remove(0);
        let values = reference.measurement.evaluate(&expectations)?;
        let (d1, d2) = assemble(&values, n)?;
        let report = ConstraintReport::check(&d1, &d2, h.n_electrons())?;
        let e = energy(h, &d1, &d2)?;
        let e_contracted = energy(h, &contract(&d2, h.n_electrons())?, &d2)?;
        println!("{label}:");
        println!("  E = {e:.8}  (FCI {:.8}, error {:+.3e})", reference.fci_energy, e - reference.fci_energy);
        println!("  E with contracted 1D = {e_contracted:.8}");
        println!(
            "  Tr 1D = {:.5}, Tr 2D = {:.5}, min eig 2D = {:+.2e}, contraction error = {:.2e}",
            d1.trace(),
            d2.trace(),
            report.min_eigenvalue,
            report.contraction_error
        );
        if shots.is_exact() {
            let p1 = out.join("h2_1.50_damped.rdm1");
            let p2 = out.join("h2_1.50_damped.rdm2");
            d1.write_text(&mut BufWriter::new(File::create(&p1).map_err(|e| nrep::Error::io(&p1, e))?))
                .map_err(|e| nrep::Error::io(&p1, e))?;
            d2.write_text(&mut BufWriter::new(File::create(&p2).map_err(|e| nrep::Error::io(&p2, e))?))
                .map_err(|e| nrep::Error::io(&p2, e))?;
            println!("  wrote {} and {}", p1.display(), p2.display());
        }
    }
    Ok(())
}
