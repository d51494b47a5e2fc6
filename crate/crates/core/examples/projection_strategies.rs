//! Partial projection with several mixing weights and alternating projection
//! series, compared with best-of-three on damped H2.
//!
//! cargo run --release --example projection_strategies

use std::path::Path;

use nrep::experiment::Reference;
use nrep::hamiltonian::load_sweep;
use nrep::noise::apply_channel;
use nrep::projection::{alternating_sequence, best_of_three, partial_projection_iterate};
use nrep::rdm::assemble;
use nrep::{ChannelKind, NoiseChannel, ProjectionConfig, ProjectionKind};

fn main() -> nrep::Result<()> {
    use ProjectionKind::{D, G, Q};
    let sweep = load_sweep(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"))?;
    let point = sweep.into_iter().find(|p| p.label == "1.00").expect("1.00 in sweep");
    let reference = Reference::new(point)?;
    let h = &reference.point.hamiltonian;
    let rho = apply_channel(&reference.density, &NoiseChannel::new(ChannelKind::Damping, 1e-2)?);
    let (d1, d2) = assemble(&reference.measurement.exact(&rho), h.n_spin_orbitals())?;
    let fci = reference.fci_energy;

    let best = best_of_three(&d2, &d1, h)?;
    println!("best of three: {} {:+.6e}", best.kind, best.energy - fci);

    println!("\npartial projection");
    for alpha in [1.0, 0.5, 0.1, 0.01] {
        let cfg = ProjectionConfig { alpha, ..Default::default() };
        let out = partial_projection_iterate(&d2, &d1, h, &cfg)?;
        let first = out.energy_history.first().copied().unwrap_or(out.energy);
        println!(
            "  alpha {alpha:<5} error {:+.6e}  iterations {:>5}  converged {}  first step {:+.3e}",
            out.energy - fci,
            out.iterations,
            out.converged,
            first - fci
        );
    }

    println!("\nalternating series");
    for order in [vec![D, Q, G], vec![Q, D, G], vec![G, Q], vec![D, G]] {
        let out = alternating_sequence(&d2, &d1, h, &order, &ProjectionConfig::default())?;
        let names: Vec<&str> = order.iter().map(|k| k.as_str()).collect();
        println!(
            "  [{}] error {:+.6e}  steps {:>5}  converged {}",
            names.join(","),
            out.energy - fci,
            out.iterations,
            out.converged
        );
    }
    Ok(())
}
