//! Grouped measurement of the Pauli words behind the minimal set of H2 RDM
//! elements, with finite shots compared against exact expectations.
//!
//! cargo run --release --example shot_measurement -- [shots] [repetitions]

use std::path::Path;

use nrep::experiment::Reference;
use nrep::hamiltonian::load_sweep;
use nrep::measurement::{build_plan, build_plan_ungrouped, measure_all, ShotConfig};
use nrep::noise::apply_channel;
use nrep::{ChannelKind, NoiseChannel};

fn main() -> nrep::Result<()> {
    let mut args = std::env::args().skip(1);
    let shots: u32 = args.next().map(|s| s.parse().expect("shots")).unwrap_or(1000);
    let reps: u32 = args.next().map(|s| s.parse().expect("repetitions")).unwrap_or(200);

    let sweep = load_sweep(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"))?;
    let reference = Reference::new(sweep.into_iter().next().expect("non-empty sweep"))?;
    let rho = apply_channel(&reference.density, &NoiseChannel::new(ChannelKind::Damping, 1e-2)?);

    let words = reference.measurement.words();
    let plan = build_plan(&words);
    println!(
        "{} RDM elements need {} Pauli words: {} qubit-wise commuting groups ({} ungrouped)",
        reference.measurement.num_elements(),
        plan.num_words(),
        plan.groups.len(),
        build_plan_ungrouped(&words).groups.len()
    );
    for g in plan.groups.iter().take(3) {
        let members: Vec<String> = g.members.iter().map(|w| w.to_string()).collect();
        println!("  basis {:<14} measures {}", g.basis.to_string(), members.join(", "));
    }

    let exact = measure_all(&rho, &plan, &ShotConfig::exact())?.remove(0);
    let sampled = measure_all(&rho, &plan, &ShotConfig::new(shots, reps, 7)?)?;

    println!("\n{shots} shots x {reps} repetitions");
    println!("{:<16} {:>10} {:>10} {:>10} {:>10}", "word", "exact", "mean", "std", "theory");
    for w in words.iter().filter(|w| !w.is_identity()).take(8) {
        let xs: Vec<f64> = sampled.iter().map(|e| e[w]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let p = exact[w];
        println!(
            "{:<16} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            w.to_string(),
            p,
            mean,
            var.sqrt(),
            ((1.0 - p * p) / f64::from(shots)).sqrt()
        );
    }
    Ok(())
}
