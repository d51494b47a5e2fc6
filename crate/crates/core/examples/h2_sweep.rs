//! Bond-distance sweep of H2 under a chosen channel with exact expectations:
//! raw and projected energy errors per distance.
//!
//! cargo run --release --example h2_sweep -- [damping|depolarizing|dephasing] [rate]

use std::path::Path;

use nrep::experiment::{run, ExperimentConfig};
use nrep::ChannelKind;

fn main() -> nrep::Result<()> {
    let mut args = std::env::args().skip(1);
    let channel: ChannelKind = args.next().as_deref().unwrap_or("damping").parse()?;
    let rate: f64 = args.next().map(|s| s.parse().expect("rate must be a number")).unwrap_or(1e-2);

    let mut cfg = ExperimentConfig::new(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/h2_sweep.toml"));
    cfg.channels = vec![channel];
    cfg.rates = vec![rate];
    let records = run(&cfg)?;

    println!("{channel}, rate {rate}, exact expectations");
    println!(
        "{:>5} {:>13} {:>11} {:>11} {:>11} {:>11} {:>4} {:>9}",
        "R/Å", "E_FCI", "raw", "D", "Q", "G", "best", "Tr 1D"
    );
    for r in &records {
        println!(
            "{:>5} {:>13.9} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>4} {:>9.6}",
            r.geometry, r.fci_energy, r.raw_error, r.d_error, r.q_error, r.g_error, r.best_kind, r.trace_1rdm
        );
    }
    Ok(())
}
