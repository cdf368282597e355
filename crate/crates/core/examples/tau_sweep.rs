// Counts as the duration constraint grows; exact counts never decrease.

use std::error::Error;
use std::io;

use temporal_butterfly::bench::{sweep_tau, write_sweep_csv, SweepCounts, SweepMode};
use temporal_butterfly::graph::generate_synthetic;
use temporal_butterfly::motif::Labeling;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let graph = generate_synthetic(10, 10, 2_000, 86_400, 9)?;
    let taus = [300, 900, 1_800, 3_600, 7_200];
    let rows = sweep_tau(&graph, &taus, SweepMode::Exact)?;
    write_sweep_csv(&rows, &Labeling::identity(), io::stdout().lock())?;

    let totals: Vec<u64> = rows
        .iter()
        .map(|r| match r.counts {
            SweepCounts::Exact(c) => c.total(),
            SweepCounts::Estimate(_) => unreachable!(),
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
