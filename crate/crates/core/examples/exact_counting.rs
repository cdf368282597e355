// Exact temporal butterfly counts: per edge, for the whole graph, and checked
// against brute-force enumeration.

use std::error::Error;

use temporal_butterfly::counting::{brute_force_count, exact_count, per_edge_count};
use temporal_butterfly::graph::{generate_synthetic, TemporalBipartiteGraph};
use temporal_butterfly::motif::{permutation_table, Labeling};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (label, slots) in permutation_table() {
        println!("B{label}: E11 then {slots:?}");
    }

    // One butterfly plus a parallel (u2, l2) edge: two B1 instances from e0.
    let g = TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4), (1, 1, 5)])?;
    let first = per_edge_count(&g, 0, 10)?;
    println!("instances starting at edge 0: {first}");
    assert_eq!(first.0, [2, 0, 0, 0, 0, 0]);

    let g = generate_synthetic(5, 5, 45, 100, 11)?;
    let tau = 40;
    let fast = exact_count(&g, tau)?;
    let slow = brute_force_count(&g, tau)?;
    println!("wedge enumeration {fast}, brute force {slow}");
    assert_eq!(fast, slow);

    let relabel: Labeling = "214365".parse()?;
    println!("relabeled {}: {}", relabel, relabel.apply(&fast));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
