// Load a KONECT-style edge list, print dataset statistics and query a node's
// neighbourhood inside a time window.

use std::error::Error;

use temporal_butterfly::graph::{load_graph, LoadOptions, Node, TimeWindow};

const EDGES: &str = "\
% customer product time
alice book 100
bob book 160
alice lamp 220
bob lamp 300
carol book 310
alice book 900
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let graph = load_graph(EDGES.as_bytes(), &LoadOptions::default())?;
    let stats = graph.stats();
    println!("{}", serde_json::to_string_pretty(&stats)?);
    assert_eq!((stats.m, stats.static_edge_count, stats.timespan), (6, 5, 800));

    // Who touched `book` in (100, 400]?
    let book = Node::Lower(0);
    let hits = graph.neighbors_in_window(book, TimeWindow::left_open(100, 400))?;
    for hit in hits {
        println!("{} at {}", graph.label(Node::Upper(hit.other))?, hit.timestamp);
    }
    assert_eq!(hits.len(), 2);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
