//! Exact temporal butterfly counting.
//!
//! [`per_edge_count`] counts the instances whose strictly earliest edge is a
//! given edge by enumerating wedge pairs. Summing it over all edges gives
//! [`exact_count`]. [`brute_force_count`] checks every 4-edge subset and exists
//! to cross-check the other two on small graphs.

use std::collections::HashSet;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Node, NodeIndex, TemporalBipartiteGraph, TimeWindow, Timestamp};
use crate::motif::{classify, permutation_table, CountVector, EdgeSlot};

/// Largest graph `brute_force_count` handles without complaint.
pub const BRUTE_FORCE_GUIDELINE: usize = 100;

/// Two edges sharing `center`, ending at `end_a` and `end_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WedgeInstance {
    pub center: Node,
    pub end_a: Node,
    pub end_b: Node,
    pub edge_a: EdgeId,
    pub t_a: Timestamp,
    pub edge_b: EdgeId,
    pub t_b: Timestamp,
}

fn check_tau(tau: Timestamp) -> Result<()> {
    if tau < 0 {
        return Err(Error::arg(format!("duration constraint must be non-negative, got {tau}")));
    }
    Ok(())
}

/// All wedges centred at `center` with ends `end_a`, `end_b` and both edge
/// timestamps inside `window`.
pub fn wedge_instances(
    graph: &TemporalBipartiteGraph,
    center: Node,
    end_a: Node,
    end_b: Node,
    window: TimeWindow,
) -> Result<Vec<WedgeInstance>> {
    let entries = graph.neighbors_in_window(center, window)?;
    for end in [end_a, end_b] {
        graph.adjacency(end)?;
        if end.layer() == center.layer() {
            return Err(Error::arg(format!("wedge end {end:?} is on the same layer as its center")));
        }
    }
    if end_a == end_b {
        return Err(Error::arg("wedge ends must differ"));
    }
    let side_a = entries.iter().filter(|a| a.other == end_a.index());
    let mut out = Vec::new();
    for a in side_a {
        for b in entries.iter().filter(|b| b.other == end_b.index()) {
            out.push(WedgeInstance {
                center,
                end_a,
                end_b,
                edge_a: a.edge,
                t_a: a.timestamp,
                edge_b: b.edge,
                t_b: b.timestamp,
            });
        }
    }
    Ok(out)
}

/// Per-type counts of the `tau`-instances whose strictly earliest edge is `edge`.
pub fn per_edge_count(graph: &TemporalBipartiteGraph, edge: EdgeId, tau: Timestamp) -> Result<CountVector> {
    check_tau(tau)?;
    let e = *graph.edge(edge)?;
    let (ux, lx, t1) = (e.upper, e.lower, e.timestamp);
    let window = TimeWindow::after(t1, tau);
    let mut counts = CountVector::zero();

    // Wedges centred at lx: one per later edge (uy, lx, t2), grouped by uy.
    let mut wedges: Vec<(NodeIndex, Timestamp)> = graph
        .window_unchecked(Node::Lower(lx), window)
        .iter()
        .filter(|a| a.other != ux)
        .map(|a| (a.other, a.timestamp))
        .collect();
    if wedges.is_empty() {
        return Ok(counts);
    }
    wedges.sort_unstable();

    let ux_window = graph.window_unchecked(Node::Upper(ux), window);
    let ux_neighbors: HashSet<NodeIndex> = ux_window.iter().map(|a| a.other).filter(|&l| l != lx).collect();
    if ux_neighbors.is_empty() {
        return Ok(counts);
    }

    let mut candidates = Vec::new();
    let mut t3s = Vec::new();
    let mut t4s = Vec::new();
    for group in wedges.chunk_by(|a, b| a.0 == b.0) {
        let uy = group[0].0;
        let mut uy_neighbors: Vec<NodeIndex> = graph
            .window_unchecked(Node::Upper(uy), window)
            .iter()
            .map(|a| a.other)
            .filter(|&l| l != lx)
            .collect();
        uy_neighbors.sort_unstable();
        uy_neighbors.dedup();

        candidates.clear();
        if uy_neighbors.len() <= ux_neighbors.len() {
            candidates.extend(uy_neighbors.iter().copied().filter(|l| ux_neighbors.contains(l)));
        } else {
            let larger: HashSet<NodeIndex> = uy_neighbors.into_iter().collect();
            candidates.extend(ux_neighbors.iter().copied().filter(|l| larger.contains(l)));
        }

        for &ly in &candidates {
            t3s.clear();
            t4s.clear();
            for a in graph.window_unchecked(Node::Lower(ly), window) {
                if a.other == ux {
                    t3s.push(a.timestamp);
                } else if a.other == uy {
                    t4s.push(a.timestamp);
                }
            }
            for &(_, t2) in group {
                for &t3 in &t3s {
                    for &t4 in &t4s {
                        if let Some(ty) = classify(t1, t2, t3, t4) {
                            counts.bump(ty)?;
                        }
                    }
                }
            }
        }
    }
    Ok(counts)
}

/// Per-edge counts for every edge, indexed by edge id.
pub fn per_edge_counts(graph: &TemporalBipartiteGraph, tau: Timestamp) -> Result<Vec<CountVector>> {
    check_tau(tau)?;
    (0..graph.num_edges() as EdgeId)
        .map(|id| per_edge_count(graph, id, tau))
        .collect()
}

/// Exact per-type counts of all `tau`-instances, single-threaded.
pub fn exact_count(graph: &TemporalBipartiteGraph, tau: Timestamp) -> Result<CountVector> {
    check_tau(tau)?;
    let mut total = CountVector::zero();
    for id in 0..graph.num_edges() as EdgeId {
        total.try_add_assign(&per_edge_count(graph, id, tau)?)?;
    }
    Ok(total)
}

/// Same result as [`exact_count`], with per-edge work spread over the rayon pool.
pub fn exact_count_parallel(graph: &TemporalBipartiteGraph, tau: Timestamp) -> Result<CountVector> {
    check_tau(tau)?;
    (0..graph.num_edges() as EdgeId)
        .into_par_iter()
        .map(|id| per_edge_count(graph, id, tau))
        .try_reduce(CountVector::zero, |a, b| a.checked_add(&b).ok_or(Error::CountOverflow))
}

/// Enumerates every 4-edge subset. Cost is `O(m^4)`.
pub fn brute_force_count(graph: &TemporalBipartiteGraph, tau: Timestamp) -> Result<CountVector> {
    check_tau(tau)?;
    let m = graph.num_edges();
    if m > BRUTE_FORCE_GUIDELINE {
        warn!("brute-force counting over {m} edges enumerates ~{:.2e} subsets", (m as f64).powi(4) / 24.0);
    }
    let edges: Vec<_> = graph.edges_by_id().copied().collect();
    let table = permutation_table();
    let mut counts = CountVector::zero();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    let quad = [edges[a], edges[b], edges[c], edges[d]];
                    let Some(order) = butterfly_slot_order(&quad, tau) else {
                        continue;
                    };
                    let row = table
                        .iter()
                        .position(|(_, slots)| *slots == order)
                        .expect("every order of three slots is in the table");
                    counts.0[row] = counts.0[row].checked_add(1).ok_or(Error::CountOverflow)?;
                }
            }
        }
    }
    Ok(counts)
}

/// If the four edges form a `tau`-instance, the temporal order of the three
/// slots after the earliest edge.
fn butterfly_slot_order(quad: &[crate::graph::TemporalEdge; 4], tau: Timestamp) -> Option<[EdgeSlot; 3]> {
    let mut by_time = *quad;
    by_time.sort_by_key(|e| e.timestamp);
    if by_time.windows(2).any(|w| w[0].timestamp == w[1].timestamp) {
        return None;
    }
    if by_time[3].timestamp - by_time[0].timestamp > tau {
        return None;
    }
    let (ux, lx) = (by_time[0].upper, by_time[0].lower);
    let uy = quad.iter().map(|e| e.upper).find(|&u| u != ux)?;
    let ly = quad.iter().map(|e| e.lower).find(|&l| l != lx)?;
    let mut order = [EdgeSlot::E11; 3];
    let mut seen = [false; 3];
    for (k, e) in by_time[1..].iter().enumerate() {
        let slot = match (e.upper, e.lower) {
            (u, l) if u == uy && l == lx => EdgeSlot::E21,
            (u, l) if u == ux && l == ly => EdgeSlot::E12,
            (u, l) if u == uy && l == ly => EdgeSlot::E22,
            _ => return None,
        };
        let idx = slot as usize - 1;
        if seen[idx] {
            return None;
        }
        seen[idx] = true;
        order[k] = slot;
    }
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_synthetic, Node};

    /// u1,u2 -> 0,1; l1,l2 -> 0,1.
    fn g1() -> TemporalBipartiteGraph {
        TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4)]).unwrap()
    }

    fn g2() -> TemporalBipartiteGraph {
        TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4), (1, 1, 5)]).unwrap()
    }

    const B1_ONCE: CountVector = CountVector([1, 0, 0, 0, 0, 0]);

    #[test]
    fn per_edge_small_cases() {
        assert_eq!(per_edge_count(&g1(), 0, 10).unwrap(), B1_ONCE);
        assert!(per_edge_count(&g1(), 0, 2).unwrap().is_zero());
        assert!(per_edge_count(&g1(), 1, 10).unwrap().is_zero());
        assert_eq!(per_edge_count(&g2(), 0, 10).unwrap(), CountVector([2, 0, 0, 0, 0, 0]));
        assert!(per_edge_count(&g1(), 9, 10).is_err());
        assert!(per_edge_count(&g1(), 0, -1).is_err());
    }

    #[test]
    fn whole_graph_small_cases() {
        for g in [g1(), g2()] {
            assert_eq!(exact_count(&g, 10).unwrap(), brute_force_count(&g, 10).unwrap());
        }
        assert_eq!(exact_count(&g1(), 10).unwrap(), B1_ONCE);
        assert_eq!(exact_count(&g2(), 10).unwrap(), CountVector([2, 0, 0, 0, 0, 0]));
        let empty = TemporalBipartiteGraph::from_edges(3, 3, []).unwrap();
        assert!(exact_count(&empty, 5).unwrap().is_zero());
        assert!(brute_force_count(&empty, 5).unwrap().is_zero());
    }

    #[test]
    fn brute_force_respects_ties() {
        assert_eq!(brute_force_count(&g1(), 10).unwrap(), B1_ONCE);
        let tied =
            TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 2)]).unwrap();
        assert!(brute_force_count(&tied, 10).unwrap().is_zero());
        assert!(exact_count(&tied, 10).unwrap().is_zero());
    }

    #[test]
    fn wedge_listing() {
        let g = g2();
        let w = TimeWindow::left_open(1, 11);
        let pairs: Vec<_> = wedge_instances(&g, Node::Lower(1), Node::Upper(0), Node::Upper(1), w)
            .unwrap()
            .iter()
            .map(|w| (w.edge_a, w.edge_b))
            .collect();
        assert_eq!(pairs, vec![(2, 3), (2, 4)]);
        assert!(wedge_instances(&g, Node::Lower(1), Node::Upper(0), Node::Upper(1), TimeWindow::left_open(5, 5))
            .unwrap()
            .is_empty());
        let star = TemporalBipartiteGraph::from_edges(2, 1, [(0, 0, 1)]).unwrap();
        assert!(wedge_instances(&star, Node::Lower(0), Node::Upper(0), Node::Upper(1), w)
            .unwrap()
            .is_empty());
        assert!(wedge_instances(&g, Node::Lower(1), Node::Lower(0), Node::Upper(1), w).is_err());
        assert!(wedge_instances(&g, Node::Lower(9), Node::Upper(0), Node::Upper(1), w).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = generate_synthetic(6, 6, 400, 1000, 11).unwrap();
        assert_eq!(exact_count(&g, 150).unwrap(), exact_count_parallel(&g, 150).unwrap());
    }

    #[test]
    fn zero_tau_counts_nothing() {
        let g = generate_synthetic(3, 3, 60, 20, 5).unwrap();
        assert!(exact_count(&g, 0).unwrap().is_zero());
    }

    #[test]
    fn each_order_gets_its_type() {
        // The classic instance with E21, E12, E22 given every order of times 2, 3, 4.
        let cases = [
            ([2, 3, 4], 0),
            ([2, 4, 3], 1),
            ([3, 2, 4], 2),
            ([4, 2, 3], 3),
            ([3, 4, 2], 4),
            ([4, 3, 2], 5),
        ];
        for (p, i) in cases {
            let g = TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, p[0]), (0, 1, p[1]), (1, 1, p[2])])
                .unwrap();
            let mut expected = CountVector::zero();
            expected.0[i] = 1;
            assert_eq!(exact_count(&g, 3).unwrap(), expected, "order {p:?}");
            assert_eq!(brute_force_count(&g, 3).unwrap(), expected, "order {p:?}");
        }
    }
}
