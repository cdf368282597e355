//! Sampling estimators for temporal butterfly counts.
//!
//! Each estimator draws a sample of edges, counts the instances starting at
//! every sampled edge exactly, and reweights by the inverse inclusion
//! probability so that the sum is unbiased:
//!
//! * edge sampling keeps each edge with probability `p`, weight `1/p`;
//! * node sampling keeps each node of one layer with probability `p` along
//!   with all of its edges, weight `1/p`;
//! * interval sampling draws `s` anchor edges with replacement and takes every
//!   edge in `[t, t + c*tau]` after each anchor at time `t`. An edge `e` then
//!   appears `s * m'_e / m` times in expectation, where `m'_e` counts the edges
//!   in `[t_e - c*tau, t_e]`, so each occurrence gets weight `m / (s * m'_e)`.

use std::fmt;
use std::ops::Index;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::per_edge_count;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Layer, Node, TemporalBipartiteGraph, TimeWindow, Timestamp};
use crate::motif::{ButterflyType, CountVector, NUM_TYPES};

/// Samples larger than this are accumulated with compensated summation.
pub const COMPENSATION_THRESHOLD: usize = 1_000_000;

pub const DEFAULT_INTERVAL_MULTIPLIER: f64 = 1.0;

/// The generator behind every random draw. Seeded runs are reproducible.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    /// Edge-centric sampling.
    Es { p: f64 },
    /// Node-centric sampling over one layer.
    Ns { p: f64, layer: Layer },
    /// Time-interval sampling with `s` anchors and windows of `c * tau`.
    Is { s: usize, c: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Es { .. } => "es",
            Method::Ns { .. } => "ns",
            Method::Is { .. } => "is",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Es { p } | Method::Ns { p, .. } => check_probability(p),
            Method::Is { s, c } => check_interval_params(s, c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    #[serde(flatten)]
    pub method: Method,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn es(p: f64, seed: u64) -> Self {
        SamplingConfig { method: Method::Es { p }, seed }
    }

    pub fn ns(p: f64, layer: Layer, seed: u64) -> Self {
        SamplingConfig { method: Method::Ns { p, layer }, seed }
    }

    pub fn is(s: usize, c: f64, seed: u64) -> Self {
        SamplingConfig { method: Method::Is { s, c }, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SamplingConfig { seed, ..self }
    }
}

/// Six estimated per-type counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EstimateVector(pub [f64; NUM_TYPES]);

impl EstimateVector {
    pub fn zero() -> Self {
        EstimateVector([0.0; NUM_TYPES])
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn scaled(counts: &CountVector, factor: f64) -> Self {
        EstimateVector(counts.0.map(|c| c as f64 * factor))
    }
}

impl From<CountVector> for EstimateVector {
    fn from(c: CountVector) -> Self {
        EstimateVector::scaled(&c, 1.0)
    }
}

impl Index<ButterflyType> for EstimateVector {
    type Output = f64;

    fn index(&self, ty: ButterflyType) -> &f64 {
        &self.0[ty.slot()]
    }
}

impl fmt::Display for EstimateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:.3}")?;
        }
        write!(f, "]")
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("sampling probability must lie in (0, 1], got {p}")))
    }
}

fn check_interval_params(s: usize, c: f64) -> Result<()> {
    if s == 0 {
        return Err(Error::arg("interval sampling needs at least one anchor"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::arg(format!("window multiplier must be positive, got {c}")));
    }
    Ok(())
}

/// Width in timestamp units of the `c * tau` interval. Timestamps are
/// integers, so `t' - t <= c*tau` iff `t' - t <= floor(c*tau)`.
pub fn interval_width(c: f64, tau: Timestamp) -> Timestamp {
    let w = (c * tau as f64).floor();
    if w >= i64::MAX as f64 {
        i64::MAX
    } else {
        w.max(0.0) as i64
    }
}

/// Edge sampling: every edge independently with probability `p`. Ids ascending.
pub fn sample_edges_es<R: Rng>(graph: &TemporalBipartiteGraph, p: f64, rng: &mut R) -> Result<Vec<EdgeId>> {
    check_probability(p)?;
    Ok((0..graph.num_edges() as EdgeId).filter(|_| rng.gen_bool(p)).collect())
}

/// Node sampling: every node of `layer` independently with probability `p`,
/// together with all its incident edges. Ids ascending.
pub fn sample_edges_ns<R: Rng>(
    graph: &TemporalBipartiteGraph,
    p: f64,
    layer: Layer,
    rng: &mut R,
) -> Result<Vec<EdgeId>> {
    check_probability(p)?;
    let mut out = Vec::new();
    for i in 0..graph.layer_size(layer) {
        if rng.gen_bool(p) {
            out.extend(graph.adjacency_unchecked(Node::new(layer, i as u32)).iter().map(|a| a.edge));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Interval sampling: `s` anchors drawn uniformly with replacement; each
/// contributes every edge in `[t, t + c*tau]`. Returns `(edge id, multiplicity)`
/// pairs with ids ascending.
pub fn sample_edges_is<R: Rng>(
    graph: &TemporalBipartiteGraph,
    s: usize,
    c: f64,
    tau: Timestamp,
    rng: &mut R,
) -> Result<Vec<(EdgeId, u32)>> {
    check_interval_params(s, c)?;
    if tau < 0 {
        return Err(Error::arg("duration constraint must be non-negative"));
    }
    let m = graph.num_edges();
    if m == 0 {
        return Ok(Vec::new());
    }
    let width = interval_width(c, tau);
    let by_time = graph.edges_by_time();
    let mut multiplicity = vec![0u32; m];
    for _ in 0..s {
        let anchor = by_time[rng.gen_range(0..m)].timestamp;
        let window = TimeWindow::closed(anchor, anchor.saturating_add(width));
        for e in graph.edges_in_window(window) {
            multiplicity[e.id as usize] += 1;
        }
    }
    Ok(multiplicity
        .into_iter()
        .enumerate()
        .filter(|&(_, k)| k > 0)
        .map(|(id, k)| (id as EdgeId, k))
        .collect())
}

/// Number of edges with timestamps in `[t - window, t]` where `t` is the
/// timestamp of `edge`; includes the edge itself and timestamp ties.
pub fn trailing_edge_count(graph: &TemporalBipartiteGraph, edge: EdgeId, window: Timestamp) -> Result<usize> {
    if window < 0 {
        return Err(Error::arg("trailing window must be non-negative"));
    }
    let t = graph.edge(edge)?.timestamp;
    Ok(graph.edges_in_window(TimeWindow::closed(t.saturating_sub(window), t)).len())
}

pub fn weight_es_ns(counts: &CountVector, p: f64) -> Result<EstimateVector> {
    check_probability(p)?;
    Ok(EstimateVector::scaled(counts, 1.0 / p))
}

/// Weight of one occurrence of an edge in an interval sample.
pub fn weight_is(counts: &CountVector, m: usize, s: usize, trailing: usize) -> Result<EstimateVector> {
    if trailing == 0 {
        return Err(Error::Internal("edge missing from its own trailing window".into()));
    }
    if s == 0 {
        return Err(Error::arg("interval sampling needs at least one anchor"));
    }
    Ok(EstimateVector::scaled(counts, m as f64 / (s as f64 * trailing as f64)))
}

/// Six running sums, compensated (Neumaier) when `compensated` is set.
struct Accumulator {
    sum: [f64; NUM_TYPES],
    carry: [f64; NUM_TYPES],
    compensated: bool,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Accumulator { sum: [0.0; NUM_TYPES], carry: [0.0; NUM_TYPES], compensated }
    }

    fn add(&mut self, v: &EstimateVector) {
        for i in 0..NUM_TYPES {
            let x = v.0[i];
            if self.compensated {
                let t = self.sum[i] + x;
                if self.sum[i].abs() >= x.abs() {
                    self.carry[i] += (self.sum[i] - t) + x;
                } else {
                    self.carry[i] += (x - t) + self.sum[i];
                }
                self.sum[i] = t;
            } else {
                self.sum[i] += x;
            }
        }
    }

    fn finish(self) -> EstimateVector {
        EstimateVector(std::array::from_fn(|i| self.sum[i] + self.carry[i]))
    }
}

/// A drawn sample: distinct edge ids ascending, each with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSample {
    pub edges: Vec<(EdgeId, u32)>,
}

impl EdgeSample {
    /// Sample size counting multiplicity.
    pub fn len(&self) -> usize {
        self.edges.iter().map(|&(_, k)| k as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Draws the sample a configuration calls for, using the config's seed.
pub fn draw_sample(graph: &TemporalBipartiteGraph, tau: Timestamp, config: &SamplingConfig) -> Result<EdgeSample> {
    config.method.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let edges = match config.method {
        Method::Es { p } => sample_edges_es(graph, p, &mut rng)?.into_iter().map(|e| (e, 1)).collect(),
        Method::Ns { p, layer } => sample_edges_ns(graph, p, layer, &mut rng)?
            .into_iter()
            .map(|e| (e, 1))
            .collect(),
        Method::Is { s, c } => sample_edges_is(graph, s, c, tau, &mut rng)?,
    };
    Ok(EdgeSample { edges })
}

/// Runs one estimator: sample, count per sampled edge, reweight and sum.
/// Deterministic in `(graph, tau, config)`.
pub fn estimate(graph: &TemporalBipartiteGraph, tau: Timestamp, config: &SamplingConfig) -> Result<EstimateVector> {
    if tau < 0 {
        return Err(Error::arg("duration constraint must be non-negative"));
    }
    let sample = draw_sample(graph, tau, config)?;
    match config.method {
        // Uniform weights: sum the integer counts, then scale once.
        Method::Es { p } | Method::Ns { p, .. } => {
            let mut total = CountVector::zero();
            for &(id, _) in &sample.edges {
                total.try_add_assign(&per_edge_count(graph, id, tau)?)?;
            }
            weight_es_ns(&total, p)
        }
        Method::Is { s, c } => {
            let m = graph.num_edges();
            let width = interval_width(c, tau);
            let mut acc = Accumulator::new(sample.len() > COMPENSATION_THRESHOLD);
            for &(id, k) in &sample.edges {
                let counts = per_edge_count(graph, id, tau)?;
                if counts.is_zero() {
                    continue;
                }
                let trailing = trailing_edge_count(graph, id, width)?;
                let once = weight_is(&counts, m, s, trailing)?;
                acc.add(&EstimateVector(once.0.map(|w| w * k as f64)));
            }
            Ok(acc.finish())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::exact_count;
    use crate::graph::generate_synthetic;

    fn g1() -> TemporalBipartiteGraph {
        TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4)]).unwrap()
    }

    #[test]
    fn es_with_p_one_takes_everything() {
        let g = g1();
        let mut rng = rng_from_seed(1);
        assert_eq!(sample_edges_es(&g, 1.0, &mut rng).unwrap(), vec![0, 1, 2, 3]);
        assert!(sample_edges_es(&g, 0.0, &mut rng).is_err());
        assert!(sample_edges_es(&g, 1.5, &mut rng).is_err());
        assert!(sample_edges_es(&g, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn es_with_tiny_p_is_usually_empty() {
        let g = g1();
        let mut rng = rng_from_seed(9);
        let empty = (0..200).filter(|_| sample_edges_es(&g, 1e-9, &mut rng).unwrap().is_empty()).count();
        assert_eq!(empty, 200);
    }

    #[test]
    fn ns_takes_incident_edges() {
        let g = g1();
        let mut rng = rng_from_seed(2);
        assert_eq!(sample_edges_ns(&g, 1.0, Layer::Lower, &mut rng).unwrap(), vec![0, 1, 2, 3]);
        // Find a seed that keeps exactly u1.
        let hit = (0..1000u64)
            .map(|seed| sample_edges_ns(&g, 0.5, Layer::Upper, &mut rng_from_seed(seed)).unwrap())
            .find(|s| s.contains(&0) && !s.contains(&1))
            .unwrap();
        assert_eq!(hit, vec![0, 2]);
    }

    #[test]
    fn interval_window_is_closed() {
        let g = g1();
        // Force anchor e3 (t = 3) by scanning seeds.
        let sample = (0..1000u64)
            .map(|seed| sample_edges_is(&g, 1, 1.0, 1, &mut rng_from_seed(seed)).unwrap())
            .find(|s| s.first().map(|x| x.0) == Some(2))
            .unwrap();
        assert_eq!(sample, vec![(2, 1), (3, 1)]);
    }

    #[test]
    fn interval_single_edge_graph() {
        let g = TemporalBipartiteGraph::from_edges(1, 1, [(0, 0, 7)]).unwrap();
        assert_eq!(sample_edges_is(&g, 5, 1.0, 3, &mut rng_from_seed(0)).unwrap(), vec![(0, 5)]);
        let empty = TemporalBipartiteGraph::from_edges(1, 1, []).unwrap();
        assert!(sample_edges_is(&empty, 5, 1.0, 3, &mut rng_from_seed(0)).unwrap().is_empty());
        assert!(sample_edges_is(&g, 0, 1.0, 3, &mut rng_from_seed(0)).is_err());
        assert!(sample_edges_is(&g, 1, 0.0, 3, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn trailing_counts() {
        let g = g1();
        assert_eq!(trailing_edge_count(&g, 3, 2).unwrap(), 3);
        assert_eq!(trailing_edge_count(&g, 2, 0).unwrap(), 1);
        for w in [0, 1, 100] {
            assert_eq!(trailing_edge_count(&g, 0, w).unwrap(), 1);
        }
        let ties = TemporalBipartiteGraph::from_edges(2, 1, [(0, 0, 5), (1, 0, 5)]).unwrap();
        assert_eq!(trailing_edge_count(&ties, 0, 0).unwrap(), 2);
        assert!(trailing_edge_count(&g, 10, 1).is_err());
    }

    #[test]
    fn weights() {
        let c = CountVector([2, 0, 0, 0, 0, 0]);
        assert_eq!(weight_es_ns(&c, 0.5).unwrap().0, [4.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(weight_es_ns(&c, 1.0).unwrap(), EstimateVector::from(c));
        assert_eq!(weight_es_ns(&CountVector::zero(), 0.3).unwrap(), EstimateVector::zero());
        assert!(weight_es_ns(&c, 0.0).is_err());
        let one = CountVector([1, 1, 1, 1, 1, 1]);
        assert_eq!(weight_is(&one, 4, 2, 2).unwrap().0, [1.0; 6]);
        assert_eq!(weight_is(&one, 7, 1, 7).unwrap().0, [1.0; 6]);
        assert_eq!(weight_is(&CountVector::zero(), 9, 2, 3).unwrap(), EstimateVector::zero());
        assert!(matches!(weight_is(&one, 4, 2, 0), Err(Error::Internal(_))));
    }

    #[test]
    fn full_samples_are_exact() {
        let g = generate_synthetic(5, 5, 200, 500, 3).unwrap();
        let exact = EstimateVector::from(exact_count(&g, 80).unwrap());
        assert_eq!(estimate(&g, 80, &SamplingConfig::es(1.0, 1)).unwrap(), exact);
        assert_eq!(estimate(&g, 80, &SamplingConfig::ns(1.0, Layer::Upper, 1)).unwrap(), exact);
        assert_eq!(estimate(&g, 80, &SamplingConfig::ns(1.0, Layer::Lower, 1)).unwrap(), exact);
    }

    #[test]
    fn estimates_are_deterministic_and_nonnegative() {
        let g = generate_synthetic(5, 5, 200, 500, 4).unwrap();
        for cfg in [
            SamplingConfig::es(0.3, 17),
            SamplingConfig::ns(0.4, Layer::Lower, 17),
            SamplingConfig::is(20, 1.0, 17),
        ] {
            let a = estimate(&g, 60, &cfg).unwrap();
            let b = estimate(&g, 60, &cfg).unwrap();
            assert_eq!(a.0.map(f64::to_bits), b.0.map(f64::to_bits));
            assert!(a.0.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = Accumulator::new(true);
        acc.add(&EstimateVector([1e16; 6]));
        for _ in 0..10 {
            acc.add(&EstimateVector([1.0; 6]));
        }
        acc.add(&EstimateVector([-1e16; 6]));
        assert_eq!(acc.finish().0, [10.0; 6]);
    }

    #[test]
    fn config_serializes_flat() {
        let json = serde_json::to_string(&SamplingConfig::ns(0.5, Layer::Upper, 3)).unwrap();
        assert_eq!(json, r#"{"method":"ns","p":0.5,"layer":"upper","seed":3}"#);
    }
}
