//! Composite cluster sampling: probabilistic edge switching, cluster
//! formation over "on" positive edges, coupling through "on" negative edges,
//! joint relabeling and Metropolis-Hastings acceptance.

mod oracle;

pub use oracle::{enumerate_posterior, labels_to_mask, oracle_map};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CandidacyGraph, VertexId};
use crate::posterior::{derive_state, log_posterior, Labeling, MatchState, PriorParams, ScoreTracker};

/// Per-edge switching state for one sampling step.
#[derive(Debug, Clone)]
pub struct EdgeStatus {
    /// A positive edge is consistent when its endpoint labels agree; a
    /// negative edge when they differ.
    pub consistent: Vec<bool>,
    /// Sampled switch: inconsistent edges are deterministically off,
    /// consistent edges turn on with their (capped) edge probability.
    pub on: Vec<bool>,
}

/// A composite cluster: label-uniform clusters (connected components over
/// "on" positive edges) glued together by "on" negative coupling edges.
#[derive(Debug, Clone)]
pub struct CompositeCluster {
    pub clusters: Vec<Vec<VertexId>>,
    /// Indices of the "on" negative edges joining the clusters.
    pub coupling: Vec<usize>,
}

impl CompositeCluster {
    /// All member vertices, in ascending order.
    pub fn members(&self) -> Vec<VertexId> {
        let mut m: Vec<VertexId> = self.clusters.iter().flatten().copied().collect();
        m.sort_unstable();
        m
    }

    pub fn size(&self) -> usize {
        self.clusters.iter().map(|c| c.len()).sum()
    }
}

/// How the seed of a composite cluster is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSelection {
    /// Pick a vertex uniformly at random and take its cluster. Weights
    /// clusters by size and keeps the proposal ratio exact.
    UniformVertex,
    /// Pick among the current clusters uniformly.
    UniformCluster,
}

/// Initial labeling of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitLabeling {
    /// Everything unmatched (all labels zero). Always valid.
    AllUnmatched,
    /// Activate, per part, the real vertex with the smallest appearance
    /// distance.
    GreedyAppearance,
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub iterations: usize,
    /// Steps discarded by visit-distribution consumers; the chain itself
    /// tracks its best state from step one.
    pub burn_in: usize,
    pub seed: u64,
    pub record_trace: bool,
    /// Range of the per-step cap on edge switching probabilities; each
    /// composite step draws its cap uniformly from this interval. Edge
    /// probabilities of exactly 1 would make composite moves irreversible
    /// (the reverse move could never regenerate the same cluster), freezing
    /// the chain, so the cap stays strictly below 1. Small caps keep
    /// composite clusters from gluing competing candidates together when the
    /// chain bootstraps from the all-unmatched state; large caps drive the
    /// coordinated swap moves. Mixing over caps with fixed weights leaves
    /// the stationary distribution untouched.
    pub omega_caps: (f64, f64),
    /// Probability of taking a plain single-vertex Metropolis step instead
    /// of a composite move. The single-site kernel is symmetric (ratio 1)
    /// and covers fine-grained activation; composite moves cover the
    /// coordinated swaps. Both leave the posterior invariant, so any mixture
    /// does too.
    pub single_flip_prob: f64,
    pub seed_selection: SeedSelection,
    pub init: InitLabeling,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 500,
            burn_in: 0,
            seed: 0,
            record_trace: false,
            omega_caps: (0.05, 0.7),
            single_flip_prob: 0.2,
            seed_selection: SeedSelection::UniformVertex,
            init: InitLabeling::AllUnmatched,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::contract("iterations must be at least 1"));
        }
        let (lo, hi) = self.omega_caps;
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(Error::contract("omega_caps must satisfy 0 < lo <= hi < 1"));
        }
        if !(0.0..1.0).contains(&self.single_flip_prob) {
            return Err(Error::contract("single_flip_prob must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub cluster_size: usize,
    pub accepted: bool,
    pub log_posterior: f64,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub best_labeling: Labeling,
    pub best_state: MatchState,
    pub best_score: f64,
    pub acceptance_rate: f64,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Consistency flags for every edge under a labeling.
pub fn classify_edges(g: &CandidacyGraph, labels: &[bool]) -> Vec<bool> {
    g.edges()
        .iter()
        .map(|e| {
            let equal = labels[e.a] == labels[e.b];
            if e.kind.is_positive() {
                equal
            } else {
                !equal
            }
        })
        .collect()
}

/// Sample the edge switches: inconsistent edges off, consistent edges on
/// with probability `min(p_e, omega_cap)`.
pub fn sample_edge_status(
    g: &CandidacyGraph,
    labels: &[bool],
    omega_cap: f64,
    rng: &mut ChaCha8Rng,
) -> EdgeStatus {
    let consistent = classify_edges(g, labels);
    let on = g
        .edges()
        .iter()
        .zip(consistent.iter())
        .map(|(e, &c)| c && rng.random::<f64>() < e.prob.min(omega_cap))
        .collect();
    EdgeStatus { consistent, on }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Form the composite cluster for one step: connected components of "on"
/// positive edges, seeded per `seed_selection`, expanded transitively over
/// "on" negative edges.
pub fn sample_composite_cluster(
    g: &CandidacyGraph,
    status: &EdgeStatus,
    seed_selection: SeedSelection,
    rng: &mut ChaCha8Rng,
) -> CompositeCluster {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut on_negative: Vec<usize> = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if !status.on[i] {
            continue;
        }
        if e.kind.is_positive() {
            uf.union(e.a, e.b);
        } else {
            on_negative.push(i);
        }
    }

    let seed_root = match seed_selection {
        SeedSelection::UniformVertex => {
            let v = rng.random_range(0..n);
            uf.find(v)
        }
        SeedSelection::UniformCluster => {
            let mut roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
            roots.sort_unstable();
            roots.dedup();
            roots[rng.random_range(0..roots.len())]
        }
    };

    // Expand over "on" negative edges between cluster roots.
    let mut in_cc = vec![false; n];
    in_cc[seed_root] = true;
    let mut frontier = vec![seed_root];
    while let Some(root) = frontier.pop() {
        for &ei in &on_negative {
            let e = &g.edges()[ei];
            let (ra, rb) = (uf.find(e.a), uf.find(e.b));
            let other = if ra == root {
                rb
            } else if rb == root {
                ra
            } else {
                continue;
            };
            if !in_cc[other] {
                in_cc[other] = true;
                frontier.push(other);
            }
        }
    }

    let mut clusters_by_root: std::collections::BTreeMap<usize, Vec<VertexId>> =
        std::collections::BTreeMap::new();
    for v in 0..n {
        let r = uf.find(v);
        if in_cc[r] {
            clusters_by_root.entry(r).or_default().push(v);
        }
    }
    let coupling = on_negative
        .iter()
        .copied()
        .filter(|&ei| {
            let e = &g.edges()[ei];
            in_cc[uf.find(e.a)] && in_cc[uf.find(e.b)]
        })
        .collect();
    CompositeCluster {
        clusters: clusters_by_root.into_values().collect(),
        coupling,
    }
}

/// Log of the state transition probability ratio q(M'->M)/q(M->M') for
/// flipping `members`: the product of (1 - q_e) over boundary edges that are
/// consistent under the new state, divided by the same product under the
/// current state. Each boundary edge is consistent under exactly one of the
/// two states, so it contributes to exactly one side.
pub fn proposal_log_ratio(
    g: &CandidacyGraph,
    labels: &[bool],
    members: &[VertexId],
    member_mask: &[bool],
    omega_cap: f64,
) -> f64 {
    let mut acc = 0.0;
    for &v in members {
        for &ei in g.incident_edges(v) {
            let e = &g.edges()[ei];
            let o = e.other(v);
            if member_mask[o] {
                continue; // internal edge, not a cut
            }
            let q = e.prob.min(omega_cap);
            let term = (-q).ln_1p();
            let equal_now = labels[v] == labels[o];
            // After the flip the endpoint labels compare opposite.
            let consistent_now = if e.kind.is_positive() { equal_now } else { !equal_now };
            if consistent_now {
                acc -= term; // factor in q(M -> M'), the denominator
            } else {
                acc += term; // factor in q(M' -> M), the numerator
            }
        }
    }
    acc
}

/// Metropolis-Hastings acceptance with log-space inputs. A proposal scoring
/// negative infinity is never accepted; escaping an invalid current state is
/// always accepted.
pub fn mh_accept(
    score: f64,
    score_new: f64,
    log_ratio: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let u: f64 = rng.random();
    acceptance_threshold(score, score_new, log_ratio)
        .map(|log_alpha| u.ln() < log_alpha)
        .unwrap_or(false)
}

/// log acceptance probability, or None when the proposal must be rejected.
fn acceptance_threshold(score: f64, score_new: f64, log_ratio: f64) -> Option<f64> {
    if score_new == f64::NEG_INFINITY {
        return None;
    }
    if score == f64::NEG_INFINITY {
        return Some(0.0);
    }
    Some((log_ratio + score_new - score).min(0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub cluster_size: usize,
    pub accepted: bool,
    pub log_posterior: f64,
}

/// One MCMC chain over a candidacy graph. Owns its labeling, score tracker
/// and RNG; multiple chains with distinct seeds are independent.
pub struct Chain<'g> {
    graph: &'g CandidacyGraph,
    cfg: ChainConfig,
    rng: ChaCha8Rng,
    tracker: ScoreTracker<'g>,
    member_mask: Vec<bool>,
    best_labels: Labeling,
    best_score: f64,
    prior: PriorParams,
    steps: usize,
    accepted: usize,
    trace: Vec<TraceRecord>,
}

impl<'g> Chain<'g> {
    pub fn new(graph: &'g CandidacyGraph, prior: PriorParams, cfg: ChainConfig) -> Result<Chain<'g>> {
        cfg.validate()?;
        prior.validate()?;
        if graph.vertex_count() == 0 {
            return Err(Error::contract("cannot sample an empty graph"));
        }
        let n = graph.vertex_count();
        let labels = match cfg.init {
            InitLabeling::AllUnmatched => vec![false; n],
            InitLabeling::GreedyAppearance => greedy_labels(graph),
        };
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let tracker = ScoreTracker::new(graph, prior, labels.clone());
        let best_score = log_posterior(graph, &labels, &prior);
        Ok(Chain {
            graph,
            cfg,
            rng,
            tracker,
            member_mask: vec![false; n],
            best_labels: labels,
            best_score,
            prior,
            steps: 0,
            accepted: 0,
            trace: Vec::new(),
        })
    }

    pub fn labels(&self) -> &[bool] {
        self.tracker.labels()
    }

    pub fn score(&self) -> f64 {
        self.tracker.score()
    }

    pub fn best_score(&self) -> f64 {
        self.best_score
    }

    pub fn step(&mut self) -> StepOutcome {
        let single = self.rng.random::<f64>() < self.cfg.single_flip_prob;
        let (cap_lo, cap_hi) = self.cfg.omega_caps;
        let cap = cap_lo + (cap_hi - cap_lo) * self.rng.random::<f64>();
        let flips = if single {
            vec![self.rng.random_range(0..self.graph.vertex_count())]
        } else {
            let status =
                sample_edge_status(self.graph, self.tracker.labels(), cap, &mut self.rng);
            sample_composite_cluster(self.graph, &status, self.cfg.seed_selection, &mut self.rng)
                .members()
        };
        for &v in &flips {
            self.member_mask[v] = true;
        }
        // The single-site proposal is symmetric; composite moves carry the
        // cut-edge correction at the cap that generated them.
        let log_ratio = if single {
            0.0
        } else {
            proposal_log_ratio(
                self.graph,
                self.tracker.labels(),
                &flips,
                &self.member_mask,
                cap,
            )
        };
        let score = self.tracker.score();
        let score_new = self.tracker.score_after(&flips, &self.member_mask);
        let accepted = mh_accept(score, score_new, log_ratio, &mut self.rng);
        if accepted {
            self.tracker.apply(&flips, &self.member_mask);
            self.accepted += 1;
            let current = self.tracker.score();
            if current > self.best_score {
                // Re-score from scratch so the reported optimum carries no
                // incremental rounding.
                self.best_score = log_posterior(self.graph, self.tracker.labels(), &self.prior);
                self.best_labels = self.tracker.labels().to_vec();
            }
        }
        for &v in &flips {
            self.member_mask[v] = false;
        }
        self.steps += 1;
        let outcome = StepOutcome {
            cluster_size: flips.len(),
            accepted,
            log_posterior: self.tracker.score(),
        };
        if self.cfg.record_trace {
            self.trace.push(TraceRecord {
                iteration: self.steps,
                cluster_size: outcome.cluster_size,
                accepted,
                log_posterior: outcome.log_posterior,
            });
        }
        outcome
    }

    pub fn run(mut self) -> ChainResult {
        for _ in 0..self.cfg.iterations {
            self.step();
        }
        self.into_result()
    }

    pub fn into_result(self) -> ChainResult {
        let best_state = derive_state(self.graph, &self.best_labels, &self.prior)
            .expect("labeling length matches");
        ChainResult {
            best_labeling: self.best_labels,
            best_state,
            best_score: self.best_score,
            acceptance_rate: if self.steps == 0 {
                0.0
            } else {
                self.accepted as f64 / self.steps as f64
            },
            trace: if self.cfg.record_trace {
                Some(self.trace)
            } else {
                None
            },
        }
    }
}

fn greedy_labels(graph: &CandidacyGraph) -> Vec<bool> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; graph.parts_present().len()];
    for (i, v) in graph.vertices().iter().enumerate() {
        let Some(d) = v.appearance else { continue };
        let slot = graph.part_slot(i);
        if best[slot].map_or(true, |(_, bd)| d < bd) {
            best[slot] = Some((i, d));
        }
    }
    let mut labels = vec![false; graph.vertex_count()];
    for slot in best.into_iter().flatten() {
        labels[slot.0] = true;
    }
    labels
}

/// Run a single chain to completion.
pub fn run_chain(g: &CandidacyGraph, prior: PriorParams, cfg: ChainConfig) -> Result<ChainResult> {
    Ok(Chain::new(g, prior, cfg)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CandidacyGraph, Edge, EdgeKind, Vertex};
    use crate::model::PartType;

    fn pair_graph(kin_prob: f64) -> CandidacyGraph {
        let vertices = vec![
            Vertex::real(PartType::Head, 0, 0, 0.3, 1.0, None),
            Vertex::real(PartType::Torso, 0, 0, 0.5, 1.0, None),
        ];
        let edges = vec![Edge::new(0, 1, EdgeKind::Kinematic, kin_prob)];
        CandidacyGraph::new(vertices, edges).unwrap()
    }

    #[test]
    fn classify_edges_rules() {
        let g = pair_graph(0.7);
        assert_eq!(classify_edges(&g, &[true, true]), vec![true]);
        assert_eq!(classify_edges(&g, &[true, false]), vec![false]);
        assert_eq!(classify_edges(&g, &[false, false]), vec![true]);
        let vertices = vec![
            Vertex::real(PartType::Head, 0, 0, 0.3, 1.0, None),
            Vertex::null(PartType::Head, 0),
        ];
        let neg = CandidacyGraph::new(vertices, vec![Edge::new(0, 1, EdgeKind::SamePart, 1.0)]).unwrap();
        assert_eq!(classify_edges(&neg, &[true, true]), vec![false]);
        assert_eq!(classify_edges(&neg, &[true, false]), vec![true]);
    }

    #[test]
    fn all_zero_labeling_classification() {
        // Positive edges all consistent, negative edges all inconsistent.
        let vertices = vec![
            Vertex::real(PartType::Head, 0, 0, 0.1, 1.0, None),
            Vertex::null(PartType::Head, 0),
            Vertex::real(PartType::Torso, 0, 0, 0.1, 1.0, None),
        ];
        let edges = vec![
            Edge::new(0, 1, EdgeKind::SamePart, 1.0),
            Edge::new(0, 2, EdgeKind::Kinematic, 0.8),
        ];
        let g = CandidacyGraph::new(vertices, edges).unwrap();
        let c = classify_edges(&g, &[false, false, false]);
        assert_eq!(c, vec![false, true]);
    }

    #[test]
    fn status_invariants_hold() {
        let g = pair_graph(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for labels in [[false, false], [true, false], [true, true]] {
            for _ in 0..50 {
                let st = sample_edge_status(&g, &labels, 0.95, &mut rng);
                for i in 0..st.on.len() {
                    if !st.consistent[i] {
                        assert!(!st.on[i], "inconsistent edge turned on");
                    }
                }
            }
        }
    }

    #[test]
    fn composite_cluster_spans_on_negative_coupling() {
        // Two positive components joined by one negative edge; all edge
        // probabilities effectively 1 under a high cap.
        let vertices = vec![
            Vertex::real(PartType::Head, 0, 0, 0.1, 1.0, None),
            Vertex::real(PartType::Torso, 0, 0, 0.1, 1.0, None),
            Vertex::real(PartType::Torso, 1, 0, 0.2, 1.0, None),
            Vertex::real(PartType::LeftThigh, 0, 0, 0.1, 1.0, None),
        ];
        let edges = vec![
            Edge::new(0, 1, EdgeKind::Kinematic, 1.0),
            Edge::new(1, 2, EdgeKind::SamePart, 1.0),
            Edge::new(2, 3, EdgeKind::Kinematic, 1.0),
        ];
        let g = CandidacyGraph::new(vertices, edges).unwrap();
        // Labels make both kinematic edges consistent (components {0,1} and
        // {2,3}) and the same-part edge consistent (labels differ).
        let labels = [true, true, false, false];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let status = sample_edge_status(&g, &labels, 0.999999, &mut rng);
        // With cap near 1 every consistent edge is on at these probabilities.
        assert_eq!(status.on, vec![true, true, true]);
        let cc = sample_composite_cluster(&g, &status, SeedSelection::UniformVertex, &mut rng);
        assert_eq!(cc.members(), vec![0, 1, 2, 3]);
        assert_eq!(cc.clusters.len(), 2);
        assert_eq!(cc.coupling.len(), 1);
        for cl in &cc.clusters {
            let vals: Vec<bool> = cl.iter().map(|&v| labels[v]).collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]), "label-uniform cluster");
        }
    }

    #[test]
    fn all_edges_off_yields_single_vertex() {
        let g = pair_graph(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let status = EdgeStatus {
            consistent: vec![true],
            on: vec![false],
        };
        let cc = sample_composite_cluster(&g, &status, SeedSelection::UniformVertex, &mut rng);
        assert_eq!(cc.size(), 1);
        assert!(cc.coupling.is_empty());
    }

    #[test]
    fn relabel_is_an_involution() {
        let g = pair_graph(0.5);
        let prior = PriorParams::default();
        let mut tracker = ScoreTracker::new(&g, prior, vec![false, false]);
        let mut mask = vec![false, false];
        let flips = vec![0usize, 1];
        mask.iter_mut().for_each(|m| *m = true);
        let before = tracker.labels().to_vec();
        tracker.apply(&flips, &mask);
        tracker.apply(&flips, &mask);
        assert_eq!(tracker.labels(), &before[..]);
    }

    #[test]
    fn proposal_ratio_no_boundary_is_zero() {
        let g = pair_graph(0.5);
        let members = vec![0usize, 1];
        let mask = vec![true, true];
        let r = proposal_log_ratio(&g, &[false, false], &members, &mask, 0.5);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn proposal_ratio_single_cut_edge() {
        // Flip only vertex 0: the kinematic edge (consistent under M at
        // labels 0,0) is cut under M, so the ratio is 1/(1-q).
        let g = pair_graph(0.4);
        let members = vec![0usize];
        let mask = vec![true, false];
        let r = proposal_log_ratio(&g, &[false, false], &members, &mask, 0.9);
        // Under M' (labels 1,0) the same edge is inconsistent, so the
        // reverse move contributes nothing: the log ratio is -ln(1 - 0.4).
        assert!((r + (0.6f64).ln()).abs() < 1e-12, "r = {r}");
    }

    #[test]
    fn proposal_ratio_forward_backward_cancel() {
        let g = pair_graph(0.7);
        let members = vec![0usize];
        let mask = vec![true, false];
        let fwd = proposal_log_ratio(&g, &[false, false], &members, &mask, 0.5);
        let bwd = proposal_log_ratio(&g, &[true, false], &members, &mask, 0.5);
        assert!((fwd + bwd).abs() < 1e-12);
    }

    #[test]
    fn mh_accept_rules() {
        assert_eq!(acceptance_threshold(-1.0, -1.0, 0.0), Some(0.0));
        // score' - score = ln 2 with ratio 1: alpha = 1.
        assert_eq!(acceptance_threshold(-2.0, -2.0 + 2f64.ln(), 0.0), Some(0.0));
        assert_eq!(acceptance_threshold(-1.0, f64::NEG_INFINITY, 0.0), None);
        assert_eq!(acceptance_threshold(f64::NEG_INFINITY, -5.0, 0.0), Some(0.0));
        let worse = acceptance_threshold(-1.0, -3.0, 0.0).unwrap();
        assert!((worse - -2.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_chain_finds_the_better_labeling() {
        // One real vertex, D = 0.1: active scores -0.1 - alpha_s, inactive
        // scores -alpha_u. With alpha_u = 12 activation wins.
        let vertices = vec![Vertex::real(PartType::Head, 0, 0, 0.1, 1.0, None)];
        let g = CandidacyGraph::new(vertices, vec![]).unwrap();
        let cfg = ChainConfig {
            iterations: 50,
            seed: 9,
            ..ChainConfig::default()
        };
        let res = run_chain(&g, PriorParams::default(), cfg).unwrap();
        assert_eq!(res.best_labeling, vec![true]);
        assert!((res.best_score - (-0.1 - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn chains_are_deterministic_per_seed() {
        let g = pair_graph(0.6);
        let cfg = ChainConfig {
            iterations: 200,
            seed: 42,
            record_trace: true,
            ..ChainConfig::default()
        };
        let a = run_chain(&g, PriorParams::default(), cfg.clone()).unwrap();
        let b = run_chain(&g, PriorParams::default(), cfg).unwrap();
        assert_eq!(a.best_labeling, b.best_labeling);
        assert_eq!(a.best_score, b.best_score);
        assert_eq!(a.acceptance_rate, b.acceptance_rate);
        let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
        assert_eq!(ta.len(), tb.len());
        for (x, y) in ta.iter().zip(tb.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn best_score_is_monotone() {
        let g = pair_graph(0.6);
        let mut chain = Chain::new(&g, PriorParams::default(), ChainConfig {
            iterations: 100,
            seed: 3,
            ..ChainConfig::default()
        })
        .unwrap();
        let mut prev = chain.best_score();
        for _ in 0..100 {
            chain.step();
            assert!(chain.best_score() >= prev);
            prev = chain.best_score();
        }
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = CandidacyGraph::new(vec![], vec![]).unwrap();
        assert!(Chain::new(&g, PriorParams::default(), ChainConfig::default()).is_err());
    }
}
