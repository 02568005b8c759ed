//! Incremental posterior bookkeeping for samplers and enumeration: flipping
//! a vertex set updates the score in time proportional to the set's incident
//! edges instead of the whole graph.

use std::collections::HashMap;

use crate::graph::{CandidacyGraph, EdgeKind};
use crate::posterior::{derive_state, MatchState, PriorParams};

/// Running decomposition of the log posterior for one labeling, supporting
/// delta previews and in-place flips. Owned by a single chain; never shared.
#[derive(Debug, Clone)]
pub struct ScoreTracker<'g> {
    graph: &'g CandidacyGraph,
    prior: PriorParams,
    labels: Vec<bool>,
    /// Active real-match count per part slot.
    part_active: Vec<u32>,
    unmatched: usize,
    /// Quantized scale bin per vertex (real vertices only).
    bin_of: Vec<Option<i64>>,
    bin_counts: HashMap<i64, u32>,
    distinct_bins: usize,
    likelihood: f64,
    /// Finite edge terms over co-activated pairs (same-part edges excluded).
    edge_sum: f64,
    /// Number of co-activated same-part edges; any > 0 means score -inf.
    violations: u32,
}

impl<'g> ScoreTracker<'g> {
    pub fn new(graph: &'g CandidacyGraph, prior: PriorParams, labels: Vec<bool>) -> ScoreTracker<'g> {
        assert_eq!(labels.len(), graph.vertex_count(), "labeling length");
        let bin_of: Vec<Option<i64>> = graph
            .vertices()
            .iter()
            .map(|v| v.target_scale.map(|s| prior.scale_bin(s)))
            .collect();
        let mut part_active = vec![0u32; graph.parts_present().len()];
        let mut bin_counts: HashMap<i64, u32> = HashMap::new();
        let mut likelihood = 0.0;
        for (i, v) in graph.vertices().iter().enumerate() {
            if !labels[i] {
                continue;
            }
            if let Some(d) = v.appearance {
                likelihood -= d;
            }
            if v.target_idx.is_some() {
                part_active[graph.part_slot(i)] += 1;
                *bin_counts.entry(bin_of[i].unwrap()).or_insert(0) += 1;
            }
        }
        let unmatched = part_active.iter().filter(|&&c| c == 0).count();
        let distinct_bins = bin_counts.len();
        let mut edge_sum = 0.0;
        let mut violations = 0;
        for e in graph.edges() {
            if labels[e.a] && labels[e.b] {
                if e.kind == EdgeKind::SamePart {
                    violations += 1;
                } else {
                    edge_sum += e.log_term;
                }
            }
        }
        ScoreTracker {
            graph,
            prior,
            labels,
            part_active,
            unmatched,
            bin_of,
            bin_counts,
            distinct_bins,
            likelihood,
            edge_sum,
            violations,
        }
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn violations(&self) -> u32 {
        self.violations
    }

    pub fn score(&self) -> f64 {
        if self.violations > 0 {
            return f64::NEG_INFINITY;
        }
        self.likelihood - self.prior.alpha_u * self.unmatched as f64
            - self.prior.alpha_s * self.distinct_bins as f64
            + self.edge_sum
    }

    pub fn state(&self) -> MatchState {
        derive_state(self.graph, &self.labels, &self.prior).expect("lengths agree")
    }

    /// Score after flipping `flips` (each listed once), without mutating.
    /// `member` must be a vertex-indexed mask marking exactly the flip set.
    pub fn score_after(&self, flips: &[usize], member: &[bool]) -> f64 {
        let mut d_lik = 0.0;
        let mut d_edge = 0.0;
        let mut d_viol = self.violations as i64;
        let mut slot_delta: HashMap<usize, i64> = HashMap::new();
        let mut bin_delta: HashMap<i64, i64> = HashMap::new();

        for &v in flips {
            let vert = self.graph.vertex(v);
            let sign = if self.labels[v] { -1.0 } else { 1.0 };
            if let Some(d) = vert.appearance {
                d_lik += sign * -d;
            }
            if vert.target_idx.is_some() {
                *slot_delta.entry(self.graph.part_slot(v)).or_insert(0) += sign as i64;
                *bin_delta.entry(self.bin_of[v].unwrap()).or_insert(0) += sign as i64;
            }
            for &ei in self.graph.incident_edges(v) {
                let e = &self.graph.edges()[ei];
                let o = e.other(v);
                if member[o] && o < v {
                    continue; // counted when visiting the smaller endpoint
                }
                let before = self.labels[e.a] && self.labels[e.b];
                let after = if member[o] {
                    !self.labels[e.a] && !self.labels[e.b]
                } else {
                    !self.labels[v] && self.labels[o]
                };
                if before == after {
                    continue;
                }
                let delta = if after { 1.0 } else { -1.0 };
                if e.kind == EdgeKind::SamePart {
                    d_viol += delta as i64;
                } else {
                    d_edge += delta * e.log_term;
                }
            }
        }
        if d_viol > 0 {
            return f64::NEG_INFINITY;
        }
        let mut unmatched = self.unmatched as i64;
        for (&slot, &d) in &slot_delta {
            let before = self.part_active[slot] as i64;
            let after = before + d;
            unmatched += (after == 0) as i64 - (before == 0) as i64;
        }
        let mut distinct = self.distinct_bins as i64;
        for (&bin, &d) in &bin_delta {
            let before = self.bin_counts.get(&bin).copied().unwrap_or(0) as i64;
            let after = before + d;
            distinct += (after > 0) as i64 - (before > 0) as i64;
        }
        (self.likelihood + d_lik) - self.prior.alpha_u * unmatched as f64
            - self.prior.alpha_s * distinct as f64
            + (self.edge_sum + d_edge)
    }

    /// Flip the listed vertices in place, updating every running term.
    pub fn apply(&mut self, flips: &[usize], member: &[bool]) {
        for &v in flips {
            let vert = self.graph.vertex(v);
            let sign = if self.labels[v] { -1.0 } else { 1.0 };
            if let Some(d) = vert.appearance {
                self.likelihood += sign * -d;
            }
            if vert.target_idx.is_some() {
                let slot = self.graph.part_slot(v);
                let before = self.part_active[slot];
                let after = (before as i64 + sign as i64) as u32;
                self.part_active[slot] = after;
                if before == 0 && after > 0 {
                    self.unmatched -= 1;
                } else if before > 0 && after == 0 {
                    self.unmatched += 1;
                }
                let bin = self.bin_of[v].unwrap();
                let c = self.bin_counts.entry(bin).or_insert(0);
                let before = *c;
                let after = (before as i64 + sign as i64) as u32;
                *c = after;
                if before == 0 && after > 0 {
                    self.distinct_bins += 1;
                } else if before > 0 && after == 0 {
                    self.distinct_bins -= 1;
                    self.bin_counts.remove(&bin);
                }
            }
            for &ei in self.graph.incident_edges(v) {
                let e = &self.graph.edges()[ei];
                let o = e.other(v);
                if member[o] && o < v {
                    continue;
                }
                let before = self.labels[e.a] && self.labels[e.b];
                let after = if member[o] {
                    !self.labels[e.a] && !self.labels[e.b]
                } else {
                    !self.labels[v] && self.labels[o]
                };
                if before == after {
                    continue;
                }
                let delta: f64 = if after { 1.0 } else { -1.0 };
                if e.kind == EdgeKind::SamePart {
                    self.violations = (self.violations as i64 + delta as i64) as u32;
                } else {
                    self.edge_sum += delta * e.log_term;
                }
            }
        }
        for &v in flips {
            self.labels[v] = !self.labels[v];
        }
    }

    /// Flip a single vertex (convenience for enumeration walkers).
    pub fn flip_one(&mut self, v: usize, scratch: &mut [bool]) {
        scratch[v] = true;
        self.apply(&[v], scratch);
        scratch[v] = false;
    }
}
