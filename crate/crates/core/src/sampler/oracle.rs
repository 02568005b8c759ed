//! Exact enumeration oracles: brute-force MAP and the normalized posterior
//! over all labelings of small graphs, walked in Gray-code order with
//! incremental rescoring.

use crate::error::{Error, Result};
use crate::graph::CandidacyGraph;
use crate::posterior::{Labeling, PriorParams, ScoreTracker};

const MAP_LIMIT: usize = 24;
const ENUM_LIMIT: usize = 16;
/// Rebuild the incremental tracker periodically to stop rounding drift.
const RESYNC_PERIOD: u64 = 1 << 12;

/// Pack a labeling into a bitmask: bit i carries the label of vertex i.
pub fn labels_to_mask(labels: &[bool]) -> u32 {
    labels
        .iter()
        .enumerate()
        .fold(0u32, |m, (i, &l)| m | ((l as u32) << i))
}

/// Exhaustive MAP: the labeling with the highest log posterior over all
/// 2^|C| labelings, ties broken by the lexicographically smallest labeling.
pub fn oracle_map(g: &CandidacyGraph, p: &PriorParams) -> Result<(Labeling, f64)> {
    let n = g.vertex_count();
    if n > MAP_LIMIT {
        return Err(Error::SizeLimit {
            vertices: n,
            limit: MAP_LIMIT,
        });
    }
    let mut tracker = ScoreTracker::new(g, *p, vec![false; n]);
    let mut scratch = vec![false; n];
    let mut best_labels = vec![false; n];
    let mut best = tracker.score();
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        tracker.flip_one(bit, &mut scratch);
        if k % RESYNC_PERIOD == 0 {
            tracker = ScoreTracker::new(g, *p, tracker.labels().to_vec());
        }
        let score = tracker.score();
        if score > best || (score == best && tracker.labels() < &best_labels[..]) {
            best = score;
            best_labels.clear();
            best_labels.extend_from_slice(tracker.labels());
        }
    }
    Ok((best_labels, best))
}

/// Normalized posterior over all labelings, indexed by bitmask (see
/// [`labels_to_mask`]). Forbidden labelings get probability zero.
pub fn enumerate_posterior(g: &CandidacyGraph, p: &PriorParams) -> Result<Vec<f64>> {
    let n = g.vertex_count();
    if n > ENUM_LIMIT {
        return Err(Error::SizeLimit {
            vertices: n,
            limit: ENUM_LIMIT,
        });
    }
    let mut tracker = ScoreTracker::new(g, *p, vec![false; n]);
    let mut scratch = vec![false; n];
    let mut log_w = vec![f64::NEG_INFINITY; 1usize << n];
    let mut mask = 0u32;
    log_w[0] = tracker.score();
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        tracker.flip_one(bit, &mut scratch);
        if k % RESYNC_PERIOD == 0 {
            tracker = ScoreTracker::new(g, *p, tracker.labels().to_vec());
        }
        mask ^= 1 << bit;
        log_w[mask as usize] = tracker.score();
    }
    // Log-sum-exp normalization.
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::contract("every labeling is forbidden"));
    }
    let mut probs: Vec<f64> = log_w.iter().map(|&w| (w - max).exp()).collect();
    let z: f64 = probs.iter().sum();
    for q in &mut probs {
        *q /= z;
    }
    Ok(probs)
}
