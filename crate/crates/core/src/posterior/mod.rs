//! Scoring of labelings: appearance likelihood over activated matches plus a
//! structural prior over unmatched-part and scale counts and the edge
//! consistency terms. All scores are unnormalized log posteriors; forbidden
//! configurations (two active same-part vertices) score negative infinity.

mod tracker;

pub use tracker::ScoreTracker;

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::CandidacyGraph;

/// One binary label per graph vertex, indexed by vertex id.
pub type Labeling = Vec<bool>;

/// A labeling together with its derived counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchState {
    pub labeling: Labeling,
    /// Parts (among those present in the graph) with no active real match.
    pub unmatched_parts: usize,
    /// Distinct quantized log-scale levels among the active real matches.
    pub scale_levels: usize,
}

/// Prior weights. The defaults are the fixed operating point used
/// throughout: `alpha_u = 12`, `alpha_s = 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorParams {
    pub alpha_u: f64,
    pub alpha_s: f64,
    /// Width of one log-scale bin for the scale-count term.
    pub scale_quantum: f64,
}

impl Default for PriorParams {
    fn default() -> Self {
        PriorParams {
            alpha_u: 12.0,
            alpha_s: 3.0,
            scale_quantum: 0.1,
        }
    }
}

impl PriorParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_u < 0.0 || self.alpha_s < 0.0 {
            return Err(Error::contract("alpha_u and alpha_s must be non-negative"));
        }
        if !(self.scale_quantum > 0.0) {
            return Err(Error::contract("scale_quantum must be positive"));
        }
        Ok(())
    }

    pub fn scale_bin(&self, s: f64) -> i64 {
        (s.ln() / self.scale_quantum).floor() as i64
    }
}

/// Recompute the derived counts of a labeling.
pub fn derive_state(g: &CandidacyGraph, l: &[bool], p: &PriorParams) -> Result<MatchState> {
    if l.len() != g.vertex_count() {
        return Err(Error::contract(format!(
            "labeling length {} does not match vertex count {}",
            l.len(),
            g.vertex_count()
        )));
    }
    let mut part_matched = vec![false; g.parts_present().len()];
    let mut bins = std::collections::BTreeSet::new();
    for (i, v) in g.vertices().iter().enumerate() {
        if !l[i] {
            continue;
        }
        if let Some(s) = v.target_scale {
            part_matched[g.part_slot(i)] = true;
            bins.insert(p.scale_bin(s));
        }
    }
    Ok(MatchState {
        labeling: l.to_vec(),
        unmatched_parts: part_matched.iter().filter(|&&m| !m).count(),
        scale_levels: bins.len(),
    })
}

/// Log likelihood: minus the summed appearance distance of the activated
/// real matches. NULL vertices contribute nothing.
pub fn log_likelihood(g: &CandidacyGraph, l: &[bool]) -> f64 {
    let mut acc = 0.0;
    for (i, v) in g.vertices().iter().enumerate() {
        if l[i] {
            if let Some(d) = v.appearance {
                acc -= d;
            }
        }
    }
    acc
}

/// Log prior: count penalties plus the edge terms of co-activated pairs.
/// Returns negative infinity when two same-part vertices are both active.
pub fn log_prior(g: &CandidacyGraph, l: &[bool], p: &PriorParams) -> f64 {
    let state = match derive_state(g, l, p) {
        Ok(s) => s,
        Err(_) => return f64::NEG_INFINITY,
    };
    let mut acc = -p.alpha_u * state.unmatched_parts as f64 - p.alpha_s * state.scale_levels as f64;
    for e in g.edges() {
        if l[e.a] && l[e.b] {
            acc += e.log_term;
        }
    }
    acc
}

/// Unnormalized log posterior: likelihood plus prior.
pub fn log_posterior(g: &CandidacyGraph, l: &[bool], p: &PriorParams) -> f64 {
    let prior = log_prior(g, l, p);
    if prior == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    log_likelihood(g, l) + prior
}

/// Tab-separated score breakdown: the likelihood, each prior term and every
/// co-activated edge's contribution.
pub fn write_breakdown(
    g: &CandidacyGraph,
    l: &[bool],
    p: &PriorParams,
    w: &mut dyn Write,
) -> Result<()> {
    let state = derive_state(g, l, p)?;
    writeln!(w, "term\tvalue")?;
    writeln!(w, "log_likelihood\t{:.11e}", log_likelihood(g, l))?;
    writeln!(w, "unmatched_parts\t{}", state.unmatched_parts)?;
    writeln!(w, "scale_levels\t{}", state.scale_levels)?;
    writeln!(w, "alpha_u_term\t{:.11e}", -p.alpha_u * state.unmatched_parts as f64)?;
    writeln!(w, "alpha_s_term\t{:.11e}", -p.alpha_s * state.scale_levels as f64)?;
    for (i, e) in g.edges().iter().enumerate() {
        if l[e.a] && l[e.b] {
            writeln!(w, "edge_{}\t{}-{}\t{:?}\t{:.11e}", i, e.a, e.b, e.kind, e.log_term)?;
        }
    }
    writeln!(w, "log_posterior\t{:.11e}", log_posterior(g, l, p))?;
    Ok(())
}
