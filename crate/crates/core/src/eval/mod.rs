//! Evaluation: gallery ranking, CMC curves, PASCAL-style localization and
//! the greedy per-part baseline.

pub mod protocol;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::features::PartDistance;
use crate::graph::{CandidacyGraph, GraphParams, KinematicsModel};
use crate::model::{Aabb, BodyModel, PartType, Scene, Template};
use crate::posterior::{MatchState, PriorParams};
use crate::sampler::{Chain, ChainConfig, TraceRecord};

/// Everything a matching run needs besides the data itself.
#[derive(Debug, Clone)]
pub struct MatchOptions {
    pub graph: GraphParams,
    pub prior: PriorParams,
    pub chain: ChainConfig,
    /// Independent restarts; the best-scoring chain wins.
    pub chains: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            graph: GraphParams::default(),
            prior: PriorParams::default(),
            chain: ChainConfig::default(),
            chains: 1,
        }
    }
}

fn chain_seed(base: u64, restart: usize) -> u64 {
    base.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Result of matching one template into one scene.
#[derive(Debug, Clone)]
pub struct ShotMatch {
    pub state: MatchState,
    pub score: f64,
    /// Bounding box of the activated parts; `None` when nothing matched.
    pub bbox: Option<Aabb>,
    pub acceptance_rate: f64,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Tight axis-aligned box over the activated real matches' rectangles.
pub fn person_box(labeling: &[bool], g: &CandidacyGraph) -> Result<Aabb> {
    let mut bb = Aabb::empty();
    let mut any = false;
    for (i, v) in g.vertices().iter().enumerate() {
        if labeling[i] {
            if let Some(rect) = &v.target_rect {
                bb = bb.union(&rect.aabb());
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::NoDetection);
    }
    Ok(bb)
}

/// PASCAL criterion: correct iff the axis-aligned IoU strictly exceeds 0.5.
pub fn pascal_match(pred: &Aabb, gt: &Aabb) -> bool {
    pred.iou(gt) > 0.5
}

/// Build the candidacy graph, run the configured chains and report the best
/// state with its localization box.
pub fn match_in_shot(
    template: &Template,
    scene: &Scene,
    km: &KinematicsModel,
    opts: &MatchOptions,
    dist: &PartDistance,
) -> Result<ShotMatch> {
    let graph = CandidacyGraph::build(template, scene, km, &opts.graph, dist)?;
    let mut best: Option<crate::sampler::ChainResult> = None;
    for k in 0..opts.chains.max(1) {
        let mut cfg = opts.chain.clone();
        cfg.seed = chain_seed(opts.chain.seed, k);
        let run = Chain::new(&graph, opts.prior, cfg)?.run();
        let better = match &best {
            None => true,
            Some(b) => run.best_score > b.best_score,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one chain");
    let bbox = person_box(&best.best_labeling, &graph).ok();
    Ok(ShotMatch {
        state: best.best_state,
        score: best.best_score,
        bbox,
        acceptance_rate: best.acceptance_rate,
        trace: best.trace,
    })
}

/// A query's gallery ordering, best match first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub query_id: String,
    /// (gallery id, score), scores non-increasing; ties sorted by id.
    pub ranking: Vec<(String, f64)>,
}

impl RankedResult {
    pub fn rank_of(&self, gallery_id: &str) -> Option<usize> {
        self.ranking
            .iter()
            .position(|(id, _)| id == gallery_id)
            .map(|i| i + 1)
    }
}

/// Score the template against every gallery scene (best log posterior) and
/// sort descending. Items whose graph cannot be built are kept with a score
/// of negative infinity.
pub fn rank_gallery(
    query_id: &str,
    template: &Template,
    gallery: &[(String, Scene)],
    km: &KinematicsModel,
    opts: &MatchOptions,
    dist: &PartDistance,
) -> Result<RankedResult> {
    if gallery.is_empty() {
        return Err(Error::contract("gallery must not be empty"));
    }
    let mut ranking: Vec<(String, f64)> = Vec::with_capacity(gallery.len());
    for (id, scene) in gallery {
        let score = match match_in_shot(template, scene, km, opts, dist) {
            Ok(m) => m.score,
            Err(_) => f64::NEG_INFINITY,
        };
        ranking.push((id.clone(), score));
    }
    ranking.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(RankedResult {
        query_id: query_id.to_string(),
        ranking,
    })
}

/// Cumulative match characteristic curve: rates[r-1] is the fraction of
/// queries whose true gallery item appears within the first r ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct CmcCurve {
    pub rates: Vec<f64>,
}

impl CmcCurve {
    pub fn rank_1(&self) -> f64 {
        self.rates.first().copied().unwrap_or(0.0)
    }
}

pub fn cmc(results: &[RankedResult], truth: &HashMap<String, String>) -> Result<CmcCurve> {
    if results.is_empty() {
        return Err(Error::contract("no ranked results"));
    }
    let max_rank = results.iter().map(|r| r.ranking.len()).max().unwrap_or(0);
    let mut hits = vec![0usize; max_rank];
    for r in results {
        let gt = truth
            .get(&r.query_id)
            .ok_or_else(|| Error::contract(format!("query {} has no ground truth", r.query_id)))?;
        if let Some(rank) = r.rank_of(gt) {
            hits[rank - 1] += 1;
        }
    }
    let n = results.len() as f64;
    let mut acc = 0usize;
    let rates = hits
        .iter()
        .map(|&h| {
            acc += h;
            acc as f64 / n
        })
        .collect();
    Ok(CmcCurve { rates })
}

/// Greedy per-part baseline: for every part, activate the appearance-closest
/// (template proposal, scene proposal) pair, ignoring geometry and the
/// unmatched option. Returns the implied localization box.
#[derive(Debug, Clone)]
pub struct GreedyMatch {
    /// Per part: (template index, scene index, distance).
    pub chosen: [Option<(usize, usize, f64)>; crate::model::PART_COUNT],
    pub bbox: Option<Aabb>,
}

pub fn greedy_match(
    template: &Template,
    scene: &Scene,
    body: &BodyModel,
    dist: &PartDistance,
) -> Result<GreedyMatch> {
    let mut chosen = [None; crate::model::PART_COUNT];
    let mut bbox = Aabb::empty();
    let mut any = false;
    for &part in &PartType::ALL {
        let mut best: Option<(usize, usize, f64)> = None;
        for (ti, tp) in template.proposals_of(part).iter().enumerate() {
            let td = tp.descriptor()?;
            for (gi, gp) in scene.proposals_of(part).iter().enumerate() {
                let d = dist.eval(td, gp.descriptor()?)?;
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((ti, gi, d));
                }
            }
        }
        if let Some((_, gi, _)) = best {
            let rect = body.rect_of(&scene.proposals_of(part)[gi], template.person_height)?;
            bbox = bbox.union(&rect.aabb());
            any = true;
        }
        chosen[part.index()] = best;
    }
    Ok(GreedyMatch {
        chosen,
        bbox: if any { Some(bbox) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CandidacyGraph, Edge, EdgeKind, Vertex};
    use crate::model::OrientedRect;

    #[test]
    fn pascal_branches() {
        let a = Aabb::from_corners([0.0, 0.0], [10.0, 10.0]);
        assert!(pascal_match(&a, &a));
        // Exactly 0.5 fails the strict criterion: boxes 10x10 and the same
        // box widened to 20x10 share IoU 0.5.
        let wide = Aabb::from_corners([0.0, 0.0], [20.0, 10.0]);
        assert!((a.iou(&wide) - 0.5).abs() < 1e-12);
        assert!(!pascal_match(&a, &wide));
        assert!(!pascal_match(&wide, &a), "criterion is symmetric");
        // The 1/3 overlap fixture fails as well.
        let b = Aabb::from_corners([5.0, 0.0], [15.0, 10.0]);
        assert!(!pascal_match(&a, &b));
    }

    #[test]
    fn person_box_unions_active_rects() {
        let r1 = OrientedRect::new([5.0, 5.0], 10.0, 10.0, 0.0);
        let r2 = OrientedRect::new([50.0, 5.0], 10.0, 10.0, 0.0);
        let vertices = vec![
            Vertex::real(PartType::Head, 0, 0, 0.1, 1.0, Some(r1)),
            Vertex::real(PartType::Torso, 0, 0, 0.1, 1.0, Some(r2)),
            Vertex::null(PartType::Head, 0),
        ];
        let edges = vec![Edge::new(0, 2, EdgeKind::SamePart, 1.0)];
        let g = CandidacyGraph::new(vertices, edges).unwrap();
        let bb = person_box(&[true, false, false], &g).unwrap();
        assert_eq!(bb, Aabb::from_corners([0.0, 0.0], [10.0, 10.0]));
        let bb = person_box(&[true, true, false], &g).unwrap();
        assert_eq!(bb, Aabb::from_corners([0.0, 0.0], [55.0, 10.0]));
        // Adding a part never shrinks the box.
        assert!(bb.area() >= 100.0);
        assert!(matches!(
            person_box(&[false, false, true], &g),
            Err(Error::NoDetection)
        ));
    }

    #[test]
    fn cmc_hand_computed() {
        let mk = |q: &str, order: &[&str]| RankedResult {
            query_id: q.into(),
            ranking: order
                .iter()
                .enumerate()
                .map(|(i, id)| (id.to_string(), -(i as f64)))
                .collect(),
        };
        // True ids found at ranks 1, 2 and 5 in a gallery of 5.
        let results = vec![
            mk("q0", &["a", "b", "c", "d", "e"]),
            mk("q1", &["b", "a", "c", "d", "e"]),
            mk("q2", &["b", "c", "d", "e", "a"]),
        ];
        let truth: HashMap<String, String> = [("q0", "a"), ("q1", "a"), ("q2", "a")]
            .iter()
            .map(|(q, g)| (q.to_string(), g.to_string()))
            .collect();
        let curve = cmc(&results, &truth).unwrap();
        let expect = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0];
        for (r, e) in curve.rates.iter().zip(expect.iter()) {
            assert!((r - e).abs() < 1e-12, "{:?}", curve.rates);
        }
        assert!(curve.rates.windows(2).all(|w| w[0] <= w[1]));
        // Missing ground truth is a contract violation.
        let missing: HashMap<String, String> = HashMap::new();
        assert!(cmc(&results, &missing).is_err());
    }

    #[test]
    fn perfect_results_give_flat_one() {
        let results = vec![RankedResult {
            query_id: "q".into(),
            ranking: vec![("g".into(), 1.0), ("h".into(), 0.0)],
        }];
        let truth: HashMap<String, String> = [("q".to_string(), "g".to_string())].into();
        let curve = cmc(&results, &truth).unwrap();
        assert_eq!(curve.rates, vec![1.0, 1.0]);
    }
}
