//! The candidacy graph: one vertex per candidate (template proposal, scene
//! proposal) match, positive edges for kinematic/symmetry compatibility and
//! negative edges for same-part exclusion and spatial overlap.

mod kinematics;

pub use kinematics::{fit_kinematics, joint_displacement, Annotation, JointStats, KinematicsModel};

use std::io::Write;

use crate::error::{Error, Result};
use crate::features::PartDistance;
use crate::model::{iou, Joint, OrientedRect, PartType, Scene, Template};

pub type VertexId = usize;

/// A candidate match: one template proposal of a part paired with either a
/// scene proposal of the same part or with nothing (a NULL-target vertex,
/// representing an occluded or missed part).
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub part: PartType,
    pub template_idx: usize,
    /// Index into the scene's per-part list; `None` marks a NULL target.
    pub target_idx: Option<usize>,
    /// Cached appearance distance between the two proposals; `None` for
    /// NULL-target vertices.
    pub appearance: Option<f64>,
    /// Cached target scale, used for the scale-consistency prior.
    pub target_scale: Option<f64>,
    /// Cached target rectangle, used for overlap edges and localization.
    pub target_rect: Option<OrientedRect>,
}

impl Vertex {
    pub fn real(
        part: PartType,
        template_idx: usize,
        target_idx: usize,
        appearance: f64,
        target_scale: f64,
        target_rect: Option<OrientedRect>,
    ) -> Vertex {
        Vertex {
            part,
            template_idx,
            target_idx: Some(target_idx),
            appearance: Some(appearance),
            target_scale: Some(target_scale),
            target_rect,
        }
    }

    pub fn null(part: PartType, template_idx: usize) -> Vertex {
        Vertex {
            part,
            template_idx,
            target_idx: None,
            appearance: None,
            target_scale: None,
            target_rect: None,
        }
    }

    pub fn is_null(&self) -> bool {
        self.target_idx.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// Compatible: the parts are kinematically adjacent.
    Kinematic,
    /// Compatible: the parts are left/right symmetric.
    Symmetry,
    /// Competitive: the vertices belong to the same part (hard exclusion).
    SamePart,
    /// Competitive: the target rectangles overlap spatially.
    Overlap,
}

impl EdgeKind {
    pub fn is_positive(self) -> bool {
        matches!(self, EdgeKind::Kinematic | EdgeKind::Symmetry)
    }
}

/// A typed probabilistic edge. `log_term` is the edge's contribution to the
/// log prior when both endpoints are active: `ln p` for positive edges and
/// `ln(1 - p)` for negative edges (negative infinity for same-part edges).
/// Keeping the logarithm explicitly avoids underflow for strong kinematic
/// penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub kind: EdgeKind,
    pub prob: f64,
    pub log_term: f64,
}

impl Edge {
    /// Build an edge from its probability, deriving the log contribution.
    pub fn new(a: VertexId, b: VertexId, kind: EdgeKind, prob: f64) -> Edge {
        let log_term = if kind.is_positive() {
            prob.ln()
        } else if prob >= 1.0 {
            f64::NEG_INFINITY
        } else {
            (-prob).ln_1p()
        };
        Edge {
            a,
            b,
            kind,
            prob,
            log_term,
        }
    }

    /// Build an edge with an exact log contribution (e.g. `-lambda * IoU`
    /// for overlap edges), keeping `prob` and `log_term` consistent.
    pub fn with_log_term(a: VertexId, b: VertexId, kind: EdgeKind, prob: f64, log_term: f64) -> Edge {
        Edge {
            a,
            b,
            kind,
            prob,
            log_term,
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Scaling parameters of graph construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    /// Scale of the overlap penalty: overlap edges carry 1 - exp(-lambda*IoU).
    pub lambda: f64,
    /// Pruning floor for overlap and symmetry edges. Kinematic and same-part
    /// edges are structural and always kept: dropping a near-zero kinematic
    /// edge would silently remove the mis-articulation penalty.
    pub min_edge_prob: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            lambda: 10.0,
            min_edge_prob: 1e-4,
        }
    }
}

/// Probability of a competitive edge: 1 for same-part pairs (hard mutual
/// exclusion), `1 - exp(-lambda * IoU)` for overlapping different-part
/// pairs, 0 (no edge) for disjoint pairs.
pub fn competitive_prob(
    a_part: PartType,
    b_part: PartType,
    a_rect: Option<&OrientedRect>,
    b_rect: Option<&OrientedRect>,
    params: &GraphParams,
) -> f64 {
    if a_part == b_part {
        return 1.0;
    }
    match (a_rect, b_rect) {
        (Some(ra), Some(rb)) => {
            let overlap = iou(ra, rb);
            if overlap <= 0.0 {
                0.0
            } else {
                1.0 - (-params.lambda * overlap).exp()
            }
        }
        _ => 0.0,
    }
}

/// The candidacy graph. Immutable after construction; vertex and edge order
/// is canonical (sorted by part, then indices) so identical inputs always
/// produce the identical graph.
#[derive(Debug, Clone)]
pub struct CandidacyGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Edge indices incident to each vertex.
    adjacency: Vec<Vec<usize>>,
    /// Parts that own at least one vertex, in canonical order.
    parts_present: Vec<PartType>,
    /// Dense slot into `parts_present` for each vertex.
    part_slot: Vec<usize>,
}

impl CandidacyGraph {
    /// Low-level constructor, used by tests, fixtures and dump loading.
    /// Validates edge endpoints, kinds and probability ranges.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<CandidacyGraph> {
        for v in &vertices {
            if v.is_null() && v.appearance.is_some() {
                return Err(Error::contract("NULL vertex with an appearance distance"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.a >= vertices.len() || e.b >= vertices.len() {
                return Err(Error::contract("edge endpoint out of range"));
            }
            if e.a == e.b {
                return Err(Error::contract("self-loop edge"));
            }
            if !(0.0..=1.0).contains(&e.prob) {
                return Err(Error::contract(format!("edge probability {} out of range", e.prob)));
            }
            let key = (e.a.min(e.b), e.a.max(e.b), e.kind);
            if !seen.insert(key) {
                return Err(Error::contract("duplicate edge for a (pair, kind)"));
            }
            let (pa, pb) = (vertices[e.a].part, vertices[e.b].part);
            let ok = match e.kind {
                EdgeKind::SamePart => pa == pb,
                EdgeKind::Kinematic => pa.is_adjacent(pb),
                EdgeKind::Symmetry => pa.symmetry_partner() == Some(pb),
                EdgeKind::Overlap => pa != pb,
            };
            if !ok {
                return Err(Error::contract(format!(
                    "{:?} edge between {:?} and {:?}",
                    e.kind, pa, pb
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push(i);
            adjacency[e.b].push(i);
        }
        let mut parts_present: Vec<PartType> = Vec::new();
        for &p in &PartType::ALL {
            if vertices.iter().any(|v| v.part == p) {
                parts_present.push(p);
            }
        }
        let part_slot = vertices
            .iter()
            .map(|v| parts_present.iter().position(|&p| p == v.part).unwrap())
            .collect();
        Ok(CandidacyGraph {
            vertices,
            edges,
            adjacency,
            parts_present,
            part_slot,
        })
    }

    /// Build the graph from a template and a scene: for each part, every
    /// (template proposal, scene proposal) pair plus one NULL-target vertex
    /// per template proposal. Kinematic edges are materialized for every
    /// adjacent-part pair of real vertices (exact in log space); symmetry
    /// and overlap edges below `min_edge_prob` are dropped.
    pub fn build(
        template: &Template,
        scene: &Scene,
        km: &KinematicsModel,
        params: &GraphParams,
        dist: &PartDistance,
    ) -> Result<CandidacyGraph> {
        template.validate()?;
        let height = template.person_height;

        let mut vertices = Vec::new();
        for &part in &PartType::ALL {
            let t_list = template.proposals_of(part);
            let g_list = scene.proposals_of(part);
            for (ti, tp) in t_list.iter().enumerate() {
                let t_desc = tp.descriptor()?;
                for (gi, gp) in g_list.iter().enumerate() {
                    let d = dist.eval(t_desc, gp.descriptor()?)?;
                    let rect = km.body.rect_of(gp, height)?;
                    vertices.push(Vertex::real(part, ti, gi, d, gp.s, Some(rect)));
                }
                vertices.push(Vertex::null(part, ti));
            }
        }

        let mut edges = Vec::new();
        // Same-part exclusion between every pair of vertices of one part.
        let mut by_part: Vec<Vec<VertexId>> = vec![Vec::new(); PartType::ALL.len()];
        for (i, v) in vertices.iter().enumerate() {
            by_part[v.part.index()].push(i);
        }
        for ids in &by_part {
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len() {
                    edges.push(Edge::with_log_term(
                        ids[i],
                        ids[j],
                        EdgeKind::SamePart,
                        1.0,
                        f64::NEG_INFINITY,
                    ));
                }
            }
        }

        // Kinematic edges between real vertices of adjacent parts.
        for joint in Joint::all() {
            let parents = &by_part[joint.parent().index()];
            let children = &by_part[joint.child().index()];
            for &pi in parents {
                let Some(p_gi) = vertices[pi].target_idx else { continue };
                let pp = &scene.proposals_of(joint.parent())[p_gi];
                for &ci in children {
                    let Some(c_gi) = vertices[ci].target_idx else { continue };
                    let cp = &scene.proposals_of(joint.child())[c_gi];
                    let log_p = km.pair_log_prob(pp, cp)?;
                    edges.push(Edge::with_log_term(
                        pi,
                        ci,
                        EdgeKind::Kinematic,
                        log_p.exp(),
                        log_p,
                    ));
                }
            }
        }

        // Symmetry edges between real vertices of mirrored parts, weighted
        // by the appearance distance of the two target proposals.
        for &part in &PartType::ALL {
            let Some(partner) = part.symmetry_partner() else { continue };
            if part.index() > partner.index() {
                continue;
            }
            for &i in &by_part[part.index()] {
                let Some(gi) = vertices[i].target_idx else { continue };
                let di = scene.proposals_of(part)[gi].descriptor()?;
                for &j in &by_part[partner.index()] {
                    let Some(gj) = vertices[j].target_idx else { continue };
                    let dj = scene.proposals_of(partner)[gj].descriptor()?;
                    let d = dist.eval(di, dj)?;
                    let prob = (-d).exp();
                    if prob < params.min_edge_prob {
                        continue;
                    }
                    edges.push(Edge::with_log_term(i, j, EdgeKind::Symmetry, prob, -d));
                }
            }
        }

        // Overlap edges between real vertices of different parts.
        for i in 0..vertices.len() {
            let Some(ri) = &vertices[i].target_rect else { continue };
            for j in (i + 1)..vertices.len() {
                if vertices[i].part == vertices[j].part {
                    continue;
                }
                let Some(rj) = &vertices[j].target_rect else { continue };
                let overlap = iou(ri, rj);
                if overlap <= 0.0 {
                    continue;
                }
                let prob = 1.0 - (-params.lambda * overlap).exp();
                if prob < params.min_edge_prob {
                    continue;
                }
                edges.push(Edge::with_log_term(
                    i,
                    j,
                    EdgeKind::Overlap,
                    prob,
                    -params.lambda * overlap,
                ));
            }
        }

        edges.sort_by_key(|e| (e.a.min(e.b), e.a.max(e.b), e.kind));
        CandidacyGraph::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incident_edges(&self, v: VertexId) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn parts_present(&self) -> &[PartType] {
        &self.parts_present
    }

    pub fn part_slot(&self, v: VertexId) -> usize {
        self.part_slot[v]
    }

    /// Debug dump: a vertex table and an edge table as tab-separated text
    /// with probabilities at 12 significant digits.
    pub fn write_dump(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "vertex\tpart\ttemplate\ttarget\tappearance\tscale")?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                i,
                v.part.name(),
                v.template_idx,
                v.target_idx.map_or("-".into(), |t| t.to_string()),
                v.appearance.map_or("-".into(), |d| format!("{:.11e}", d)),
                v.target_scale.map_or("-".into(), |s| format!("{:.11e}", s)),
            )?;
        }
        writeln!(w, "edge\ta\tb\tkind\tprob\tlog_term")?;
        for e in &self.edges {
            let kind = match e.kind {
                EdgeKind::Kinematic => "kinematic+",
                EdgeKind::Symmetry => "symmetry+",
                EdgeKind::SamePart => "same-part-",
                EdgeKind::Overlap => "overlap-",
            };
            writeln!(
                w,
                "\t{}\t{}\t{}\t{:.11e}\t{:.11e}",
                e.a, e.b, kind, e.prob, e.log_term
            )?;
        }
        Ok(())
    }
}
