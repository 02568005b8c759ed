//! Template and scene construction from raw detector proposals: foreground
//! pruning, strip filtering, non-maximum suppression, top-K selection and
//! appearance deduplication.

mod mask;

pub use mask::ForegroundMask;

use crate::error::{Error, Result};
use crate::features::PartDistance;
use crate::model::{empty_part_lists, iou, BodyModel, PartProposal, PartType, Scene, Template};

/// Knobs of the template/scene construction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    /// Maximum proposals kept per template part.
    pub k: usize,
    /// Minimum fraction of a proposal's rectangle that must be foreground.
    pub fg_overlap_min: f64,
    /// NMS suppression threshold; 1.0 disables suppression.
    pub nms_iou: f64,
    /// When set, drop template proposals whose appearance distance to an
    /// already kept one falls below this value.
    pub dedup_distance: Option<f64>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            k: 4,
            fg_overlap_min: 0.75,
            nms_iou: 0.5,
            dedup_distance: None,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::contract("K must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.fg_overlap_min) {
            return Err(Error::contract("fg_overlap_min must lie in [0, 1]"));
        }
        if !(self.nms_iou > 0.0 && self.nms_iou <= 1.0) {
            return Err(Error::contract("nms_iou must lie in (0, 1]"));
        }
        if let Some(d) = self.dedup_distance {
            if d < 0.0 {
                return Err(Error::contract("dedup_distance must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Keep proposals whose rectangle overlaps the foreground mask by at least
/// `min_overlap` (fraction of covered pixels that are foreground).
pub fn prune_by_foreground(
    props: &[PartProposal],
    mask: &ForegroundMask,
    min_overlap: f64,
    body: &BodyModel,
    person_height: f64,
) -> Vec<PartProposal> {
    props
        .iter()
        .filter(|p| match body.rect_of(p, person_height) {
            Ok(rect) => mask.coverage(&rect) >= min_overlap,
            Err(_) => false,
        })
        .cloned()
        .collect()
}

/// Keep proposals whose center falls in the horizontal strip assigned to
/// their part: strip = floor(4 y / height), clamped to 0..3.
pub fn strip_filter(props: &[PartProposal], image_height: u32) -> Vec<PartProposal> {
    let h = image_height as f64;
    props
        .iter()
        .filter(|p| {
            let strip = ((4.0 * p.y / h).floor() as i64).clamp(0, 3) as usize;
            strip == p.part.strip_index()
        })
        .cloned()
        .collect()
}

fn nms_order(props: &mut [PartProposal]) {
    props.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.source_id.cmp(&b.source_id))
            .then_with(|| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Greedy non-maximum suppression over proposals of a single part type.
/// Proposals are visited in descending score (ties broken by source id, x,
/// then y); a proposal is suppressed when its IoU with an already kept one
/// exceeds `iou_thresh`.
pub fn nms(
    props: &[PartProposal],
    iou_thresh: f64,
    body: &BodyModel,
    person_height: f64,
) -> Vec<PartProposal> {
    let mut sorted: Vec<PartProposal> = props.to_vec();
    nms_order(&mut sorted);
    let mut kept: Vec<PartProposal> = Vec::new();
    let mut kept_rects = Vec::new();
    for p in sorted {
        let rect = match body.rect_of(&p, person_height) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let clash = kept_rects.iter().any(|kr| iou(kr, &rect) > iou_thresh);
        if !clash {
            kept.push(p);
            kept_rects.push(rect);
        }
    }
    kept
}

fn dedup_by_appearance(
    props: &[PartProposal],
    min_distance: f64,
    dist: &PartDistance,
) -> Result<Vec<PartProposal>> {
    if min_distance <= 0.0 {
        return Ok(props.to_vec());
    }
    let mut kept: Vec<PartProposal> = Vec::new();
    for p in props {
        let d_p = p.descriptor()?;
        let mut redundant = false;
        for k in &kept {
            if dist.eval(d_p, k.descriptor()?)? < min_distance {
                redundant = true;
                break;
            }
        }
        if !redundant {
            kept.push(p.clone());
        }
    }
    Ok(kept)
}

/// One reference image's worth of detector output.
#[derive(Debug, Clone)]
pub struct ReferenceInput {
    pub proposals: Vec<PartProposal>,
    pub mask: ForegroundMask,
}

/// Build the multi-instance template from several reference images.
///
/// Per part: foreground pruning and strip filtering per reference, then NMS
/// pooled across references, top-K by score, and optional appearance
/// deduplication. Errors when any part ends up with no proposal.
pub fn build_template(
    references: &[ReferenceInput],
    cfg: &BuildConfig,
    body: &BodyModel,
    person_height: f64,
    dist: &PartDistance,
) -> Result<Template> {
    cfg.validate()?;
    if references.is_empty() {
        return Err(Error::contract("at least one reference image is required"));
    }
    let mut pooled = empty_part_lists();
    for reference in references {
        let surviving = prune_by_foreground(
            &reference.proposals,
            &reference.mask,
            cfg.fg_overlap_min,
            body,
            person_height,
        );
        let surviving = strip_filter(&surviving, reference.mask.height);
        for p in surviving {
            pooled[p.part.index()].push(p);
        }
    }
    let mut parts = empty_part_lists();
    for &part in &PartType::ALL {
        let mut list = nms(&pooled[part.index()], cfg.nms_iou, body, person_height);
        list.truncate(cfg.k);
        if let Some(d) = cfg.dedup_distance {
            list = dedup_by_appearance(&list, d, dist)?;
        }
        if list.is_empty() {
            return Err(Error::TemplateIncomplete(part));
        }
        parts[part.index()] = list;
    }
    Ok(Template {
        parts,
        person_height,
    })
}

/// Build the target proposal set for a scene shot: foreground pruning only
/// (no strip filter, no top-K), plus per-part NMS to bound the candidacy
/// graph size. Pass `nms_iou = 1.0` in the config to disable suppression.
pub fn build_scene(
    props: &[PartProposal],
    mask: Option<&ForegroundMask>,
    image_size: (u32, u32),
    cfg: &BuildConfig,
    body: &BodyModel,
    person_height: f64,
) -> Result<Scene> {
    cfg.validate()?;
    let mut per_part = empty_part_lists();
    let surviving: Vec<PartProposal> = match mask {
        Some(m) => prune_by_foreground(props, m, cfg.fg_overlap_min, body, person_height),
        None => props.to_vec(),
    };
    for p in surviving {
        per_part[p.part.index()].push(p);
    }
    let mut scene = Scene::new(image_size);
    for &part in &PartType::ALL {
        scene.proposals[part.index()] = nms(&per_part[part.index()], cfg.nms_iou, body, person_height);
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Descriptor, Histogram};

    fn body() -> BodyModel {
        BodyModel::default()
    }

    fn prop(part: PartType, x: f64, y: f64, score: f64) -> PartProposal {
        PartProposal {
            part,
            x,
            y,
            theta: 0.0,
            s: 1.0,
            score,
            descriptor: None,
            source_id: "img0".into(),
        }
    }

    #[test]
    fn foreground_prune_all_ones_and_all_zeros() {
        let props = vec![prop(PartType::Head, 50.0, 20.0, 1.0)];
        let ones = ForegroundMask::filled(100, 200, true);
        let zeros = ForegroundMask::filled(100, 200, false);
        assert_eq!(prune_by_foreground(&props, &ones, 0.75, &body(), 100.0).len(), 1);
        assert!(prune_by_foreground(&props, &zeros, 0.75, &body(), 100.0).is_empty());
    }

    #[test]
    fn foreground_prune_half_covered_rect() {
        // Foreground on the left half only; a head rect centered on the
        // split covers 50% < 75% and must be pruned.
        let mut mask = ForegroundMask::filled(200, 200, false);
        for y in 0..200 {
            for x in 0..100 {
                mask.set(x, y, true);
            }
        }
        let props = vec![prop(PartType::Head, 100.0, 100.0, 1.0)];
        assert!(prune_by_foreground(&props, &mask, 0.75, &body(), 100.0).is_empty());
        assert_eq!(prune_by_foreground(&props, &mask, 0.5, &body(), 100.0).len(), 1);
    }

    #[test]
    fn strip_filter_head_positions() {
        let keep = prop(PartType::Head, 10.0, 0.1 * 200.0, 1.0);
        let drop = prop(PartType::Head, 10.0, 0.9 * 200.0, 1.0);
        let out = strip_filter(&[keep, drop], 200);
        assert_eq!(out.len(), 1);
        assert!((out[0].y - 20.0).abs() < 1e-12);
    }

    #[test]
    fn strip_filter_boundary_goes_to_upper_strip_index() {
        // y exactly height/4 -> floor gives strip 1, which is the torso strip.
        let torso = prop(PartType::Torso, 10.0, 50.0, 1.0);
        let out = strip_filter(&[torso], 200);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn nms_keeps_best_of_identical_rects() {
        let a = prop(PartType::Head, 50.0, 50.0, 0.9);
        let b = prop(PartType::Head, 50.0, 50.0, 0.8);
        let out = nms(&[b, a], 0.5, &body(), 100.0);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].score, 0.9);
    }

    #[test]
    fn nms_chain_keeps_ends() {
        // A overlaps B, B overlaps C, A disjoint from C; scores A > B > C.
        // Head rects are 16x16 at height 100.
        let a = prop(PartType::Head, 50.0, 50.0, 0.9);
        let b = prop(PartType::Head, 60.0, 50.0, 0.8);
        let c = prop(PartType::Head, 70.0, 50.0, 0.7);
        let out = nms(&[a.clone(), b, c.clone()], 0.2, &body(), 100.0);
        let xs: Vec<f64> = out.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![50.0, 70.0]);
    }

    #[test]
    fn nms_threshold_one_disables_suppression() {
        let a = prop(PartType::Head, 50.0, 50.0, 0.9);
        let b = prop(PartType::Head, 50.0, 50.0, 0.8);
        let out = nms(&[a, b], 1.0, &body(), 100.0);
        assert_eq!(out.len(), 2);
    }

    // Reference frame used by the builder tests: a 175-px person centered in
    // a 300x210 image, torso at y = 63.875 so every part sits inside its
    // strip (strip boundaries at 52.5, 105 and 157.5).
    const REF_HEIGHT: f64 = 175.0;
    const REF_IMAGE: (u32, u32) = (300, 210);

    fn full_reference() -> ReferenceInput {
        let b = body();
        let centers = b.canonical_pose([150.0, 0.365 * REF_HEIGHT], REF_HEIGHT);
        let mut proposals = Vec::new();
        for &part in &PartType::ALL {
            let c = centers[part.index()];
            proposals.push(prop(part, c[0], c[1], 1.0));
        }
        ReferenceInput {
            proposals,
            mask: ForegroundMask::filled(REF_IMAGE.0, REF_IMAGE.1, true),
        }
    }

    #[test]
    fn build_template_single_clean_reference() {
        let reference = full_reference();
        let t = build_template(
            &[reference],
            &BuildConfig::default(),
            &body(),
            REF_HEIGHT,
            &PartDistance::default(),
        )
        .unwrap();
        t.validate().unwrap();
        for &part in &PartType::ALL {
            assert_eq!(t.proposals_of(part).len(), 1, "{part:?}");
        }
    }

    #[test]
    fn build_template_caps_at_k_with_top_scores() {
        let mut refs = Vec::new();
        for i in 0..3 {
            let mut r = full_reference();
            for p in r.proposals.iter_mut() {
                p.score = 0.5 + 0.1 * i as f64;
                p.source_id = format!("img{i}");
                // Spread the copies so NMS does not merge them.
                p.x += (i as f64) * 50.0;
            }
            refs.push(r);
        }
        let cfg = BuildConfig {
            k: 2,
            ..BuildConfig::default()
        };
        let t = build_template(&refs, &cfg, &body(), REF_HEIGHT, &PartDistance::default()).unwrap();
        for &part in &PartType::ALL {
            let list = t.proposals_of(part);
            assert!(list.len() <= 2);
            for p in list {
                assert!(p.score >= 0.6, "kept a low scorer: {}", p.score);
            }
        }
    }

    #[test]
    fn build_template_names_missing_part() {
        let mut reference = full_reference();
        reference.proposals.retain(|p| p.part != PartType::LeftCalf);
        let err = build_template(
            &[reference],
            &BuildConfig::default(),
            &body(),
            REF_HEIGHT,
            &PartDistance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::TemplateIncomplete(PartType::LeftCalf)));
    }

    #[test]
    fn dedup_zero_distance_is_noop_and_positive_distance_drops_clones() {
        let hist = Histogram::normalized(vec![1.0, 0.0]).unwrap();
        let mut a = prop(PartType::Head, 50.0, 20.0, 0.9);
        a.descriptor = Some(Descriptor::new(hist.clone()));
        let mut b = prop(PartType::Head, 80.0, 20.0, 0.8);
        b.descriptor = Some(Descriptor::new(hist));
        let d = PartDistance::default();
        let none = dedup_by_appearance(&[a.clone(), b.clone()], 0.0, &d).unwrap();
        assert_eq!(none.len(), 2);
        let some = dedup_by_appearance(&[a, b], 0.1, &d).unwrap();
        assert_eq!(some.len(), 1);
        assert_eq!(some[0].score, 0.9);
    }

    #[test]
    fn build_scene_prunes_only_by_mask() {
        // A head proposal low in the image survives scene building (no strip
        // filter) but would be removed from a template.
        let head_low = prop(PartType::Head, 50.0, 180.0, 0.9);
        let mask = ForegroundMask::filled(100, 200, true);
        let scene = build_scene(
            &[head_low.clone()],
            Some(&mask),
            (100, 200),
            &BuildConfig::default(),
            &body(),
            180.0,
        )
        .unwrap();
        assert_eq!(scene.proposals_of(PartType::Head).len(), 1);
        assert!(strip_filter(&[head_low], 200).is_empty());
    }

    #[test]
    fn build_scene_empty_input_and_nms_dedup() {
        let scene = build_scene(
            &[],
            None,
            (10, 10),
            &BuildConfig::default(),
            &body(),
            100.0,
        )
        .unwrap();
        assert_eq!(scene.total_proposals(), 0);

        let a = prop(PartType::Torso, 5.0, 5.0, 0.9);
        let b = prop(PartType::Torso, 5.1, 5.0, 0.7);
        let scene = build_scene(
            &[a, b],
            None,
            (10, 10),
            &BuildConfig::default(),
            &body(),
            10.0,
        )
        .unwrap();
        assert_eq!(scene.proposals_of(PartType::Torso).len(), 1);
    }
}
