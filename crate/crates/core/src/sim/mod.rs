//! Synthetic data: individuals with per-part appearance prototypes,
//! reference shots for template building and cluttered scene shots with
//! ground truth. Everything is a pure function of (seed, config); the RNG is
//! ChaCha8 seeded from a 64-bit value, so fixtures reproduce bit-exactly
//! across platforms.

mod render;

pub use render::{attach_rendered_descriptors, render_pose, render_scene};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::Result;
use crate::features::{Descriptor, Histogram, HistogramLayout};
use crate::graph::Annotation;
use crate::model::{
    Aabb, BodyModel, PartProposal, PartType, Point, Scene, PART_COUNT,
};
use crate::template::{ForegroundMask, ReferenceInput};

/// Standard deviations of the per-part pose jitter, in pixels (at the
/// canonical person height), radians and log-scale units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseNoise {
    pub sigma_uv: f64,
    pub sigma_theta: f64,
    pub sigma_log_s: f64,
}

impl Default for PoseNoise {
    fn default() -> Self {
        PoseNoise {
            sigma_uv: 2.0,
            sigma_theta: 0.04,
            sigma_log_s: 0.03,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_individuals: usize,
    /// Reference shots per individual (the M of multi-shot evaluation).
    pub shots_per_individual: usize,
    pub pose_noise: PoseNoise,
    /// Mixing weight of fresh random mass added to observed descriptors.
    pub descriptor_noise: f64,
    /// Expected spurious proposals per part and scene.
    pub false_alarm_rate: f64,
    /// Probability that a placed part's true proposal is missing.
    pub occlusion_rate: f64,
    /// How strongly distractor appearance is pulled toward the query's
    /// (0 = independent, 1 = identical prototypes).
    pub confuser_similarity: f64,
    pub person_height: f64,
    pub image_size: (u32, u32),
    pub layout: HistogramLayout,
    /// Nonzero bins per appearance prototype.
    pub prototype_bins: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_individuals: 20,
            shots_per_individual: 2,
            pose_noise: PoseNoise::default(),
            descriptor_noise: 0.05,
            false_alarm_rate: 2.0,
            occlusion_rate: 0.0,
            confuser_similarity: 0.0,
            person_height: 175.0,
            image_size: (640, 480),
            layout: HistogramLayout::default(),
            prototype_bins: 4,
            seed: 0,
        }
    }
}

/// A synthetic person: per-part appearance prototypes (normalized sparse
/// histograms), a render color per part and the body height.
#[derive(Debug, Clone)]
pub struct SyntheticIndividual {
    pub id: u32,
    pub prototypes: Vec<Histogram>,
    pub colors: Vec<[u8; 3]>,
    pub height: f64,
}

impl SyntheticIndividual {
    /// Appearance pulled toward `other` by weight `c`; geometry unchanged.
    pub fn interpolated_toward(&self, other: &SyntheticIndividual, c: f64) -> SyntheticIndividual {
        let prototypes = self
            .prototypes
            .iter()
            .zip(other.prototypes.iter())
            .map(|(own, q)| {
                let bins = own
                    .bins
                    .iter()
                    .zip(q.bins.iter())
                    .map(|(a, b)| (1.0 - c) * a + c * b)
                    .collect();
                Histogram::normalized(bins).expect("non-negative mixture")
            })
            .collect();
        SyntheticIndividual {
            id: self.id,
            prototypes,
            colors: self.colors.clone(),
            height: self.height,
        }
    }
}

/// Where one individual stands in a scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    /// Torso center in scene pixels.
    pub root: Point,
    /// Person scale relative to the canonical height.
    pub scale: f64,
}

/// Everything a reference shot provides: the builder input (proposals plus
/// mask) and the annotated true configuration for kinematics fitting.
#[derive(Debug, Clone)]
pub struct ReferenceShot {
    pub input: ReferenceInput,
    pub annotation: Annotation,
    pub image_size: (u32, u32),
}

/// Per placed individual: the scene indices of its surviving true proposals
/// and its full-pose bounding box (occluded parts included).
#[derive(Debug, Clone)]
pub struct PlacedTruth {
    pub individual: u32,
    pub part_proposal: [Option<usize>; PART_COUNT],
    pub bbox: Aabb,
}

#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    pub placed: Vec<PlacedTruth>,
}

fn sparse_histogram(rng: &mut ChaCha8Rng, layout: HistogramLayout, nonzero: usize) -> Histogram {
    let total = layout.total_bins();
    let mut bins = vec![0.0; total];
    for _ in 0..nonzero.max(1) {
        let b = rng.random_range(0..total);
        bins[b] += 0.2 + rng.random::<f64>();
    }
    Histogram::normalized(bins).expect("positive weights")
}

fn perturb(h: &Histogram, gamma: f64, rng: &mut ChaCha8Rng, layout: HistogramLayout) -> Histogram {
    if gamma <= 0.0 {
        return h.clone();
    }
    let noise = sparse_histogram(rng, layout, 3);
    let bins = h
        .bins
        .iter()
        .zip(noise.bins.iter())
        .map(|(a, b)| (1.0 - gamma) * a + gamma * b)
        .collect();
    Histogram::normalized(bins).expect("non-negative mixture")
}

fn saturated_color(rng: &mut ChaCha8Rng) -> [u8; 3] {
    let h = rng.random_range(0..12) as f64 * 30.0;
    let v = 0.6 + 0.4 * rng.random::<f64>();
    crate::features::hsv_to_rgb(h, 1.0, v)
}

/// Sample one individual. Symmetric parts share a prototype up to a small
/// perturbation, so true left/right matches look alike.
pub fn generate_individual(id: u32, rng: &mut ChaCha8Rng, cfg: &SimConfig) -> SyntheticIndividual {
    const SYMMETRY_BLEED: f64 = 0.05;
    let mut prototypes: Vec<Option<Histogram>> = vec![None; PART_COUNT];
    let mut colors = vec![[0u8; 3]; PART_COUNT];
    for &part in &PartType::ALL {
        if prototypes[part.index()].is_some() {
            continue;
        }
        let proto = sparse_histogram(rng, cfg.layout, cfg.prototype_bins);
        let color = saturated_color(rng);
        colors[part.index()] = color;
        if let Some(partner) = part.symmetry_partner() {
            prototypes[partner.index()] =
                Some(perturb(&proto, SYMMETRY_BLEED, rng, cfg.layout));
            colors[partner.index()] = color;
        }
        prototypes[part.index()] = Some(proto);
    }
    SyntheticIndividual {
        id,
        prototypes: prototypes.into_iter().map(|p| p.unwrap()).collect(),
        colors,
        height: cfg.person_height,
    }
}

fn noisy_pose(
    part: PartType,
    centers: &[Point; PART_COUNT],
    scale: f64,
    noise: &PoseNoise,
    rng: &mut ChaCha8Rng,
) -> (f64, f64, f64, f64) {
    let c = centers[part.index()];
    let n_uv = Normal::new(0.0, noise.sigma_uv * scale.max(0.05)).unwrap();
    let n_theta = Normal::new(0.0, noise.sigma_theta).unwrap();
    let n_s = Normal::new(0.0, noise.sigma_log_s).unwrap();
    let x = c[0] + n_uv.sample(rng);
    let y = c[1] + n_uv.sample(rng);
    let theta = n_theta.sample(rng);
    let s = scale * n_s.sample(rng).exp();
    (x, y, theta, s)
}

/// Geometry of the reference frame: image size and torso position chosen so
/// every part sits inside its detection strip with a healthy margin.
pub fn reference_frame(person_height: f64) -> ((u32, u32), Point) {
    let w = (0.515 * person_height).round() as u32;
    let h = (1.2 * person_height).round() as u32;
    let root = [w as f64 / 2.0, 0.365 * person_height];
    ((w, h), root)
}

/// One reference shot: a true, lightly jittered proposal per part (high
/// detector score, prototype-derived descriptor), Poisson false alarms with
/// random pose and appearance, and a mask covering the true body. Occlusion
/// never applies to references.
pub fn generate_reference_shot(
    ind: &SyntheticIndividual,
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
    source_id: &str,
) -> Result<ReferenceShot> {
    let body = BodyModel::default();
    let (image_size, root) = reference_frame(cfg.person_height);
    let centers = body.canonical_pose(root, cfg.person_height);
    let mut mask = ForegroundMask::filled(image_size.0, image_size.1, false);
    let mut proposals = Vec::new();
    let mut truth = Vec::new();
    for &part in &PartType::ALL {
        let (x, y, theta, s) = noisy_pose(part, &centers, 1.0, &cfg.pose_noise, rng);
        let descriptor = Descriptor::new(perturb(
            &ind.prototypes[part.index()],
            cfg.descriptor_noise,
            rng,
            cfg.layout,
        ));
        let p = PartProposal {
            part,
            x,
            y,
            theta,
            s,
            score: 0.75 + 0.25 * rng.random::<f64>(),
            descriptor: Some(descriptor),
            source_id: source_id.to_string(),
        };
        mask.paint_rect(&body.rect_of(&p, cfg.person_height)?);
        truth.push(p.clone());
        proposals.push(p);
    }
    let annotation = Annotation::new(truth)?;
    // False alarms: random pose anywhere in the frame, random appearance.
    for &part in &PartType::ALL {
        for _ in 0..poisson_count(cfg.false_alarm_rate, rng) {
            proposals.push(false_alarm(part, image_size, 1.0, rng, cfg, source_id));
        }
    }
    Ok(ReferenceShot {
        input: ReferenceInput { proposals, mask },
        annotation,
        image_size,
    })
}

fn poisson_count(rate: f64, rng: &mut ChaCha8Rng) -> usize {
    if rate <= 0.0 {
        return 0;
    }
    let d = Poisson::new(rate).expect("positive rate");
    let v: f64 = d.sample(rng);
    v as usize
}

fn false_alarm(
    part: PartType,
    image_size: (u32, u32),
    scale_hint: f64,
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
    source_id: &str,
) -> PartProposal {
    let n_s: Normal<f64> = Normal::new(0.0, 0.15).unwrap();
    PartProposal {
        part,
        x: rng.random::<f64>() * image_size.0 as f64,
        y: rng.random::<f64>() * image_size.1 as f64,
        theta: (rng.random::<f64>() - 0.5) * 2.0 * std::f64::consts::PI * 0.99,
        s: scale_hint * f64::exp(n_s.sample(rng)),
        score: 0.3 + 0.5 * rng.random::<f64>(),
        descriptor: Some(Descriptor::new(sparse_histogram(rng, cfg.layout, cfg.prototype_bins))),
        source_id: source_id.to_string(),
    }
}

/// Generate a scene shot. `members[0]` is the subject (appearance used
/// as-is); later members are distractors whose appearance is interpolated
/// toward the subject's by `confuser_similarity`. Each placed part's true
/// proposal is dropped independently with `occlusion_rate`; ground-truth
/// boxes still cover the full pose.
pub fn generate_scene(
    members: &[(&SyntheticIndividual, Placement)],
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
) -> Result<(Scene, GroundTruth)> {
    let body = BodyModel::default();
    let mut scene = Scene::new(cfg.image_size);
    let mut gt = GroundTruth::default();
    let query = members.first().map(|(ind, _)| (*ind).clone());
    for (k, (ind, placement)) in members.iter().enumerate() {
        let appearance: SyntheticIndividual = if k == 0 || cfg.confuser_similarity <= 0.0 {
            (*ind).clone()
        } else {
            ind.interpolated_toward(query.as_ref().unwrap(), cfg.confuser_similarity)
        };
        let centers = body.canonical_pose(placement.root, cfg.person_height * placement.scale);
        let mut part_proposal = [None; PART_COUNT];
        let mut bbox = Aabb::empty();
        for &part in &PartType::ALL {
            let (x, y, theta, s) =
                noisy_pose(part, &centers, placement.scale, &cfg.pose_noise, rng);
            let x = x.clamp(0.0, cfg.image_size.0 as f64);
            let y = y.clamp(0.0, cfg.image_size.1 as f64);
            let descriptor = Descriptor::new(perturb(
                &appearance.prototypes[part.index()],
                cfg.descriptor_noise,
                rng,
                cfg.layout,
            ));
            let p = PartProposal {
                part,
                x,
                y,
                theta,
                s,
                score: 0.7 + 0.3 * rng.random::<f64>(),
                descriptor: Some(descriptor),
                source_id: format!("scene:{k}"),
            };
            let rect = body.rect_of(&p, cfg.person_height)?;
            bbox = bbox.union(&rect.aabb());
            let occluded = rng.random::<f64>() < cfg.occlusion_rate;
            if !occluded {
                let list = &mut scene.proposals[part.index()];
                part_proposal[part.index()] = Some(list.len());
                list.push(p);
            }
        }
        gt.placed.push(PlacedTruth {
            individual: ind.id,
            part_proposal,
            bbox,
        });
    }
    let mean_scale = members.iter().map(|(_, p)| p.scale).sum::<f64>() / members.len().max(1) as f64;
    for &part in &PartType::ALL {
        for _ in 0..poisson_count(cfg.false_alarm_rate, rng) {
            scene.proposals[part.index()].push(false_alarm(
                part,
                cfg.image_size,
                mean_scale.max(0.05),
                rng,
                cfg,
                "scene:fa",
            ));
        }
    }
    Ok((scene, gt))
}
