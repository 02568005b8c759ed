//! Optional raster rendering of synthetic scenes: parts painted as solid
//! colored rectangles so the image feature path can be exercised end to end.

use crate::error::Result;
use crate::features::{hsv_histogram, Descriptor, HistogramLayout, Raster};
use crate::model::{BodyModel, PartProposal, PartType, Scene};
use crate::sim::SyntheticIndividual;

const BACKGROUND: [u8; 3] = [96, 96, 96];

/// Paint order: extremities first so the torso and head stay on top.
const PAINT_ORDER: [PartType; 10] = [
    PartType::LeftCalf,
    PartType::RightCalf,
    PartType::LeftThigh,
    PartType::RightThigh,
    PartType::LeftForearm,
    PartType::RightForearm,
    PartType::LeftUpperArm,
    PartType::RightUpperArm,
    PartType::Torso,
    PartType::Head,
];

fn fill_rect(img: &mut Raster, rect: &crate::model::OrientedRect, color: [u8; 3]) {
    let bb = rect.aabb();
    let x0 = bb.min[0].floor().max(0.0) as u32;
    let y0 = bb.min[1].floor().max(0.0) as u32;
    let x1 = (bb.max[0].ceil() as i64).clamp(0, img.width as i64) as u32;
    let y1 = (bb.max[1].ceil() as i64).clamp(0, img.height as i64) as u32;
    for y in y0..y1 {
        for x in x0..x1 {
            if rect.contains([x as f64 + 0.5, y as f64 + 0.5]) {
                img.set(x, y, color);
            }
        }
    }
}

/// Paint one posed body (a full set of part proposals) onto the raster.
pub fn render_pose(
    img: &mut Raster,
    body: &BodyModel,
    ind: &SyntheticIndividual,
    pose: &[PartProposal],
    person_height: f64,
) -> Result<()> {
    for &part in &PAINT_ORDER {
        for p in pose.iter().filter(|p| p.part == part) {
            let rect = body.rect_of(p, person_height)?;
            fill_rect(img, &rect, ind.colors[part.index()]);
        }
    }
    Ok(())
}

/// Render a scene's placed individuals over a flat background. Only true
/// poses are painted (false alarms are detector artifacts, not pixels).
pub fn render_scene(
    image_size: (u32, u32),
    body: &BodyModel,
    placed: &[(&SyntheticIndividual, Vec<PartProposal>)],
    person_height: f64,
) -> Result<Raster> {
    let mut img = Raster::filled(image_size.0, image_size.1, BACKGROUND);
    for (ind, pose) in placed {
        render_pose(&mut img, body, ind, pose, person_height)?;
    }
    Ok(img)
}

/// Replace every proposal's descriptor with the HSV histogram of its
/// rectangle in the rendered image, exercising the image feature path.
pub fn attach_rendered_descriptors(
    scene: &mut Scene,
    img: &Raster,
    body: &BodyModel,
    person_height: f64,
    layout: HistogramLayout,
) -> Result<()> {
    for list in scene.proposals.iter_mut() {
        for p in list.iter_mut() {
            let rect = body.rect_of(p, person_height)?;
            let hist = hsv_histogram(img, &rect, None, layout)?;
            p.descriptor = Some(Descriptor::new(hist));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_individual, reference_frame, SimConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rendered_head_is_its_color() {
        let cfg = SimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ind = generate_individual(0, &mut rng, &cfg);
        let body = BodyModel::default();
        let (size, root) = reference_frame(cfg.person_height);
        let centers = body.canonical_pose(root, cfg.person_height);
        let pose: Vec<PartProposal> = PartType::ALL
            .iter()
            .map(|&part| PartProposal {
                part,
                x: centers[part.index()][0],
                y: centers[part.index()][1],
                theta: 0.0,
                s: 1.0,
                score: 1.0,
                descriptor: None,
                source_id: String::new(),
            })
            .collect();
        let mut img = Raster::filled(size.0, size.1, BACKGROUND);
        render_pose(&mut img, &body, &ind, &pose, cfg.person_height).unwrap();
        let head_c = centers[PartType::Head.index()];
        let px = img.get(head_c[0] as u32, head_c[1] as u32);
        assert_eq!(px, ind.colors[PartType::Head.index()]);
        // Far corner stays background.
        assert_eq!(img.get(0, size.1 - 1), BACKGROUND);
    }
}
