//! Domain types: body parts, part proposals, templates and scenes.

mod body;
mod geometry;
mod part;

pub use body::{normalize_proposal, BodyModel, JointFrame, JointOffsets};
pub use geometry::{intersection_area, iou, normalize_angle, Aabb, OrientedRect, Point};
pub use part::{Joint, PartType, JOINT_COUNT, PART_COUNT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Descriptor;

/// One detected body-part hypothesis: part type, center, orientation,
/// relative scale, detector score and (optionally) an appearance descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartProposal {
    pub part: PartType,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub s: f64,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<Descriptor>,
    #[serde(default)]
    pub source_id: String,
}

impl PartProposal {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidProposal(format!(
                "scale must be positive and finite, got {}",
                self.s
            )));
        }
        if !self.x.is_finite() || !self.y.is_finite() || !self.theta.is_finite() {
            return Err(Error::InvalidProposal("non-finite pose field".into()));
        }
        Ok(())
    }

    pub fn descriptor(&self) -> Result<&Descriptor> {
        self.descriptor
            .as_ref()
            .ok_or(Error::MissingDescriptor(self.part))
    }
}

/// Per-part lists of proposals, a shape shared by templates and scenes.
pub type PartLists = [Vec<PartProposal>; PART_COUNT];

pub fn empty_part_lists() -> PartLists {
    Default::default()
}

/// The multi-instance template of a query person: for each part, a non-empty
/// list of reference proposals, plus the reference person height in pixels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Template {
    pub parts: PartLists,
    pub person_height: f64,
}

impl Template {
    /// Checks the per-slot part tags and that no list is empty.
    pub fn validate(&self) -> Result<()> {
        for &part in &PartType::ALL {
            let list = &self.parts[part.index()];
            if list.is_empty() {
                return Err(Error::TemplateIncomplete(part));
            }
            for p in list {
                if p.part != part {
                    return Err(Error::contract(format!(
                        "{:?} proposal stored in the {:?} slot",
                        p.part, part
                    )));
                }
                p.validate()?;
            }
        }
        Ok(())
    }

    pub fn proposals_of(&self, part: PartType) -> &[PartProposal] {
        &self.parts[part.index()]
    }
}

/// The target proposal set extracted from one scene shot.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Scene {
    pub proposals: PartLists,
    pub image_size: (u32, u32),
}

impl Scene {
    pub fn new(image_size: (u32, u32)) -> Scene {
        Scene {
            proposals: empty_part_lists(),
            image_size,
        }
    }

    pub fn proposals_of(&self, part: PartType) -> &[PartProposal] {
        &self.proposals[part.index()]
    }

    pub fn total_proposals(&self) -> usize {
        self.proposals.iter().map(|l| l.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.image_size;
        for &part in &PartType::ALL {
            for p in &self.proposals[part.index()] {
                if p.part != part {
                    return Err(Error::contract(format!(
                        "{:?} proposal stored in the {:?} slot",
                        p.part, part
                    )));
                }
                p.validate()?;
                if p.x < 0.0 || p.y < 0.0 || p.x > w as f64 || p.y > h as f64 {
                    return Err(Error::InvalidProposal(format!(
                        "{:?} center ({}, {}) outside {}x{} image",
                        part, p.x, p.y, w, h
                    )));
                }
            }
        }
        Ok(())
    }
}
