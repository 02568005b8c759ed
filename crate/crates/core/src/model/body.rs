//! Body geometry configuration: part rectangle sizes and joint anchor
//! offsets, both expressed as fractions of person height.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::geometry::{normalize_angle, OrientedRect, Point};
use crate::model::part::{Joint, PartType, JOINT_COUNT, PART_COUNT};
use crate::model::PartProposal;

/// Pose of one part in the joint coordinate frame: anchor position plus the
/// part's own orientation and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointFrame {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub s: f64,
}

/// Per-joint anchor offsets: where the joint sits in the parent part's local
/// frame and in the child part's local frame (normalized units, unrotated,
/// relative to the part center; y grows downward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointOffsets {
    pub parent: Point,
    pub child: Point,
}

/// Part rectangle sizes and joint offsets. The values are plausible adult
/// proportions; nothing downstream depends on the exact numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyModel {
    /// (width, height) of each part rectangle, indexed by [`PartType::index`].
    pub part_sizes: [(f64, f64); PART_COUNT],
    /// Joint anchor offsets, indexed by [`Joint::index`].
    pub joint_offsets: [JointOffsets; JOINT_COUNT],
}

fn size_table(part: PartType) -> (f64, f64) {
    match part {
        PartType::Head => (0.16, 0.16),
        PartType::Torso => (0.30, 0.35),
        PartType::LeftUpperArm | PartType::RightUpperArm => (0.10, 0.22),
        PartType::LeftForearm | PartType::RightForearm => (0.09, 0.22),
        PartType::LeftThigh | PartType::RightThigh => (0.13, 0.28),
        PartType::LeftCalf | PartType::RightCalf => (0.11, 0.28),
    }
}

fn offset_table(joint: Joint) -> JointOffsets {
    let side = |p: PartType| -> f64 {
        match p {
            PartType::LeftUpperArm | PartType::LeftForearm => -1.0,
            PartType::RightUpperArm | PartType::RightForearm => 1.0,
            PartType::LeftThigh | PartType::LeftCalf => -1.0,
            PartType::RightThigh | PartType::RightCalf => 1.0,
            _ => 0.0,
        }
    };
    match joint.child() {
        // Neck: bottom of the head, top of the torso.
        PartType::Head => JointOffsets {
            parent: [0.0, -0.175],
            child: [0.0, 0.08],
        },
        // Shoulders: upper corners of the torso, top of the upper arm.
        PartType::LeftUpperArm | PartType::RightUpperArm => JointOffsets {
            parent: [side(joint.child()) * 0.15, -0.135],
            child: [0.0, -0.11],
        },
        // Elbows: bottom of the upper arm, top of the forearm.
        PartType::LeftForearm | PartType::RightForearm => JointOffsets {
            parent: [0.0, 0.11],
            child: [0.0, -0.11],
        },
        // Hips: lower half of the torso, top of the thigh.
        PartType::LeftThigh | PartType::RightThigh => JointOffsets {
            parent: [side(joint.child()) * 0.07, 0.175],
            child: [0.0, -0.14],
        },
        // Knees: bottom of the thigh, top of the calf.
        PartType::LeftCalf | PartType::RightCalf => JointOffsets {
            parent: [0.0, 0.14],
            child: [0.0, -0.14],
        },
        _ => unreachable!("torso is never a joint child"),
    }
}

impl Default for BodyModel {
    fn default() -> Self {
        let mut part_sizes = [(0.0, 0.0); PART_COUNT];
        for &p in &PartType::ALL {
            part_sizes[p.index()] = size_table(p);
        }
        let mut joint_offsets = [JointOffsets {
            parent: [0.0, 0.0],
            child: [0.0, 0.0],
        }; JOINT_COUNT];
        for j in Joint::all() {
            joint_offsets[j.index()] = offset_table(j);
        }
        BodyModel {
            part_sizes,
            joint_offsets,
        }
    }
}

impl BodyModel {
    pub fn size_of(&self, part: PartType) -> (f64, f64) {
        self.part_sizes[part.index()]
    }

    pub fn offsets_of(&self, joint: Joint) -> JointOffsets {
        self.joint_offsets[joint.index()]
    }

    /// Oriented rectangle of a proposal, with side lengths equal to the
    /// part's base size scaled by `s * person_height`.
    pub fn rect_of(&self, p: &PartProposal, person_height: f64) -> Result<OrientedRect> {
        if !(p.s > 0.0) {
            return Err(Error::InvalidProposal(format!(
                "non-positive scale {} on {:?} proposal",
                p.s, p.part
            )));
        }
        let (w, h) = self.size_of(p.part);
        let f = p.s * person_height;
        Ok(OrientedRect::new([p.x, p.y], w * f, h * f, p.theta))
    }

    /// Transform a proposal into the coordinate frame of `joint`: the joint
    /// anchor is the part center displaced by the part-local joint offset,
    /// rotated by the proposal's orientation and scaled by
    /// `s * person_height`. Errors when the joint does not touch the
    /// proposal's part.
    pub fn joint_transform(
        &self,
        p: &PartProposal,
        joint: Joint,
        person_height: f64,
    ) -> Result<JointFrame> {
        let off = if joint.child() == p.part {
            self.offsets_of(joint).child
        } else if joint.parent() == p.part {
            self.offsets_of(joint).parent
        } else {
            return Err(Error::domain(format!(
                "joint {:?}-{:?} is not incident to part {:?}",
                joint.parent(),
                joint.child(),
                p.part
            )));
        };
        let (sin, cos) = p.theta.sin_cos();
        let f = p.s * person_height;
        let dx = off[0] * f;
        let dy = off[1] * f;
        Ok(JointFrame {
            u: p.x + dx * cos - dy * sin,
            v: p.y + dx * sin + dy * cos,
            theta: p.theta,
            s: p.s,
        })
    }

    /// Canonical upright pose: part centers placed so adjacent parts' joint
    /// anchors coincide exactly, all orientations zero, unit scale. The torso
    /// center sits at `root`; `person_height` scales the offsets.
    pub fn canonical_pose(&self, root: Point, person_height: f64) -> [Point; PART_COUNT] {
        let mut centers = [[f64::NAN, f64::NAN]; PART_COUNT];
        centers[PartType::Torso.index()] = root;
        // Parents precede children in breadth order over the tree.
        let order = [
            PartType::Head,
            PartType::LeftUpperArm,
            PartType::RightUpperArm,
            PartType::LeftThigh,
            PartType::RightThigh,
            PartType::LeftForearm,
            PartType::RightForearm,
            PartType::LeftCalf,
            PartType::RightCalf,
        ];
        for part in order {
            let joint = Joint::new(part).expect("non-root part");
            let off = self.offsets_of(joint);
            let parent_c = centers[joint.parent().index()];
            // anchor = parent_c + parent_off = child_c + child_off
            centers[part.index()] = [
                parent_c[0] + (off.parent[0] - off.child[0]) * person_height,
                parent_c[1] + (off.parent[1] - off.child[1]) * person_height,
            ];
        }
        centers
    }
}

/// Normalize a proposal in place: wrap theta into (-pi, pi].
pub fn normalize_proposal(p: &mut PartProposal) {
    p.theta = normalize_angle(p.theta);
}
