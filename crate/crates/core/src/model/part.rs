//! The ten concrete body parts and the kinematic tree over them.

use serde::{Deserialize, Serialize};

/// One of the ten body parts a person decomposes into. The six-part body
/// (head, torso, upper arms, forearms, thighs, calves) is expanded so that
/// each limb has distinct left/right slots; symmetry and kinematic relations
/// need the sides to be addressable separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartType {
    Head,
    Torso,
    LeftUpperArm,
    RightUpperArm,
    LeftForearm,
    RightForearm,
    LeftThigh,
    RightThigh,
    LeftCalf,
    RightCalf,
}

pub const PART_COUNT: usize = 10;

impl PartType {
    /// All parts in canonical order. Indexing everywhere follows this order.
    pub const ALL: [PartType; PART_COUNT] = [
        PartType::Head,
        PartType::Torso,
        PartType::LeftUpperArm,
        PartType::RightUpperArm,
        PartType::LeftForearm,
        PartType::RightForearm,
        PartType::LeftThigh,
        PartType::RightThigh,
        PartType::LeftCalf,
        PartType::RightCalf,
    ];

    /// Canonical index into [`PartType::ALL`].
    pub fn index(self) -> usize {
        match self {
            PartType::Head => 0,
            PartType::Torso => 1,
            PartType::LeftUpperArm => 2,
            PartType::RightUpperArm => 3,
            PartType::LeftForearm => 4,
            PartType::RightForearm => 5,
            PartType::LeftThigh => 6,
            PartType::RightThigh => 7,
            PartType::LeftCalf => 8,
            PartType::RightCalf => 9,
        }
    }

    pub fn from_index(i: usize) -> Option<PartType> {
        PartType::ALL.get(i).copied()
    }

    /// The mirrored part, defined exactly for the eight limb parts.
    pub fn symmetry_partner(self) -> Option<PartType> {
        match self {
            PartType::Head | PartType::Torso => None,
            PartType::LeftUpperArm => Some(PartType::RightUpperArm),
            PartType::RightUpperArm => Some(PartType::LeftUpperArm),
            PartType::LeftForearm => Some(PartType::RightForearm),
            PartType::RightForearm => Some(PartType::LeftForearm),
            PartType::LeftThigh => Some(PartType::RightThigh),
            PartType::RightThigh => Some(PartType::LeftThigh),
            PartType::LeftCalf => Some(PartType::RightCalf),
            PartType::RightCalf => Some(PartType::LeftCalf),
        }
    }

    /// Parent in the kinematic tree; the torso is the root.
    pub fn kinematic_parent(self) -> Option<PartType> {
        match self {
            PartType::Torso => None,
            PartType::Head
            | PartType::LeftUpperArm
            | PartType::RightUpperArm
            | PartType::LeftThigh
            | PartType::RightThigh => Some(PartType::Torso),
            PartType::LeftForearm => Some(PartType::LeftUpperArm),
            PartType::RightForearm => Some(PartType::RightUpperArm),
            PartType::LeftCalf => Some(PartType::LeftThigh),
            PartType::RightCalf => Some(PartType::RightThigh),
        }
    }

    /// Horizontal strip (0 = top quarter .. 3 = bottom quarter) a detection
    /// of this part is expected in: head in the first strip, upper body in
    /// the second, thighs in the third, calves in the fourth.
    pub fn strip_index(self) -> usize {
        match self {
            PartType::Head => 0,
            PartType::Torso
            | PartType::LeftUpperArm
            | PartType::RightUpperArm
            | PartType::LeftForearm
            | PartType::RightForearm => 1,
            PartType::LeftThigh | PartType::RightThigh => 2,
            PartType::LeftCalf | PartType::RightCalf => 3,
        }
    }

    pub fn is_adjacent(self, other: PartType) -> bool {
        self.kinematic_parent() == Some(other) || other.kinematic_parent() == Some(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            PartType::Head => "head",
            PartType::Torso => "torso",
            PartType::LeftUpperArm => "left_upper_arm",
            PartType::RightUpperArm => "right_upper_arm",
            PartType::LeftForearm => "left_forearm",
            PartType::RightForearm => "right_forearm",
            PartType::LeftThigh => "left_thigh",
            PartType::RightThigh => "right_thigh",
            PartType::LeftCalf => "left_calf",
            PartType::RightCalf => "right_calf",
        }
    }

    pub fn from_name(name: &str) -> Option<PartType> {
        PartType::ALL.iter().copied().find(|p| p.name() == name)
    }
}

/// A kinematic joint, identified by its child part (every non-root part has
/// exactly one joint to its parent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Joint {
    child: PartType,
}

pub const JOINT_COUNT: usize = PART_COUNT - 1;

impl Joint {
    pub fn new(child: PartType) -> Option<Joint> {
        child.kinematic_parent().map(|_| Joint { child })
    }

    /// All nine joints, ordered by child part index.
    pub fn all() -> impl Iterator<Item = Joint> {
        PartType::ALL
            .iter()
            .filter_map(|&p| Joint::new(p))
    }

    /// Dense index 0..9 for table lookups.
    pub fn index(self) -> usize {
        // Child indices skip the torso (index 1).
        let c = self.child.index();
        if c < 1 {
            c
        } else {
            c - 1
        }
    }

    pub fn child(self) -> PartType {
        self.child
    }

    pub fn parent(self) -> PartType {
        self.child.kinematic_parent().expect("joint child has a parent")
    }

    /// The joint connecting two parts, if they are kinematically adjacent.
    pub fn between(a: PartType, b: PartType) -> Option<Joint> {
        if a.kinematic_parent() == Some(b) {
            Joint::new(a)
        } else if b.kinematic_parent() == Some(a) {
            Joint::new(b)
        } else {
            None
        }
    }

    pub fn touches(self, part: PartType) -> bool {
        self.child == part || self.parent() == part
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_is_involutive_and_limbs_only() {
        let mut limbs = 0;
        for &p in &PartType::ALL {
            match p.symmetry_partner() {
                Some(q) => {
                    limbs += 1;
                    assert_ne!(p, q);
                    assert_eq!(q.symmetry_partner(), Some(p));
                }
                None => assert!(matches!(p, PartType::Head | PartType::Torso)),
            }
        }
        assert_eq!(limbs, 8);
    }

    #[test]
    fn kinematic_tree_is_connected_acyclic_with_torso_root() {
        for &p in &PartType::ALL {
            let mut cur = p;
            let mut hops = 0;
            while let Some(parent) = cur.kinematic_parent() {
                cur = parent;
                hops += 1;
                assert!(hops <= PART_COUNT, "cycle reaching root from {p:?}");
            }
            assert_eq!(cur, PartType::Torso);
        }
        assert_eq!(Joint::all().count(), JOINT_COUNT);
    }

    #[test]
    fn strip_assignment() {
        assert_eq!(PartType::Head.strip_index(), 0);
        assert_eq!(PartType::Torso.strip_index(), 1);
        assert_eq!(PartType::LeftUpperArm.strip_index(), 1);
        assert_eq!(PartType::RightForearm.strip_index(), 1);
        assert_eq!(PartType::LeftThigh.strip_index(), 2);
        assert_eq!(PartType::RightCalf.strip_index(), 3);
    }

    #[test]
    fn joint_indices_are_dense() {
        let mut seen = [false; JOINT_COUNT];
        for j in Joint::all() {
            assert!(!seen[j.index()]);
            seen[j.index()] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn part_names_round_trip() {
        for &p in &PartType::ALL {
            assert_eq!(PartType::from_name(p.name()), Some(p));
        }
        assert_eq!(PartType::from_name("left_forearm"), Some(PartType::LeftForearm));
        assert_eq!(PartType::from_name("elbow"), None);
    }
}
