//! Part-based person re-identification by matching a multi-instance part
//! template against detected part proposals.
//!
//! A query person is represented as a template holding, for each of ten body
//! parts, a small set of alternative reference proposals. Matching against a
//! cluttered scene is posed as binary labeling of a *candidacy graph* whose
//! vertices are candidate (template proposal, scene proposal) pairs and whose
//! edges encode kinematic/symmetry compatibility or exclusion/overlap
//! competition. The maximum-a-posteriori labeling is searched with a
//! composite cluster sampler (Swendsen-Wang style MCMC with
//! Metropolis-Hastings acceptance).
//!
//! Module map:
//! - [`model`] — body parts, proposals, oriented-rectangle geometry, joints
//! - [`features`] — HSV histograms, Bhattacharyya distance, part distance
//! - [`template`] — template/scene construction from raw proposals
//! - [`graph`] — candidacy graph and the learned kinematics model
//! - [`posterior`] — likelihood, structural prior, incremental scoring
//! - [`sampler`] — composite cluster sampling plus exact enumeration oracles
//! - [`sim`] — synthetic individuals, reference shots and cluttered scenes
//! - [`eval`] — gallery ranking, CMC curves, localization metrics
//! - [`io`] — proposal/template/scene-bundle file formats

pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod io;
pub mod model;
pub mod posterior;
pub mod sampler;
pub mod sim;
pub mod template;

pub use error::{Error, Result};
