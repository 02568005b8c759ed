//! Pairwise kinematics: per-joint Gaussian models over the displacement
//! between adjacent parts expressed in the joint coordinate frame.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::model::{normalize_angle, BodyModel, Joint, PartProposal, PartType, JOINT_COUNT, PART_COUNT};

/// One annotated full-body configuration: exactly one proposal per part.
#[derive(Debug, Clone)]
pub struct Annotation {
    parts: Vec<PartProposal>,
}

impl Annotation {
    pub fn new(mut props: Vec<PartProposal>) -> Result<Annotation> {
        props.sort_by_key(|p| p.part.index());
        if props.len() != PART_COUNT
            || props.iter().enumerate().any(|(i, p)| p.part.index() != i)
        {
            return Err(Error::contract(
                "an annotation needs exactly one proposal per part",
            ));
        }
        for p in &props {
            p.validate()?;
        }
        Ok(Annotation { parts: props })
    }

    pub fn get(&self, part: PartType) -> &PartProposal {
        &self.parts[part.index()]
    }

    pub fn parts(&self) -> &[PartProposal] {
        &self.parts
    }
}

/// Gaussian statistics of one joint's displacement (du, dv, dtheta, dlog s).
#[derive(Debug, Clone, PartialEq)]
pub struct JointStats {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
    precision: Matrix4<f64>,
}

/// Learned kinematics: joint offsets plus per-joint displacement Gaussians.
/// Displacements are measured in pixels at `person_height`, so the model
/// should be fit at the same canonical height the templates use.
#[derive(Debug, Clone)]
pub struct KinematicsModel {
    pub body: BodyModel,
    pub person_height: f64,
    joints: Vec<JointStats>,
}

/// Raw joint-frame displacement between a child-part and parent-part
/// proposal: child anchor minus parent anchor, with the angle difference
/// wrapped into (-pi, pi] and scale compared in log space.
pub fn joint_displacement(
    body: &BodyModel,
    joint: Joint,
    parent: &PartProposal,
    child: &PartProposal,
    person_height: f64,
) -> Result<Vector4<f64>> {
    let fp = body.joint_transform(parent, joint, person_height)?;
    let fc = body.joint_transform(child, joint, person_height)?;
    Ok(Vector4::new(
        fc.u - fp.u,
        fc.v - fp.v,
        normalize_angle(fc.theta - fp.theta),
        fc.s.ln() - fp.s.ln(),
    ))
}

/// Fit the kinematics model from annotated configurations. Per joint, the
/// sample mean displacement becomes the joint's offset correction (so
/// residuals are zero-mean) and the covariance is the population covariance
/// of the residuals plus `1e-6 * I` for positive definiteness.
pub fn fit_kinematics(
    annotations: &[Annotation],
    body: &BodyModel,
    person_height: f64,
) -> Result<KinematicsModel> {
    const EPS: f64 = 1e-6;
    if annotations.len() < 2 {
        return Err(Error::UnderDetermined {
            got: annotations.len(),
            need: 2,
        });
    }
    let mut joints = Vec::with_capacity(JOINT_COUNT);
    for joint in Joint::all() {
        let mut samples = Vec::with_capacity(annotations.len());
        for a in annotations {
            samples.push(joint_displacement(
                body,
                joint,
                a.get(joint.parent()),
                a.get(joint.child()),
                person_height,
            )?);
        }
        let n = samples.len() as f64;
        let mut mean = Vector4::zeros();
        for s in &samples {
            mean += s;
        }
        mean /= n;
        mean[2] = normalize_angle(mean[2]);
        let mut cov = Matrix4::zeros();
        for s in &samples {
            let mut r = s - mean;
            r[2] = normalize_angle(r[2]);
            cov += r * r.transpose();
        }
        cov /= n;
        cov += Matrix4::identity() * EPS;
        let precision = cov
            .try_inverse()
            .ok_or_else(|| Error::contract("joint covariance not invertible"))?;
        joints.push(JointStats { mean, cov, precision });
    }
    Ok(KinematicsModel {
        body: body.clone(),
        person_height,
        joints,
    })
}

impl KinematicsModel {
    /// A model with zero mean and isotropic covariance, useful when no
    /// annotations are available.
    pub fn isotropic(body: BodyModel, person_height: f64, sigma_uv: f64, sigma_theta: f64, sigma_log_s: f64) -> KinematicsModel {
        let cov = Matrix4::from_diagonal(&Vector4::new(
            sigma_uv * sigma_uv,
            sigma_uv * sigma_uv,
            sigma_theta * sigma_theta,
            sigma_log_s * sigma_log_s,
        ));
        let precision = cov.try_inverse().expect("diagonal covariance");
        let stats = JointStats {
            mean: Vector4::zeros(),
            cov,
            precision,
        };
        KinematicsModel {
            body,
            person_height,
            joints: vec![stats; JOINT_COUNT],
        }
    }

    pub fn stats(&self, joint: Joint) -> &JointStats {
        &self.joints[joint.index()]
    }

    /// Log of the mode-normalized Gaussian density for a pair of proposals
    /// of kinematically adjacent parts: `-0.5 * r^T Sigma^-1 r` with r the
    /// mean-corrected joint-frame displacement. Zero displacement scores
    /// exactly 0 (probability 1).
    pub fn pair_log_prob(&self, a: &PartProposal, b: &PartProposal) -> Result<f64> {
        let joint = Joint::between(a.part, b.part).ok_or_else(|| {
            Error::domain(format!(
                "parts {:?} and {:?} are not kinematically adjacent",
                a.part, b.part
            ))
        })?;
        let (parent, child) = if joint.child() == a.part { (b, a) } else { (a, b) };
        let d = joint_displacement(&self.body, joint, parent, child, self.person_height)?;
        let stats = &self.joints[joint.index()];
        let mut r = d - stats.mean;
        r[2] = normalize_angle(r[2]);
        Ok(-0.5 * (r.transpose() * stats.precision * r)[(0, 0)])
    }

    /// Mode-normalized kinematic probability in (0, 1].
    pub fn pair_prob(&self, a: &PartProposal, b: &PartProposal) -> Result<f64> {
        Ok(self.pair_log_prob(a, b)?.exp())
    }
}
