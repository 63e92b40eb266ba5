//! Floating-base rigid multibody kinematics and dynamics.
//!
//! Configurations live on `R^3 x SO(3) x R^nj`: base position, base attitude as a
//! unit quaternion, and revolute joint angles. Velocities use the mixed
//! representation throughout: the linear velocity of a frame origin and the
//! frame's angular velocity, both expressed in world coordinates. Frame
//! Jacobians stack `(v; omega)` in that convention.

mod dynamics;
pub mod quat;

pub use dynamics::{bias_forces, inverse_dynamics, mass_matrix, potential_energy, Acceleration};
pub use quat::{quat_exp, quat_exp_integrate, quat_from_ypr, quat_identity, quat_mul, quat_normalize, quat_to_rotation};

use crate::ad::Real;
use crate::linalg::{cross3, mat3_to, vec3_to};
use nalgebra::{DVector, Matrix3, OMatrix, Vector3, Vector4, Dyn, U6};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("unknown frame `{0}`")]
    UnknownFrame(String),
    #[error("frame id {0} out of range ({1} frames)")]
    FrameIdOutOfRange(usize, usize),
    #[error("joint axis must have unit norm, got {0}")]
    NonUnitAxis(f64),
    #[error("base quaternion norm {0} deviates from 1 by more than 1e-9")]
    NonUnitQuaternion(f64),
    #[error("expected {expected} joint values, got {got}")]
    JointDimensionMismatch { expected: usize, got: usize },
    #[error("duplicate frame name `{0}`")]
    DuplicateFrame(String),
}

/// Index of a body within its tree. The base body is always index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BodyId(pub usize);

/// Index of a joint; joint `j` connects some earlier body to body `j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointId(pub usize);

/// Index of a named frame rigidly attached to a body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameId(pub usize);

/// Mass, center of mass, and rotational inertia about the center of mass, all
/// expressed in the owning body's frame.
#[derive(Debug, Clone)]
pub struct SpatialInertia {
    pub mass: f64,
    pub com: Vector3<f64>,
    pub inertia: Matrix3<f64>,
}

impl SpatialInertia {
    pub fn zero() -> Self {
        Self {
            mass: 0.0,
            com: Vector3::zeros(),
            inertia: Matrix3::zeros(),
        }
    }

    pub fn point_mass(mass: f64, at: Vector3<f64>) -> Self {
        Self {
            mass,
            com: at,
            inertia: Matrix3::zeros(),
        }
    }

    /// Uniform-density box with the given full side lengths.
    pub fn uniform_box(mass: f64, com: Vector3<f64>, dims: Vector3<f64>) -> Self {
        let k = mass / 12.0;
        let (dx, dy, dz) = (dims[0], dims[1], dims[2]);
        let inertia = Matrix3::from_diagonal(&Vector3::new(
            k * (dy * dy + dz * dz),
            k * (dx * dx + dz * dz),
            k * (dx * dx + dy * dy),
        ));
        Self { mass, com, inertia }
    }

    /// Combine two inertias expressed in the same body frame.
    pub fn combined(&self, other: &Self) -> Self {
        let mass = self.mass + other.mass;
        if mass == 0.0 {
            return Self::zero();
        }
        let com = (self.com * self.mass + other.com * other.mass) / mass;
        let shift = |part: &Self| {
            let d = part.com - com;
            part.inertia + (Matrix3::identity() * d.norm_squared() - d * d.transpose()) * part.mass
        };
        Self {
            mass,
            com,
            inertia: shift(self) + shift(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Body {
    pub name: String,
    pub inertia: SpatialInertia,
}

/// One-DoF revolute joint. The joint frame is placed at `offset_position` with
/// orientation `offset_rotation`, both relative to the parent body frame; the
/// child body frame coincides with the joint frame rotated by the joint angle
/// about `axis` (a unit vector expressed in the joint frame).
#[derive(Debug, Clone)]
pub struct Joint {
    pub parent: BodyId,
    pub child: BodyId,
    pub axis: Vector3<f64>,
    pub offset_position: Vector3<f64>,
    pub offset_rotation: Matrix3<f64>,
}

#[derive(Debug, Clone)]
pub struct FrameDef {
    pub name: String,
    pub body: BodyId,
    pub position: Vector3<f64>,
    pub rotation: Matrix3<f64>,
}

/// Immutable tree of rigid bodies connected by revolute joints.
///
/// Construction goes through [`KinematicTreeBuilder`], which guarantees the
/// structure is a tree (every non-base body has exactly one parent joint) and
/// that joint axes have unit norm. Once built the tree is immutable and can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct KinematicTree {
    bodies: Vec<Body>,
    joints: Vec<Joint>,
    frames: Vec<FrameDef>,
    frame_names: HashMap<String, FrameId>,
    /// Parent joint of each body (`None` for the base).
    parent_joint: Vec<Option<JointId>>,
}

impl KinematicTree {
    pub fn builder(base: Body) -> KinematicTreeBuilder {
        KinematicTreeBuilder {
            bodies: vec![base],
            joints: Vec::new(),
            frames: Vec::new(),
            parent_joint: vec![None],
        }
    }

    pub fn num_joints(&self) -> usize {
        self.joints.len()
    }

    pub fn num_bodies(&self) -> usize {
        self.bodies.len()
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn frames(&self) -> &[FrameDef] {
        &self.frames
    }

    pub fn frame(&self, name: &str) -> Result<FrameId, KinematicsError> {
        self.frame_names
            .get(name)
            .copied()
            .ok_or_else(|| KinematicsError::UnknownFrame(name.to_string()))
    }

    pub fn frame_def(&self, id: FrameId) -> Result<&FrameDef, KinematicsError> {
        self.frames
            .get(id.0)
            .ok_or(KinematicsError::FrameIdOutOfRange(id.0, self.frames.len()))
    }

    /// Total mass of all bodies.
    pub fn total_mass(&self) -> f64 {
        self.bodies.iter().map(|b| b.inertia.mass).sum()
    }

    /// Joints on the path from the base to `body`, in base-to-leaf order.
    pub fn joint_path(&self, body: BodyId) -> Vec<JointId> {
        let mut path = Vec::new();
        let mut current = body;
        while let Some(j) = self.parent_joint[current.0] {
            path.push(j);
            current = self.joints[j.0].parent;
        }
        path.reverse();
        path
    }

    /// World pose of every body for the given configuration.
    pub fn body_poses<T: Real>(&self, q: &Configuration<T>) -> Vec<Pose<T>> {
        let mut poses = Vec::with_capacity(self.bodies.len());
        poses.push(Pose {
            position: q.base_position,
            rotation: quat_to_rotation(&q.base_quaternion),
        });
        for (ji, joint) in self.joints.iter().enumerate() {
            let parent = &poses[joint.parent.0];
            let r_joint = parent.rotation * mat3_to::<T>(&joint.offset_rotation);
            let p_joint = parent.position + parent.rotation * vec3_to::<T>(&joint.offset_position);
            let rotation = r_joint * rot_axis_angle_generic(&joint.axis, q.joint_positions[ji]);
            poses.push(Pose {
                position: p_joint,
                rotation,
            });
        }
        poses
    }

    /// World pose, origin velocity, and angular velocity of every body.
    pub fn body_kinematics<T: Real>(
        &self,
        q: &Configuration<T>,
        nu: &Velocity<T>,
    ) -> Vec<BodyKinematics<T>> {
        let poses = self.body_poses(q);
        let mut out = Vec::with_capacity(poses.len());
        out.push(BodyKinematics {
            pose: poses[0].clone(),
            linear_velocity: nu.base_linear,
            angular_velocity: nu.base_angular,
        });
        for (ji, joint) in self.joints.iter().enumerate() {
            let parent = &out[joint.parent.0];
            let pose = poses[ji + 1].clone();
            let r = pose.position - parent.pose.position;
            let axis_world = world_axis(&poses, joint, ji);
            let angular_velocity =
                parent.angular_velocity + axis_world * nu.joint_velocities[ji];
            let linear_velocity =
                parent.linear_velocity + cross3(&parent.angular_velocity, &r);
            out.push(BodyKinematics {
                pose,
                linear_velocity,
                angular_velocity,
            });
        }
        out
    }
}

/// World-frame direction of joint `ji`'s axis given computed body poses.
fn world_axis<T: Real>(poses: &[Pose<T>], joint: &Joint, ji: usize) -> Vector3<T> {
    // The axis is invariant under the joint's own rotation, so the child frame
    // is a valid carrier for it.
    poses[ji + 1].rotation * vec3_to::<T>(&joint.axis)
}

fn rot_axis_angle_generic<T: Real>(axis: &Vector3<f64>, angle: T) -> Matrix3<T> {
    let (s, c) = angle.sin_cos();
    let k = crate::linalg::skew3(&vec3_to::<T>(axis));
    let one_minus_c = T::one() - c;
    Matrix3::identity() + k * s + k * k * one_minus_c
}

pub struct KinematicTreeBuilder {
    bodies: Vec<Body>,
    joints: Vec<Joint>,
    frames: Vec<FrameDef>,
    parent_joint: Vec<Option<JointId>>,
}

impl KinematicTreeBuilder {
    /// Attach a new body to `parent` through a revolute joint.
    pub fn add_body(
        &mut self,
        parent: BodyId,
        axis: Vector3<f64>,
        offset_position: Vector3<f64>,
        offset_rotation: Matrix3<f64>,
        body: Body,
    ) -> Result<BodyId, KinematicsError> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(KinematicsError::NonUnitAxis(norm));
        }
        let child = BodyId(self.bodies.len());
        let joint = JointId(self.joints.len());
        self.joints.push(Joint {
            parent,
            child,
            axis,
            offset_position,
            offset_rotation,
        });
        self.bodies.push(body);
        self.parent_joint.push(Some(joint));
        Ok(child)
    }

    pub fn add_frame(
        &mut self,
        body: BodyId,
        name: &str,
        position: Vector3<f64>,
        rotation: Matrix3<f64>,
    ) -> FrameId {
        let id = FrameId(self.frames.len());
        self.frames.push(FrameDef {
            name: name.to_string(),
            body,
            position,
            rotation,
        });
        id
    }

    pub fn build(self) -> Result<KinematicTree, KinematicsError> {
        let mut frame_names = HashMap::new();
        for (i, f) in self.frames.iter().enumerate() {
            if frame_names.insert(f.name.clone(), FrameId(i)).is_some() {
                return Err(KinematicsError::DuplicateFrame(f.name.clone()));
            }
        }
        Ok(KinematicTree {
            bodies: self.bodies,
            joints: self.joints,
            frames: self.frames,
            frame_names,
            parent_joint: self.parent_joint,
        })
    }
}

/// A point on the configuration manifold.
#[derive(Debug, Clone)]
pub struct Configuration<T: Real = f64> {
    pub base_position: Vector3<T>,
    pub base_quaternion: Vector4<T>,
    pub joint_positions: DVector<T>,
}

impl<T: Real> Configuration<T> {
    pub fn new(
        base_position: Vector3<T>,
        base_quaternion: Vector4<T>,
        joint_positions: DVector<T>,
    ) -> Self {
        Self {
            base_position,
            base_quaternion,
            joint_positions,
        }
    }

    pub fn identity(num_joints: usize) -> Self {
        Self {
            base_position: Vector3::zeros(),
            base_quaternion: quat_identity(),
            joint_positions: DVector::zeros(num_joints),
        }
    }

    pub fn validate(&self, tree: &KinematicTree) -> Result<(), KinematicsError> {
        let norm = quat::quat_norm(&self.base_quaternion).value();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(KinematicsError::NonUnitQuaternion(norm));
        }
        if self.joint_positions.len() != tree.num_joints() {
            return Err(KinematicsError::JointDimensionMismatch {
                expected: tree.num_joints(),
                got: self.joint_positions.len(),
            });
        }
        Ok(())
    }
}

/// A tangent vector: base origin linear velocity and angular velocity in world
/// coordinates, plus joint rates.
#[derive(Debug, Clone)]
pub struct Velocity<T: Real = f64> {
    pub base_linear: Vector3<T>,
    pub base_angular: Vector3<T>,
    pub joint_velocities: DVector<T>,
}

impl<T: Real> Velocity<T> {
    pub fn zero(num_joints: usize) -> Self {
        Self {
            base_linear: Vector3::zeros(),
            base_angular: Vector3::zeros(),
            joint_velocities: DVector::zeros(num_joints),
        }
    }

    /// Stack into a `(6 + nj)` generalized vector, linear block first.
    pub fn to_vector(&self) -> DVector<T> {
        let nj = self.joint_velocities.len();
        let mut v = DVector::zeros(6 + nj);
        for i in 0..3 {
            v[i] = self.base_linear[i];
            v[3 + i] = self.base_angular[i];
        }
        for i in 0..nj {
            v[6 + i] = self.joint_velocities[i];
        }
        v
    }

    pub fn from_vector(v: &DVector<T>) -> Self {
        let nj = v.len() - 6;
        Self {
            base_linear: Vector3::new(v[0], v[1], v[2]),
            base_angular: Vector3::new(v[3], v[4], v[5]),
            joint_velocities: DVector::from_fn(nj, |i, _| v[6 + i]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pose<T: Real = f64> {
    pub position: Vector3<T>,
    pub rotation: Matrix3<T>,
}

#[derive(Debug, Clone)]
pub struct BodyKinematics<T: Real = f64> {
    pub pose: Pose<T>,
    pub linear_velocity: Vector3<T>,
    pub angular_velocity: Vector3<T>,
}

/// Force and moment about a frame origin, world coordinates.
#[derive(Debug, Clone)]
pub struct SpatialWrench<T: Real = f64> {
    pub force: Vector3<T>,
    pub moment: Vector3<T>,
    pub frame: FrameId,
}

/// World pose of a named frame.
pub fn forward_kinematics<T: Real>(
    tree: &KinematicTree,
    q: &Configuration<T>,
    frame: FrameId,
) -> Result<Pose<T>, KinematicsError> {
    let def = tree.frame_def(frame)?;
    let poses = tree.body_poses(q);
    let body = &poses[def.body.0];
    Ok(Pose {
        position: body.position + body.rotation * vec3_to::<T>(&def.position),
        rotation: body.rotation * mat3_to::<T>(&def.rotation),
    })
}

/// Mixed-representation frame Jacobian: `(v_C; omega_C) = J nu` for all `nu`.
pub fn frame_jacobian<T: Real>(
    tree: &KinematicTree,
    q: &Configuration<T>,
    frame: FrameId,
) -> Result<OMatrix<T, U6, Dyn>, KinematicsError> {
    let def = tree.frame_def(frame)?;
    let poses = tree.body_poses(q);
    let body_pose = &poses[def.body.0];
    let p_frame = body_pose.position + body_pose.rotation * vec3_to::<T>(&def.position);

    let nj = tree.num_joints();
    let mut jac = OMatrix::<T, U6, Dyn>::zeros(6 + nj);

    // Base columns: v_C = v_B + omega_B x (p_C - p_B).
    let lever = p_frame - q.base_position;
    for i in 0..3 {
        jac[(i, i)] = T::one();
        jac[(3 + i, 3 + i)] = T::one();
    }
    let minus_skew = -crate::linalg::skew3(&lever);
    for r in 0..3 {
        for c in 0..3 {
            jac[(r, 3 + c)] = minus_skew[(r, c)];
        }
    }

    for joint_id in tree.joint_path(def.body) {
        let ji = joint_id.0;
        let joint = &tree.joints[ji];
        let axis = world_axis(&poses, joint, ji);
        let anchor = poses[ji + 1].position;
        let lin = cross3(&axis, &(p_frame - anchor));
        for r in 0..3 {
            jac[(r, 6 + ji)] = lin[r];
            jac[(3 + r, 6 + ji)] = axis[r];
        }
    }
    Ok(jac)
}

/// Generalized force of a world wrench applied at a world point on `body`.
///
/// Algebraically identical to `J^T [force; moment]` with the mixed Jacobian of a
/// frame at `point`, but computed in O(depth) without forming the Jacobian.
pub fn wrench_generalized<T: Real>(
    tree: &KinematicTree,
    poses: &[Pose<T>],
    body: BodyId,
    point: &Vector3<T>,
    force: &Vector3<T>,
    moment: &Vector3<T>,
    out: &mut DVector<T>,
) {
    let p_base = poses[0].position;
    let moment_at_base = *moment + cross3(&(*point - p_base), force);
    for i in 0..3 {
        out[i] += force[i];
        out[3 + i] += moment_at_base[i];
    }
    for joint_id in tree.joint_path(body) {
        let ji = joint_id.0;
        let joint = &tree.joints[ji];
        let axis = world_axis(poses, joint, ji);
        let anchor = poses[ji + 1].position;
        let m = *moment + cross3(&(*point - anchor), force);
        out[6 + ji] += crate::linalg::dot3(&axis, &m);
    }
}
