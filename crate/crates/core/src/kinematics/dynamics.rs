//! Mass matrix via a composite-rigid-body recursion and bias forces via a
//! recursive Newton-Euler pass.
//!
//! Both work on spatial inertias expressed about per-body reference points with
//! world-aligned axes, which is the natural home of the mixed velocity
//! convention: the mixed velocity of a body is exactly its Plücker velocity in a
//! world-aligned frame anchored at the body origin.

use crate::ad::Real;
use crate::kinematics::{Configuration, KinematicTree, Pose, Velocity};
use crate::linalg::{cross3, dot3, mat3_to, skew3, vec3_to};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Generalized acceleration, laid out like [`Velocity`].
#[derive(Debug, Clone)]
pub struct Acceleration<T: Real = f64> {
    pub base_linear: Vector3<T>,
    pub base_angular: Vector3<T>,
    pub joint_accelerations: DVector<T>,
}

impl<T: Real> Acceleration<T> {
    pub fn zero(num_joints: usize) -> Self {
        Self {
            base_linear: Vector3::zeros(),
            base_angular: Vector3::zeros(),
            joint_accelerations: DVector::zeros(num_joints),
        }
    }

    pub fn to_vector(&self) -> DVector<T> {
        let nj = self.joint_accelerations.len();
        let mut v = DVector::zeros(6 + nj);
        for i in 0..3 {
            v[i] = self.base_linear[i];
            v[3 + i] = self.base_angular[i];
        }
        for i in 0..nj {
            v[6 + i] = self.joint_accelerations[i];
        }
        v
    }

    pub fn from_vector(v: &DVector<T>) -> Self {
        let nj = v.len() - 6;
        Self {
            base_linear: Vector3::new(v[0], v[1], v[2]),
            base_angular: Vector3::new(v[3], v[4], v[5]),
            joint_accelerations: DVector::from_fn(nj, |i, _| v[6 + i]),
        }
    }
}

/// Spatial inertia about a reference point, world axes: mass, first moment
/// `h = m (com - point)`, and rotational inertia about the point.
#[derive(Clone)]
struct PointInertia<T: Real> {
    m: T,
    h: Vector3<T>,
    i: Matrix3<T>,
}

impl<T: Real> PointInertia<T> {
    fn of_body(pose: &Pose<T>, inertia: &crate::kinematics::SpatialInertia) -> Self {
        let m = T::from_f64(inertia.mass);
        let r = pose.rotation * vec3_to::<T>(&inertia.com);
        let i_com = pose.rotation * mat3_to::<T>(&inertia.inertia) * pose.rotation.transpose();
        let h = r * m;
        // Parallel axis: I_origin = I_com - m [r]x [r]x.
        let sr = skew3(&r);
        let i = i_com - sr * sr * m;
        Self { m, h, i }
    }

    /// Re-express about a new point, `d` being old point minus new point.
    fn shift_to(&self, d: &Vector3<T>) -> Self {
        let sh = skew3(&self.h);
        let sd = skew3(d);
        Self {
            m: self.m,
            h: self.h + *d * self.m,
            i: self.i - (sh * sd + sd * sh + sd * sd * self.m),
        }
    }

    fn add_assign(&mut self, other: &Self) {
        self.m += other.m;
        self.h += other.h;
        self.i += other.i;
    }
}

/// Joint-space mass matrix, `(6 + nj) x (6 + nj)`, symmetric positive definite.
pub fn mass_matrix<T: Real>(tree: &KinematicTree, q: &Configuration<T>) -> DMatrix<T> {
    let poses = tree.body_poses(q);
    let nb = tree.num_bodies();
    let nj = tree.num_joints();

    let mut composite: Vec<PointInertia<T>> = tree
        .bodies()
        .iter()
        .zip(poses.iter())
        .map(|(b, p)| PointInertia::of_body(p, &b.inertia))
        .collect();

    // Accumulate subtree inertias toward the base. Body b's parent joint is
    // joint b-1 by construction.
    for b in (1..nb).rev() {
        let parent = tree.joints()[b - 1].parent.0;
        let d = poses[b].position - poses[parent].position;
        let shifted = composite[b].shift_to(&d);
        composite[parent].add_assign(&shifted);
    }

    let mut m = DMatrix::<T>::zeros(6 + nj, 6 + nj);

    // Base block: [[m I, -S(h)], [S(h), I]] about the base origin.
    let base = &composite[0];
    let sh = skew3(&base.h);
    for r in 0..3 {
        m[(r, r)] = base.m;
        for c in 0..3 {
            m[(r, 3 + c)] = -sh[(r, c)];
            m[(3 + r, c)] = sh[(r, c)];
            m[(3 + r, 3 + c)] = base.i[(r, c)];
        }
    }

    for ji in 0..nj {
        let child = ji + 1;
        let axis = joint_world_axis(tree, &poses, ji);
        // Force response of the composite subtree to a unit joint acceleration;
        // the joint anchor coincides with the child body origin.
        let f_lin = cross3(&axis, &composite[child].h);
        let mut f_ang = composite[child].i * axis;
        m[(6 + ji, 6 + ji)] = dot3(&axis, &f_ang);

        let mut body = child;
        let mut point = poses[child].position;
        loop {
            let parent = tree.joints()[body - 1].parent.0;
            let parent_point = poses[parent].position;
            f_ang += cross3(&(point - parent_point), &f_lin);
            point = parent_point;
            if parent == 0 {
                for r in 0..3 {
                    m[(r, 6 + ji)] = f_lin[r];
                    m[(6 + ji, r)] = f_lin[r];
                    m[(3 + r, 6 + ji)] = f_ang[r];
                    m[(6 + ji, 3 + r)] = f_ang[r];
                }
                break;
            }
            let jj = parent - 1;
            let ancestor_axis = joint_world_axis(tree, &poses, jj);
            let entry = dot3(&ancestor_axis, &f_ang);
            m[(6 + jj, 6 + ji)] = entry;
            m[(6 + ji, 6 + jj)] = entry;
            body = parent;
        }
    }

    m
}

fn joint_world_axis<T: Real>(
    tree: &KinematicTree,
    poses: &[Pose<T>],
    ji: usize,
) -> Vector3<T> {
    poses[ji + 1].rotation * vec3_to::<T>(&tree.joints()[ji].axis)
}

/// Inverse dynamics: the generalized force satisfying
/// `out = M(q) a + h(q, nu)` including gravity and viscous joint friction.
pub fn inverse_dynamics<T: Real>(
    tree: &KinematicTree,
    q: &Configuration<T>,
    nu: &Velocity<T>,
    acc: &Acceleration<T>,
    gravity: &Vector3<f64>,
    joint_viscous: &[f64],
) -> DVector<T> {
    let poses = tree.body_poses(q);
    let nb = tree.num_bodies();
    let nj = tree.num_joints();
    debug_assert_eq!(joint_viscous.len(), nj);

    let mut omega = vec![Vector3::<T>::zeros(); nb];
    let mut vel = vec![Vector3::<T>::zeros(); nb];
    let mut domega = vec![Vector3::<T>::zeros(); nb];
    let mut accel = vec![Vector3::<T>::zeros(); nb];

    omega[0] = nu.base_angular;
    vel[0] = nu.base_linear;
    domega[0] = acc.base_angular;
    // Gravity enters as an upward acceleration of the whole system.
    accel[0] = acc.base_linear - vec3_to::<T>(gravity);

    for ji in 0..nj {
        let joint = &tree.joints()[ji];
        let child = ji + 1;
        let parent = joint.parent.0;
        let axis = joint_world_axis(tree, &poses, ji);
        let r = poses[child].position - poses[parent].position;
        let sdot = nu.joint_velocities[ji];
        let sddot = acc.joint_accelerations[ji];

        omega[child] = omega[parent] + axis * sdot;
        vel[child] = vel[parent] + cross3(&omega[parent], &r);
        let axis_dot = cross3(&omega[parent], &axis);
        domega[child] = domega[parent] + axis * sddot + axis_dot * sdot;
        accel[child] = accel[parent]
            + cross3(&domega[parent], &r)
            + cross3(&omega[parent], &cross3(&omega[parent], &r));
    }

    // Net Newton-Euler wrench per body about its own origin.
    let mut force = vec![Vector3::<T>::zeros(); nb];
    let mut moment = vec![Vector3::<T>::zeros(); nb];
    for b in 0..nb {
        let inertia = &tree.bodies()[b].inertia;
        let m = T::from_f64(inertia.mass);
        let r_c = poses[b].rotation * vec3_to::<T>(&inertia.com);
        let i_cw =
            poses[b].rotation * mat3_to::<T>(&inertia.inertia) * poses[b].rotation.transpose();
        let a_com = accel[b]
            + cross3(&domega[b], &r_c)
            + cross3(&omega[b], &cross3(&omega[b], &r_c));
        let f = a_com * m;
        let n = i_cw * domega[b] + cross3(&omega[b], &(i_cw * omega[b])) + cross3(&r_c, &f);
        force[b] = f;
        moment[b] = n;
    }

    // Propagate leaf wrenches toward the base and read joint torques off the
    // accumulated moments.
    let mut out = DVector::<T>::zeros(6 + nj);
    for b in (1..nb).rev() {
        let ji = b - 1;
        let parent = tree.joints()[ji].parent.0;
        let axis = joint_world_axis(tree, &poses, ji);
        out[6 + ji] = dot3(&axis, &moment[b])
            + T::from_f64(joint_viscous[ji]) * nu.joint_velocities[ji];
        let fb = force[b];
        let nb_ = moment[b];
        force[parent] += fb;
        moment[parent] =
            moment[parent] + nb_ + cross3(&(poses[b].position - poses[parent].position), &fb);
    }
    for i in 0..3 {
        out[i] = force[0][i];
        out[3 + i] = moment[0][i];
    }
    out
}

/// Bias term `h(q, nu)`: Coriolis/centrifugal effects, gravity, and viscous
/// joint friction.
pub fn bias_forces<T: Real>(
    tree: &KinematicTree,
    q: &Configuration<T>,
    nu: &Velocity<T>,
    gravity: &Vector3<f64>,
    joint_viscous: &[f64],
) -> DVector<T> {
    inverse_dynamics(
        tree,
        q,
        nu,
        &Acceleration::zero(tree.num_joints()),
        gravity,
        joint_viscous,
    )
}

/// Gravitational potential energy relative to the world origin.
pub fn potential_energy(tree: &KinematicTree, q: &Configuration, gravity: &Vector3<f64>) -> f64 {
    let poses = tree.body_poses(q);
    tree.bodies()
        .iter()
        .zip(poses.iter())
        .map(|(b, p)| {
            let com_world = p.position + p.rotation * b.inertia.com;
            -b.inertia.mass * gravity.dot(&com_world)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{quat_exp_integrate, quat_normalize, Body, BodyId, SpatialInertia};
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Vector4};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const GRAVITY: Vector3<f64> = Vector3::new(0.0, 0.0, -9.81);

    fn box_body(name: &str, mass: f64, com: Vector3<f64>) -> Body {
        Body {
            name: name.into(),
            inertia: SpatialInertia::uniform_box(mass, com, Vector3::new(0.4, 0.25, 0.1)),
        }
    }

    /// Floating base with a 3-joint chain, off-axis offsets and mixed axes.
    fn three_joint_tree() -> KinematicTree {
        let mut b = KinematicTree::builder(box_body("base", 1.2, Vector3::new(0.05, 0.0, 0.02)));
        let l1 = b
            .add_body(
                BodyId(0),
                Vector3::z(),
                Vector3::new(0.3, 0.1, 0.0),
                crate::linalg::rot_x(0.2),
                box_body("l1", 0.6, Vector3::new(0.1, 0.0, 0.0)),
            )
            .unwrap();
        let l2 = b
            .add_body(
                l1,
                Vector3::y(),
                Vector3::new(0.25, 0.0, 0.05),
                Matrix3::identity(),
                box_body("l2", 0.4, Vector3::new(0.12, 0.02, 0.0)),
            )
            .unwrap();
        b.add_body(
            l2,
            Vector3::x(),
            Vector3::new(0.2, 0.0, 0.0),
            crate::linalg::rot_z(-0.3),
            box_body("l3", 0.25, Vector3::new(0.08, 0.0, 0.01)),
        )
        .unwrap();
        b.build().unwrap()
    }

    fn random_state(rng: &mut StdRng, nj: usize) -> (Configuration, Velocity) {
        let mut q = Configuration::<f64>::identity(nj);
        q.base_position = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        q.base_quaternion = quat_normalize(&Vector4::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        for i in 0..nj {
            q.joint_positions[i] = rng.random_range(-0.5..0.5);
        }
        let mut nu = Velocity::<f64>::zero(nj);
        nu.base_linear = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        nu.base_angular = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        for i in 0..nj {
            nu.joint_velocities[i] = rng.random_range(-2.0..2.0);
        }
        (q, nu)
    }

    #[test]
    fn single_body_at_com_gives_block_diagonal_mass_matrix() {
        let inertia = SpatialInertia::uniform_box(2.0, Vector3::zeros(), Vector3::new(0.3, 0.2, 0.1));
        let expected_rot = inertia.inertia;
        let tree = KinematicTree::builder(Body {
            name: "solo".into(),
            inertia,
        })
        .build()
        .unwrap();
        let m = mass_matrix(&tree, &Configuration::<f64>::identity(0));
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 2.0 } else { 0.0 };
                assert_relative_eq!(m[(r, c)], want, epsilon = 1e-14);
                assert_relative_eq!(m[(3 + r, 3 + c)], expected_rot[(r, c)], epsilon = 1e-14);
                assert_relative_eq!(m[(r, 3 + c)], 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn mass_matrix_is_symmetric_positive_definite() {
        let tree = three_joint_tree();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let (q, _) = random_state(&mut rng, 3);
            let m = mass_matrix(&tree, &q);
            for r in 0..9 {
                for c in 0..9 {
                    assert!(
                        (m[(r, c)] - m[(c, r)]).abs() < 1e-10,
                        "asymmetry at ({r},{c})"
                    );
                }
            }
            assert!(
                nalgebra::Cholesky::new(m.clone()).is_some(),
                "mass matrix not positive definite"
            );
        }
    }

    #[test]
    fn mass_matrix_columns_match_inverse_dynamics() {
        let tree = three_joint_tree();
        let mut rng = StdRng::seed_from_u64(11);
        let visc = vec![0.0; 3];
        for _ in 0..20 {
            let (q, _) = random_state(&mut rng, 3);
            let m = mass_matrix(&tree, &q);
            let nu = Velocity::<f64>::zero(3);
            for col in 0..9 {
                let mut unit = DVector::<f64>::zeros(9);
                unit[col] = 1.0;
                let acc = Acceleration::from_vector(&unit);
                let tau = inverse_dynamics(&tree, &q, &nu, &acc, &Vector3::zeros(), &visc);
                for row in 0..9 {
                    assert!(
                        (m[(row, col)] - tau[row]).abs() < 1e-10,
                        "column {col} row {row}: {} vs {}",
                        m[(row, col)],
                        tau[row]
                    );
                }
            }
        }
    }

    #[test]
    fn zero_velocity_zero_gravity_bias_vanishes() {
        let tree = three_joint_tree();
        let q = Configuration::<f64>::identity(3);
        let h = bias_forces(&tree, &q, &Velocity::<f64>::zero(3), &Vector3::zeros(), &[0.0; 3]);
        assert!(h.amax() < 1e-14);
    }

    #[test]
    fn static_bias_equals_total_weight() {
        let tree = three_joint_tree();
        let mut rng = StdRng::seed_from_u64(3);
        let (q, _) = random_state(&mut rng, 3);
        let h = bias_forces(&tree, &q, &Velocity::<f64>::zero(3), &GRAVITY, &[0.0; 3]);
        let total_mass = tree.total_mass();
        // Base force rows must carry the full weight.
        assert_relative_eq!(h[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(h[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(h[2], total_mass * 9.81, epsilon = 1e-10);
    }

    #[test]
    fn viscous_friction_appears_in_joint_rows() {
        let tree = three_joint_tree();
        let q = Configuration::<f64>::identity(3);
        let mut nu = Velocity::<f64>::zero(3);
        nu.joint_velocities[1] = 2.0;
        let visc = [0.0, 0.05, 0.0];
        let h0 = bias_forces(&tree, &q, &nu, &Vector3::zeros(), &[0.0; 3]);
        let h1 = bias_forces(&tree, &q, &nu, &Vector3::zeros(), &visc);
        assert_relative_eq!(h1[7] - h0[7], 0.05 * 2.0, epsilon = 1e-14);
    }

    /// Energy-rate consistency: nu' (Mdot - 2 C) nu = 0, with Mdot from finite
    /// differences along the configuration flow.
    #[test]
    fn coriolis_term_is_passivity_consistent() {
        let tree = three_joint_tree();
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..10 {
            let (q, nu) = random_state(&mut rng, 3);
            let dt = 1e-6;
            let flow = |sign: f64| {
                let mut qf = q.clone();
                qf.base_position += nu.base_linear * (sign * dt);
                qf.base_quaternion =
                    quat_exp_integrate(&q.base_quaternion, &nu.base_angular, sign * dt);
                for i in 0..3 {
                    qf.joint_positions[i] += nu.joint_velocities[i] * sign * dt;
                }
                qf
            };
            let m_plus = mass_matrix(&tree, &flow(1.0));
            let m_minus = mass_matrix(&tree, &flow(-1.0));
            let m_dot = (m_plus - m_minus) / (2.0 * dt);

            let coriolis = bias_forces(&tree, &q, &nu, &Vector3::zeros(), &[0.0; 3]);
            let nu_vec = nu.to_vector();
            let lhs = (nu_vec.transpose() * &m_dot * &nu_vec)[0];
            let rhs = 2.0 * nu_vec.dot(&coriolis);
            assert!(
                (lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()),
                "passivity violated: {lhs} vs {rhs}"
            );
        }
    }
}
