//! Plain time-domain simulation of a kinematic tree under applied generalized
//! forces. Used as an independent cross-check of the trajectory transcription
//! and for conservation tests; not part of the optimization path.

use crate::kinematics::{
    Acceleration, mass_matrix, potential_energy, quat_exp_integrate, Configuration, KinematicTree, Velocity,
};
use nalgebra::{DVector, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("mass matrix factorization failed")]
    SingularMassMatrix,
}

/// Solve `M(q) a = applied - h(q, nu)` for the generalized acceleration.
pub fn forward_dynamics(
    tree: &KinematicTree,
    q: &Configuration,
    nu: &Velocity,
    applied: &DVector<f64>,
    gravity: &Vector3<f64>,
    joint_viscous: &[f64],
) -> Result<Acceleration, SimError> {
    let m = mass_matrix(tree, q);
    let h = crate::kinematics::bias_forces(tree, q, nu, gravity, joint_viscous);
    let rhs = applied - h;
    let chol = nalgebra::Cholesky::new(m).ok_or(SimError::SingularMassMatrix)?;
    Ok(Acceleration::from_vector(&chol.solve(&rhs)))
}

fn advance_configuration(q: &Configuration, nu: &Velocity, dt: f64) -> Configuration {
    Configuration {
        base_position: q.base_position + nu.base_linear * dt,
        base_quaternion: quat_exp_integrate(&q.base_quaternion, &nu.base_angular, dt),
        joint_positions: &q.joint_positions + &nu.joint_velocities * dt,
    }
}

fn add_scaled(nu: &Velocity, acc: &Acceleration, dt: f64) -> Velocity {
    Velocity {
        base_linear: nu.base_linear + acc.base_linear * dt,
        base_angular: nu.base_angular + acc.base_angular * dt,
        joint_velocities: &nu.joint_velocities + &acc.joint_accelerations * dt,
    }
}

/// One classical Runge-Kutta step with quaternion retraction per stage.
///
/// `forces` maps the current state to the applied generalized force vector
/// (joint torques stacked below a base wrench, plus any external wrenches
/// already mapped through their Jacobians).
pub fn rk4_step<F>(
    tree: &KinematicTree,
    q: &Configuration,
    nu: &Velocity,
    dt: f64,
    gravity: &Vector3<f64>,
    joint_viscous: &[f64],
    forces: &F,
) -> Result<(Configuration, Velocity), SimError>
where
    F: Fn(&Configuration, &Velocity) -> DVector<f64>,
{
    let eval = |qs: &Configuration, ns: &Velocity| -> Result<Acceleration, SimError> {
        forward_dynamics(tree, qs, ns, &forces(qs, ns), gravity, joint_viscous)
    };

    let k1 = eval(q, nu)?;
    let q2 = advance_configuration(q, nu, 0.5 * dt);
    let n2 = add_scaled(nu, &k1, 0.5 * dt);
    let k2 = eval(&q2, &n2)?;
    let q3 = advance_configuration(q, &n2, 0.5 * dt);
    let n3 = add_scaled(nu, &k2, 0.5 * dt);
    let k3 = eval(&q3, &n3)?;
    let q4 = advance_configuration(q, &n3, dt);
    let n4 = add_scaled(nu, &k3, dt);
    let k4 = eval(&q4, &n4)?;

    // Velocity update from the weighted stage accelerations.
    let acc_avg = Acceleration {
        base_linear: (k1.base_linear + k2.base_linear * 2.0 + k3.base_linear * 2.0 + k4.base_linear)
            / 6.0,
        base_angular: (k1.base_angular
            + k2.base_angular * 2.0
            + k3.base_angular * 2.0
            + k4.base_angular)
            / 6.0,
        joint_accelerations: (&k1.joint_accelerations
            + &k2.joint_accelerations * 2.0
            + &k3.joint_accelerations * 2.0
            + &k4.joint_accelerations)
            / 6.0,
    };
    // Configuration update from the weighted stage velocities.
    let nu_avg = Velocity {
        base_linear: (nu.base_linear + n2.base_linear * 2.0 + n3.base_linear * 2.0 + n4.base_linear)
            / 6.0,
        base_angular: (nu.base_angular
            + n2.base_angular * 2.0
            + n3.base_angular * 2.0
            + n4.base_angular)
            / 6.0,
        joint_velocities: (&nu.joint_velocities
            + &n2.joint_velocities * 2.0
            + &n3.joint_velocities * 2.0
            + &n4.joint_velocities)
            / 6.0,
    };

    Ok((
        advance_configuration(q, &nu_avg, dt),
        add_scaled(nu, &acc_avg, dt),
    ))
}

/// Kinetic plus gravitational potential energy of the state.
pub fn total_energy(
    tree: &KinematicTree,
    q: &Configuration,
    nu: &Velocity,
    gravity: &Vector3<f64>,
) -> f64 {
    let m = mass_matrix(tree, q);
    let v = nu.to_vector();
    0.5 * (v.transpose() * m * &v)[0] + potential_energy(tree, q, gravity)
}
