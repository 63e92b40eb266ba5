//! Core library for co-designing morphing winged drones.
//!
//! The pipeline: decode a design chromosome into a floating-base multibody
//! drone model with per-body aerodynamic coefficient models and off-the-shelf
//! actuator parameters, transcribe flight scenarios into sparse nonlinear
//! programs by direct multiple shooting, solve them for energy/time metrics,
//! and drive the whole thing from an NSGA-II search that returns a Pareto
//! archive over mission energy and mission time.

pub mod actuation;
pub mod ad;
pub mod aero;
pub mod kinematics;
pub mod linalg;
pub mod sim;

pub use ad::{Dual, Real};
pub use kinematics::{
    bias_forces, forward_kinematics, frame_jacobian, inverse_dynamics, mass_matrix,
    quat_exp_integrate, Configuration, KinematicTree, SpatialWrench, Velocity,
};
