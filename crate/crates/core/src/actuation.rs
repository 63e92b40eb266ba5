//! Servo and propulsion component models: torque/speed/thrust limits, power
//! consumption, and the catalog files the design search draws from.

use crate::ad::Real;
use crate::kinematics::{wrench_generalized, Configuration, KinematicTree};
use crate::linalg::vec3_to;
use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActuationError {
    #[error("thrust {u} N outside [0, {u_max}] for propulsion unit `{id}`")]
    ThrustOutOfBounds { id: String, u: f64, u_max: f64 },
    #[error("unknown component id `{0}`")]
    UnknownComponent(String),
    #[error("catalog file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("catalog must contain at least one servo and one propulsion unit")]
    Empty,
    #[error("duplicate component id `{0}`")]
    DuplicateId(String),
    #[error("component `{id}` has non-positive field `{field}`")]
    NonPositive { id: String, field: &'static str },
}

/// Geared DC servomotor, output-shaft referred.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServoModel {
    pub id: String,
    /// Winding resistance [ohm].
    pub resistance: f64,
    /// Velocity constant [rad/(s*V)]; its inverse is the torque constant.
    pub velocity_constant: f64,
    /// Viscous friction coefficient [N*m*s/rad].
    pub viscous_coeff: f64,
    /// Torque limit [N*m].
    pub max_torque: f64,
    /// Speed limit [rad/s].
    pub max_speed: f64,
    /// Mass [kg].
    pub mass: f64,
}

impl ServoModel {
    /// Electrical power drawn at joint speed `sdot` and torque `tau`:
    /// mechanical power, friction losses, and Joule heating of both the load
    /// torque and the friction torque (`tau_f = b_v * sdot`).
    ///
    /// Negative mechanical power is not rectified; see
    /// [`ServoModel::power_rectified`] for the variant that ignores
    /// regeneration.
    pub fn power<T: Real>(&self, sdot: T, tau: T) -> T {
        let tau_f = T::from_f64(self.viscous_coeff) * sdot;
        let rk2 = T::from_f64(self.resistance * self.velocity_constant * self.velocity_constant);
        sdot * tau + sdot * tau_f + rk2 * tau * tau + rk2 * tau_f * tau_f
    }

    /// Like [`ServoModel::power`] but clamps the mechanical term at zero, for
    /// drives that cannot recover energy.
    pub fn power_rectified<T: Real>(&self, sdot: T, tau: T) -> T {
        let mech = sdot * tau;
        self.power(sdot, tau) - mech + mech.max(T::zero())
    }

    pub fn within_limits(&self, sdot: f64, tau: f64) -> bool {
        sdot.abs() <= self.max_speed && tau.abs() <= self.max_torque
    }

    fn validate(&self) -> Result<(), ActuationError> {
        for (field, v) in [
            ("resistance", self.resistance),
            ("velocity_constant", self.velocity_constant),
            ("viscous_coeff", self.viscous_coeff),
            ("max_torque", self.max_torque),
            ("max_speed", self.max_speed),
            ("mass", self.mass),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ActuationError::NonPositive {
                    id: self.id.clone(),
                    field,
                });
            }
        }
        Ok(())
    }
}

/// Electric motor + propeller combination.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropulsionModel {
    pub id: String,
    /// Power polynomial coefficients: `W(u) = xi0 + xi1 u + xi2 u^2`.
    pub xi: [f64; 3],
    /// Reaction torque per unit thrust [m].
    pub reaction_coeff: f64,
    /// Thrust limit [N].
    pub max_thrust: f64,
    /// Mass [kg].
    pub mass: f64,
}

impl PropulsionModel {
    /// Power polynomial, valid on `[0, max_thrust]`. Bounds are not checked
    /// here; the checked entry point is [`propeller_power`].
    pub fn power<T: Real>(&self, u: T) -> T {
        T::from_f64(self.xi[0]) + T::from_f64(self.xi[1]) * u + T::from_f64(self.xi[2]) * u * u
    }

    fn validate(&self) -> Result<(), ActuationError> {
        if self.xi[2] < 0.0 {
            return Err(ActuationError::NonPositive {
                id: self.id.clone(),
                field: "xi[2]",
            });
        }
        if !(self.max_thrust > 0.0) || !(self.mass > 0.0) {
            return Err(ActuationError::NonPositive {
                id: self.id.clone(),
                field: "max_thrust/mass",
            });
        }
        // The quadratic must stay nonnegative over the admissible range.
        for step in 0..=20 {
            let u = self.max_thrust * f64::from(step) / 20.0;
            if self.power(u) < 0.0 {
                return Err(ActuationError::NonPositive {
                    id: self.id.clone(),
                    field: "power(u)",
                });
            }
        }
        Ok(())
    }
}

/// Electrical power drawn by the propulsion unit at thrust `u`.
pub fn propeller_power(prop: &PropulsionModel, u: f64) -> Result<f64, ActuationError> {
    if !(0.0..=prop.max_thrust).contains(&u) {
        return Err(ActuationError::ThrustOutOfBounds {
            id: prop.id.clone(),
            u,
            u_max: prop.max_thrust,
        });
    }
    Ok(prop.power(u))
}

/// Electrical power drawn by a servo; unchecked convenience mirror of
/// [`ServoModel::power`].
pub fn servo_power(servo: &ServoModel, sdot: f64, tau: f64) -> f64 {
    servo.power(sdot, tau)
}

/// Generalized force of a thrust `u` along the base frame x axis plus the
/// proportional reaction torque about the same axis.
pub fn thrust_generalized_force<T: Real>(
    tree: &KinematicTree,
    q: &Configuration<T>,
    prop: &PropulsionModel,
    u: T,
) -> DVector<T> {
    let poses = tree.body_poses(q);
    let x_axis = poses[0].rotation * vec3_to::<T>(&Vector3::x());
    let force = x_axis * u;
    let moment = x_axis * (T::from_f64(prop.reaction_coeff) * u);
    let mut out = DVector::zeros(6 + tree.num_joints());
    wrench_generalized(
        tree,
        &poses,
        crate::kinematics::BodyId(0),
        &poses[0].position,
        &force,
        &moment,
        &mut out,
    );
    out
}

/// The component shelf the design search selects from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentCatalog {
    #[serde(default)]
    pub schema: Option<String>,
    pub servos: Vec<ServoModel>,
    pub propulsion: Vec<PropulsionModel>,
}

impl ComponentCatalog {
    pub fn servo(&self, id: &str) -> Result<&ServoModel, ActuationError> {
        self.servos
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| ActuationError::UnknownComponent(id.to_string()))
    }

    pub fn propulsion(&self, id: &str) -> Result<&PropulsionModel, ActuationError> {
        self.propulsion
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| ActuationError::UnknownComponent(id.to_string()))
    }

    pub fn validate(&self) -> Result<(), ActuationError> {
        if self.servos.is_empty() || self.propulsion.is_empty() {
            return Err(ActuationError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for id in self
            .servos
            .iter()
            .map(|s| &s.id)
            .chain(self.propulsion.iter().map(|p| &p.id))
        {
            if !seen.insert(id.clone()) {
                return Err(ActuationError::DuplicateId(id.clone()));
            }
        }
        for s in &self.servos {
            s.validate()?;
        }
        for p in &self.propulsion {
            p.validate()?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ActuationError> {
        let text = std::fs::read_to_string(path)?;
        let catalog: ComponentCatalog = toml::from_str(&text)?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn save(&self, path: &Path) -> Result<(), ActuationError> {
        let text = toml::to_string_pretty(self).expect("catalog serializes");
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Built-in shelf of six servos and five propulsion units spanning small
    /// wing actuators up to a high-thrust pusher. Electrical constants are
    /// nominal placeholder values, not measurements; override with a catalog
    /// file for real hardware.
    pub fn default_catalog() -> Self {
        let servo = |id: &str, max_torque: f64, max_speed: f64, resistance: f64, kv: f64, bv: f64, mass: f64| ServoModel {
            id: id.to_string(),
            resistance,
            velocity_constant: kv,
            viscous_coeff: bv,
            max_torque,
            max_speed,
            mass,
        };
        let prop = |id: &str, u_max: f64, xi: [f64; 3], ku: f64, mass: f64| PropulsionModel {
            id: id.to_string(),
            xi,
            reaction_coeff: ku,
            max_thrust: u_max,
            mass,
        };
        let catalog = Self {
            schema: Some("morphco-catalog-v1".to_string()),
            servos: vec![
                servo("srv-nano", 0.22, 8.0, 8.0, 2.5, 5e-4, 0.018),
                servo("srv-s36", 0.36, 7.0, 6.5, 2.0, 1e-3, 0.023),
                servo("srv-s46", 0.46, 6.5, 6.0, 1.8, 1e-3, 0.034),
                servo("srv-m15", 1.5, 6.0, 4.5, 1.2, 2e-3, 0.082),
                servo("srv-l37", 3.7, 5.5, 3.5, 0.8, 3e-3, 0.165),
                servo("srv-xl60", 6.0, 4.5, 3.0, 0.6, 4e-3, 0.230),
            ],
            propulsion: vec![
                prop("prop-u4a", 4.0, [1.5, 6.0, 2.2], 0.008, 0.085),
                prop("prop-u4b", 4.0, [1.0, 7.5, 1.8], 0.010, 0.070),
                prop("prop-u7", 7.0, [2.5, 5.5, 1.6], 0.012, 0.140),
                prop("prop-u10", 10.0, [3.5, 5.0, 1.3], 0.015, 0.210),
                prop("prop-u10r", 10.0, [4.0, 4.2, 1.5], 0.014, 0.185),
            ],
        };
        catalog.validate().expect("default catalog is valid");
        catalog
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{quat_normalize, Body, SpatialInertia};
    use approx::assert_relative_eq;
    use nalgebra::Vector4;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn test_servo(resistance: f64, kv: f64, bv: f64) -> ServoModel {
        ServoModel {
            id: "test".into(),
            resistance,
            velocity_constant: kv,
            viscous_coeff: bv,
            max_torque: 10.0,
            max_speed: 20.0,
            mass: 0.05,
        }
    }

    fn base_only_tree() -> KinematicTree {
        KinematicTree::builder(Body {
            name: "base".into(),
            inertia: SpatialInertia::uniform_box(1.0, Vector3::zeros(), Vector3::new(0.2, 0.2, 0.2)),
        })
        .build()
        .unwrap()
    }

    #[test]
    fn servo_power_is_zero_at_rest() {
        let s = test_servo(1.0, 1.0, 0.0);
        assert_eq!(s.power(0.0, 0.0), 0.0);
    }

    #[test]
    fn servo_power_direct_substitution() {
        let s = test_servo(1.0, 1.0, 0.0);
        // sdot*tau + 0 + R kv^2 tau^2 + 0 = 1 + 1 = 2 W.
        assert_relative_eq!(s.power(1.0, 1.0), 2.0);
    }

    #[test]
    fn servo_power_matches_symbolic_expression_on_random_draws() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..100 {
            let r = rng.random_range(0.5..10.0);
            let kv = rng.random_range(0.3..3.0);
            let bv = rng.random_range(0.0..0.01);
            let sdot = rng.random_range(-8.0..8.0);
            let tau = rng.random_range(-3.0..3.0);
            let s = test_servo(r, kv, bv);
            let tau_f = bv * sdot;
            let expected = sdot * tau + sdot * tau_f + r * kv * kv * tau * tau
                + r * kv * kv * tau_f * tau_f;
            assert_relative_eq!(s.power(sdot, tau), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn rectified_power_drops_regeneration() {
        let s = test_servo(2.0, 1.5, 1e-3);
        let (sdot, tau) = (3.0, -0.5);
        assert!(sdot * tau < 0.0);
        assert_relative_eq!(
            s.power_rectified(sdot, tau),
            s.power(sdot, tau) - sdot * tau,
            max_relative = 1e-14
        );
        // No effect when mechanical power is positive.
        assert_relative_eq!(s.power_rectified(2.0, 0.4), s.power(2.0, 0.4));
    }

    #[test]
    fn propeller_power_substitution_and_idle() {
        let p = PropulsionModel {
            id: "p".into(),
            xi: [1.0, 2.0, 3.0],
            reaction_coeff: 0.01,
            max_thrust: 5.0,
            mass: 0.1,
        };
        assert_relative_eq!(propeller_power(&p, 2.0).unwrap(), 17.0);
        assert_relative_eq!(propeller_power(&p, 0.0).unwrap(), 1.0);
        assert!(propeller_power(&p, 6.0).is_err());
        assert!(propeller_power(&p, -0.1).is_err());
    }

    #[test]
    fn power_polynomial_recoverable_from_three_samples() {
        let p = PropulsionModel {
            id: "p".into(),
            xi: [2.5, 5.5, 1.6],
            reaction_coeff: 0.01,
            max_thrust: 7.0,
            mass: 0.1,
        };
        // Fit a quadratic through (0, 1, 2) N samples and compare coefficients.
        let w0 = p.power(0.0);
        let w1 = p.power(1.0);
        let w2 = p.power(2.0);
        let xi0 = w0;
        let xi2 = (w2 - 2.0 * w1 + w0) / 2.0;
        let xi1 = w1 - w0 - xi2;
        assert_relative_eq!(xi0, p.xi[0], max_relative = 1e-12);
        assert_relative_eq!(xi1, p.xi[1], max_relative = 1e-12);
        assert_relative_eq!(xi2, p.xi[2], max_relative = 1e-12);
    }

    #[test]
    fn thrust_force_is_zero_and_linear() {
        let tree = base_only_tree();
        let q = Configuration::<f64>::identity(0);
        let prop = ComponentCatalog::default_catalog().propulsion[0].clone();
        let f0 = thrust_generalized_force(&tree, &q, &prop, 0.0);
        assert!(f0.amax() == 0.0);
        let f1 = thrust_generalized_force(&tree, &q, &prop, 2.0);
        let f2 = thrust_generalized_force(&tree, &q, &prop, 4.0);
        assert_relative_eq!(f2, f1 * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn thrust_at_identity_matches_jacobian_transpose_by_hand() {
        let tree = base_only_tree();
        let q = Configuration::<f64>::identity(0);
        let prop = PropulsionModel {
            id: "p".into(),
            xi: [1.0, 1.0, 1.0],
            reaction_coeff: 0.01,
            max_thrust: 10.0,
            mass: 0.1,
        };
        let f = thrust_generalized_force(&tree, &q, &prop, 4.0);
        assert_relative_eq!(f[0], 4.0);
        assert_relative_eq!(f[1], 0.0);
        assert_relative_eq!(f[2], 0.0);
        assert_relative_eq!(f[3], 0.04);
        assert_relative_eq!(f[4], 0.0);
        assert_relative_eq!(f[5], 0.0);
    }

    #[test]
    fn thrust_rows_rotate_with_the_base() {
        let tree = base_only_tree();
        let mut q = Configuration::<f64>::identity(0);
        q.base_quaternion = quat_normalize(&Vector4::new(0.8, 0.1, -0.5, 0.3));
        let prop = ComponentCatalog::default_catalog().propulsion[0].clone();
        let f = thrust_generalized_force(&tree, &q, &prop, 3.0);
        let r = crate::kinematics::quat_to_rotation(&q.base_quaternion);
        let expected_force = r * Vector3::new(3.0, 0.0, 0.0);
        for i in 0..3 {
            assert_relative_eq!(f[i], expected_force[i], epsilon = 1e-14);
            assert_relative_eq!(f[3 + i], prop.reaction_coeff * expected_force[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn catalog_roundtrip_and_validation() {
        let catalog = ComponentCatalog::default_catalog();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.toml");
        catalog.save(&path).unwrap();
        let loaded = ComponentCatalog::load(&path).unwrap();
        assert_eq!(loaded.servos.len(), 6);
        assert_eq!(loaded.propulsion.len(), 5);
        assert!(loaded.servo("srv-l37").is_ok());
        assert!(loaded.servo("missing").is_err());
    }

    #[test]
    fn malformed_catalog_reports_line_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(
            &path,
            "[[servos]]\nid = \"x\"\nresistance = \"not a number\"\n",
        )
        .unwrap();
        let err = ComponentCatalog::load(&path).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 3"), "error should carry the line: {msg}");
    }
}
