//! Per-body aerodynamics: flow state, sparse sinusoidal coefficient models
//! fitted by Lasso regression to panel-method style data tables, and the
//! resulting force/moment wrenches.
//!
//! Internally the airframe uses x-forward / y-left / z-up body frames. The
//! classical flight-dynamics quantities (angle of attack, sideslip, wind frame)
//! are defined in the x-forward / y-right / z-down convention; the conversion
//! is a fixed 180-degree flip about x applied where the two meet.

pub mod basis;
pub mod lasso;
mod synthetic;
mod table;

pub use basis::{BasisDescriptor, BasisTerm, TermFamily};
pub use lasso::{kill_lambda, lasso_fit, LassoFit, LassoOptions};
pub use synthetic::{
    synthetic_fuselage_table, synthetic_wing_table, AeroLibrary, SyntheticNoise,
};
pub use table::{load_model, save_model, sidecar_path, AeroSample, AeroSampleTable, AeroTableMetadata};

use crate::ad::Real;
use crate::kinematics::{FrameId, Pose, SpatialWrench};
use crate::linalg::{norm3, vec3_to};
use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AeroError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("table schema error: {0}")]
    Schema(String),
    #[error("toml parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("duplicate sample at alpha={alpha} beta={beta} Re={reynolds} (row {row})")]
    DuplicateSample {
        alpha: f64,
        beta: f64,
        reynolds: f64,
        row: usize,
    },
    #[error("basis has {terms} terms but table provides only {rows} rows")]
    NotEnoughRows { terms: usize, rows: usize },
    #[error("weight vector length {got} does not match basis length {expected}")]
    WeightLengthMismatch { expected: usize, got: usize },
    #[error("no aerodynamic model for body `{body}` at aspect ratio {aspect_ratio}")]
    UnknownAspectRatio { body: String, aspect_ratio: f64 },
}

/// Ambient air properties.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AirEnvironment {
    /// Density [kg/m^3].
    pub density: f64,
    /// Kinematic viscosity [m^2/s].
    pub kinematic_viscosity: f64,
}

impl Default for AirEnvironment {
    fn default() -> Self {
        Self {
            density: 1.225,
            kinematic_viscosity: 1.46e-5,
        }
    }
}

/// Reference geometry of one aerodynamic body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AeroGeometry {
    /// Planform area [m^2].
    pub planform_area: f64,
    /// Mean aerodynamic chord [m].
    pub mean_chord: f64,
    /// Span [m].
    pub span: f64,
    /// Length used in the Reynolds number (chord for wings, body length for
    /// the fuselage).
    pub characteristic_length: f64,
}

/// Flow state of one body.
#[derive(Debug, Clone)]
pub struct AeroState<T: Real = f64> {
    /// Angle of attack [rad], positive nose-up relative to the flow.
    pub alpha: T,
    /// Sideslip angle [rad], positive for flow from starboard.
    pub beta: T,
    pub reynolds: T,
    pub airspeed_norm: T,
    /// Rotation mapping wind-frame vectors to world coordinates.
    pub wind_frame_rotation: Matrix3<T>,
    /// Set when the airspeed fell below the resolvable threshold and the flow
    /// angles were defined as zero.
    pub degenerate: bool,
}

/// One evaluation of the six aerodynamic coefficients.
#[derive(Debug, Clone, Copy)]
pub struct AeroCoefficients<T: Real = f64> {
    pub drag: T,
    pub lift: T,
    pub side: T,
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Real> AeroCoefficients<T> {
    pub fn zero() -> Self {
        Self {
            drag: T::zero(),
            lift: T::zero(),
            side: T::zero(),
            roll: T::zero(),
            pitch: T::zero(),
            yaw: T::zero(),
        }
    }
}

/// Ranges over which a coefficient model is trusted (radians internally).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidityBox {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub reynolds: [f64; 2],
}

impl ValidityBox {
    pub fn contains(&self, alpha: f64, beta: f64, reynolds: f64) -> bool {
        alpha >= self.alpha[0]
            && alpha <= self.alpha[1]
            && beta >= self.beta[0]
            && beta <= self.beta[1]
            && reynolds >= self.reynolds[0]
            && reynolds <= self.reynolds[1]
    }
}

/// Sparse sinusoidal model of the six coefficients over (alpha, beta, Re).
#[derive(Debug, Clone)]
pub struct CoefficientModel {
    pub basis: BasisDescriptor,
    /// Weight vectors ordered (CD, CL, CY, Cl, Cm, Cn).
    pub weights: [Vec<f64>; 6],
    pub intercepts: [f64; 6],
    pub validity: ValidityBox,
}

impl CoefficientModel {
    /// All-zero model, useful as a stub and in tests.
    pub fn zero(basis: BasisDescriptor, validity: ValidityBox) -> Self {
        let len = basis.len();
        Self {
            basis,
            weights: std::array::from_fn(|_| vec![0.0; len]),
            intercepts: [0.0; 6],
            validity,
        }
    }

    pub fn validate(&self) -> Result<(), AeroError> {
        for w in &self.weights {
            if w.len() != self.basis.len() {
                return Err(AeroError::WeightLengthMismatch {
                    expected: self.basis.len(),
                    got: w.len(),
                });
            }
        }
        Ok(())
    }

    /// Evaluate with arguments clamped to the validity box.
    pub fn eval<T: Real>(&self, alpha: T, beta: T, reynolds: T) -> AeroCoefficients<T> {
        let a = alpha.clamp(self.validity.alpha[0], self.validity.alpha[1]);
        let b = beta.clamp(self.validity.beta[0], self.validity.beta[1]);
        let re = reynolds.clamp(self.validity.reynolds[0], self.validity.reynolds[1]);
        let at = |i: usize| self.basis.predict(&self.weights[i], self.intercepts[i], a, b, re);
        AeroCoefficients {
            drag: at(0),
            lift: at(1),
            side: at(2),
            roll: at(3),
            pitch: at(4),
            yaw: at(5),
        }
    }
}

/// Evaluate a coefficient model, reporting whether the query point had to be
/// clamped to the validity box (an extrapolation warning to the caller).
pub fn eval_coefficients(
    model: &CoefficientModel,
    alpha: f64,
    beta: f64,
    reynolds: f64,
) -> (AeroCoefficients<f64>, bool) {
    let clamped = !model.validity.contains(alpha, beta, reynolds);
    (model.eval(alpha, beta, reynolds), clamped)
}

/// Airspeed below which the flow direction is considered unresolvable.
pub const DEGENERATE_AIRSPEED: f64 = 1e-6;

/// Wind-to-body rotation for the internal y-left/z-up body convention.
///
/// Columns are the wind-frame axes in body coordinates: the x axis points along
/// the relative airflow, the z axis is the (downward) lift axis in the plane of
/// symmetry.
fn wind_rotation_in_body<T: Real>(alpha: T, beta: T) -> Matrix3<T> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Matrix3::new(
        ca * cb,
        -(ca * sb),
        -sa,
        -sb,
        -cb,
        T::zero(),
        -(sa * cb),
        sa * sb,
        -ca,
    )
}

/// Flow state of a body given its world pose and origin velocity.
///
/// The angular velocity is accepted for interface completeness but does not
/// enter the steady-flow model.
pub fn compute_aero_state<T: Real>(
    body_pose: &Pose<T>,
    body_velocity: (&Vector3<T>, &Vector3<T>),
    wind_velocity: &Vector3<f64>,
    geometry: &AeroGeometry,
    air: &AirEnvironment,
) -> AeroState<T> {
    let (linear, _angular) = body_velocity;
    let v_air_world = *linear - vec3_to::<T>(wind_velocity);
    let airspeed_norm = norm3(&v_air_world);
    let reynolds =
        airspeed_norm * T::from_f64(geometry.characteristic_length / air.kinematic_viscosity);

    if airspeed_norm.value() < DEGENERATE_AIRSPEED {
        return AeroState {
            alpha: T::zero(),
            beta: T::zero(),
            reynolds,
            airspeed_norm,
            wind_frame_rotation: body_pose.rotation * wind_rotation_in_body(T::zero(), T::zero()),
            degenerate: true,
        };
    }

    let v_body = body_pose.rotation.transpose() * v_air_world;
    // Flight-dynamics components: forward, starboard, down.
    let u = v_body[0];
    let v_star = -v_body[1];
    let w_down = -v_body[2];
    let alpha = w_down.atan2(u);
    let beta = (v_star / airspeed_norm).asin_clamped();

    AeroState {
        alpha,
        beta,
        reynolds,
        airspeed_norm,
        wind_frame_rotation: body_pose.rotation * wind_rotation_in_body(alpha, beta),
        degenerate: false,
    }
}

/// Force and moment on a body, world coordinates, acting at its aero frame.
pub fn body_wrench<T: Real>(
    state: &AeroState<T>,
    model: &CoefficientModel,
    geometry: &AeroGeometry,
    air_density: f64,
    frame: FrameId,
) -> SpatialWrench<T> {
    body_wrench_mirrored(state, model, geometry, air_density, frame, false)
}

/// Like [`body_wrench`] but for the y-mirror twin of the body the model was
/// fitted on: the flow is evaluated with flipped sideslip and the lateral
/// coefficients change sign.
pub fn body_wrench_mirrored<T: Real>(
    state: &AeroState<T>,
    model: &CoefficientModel,
    geometry: &AeroGeometry,
    air_density: f64,
    frame: FrameId,
    mirrored: bool,
) -> SpatialWrench<T> {
    let beta = if mirrored { -state.beta } else { state.beta };
    let mut c = model.eval(state.alpha, beta, state.reynolds);
    if mirrored {
        c.side = -c.side;
        c.roll = -c.roll;
        c.yaw = -c.yaw;
    }
    let q_s = T::from_f64(0.5 * air_density)
        * state.airspeed_norm
        * state.airspeed_norm
        * T::from_f64(geometry.planform_area);
    let force_wind = Vector3::new(-(q_s * c.drag), q_s * c.side, -(q_s * c.lift));
    let span = T::from_f64(geometry.span);
    let chord = T::from_f64(geometry.mean_chord);
    let moment_wind = Vector3::new(
        q_s * span * c.roll,
        q_s * chord * c.pitch,
        q_s * span * c.yaw,
    );
    SpatialWrench {
        force: state.wind_frame_rotation * force_wind,
        moment: state.wind_frame_rotation * moment_wind,
        frame,
    }
}

/// Fitted model together with its per-coefficient fit quality.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub model: CoefficientModel,
    /// Root-mean-square residual per coefficient, ordered (CD, CL, CY, Cl, Cm, Cn).
    pub rmse: [f64; 6],
    pub warnings: Vec<String>,
}

/// Build the design matrix of a table under a basis.
fn design_matrix(table: &AeroSampleTable, basis: &BasisDescriptor) -> DMatrix<f64> {
    let n = table.samples.len();
    let p = basis.len();
    let mut x = DMatrix::zeros(n, p);
    let mut row = vec![0.0; p];
    for (i, s) in table.samples.iter().enumerate() {
        basis.features(s.alpha, s.beta, s.reynolds, &mut row);
        for j in 0..p {
            x[(i, j)] = row[j];
        }
    }
    x
}

/// Fit all six coefficient channels of a sample table.
pub fn fit_coefficients(
    table: &AeroSampleTable,
    basis: &BasisDescriptor,
    lambda: f64,
) -> Result<FittedModel, AeroError> {
    if table.samples.len() <= basis.len() {
        return Err(AeroError::NotEnoughRows {
            terms: basis.len(),
            rows: table.samples.len(),
        });
    }
    let x = design_matrix(table, basis);
    let options = LassoOptions {
        lambda,
        ..Default::default()
    };

    let mut weights: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::new());
    let mut intercepts = [0.0; 6];
    let mut rmse = [0.0; 6];
    let mut warnings = Vec::new();
    for ch in 0..6 {
        let y: Vec<f64> = table.samples.iter().map(|s| s.coeffs[ch]).collect();
        let fit = lasso_fit(&x, &y, &options);
        warnings.extend(
            fit.warnings
                .iter()
                .map(|w| format!("{}: {w}", table::COEFF_NAMES[ch])),
        );
        weights[ch] = fit.weights;
        intercepts[ch] = fit.intercept;
        rmse[ch] = fit.rmse;
    }
    Ok(FittedModel {
        model: CoefficientModel {
            basis: basis.clone(),
            weights,
            intercepts,
            validity: table.metadata.validity,
        },
        rmse,
        warnings,
    })
}

/// Pick a regularization weight by k-fold cross validation over a candidate
/// grid; folds are assigned round-robin by row index, so the result is
/// deterministic. Returns the winning lambda and the mean validation RMSE per
/// candidate.
pub fn select_lambda(
    table: &AeroSampleTable,
    basis: &BasisDescriptor,
    candidates: &[f64],
    folds: usize,
) -> (f64, Vec<f64>) {
    let x = design_matrix(table, basis);
    let n = table.samples.len();
    let mut scores = vec![0.0; candidates.len()];
    for (ci, &lambda) in candidates.iter().enumerate() {
        let mut total = 0.0;
        for ch in 0..6 {
            let y: Vec<f64> = table.samples.iter().map(|s| s.coeffs[ch]).collect();
            for fold in 0..folds {
                let train: Vec<usize> = (0..n).filter(|i| i % folds != fold).collect();
                let test: Vec<usize> = (0..n).filter(|i| i % folds == fold).collect();
                let xt = x.select_rows(train.iter());
                let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
                let fit = lasso_fit(
                    &xt,
                    &yt,
                    &LassoOptions {
                        lambda,
                        ..Default::default()
                    },
                );
                let mut sq = 0.0;
                for &i in &test {
                    let mut pred = fit.intercept;
                    for j in 0..basis.len() {
                        pred += fit.weights[j] * x[(i, j)];
                    }
                    sq += (pred - y[i]) * (pred - y[i]);
                }
                total += sq / test.len() as f64;
            }
        }
        scores[ci] = (total / (6.0 * folds as f64)).sqrt();
    }
    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    (candidates[best], scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::quat_to_rotation;
    use approx::assert_relative_eq;

    fn wing_geometry() -> AeroGeometry {
        AeroGeometry {
            planform_area: 0.1,
            mean_chord: 0.2,
            span: 0.5,
            characteristic_length: 0.2,
        }
    }

    fn wide_validity() -> ValidityBox {
        ValidityBox {
            alpha: [-0.5, 0.5],
            beta: [-1.0, 1.0],
            reynolds: [1e4, 1e7],
        }
    }

    fn identity_pose() -> Pose {
        Pose {
            position: Vector3::zeros(),
            rotation: Matrix3::identity(),
        }
    }

    #[test]
    fn axis_aligned_flow_has_zero_angles() {
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        assert_relative_eq!(state.alpha, 0.0);
        assert_relative_eq!(state.beta, 0.0);
        assert_relative_eq!(state.airspeed_norm, 10.0);
        assert!(!state.degenerate);
    }

    #[test]
    fn headwind_adds_to_airspeed() {
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::new(-1.0, 0.0, 0.0),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        assert_relative_eq!(state.airspeed_norm, 11.0);
    }

    #[test]
    fn nose_up_pitch_appears_as_angle_of_attack() {
        let pitch = 5.0_f64.to_radians();
        let q = crate::kinematics::quat_from_ypr(0.0, pitch, 0.0);
        let pose = Pose {
            position: Vector3::zeros(),
            rotation: quat_to_rotation(&q),
        };
        let state = compute_aero_state(
            &pose,
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        assert_relative_eq!(state.alpha, pitch, epsilon = 1e-9);
        assert_relative_eq!(state.beta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn reynolds_number_scales_with_speed_and_length() {
        let air = AirEnvironment::default();
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &air,
        );
        assert_relative_eq!(
            state.reynolds,
            10.0 * 0.2 / air.kinematic_viscosity,
            max_relative = 1e-14
        );
    }

    #[test]
    fn standstill_flow_is_degenerate() {
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(1e-9, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        assert!(state.degenerate);
        assert_eq!(state.alpha, 0.0);
        assert_eq!(state.beta, 0.0);
    }

    #[test]
    fn wind_rotation_is_orthonormal() {
        let r = wind_rotation_in_body(0.21, -0.37);
        assert_relative_eq!(r * r.transpose(), Matrix3::identity(), epsilon = 1e-14);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_weight_model_evaluates_to_zero() {
        let model = CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        let c = model.eval(0.1, 0.0, 2e5);
        assert_eq!(c.drag, 0.0);
        assert_eq!(c.lift, 0.0);
        assert_eq!(c.yaw, 0.0);
    }

    #[test]
    fn extrapolation_is_flagged_and_clamped() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        // lift = sin(alpha)
        model.weights[1][0] = 1.0;
        assert_eq!(model.basis.terms[0].family, TermFamily::SinCos);
        let (inside, clamped_in) = eval_coefficients(&model, 0.3, 0.0, 2e5);
        assert!(!clamped_in);
        let (outside, clamped_out) = eval_coefficients(&model, 0.9, 0.0, 2e5);
        assert!(clamped_out);
        assert_relative_eq!(outside.lift, 0.5_f64.sin(), epsilon = 1e-12);
        assert_relative_eq!(inside.lift, 0.3_f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn drag_only_wrench_opposes_the_flow() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        model.intercepts[0] = 1.0; // CD = 1
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        let w = body_wrench(&state, &model, &wing_geometry(), 1.225, FrameId(0));
        let magnitude = 0.5 * 1.225 * 100.0 * 0.1;
        assert_relative_eq!(w.force, Vector3::new(-magnitude, 0.0, 0.0), epsilon = 1e-12);
        assert_relative_eq!(w.moment, Vector3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn lift_points_up_in_level_flight() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        model.intercepts[1] = 0.8; // CL = 0.8
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        let w = body_wrench(&state, &model, &wing_geometry(), 1.225, FrameId(0));
        let magnitude = 0.5 * 1.225 * 100.0 * 0.1 * 0.8;
        assert_relative_eq!(w.force, Vector3::new(0.0, 0.0, magnitude), epsilon = 1e-12);
    }

    #[test]
    fn pitch_moment_raises_the_nose() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        model.intercepts[4] = 0.5; // Cm > 0: nose-up
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        let w = body_wrench(&state, &model, &wing_geometry(), 1.225, FrameId(0));
        // Nose-up moment about the starboard axis = negative about the y-left axis.
        assert!(w.moment[1] < 0.0);
        let nose_velocity = w.moment.cross(&Vector3::x());
        assert!(nose_velocity[2] > 0.0);
    }

    #[test]
    fn wrench_scales_quadratically_with_airspeed() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        model.intercepts[0] = 0.4;
        model.intercepts[1] = 0.9;
        let geometry = wing_geometry();
        let air = AirEnvironment::default();
        let state_at = |speed: f64| {
            compute_aero_state(
                &identity_pose(),
                (&Vector3::new(speed, 0.0, 0.0), &Vector3::zeros()),
                &Vector3::zeros(),
                &geometry,
                &air,
            )
        };
        // Pin Re so the coefficients themselves cannot change with speed.
        let mut s1 = state_at(8.0);
        let mut s2 = state_at(16.0);
        s1.reynolds = 2e5;
        s2.reynolds = 2e5;
        let w1 = body_wrench(&s1, &model, &geometry, air.density, FrameId(0));
        let w2 = body_wrench(&s2, &model, &geometry, air.density, FrameId(0));
        assert_relative_eq!(w2.force, w1.force * 4.0, epsilon = 1e-10);
        assert_relative_eq!(w2.moment, w1.moment * 4.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_airspeed_gives_zero_wrench() {
        let mut model =
            CoefficientModel::zero(BasisDescriptor::default_basis(), wide_validity());
        model.intercepts[0] = 1.0;
        let state = compute_aero_state(
            &identity_pose(),
            (&Vector3::zeros(), &Vector3::zeros()),
            &Vector3::zeros(),
            &wing_geometry(),
            &AirEnvironment::default(),
        );
        let w = body_wrench(&state, &model, &wing_geometry(), 1.225, FrameId(0));
        assert_eq!(w.force.norm(), 0.0);
        assert_eq!(w.moment.norm(), 0.0);
    }

    #[test]
    fn synthetic_sinusoid_is_recovered_by_the_fit() {
        // CL = 2 sin(alpha) cos(beta), sampled on a grid, fitted at lambda = 0.
        let basis = BasisDescriptor::default_basis();
        let mut samples = Vec::new();
        for ia in -5..=5 {
            for ib in -6..=6 {
                for ire in 0..3 {
                    let alpha = f64::from(ia) * 0.03;
                    let beta = f64::from(ib) * 0.08;
                    let re = 1e5 + f64::from(ire) * 2e5;
                    let mut coeffs = [0.0; 6];
                    coeffs[1] = 2.0 * alpha.sin() * beta.cos();
                    samples.push(AeroSample {
                        alpha,
                        beta,
                        reynolds: re,
                        coeffs,
                    });
                }
            }
        }
        let table = AeroSampleTable {
            samples,
            metadata: AeroTableMetadata {
                body: "wing".into(),
                airfoil: "test".into(),
                aspect_ratio: 3.0,
                taper_ratio: 1.0,
                validity: ValidityBox {
                    alpha: [-0.15, 0.15],
                    beta: [-0.48, 0.48],
                    reynolds: [1e5, 5e5],
                },
            },
        };
        let fitted = fit_coefficients(&table, &basis, 0.0).unwrap();
        let c = fitted.model.eval(0.1, 0.0, 2e5);
        assert_relative_eq!(c.lift, 2.0 * 0.1_f64.sin(), epsilon = 1e-3);
        assert!(fitted.rmse[1] < 1e-8);
    }

    #[test]
    fn mirror_evaluation_flips_lateral_quantities() {
        let table = synthetic_wing_table(3.0, None);
        let fitted = fit_coefficients(&table, &BasisDescriptor::default_basis(), 1e-6).unwrap();
        let model = &fitted.model;
        let state = AeroState {
            alpha: 0.05,
            beta: 0.2,
            reynolds: 2e5,
            airspeed_norm: 10.0,
            wind_frame_rotation: Matrix3::identity(),
            degenerate: false,
        };
        let w = body_wrench(&state, model, &wing_geometry(), 1.225, FrameId(0));
        let wm = body_wrench_mirrored(&state, model, &wing_geometry(), 1.225, FrameId(0), true);
        // Same dynamic pressure; drag/lift/pitch from beta-mirrored flow, lateral
        // channels sign-flipped on top.
        let c = model.eval(0.05, -0.2, 2e5);
        let q_s = 0.5 * 1.225 * 100.0 * 0.1;
        assert_relative_eq!(wm.force[0], -q_s * c.drag, epsilon = 1e-12);
        assert_relative_eq!(wm.force[1], -q_s * c.side, epsilon = 1e-12);
        let _ = w;
    }

    #[test]
    fn fitted_symmetric_table_respects_mirror_symmetry() {
        let table = synthetic_wing_table(3.5, None);
        let fitted = fit_coefficients(&table, &BasisDescriptor::default_basis(), 1e-6).unwrap();
        let model = fitted.model;
        let tol = fitted.rmse.iter().cloned().fold(0.0, f64::max).max(1e-9) * 10.0 + 1e-9;
        for &(a, b) in &[(0.05, 0.1), (-0.1, 0.3), (0.12, -0.2)] {
            let plus = model.eval(a, b, 2e5);
            let minus = model.eval(a, -b, 2e5);
            assert!(
                (plus.side + minus.side).abs() <= tol,
                "CY not odd in beta: {} vs {}",
                plus.side,
                minus.side
            );
            assert!(
                (plus.drag - minus.drag).abs() <= tol,
                "CD not even in beta"
            );
        }
    }
}
