//! Synthetic coefficient tables for running the toolkit without panel-method
//! data, plus the per-aspect-ratio model library the assembler draws from.
//!
//! The synthetic coefficients are smooth flat-plate-like analytic surrogates
//! (lifting-line lift slope, parabolic induced drag, restoring tail moments for
//! the fuselage). They are stand-ins for real aerodynamic data and are labeled
//! as such in the table metadata.

use super::table::{AeroSample, AeroSampleTable, AeroTableMetadata};
use super::{fit_coefficients, AeroError, BasisDescriptor, CoefficientModel, ValidityBox};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Optional measurement noise for fit-recovery experiments.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticNoise {
    pub sigma: f64,
    pub seed: u64,
}

fn wing_coeffs(aspect_ratio: f64, alpha: f64, beta: f64, reynolds: f64) -> [f64; 6] {
    let ar_factor = aspect_ratio / (aspect_ratio + 2.0);
    let re_factor = 1.0 + 0.03 * (reynolds / 2e5).ln();
    let cl = 2.0 * std::f64::consts::PI * ar_factor * alpha.sin() * alpha.cos() * beta.cos()
        * re_factor;
    let cd0 = 0.02 * (2e5 / reynolds).powf(0.2);
    let cd = cd0
        + cl * cl / (std::f64::consts::PI * aspect_ratio * 0.85)
        + 0.05 * beta.sin() * beta.sin();
    let cy = -0.10 * beta.sin() * alpha.cos();
    let c_roll = -0.06 * beta.sin();
    let c_pitch = -0.05 * alpha.sin() * beta.cos();
    let c_yaw = 0.02 * beta.sin();
    [cd, cl, cy, c_roll, c_pitch, c_yaw]
}

fn fuselage_coeffs(alpha: f64, beta: f64, reynolds: f64) -> [f64; 6] {
    let cl = 0.8 * alpha.sin() * alpha.cos() * beta.cos();
    let cd = 0.06 * (2e5 / reynolds).powf(0.15)
        + 0.5 * alpha.sin() * alpha.sin()
        + 0.3 * beta.sin() * beta.sin();
    let cy = -0.5 * beta.sin() * alpha.cos();
    let c_roll = -0.02 * beta.sin();
    // Horizontal and vertical stabilizers: restoring pitch and weathercock yaw.
    let c_pitch = -0.9 * alpha.sin() * beta.cos();
    let c_yaw = 0.35 * beta.sin() * alpha.cos();
    [cd, cl, cy, c_roll, c_pitch, c_yaw]
}

fn build_table(
    body: &str,
    airfoil: &str,
    aspect_ratio: f64,
    alpha_deg: (f64, f64, f64),
    beta_deg: (f64, f64, f64),
    reynolds: &[f64],
    coeffs: impl Fn(f64, f64, f64) -> [f64; 6],
    noise: Option<SyntheticNoise>,
) -> AeroSampleTable {
    let mut rng = noise.map(|n| (ChaCha8Rng::seed_from_u64(n.seed), n.sigma));
    let steps = |(lo, hi, step): (f64, f64, f64)| {
        let count = ((hi - lo) / step).round() as usize + 1;
        (0..count).map(move |i| (lo + i as f64 * step).to_radians())
    };
    let mut samples = Vec::new();
    for alpha in steps(alpha_deg) {
        for beta in steps(beta_deg) {
            for &re in reynolds {
                let mut c = coeffs(alpha, beta, re);
                if let Some((rng, sigma)) = rng.as_mut() {
                    for v in c.iter_mut() {
                        *v += rng.random_range(-*sigma..*sigma);
                    }
                }
                samples.push(AeroSample {
                    alpha,
                    beta,
                    reynolds: re,
                    coeffs: c,
                });
            }
        }
    }
    AeroSampleTable {
        samples,
        metadata: AeroTableMetadata {
            body: body.to_string(),
            airfoil: airfoil.to_string(),
            aspect_ratio,
            taper_ratio: 1.0,
            validity: ValidityBox {
                alpha: [alpha_deg.0.to_radians(), alpha_deg.1.to_radians()],
                beta: [beta_deg.0.to_radians(), beta_deg.1.to_radians()],
                reynolds: [reynolds[0], *reynolds.last().unwrap()],
            },
        },
    }
}

/// Synthetic wing table on the standard identification grid for one aspect
/// ratio.
pub fn synthetic_wing_table(aspect_ratio: f64, noise: Option<SyntheticNoise>) -> AeroSampleTable {
    build_table(
        "wing",
        "synthetic-flat-plate",
        aspect_ratio,
        (-10.0, 10.0, 2.0),
        (-40.0, 40.0, 5.0),
        &[0.8e5, 2.1e5, 3.4e5, 4.7e5, 6.0e5],
        |a, b, re| wing_coeffs(aspect_ratio, a, b, re),
        noise,
    )
}

/// Synthetic fuselage (body + tail) table.
pub fn synthetic_fuselage_table(noise: Option<SyntheticNoise>) -> AeroSampleTable {
    build_table(
        "fuselage",
        "synthetic-body-tail",
        0.0,
        (-10.0, 10.0, 2.0),
        (-30.0, 30.0, 5.0),
        &[2e5, 5.25e5, 8.5e5, 11.75e5, 15e5],
        fuselage_coeffs,
        noise,
    )
}

/// Coefficient models for the fuselage and one wing per discrete aspect ratio.
#[derive(Debug, Clone)]
pub struct AeroLibrary {
    pub wings: Vec<(f64, CoefficientModel)>,
    pub fuselage: CoefficientModel,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryManifest {
    schema: String,
    fuselage: String,
    wings: Vec<LibraryWingEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryWingEntry {
    aspect_ratio: f64,
    path: String,
}

impl AeroLibrary {
    /// Wing model for a discrete aspect ratio gene value.
    pub fn wing_model(&self, aspect_ratio: f64) -> Result<&CoefficientModel, AeroError> {
        self.wings
            .iter()
            .find(|(ar, _)| (ar - aspect_ratio).abs() < 1e-9)
            .map(|(_, m)| m)
            .ok_or_else(|| AeroError::UnknownAspectRatio {
                body: "wing".into(),
                aspect_ratio,
            })
    }

    pub fn fuselage_model(&self) -> &CoefficientModel {
        &self.fuselage
    }

    /// Build a library by fitting the synthetic tables, one wing model per
    /// requested aspect ratio.
    pub fn synthetic(aspect_ratios: &[f64], lambda: f64) -> Self {
        let basis = BasisDescriptor::default_basis();
        let wings = aspect_ratios
            .iter()
            .map(|&ar| {
                let table = synthetic_wing_table(ar, None);
                let fitted =
                    fit_coefficients(&table, &basis, lambda).expect("synthetic wing fit");
                (ar, fitted.model)
            })
            .collect();
        let fuselage = fit_coefficients(&synthetic_fuselage_table(None), &basis, lambda)
            .expect("synthetic fuselage fit")
            .model;
        Self { wings, fuselage }
    }

    /// Load from a manifest file; model paths are resolved relative to it.
    pub fn load(manifest_path: &Path) -> Result<Self, AeroError> {
        let text = std::fs::read_to_string(manifest_path)?;
        let manifest: LibraryManifest = toml::from_str(&text)?;
        if manifest.schema != "morphco-aero-library-v1" {
            return Err(AeroError::Schema(format!(
                "unsupported library schema `{}`",
                manifest.schema
            )));
        }
        let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        let fuselage = super::table::load_model(&dir.join(&manifest.fuselage))?.model;
        let mut wings = Vec::new();
        for entry in &manifest.wings {
            let model = super::table::load_model(&dir.join(&entry.path))?.model;
            wings.push((entry.aspect_ratio, model));
        }
        Ok(Self { wings, fuselage })
    }

    /// Write all models plus a manifest into a directory.
    pub fn save(&self, dir: &Path) -> Result<std::path::PathBuf, AeroError> {
        std::fs::create_dir_all(dir)?;
        let wrap = |model: &CoefficientModel| super::FittedModel {
            model: model.clone(),
            rmse: [0.0; 6],
            warnings: Vec::new(),
        };
        super::table::save_model(&wrap(&self.fuselage), &dir.join("fuselage.toml"))?;
        let mut wings = Vec::new();
        for (ar, model) in &self.wings {
            let name = format!("wing_ar{:.0}.toml", ar * 10.0);
            super::table::save_model(&wrap(model), &dir.join(&name))?;
            wings.push(LibraryWingEntry {
                aspect_ratio: *ar,
                path: name,
            });
        }
        let manifest = LibraryManifest {
            schema: "morphco-aero-library-v1".into(),
            fuselage: "fuselage.toml".into(),
            wings,
        };
        let manifest_path = dir.join("library.toml");
        std::fs::write(
            &manifest_path,
            toml::to_string_pretty(&manifest).expect("manifest serializes"),
        )?;
        Ok(manifest_path)
    }
}
