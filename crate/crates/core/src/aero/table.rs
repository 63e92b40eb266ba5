//! File formats for aerodynamic sample tables and fitted coefficient models.
//!
//! A table is a CSV with header `alpha_deg,beta_deg,reynolds,CD,CL,CY,Cl,Cm,Cn`
//! plus a TOML sidecar (`<name>.meta.toml`) describing the body. Angles are
//! degrees in files and radians in memory. Fitted models serialize to a single
//! TOML document whose floats round-trip exactly.

use super::basis::{BasisDescriptor, BasisTerm};
use super::{AeroError, CoefficientModel, FittedModel, ValidityBox};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

pub(crate) const COEFF_NAMES: [&str; 6] = ["CD", "CL", "CY", "Cl", "Cm", "Cn"];
const TABLE_HEADER: [&str; 9] = [
    "alpha_deg", "beta_deg", "reynolds", "CD", "CL", "CY", "Cl", "Cm", "Cn",
];

/// One row of a sample table (angles in radians).
#[derive(Debug, Clone, Copy)]
pub struct AeroSample {
    pub alpha: f64,
    pub beta: f64,
    pub reynolds: f64,
    /// Ordered (CD, CL, CY, Cl, Cm, Cn).
    pub coeffs: [f64; 6],
}

#[derive(Debug, Clone)]
pub struct AeroTableMetadata {
    pub body: String,
    pub airfoil: String,
    pub aspect_ratio: f64,
    pub taper_ratio: f64,
    /// Radians internally.
    pub validity: ValidityBox,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataFile {
    schema: String,
    body: String,
    airfoil: String,
    aspect_ratio: f64,
    taper_ratio: f64,
    alpha_range_deg: [f64; 2],
    beta_range_deg: [f64; 2],
    reynolds_range: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct AeroSampleTable {
    pub samples: Vec<AeroSample>,
    pub metadata: AeroTableMetadata,
}

/// Sidecar path for a table CSV: `foo.csv` -> `foo.meta.toml`.
pub fn sidecar_path(table_path: &Path) -> PathBuf {
    table_path.with_extension("meta.toml")
}

impl AeroSampleTable {
    pub fn validate(&self) -> Result<(), AeroError> {
        let mut seen = HashSet::new();
        for (i, s) in self.samples.iter().enumerate() {
            let key = (
                s.alpha.to_bits(),
                s.beta.to_bits(),
                s.reynolds.to_bits(),
            );
            if !seen.insert(key) {
                return Err(AeroError::DuplicateSample {
                    alpha: s.alpha,
                    beta: s.beta,
                    reynolds: s.reynolds,
                    row: i + 2, // header is line 1
                });
            }
            let v = &self.metadata.validity;
            if !v.contains(s.alpha, s.beta, s.reynolds) {
                return Err(AeroError::Schema(format!(
                    "row {} outside the declared validity ranges",
                    i + 2
                )));
            }
        }
        Ok(())
    }

    pub fn load(table_path: &Path) -> Result<Self, AeroError> {
        let meta_path = sidecar_path(table_path);
        let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| {
            AeroError::Schema(format!(
                "missing metadata sidecar {}: {e}",
                meta_path.display()
            ))
        })?;
        let meta: MetadataFile = toml::from_str(&meta_text)?;
        if meta.schema != "morphco-aero-table-v1" {
            return Err(AeroError::Schema(format!(
                "unsupported table schema `{}`",
                meta.schema
            )));
        }
        let metadata = AeroTableMetadata {
            body: meta.body,
            airfoil: meta.airfoil,
            aspect_ratio: meta.aspect_ratio,
            taper_ratio: meta.taper_ratio,
            validity: ValidityBox {
                alpha: meta.alpha_range_deg.map(f64::to_radians),
                beta: meta.beta_range_deg.map(f64::to_radians),
                reynolds: meta.reynolds_range,
            },
        };

        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(table_path)?;
        {
            let header = reader.headers()?;
            let got: Vec<&str> = header.iter().collect();
            if got != TABLE_HEADER {
                return Err(AeroError::Schema(format!(
                    "bad CSV header: expected `{}`, got `{}`",
                    TABLE_HEADER.join(","),
                    got.join(",")
                )));
            }
        }
        let mut samples = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let line = idx + 2;
            let field = |i: usize| -> Result<f64, AeroError> {
                record
                    .get(i)
                    .ok_or_else(|| AeroError::Schema(format!("line {line}: missing column {i}")))?
                    .parse::<f64>()
                    .map_err(|e| AeroError::Schema(format!("line {line}: {e}")))
            };
            samples.push(AeroSample {
                alpha: field(0)?.to_radians(),
                beta: field(1)?.to_radians(),
                reynolds: field(2)?,
                coeffs: [
                    field(3)?,
                    field(4)?,
                    field(5)?,
                    field(6)?,
                    field(7)?,
                    field(8)?,
                ],
            });
        }
        if samples.is_empty() {
            return Err(AeroError::Schema("table has no data rows".into()));
        }
        let table = Self { samples, metadata };
        table.validate()?;
        Ok(table)
    }

    pub fn save(&self, table_path: &Path) -> Result<(), AeroError> {
        let mut writer = csv::Writer::from_path(table_path)?;
        writer.write_record(TABLE_HEADER)?;
        for s in &self.samples {
            let mut row = vec![
                format!("{}", s.alpha.to_degrees()),
                format!("{}", s.beta.to_degrees()),
                format!("{}", s.reynolds),
            ];
            row.extend(s.coeffs.iter().map(|c| format!("{c}")));
            writer.write_record(&row)?;
        }
        writer.flush()?;

        let v = &self.metadata.validity;
        let meta = MetadataFile {
            schema: "morphco-aero-table-v1".into(),
            body: self.metadata.body.clone(),
            airfoil: self.metadata.airfoil.clone(),
            aspect_ratio: self.metadata.aspect_ratio,
            taper_ratio: self.metadata.taper_ratio,
            alpha_range_deg: v.alpha.map(f64::to_degrees),
            beta_range_deg: v.beta.map(f64::to_degrees),
            reynolds_range: v.reynolds,
        };
        std::fs::write(
            sidecar_path(table_path),
            toml::to_string_pretty(&meta).expect("metadata serializes"),
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema: String,
    re_reference: f64,
    alpha_range: [f64; 2],
    beta_range: [f64; 2],
    reynolds_range: [f64; 2],
    terms: Vec<BasisTerm>,
    weights_cd: Vec<f64>,
    weights_cl: Vec<f64>,
    weights_cy: Vec<f64>,
    weights_cl_roll: Vec<f64>,
    weights_cm: Vec<f64>,
    weights_cn: Vec<f64>,
    intercepts: [f64; 6],
    #[serde(default)]
    rmse: Option<[f64; 6]>,
}

/// Write a fitted model (weights, basis, validity, fit quality) to TOML.
pub fn save_model(fitted: &FittedModel, path: &Path) -> Result<(), AeroError> {
    let m = &fitted.model;
    let file = ModelFile {
        schema: "morphco-aero-model-v1".into(),
        re_reference: m.basis.re_reference,
        alpha_range: m.validity.alpha,
        beta_range: m.validity.beta,
        reynolds_range: m.validity.reynolds,
        terms: m.basis.terms.clone(),
        weights_cd: m.weights[0].clone(),
        weights_cl: m.weights[1].clone(),
        weights_cy: m.weights[2].clone(),
        weights_cl_roll: m.weights[3].clone(),
        weights_cm: m.weights[4].clone(),
        weights_cn: m.weights[5].clone(),
        intercepts: m.intercepts,
        rmse: Some(fitted.rmse),
    };
    std::fs::write(
        path,
        toml::to_string_pretty(&file).expect("model serializes"),
    )?;
    Ok(())
}

/// Load a model file written by [`save_model`].
pub fn load_model(path: &Path) -> Result<FittedModel, AeroError> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = toml::from_str(&text)?;
    if file.schema != "morphco-aero-model-v1" {
        return Err(AeroError::Schema(format!(
            "unsupported model schema `{}`",
            file.schema
        )));
    }
    let model = CoefficientModel {
        basis: BasisDescriptor {
            terms: file.terms,
            re_reference: file.re_reference,
        },
        weights: [
            file.weights_cd,
            file.weights_cl,
            file.weights_cy,
            file.weights_cl_roll,
            file.weights_cm,
            file.weights_cn,
        ],
        intercepts: file.intercepts,
        validity: ValidityBox {
            alpha: file.alpha_range,
            beta: file.beta_range,
            reynolds: file.reynolds_range,
        },
    };
    model.validate()?;
    Ok(FittedModel {
        rmse: file.rmse.unwrap_or([0.0; 6]),
        warnings: Vec::new(),
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aero::synthetic::synthetic_wing_table;
    use crate::aero::{fit_coefficients, BasisDescriptor};

    #[test]
    fn table_roundtrip_preserves_samples() {
        let table = synthetic_wing_table(3.0, None);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wing.csv");
        table.save(&path).unwrap();
        let loaded = AeroSampleTable::load(&path).unwrap();
        assert_eq!(loaded.samples.len(), table.samples.len());
        for (a, b) in loaded.samples.iter().zip(table.samples.iter()) {
            assert_eq!(a.reynolds, b.reynolds);
            assert_eq!(a.coeffs, b.coeffs);
            assert!((a.alpha - b.alpha).abs() < 1e-15);
        }
        assert_eq!(loaded.metadata.aspect_ratio, 3.0);
    }

    #[test]
    fn missing_sidecar_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("orphan.csv");
        std::fs::write(&path, "alpha_deg,beta_deg,reynolds,CD,CL,CY,Cl,Cm,Cn\n").unwrap();
        let err = AeroSampleTable::load(&path).unwrap_err();
        assert!(format!("{err}").contains("sidecar"));
    }

    #[test]
    fn bad_value_reports_its_line() {
        let table = synthetic_wing_table(2.0, None);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wing.csv");
        table.save(&path).unwrap();
        // Corrupt the third data line.
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = "bad,0,2e5,0,0,0,0,0,0".into();
        std::fs::write(&path, lines.join("\n")).unwrap();
        let err = AeroSampleTable::load(&path).unwrap_err();
        assert!(format!("{err}").contains("line 4"), "{err}");
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let mut table = synthetic_wing_table(2.0, None);
        let dup = table.samples[0];
        table.samples.push(dup);
        assert!(matches!(
            table.validate(),
            Err(AeroError::DuplicateSample { .. })
        ));
    }

    #[test]
    fn model_file_roundtrip_is_exact() {
        let table = synthetic_wing_table(4.0, None);
        let fitted = fit_coefficients(&table, &BasisDescriptor::default_basis(), 1e-5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        save_model(&fitted, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        for ch in 0..6 {
            assert_eq!(loaded.model.weights[ch], fitted.model.weights[ch]);
            assert_eq!(loaded.model.intercepts[ch], fitted.model.intercepts[ch]);
            assert_eq!(loaded.rmse[ch], fitted.rmse[ch]);
        }
        assert_eq!(loaded.model.basis.terms.len(), fitted.model.basis.terms.len());
        assert_eq!(loaded.model.validity.alpha, fitted.model.validity.alpha);
    }
}
