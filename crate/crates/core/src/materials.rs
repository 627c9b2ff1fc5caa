//! Material property records and the JSON material library.
//!
//! A library file is a UTF-8 JSON object with two arrays, `thermoplastics`
//! and `mold_materials`. Field names match the struct fields below. Units are
//! SI, except that process temperatures of a thermoplastic are in °C and the
//! Tait coefficient `b5` is in K.
//!
//! The bundled steel records carry heat capacities of 4.62e3 and 4.70e3
//! J/(kg·K) as published. These are roughly ten times typical tool-steel
//! values. They are kept verbatim and no model in this crate reads them.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("cannot read material file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed material library: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("material `{record}`: field `{field}` violates {rule}")]
    Validation {
        record: String,
        field: &'static str,
        rule: String,
    },
    #[error("duplicate material name `{0}`")]
    Duplicate(String),
}

impl MaterialError {
    /// True for errors that stem from reading or parsing a file rather than
    /// from a record failing its invariants.
    pub fn is_format_error(&self) -> bool {
        matches!(self, MaterialError::Io { .. } | MaterialError::Parse(_))
    }
}

/// Molded polymer. Process temperatures in °C, Tait coefficients in SI with
/// `b5` in K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoplasticMaterial {
    pub name: String,
    /// Thermal diffusivity, m²/s.
    pub alpha_p: f64,
    /// Density, kg/m³.
    pub rho_p: f64,
    /// Specific heat, J/(kg·°C).
    pub c_p: f64,
    pub t_melt: f64,
    pub t_mold: f64,
    pub t_eject: f64,
    pub t_freeze: f64,
    /// Tait: specific volume at `b5`, m³/kg.
    pub b1: f64,
    /// Tait: thermal slope of the reference volume, m³/(kg·K).
    pub b2: f64,
    /// Tait: compressibility scale at `b5`, Pa.
    pub b3: f64,
    /// Tait: compressibility temperature exponent, 1/K.
    pub b4: f64,
    /// Tait: reference temperature, K.
    pub b5: f64,
    /// Elastic modulus, MPa.
    pub e_p: f64,
    pub poisson: f64,
    /// Linear thermal expansion, 1/K.
    pub clte: f64,
    /// Un-oriented refractive index. Stored only.
    pub uoi: f64,
    /// Flow-induced stress-optical coefficient, cm²/dyne. Stored only.
    pub fsc: f64,
    /// Thermally-induced stress-optical coefficient, cm²/dyne. Stored only.
    pub tsc: f64,
}

/// Mold steel or conductive insert alloy. All SI; moduli and stresses in MPa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoldMaterial {
    pub name: String,
    pub rho: f64,
    pub heat_capacity: f64,
    pub elastic_modulus: f64,
    pub yield_stress: f64,
    pub poisson: f64,
    pub clte: f64,
    pub thermal_diffusivity: f64,
    pub thermal_conductivity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanical_resistance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elongation: Option<f64>,
}

/// Main part dimensions, all in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartGeometry {
    #[serde(rename = "max_thickness_m")]
    pub max_thickness: f64,
    #[serde(rename = "avg_thickness_m")]
    pub avg_thickness: f64,
    #[serde(rename = "width_m")]
    pub width: f64,
    #[serde(rename = "length_m")]
    pub length: f64,
    #[serde(rename = "height_m")]
    pub height: f64,
}

struct Check<'a> {
    record: &'a str,
}

impl Check<'_> {
    fn fail(&self, field: &'static str, rule: impl fmt::Display) -> MaterialError {
        MaterialError::Validation {
            record: self.record.to_string(),
            field,
            rule: rule.to_string(),
        }
    }

    fn finite(&self, field: &'static str, v: f64) -> Result<(), MaterialError> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(field, format!("finite value (got {v})")))
        }
    }

    fn positive(&self, field: &'static str, v: f64) -> Result<(), MaterialError> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(self.fail(field, format!("{field} > 0 (got {v})")))
        }
    }

    fn less(&self, lo: (&'static str, f64), hi: (&'static str, f64)) -> Result<(), MaterialError> {
        if lo.1 < hi.1 {
            Ok(())
        } else {
            Err(self.fail(
                lo.0,
                format!("{} < {} (got {} >= {})", lo.0, hi.0, lo.1, hi.1),
            ))
        }
    }
}

impl ThermoplasticMaterial {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let c = Check { record: &self.name };
        c.positive("alpha_p", self.alpha_p)?;
        c.positive("rho_p", self.rho_p)?;
        c.positive("c_p", self.c_p)?;
        for (field, v) in [
            ("t_melt", self.t_melt),
            ("t_mold", self.t_mold),
            ("t_eject", self.t_eject),
            ("t_freeze", self.t_freeze),
            ("b2", self.b2),
            ("uoi", self.uoi),
            ("fsc", self.fsc),
            ("tsc", self.tsc),
        ] {
            c.finite(field, v)?;
        }
        c.less(("t_mold", self.t_mold), ("t_eject", self.t_eject))?;
        c.less(("t_eject", self.t_eject), ("t_freeze", self.t_freeze))?;
        c.less(("t_freeze", self.t_freeze), ("t_melt", self.t_melt))?;
        c.positive("b1", self.b1)?;
        c.positive("b3", self.b3)?;
        c.positive("b4", self.b4)?;
        c.positive("b5", self.b5)?;
        c.positive("e_p", self.e_p)?;
        c.positive("clte", self.clte)?;
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return Err(c.fail("poisson", format!("0 < poisson < 0.5 (got {})", self.poisson)));
        }
        Ok(())
    }
}

impl MoldMaterial {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let c = Check { record: &self.name };
        c.positive("rho", self.rho)?;
        c.positive("heat_capacity", self.heat_capacity)?;
        c.positive("elastic_modulus", self.elastic_modulus)?;
        c.positive("yield_stress", self.yield_stress)?;
        c.positive("poisson", self.poisson)?;
        c.positive("clte", self.clte)?;
        c.positive("thermal_diffusivity", self.thermal_diffusivity)?;
        c.positive("thermal_conductivity", self.thermal_conductivity)?;
        if self.poisson >= 0.5 {
            return Err(c.fail("poisson", format!("0 < poisson < 0.5 (got {})", self.poisson)));
        }
        if let Some(v) = self.mechanical_resistance {
            c.positive("mechanical_resistance", v)?;
        }
        if let Some(v) = self.elongation {
            c.positive("elongation", v)?;
        }
        Ok(())
    }
}

impl PartGeometry {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let c = Check { record: "geometry" };
        c.positive("max_thickness", self.max_thickness)?;
        c.positive("avg_thickness", self.avg_thickness)?;
        c.positive("width", self.width)?;
        c.positive("length", self.length)?;
        c.positive("height", self.height)?;
        if self.avg_thickness > self.max_thickness {
            return Err(c.fail(
                "avg_thickness",
                format!(
                    "avg_thickness <= max_thickness (got {} > {})",
                    self.avg_thickness, self.max_thickness
                ),
            ));
        }
        Ok(())
    }

    /// Ratio of maximum to average wall thickness.
    pub fn thickness_ratio(&self) -> f64 {
        self.max_thickness / self.avg_thickness
    }

    /// Default warpage half-span: half the part length.
    pub fn half_span(&self) -> f64 {
        0.5 * self.length
    }
}

/// Validated set of thermoplastic and mold material records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialLibrary {
    #[serde(default)]
    pub thermoplastics: Vec<ThermoplasticMaterial>,
    #[serde(default)]
    pub mold_materials: Vec<MoldMaterial>,
}

impl MaterialLibrary {
    /// Parses and validates a library from JSON text.
    pub fn from_json_str(text: &str) -> Result<Self, MaterialError> {
        let lib: MaterialLibrary = serde_json::from_str(text)?;
        lib.validate()?;
        Ok(lib)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let mut seen = HashSet::new();
        for m in &self.thermoplastics {
            m.validate()?;
            if !seen.insert(m.name.as_str()) {
                return Err(MaterialError::Duplicate(m.name.clone()));
            }
        }
        for m in &self.mold_materials {
            m.validate()?;
            if !seen.insert(m.name.as_str()) {
                return Err(MaterialError::Duplicate(m.name.clone()));
            }
        }
        Ok(())
    }

    /// The three bundled records: Plexiglas 8N, steel 1.2709, Fastcool 50.
    pub fn bundled() -> Self {
        let mut lib = MaterialLibrary::default();
        for text in [
            bundled::MATERIAL_PLEXIGLAS_8N,
            bundled::MATERIAL_STEEL_1_2709,
            bundled::MATERIAL_FASTCOOL_50,
        ] {
            let part = MaterialLibrary::from_json_str(text).expect("bundled material file is valid");
            lib.merge(part).expect("bundled material names are unique");
        }
        lib
    }

    /// Appends another library, rejecting names already present.
    pub fn merge(&mut self, other: MaterialLibrary) -> Result<(), MaterialError> {
        self.thermoplastics.extend(other.thermoplastics);
        self.mold_materials.extend(other.mold_materials);
        self.validate()
    }

    pub fn thermoplastic(&self, name: &str) -> Option<&ThermoplasticMaterial> {
        self.thermoplastics.iter().find(|m| m.name == name)
    }

    pub fn mold_material(&self, name: &str) -> Option<&MoldMaterial> {
        self.mold_materials.iter().find(|m| m.name == name)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("material records serialize")
    }
}

/// Reads, parses and validates a material library file.
pub fn load_material_library(path: impl AsRef<Path>) -> Result<MaterialLibrary, MaterialError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MaterialError::Io {
        path: path.display().to_string(),
        source,
    })?;
    MaterialLibrary::from_json_str(&text)
}

/// Ratio of maximum to average thickness of a part.
pub fn thickness_ratio(g: &PartGeometry) -> f64 {
    g.thickness_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plexiglas() -> ThermoplasticMaterial {
        MaterialLibrary::bundled().thermoplastic("plexiglas_8n").unwrap().clone()
    }

    fn geometry(max: f64, avg: f64) -> PartGeometry {
        PartGeometry {
            max_thickness: max,
            avg_thickness: avg,
            width: 0.062,
            length: 0.630,
            height: 0.040,
        }
    }

    #[test]
    fn bundled_plexiglas_matches_published_record() {
        let m = plexiglas();
        assert_eq!(m.alpha_p, 8.913e-8);
        assert_eq!(m.rho_p, 1172.5);
        assert_eq!(m.c_p, 1555.0);
        assert_eq!((m.t_melt, m.t_mold, m.t_eject, m.t_freeze), (235.0, 80.0, 94.0, 132.0));
        assert_eq!(m.b1, 0.869e-3);
        assert_eq!(m.b2, 5.679e-7);
        assert_eq!(m.b3, 1.9492e8);
        assert_eq!(m.b4, 0.004633);
        assert_eq!(m.b5, 394.69);
        assert_eq!(m.e_p, 3300.0);
        assert_eq!(m.poisson, 0.38);
        assert_eq!(m.clte, 8.0e-5);
        assert_eq!((m.uoi, m.fsc, m.tsc), (1.49, -6.0e-11, -4.6e-13));
    }

    #[test]
    fn bundled_mold_materials_match_published_records() {
        let lib = MaterialLibrary::bundled();
        let steel = lib.mold_material("steel_1_2709").unwrap();
        assert_eq!(steel.rho, 8000.0);
        assert_eq!(steel.heat_capacity, 4.62e3);
        assert_eq!(steel.elastic_modulus, 2.36e5);
        assert_eq!(steel.yield_stress, 1016.0);
        assert_eq!(steel.poisson, 0.30);
        assert_eq!(steel.clte, 1.29e-5);
        assert_eq!(steel.thermal_diffusivity, 5.55e-6);
        assert_eq!(steel.thermal_conductivity, 29.0);
        assert_eq!(steel.mechanical_resistance, None);

        let fc = lib.mold_material("fastcool_50").unwrap();
        assert_eq!(fc.rho, 7810.0);
        assert_eq!(fc.heat_capacity, 4.70e3);
        assert_eq!(fc.elastic_modulus, 2.07e5);
        assert_eq!(fc.yield_stress, 1070.0);
        assert_eq!(fc.poisson, 0.33);
        assert_eq!(fc.mechanical_resistance, Some(1400.0));
        assert_eq!(fc.elongation, Some(17.0));
        assert_eq!(fc.clte, 1.17e-5);
        assert_eq!(fc.thermal_diffusivity, 1.35e-5);
        assert_eq!(fc.thermal_conductivity, 50.0);
    }

    #[test]
    fn negative_density_names_the_field() {
        let mut m = plexiglas();
        m.rho_p = -1.0;
        let lib = MaterialLibrary { thermoplastics: vec![m], mold_materials: vec![] };
        let text = serde_json::to_string(&lib).unwrap();
        match MaterialLibrary::from_json_str(&text) {
            Err(MaterialError::Validation { record, field, .. }) => {
                assert_eq!(record, "plexiglas_8n");
                assert_eq!(field, "rho_p");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_b5_names_the_field() {
        let mut v: serde_json::Value =
            serde_json::from_str(bundled::MATERIAL_PLEXIGLAS_8N).unwrap();
        v["thermoplastics"][0].as_object_mut().unwrap().remove("b5");
        let err = MaterialLibrary::from_json_str(&v.to_string()).unwrap_err();
        assert!(err.is_format_error());
        assert!(err.to_string().contains("b5"), "{err}");
    }

    #[test]
    fn temperature_ordering_is_enforced() {
        let mut m = plexiglas();
        m.t_eject = 70.0;
        let err = m.validate().unwrap_err();
        assert!(matches!(err, MaterialError::Validation { field: "t_mold", .. }), "{err}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let m = plexiglas();
        let lib = MaterialLibrary { thermoplastics: vec![m.clone(), m], mold_materials: vec![] };
        assert!(matches!(lib.validate(), Err(MaterialError::Duplicate(n)) if n == "plexiglas_8n"));
    }

    #[test]
    fn mold_poisson_bound() {
        let mut steel = MaterialLibrary::bundled().mold_material("steel_1_2709").unwrap().clone();
        steel.poisson = 0.5;
        assert!(matches!(steel.validate(), Err(MaterialError::Validation { field: "poisson", .. })));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = MaterialLibrary::from_json_str("{\"thermoplastics\": [").unwrap_err();
        assert!(err.is_format_error());
    }

    #[test]
    fn serialize_reload_is_identical() {
        let lib = MaterialLibrary::bundled();
        let again = MaterialLibrary::from_json_str(&lib.to_json_string()).unwrap();
        assert_eq!(lib, again);
    }

    #[test]
    fn thickness_ratios() {
        assert!((thickness_ratio(&geometry(0.0096, 0.0041)) - 2.34).abs() <= 0.01);
        assert_eq!(thickness_ratio(&geometry(0.0041, 0.0041)), 1.0);
        assert_eq!(thickness_ratio(&geometry(0.010, 0.0025)), 4.0);
    }

    #[test]
    fn geometry_average_cannot_exceed_max() {
        assert!(geometry(0.004, 0.005).validate().is_err());
        assert!(geometry(0.0096, 0.0041).validate().is_ok());
    }
}
