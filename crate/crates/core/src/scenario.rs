//! Scenario files: one molded part, its material, process settings, cooling
//! layout and optional warpage inputs.
//!
//! Temperatures are in °C and pressures in MPa, as the field names say.
//! Injection and packing pressure profile entries are carried through to
//! reports but feed no model; only the temperatures and the packing pressure
//! are used.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled;
use crate::layout::{CoolingLayout, LayoutError};
use crate::materials::{MaterialError, MaterialLibrary, PartGeometry, ThermoplasticMaterial};
use crate::pvt::{PvtError, PvtState};
use crate::thermal::CoolingProblem;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown material `{0}` (not in the material library)")]
    UnknownMaterial(String),
    #[error("scenario field `{field}`: {rule}")]
    Invalid { field: &'static str, rule: String },
    #[error("scenario geometry: {0}")]
    Geometry(#[from] MaterialError),
    #[error("scenario layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("scenario warpage state: {0}")]
    State(#[from] PvtError),
}

impl ScenarioError {
    pub fn is_format_error(&self) -> bool {
        match self {
            ScenarioError::Io { .. } | ScenarioError::Parse(_) => true,
            ScenarioError::Layout(e) => e.is_format_error(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConditions {
    pub fill_time_s: f64,
    pub packing_time_s: f64,
    pub vp_switch_pct: f64,
    pub melt_temperature_c: f64,
    pub mold_temperature_c: f64,
    pub eject_temperature_c: f64,
    pub coolant_temperature_c: f64,
    pub max_injection_pressure_mpa: f64,
    pub max_packing_pressure_mpa: f64,
    pub packing_pressure_mpa: f64,
}

impl ProcessConditions {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fields = [
            ("fill_time_s", self.fill_time_s),
            ("packing_time_s", self.packing_time_s),
            ("vp_switch_pct", self.vp_switch_pct),
            ("max_injection_pressure_mpa", self.max_injection_pressure_mpa),
            ("max_packing_pressure_mpa", self.max_packing_pressure_mpa),
            ("packing_pressure_mpa", self.packing_pressure_mpa),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ScenarioError::Invalid { field, rule: format!("must be >= 0 (got {v})") });
            }
        }
        let temps = [
            ("melt_temperature_c", self.melt_temperature_c),
            ("mold_temperature_c", self.mold_temperature_c),
            ("eject_temperature_c", self.eject_temperature_c),
            ("coolant_temperature_c", self.coolant_temperature_c),
        ];
        for (field, v) in temps {
            if !v.is_finite() {
                return Err(ScenarioError::Invalid { field, rule: format!("must be finite (got {v})") });
            }
        }
        if self.eject_temperature_c <= self.mold_temperature_c {
            return Err(ScenarioError::Invalid {
                field: "eject_temperature_c",
                rule: format!(
                    "mold < eject temperature required (got {} <= {})",
                    self.eject_temperature_c, self.mold_temperature_c
                ),
            });
        }
        if self.eject_temperature_c >= self.melt_temperature_c {
            return Err(ScenarioError::Invalid {
                field: "eject_temperature_c",
                rule: format!(
                    "eject < melt temperature required (got {} >= {})",
                    self.eject_temperature_c, self.melt_temperature_c
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub temperature_c: f64,
    pub pressure_mpa: f64,
}

impl StateSpec {
    pub fn to_state(self) -> Result<PvtState, PvtError> {
        PvtState::from_celsius_mpa(self.temperature_c, self.pressure_mpa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpageInputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_span_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_edge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_center: Option<f64>,
}

/// Resolved warpage request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WarpageRequest {
    Shrinkage { half_span: f64, s_edge: f64, s_center: f64 },
    States { half_span: f64, edge: PvtState, center: PvtState },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    material_ref: String,
    geometry: PartGeometry,
    process: ProcessConditions,
    #[serde(default)]
    layout_ref: Option<String>,
    #[serde(default)]
    warpage_inputs: Option<WarpageInputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub material: ThermoplasticMaterial,
    pub geometry: PartGeometry,
    pub process: ProcessConditions,
    pub layout_ref: Option<String>,
    pub layout: Option<CoolingLayout>,
    pub warpage_inputs: Option<WarpageInputs>,
}

impl Scenario {
    /// Parses a scenario; `resolve_layout` turns `layout_ref` into a layout.
    pub fn from_json_str(
        text: &str,
        library: &MaterialLibrary,
        resolve_layout: impl Fn(&str) -> Result<CoolingLayout, LayoutError>,
    ) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let material = library
            .thermoplastic(&file.material_ref)
            .ok_or_else(|| ScenarioError::UnknownMaterial(file.material_ref.clone()))?
            .clone();
        file.geometry.validate()?;
        file.process.validate()?;
        let layout = file.layout_ref.as_deref().map(&resolve_layout).transpose()?;
        let scenario = Scenario {
            name: file.name,
            material,
            geometry: file.geometry,
            process: file.process,
            layout_ref: file.layout_ref,
            layout,
            warpage_inputs: file.warpage_inputs,
        };
        scenario.warpage_request()?;
        Ok(scenario)
    }

    /// The bundled case-study scenario with the analytical temperature set.
    pub fn bundled_case_study(library: &MaterialLibrary) -> Result<Self, ScenarioError> {
        Self::from_json_str(bundled::SCENARIO_CASE_STUDY, library, bundled_layout)
    }

    /// The bundled case-study scenario with the simulation temperature set.
    pub fn bundled_simulation(library: &MaterialLibrary) -> Result<Self, ScenarioError> {
        Self::from_json_str(bundled::SCENARIO_SIMULATION, library, bundled_layout)
    }

    /// Slab problem for the thickest section, wall at the mold temperature.
    pub fn cooling_problem(&self) -> CoolingProblem {
        CoolingProblem {
            thickness: self.geometry.max_thickness,
            t_melt: self.process.melt_temperature_c,
            t_wall: self.process.mold_temperature_c,
            t_eject: self.process.eject_temperature_c,
            alpha_p: self.material.alpha_p,
        }
    }

    /// Packing state assumed where the scenario names none: the material's
    /// freeze temperature at the packing pressure.
    pub fn default_pack_state(&self) -> Result<PvtState, PvtError> {
        PvtState::from_celsius_mpa(self.material.t_freeze, self.process.packing_pressure_mpa)
    }

    /// Resolves the warpage inputs. Explicit shrinkages take precedence;
    /// otherwise each missing state falls back to [`Self::default_pack_state`].
    /// The half-span defaults to half the part length.
    pub fn warpage_request(&self) -> Result<WarpageRequest, ScenarioError> {
        let w = self.warpage_inputs.unwrap_or_default();
        let half_span = w.half_span_m.unwrap_or_else(|| self.geometry.half_span());
        if !(half_span.is_finite() && half_span > 0.0) {
            return Err(ScenarioError::Invalid {
                field: "half_span_m",
                rule: format!("must be > 0 (got {half_span})"),
            });
        }
        match (w.s_edge, w.s_center) {
            (Some(s_edge), Some(s_center)) => {
                if w.edge_state.is_some() || w.center_state.is_some() {
                    return Err(ScenarioError::Invalid {
                        field: "warpage_inputs",
                        rule: "give either s_edge/s_center or edge/center states, not both".into(),
                    });
                }
                Ok(WarpageRequest::Shrinkage { half_span, s_edge, s_center })
            }
            (None, None) => {
                let edge = match w.edge_state {
                    Some(s) => s.to_state()?,
                    None => self.default_pack_state()?,
                };
                let center = match w.center_state {
                    Some(s) => s.to_state()?,
                    None => self.default_pack_state()?,
                };
                Ok(WarpageRequest::States { half_span, edge, center })
            }
            _ => Err(ScenarioError::Invalid {
                field: "warpage_inputs",
                rule: "s_edge and s_center must be given together".into(),
            }),
        }
    }
}

/// Resolves a layout reference against the bundled data directory.
pub fn bundled_layout(reference: &str) -> Result<CoolingLayout, LayoutError> {
    let text = bundled::file(reference).ok_or_else(|| LayoutError::Io {
        path: reference.to_string(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such bundled file"),
    })?;
    CoolingLayout::from_json_str(text)
}

/// Reads a scenario file; `layout_ref` is resolved relative to the file.
pub fn load_scenario(path: impl AsRef<Path>, library: &MaterialLibrary) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Scenario::from_json_str(&text, library, |r| crate::layout::load_layout(base.join(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lib() -> MaterialLibrary {
        MaterialLibrary::bundled()
    }

    fn edited(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(bundled::SCENARIO_CASE_STUDY).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn bundled_case_study_resolves() {
        let s = Scenario::bundled_case_study(&lib()).unwrap();
        assert_eq!(s.material.name, "plexiglas_8n");
        assert_eq!(s.geometry.max_thickness, 0.0096);
        assert_eq!(s.geometry.avg_thickness, 0.0041);
        assert_eq!(s.geometry.length, 0.630);
        assert_eq!(s.process.packing_time_s, 18.0);
        assert_eq!(s.process.packing_pressure_mpa, 112.0);
        assert_eq!(s.layout.as_ref().unwrap().channel_diameters, [0.008]);
    }

    #[test]
    fn bundled_simulation_resolves() {
        let s = Scenario::bundled_simulation(&lib()).unwrap();
        assert_eq!(s.name, "simulation");
        assert_eq!(
            (s.process.melt_temperature_c, s.process.mold_temperature_c, s.process.eject_temperature_c),
            (240.0, 75.0, 112.0)
        );
        // no warpage inputs: both states fall back to the default packing state
        match s.warpage_request().unwrap() {
            WarpageRequest::States { half_span, edge, center } => {
                assert_eq!(half_span, 0.315);
                assert_eq!(edge, center);
                assert!((edge.temperature - 405.15).abs() < 1e-12);
                assert_eq!(edge.pressure, 112e6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eject_below_mold_rejected() {
        let text = edited(|v| v["process"]["eject_temperature_c"] = 70.0.into());
        let err = Scenario::from_json_str(&text, &lib(), bundled_layout).unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { field: "eject_temperature_c", .. }), "{err}");
        assert!(!err.is_format_error());
    }

    #[test]
    fn unknown_material_rejected() {
        let text = edited(|v| v["material_ref"] = "unobtainium".into());
        let err = Scenario::from_json_str(&text, &lib(), bundled_layout).unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownMaterial(ref n) if n == "unobtainium"));
    }

    #[test]
    fn mixed_warpage_inputs_rejected() {
        let text = edited(|v| v["warpage_inputs"]["s_edge"] = 0.01.into());
        assert!(Scenario::from_json_str(&text, &lib(), bundled_layout).is_err());
    }

    #[test]
    fn missing_layout_is_format_error() {
        let text = edited(|v| v["layout_ref"] = "../layouts/nope.json".into());
        let err = Scenario::from_json_str(&text, &lib(), bundled_layout).unwrap_err();
        assert!(err.is_format_error());
    }
}
