//! End-to-end run of a scenario against a file of expected values.
//!
//! Each expected entry names a computation (`kind`), its parameters, the
//! expected value and a tolerance. The run passes only if every entry is
//! within tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{self, CoolantSpec};
use crate::pvt::{self, PvtError, PvtState};
use crate::report::{ComparisonFixture, ReportError};
use crate::scenario::{Scenario, ScenarioError, WarpageRequest};
use crate::thermal::{self, SeriesOptions, ThermalError, FD_DEFAULT_NODES, FD_DEFAULT_SAFETY};
use crate::warpage::{self, WarpageCase, WarpageError};

#[derive(Debug, Error)]
pub enum CaseStudyError {
    #[error("malformed expected-values file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("check `{id}`: {source}")]
    Thermal { id: String, source: ThermalError },
    #[error("check `{id}`: {source}")]
    Pvt { id: String, source: PvtError },
    #[error("check `{id}`: {source}")]
    Warpage { id: String, source: WarpageError },
    #[error("check `{id}`: {source}")]
    Report { id: String, source: ReportError },
    #[error("check `{id}`: {source}")]
    Scenario { id: String, source: ScenarioError },
    #[error("check `{0}`: scenario has no cooling layout")]
    NoLayout(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckKind {
    /// Single-mode cooling time, s; thickness defaults to the scenario's.
    CoolingTime {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thickness_m: Option<f64>,
    },
    /// Series midplane temperature at the cooling time, error as a fraction
    /// of the melt-to-wall span.
    SeriesInversion,
    /// Relative gap between the finite-difference and single-mode times.
    FdOracleAgreement,
    /// Relative change of the finite-difference time from 101 to 201 nodes.
    FdGridConvergence,
    ThicknessRatio,
    SpecificVolume { temperature_c: f64, pressure_mpa: f64 },
    LinearShrinkage { temperature_c: f64, pressure_mpa: f64 },
    /// Deflection in mm from a half-span and a shrinkage differential.
    Deflection { half_span_m: f64, differential: f64 },
    /// Deflection in mm from the scenario's warpage inputs.
    ScenarioWarpage,
    Reynolds { flow_cm3_s: f64, diameter_mm: f64 },
    /// Count of bundled comparison cells that differ from the recomputed
    /// values by more than 0.01.
    ComparisonMismatches,
    /// Count of rule violations of the scenario layout.
    LayoutViolations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCheck {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckKind,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub relative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValues {
    pub checks: Vec<ExpectedCheck>,
}

impl ExpectedValues {
    pub fn from_json_str(text: &str) -> Result<Self, CaseStudyError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn bundled() -> Self {
        Self::from_json_str(crate::bundled::CASE_STUDY_EXPECTED).expect("bundled expected values parse")
    }

    pub fn get(&self, id: &str) -> Option<&ExpectedCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Absolute tolerance used when comparing recomputed comparison columns.
pub const COMPARISON_TOLERANCE: f64 = 0.01;

pub fn evaluate(scenario: &Scenario, check: &ExpectedCheck) -> Result<CheckResult, CaseStudyError> {
    let id = check.id.clone();
    let thermal_err = |source| CaseStudyError::Thermal { id: id.clone(), source };
    let pvt_err = |source| CaseStudyError::Pvt { id: id.clone(), source };
    let warp_err = |source| CaseStudyError::Warpage { id: id.clone(), source };

    let problem = scenario.cooling_problem();
    let computed = match &check.kind {
        CheckKind::CoolingTime { thickness_m } => {
            let mut p = problem;
            if let Some(t) = thickness_m {
                p.thickness = *t;
            }
            thermal::cooling_time(&p).map_err(thermal_err)?
        }
        CheckKind::SeriesInversion => {
            let t = thermal::cooling_time(&problem).map_err(thermal_err)?;
            let m = thermal::midplane_temperature(&problem, t, &SeriesOptions::default())
                .map_err(thermal_err)?;
            (m.celsius - problem.t_eject).abs() / (problem.t_melt - problem.t_wall)
        }
        CheckKind::FdOracleAgreement => {
            let closed = thermal::cooling_time(&problem).map_err(thermal_err)?;
            let fd = thermal::fd_cooling_oracle(&problem, FD_DEFAULT_NODES, FD_DEFAULT_SAFETY)
                .map_err(thermal_err)?;
            ((fd - closed) / closed).abs()
        }
        CheckKind::FdGridConvergence => {
            let coarse = thermal::fd_cooling_oracle(&problem, 101, FD_DEFAULT_SAFETY).map_err(thermal_err)?;
            let fine = thermal::fd_cooling_oracle(&problem, 201, FD_DEFAULT_SAFETY).map_err(thermal_err)?;
            ((coarse - fine) / fine).abs()
        }
        CheckKind::ThicknessRatio => scenario.geometry.thickness_ratio(),
        CheckKind::SpecificVolume { temperature_c, pressure_mpa } => {
            let s = PvtState::from_celsius_mpa(*temperature_c, *pressure_mpa).map_err(pvt_err)?;
            pvt::specific_volume(&scenario.material, s).map_err(pvt_err)?.value
        }
        CheckKind::LinearShrinkage { temperature_c, pressure_mpa } => {
            let s = PvtState::from_celsius_mpa(*temperature_c, *pressure_mpa).map_err(pvt_err)?;
            pvt::shrinkage(&scenario.material, s).map_err(pvt_err)?.s_linear
        }
        CheckKind::Deflection { half_span_m, differential } => {
            1e3 * warpage::deflection_from_differential(*half_span_m, *differential).map_err(warp_err)?
        }
        CheckKind::ScenarioWarpage => {
            let request = scenario
                .warpage_request()
                .map_err(|source| CaseStudyError::Scenario { id: id.clone(), source })?;
            1e3 * scenario_deflection(scenario, request).map_err(warp_err)?
        }
        CheckKind::Reynolds { flow_cm3_s, diameter_mm } => {
            layout::reynolds(flow_cm3_s * 1e-6, diameter_mm * 1e-3, &CoolantSpec::default())
        }
        CheckKind::ComparisonMismatches => {
            let fixture = ComparisonFixture::bundled();
            let mut n = 0;
            for g in &fixture.comparisons {
                let r = g
                    .compare()
                    .map_err(|source| CaseStudyError::Report { id: id.clone(), source })?;
                n += g.mismatches(&r, COMPARISON_TOLERANCE).len();
            }
            n as f64
        }
        CheckKind::LayoutViolations => {
            let l = scenario.layout.as_ref().ok_or_else(|| CaseStudyError::NoLayout(id.clone()))?;
            layout::check_layout(l).violations.len() as f64
        }
    };

    let gap = (computed - check.expected).abs();
    let gap = if check.relative { gap / check.expected.abs() } else { gap };
    Ok(CheckResult {
        id: check.id.clone(),
        expected: check.expected,
        computed,
        tolerance: check.tolerance,
        relative: check.relative,
        passed: gap <= check.tolerance,
        note: check.note.clone(),
    })
}

/// Deflection in metres for a resolved warpage request.
pub fn scenario_deflection(scenario: &Scenario, request: WarpageRequest) -> Result<f64, WarpageError> {
    Ok(match request {
        WarpageRequest::Shrinkage { half_span, s_edge, s_center } => {
            warpage::deflection(&WarpageCase { half_span, s_edge, s_center })?.value
        }
        WarpageRequest::States { half_span, edge, center } => {
            warpage::deflection_from_states(&scenario.material, half_span, edge, center)?
                .deflection
                .value
        }
    })
}

pub fn run(scenario: &Scenario, expected: &ExpectedValues) -> Result<Vec<CheckResult>, CaseStudyError> {
    expected.checks.iter().map(|c| evaluate(scenario, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialLibrary;

    #[test]
    fn bundled_case_study_passes() {
        let s = Scenario::bundled_case_study(&MaterialLibrary::bundled()).unwrap();
        let results = run(&s, &ExpectedValues::bundled()).unwrap();
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(results.len(), ExpectedValues::bundled().checks.len());
    }

    #[test]
    fn failing_expectation_is_reported() {
        let s = Scenario::bundled_case_study(&MaterialLibrary::bundled()).unwrap();
        let mut check = ExpectedValues::bundled().get("thickness_ratio").unwrap().clone();
        check.expected = 3.0;
        assert!(!evaluate(&s, &check).unwrap().passed);
    }
}
