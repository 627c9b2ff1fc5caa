//! Cooling-layout records, manufacturing rule checks and coolant sizing.
//!
//! Rule limits live in JSON rule files (one bundled set per layout kind), so
//! the checker itself carries no mold-specific numbers. All lengths are in
//! metres.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed layout or rule file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid layout: field `{field}` {rule}")]
    Invalid { field: &'static str, rule: String },
}

impl LayoutError {
    pub fn is_format_error(&self) -> bool {
        matches!(self, LayoutError::Io { .. } | LayoutError::Parse(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    StraightDrilled,
    Conformal,
    HybridFullBars,
    HybridDashedBars,
}

impl LayoutKind {
    pub fn is_hybrid(self) -> bool {
        matches!(self, LayoutKind::HybridFullBars | LayoutKind::HybridDashedBars)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingLayout {
    pub kind: LayoutKind,
    pub channel_diameters: Vec<f64>,
    pub dist_channel_to_cavity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_channel_to_ejection: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insert_diameters: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_insert_to_cavity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_insert_to_channel: Option<f64>,
}

fn positive(field: &'static str, v: f64) -> Result<(), LayoutError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LayoutError::Invalid { field, rule: format!("must be > 0 (got {v})") })
    }
}

impl CoolingLayout {
    pub fn from_json_str(text: &str) -> Result<Self, LayoutError> {
        let layout: CoolingLayout = serde_json::from_str(text)?;
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.channel_diameters.is_empty() {
            return Err(LayoutError::Invalid {
                field: "channel_diameters",
                rule: "must list at least one diameter".into(),
            });
        }
        for &d in &self.channel_diameters {
            positive("channel_diameters", d)?;
        }
        positive("dist_channel_to_cavity", self.dist_channel_to_cavity)?;
        if let Some(v) = self.dist_channel_to_ejection {
            positive("dist_channel_to_ejection", v)?;
        }
        let insert_fields = [
            ("insert_diameters", self.insert_diameters.is_some()),
            ("dist_insert_to_cavity", self.dist_insert_to_cavity.is_some()),
            ("dist_insert_to_channel", self.dist_insert_to_channel.is_some()),
        ];
        for (field, present) in insert_fields {
            if present != self.kind.is_hybrid() {
                let rule = if present {
                    "is only allowed for hybrid layouts".to_string()
                } else {
                    "is required for hybrid layouts".to_string()
                };
                return Err(LayoutError::Invalid { field, rule });
            }
        }
        if let Some(ds) = &self.insert_diameters {
            if ds.is_empty() {
                return Err(LayoutError::Invalid {
                    field: "insert_diameters",
                    rule: "must list at least one diameter".into(),
                });
            }
            for &d in ds {
                positive("insert_diameters", d)?;
            }
        }
        if let Some(v) = self.dist_insert_to_cavity {
            positive("dist_insert_to_cavity", v)?;
        }
        if let Some(v) = self.dist_insert_to_channel {
            positive("dist_insert_to_channel", v)?;
        }
        Ok(())
    }

    fn values(&self, selector: Selector) -> Vec<f64> {
        match selector {
            Selector::ChannelDiameters => self.channel_diameters.clone(),
            Selector::InsertDiameters => self.insert_diameters.clone().unwrap_or_default(),
            Selector::DistChannelToCavity => vec![self.dist_channel_to_cavity],
            Selector::DistChannelToEjection => self.dist_channel_to_ejection.into_iter().collect(),
            Selector::DistInsertToCavity => self.dist_insert_to_cavity.into_iter().collect(),
            Selector::DistInsertToChannel => self.dist_insert_to_channel.into_iter().collect(),
            Selector::ChannelClearances => std::iter::once(self.dist_channel_to_cavity)
                .chain(self.dist_channel_to_ejection)
                .collect(),
        }
    }
}

pub fn load_layout(path: impl AsRef<Path>) -> Result<CoolingLayout, LayoutError> {
    CoolingLayout::from_json_str(&read(path.as_ref())?)
}

fn read(path: &Path) -> Result<String, LayoutError> {
    std::fs::read_to_string(path).map_err(|source| LayoutError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Which layout quantity a rule constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    ChannelDiameters,
    InsertDiameters,
    DistChannelToCavity,
    DistChannelToEjection,
    DistInsertToCavity,
    DistInsertToChannel,
    /// Every channel clearance present: cavity and, if given, ejection.
    ChannelClearances,
}

/// A rule bound: either a fixed length or a multiple of the largest value
/// of another selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Limit {
    Absolute(f64),
    Scaled { factor: f64, of: Selector },
}

impl Limit {
    fn resolve(&self, layout: &CoolingLayout) -> Option<f64> {
        match *self {
            Limit::Absolute(v) => Some(v),
            Limit::Scaled { factor, of } => layout
                .values(of)
                .into_iter()
                .max_by(f64::total_cmp)
                .map(|m| factor * m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub selector: Selector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<Limit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<Limit>,
    pub message: String,
}

pub fn parse_rules(text: &str) -> Result<Vec<Rule>, LayoutError> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<Vec<Rule>, LayoutError> {
    parse_rules(&read(path.as_ref())?)
}

/// Bundled rule set for a layout kind. Both hybrid kinds share one set.
pub fn bundled_rules(kind: LayoutKind) -> Vec<Rule> {
    let text = match kind {
        LayoutKind::StraightDrilled => bundled::RULES_STRAIGHT_DRILLED,
        LayoutKind::Conformal => bundled::RULES_CONFORMAL,
        LayoutKind::HybridFullBars | LayoutKind::HybridDashedBars => bundled::RULES_HYBRID,
    };
    parse_rules(text).expect("bundled rule files parse")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule_id: String,
    pub measured: f64,
    pub limit: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Relative slack so that a clearance written as exactly the limit (e.g.
/// 0.016 m against 2 × 0.008 m) is not failed by rounding.
const LIMIT_SLACK: f64 = 1e-9;

/// Checks a layout against the bundled rules for its kind.
pub fn check_layout(l: &CoolingLayout) -> RuleReport {
    check_layout_with(l, &bundled_rules(l.kind))
}

pub fn check_layout_with(l: &CoolingLayout, rules: &[Rule]) -> RuleReport {
    let mut violations = Vec::new();
    for rule in rules {
        let mut values = l.values(rule.selector);
        values.sort_by(f64::total_cmp);
        let min = rule.min.and_then(|m| m.resolve(l));
        let max = rule.max.and_then(|m| m.resolve(l));
        for v in values {
            let bound = match (min, max) {
                (Some(lo), _) if v < lo * (1.0 - LIMIT_SLACK) => Some(lo),
                (_, Some(hi)) if v > hi * (1.0 + LIMIT_SLACK) => Some(hi),
                _ => None,
            };
            if let Some(limit) = bound {
                violations.push(Violation {
                    rule_id: rule.id.clone(),
                    measured: v,
                    limit,
                    message: rule.message.clone(),
                });
            }
        }
    }
    RuleReport { passed: violations.is_empty(), violations }
}

/// Derived kinematic viscosity (m²/s) that makes the bundled coolant flow
/// rates (128, 113.8, 85.3 cm³/s through 9, 8, 6 mm) land on Re = 4.0e4.
pub const DERIVED_COOLANT_NU: f64 = 4.527e-7;

/// Flow above this Reynolds number is treated as fully turbulent.
pub const TURBULENT_RE: f64 = 1.5e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolantSpec {
    /// m²/s
    pub kinematic_viscosity: f64,
    /// °C, informational
    pub temperature: f64,
}

impl Default for CoolantSpec {
    fn default() -> Self {
        CoolantSpec { kinematic_viscosity: DERIVED_COOLANT_NU, temperature: 75.0 }
    }
}

/// Circular-duct Reynolds number from volumetric flow (m³/s) and diameter (m).
pub fn reynolds(flow_rate: f64, diameter: f64, coolant: &CoolantSpec) -> f64 {
    debug_assert!(diameter > 0.0 && flow_rate >= 0.0);
    4.0 * flow_rate / (PI * diameter * coolant.kinematic_viscosity)
}

/// Flow rate (m³/s) that gives `re_target` through `diameter`.
pub fn flow_rate_for_reynolds(re_target: f64, diameter: f64, coolant: &CoolantSpec) -> f64 {
    debug_assert!(re_target > 0.0 && diameter > 0.0);
    re_target * PI * diameter * coolant.kinematic_viscosity / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurbulenceClass {
    LaminarOrTransitional,
    TurbulentOk,
}

pub fn turbulence_class(re: f64) -> TurbulenceClass {
    match re.partial_cmp(&TURBULENT_RE) {
        Some(Ordering::Greater) => TurbulenceClass::TurbulentOk,
        _ => TurbulenceClass::LaminarOrTransitional,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn straight(cavity: f64) -> CoolingLayout {
        CoolingLayout {
            kind: LayoutKind::StraightDrilled,
            channel_diameters: vec![0.008],
            dist_channel_to_cavity: cavity,
            dist_channel_to_ejection: Some(0.016),
            insert_diameters: None,
            dist_insert_to_cavity: None,
            dist_insert_to_channel: None,
        }
    }

    fn hybrid() -> CoolingLayout {
        CoolingLayout {
            kind: LayoutKind::HybridFullBars,
            channel_diameters: vec![0.009],
            dist_channel_to_cavity: 0.010,
            dist_channel_to_ejection: None,
            insert_diameters: Some(vec![0.010, 0.008]),
            dist_insert_to_cavity: Some(0.0045),
            dist_insert_to_channel: Some(0.0045),
        }
    }

    #[test]
    fn straight_reference_layout_passes() {
        let r = check_layout(&straight(0.016));
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn straight_9mm_clearance_fails_safety_distance() {
        let r = check_layout(&straight(0.009));
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.rule_id == "min-10mm-safety-distance" && v.measured == 0.009));
        assert!(r.violations.iter().any(|v| v.rule_id == "clearance-twice-diameter" && v.limit == 0.016));
    }

    #[test]
    fn straight_12mm_fails_only_twice_diameter() {
        let r = check_layout(&straight(0.012));
        let ids: Vec<_> = r.violations.iter().map(|v| v.rule_id.as_str()).collect();
        assert_eq!(ids, ["clearance-twice-diameter"]);
    }

    #[test]
    fn hybrid_reference_layout_passes() {
        assert!(check_layout(&hybrid()).passed);
    }

    #[test]
    fn hybrid_thin_insert_gap_fails() {
        let mut l = hybrid();
        l.dist_insert_to_channel = Some(0.004);
        let r = check_layout(&l);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule_id, "insert-channel-clearance");
    }

    #[test]
    fn conformal_out_of_range_diameter() {
        let l = CoolingLayout {
            kind: LayoutKind::Conformal,
            channel_diameters: vec![0.009, 0.005, 0.012],
            dist_channel_to_cavity: 0.008,
            dist_channel_to_ejection: None,
            insert_diameters: None,
            dist_insert_to_cavity: None,
            dist_insert_to_channel: None,
        };
        let r = check_layout(&l);
        let measured: Vec<f64> = r.violations.iter().map(|v| v.measured).collect();
        assert_eq!(measured, [0.005, 0.012]);
    }

    #[test]
    fn insert_fields_only_on_hybrids() {
        let mut l = straight(0.016);
        l.insert_diameters = Some(vec![0.01]);
        assert!(matches!(l.validate(), Err(LayoutError::Invalid { field: "insert_diameters", .. })));
        let mut h = hybrid();
        h.dist_insert_to_cavity = None;
        assert!(matches!(h.validate(), Err(LayoutError::Invalid { field: "dist_insert_to_cavity", .. })));
    }

    #[test]
    fn negative_distance_rejected() {
        assert!(straight(-0.01).validate().is_err());
    }

    #[test]
    fn bundled_layouts_pass_their_rules() {
        for text in [
            bundled::LAYOUT_STRAIGHT_DRILLED,
            bundled::LAYOUT_CONFORMAL,
            bundled::LAYOUT_HYBRID_FULL_BARS,
            bundled::LAYOUT_HYBRID_DASHED_BARS,
        ] {
            let l = CoolingLayout::from_json_str(text).unwrap();
            let r = check_layout(&l);
            assert!(r.passed, "{:?}: {:?}", l.kind, r.violations);
        }
    }

    #[test]
    fn reynolds_values() {
        let c = CoolantSpec::default();
        for (q_cm3, d_mm) in [(128.0, 9.0), (113.8, 8.0), (85.3, 6.0)] {
            let re = reynolds(q_cm3 * 1e-6, d_mm * 1e-3, &c);
            assert!(((re - 4.0e4) / 4.0e4).abs() < 1e-3, "Re = {re}");
        }
        assert_eq!(reynolds(0.0, 0.009, &c), 0.0);
    }

    #[test]
    fn flow_sizing_values() {
        let c = CoolantSpec::default();
        let q = flow_rate_for_reynolds(4.0e4, 0.006, &c) * 1e6;
        assert!(((q - 85.3) / 85.3).abs() < 1e-3);
        let q = flow_rate_for_reynolds(1.5e4, 0.006, &c) * 1e6;
        assert!((q - 32.0).abs() < 0.01);
    }

    #[test]
    fn turbulence_boundary() {
        assert_eq!(turbulence_class(4.0e4), TurbulenceClass::TurbulentOk);
        assert_eq!(turbulence_class(1.5e4), TurbulenceClass::LaminarOrTransitional);
        assert_eq!(turbulence_class(0.0), TurbulenceClass::LaminarOrTransitional);
    }

    proptest! {
        #[test]
        fn sizing_inverts_reynolds(re in 1.0f64..1e6, d in 1e-3f64..0.05, nu in 1e-7f64..1e-5) {
            let c = CoolantSpec { kinematic_viscosity: nu, temperature: 20.0 };
            let back = reynolds(flow_rate_for_reynolds(re, d, &c), d, &c);
            prop_assert!(((back - re) / re).abs() < 1e-14);
        }

        #[test]
        fn reynolds_linear_in_flow(q in 1e-6f64..1e-3, k in 0.1f64..10.0, d in 1e-3f64..0.05) {
            let c = CoolantSpec::default();
            let a = reynolds(k * q, d, &c);
            let b = k * reynolds(q, d, &c);
            prop_assert!(((a - b) / b).abs() < 1e-13);
            let e = reynolds(q, k * d, &c);
            let f = reynolds(q, d, &c) / k;
            prop_assert!(((e - f) / f).abs() < 1e-13);
        }

        #[test]
        fn check_is_order_independent(mut ds in proptest::collection::vec(0.003f64..0.012, 1..8), seed in any::<u64>()) {
            let mut l = CoolingLayout {
                kind: LayoutKind::Conformal,
                channel_diameters: ds.clone(),
                dist_channel_to_cavity: 0.008,
                dist_channel_to_ejection: None,
                insert_diameters: None,
                dist_insert_to_cavity: None,
                dist_insert_to_channel: None,
            };
            let a = check_layout(&l);
            let n = ds.len();
            ds.rotate_left((seed as usize) % n);
            ds.reverse();
            l.channel_diameters = ds;
            prop_assert_eq!(a, check_layout(&l));
        }
    }
}
