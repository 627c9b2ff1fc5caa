//! Baseline-versus-variant comparison of cooling-system results, with the
//! industrial acceptance limits on warpage and mold temperature spread.
//!
//! Every metric is lower-is-better, so a positive improvement means the
//! variant beats the baseline.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed comparison file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("variant `{variant}` has metric {found}, expected {expected}")]
    MixedMetrics { variant: String, expected: Metric, found: Metric },
    #[error("baseline `{0}` has zero value; improvement is undefined")]
    ZeroBaseline(String),
    #[error("sample `{variant}` has invalid value {value} (must be finite and >= 0)")]
    InvalidValue { variant: String, value: f64 },
}

impl ReportError {
    pub fn is_format_error(&self) -> bool {
        matches!(self, ReportError::Io { .. } | ReportError::Parse(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "max_cooling_time_s")]
    MaxCoolingTime,
    #[serde(rename = "mold_temp_difference_C")]
    MoldTempDifference,
    #[serde(rename = "total_warpage_mm")]
    TotalWarpage,
    #[serde(rename = "warpage_stress_MPa")]
    WarpageStress,
}

impl Metric {
    pub fn key(self) -> &'static str {
        match self {
            Metric::MaxCoolingTime => "max_cooling_time_s",
            Metric::MoldTempDifference => "mold_temp_difference_C",
            Metric::TotalWarpage => "total_warpage_mm",
            Metric::WarpageStress => "warpage_stress_MPa",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::MaxCoolingTime => "s",
            Metric::MoldTempDifference => "°C",
            Metric::TotalWarpage => "mm",
            Metric::WarpageStress => "MPa",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub metric: Metric,
    pub variant_name: String,
    pub value: f64,
}

impl MetricSample {
    pub fn new(metric: Metric, variant_name: impl Into<String>, value: f64) -> Self {
        MetricSample { metric, variant_name: variant_name.into(), value }
    }
}

/// Industrial acceptance limits.
pub const MAX_WARPAGE_MM: f64 = 1.0;
pub const MAX_MOLD_TEMP_DIFFERENCE_C: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NoRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compliance {
    pub verdict: Verdict,
    pub rule: Option<String>,
}

/// Applies the acceptance limit for the sample's metric. Bounds are
/// inclusive.
pub fn compliance_check(sample: &MetricSample) -> Compliance {
    let (limit, rule) = match sample.metric {
        Metric::TotalWarpage => (MAX_WARPAGE_MM, "total warpage must not exceed 1 mm"),
        Metric::MoldTempDifference => {
            (MAX_MOLD_TEMP_DIFFERENCE_C, "mold temperature difference must be <= 10 °C")
        }
        Metric::MaxCoolingTime | Metric::WarpageStress => {
            return Compliance { verdict: Verdict::NoRule, rule: None };
        }
    };
    let verdict = if sample.value <= limit { Verdict::Pass } else { Verdict::Fail };
    Compliance { verdict, rule: Some(rule.to_string()) }
}

fn round3(x: f64) -> f64 {
    let r = (x * 1000.0).round() / 1000.0;
    // avoid "-0.0" in output
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub variant_name: String,
    pub value: f64,
    pub reduction: f64,
    pub improvement_pct: f64,
    pub value_3dp: f64,
    pub reduction_3dp: f64,
    pub improvement_pct_3dp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceRow {
    pub variant_name: String,
    pub rule: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub metric: Metric,
    pub baseline: MetricSample,
    /// Baseline first, then variants in input order.
    pub rows: Vec<ComparisonRow>,
    pub compliance: Vec<ComplianceRow>,
}

fn check_value(s: &MetricSample) -> Result<(), ReportError> {
    if s.value.is_finite() && s.value >= 0.0 {
        Ok(())
    } else {
        Err(ReportError::InvalidValue { variant: s.variant_name.clone(), value: s.value })
    }
}

pub fn compare(
    baseline: &MetricSample,
    variants: &[MetricSample],
) -> Result<ComparisonReport, ReportError> {
    check_value(baseline)?;
    if baseline.value == 0.0 {
        return Err(ReportError::ZeroBaseline(baseline.variant_name.clone()));
    }
    for v in variants {
        if v.metric != baseline.metric {
            return Err(ReportError::MixedMetrics {
                variant: v.variant_name.clone(),
                expected: baseline.metric,
                found: v.metric,
            });
        }
        check_value(v)?;
    }

    let row = |s: &MetricSample| {
        let reduction = baseline.value - s.value;
        let improvement_pct = 100.0 * reduction / baseline.value;
        ComparisonRow {
            variant_name: s.variant_name.clone(),
            value: s.value,
            reduction,
            improvement_pct,
            value_3dp: round3(s.value),
            reduction_3dp: round3(reduction),
            improvement_pct_3dp: round3(improvement_pct),
        }
    };
    let all = std::iter::once(baseline).chain(variants);
    let rows = all.clone().map(row).collect();
    let compliance = all
        .filter_map(|s| {
            let c = compliance_check(s);
            c.rule.map(|rule| ComplianceRow {
                variant_name: s.variant_name.clone(),
                rule,
                verdict: c.verdict,
            })
        })
        .collect();
    Ok(ComparisonReport { metric: baseline.metric, baseline: baseline.clone(), rows, compliance })
}

impl ComparisonReport {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let unit = self.metric.unit();
        let width = self.rows.iter().map(|r| r.variant_name.len()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.metric, unit);
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  {:>14}",
            "variant", "value", "reduction", "improvement_%"
        );
        for (i, r) in self.rows.iter().enumerate() {
            if i == 0 {
                let _ = writeln!(out, "{:<width$}  {:>12.3}  {:>12}  {:>14}", r.variant_name, r.value, "-", "-");
            } else {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>12.3}  {:>12.3}  {:>14.3}",
                    r.variant_name, r.value, r.reduction, r.improvement_pct
                );
            }
        }
        for c in &self.compliance {
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::NoRule => "n/a",
            };
            let _ = writeln!(out, "  {:<width$}  {verdict}  ({})", c.variant_name, c.rule);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,variant_name,value,reduction,improvement_pct\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.3},{:.3},{:.3}",
                self.metric, r.variant_name, r.value, r.reduction, r.improvement_pct
            );
        }
        out
    }
}

/// One metric group of a comparison fixture file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureGroup {
    pub metric: Metric,
    pub baseline: FixtureSample,
    pub variants: Vec<FixtureSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSample {
    pub variant_name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_reduction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonFixture {
    pub comparisons: Vec<FixtureGroup>,
}

/// A recomputed value that disagrees with the value recorded in a fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub metric: Metric,
    pub variant_name: String,
    pub column: String,
    pub printed: f64,
    pub computed: f64,
}

impl FixtureGroup {
    pub fn samples(&self) -> (MetricSample, Vec<MetricSample>) {
        let base = MetricSample::new(self.metric, &self.baseline.variant_name, self.baseline.value);
        let vars = self
            .variants
            .iter()
            .map(|v| MetricSample::new(self.metric, &v.variant_name, v.value))
            .collect();
        (base, vars)
    }

    pub fn compare(&self) -> Result<ComparisonReport, ReportError> {
        let (base, vars) = self.samples();
        compare(&base, &vars)
    }

    /// Recomputed reduction/improvement pairs that differ from the printed
    /// ones by more than `tolerance` (absolute, column units).
    pub fn mismatches(&self, report: &ComparisonReport, tolerance: f64) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for (v, row) in self.variants.iter().zip(report.rows.iter().skip(1)) {
            let cols = [
                ("reduction", v.printed_reduction, row.reduction),
                ("improvement_pct", v.printed_improvement_pct, row.improvement_pct),
            ];
            for (column, printed, computed) in cols {
                if let Some(printed) = printed {
                    if (printed - computed).abs() > tolerance {
                        out.push(Mismatch {
                            metric: self.metric,
                            variant_name: v.variant_name.clone(),
                            column: column.to_string(),
                            printed,
                            computed,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn printed_pairs(&self) -> usize {
        self.variants
            .iter()
            .filter(|v| v.printed_reduction.is_some() || v.printed_improvement_pct.is_some())
            .count()
    }
}

impl ComparisonFixture {
    pub fn from_json_str(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn bundled() -> Self {
        Self::from_json_str(crate::bundled::COMPARISON_FIXTURE).expect("bundled comparison fixture parses")
    }
}

pub fn load_comparison_fixture(path: impl AsRef<Path>) -> Result<ComparisonFixture, ReportError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ComparisonFixture::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(metric: Metric, name: &str, v: f64) -> MetricSample {
        MetricSample::new(metric, name, v)
    }

    #[test]
    fn cooling_time_row() {
        let r = compare(
            &s(Metric::MaxCoolingTime, "straight", 262.550),
            &[s(Metric::MaxCoolingTime, "conformal", 87.427)],
        )
        .unwrap();
        assert_eq!(r.rows[0].reduction, 0.0);
        assert_eq!(r.rows[0].improvement_pct, 0.0);
        assert!((r.rows[1].reduction - 175.123).abs() < 1e-9);
        assert_eq!(r.rows[1].improvement_pct_3dp, 66.701);
        assert!(r.compliance.is_empty());
    }

    #[test]
    fn stress_row() {
        let r = compare(
            &s(Metric::WarpageStress, "straight", 48.587),
            &[s(Metric::WarpageStress, "conformal", 8.803)],
        )
        .unwrap();
        assert_eq!(r.rows[1].reduction_3dp, 39.784);
        assert_eq!(r.rows[1].improvement_pct_3dp, 81.882);
    }

    #[test]
    fn equal_variant_has_zero_improvement() {
        let b = s(Metric::TotalWarpage, "a", 7.636);
        let r = compare(&b, &[s(Metric::TotalWarpage, "b", 7.636)]).unwrap();
        assert_eq!(r.rows[1].reduction, 0.0);
        assert_eq!(r.rows[1].improvement_pct, 0.0);
    }

    #[test]
    fn errors() {
        let b = s(Metric::TotalWarpage, "a", 1.0);
        assert!(matches!(
            compare(&b, &[s(Metric::WarpageStress, "b", 1.0)]),
            Err(ReportError::MixedMetrics { .. })
        ));
        assert!(matches!(
            compare(&s(Metric::TotalWarpage, "a", 0.0), &[]),
            Err(ReportError::ZeroBaseline(_))
        ));
        assert!(matches!(
            compare(&b, &[s(Metric::TotalWarpage, "b", -1.0)]),
            Err(ReportError::InvalidValue { .. })
        ));
    }

    #[test]
    fn compliance_limits() {
        let w = |v| compliance_check(&s(Metric::TotalWarpage, "x", v)).verdict;
        assert_eq!(w(0.725), Verdict::Pass);
        assert_eq!(w(1.0), Verdict::Pass);
        assert_eq!(w(1.067), Verdict::Fail);
        let t = |v| compliance_check(&s(Metric::MoldTempDifference, "x", v)).verdict;
        assert_eq!(t(12.757), Verdict::Fail);
        assert_eq!(t(4.972), Verdict::Pass);
        assert_eq!(t(10.0), Verdict::Pass);
        assert_eq!(t(10.668), Verdict::Fail);
        assert_eq!(compliance_check(&s(Metric::WarpageStress, "x", 99.0)).verdict, Verdict::NoRule);
    }

    #[test]
    fn bundled_fixture_reproduces_printed_columns() {
        let fx = ComparisonFixture::bundled();
        let mut pairs = 0;
        for g in &fx.comparisons {
            let r = g.compare().unwrap();
            assert!(g.mismatches(&r, 0.01).is_empty(), "{:?}", g.mismatches(&r, 0.01));
            pairs += g.printed_pairs();
        }
        assert_eq!(pairs, 12);
    }

    #[test]
    fn text_and_csv_render() {
        let g = &ComparisonFixture::bundled().comparisons[0];
        let r = g.compare().unwrap();
        let text = r.to_text();
        assert!(text.contains("conformal_channels"));
        assert!(text.contains("66.701"));
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.contains("max_cooling_time_s,conformal_channels,87.427,175.123,66.701"));
    }

    proptest! {
        #[test]
        fn improvement_is_scale_invariant(b in 0.1f64..1e3, v in 0.0f64..1e3, k in 1e-3f64..1e3) {
            let r1 = compare(&s(Metric::MaxCoolingTime, "b", b), &[s(Metric::MaxCoolingTime, "v", v)]).unwrap();
            let r2 = compare(&s(Metric::MaxCoolingTime, "b", k * b), &[s(Metric::MaxCoolingTime, "v", k * v)]).unwrap();
            let (a, c) = (r1.rows[1].improvement_pct, r2.rows[1].improvement_pct);
            prop_assert!((a - c).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn rows_follow_input_order(values in proptest::collection::vec(0.0f64..100.0, 1..6)) {
            let b = s(Metric::TotalWarpage, "base", 50.0);
            let vars: Vec<_> = values.iter().enumerate().map(|(i, &v)| s(Metric::TotalWarpage, &format!("v{i}"), v)).collect();
            let fwd = compare(&b, &vars).unwrap();
            let mut rev = vars.clone();
            rev.reverse();
            let bwd = compare(&b, &rev).unwrap();
            for row in &fwd.rows[1..] {
                let other = bwd.rows.iter().find(|r| r.variant_name == row.variant_name).unwrap();
                prop_assert_eq!(row, other);
            }
            let names: Vec<_> = fwd.rows[1..].iter().map(|r| r.variant_name.clone()).collect();
            let expected: Vec<_> = (0..values.len()).map(|i| format!("v{i}")).collect();
            prop_assert_eq!(names, expected);
        }
    }
}
