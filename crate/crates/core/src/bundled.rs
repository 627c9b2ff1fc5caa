//! Data files shipped with the crate, embedded at compile time.

pub const MATERIAL_PLEXIGLAS_8N: &str = include_str!("../data/materials/plexiglas_8n.json");
pub const MATERIAL_STEEL_1_2709: &str = include_str!("../data/materials/steel_1_2709.json");
pub const MATERIAL_FASTCOOL_50: &str = include_str!("../data/materials/fastcool_50.json");

pub const LAYOUT_STRAIGHT_DRILLED: &str = include_str!("../data/layouts/straight_drilled.json");
pub const LAYOUT_CONFORMAL: &str = include_str!("../data/layouts/conformal.json");
pub const LAYOUT_HYBRID_FULL_BARS: &str = include_str!("../data/layouts/hybrid_full_bars.json");
pub const LAYOUT_HYBRID_DASHED_BARS: &str = include_str!("../data/layouts/hybrid_dashed_bars.json");

pub const RULES_STRAIGHT_DRILLED: &str = include_str!("../data/rules/straight_drilled.json");
pub const RULES_CONFORMAL: &str = include_str!("../data/rules/conformal.json");
pub const RULES_HYBRID: &str = include_str!("../data/rules/hybrid.json");

pub const SCENARIO_CASE_STUDY: &str = include_str!("../data/scenarios/chimsel_case_study.json");
pub const SCENARIO_SIMULATION: &str = include_str!("../data/scenarios/chimsel_simulation.json");

pub const COMPARISON_FIXTURE: &str = include_str!("../data/comparison/cooling_variants.json");

pub const CASE_STUDY_EXPECTED: &str = include_str!("../data/case_study_expected.json");

/// Looks up a bundled file by its path relative to the `data/` directory.
/// Leading `./` and `../<dir>/` prefixes are accepted so that references
/// written relative to a bundled scenario resolve.
pub fn file(rel: &str) -> Option<&'static str> {
    let key = rel.trim_start_matches("./").trim_start_matches("../");
    Some(match key {
        "materials/plexiglas_8n.json" => MATERIAL_PLEXIGLAS_8N,
        "materials/steel_1_2709.json" => MATERIAL_STEEL_1_2709,
        "materials/fastcool_50.json" => MATERIAL_FASTCOOL_50,
        "layouts/straight_drilled.json" => LAYOUT_STRAIGHT_DRILLED,
        "layouts/conformal.json" => LAYOUT_CONFORMAL,
        "layouts/hybrid_full_bars.json" => LAYOUT_HYBRID_FULL_BARS,
        "layouts/hybrid_dashed_bars.json" => LAYOUT_HYBRID_DASHED_BARS,
        "rules/straight_drilled.json" => RULES_STRAIGHT_DRILLED,
        "rules/conformal.json" => RULES_CONFORMAL,
        "rules/hybrid.json" => RULES_HYBRID,
        "scenarios/chimsel_case_study.json" => SCENARIO_CASE_STUDY,
        "scenarios/chimsel_simulation.json" => SCENARIO_SIMULATION,
        "comparison/cooling_variants.json" => COMPARISON_FIXTURE,
        "case_study_expected.json" => CASE_STUDY_EXPECTED,
        _ => return None,
    })
}
