//! `moldcool` command line.
//!
//! Exit codes: 0 success, 1 validation or domain error (including failed
//! layout checks, fixture mismatches and case-study misses), 2 file or format
//! error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::case_study::{self, CheckResult, ExpectedValues};
use crate::layout::{self, CoolantSpec, CoolingLayout, RuleReport, TurbulenceClass};
use crate::materials::{self, MaterialLibrary, ThermoplasticMaterial};
use crate::pvt::{self, PvtState, ShrinkageResult, Validity};
use crate::report::{self, ComparisonFixture, ComparisonReport, Mismatch};
use crate::scenario::{self, Scenario, WarpageRequest};
use crate::thermal::{self, SeriesOptions, FD_DEFAULT_NODES, FD_DEFAULT_SAFETY};
use crate::warpage::{self, ShrinkageDirection, WarpageCase};
use crate::kelvin_to_celsius;

#[derive(Debug, Parser)]
#[command(name = "moldcool", version, about = "Analytical cooling-phase calculations for injection molding")]
pub struct Cli {
    /// Material library file; repeat to merge several. Defaults to the bundled records.
    #[arg(long = "materials", global = true)]
    pub materials: Vec<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Specific volume and shrinkage over a temperature/pressure grid.
    Pvt(PvtArgs),
    /// Cooling time of the thickest section, with the midplane curve.
    CoolingTime(CoolingArgs),
    /// Deflection from edge/centre shrinkage.
    Warpage(WarpageArgs),
    /// Coolant Reynolds number or flow sizing per channel diameter.
    Hydraulics(HydraulicsArgs),
    /// Check a cooling layout against its design rules.
    CheckLayout(CheckLayoutArgs),
    /// Baseline/variant comparison with acceptance limits.
    Compare(CompareArgs),
    /// Run the bundled case study and diff against expected values.
    CaseStudy(CaseStudyArgs),
}

#[derive(Debug, Args)]
pub struct PvtArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Material name, used when no scenario is given.
    #[arg(long, default_value = "plexiglas_8n")]
    pub material: String,
    #[arg(long, default_value_t = 20.0)]
    pub t_min_c: f64,
    #[arg(long, default_value_t = 240.0)]
    pub t_max_c: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_step_c: f64,
    #[arg(long, default_value_t = 150.0)]
    pub p_max_mpa: f64,
    #[arg(long, default_value_t = 50.0)]
    pub p_step_mpa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WallSource {
    Mold,
    Coolant,
}

#[derive(Debug, Args)]
pub struct CoolingArgs {
    /// Scenario file; defaults to the bundled case study.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Override the governing thickness, mm.
    #[arg(long)]
    pub thickness_mm: Option<f64>,
    /// Which process temperature stands for the wall.
    #[arg(long, value_enum, default_value_t = WallSource::Mold)]
    pub wall: WallSource,
    /// Cross-check against the finite-difference solver.
    #[arg(long)]
    pub fd_check: bool,
    #[arg(long, default_value_t = FD_DEFAULT_NODES)]
    pub fd_nodes: usize,
    /// Maximum series terms.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Relative truncation tolerance of the series.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Points in the midplane curve (csv output).
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct WarpageArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value = "plexiglas_8n")]
    pub material: String,
    #[arg(long)]
    pub half_span_mm: Option<f64>,
    #[arg(long, requires = "s_center")]
    pub s_edge: Option<f64>,
    #[arg(long, requires = "s_edge")]
    pub s_center: Option<f64>,
    #[arg(long, requires_all = ["edge_p_mpa", "center_t_c", "center_p_mpa"])]
    pub edge_t_c: Option<f64>,
    #[arg(long)]
    pub edge_p_mpa: Option<f64>,
    #[arg(long)]
    pub center_t_c: Option<f64>,
    #[arg(long)]
    pub center_p_mpa: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HydraulicsArgs {
    /// Channel diameters, mm.
    #[arg(long = "diameter-mm", value_delimiter = ',', default_values_t = [9.0, 8.0, 6.0])]
    pub diameters_mm: Vec<f64>,
    /// Flow rates, cm³/s: one for all diameters or one per diameter.
    #[arg(long = "flow-cm3s", value_delimiter = ',', conflicts_with = "re")]
    pub flows_cm3s: Vec<f64>,
    /// Target Reynolds number for flow sizing.
    #[arg(long)]
    pub re: Option<f64>,
    /// Coolant kinematic viscosity, m²/s.
    #[arg(long, default_value_t = layout::DERIVED_COOLANT_NU)]
    pub nu: f64,
}

#[derive(Debug, Args)]
pub struct CheckLayoutArgs {
    #[arg(long)]
    pub layout: PathBuf,
    /// Rule file; defaults to the bundled rules for the layout kind.
    #[arg(long)]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comparison fixture; defaults to the bundled cooling-variant results.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Expected-values file; defaults to the bundled one.
    #[arg(long)]
    pub expected: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Validation or domain failure, exit code 1.
    Domain(String),
    /// File or format failure, exit code 2.
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Format(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Format(m) => m,
        }
    }
}

fn classify(is_format: bool, msg: impl std::fmt::Display) -> CliError {
    if is_format {
        CliError::Format(msg.to_string())
    } else {
        CliError::Domain(msg.to_string())
    }
}

macro_rules! impl_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                classify(e.is_format_error(), e)
            }
        }
    )*};
}
impl_from!(
    materials::MaterialError,
    layout::LayoutError,
    report::ReportError,
    scenario::ScenarioError
);

macro_rules! impl_from_domain {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}
impl_from_domain!(pvt::PvtError, thermal::ThermalError, warpage::WarpageError);

impl From<case_study::CaseStudyError> for CliError {
    fn from(e: case_study::CaseStudyError) -> Self {
        classify(matches!(e, case_study::CaseStudyError::Parse(_)), e)
    }
}

/// A command result renderable in every output format.
trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;
}

struct Outcome {
    body: String,
    /// Set when the command ran but its result counts as a failure.
    failure: Option<String>,
}

fn render<R: Render>(r: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("outputs serialize");
            s.push('\n');
            s
        }
        Format::Text => r.text(),
        Format::Csv => r.csv(),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = write_output(&cli, &outcome.body, stdout) {
                let _ = writeln!(stderr, "error: {}", e.message());
                return e.exit_code();
            }
            match outcome.failure {
                Some(msg) => {
                    let _ = writeln!(stderr, "{msg}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn write_output(cli: &Cli, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Format(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Format(format!("cannot write output: {e}"))),
    }
}

fn library(cli: &Cli) -> Result<MaterialLibrary, CliError> {
    if cli.materials.is_empty() {
        return Ok(MaterialLibrary::bundled());
    }
    let mut lib = MaterialLibrary::default();
    for path in &cli.materials {
        lib.merge(materials::load_material_library(path)?)?;
    }
    Ok(lib)
}

fn load_scenario(path: Option<&PathBuf>, lib: &MaterialLibrary) -> Result<Scenario, CliError> {
    Ok(match path {
        Some(p) => scenario::load_scenario(p, lib)?,
        None => Scenario::bundled_case_study(lib)?,
    })
}

fn thermoplastic<'a>(lib: &'a MaterialLibrary, name: &str) -> Result<&'a ThermoplasticMaterial, CliError> {
    lib.thermoplastic(name)
        .ok_or_else(|| CliError::Domain(format!("unknown material `{name}` (not in the material library)")))
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let ok = |body| Ok(Outcome { body, failure: None });
    match &cli.command {
        Command::Pvt(a) => ok(render(&pvt_command(cli, a)?, cli.format)),
        Command::CoolingTime(a) => ok(render(&cooling_command(cli, a)?, cli.format)),
        Command::Warpage(a) => ok(render(&warpage_command(cli, a)?, cli.format)),
        Command::Hydraulics(a) => ok(render(&hydraulics_command(a)?, cli.format)),
        Command::CheckLayout(a) => {
            let out = check_layout_command(a)?;
            let failure = (!out.report.passed)
                .then(|| format!("layout check failed: {} violation(s)", out.report.violations.len()));
            Ok(Outcome { body: render(&out, cli.format), failure })
        }
        Command::Compare(a) => {
            let out = compare_command(a)?;
            let failure = (!out.mismatches.is_empty())
                .then(|| format!("{} value(s) differ from the fixture's recorded columns", out.mismatches.len()));
            Ok(Outcome { body: render(&out, cli.format), failure })
        }
        Command::CaseStudy(a) => {
            let out = case_study_command(cli, a)?;
            let failed = out.checks.iter().filter(|c| !c.passed).count();
            let failure = (failed > 0).then(|| format!("case study: {failed} check(s) outside tolerance"));
            Ok(Outcome { body: render(&out, cli.format), failure })
        }
    }
}

// ---------------------------------------------------------------- pvt

#[derive(Debug, Serialize)]
struct PvtRow {
    temperature_c: f64,
    temperature_k: f64,
    pressure_mpa: f64,
    specific_volume_m3_kg: f64,
    r_v: f64,
    s_linear: f64,
    validity: Validity,
}

#[derive(Debug, Serialize)]
struct PvtOutput {
    material: String,
    pack_temperature_c: f64,
    pack_pressure_mpa: f64,
    pack_shrinkage: ShrinkageResult,
    grid: Vec<PvtRow>,
}

fn grid(lo: f64, hi: f64, step: f64, what: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(CliError::Domain(format!("invalid {what} grid: {lo}..{hi} step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn pvt_command(cli: &Cli, a: &PvtArgs) -> Result<PvtOutput, CliError> {
    let lib = library(cli)?;
    let (mat, pack) = match &a.scenario {
        Some(p) => {
            let s = scenario::load_scenario(p, &lib)?;
            let pack = s.default_pack_state()?;
            (s.material, pack)
        }
        None => {
            let m = thermoplastic(&lib, &a.material)?.clone();
            let pack = PvtState::from_celsius_mpa(m.t_freeze, 0.0)?;
            (m, pack)
        }
    };
    let mut rows = Vec::new();
    for t_c in grid(a.t_min_c, a.t_max_c, a.t_step_c, "temperature")? {
        for p_mpa in grid(0.0, a.p_max_mpa, a.p_step_mpa, "pressure")? {
            let state = PvtState::from_celsius_mpa(t_c, p_mpa)?;
            let v = pvt::specific_volume(&mat, state)?;
            let s = pvt::shrinkage(&mat, state)?;
            rows.push(PvtRow {
                temperature_c: t_c,
                temperature_k: state.temperature,
                pressure_mpa: p_mpa,
                specific_volume_m3_kg: v.value,
                r_v: s.r_v,
                s_linear: s.s_linear,
                validity: v.validity,
            });
        }
    }
    Ok(PvtOutput {
        material: mat.name.clone(),
        pack_temperature_c: kelvin_to_celsius(pack.temperature),
        pack_pressure_mpa: pack.pressure / 1e6,
        pack_shrinkage: pvt::shrinkage(&mat, pack)?,
        grid: rows,
    })
}

impl Render for PvtOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "material: {}", self.material);
        let _ = writeln!(
            s,
            "packing state {:.2} °C / {:.1} MPa: r_v = {:.6}, linear shrinkage = {:.6}",
            self.pack_temperature_c, self.pack_pressure_mpa, self.pack_shrinkage.r_v, self.pack_shrinkage.s_linear
        );
        let _ = writeln!(s, "{:>8}  {:>8}  {:>14}  {:>10}  {:>10}  validity", "T [°C]", "P [MPa]", "v [m3/kg]", "r_v", "S");
        for r in &self.grid {
            let flag = if r.validity == Validity::InRange { "" } else { "extrapolated" };
            let _ = writeln!(
                s,
                "{:>8.2}  {:>8.2}  {:>14.6e}  {:>10.6}  {:>10.6}  {flag}",
                r.temperature_c, r.pressure_mpa, r.specific_volume_m3_kg, r.r_v, r.s_linear
            );
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("temperature_c,pressure_mpa,specific_volume_m3_kg,r_v,s_linear,in_range\n");
        for r in &self.grid {
            let _ = writeln!(
                s,
                "{},{},{:e},{},{},{}",
                r.temperature_c,
                r.pressure_mpa,
                r.specific_volume_m3_kg,
                r.r_v,
                r.s_linear,
                r.validity == Validity::InRange
            );
        }
        s
    }
}

// ---------------------------------------------------------------- cooling

#[derive(Debug, Serialize)]
struct FdCheck {
    nodes: usize,
    safety: f64,
    time_s: f64,
    rel_diff: f64,
}

#[derive(Debug, Serialize)]
struct ReferenceNote {
    reference_s: f64,
    reproducing_thickness_m: f64,
    rel_diff_pct: f64,
    note: String,
}

#[derive(Debug, Serialize)]
struct CoolingOutput {
    scenario: String,
    thickness_m: f64,
    t_melt_c: f64,
    t_wall_c: f64,
    t_eject_c: f64,
    alpha_p: f64,
    cooling_time_s: f64,
    fourier_at_ejection: f64,
    midplane_at_cooling_time_c: f64,
    series_terms_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd_oracle: Option<FdCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceNote>,
    #[serde(skip)]
    curve: Vec<(f64, f64)>,
}

fn cooling_command(cli: &Cli, a: &CoolingArgs) -> Result<CoolingOutput, CliError> {
    let lib = library(cli)?;
    let s = load_scenario(a.scenario.as_ref(), &lib)?;
    let mut p = s.cooling_problem();
    if let Some(mm) = a.thickness_mm {
        p.thickness = mm * 1e-3;
    }
    if a.wall == WallSource::Coolant {
        p.t_wall = s.process.coolant_temperature_c;
    }
    let defaults = SeriesOptions::default();
    let opts = SeriesOptions {
        max_terms: a.terms.unwrap_or(defaults.max_terms),
        rel_tolerance: a.tol.unwrap_or(defaults.rel_tolerance),
    };
    let t_cool = thermal::cooling_time(&p)?;
    let mid = thermal::midplane_temperature(&p, t_cool, &opts)?;
    let curve = thermal::midplane_curve(&p, 1.5 * t_cool.max(p.time_constant()), a.samples, &opts)?;

    let fd_oracle = if a.fd_check {
        let t = thermal::fd_cooling_oracle(&p, a.fd_nodes, FD_DEFAULT_SAFETY)?;
        Some(FdCheck { nodes: a.fd_nodes, safety: FD_DEFAULT_SAFETY, time_s: t, rel_diff: (t - t_cool) / t_cool })
    } else {
        None
    };

    // Published reference for the bundled case study only.
    let reference = if a.scenario.is_none() && a.thickness_mm.is_none() && a.wall == WallSource::Mold {
        ExpectedValues::bundled().get("cooling_time_reference_s").map(|c| {
            let ratio = 4.0 / std::f64::consts::PI * (p.t_melt - p.t_wall) / (p.t_eject - p.t_wall);
            let thickness = (c.expected * std::f64::consts::PI.powi(2) * p.alpha_p / ratio.ln()).sqrt();
            ReferenceNote {
                reference_s: c.expected,
                reproducing_thickness_m: thickness,
                rel_diff_pct: 100.0 * (t_cool - c.expected) / c.expected,
                note: c.note.clone().unwrap_or_default(),
            }
        })
    } else {
        None
    };

    Ok(CoolingOutput {
        scenario: s.name.clone(),
        thickness_m: p.thickness,
        t_melt_c: p.t_melt,
        t_wall_c: p.t_wall,
        t_eject_c: p.t_eject,
        alpha_p: p.alpha_p,
        cooling_time_s: t_cool,
        fourier_at_ejection: p.fourier(t_cool),
        midplane_at_cooling_time_c: mid.celsius,
        series_terms_used: mid.terms_used,
        fd_oracle,
        reference,
        curve,
    })
}

impl Render for CoolingOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        let _ = writeln!(
            s,
            "thickness {:.2} mm, melt {:.1} °C, wall {:.1} °C, eject {:.1} °C, alpha {:e} m2/s",
            self.thickness_m * 1e3,
            self.t_melt_c,
            self.t_wall_c,
            self.t_eject_c,
            self.alpha_p
        );
        let _ = writeln!(s, "cooling time: {:.1} s (Fourier number {:.3})", self.cooling_time_s, self.fourier_at_ejection);
        let _ = writeln!(
            s,
            "series midplane at that time: {:.4} °C ({} terms)",
            self.midplane_at_cooling_time_c, self.series_terms_used
        );
        if let Some(fd) = &self.fd_oracle {
            let _ = writeln!(
                s,
                "finite-difference check ({} nodes): {:.1} s ({:+.3} %)",
                fd.nodes,
                fd.time_s,
                100.0 * fd.rel_diff
            );
        }
        if let Some(r) = &self.reference {
            let _ = writeln!(
                s,
                "reference value {:.1} s: reproduced at {:.2} mm; this run differs by {:+.1} %",
                r.reference_s,
                r.reproducing_thickness_m * 1e3,
                r.rel_diff_pct
            );
            let _ = writeln!(s, "  {}", r.note);
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("t,T_midplane\n");
        for (t, temp) in &self.curve {
            let _ = writeln!(s, "{t},{temp}");
        }
        s
    }
}

// ---------------------------------------------------------------- warpage

#[derive(Debug, Serialize)]
struct WarpageOutput {
    half_span_m: f64,
    s_edge: f64,
    s_center: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<ShrinkageResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<ShrinkageResult>,
    differential: f64,
    direction: ShrinkageDirection,
    deflection_m: f64,
    deflection_mm: f64,
}

fn warpage_command(cli: &Cli, a: &WarpageArgs) -> Result<WarpageOutput, CliError> {
    let lib = library(cli)?;
    let (mat, request) = match (&a.scenario, a.s_edge, a.edge_t_c) {
        (Some(path), _, _) => {
            let s = scenario::load_scenario(path, &lib)?;
            let mut r = s.warpage_request()?;
            if let Some(mm) = a.half_span_mm {
                match &mut r {
                    WarpageRequest::Shrinkage { half_span, .. } | WarpageRequest::States { half_span, .. } => {
                        *half_span = mm * 1e-3
                    }
                }
            }
            (s.material, r)
        }
        (None, Some(s_edge), _) => {
            let half_span = half_span_arg(a)?;
            let s_center = a.s_center.expect("clap enforces s_center with s_edge");
            (thermoplastic(&lib, &a.material)?.clone(), WarpageRequest::Shrinkage { half_span, s_edge, s_center })
        }
        (None, None, Some(edge_t)) => {
            let half_span = half_span_arg(a)?;
            let edge = PvtState::from_celsius_mpa(edge_t, a.edge_p_mpa.unwrap_or_default())?;
            let center = PvtState::from_celsius_mpa(
                a.center_t_c.unwrap_or_default(),
                a.center_p_mpa.unwrap_or_default(),
            )?;
            (thermoplastic(&lib, &a.material)?.clone(), WarpageRequest::States { half_span, edge, center })
        }
        (None, None, None) => {
            let s = Scenario::bundled_case_study(&lib)?;
            let r = s.warpage_request()?;
            (s.material, r)
        }
    };
    Ok(match request {
        WarpageRequest::Shrinkage { half_span, s_edge, s_center } => {
            let d = warpage::deflection(&WarpageCase { half_span, s_edge, s_center })?;
            WarpageOutput {
                half_span_m: half_span,
                s_edge,
                s_center,
                edge: None,
                center: None,
                differential: d.differential,
                direction: d.direction,
                deflection_m: d.value,
                deflection_mm: d.value * 1e3,
            }
        }
        WarpageRequest::States { half_span, edge, center } => {
            let r = warpage::deflection_from_states(&mat, half_span, edge, center)?;
            WarpageOutput {
                half_span_m: half_span,
                s_edge: r.edge.s_linear,
                s_center: r.center.s_linear,
                edge: Some(r.edge),
                center: Some(r.center),
                differential: r.deflection.differential,
                direction: r.deflection.direction,
                deflection_m: r.deflection.value,
                deflection_mm: r.deflection.value * 1e3,
            }
        }
    })
}

fn half_span_arg(a: &WarpageArgs) -> Result<f64, CliError> {
    a.half_span_mm
        .map(|mm| mm * 1e-3)
        .ok_or_else(|| CliError::Domain("--half-span-mm is required without --scenario".into()))
}

impl Render for WarpageOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        if let (Some(e), Some(c)) = (&self.edge, &self.center) {
            let _ = writeln!(s, "edge:   v = {:.6e} m3/kg, r_v = {:.6}, S = {:.6}", e.v_state, e.r_v, e.s_linear);
            let _ = writeln!(s, "center: v = {:.6e} m3/kg, r_v = {:.6}, S = {:.6}", c.v_state, c.r_v, c.s_linear);
        } else {
            let _ = writeln!(s, "S_edge = {:.6e}, S_center = {:.6e}", self.s_edge, self.s_center);
        }
        let direction = match self.direction {
            ShrinkageDirection::Uniform => "uniform",
            ShrinkageDirection::EdgeDominant => "edge shrinks more",
            ShrinkageDirection::CenterDominant => "center shrinks more",
        };
        let _ = writeln!(s, "half-span {:.1} mm, |dS| = {:.6e} ({direction})", self.half_span_m * 1e3, self.differential);
        let _ = writeln!(s, "deflection: {:.3} mm", self.deflection_mm);
        s
    }

    fn csv(&self) -> String {
        format!(
            "half_span_m,s_edge,s_center,differential,deflection_mm\n{},{},{},{},{}\n",
            self.half_span_m, self.s_edge, self.s_center, self.differential, self.deflection_mm
        )
    }
}

// ---------------------------------------------------------------- hydraulics

#[derive(Debug, Serialize)]
struct HydraulicsRow {
    diameter_mm: f64,
    flow_cm3_s: f64,
    reynolds: f64,
    turbulence: TurbulenceClass,
}

#[derive(Debug, Serialize)]
struct HydraulicsOutput {
    kinematic_viscosity: f64,
    rows: Vec<HydraulicsRow>,
}

fn hydraulics_command(a: &HydraulicsArgs) -> Result<HydraulicsOutput, CliError> {
    if !(a.nu.is_finite() && a.nu > 0.0) {
        return Err(CliError::Domain(format!("--nu must be > 0 (got {})", a.nu)));
    }
    if let Some(d) = a.diameters_mm.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(CliError::Domain(format!("diameter must be > 0 (got {d})")));
    }
    let coolant = CoolantSpec { kinematic_viscosity: a.nu, ..CoolantSpec::default() };
    let flows: Vec<f64> = if a.flows_cm3s.is_empty() {
        let re = a.re.unwrap_or(4.0e4);
        if !(re.is_finite() && re > 0.0) {
            return Err(CliError::Domain(format!("--re must be > 0 (got {re})")));
        }
        a.diameters_mm
            .iter()
            .map(|d| 1e6 * layout::flow_rate_for_reynolds(re, d * 1e-3, &coolant))
            .collect()
    } else if a.flows_cm3s.len() == 1 {
        vec![a.flows_cm3s[0]; a.diameters_mm.len()]
    } else if a.flows_cm3s.len() == a.diameters_mm.len() {
        a.flows_cm3s.clone()
    } else {
        return Err(CliError::Domain("give one flow rate, or one per diameter".into()));
    };
    if let Some(q) = flows.iter().find(|q| !(q.is_finite() && **q >= 0.0)) {
        return Err(CliError::Domain(format!("flow rate must be >= 0 (got {q})")));
    }
    let rows = a
        .diameters_mm
        .iter()
        .zip(flows)
        .map(|(&d, q)| {
            let re = layout::reynolds(q * 1e-6, d * 1e-3, &coolant);
            HydraulicsRow { diameter_mm: d, flow_cm3_s: q, reynolds: re, turbulence: layout::turbulence_class(re) }
        })
        .collect();
    Ok(HydraulicsOutput { kinematic_viscosity: a.nu, rows })
}

impl Render for HydraulicsOutput {
    fn text(&self) -> String {
        let mut s = format!("kinematic viscosity {:e} m2/s\n", self.kinematic_viscosity);
        let _ = writeln!(s, "{:>8}  {:>12}  {:>10}  regime", "D [mm]", "Q [cm3/s]", "Re");
        for r in &self.rows {
            let regime = match r.turbulence {
                TurbulenceClass::TurbulentOk => "turbulent",
                TurbulenceClass::LaminarOrTransitional => "laminar/transitional",
            };
            let _ = writeln!(s, "{:>8.2}  {:>12.2}  {:>10.0}  {regime}", r.diameter_mm, r.flow_cm3_s, r.reynolds);
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("diameter_mm,flow_cm3_s,reynolds,turbulent\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.diameter_mm,
                r.flow_cm3_s,
                r.reynolds,
                r.turbulence == TurbulenceClass::TurbulentOk
            );
        }
        s
    }
}

// ---------------------------------------------------------------- check-layout

#[derive(Debug, Serialize)]
struct LayoutOutput {
    layout: CoolingLayout,
    report: RuleReport,
}

fn check_layout_command(a: &CheckLayoutArgs) -> Result<LayoutOutput, CliError> {
    let l = layout::load_layout(&a.layout)?;
    let rules = match &a.rules {
        Some(p) => layout::load_rules(p)?,
        None => layout::bundled_rules(l.kind),
    };
    let report = layout::check_layout_with(&l, &rules);
    Ok(LayoutOutput { layout: l, report })
}

impl Render for LayoutOutput {
    fn text(&self) -> String {
        let kind = serde_json::to_value(self.layout.kind).ok();
        let kind = kind.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
        let mut s = format!("layout: {kind}\n");
        if self.report.passed {
            s.push_str("PASS: all rules satisfied\n");
        } else {
            s.push_str("FAIL\n");
            for v in &self.report.violations {
                let _ = writeln!(
                    s,
                    "  [{}] measured {:.2} mm, limit {:.2} mm: {}",
                    v.rule_id,
                    v.measured * 1e3,
                    v.limit * 1e3,
                    v.message
                );
            }
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("rule_id,measured_m,limit_m,message\n");
        for v in &self.report.violations {
            let _ = writeln!(s, "{},{},{},\"{}\"", v.rule_id, v.measured, v.limit, v.message.replace('"', "\"\""));
        }
        s
    }
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Serialize)]
struct CompareOutput {
    reports: Vec<ComparisonReport>,
    mismatches: Vec<Mismatch>,
}

fn compare_command(a: &CompareArgs) -> Result<CompareOutput, CliError> {
    let fixture = match &a.input {
        Some(p) => report::load_comparison_fixture(p)?,
        None => ComparisonFixture::bundled(),
    };
    let mut reports = Vec::new();
    let mut mismatches = Vec::new();
    for g in &fixture.comparisons {
        let r = g.compare()?;
        mismatches.extend(g.mismatches(&r, case_study::COMPARISON_TOLERANCE));
        reports.push(r);
    }
    Ok(CompareOutput { reports, mismatches })
}

impl Render for CompareOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&r.to_text());
            s.push('\n');
        }
        for m in &self.mismatches {
            let _ = writeln!(
                s,
                "MISMATCH {} / {} / {}: recorded {:.3}, computed {:.3}",
                m.metric, m.variant_name, m.column, m.printed, m.computed
            );
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.reports.iter().enumerate() {
            let csv = r.to_csv();
            // one header for the whole table
            s.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rest)| rest) });
        }
        s
    }
}

// ---------------------------------------------------------------- case-study

#[derive(Debug, Serialize)]
struct CaseStudyOutput {
    scenario: String,
    passed: bool,
    checks: Vec<CheckResult>,
    /// Single-mode cooling time for the simulation temperature set, s.
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation_cooling_time_s: Option<f64>,
}

fn case_study_command(cli: &Cli, a: &CaseStudyArgs) -> Result<CaseStudyOutput, CliError> {
    let lib = library(cli)?;
    let s = load_scenario(a.scenario.as_ref(), &lib)?;
    let expected = match &a.expected {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Format(format!("cannot read {}: {e}", p.display())))?;
            ExpectedValues::from_json_str(&text)?
        }
        None => ExpectedValues::bundled(),
    };
    let checks = case_study::run(&s, &expected)?;
    let simulation_cooling_time_s = if a.scenario.is_none() {
        Scenario::bundled_simulation(&lib)
            .ok()
            .and_then(|sim| thermal::cooling_time(&sim.cooling_problem()).ok())
    } else {
        None
    };
    Ok(CaseStudyOutput {
        scenario: s.name.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        simulation_cooling_time_s,
    })
}

impl Render for CaseStudyOutput {
    fn text(&self) -> String {
        let mut s = format!("case study: {}\n", self.scenario);
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tol = if c.relative { format!("{} rel", c.tolerance) } else { format!("{}", c.tolerance) };
            let _ = writeln!(
                s,
                "{} {:<width$}  computed {:<14.6}  expected {:<14.6}  tol {tol}",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.computed,
                c.expected,
            );
            if let Some(n) = &c.note {
                let _ = writeln!(s, "     {n}");
            }
        }
        if let Some(t) = self.simulation_cooling_time_s {
            let _ = writeln!(s, "simulation temperature set (240/75/112 °C): cooling time {t:.1} s");
        }
        let _ = writeln!(s, "{}", if self.passed { "all checks passed" } else { "CHECKS FAILED" });
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("id,computed,expected,tolerance,relative,passed\n");
        for c in &self.checks {
            let _ = writeln!(s, "{},{},{},{},{},{}", c.id, c.computed, c.expected, c.tolerance, c.relative, c.passed);
        }
        s
    }
}
