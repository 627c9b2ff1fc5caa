//! Transient conduction through the thickness of a plastic slab held between
//! two mold walls at constant temperature.
//!
//! The midplane temperature follows the classical slab series
//!
//! ```text
//! T(t) = Tw + (Tm − Tw)·(4/π)·Σ_{m≥0} (−1)^m/(2m+1) · exp(−(2m+1)²·π²·α·t/L²)
//! ```
//!
//! and keeping only the first mode and solving for the time at which the
//! midplane reaches the ejection temperature gives
//!
//! ```text
//! t_cool = L²/(π²·α) · ln[(4/π)·(Tm − Tw)/(Te − Tw)]
//! ```
//!
//! Convection and radiation to the surroundings are neglected. An explicit
//! finite-difference solver is provided as an independent cross-check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::ThermoplasticMaterial;

#[derive(Debug, Error, PartialEq)]
pub enum ThermalError {
    #[error("invalid cooling problem: {0}")]
    InvalidProblem(String),
    #[error("ejection temperature {t_eject} °C must exceed wall temperature {t_wall} °C")]
    EjectBelowWall { t_eject: f64, t_wall: f64 },
    #[error("part is already ejectable: (4/π)·(Tm − Tw)/(Te − Tw) = {ratio} < 1")]
    AlreadyEjectable { ratio: f64 },
    #[error("invalid solver option: {0}")]
    InvalidOption(String),
    #[error("midplane did not reach {t_eject} °C within {limit_s} s")]
    NotConverged { t_eject: f64, limit_s: f64 },
}

/// Slab cooling problem. Temperatures in °C, thickness in m, diffusivity in m²/s.
///
/// `t_wall` is the cavity surface temperature. Supply either the mold
/// temperature or the coolant temperature, whichever the caller considers
/// representative of the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingProblem {
    pub thickness: f64,
    pub t_melt: f64,
    pub t_wall: f64,
    pub t_eject: f64,
    pub alpha_p: f64,
}

impl CoolingProblem {
    /// Problem built from the material's own process temperatures, with the
    /// wall held at the mold temperature.
    pub fn from_material(mat: &ThermoplasticMaterial, thickness: f64) -> Self {
        CoolingProblem {
            thickness,
            t_melt: mat.t_melt,
            t_wall: mat.t_mold,
            t_eject: mat.t_eject,
            alpha_p: mat.alpha_p,
        }
    }

    fn check_slab(&self) -> Result<(), ThermalError> {
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(ThermalError::InvalidProblem(format!(
                "thickness must be > 0 (got {})",
                self.thickness
            )));
        }
        if !(self.alpha_p.is_finite() && self.alpha_p > 0.0) {
            return Err(ThermalError::InvalidProblem(format!(
                "alpha_p must be > 0 (got {})",
                self.alpha_p
            )));
        }
        if !(self.t_melt.is_finite() && self.t_wall.is_finite() && self.t_eject.is_finite()) {
            return Err(ThermalError::InvalidProblem("temperatures must be finite".into()));
        }
        Ok(())
    }

    /// Full invariant check: positive slab data and t_wall < t_eject < t_melt.
    pub fn validate(&self) -> Result<(), ThermalError> {
        self.check_slab()?;
        if self.t_eject <= self.t_wall {
            return Err(ThermalError::EjectBelowWall { t_eject: self.t_eject, t_wall: self.t_wall });
        }
        if self.t_eject >= self.t_melt {
            return Err(ThermalError::InvalidProblem(format!(
                "t_eject must be below t_melt (got {} >= {})",
                self.t_eject, self.t_melt
            )));
        }
        Ok(())
    }

    /// Characteristic time L²/(π²·α) of the slowest mode, s.
    pub fn time_constant(&self) -> f64 {
        self.thickness * self.thickness / (PI * PI * self.alpha_p)
    }

    /// Fourier number α·t/L².
    pub fn fourier(&self, t: f64) -> f64 {
        self.alpha_p * t / (self.thickness * self.thickness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    pub max_terms: usize,
    pub rel_tolerance: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { max_terms: 200, rel_tolerance: 1e-12 }
    }
}

impl SeriesOptions {
    fn validate(&self) -> Result<(), ThermalError> {
        if self.max_terms < 1 {
            return Err(ThermalError::InvalidOption("max_terms must be >= 1".into()));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(ThermalError::InvalidOption(format!(
                "rel_tolerance must be > 0 (got {})",
                self.rel_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidplaneTemperature {
    /// °C
    pub celsius: f64,
    pub terms_used: usize,
    /// False when the sum was cut off at `max_terms` before the tolerance was met.
    pub converged: bool,
}

/// Normalised midplane excess temperature (T − Tw)/(Tm − Tw) at Fourier number `fo`.
fn series_fraction(fo: f64, opts: &SeriesOptions) -> (f64, usize, bool) {
    let term = |m: usize| {
        let k = (2 * m + 1) as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign / k * (-k * k * PI * PI * fo).exp()
    };
    let mut sum = 0.0;
    for m in 0..opts.max_terms {
        sum += term(m);
        if term(m + 1).abs() < opts.rel_tolerance * sum.abs() {
            return (4.0 / PI * sum, m + 1, true);
        }
    }
    (4.0 / PI * sum, opts.max_terms, false)
}

/// Midplane temperature at time `t` (s) after the start of cooling.
pub fn midplane_temperature(
    p: &CoolingProblem,
    t: f64,
    opts: &SeriesOptions,
) -> Result<MidplaneTemperature, ThermalError> {
    p.check_slab()?;
    opts.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(ThermalError::InvalidProblem(format!("time must be >= 0 (got {t})")));
    }
    let (fraction, terms_used, converged) = series_fraction(p.fourier(t), opts);
    Ok(MidplaneTemperature {
        celsius: p.t_wall + (p.t_melt - p.t_wall) * fraction,
        terms_used,
        converged,
    })
}

/// Samples the midplane curve at `samples` evenly spaced times over `[0, t_end]`.
pub fn midplane_curve(
    p: &CoolingProblem,
    t_end: f64,
    samples: usize,
    opts: &SeriesOptions,
) -> Result<Vec<(f64, f64)>, ThermalError> {
    if samples < 2 {
        return Err(ThermalError::InvalidOption("curve needs at least 2 samples".into()));
    }
    (0..samples)
        .map(|i| {
            let t = t_end * i as f64 / (samples - 1) as f64;
            midplane_temperature(p, t, opts).map(|m| (t, m.celsius))
        })
        .collect()
}

/// Tolerance on the log argument below 1, so that a ratio of exactly 1 in
/// exact arithmetic maps to zero time rather than an error.
const RATIO_SLACK: f64 = 1e-12;

/// Single-mode cooling time, s.
pub fn cooling_time(p: &CoolingProblem) -> Result<f64, ThermalError> {
    p.check_slab()?;
    if p.t_eject <= p.t_wall {
        return Err(ThermalError::EjectBelowWall { t_eject: p.t_eject, t_wall: p.t_wall });
    }
    let ratio = 4.0 / PI * (p.t_melt - p.t_wall) / (p.t_eject - p.t_wall);
    if ratio < 1.0 - RATIO_SLACK {
        return Err(ThermalError::AlreadyEjectable { ratio });
    }
    Ok((p.time_constant() * ratio.ln()).max(0.0))
}

pub const FD_DEFAULT_NODES: usize = 201;
pub const FD_DEFAULT_SAFETY: f64 = 0.4;

/// Explicit finite-difference solution of ∂T/∂t = α·∂²T/∂z² on [0, L] with
/// both walls at `t_wall` and a uniform initial `t_melt`. Returns the first
/// time the midplane node falls to `t_eject`, interpolated linearly between
/// steps.
///
/// `nodes` must be odd (midplane on a node) and at least 11; `safety` is the
/// mesh ratio α·Δt/Δz², stable up to 0.5.
pub fn fd_cooling_oracle(p: &CoolingProblem, nodes: usize, safety: f64) -> Result<f64, ThermalError> {
    p.validate()?;
    if nodes < 11 || nodes % 2 == 0 {
        return Err(ThermalError::InvalidOption(format!(
            "nodes must be odd and >= 11 (got {nodes})"
        )));
    }
    if !(safety > 0.0 && safety <= 0.5) {
        return Err(ThermalError::InvalidOption(format!(
            "safety must lie in (0, 0.5] (got {safety})"
        )));
    }

    let dz = p.thickness / (nodes - 1) as f64;
    let dt = safety * dz * dz / p.alpha_p;
    let limit = 10.0 * cooling_time(p)?;
    let mid = nodes / 2;

    let mut u = vec![p.t_melt; nodes];
    u[0] = p.t_wall;
    u[nodes - 1] = p.t_wall;
    let mut next = u.clone();

    let mut time = 0.0;
    while time <= limit {
        for i in 1..nodes - 1 {
            next[i] = u[i] + safety * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        }
        let before = u[mid];
        let after = next[mid];
        std::mem::swap(&mut u, &mut next);
        if after <= p.t_eject {
            let frac = (before - p.t_eject) / (before - after);
            return Ok(time + frac * dt);
        }
        time += dt;
    }
    Err(ThermalError::NotConverged { t_eject: p.t_eject, limit_s: limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(thickness: f64) -> CoolingProblem {
        CoolingProblem { thickness, t_melt: 235.0, t_wall: 80.0, t_eject: 94.0, alpha_p: 8.913e-8 }
    }

    #[test]
    fn cooling_time_case_study() {
        // reference values from a 40-digit evaluation
        assert!((cooling_time(&case(0.0096)).unwrap() - 277.202_751).abs() < 1e-5);
        assert!((cooling_time(&case(0.0095)).unwrap() - 271.457_772).abs() < 1e-5);
        assert!(((cooling_time(&case(0.0095)).unwrap() - 271.5) / 271.5).abs() < 1e-3);
    }

    #[test]
    fn cooling_time_zero_at_unit_ratio() {
        let p = CoolingProblem {
            thickness: 0.004,
            t_melt: 100.0,
            t_wall: 0.0,
            t_eject: 400.0 / PI,
            alpha_p: 1e-7,
        };
        assert!(cooling_time(&p).unwrap().abs() < 1e-9);
    }

    #[test]
    fn cooling_time_errors() {
        let mut p = case(0.0096);
        p.t_eject = 80.0;
        assert!(matches!(cooling_time(&p), Err(ThermalError::EjectBelowWall { .. })));
        p.t_eject = 300.0;
        assert!(matches!(cooling_time(&p), Err(ThermalError::AlreadyEjectable { .. })));
        let p = case(0.0);
        assert!(matches!(cooling_time(&p), Err(ThermalError::InvalidProblem(_))));
    }

    #[test]
    fn cooling_time_quadratic_in_thickness() {
        let t1 = cooling_time(&case(0.004)).unwrap();
        let t2 = cooling_time(&case(0.008)).unwrap();
        assert!((t2 - 4.0 * t1).abs() <= 1e-12 * t2);
    }

    #[test]
    fn midplane_initial_condition() {
        let p = case(0.0096);
        let opts = SeriesOptions { max_terms: 1_000_000, rel_tolerance: 1e-4 };
        let m = midplane_temperature(&p, 0.0, &opts).unwrap();
        assert!(m.converged);
        assert!((m.celsius - p.t_melt).abs() <= 1e-4 * (p.t_melt - p.t_wall));
    }

    #[test]
    fn midplane_truncation_reports_terms() {
        let p = case(0.0096);
        let m = midplane_temperature(&p, 0.0, &SeriesOptions::default()).unwrap();
        assert!(!m.converged);
        assert_eq!(m.terms_used, 200);
    }

    #[test]
    fn midplane_steady_state() {
        let p = case(0.0096);
        let t = 2.5 * p.thickness * p.thickness / p.alpha_p;
        let m = midplane_temperature(&p, t, &SeriesOptions::default()).unwrap();
        assert!((m.celsius - p.t_wall).abs() < 1e-6);
    }

    #[test]
    fn midplane_at_cooling_time_hits_eject() {
        let p = case(0.0096);
        let m = midplane_temperature(&p, 277.2, &SeriesOptions::default()).unwrap();
        assert!((m.celsius - 94.0).abs() < 0.01, "{}", m.celsius);
        let exact = midplane_temperature(&p, cooling_time(&p).unwrap(), &SeriesOptions::default()).unwrap();
        assert!((exact.celsius - 94.0).abs() < 1e-6);
    }

    #[test]
    fn midplane_rejects_negative_time() {
        let p = case(0.0096);
        assert!(midplane_temperature(&p, -1.0, &SeriesOptions::default()).is_err());
        let bad = SeriesOptions { max_terms: 0, rel_tolerance: 1e-9 };
        assert!(midplane_temperature(&p, 1.0, &bad).is_err());
    }

    #[test]
    fn partial_sums_bracket() {
        let p = case(0.0096);
        let converged = midplane_temperature(&p, 5.0, &SeriesOptions::default()).unwrap().celsius;
        for terms in 1..12 {
            let opts = SeriesOptions { max_terms: terms, rel_tolerance: f64::MIN_POSITIVE };
            let partial = midplane_temperature(&p, 5.0, &opts).unwrap().celsius;
            if terms % 2 == 1 {
                assert!(partial >= converged, "odd partial {terms} below limit");
            } else {
                assert!(partial <= converged, "even partial {terms} above limit");
            }
        }
    }

    #[test]
    fn fd_oracle_case_study() {
        let p = case(0.0096);
        let fd = fd_cooling_oracle(&p, FD_DEFAULT_NODES, FD_DEFAULT_SAFETY).unwrap();
        let closed = cooling_time(&p).unwrap();
        assert!(((fd - closed) / closed).abs() < 0.02, "fd {fd} vs {closed}");
    }

    #[test]
    fn fd_oracle_small_drop() {
        let p = CoolingProblem { thickness: 0.0096, t_melt: 95.0, t_wall: 80.0, t_eject: 94.0, alpha_p: 8.913e-8 };
        let fd = fd_cooling_oracle(&p, 101, 0.4).unwrap();
        assert!(fd > 0.0 && fd.is_finite());
    }

    #[test]
    fn fd_oracle_option_checks() {
        let p = case(0.0096);
        assert!(matches!(fd_cooling_oracle(&p, 100, 0.4), Err(ThermalError::InvalidOption(_))));
        assert!(matches!(fd_cooling_oracle(&p, 9, 0.4), Err(ThermalError::InvalidOption(_))));
        assert!(matches!(fd_cooling_oracle(&p, 101, 0.6), Err(ThermalError::InvalidOption(_))));
        assert!(matches!(fd_cooling_oracle(&p, 101, 0.0), Err(ThermalError::InvalidOption(_))));
    }
}
