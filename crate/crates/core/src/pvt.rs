//! Tait equation of state for polymer specific volume, and the volumetric and
//! linear shrinkage derived from it.
//!
//! ```text
//! v0(T)   = b1 + b2·(T − b5)
//! β(T)    = b3·exp(−b4·(T − b5))
//! v(T, P) = v0(T)·(1 − C·ln(1 + P/β(T))),   C = 0.0894
//! ```
//!
//! One coefficient set is applied over the whole (T, P) range. Evaluations
//! outside [20 °C, T_melt] still return a value but are flagged.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::celsius_to_kelvin;
use crate::materials::ThermoplasticMaterial;

/// Universal Tait constant.
pub const TAIT_C: f64 = 0.0894;

/// Ambient reference state for volumetric shrinkage: 20 °C, 0 Pa.
pub const REFERENCE_STATE: PvtState = PvtState { temperature: 293.15, pressure: 0.0 };

#[derive(Debug, Error, PartialEq)]
pub enum PvtError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("reference volume {volume:e} m³/kg is not positive at T = {temperature} K")]
    NonPositiveVolume { temperature: f64, volume: f64 },
    #[error("specific volume {volume:e} m³/kg is not positive at T = {temperature} K, P = {pressure} Pa")]
    NonPositiveSpecificVolume { temperature: f64, pressure: f64, volume: f64 },
}

/// Temperature in K, pressure in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvtState {
    pub temperature: f64,
    pub pressure: f64,
}

impl PvtState {
    pub fn new(temperature: f64, pressure: f64) -> Result<Self, PvtError> {
        let s = PvtState { temperature, pressure };
        s.validate()?;
        Ok(s)
    }

    pub fn from_celsius_mpa(temperature_c: f64, pressure_mpa: f64) -> Result<Self, PvtError> {
        Self::new(celsius_to_kelvin(temperature_c), pressure_mpa * 1e6)
    }

    pub fn validate(&self) -> Result<(), PvtError> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(PvtError::InvalidState(format!(
                "temperature must be > 0 K (got {})",
                self.temperature
            )));
        }
        if !(self.pressure.is_finite() && self.pressure >= 0.0) {
            return Err(PvtError::InvalidState(format!(
                "pressure must be >= 0 Pa (got {})",
                self.pressure
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    InRange,
    /// Temperature outside [20 °C, T_melt]; the value is an extrapolation.
    OutsideRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecificVolume {
    /// m³/kg
    pub value: f64,
    pub validity: Validity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageResult {
    /// Specific volume at 20 °C and 0 Pa, m³/kg.
    pub v_ref: f64,
    /// Specific volume at the packing/cooling state, m³/kg.
    pub v_state: f64,
    /// Volumetric ratio v_ref / v_state.
    pub r_v: f64,
    /// Isotropic linear shrinkage 1 − r_v^(1/3).
    pub s_linear: f64,
    pub validity: Validity,
}

pub fn validity(mat: &ThermoplasticMaterial, temperature: f64) -> Validity {
    let lo = REFERENCE_STATE.temperature;
    let hi = celsius_to_kelvin(mat.t_melt);
    if (lo..=hi).contains(&temperature) {
        Validity::InRange
    } else {
        Validity::OutsideRange
    }
}

/// Zero-pressure specific volume at temperature `t` (K).
pub fn reference_volume(mat: &ThermoplasticMaterial, t: f64) -> Result<f64, PvtError> {
    let v = mat.b1 + mat.b2 * (t - mat.b5);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(PvtError::NonPositiveVolume { temperature: t, volume: v })
    }
}

/// Tait compressibility scale β at temperature `t` (K), in Pa.
pub fn compressibility(mat: &ThermoplasticMaterial, t: f64) -> f64 {
    mat.b3 * (-mat.b4 * (t - mat.b5)).exp()
}

pub fn specific_volume(
    mat: &ThermoplasticMaterial,
    state: PvtState,
) -> Result<SpecificVolume, PvtError> {
    state.validate()?;
    let v0 = reference_volume(mat, state.temperature)?;
    let beta = compressibility(mat, state.temperature);
    let value = v0 * (1.0 - TAIT_C * (state.pressure / beta).ln_1p());
    if value <= 0.0 {
        return Err(PvtError::NonPositiveSpecificVolume {
            temperature: state.temperature,
            pressure: state.pressure,
            volume: value,
        });
    }
    Ok(SpecificVolume { value, validity: validity(mat, state.temperature) })
}

/// Volumetric and linear shrinkage from `pack_state` down to 20 °C, 0 Pa.
pub fn shrinkage(
    mat: &ThermoplasticMaterial,
    pack_state: PvtState,
) -> Result<ShrinkageResult, PvtError> {
    let v_ref = specific_volume(mat, REFERENCE_STATE)?.value;
    let state = specific_volume(mat, pack_state)?;
    let r_v = v_ref / state.value;
    Ok(ShrinkageResult {
        v_ref,
        v_state: state.value,
        r_v,
        s_linear: 1.0 - r_v.cbrt(),
        validity: state.validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialLibrary;
    use proptest::prelude::*;

    fn pmma() -> ThermoplasticMaterial {
        MaterialLibrary::bundled().thermoplastic("plexiglas_8n").unwrap().clone()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_volume_values() {
        let m = pmma();
        assert!((reference_volume(&m, 293.15).unwrap() - 8.11335e-4).abs() < 1e-9);
        assert_eq!(reference_volume(&m, m.b5).unwrap(), m.b1);
        assert!((reference_volume(&m, 405.15).unwrap() - 8.7494e-4).abs() < 1e-9);
    }

    #[test]
    fn reference_volume_rejects_non_positive() {
        let mut steep = pmma();
        steep.b2 = -1e-5;
        let t = steep.b5 + 100.0;
        assert!(matches!(
            reference_volume(&steep, t),
            Err(PvtError::NonPositiveVolume { .. })
        ));
    }

    #[test]
    fn compressibility_values() {
        let m = pmma();
        assert_eq!(compressibility(&m, m.b5), m.b3);
        assert!(rel(compressibility(&m, 293.15), 3.1201e8) < 1e-4);
        assert!(rel(compressibility(&m, 405.15), 1.85699e8) < 1e-5);
    }

    #[test]
    fn specific_volume_values() {
        let m = pmma();
        let v = specific_volume(&m, PvtState::new(293.15, 0.0).unwrap()).unwrap();
        assert!((v.value - 8.11335e-4).abs() < 1e-9);
        assert_eq!(v.validity, Validity::InRange);
        let v = specific_volume(&m, PvtState::new(405.15, 112e6).unwrap()).unwrap();
        assert!((v.value - 8.3802e-4).abs() < 1e-8);
    }

    #[test]
    fn out_of_range_temperature_is_flagged_not_rejected() {
        let m = pmma();
        let v = specific_volume(&m, PvtState::new(250.0, 0.0).unwrap()).unwrap();
        assert_eq!(v.validity, Validity::OutsideRange);
        let v = specific_volume(&m, PvtState::new(celsius_to_kelvin(300.0), 0.0).unwrap()).unwrap();
        assert_eq!(v.validity, Validity::OutsideRange);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(PvtState::new(0.0, 0.0).is_err());
        assert!(PvtState::new(300.0, -1.0).is_err());
        assert!(PvtState::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn shrinkage_at_reference_is_zero() {
        let s = shrinkage(&pmma(), REFERENCE_STATE).unwrap();
        assert_eq!(s.r_v, 1.0);
        assert_eq!(s.s_linear, 0.0);
    }

    #[test]
    fn shrinkage_at_freeze_and_packing_pressure() {
        let s = shrinkage(&pmma(), PvtState::new(405.15, 112e6).unwrap()).unwrap();
        assert!((s.r_v - 0.96815).abs() < 1e-5);
        // independent high-precision evaluation: 0.0107304181
        assert!((s.s_linear - 0.010_730_418).abs() < 1e-8);
    }

    #[test]
    fn hotter_state_shrinks() {
        let s = shrinkage(&pmma(), PvtState::new(450.0, 0.0).unwrap()).unwrap();
        assert!(s.r_v > 0.0 && s.r_v < 1.0);
        assert!(s.s_linear > 0.0);
    }

    #[test]
    fn monotone_on_grids() {
        let m = pmma();
        let temps: Vec<f64> = (0..120).map(|i| 293.15 + i as f64 * 1.5).collect();
        for p in [0.0, 50e6, 112e6, 200e6] {
            let vs: Vec<f64> = temps
                .iter()
                .map(|&t| specific_volume(&m, PvtState { temperature: t, pressure: p }).unwrap().value)
                .collect();
            assert!(vs.windows(2).all(|w| w[1] > w[0]), "not increasing in T at P = {p}");
        }
        let pressures: Vec<f64> = (0..120).map(|i| i as f64 * 2e6).collect();
        for t in [293.15, 350.0, 405.15, 508.15] {
            let vs: Vec<f64> = pressures
                .iter()
                .map(|&p| specific_volume(&m, PvtState { temperature: t, pressure: p }).unwrap().value)
                .collect();
            assert!(vs.windows(2).all(|w| w[1] < w[0]), "not decreasing in P at T = {t}");
        }
    }

    proptest! {
        #[test]
        fn zero_pressure_is_reference_volume(t in 250.0f64..600.0) {
            let m = pmma();
            let v = specific_volume(&m, PvtState { temperature: t, pressure: 0.0 }).unwrap().value;
            prop_assert_eq!(v, reference_volume(&m, t).unwrap());
        }

        #[test]
        fn isotropic_identity(t in 293.15f64..520.0, p in 0.0f64..200e6) {
            let s = shrinkage(&pmma(), PvtState { temperature: t, pressure: p }).unwrap();
            let back = (1.0 - s.s_linear).powi(3) * s.v_state;
            prop_assert!(((back - s.v_ref) / s.v_ref).abs() < 1e-12);
        }

        #[test]
        fn compressibility_positive(t in -1.0e3f64..1.0e3) {
            prop_assert!(compressibility(&pmma(), t) > 0.0);
        }
    }
}
