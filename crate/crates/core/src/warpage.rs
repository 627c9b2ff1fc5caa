//! Out-of-plane deflection from differential linear shrinkage between the
//! edge and the centre of a part.
//!
//! A half-span `W` that shrinks by `ΔS` more at one end than the other stays
//! the same arc length but its chord shortens to `W·(1 − ΔS)`; the rise is
//!
//! ```text
//! δ = sqrt(W² − (W·(1 − ΔS))²) = W·sqrt(ΔS·(2 − ΔS))
//! ```
//!
//! The factored form is used: at ΔS ≈ 3e-4 the naive difference of squares
//! loses about eight significant digits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::ThermoplasticMaterial;
use crate::pvt::{self, PvtError, PvtState, ShrinkageResult};

#[derive(Debug, Error, PartialEq)]
pub enum WarpageError {
    #[error("invalid warpage case: {0}")]
    InvalidCase(String),
    #[error("shrinkage differential |ΔS| = {0} exceeds 1")]
    DifferentialTooLarge(f64),
    #[error(transparent)]
    Pvt(#[from] PvtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpageCase {
    /// Distance from the part centre to its outer contour, m.
    pub half_span: f64,
    pub s_edge: f64,
    pub s_center: f64,
}

impl WarpageCase {
    pub fn validate(&self) -> Result<(), WarpageError> {
        if !(self.half_span.is_finite() && self.half_span > 0.0) {
            return Err(WarpageError::InvalidCase(format!(
                "half_span must be > 0 (got {})",
                self.half_span
            )));
        }
        for (name, s) in [("s_edge", self.s_edge), ("s_center", self.s_center)] {
            if !(0.0..1.0).contains(&s) {
                return Err(WarpageError::InvalidCase(format!(
                    "{name} must lie in [0, 1) (got {s})"
                )));
            }
        }
        Ok(())
    }
}

/// Which region shrinks more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkageDirection {
    Uniform,
    EdgeDominant,
    CenterDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deflection {
    /// m
    pub value: f64,
    /// |s_edge − s_center|
    pub differential: f64,
    pub direction: ShrinkageDirection,
}

/// Rise of an arc of half-span `half_span` whose chord is shortened by the
/// fraction `differential`. Accepts |differential| ≤ 1.
pub fn deflection_from_differential(half_span: f64, differential: f64) -> Result<f64, WarpageError> {
    if !(half_span.is_finite() && half_span > 0.0) {
        return Err(WarpageError::InvalidCase(format!("half_span must be > 0 (got {half_span})")));
    }
    let ds = differential.abs();
    if !(ds <= 1.0) {
        return Err(WarpageError::DifferentialTooLarge(ds));
    }
    Ok(half_span * (ds * (2.0 - ds)).sqrt())
}

pub fn deflection(c: &WarpageCase) -> Result<Deflection, WarpageError> {
    c.validate()?;
    let delta = c.s_edge - c.s_center;
    let direction = if delta > 0.0 {
        ShrinkageDirection::EdgeDominant
    } else if delta < 0.0 {
        ShrinkageDirection::CenterDominant
    } else {
        ShrinkageDirection::Uniform
    };
    Ok(Deflection {
        value: deflection_from_differential(c.half_span, delta)?,
        differential: delta.abs(),
        direction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDeflection {
    pub edge: ShrinkageResult,
    pub center: ShrinkageResult,
    pub deflection: Deflection,
}

/// Deflection from the packing/cooling states at the edge and centre, via
/// Tait specific volumes and isotropic linear shrinkage.
pub fn deflection_from_states(
    mat: &ThermoplasticMaterial,
    half_span: f64,
    edge_state: PvtState,
    center_state: PvtState,
) -> Result<StateDeflection, WarpageError> {
    let edge = pvt::shrinkage(mat, edge_state)?;
    let center = pvt::shrinkage(mat, center_state)?;
    let case = WarpageCase { half_span, s_edge: edge.s_linear, s_center: center.s_linear };
    Ok(StateDeflection { edge, center, deflection: deflection(&case)? })
}
