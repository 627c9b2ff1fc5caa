//! Analytical cooling-phase models for injection-molded parts.
//!
//! * [`materials`]: polymer and mold-steel property records, JSON library loader.
//! * [`pvt`]: Tait specific volume and volumetric/linear shrinkage.
//! * [`thermal`]: slab midplane temperature series, single-mode cooling time,
//!   and an explicit finite-difference cross-check.
//! * [`warpage`]: deflection from edge/centre shrinkage differential.
//! * [`layout`]: cooling-layout design rules and coolant Reynolds sizing.
//! * [`report`]: baseline/variant comparison and acceptance limits.
//! * [`scenario`] and [`cli`]: scenario files and the `moldcool` command line.

pub mod bundled;
pub mod case_study;
pub mod cli;
pub mod layout;
pub mod materials;
pub mod pvt;
pub mod report;
pub mod scenario;
pub mod thermal;
pub mod warpage;

pub const KELVIN_OFFSET: f64 = 273.15;

pub fn celsius_to_kelvin(c: f64) -> f64 {
    c + KELVIN_OFFSET
}

pub fn kelvin_to_celsius(k: f64) -> f64 {
    k - KELVIN_OFFSET
}
