//! Free-fermionic C₂⁽¹⁾ loop model.
//!
//! Exact Kashaev recurrence on stepped surfaces, taut loop configurations,
//! the loop/double-dimer correspondence with Kasteleyn free energies, the
//! vertex parametrization solver and the limit-shape observables.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod ffdimers;
pub mod fixtures;
pub mod groves;
pub mod kashaev;
pub mod laurent;
pub mod limitshape;
pub mod loopmodel;
pub mod quadext;
pub mod quadgraph;
pub mod stepped;
pub mod suite;
pub mod taut;

pub use error::{Error, Result};

/// Twelve significant digits, trailing zeros dropped.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if r == 0.0 || (1e-6..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
