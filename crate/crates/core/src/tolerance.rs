//! Numerical tolerances shared by every module.
//!
//! All comparisons in the crate are made against one of these bands. They
//! travel together as a [`Tolerances`] value so that the CLI and the
//! experiment configuration can override any of them.

use serde::{Deserialize, Serialize};

/// Similarity of quaternions: absolute band on both real part and norm.
pub const TOL_SIM: f64 = 1e-9;
/// SL(2,H) membership: `|det - 1| <= TOL_DET`; also the singularity floor.
pub const TOL_DET: f64 = 1e-9;
/// Relative singular-value floor used by rank tests on the complex embedding.
pub const TOL_RANK: f64 = 1e-8;
/// Chordal distance on the boundary sphere below which points coincide.
pub const TOL_FIX: f64 = 1e-8;
/// Width of the band around classification boundaries.
pub const TOL_CLS: f64 = 1e-6;
/// Band around certificate thresholds.
pub const TOL_CERT: f64 = 1e-10;
/// Scaled bound for the conjugated off-diagonal vanishing identity.
pub const TOL_IDENTITY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub sim: f64,
    pub det: f64,
    pub rank: f64,
    pub fix: f64,
    pub cls: f64,
    pub cert: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sim: TOL_SIM,
            det: TOL_DET,
            rank: TOL_RANK,
            fix: TOL_FIX,
            cls: TOL_CLS,
            cert: TOL_CERT,
            identity: TOL_IDENTITY,
        }
    }
}
