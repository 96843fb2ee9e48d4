pub mod error;
pub mod harness;
pub mod jorgensen;
pub mod matrix;
pub mod mobius;
pub mod quaternion;
pub mod tolerance;

pub use error::{Error, Result};
pub use matrix::{ComplexEmbed4, EigenRepresentatives, MatH2};
pub use quaternion::{Complex64, Quaternion};
pub use tolerance::Tolerances;
pub use mobius::{apply, classify, conjugate, fixed_points, BoundaryPoint, Classification, Kind};
pub use jorgensen::{Certificate, TestName, Verdict};
