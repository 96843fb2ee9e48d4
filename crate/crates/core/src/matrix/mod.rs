//! 2×2 quaternionic matrices.
//!
//! The determinant is the absolute Dieudonné determinant
//! `|ad - a c a⁻¹ b|`, and the inverse is computed from the closed form in
//! terms of the four "l-factors"
//!
//! ```text
//! l11 = da - d b d⁻¹ c     l12 = b d b⁻¹ a - b c
//! l21 = c a c⁻¹ d - c b     l22 = a d - a c a⁻¹ b
//! M⁻¹ = [[ l11⁻¹ d, -l12⁻¹ b ], [ -l21⁻¹ c, l22⁻¹ a ]]
//! ```
//!
//! which needs every entry to be invertible. Matrices with a zero entry are
//! inverted through the complex embedding instead (see [`ComplexEmbed4`]).

mod embedding;
mod spectral;

use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{Complex64, Quaternion};

pub use embedding::ComplexEmbed4;
pub use spectral::{diagonalizing_frame, eigen_representatives, EigenRepresentatives};
pub(crate) use spectral::eigenvector_points;

/// `[[a, b], [c, d]]` with quaternion entries.
///
/// Serialized as `[[qa, qb], [qc, qd]]` where each `q` is `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[Quaternion; 2]; 2]", into = "[[Quaternion; 2]; 2]")]
pub struct MatH2 {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl From<[[Quaternion; 2]; 2]> for MatH2 {
    fn from(m: [[Quaternion; 2]; 2]) -> Self {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<MatH2> for [[Quaternion; 2]; 2] {
    fn from(m: MatH2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl MatH2 {
    pub const IDENTITY: Self = Self::new(
        Quaternion::ONE,
        Quaternion::ZERO,
        Quaternion::ZERO,
        Quaternion::ONE,
    );

    #[inline]
    pub const fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        Self { a, b, c, d }
    }

    pub const fn diag(lambda: Quaternion, mu: Quaternion) -> Self {
        Self::new(lambda, Quaternion::ZERO, Quaternion::ZERO, mu)
    }

    /// `diag(λ, μ)` for complex `λ, μ` in the `1, i` plane.
    pub fn diag_complex(lambda: Complex64, mu: Complex64) -> Self {
        Self::diag(lambda.into(), mu.into())
    }

    /// `[[1, μ], [0, 1]]`.
    pub const fn translation(mu: Quaternion) -> Self {
        Self::new(Quaternion::ONE, mu, Quaternion::ZERO, Quaternion::ONE)
    }

    pub fn entries(&self) -> [Quaternion; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.entries().iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise quaternion-norm difference.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(p, q)| (*p - *q).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|q| q.is_finite())
    }

    /// Absolute Dieudonné determinant; `|b||c|` when `a = 0`.
    pub fn det(&self) -> f64 {
        if self.a.is_zero() {
            return self.b.norm() * self.c.norm();
        }
        // a⁻¹ exists here
        let a_inv = self.a.inverse().expect("nonzero entry");
        (self.a * self.d - self.a * self.c * a_inv * self.b).norm()
    }

    pub fn is_sl(&self, tol_det: f64) -> bool {
        (self.det() - 1.0).abs() <= tol_det
    }

    /// Rescales by the real factor `det^{-1/2}` so the determinant becomes 1.
    pub fn sl_normalized(&self, tol_det: f64) -> Result<Self> {
        let det = self.det();
        if !(det > tol_det) || !det.is_finite() {
            return Err(Error::Singular { det });
        }
        Ok(self.scale(det.sqrt().recip()))
    }

    /// Inverse via the l-factor formula; `None` when an entry vanishes.
    pub fn inverse_by_formula(&self) -> Option<Self> {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let a_inv = a.inverse().ok()?;
        let b_inv = b.inverse().ok()?;
        let c_inv = c.inverse().ok()?;
        let d_inv = d.inverse().ok()?;

        let l11 = d * a - d * b * d_inv * c;
        let l12 = b * d * b_inv * a - b * c;
        let l21 = c * a * c_inv * d - c * b;
        let l22 = a * d - a * c * a_inv * b;

        let d_t = l11.inverse().ok()? * d;
        let b_t = l12.inverse().ok()? * b;
        let c_t = l21.inverse().ok()? * c;
        let a_t = l22.inverse().ok()? * a;
        Some(Self::new(d_t, -b_t, -c_t, a_t))
    }

    /// Inverse through the complex embedding.
    pub fn inverse_by_embedding(&self) -> Option<Self> {
        self.embed().inverse().map(|e| e.to_mat_h2())
    }

    /// Two-sided inverse. Uses the l-factor formula when all entries are
    /// nonzero, otherwise the embedding.
    pub fn inverse(&self, tol_det: f64) -> Result<Self> {
        let det = self.det();
        if !(det > tol_det) {
            return Err(Error::Singular { det });
        }
        self.inverse_by_formula()
            .or_else(|| self.inverse_by_embedding())
            .ok_or(Error::Singular { det })
    }

    pub fn embed(&self) -> ComplexEmbed4 {
        ComplexEmbed4::from_mat_h2(self)
    }

    /// `P M P⁻¹`.
    pub fn conjugate_by(&self, p: &Self, tol_det: f64) -> Result<Self> {
        Ok(*p * *self * p.inverse(tol_det)?)
    }

    /// Within `tol` of `I` or `-I` entrywise.
    pub fn is_plus_minus_identity(&self, tol: f64) -> bool {
        self.max_entry_distance(&Self::IDENTITY) <= tol
            || self.max_entry_distance(&-Self::IDENTITY) <= tol
    }
}

impl Mul for MatH2 {
    type Output = Self;
    fn mul(self, n: Self) -> Self {
        Self::new(
            self.a * n.a + self.b * n.c,
            self.a * n.b + self.b * n.d,
            self.c * n.a + self.d * n.c,
            self.c * n.b + self.d * n.d,
        )
    }
}

impl Neg for MatH2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}
