//! The embedding `M(2, ℍ) → M(4, ℂ)`.
//!
//! A quaternion `q = z + w j` (with `z, w` in the `1, i` plane) maps to the
//! block `[[z, w], [-w̄, z̄]]`. The map is an injective ring homomorphism, the
//! complex determinant of the image is the square of the Dieudonné
//! determinant, and the image spectrum is closed under conjugation.

use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4};

use super::MatH2;
use crate::quaternion::{Complex64, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEmbed4(pub Matrix4<Complex64>);

pub(crate) fn quaternion_block(q: Quaternion) -> Matrix2<Complex64> {
    let (z, w) = q.symplectic_parts();
    Matrix2::new(z, w, -w.conj(), z.conj())
}

impl ComplexEmbed4 {
    pub fn from_mat_h2(m: &MatH2) -> Self {
        let mut out = Matrix4::zeros();
        for (idx, q) in m.entries().into_iter().enumerate() {
            let (r, c) = (2 * (idx / 2), 2 * (idx % 2));
            out.fixed_view_mut::<2, 2>(r, c)
                .copy_from(&quaternion_block(q));
        }
        Self(out)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Reads each 2×2 block back as a quaternion. Averages the two rows of
    /// each block, which is exact on the image of the embedding.
    pub fn to_mat_h2(&self) -> MatH2 {
        let q = |r: usize, c: usize| {
            let m = &self.0;
            let z = (m[(r, c)] + m[(r + 1, c + 1)].conj()) * 0.5;
            let w = (m[(r, c + 1)] - m[(r + 1, c)].conj()) * 0.5;
            Quaternion::from_symplectic(z, w)
        };
        MatH2::new(q(0, 0), q(0, 2), q(2, 0), q(2, 2))
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.try_inverse().map(Self)
    }

    /// The four complex eigenvalues (complex Schur form).
    pub fn eigenvalues(&self) -> Option<[Complex64; 4]> {
        let ev = self.0.schur().eigenvalues()?;
        Some([ev[0], ev[1], ev[2], ev[3]])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for ComplexEmbed4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}
