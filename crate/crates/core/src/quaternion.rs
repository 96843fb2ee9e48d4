//! Real quaternions `w + x i + y j + z k` in binary64.
//!
//! Multiplication follows `i² = j² = k² = ijk = -1`. Two quaternions are
//! *similar* (`b = c⁻¹ a c` for some nonzero `c`) exactly when they share
//! real part and norm, so every similarity class contains the complex pair
//! `Re(a) ± |Im(a)| i`. The *argument* of `a` is the `|θ|` of that complex
//! representative written as `r e^{iθ}`, and therefore lies in `[0, π]`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex64 = nalgebra::Complex<f64>;

/// Element of the division ring of real quaternions.
///
/// Serialized as the JSON array `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// `re + im i`, the embedding of ℂ as the `1, i` plane.
    #[inline]
    pub const fn complex(re: f64, im: f64) -> Self {
        Self::new(re, im, 0.0, 0.0)
    }

    /// `r e^{iθ}` in the `1, i` plane.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::complex(r * theta.cos(), r * theta.sin())
    }

    /// Re-assembles `z + w j` from its two complex coordinates.
    ///
    /// This is the inverse of [`Quaternion::symplectic_parts`].
    #[inline]
    pub fn from_symplectic(z: Complex64, w: Complex64) -> Self {
        Self::new(z.re, z.im, w.re, w.im)
    }

    /// The pair `(z, w)` with `self = z + w j`, `z, w` in the `1, i` plane.
    #[inline]
    pub fn symplectic_parts(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// The pure-imaginary part `x i + y j + z k`.
    #[inline]
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Euclidean norm, computed without intermediate overflow.
    #[inline]
    pub fn norm(self) -> f64 {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.norm_sqr() == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Two-sided inverse `conj(q) / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::NonInvertible("zero quaternion"));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Similarity test: `|Re a - Re b| <= tol` and `||a| - |b|| <= tol`.
    pub fn is_similar(self, other: Self, tol: f64) -> bool {
        (self.w - other.w).abs() <= tol && (self.norm() - other.norm()).abs() <= tol
    }

    /// `arccos(Re q / |q|)`, in `[0, π]`.
    pub fn argument(self) -> Result<f64> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroArgument);
        }
        // atan2 keeps full accuracy near 0 and π where acos loses digits.
        Ok(self.im_norm().atan2(self.w))
    }

    /// `Re q + |Im q| i`, the representative of the similarity class with
    /// non-negative imaginary part.
    pub fn complex_representative(self) -> Complex64 {
        Complex64::new(self.w, self.im_norm())
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.w - other.w)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    /// Hamilton product; not commutative.
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    /// Multiplication table of the basis units, written out independently of
    /// the Hamilton product formula.
    fn table(a: usize, b: usize) -> (f64, usize) {
        // index 0 = 1, 1 = i, 2 = j, 3 = k
        const T: [[(f64, usize); 4]; 4] = [
            [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
            [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
            [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
            [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
        ];
        T[a][b]
    }

    fn table_mul(p: Quaternion, q: Quaternion) -> Quaternion {
        let pa: [f64; 4] = p.into();
        let qa: [f64; 4] = q.into();
        let mut out = [0.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                let (s, idx) = table(a, b);
                out[idx] += s * pa[a] * qa[b];
            }
        }
        out.into()
    }

    #[test]
    fn basis_relations() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(J * I, -K);
        assert_eq!(I * I, -Quaternion::ONE);
        assert_eq!(I * J * K, -Quaternion::ONE);
    }

    #[test]
    fn identity_product() {
        let q = Quaternion::new(2.0, 3.0, -1.0, 0.0);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(Quaternion::ONE * q, q);
    }

    #[test]
    fn product_matches_table() {
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(table_mul(p, q), Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));

        let a = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        let b = Quaternion::new(-0.9, 0.4, 1.1, -3.0);
        assert!((a * b).max_abs_diff(table_mul(a, b)) < 1e-14);
    }

    #[test]
    fn inverses() {
        assert_eq!(I.inverse().unwrap(), -I);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        let inv = q.inverse().unwrap();
        assert!(inv.max_abs_diff(Quaternion::new(0.25, -0.25, -0.25, -0.25)) < 1e-15);
        assert!((q * inv).max_abs_diff(Quaternion::ONE) < 1e-15);
        assert!((inv * q).max_abs_diff(Quaternion::ONE) < 1e-15);
        assert!(matches!(
            Quaternion::ZERO.inverse(),
            Err(Error::NonInvertible(_))
        ));
    }

    #[test]
    fn similarity_examples() {
        assert!(I.is_similar(-I, TOL));
        assert!(I.is_similar(J, TOL));
        assert!(!I.is_similar(I * 2.0, TOL));
    }
    const TOL: f64 = crate::tolerance::TOL_SIM;

    #[test]
    fn argument_examples() {
        assert_abs_diff_eq!(I.argument().unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(Quaternion::real(-3.0).argument().unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            Quaternion::new(1.0, 1.0, 1.0, 1.0).argument().unwrap(),
            FRAC_PI_3,
            epsilon = 1e-15
        );
        assert_eq!(Quaternion::ZERO.argument(), Err(Error::ZeroArgument));
    }

    #[test]
    fn complex_representative_examples() {
        assert_eq!(J.complex_representative(), Complex64::new(0.0, 1.0));
        assert_eq!(Quaternion::real(5.0).complex_representative(), Complex64::new(5.0, 0.0));
        let r = Quaternion::new(1.0, 0.0, -2.0, 2.0).complex_representative();
        assert_abs_diff_eq!(r.re, 1.0);
        assert_abs_diff_eq!(r.im, 2.0 * 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn json_is_wxyz_array() {
        let q = Quaternion::new(1.0, -2.5, 0.0, 4.0);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[1.0,-2.5,0.0,4.0]");
        let back: Quaternion = serde_json::from_str("[1,-2.5,0,4]").unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn symplectic_round_trip() {
        let q = Quaternion::new(0.5, -1.0, 2.0, 3.0);
        let (z, w) = q.symplectic_parts();
        assert_eq!(Quaternion::from_symplectic(z, w), q);
        // z + w j with w j = (y + z i) j = y j + z k
        assert_eq!(Quaternion::from(z) + Quaternion::from(w) * J, q);
    }
}
