//! Möbius action of SL(2,ℍ) on `ℍ ∪ {∞}` and the classification of
//! isometries of hyperbolic 5-space.
//!
//! `[[a, b], [c, d]]` acts by `Z ↦ (aZ + b)(cZ + d)⁻¹`. Up to conjugacy an
//! element is `[[λ, 1], [0, λ]]` with `|λ| = 1` (parabolic) or `diag(λ, μ)`
//! with `λ, μ ∈ ℂ`; the latter is hyperbolic iff `|λ| ≠ 1 ≠ |μ|`, and a
//! unit-modulus diagonal form with `λ` not similar to `μ` is *2-rotatory*
//! elliptic. The argument trace `at = arg λ + arg μ` and absolute trace
//! `abt = |λ| + |μ|` are read off the eigenvalue representatives; on SL(2,ℍ)
//! an element is hyperbolic iff `abt > 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eigen_representatives, eigenvector_points, MatH2};
use crate::quaternion::{Complex64, Quaternion};
use crate::tolerance::Tolerances;

/// A point of the extended quaternionic line `ℍ ∪ {∞}` (the sphere S⁴).
///
/// JSON: the quaternion array for finite points, `{"inf": true}` for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryPoint {
    Finite(Quaternion),
    Infinity(InfinityMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinityMarker {
    inf: bool,
}

impl BoundaryPoint {
    pub const INFINITY: Self = Self::Infinity(InfinityMarker { inf: true });

    pub fn finite(q: Quaternion) -> Self {
        Self::Finite(q)
    }

    pub fn as_finite(&self) -> Option<Quaternion> {
        match self {
            Self::Finite(q) => Some(*q),
            Self::Infinity(_) => None,
        }
    }

    /// `∞`, or a finite point of norm beyond `1 / tol`.
    pub fn is_infinite_within(&self, tol: f64) -> bool {
        match self {
            Self::Finite(q) => q.norm() > tol.recip(),
            Self::Infinity(_) => true,
        }
    }

    /// Chordal distance on S⁴: `2|p - q| / (√(1+|p|²) √(1+|q|²))`, and
    /// `2 / √(1+|p|²)` to `∞`. Bounded by 2.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Infinity(_), Self::Infinity(_)) => 0.0,
            (Self::Finite(p), Self::Infinity(_)) | (Self::Infinity(_), Self::Finite(p)) => {
                2.0 / (1.0 + p.norm_sqr()).sqrt()
            }
            (Self::Finite(p), Self::Finite(q)) => {
                2.0 * (*p - *q).norm()
                    / ((1.0 + p.norm_sqr()).sqrt() * (1.0 + q.norm_sqr()).sqrt())
            }
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.is_infinite_within(tol) && other.is_infinite_within(tol) {
            return true;
        }
        self.chordal_distance(other) <= tol
    }
}

impl From<Quaternion> for BoundaryPoint {
    fn from(q: Quaternion) -> Self {
        Self::Finite(q)
    }
}

/// `x y⁻¹` as a boundary point; `∞` when `|x| > |y| / tol`.
fn ratio(x: Quaternion, y: Quaternion, tol: f64) -> BoundaryPoint {
    if y.is_zero() || x.norm() * tol > y.norm() {
        BoundaryPoint::INFINITY
    } else {
        BoundaryPoint::Finite(x * y.inverse().expect("nonzero denominator"))
    }
}

/// `Z ↦ (aZ + b)(cZ + d)⁻¹`, with `∞ ↦ a c⁻¹`.
pub fn apply(m: &MatH2, z: &BoundaryPoint, tol: &Tolerances) -> Result<BoundaryPoint> {
    let det = m.det();
    if !(det > tol.det) {
        return Err(Error::Singular { det });
    }
    Ok(match z {
        BoundaryPoint::Finite(q) => ratio(m.a * *q + m.b, m.c * *q + m.d, tol.fix),
        BoundaryPoint::Infinity(_) => ratio(m.a, m.c, tol.fix),
    })
}

/// Boundary fixed points, recovered from right eigenvectors of `M`.
///
/// Each returned point `p` satisfies `chordal(M p, p) <= tol.fix`. Points
/// closer than `√tol.fix` are merged: eigenvectors of a defective eigenvalue
/// are only accurate to about the square root of the working precision.
pub fn fixed_points(m: &MatH2, tol: &Tolerances) -> Result<Vec<BoundaryPoint>> {
    let normalized = m.sl_normalized(tol.det)?;
    if normalized.is_plus_minus_identity(tol.cls) {
        return Err(Error::NoIsolatedFixedPoints);
    }
    let merge = tol.fix.sqrt();
    let mut points: Vec<BoundaryPoint> = Vec::new();
    for (_, v1, v2) in eigenvector_points(m, tol)? {
        let p = ratio(v1, v2, tol.fix);
        let image = apply(m, &p, tol)?;
        if !image.approx_eq(&p, tol.fix) {
            continue;
        }
        if !points.iter().any(|q| q.approx_eq(&p, merge)) {
            points.push(p);
        }
    }
    if points.is_empty() {
        return Err(Error::Eigen("no eigenvector produced a fixed point"));
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Identity,
    Parabolic,
    #[serde(rename = "elliptic_1rot")]
    Elliptic1Rot,
    #[serde(rename = "elliptic_2rot")]
    Elliptic2Rot,
    Hyperbolic,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Identity => "identity",
            Kind::Parabolic => "parabolic",
            Kind::Elliptic1Rot => "elliptic_1rot",
            Kind::Elliptic2Rot => "elliptic_2rot",
            Kind::Hyperbolic => "hyperbolic",
        }
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self, Kind::Elliptic1Rot | Kind::Elliptic2Rot)
    }
}

pub(crate) mod complex_pair {
    use crate::quaternion::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Dynamical type and trace invariants of an SL(2,ℍ) element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: Kind,
    #[serde(with = "complex_pair")]
    pub lambda: Complex64,
    #[serde(with = "complex_pair")]
    pub mu: Complex64,
    /// `arg λ + arg μ`, in `[0, 2π]`.
    pub at: f64,
    /// `|λ| + |μ|`.
    pub abt: f64,
    /// `2 log |λ|` for the larger-modulus representative.
    pub tau: f64,
}

impl Classification {
    /// `α = arg λ`, `β = arg μ`.
    pub fn arguments(&self) -> (f64, f64) {
        (arg(self.lambda), arg(self.mu))
    }
}

fn arg(z: Complex64) -> f64 {
    Quaternion::from(z).argument().unwrap_or(0.0)
}

/// Classifies an SL-normalized matrix.
///
/// Hyperbolic when `abt > 2 + tol.cls`. Otherwise both moduli must be within
/// `tol.cls` of 1: a defective embedding is parabolic, a diagonalizable one
/// elliptic (2-rotatory when `λ` is not similar to `μ`). Anything else sits
/// in the band around `abt = 2` and is reported as ambiguous.
pub fn classify(m: &MatH2, tol: &Tolerances) -> Result<Classification> {
    let det = m.det();
    if (det - 1.0).abs() > tol.det {
        return Err(Error::NotSlNormalized { det, tol: tol.det });
    }
    let reps = eigen_representatives(m, tol)?;
    let (lambda, mu) = (reps.lambda, reps.mu);
    let abt = lambda.norm() + mu.norm();
    let mut out = Classification {
        kind: Kind::Identity,
        lambda,
        mu,
        at: arg(lambda) + arg(mu),
        abt,
        tau: 2.0 * lambda.norm().ln(),
    };

    if m.is_plus_minus_identity(tol.cls) {
        return Ok(out);
    }
    let lambda_margin = lambda.norm() - 1.0;
    let mu_margin = mu.norm() - 1.0;
    out.kind = if abt > 2.0 + tol.cls {
        Kind::Hyperbolic
    } else if lambda_margin.abs() <= tol.cls && mu_margin.abs() <= tol.cls {
        if !reps.diagonalizable {
            Kind::Parabolic
        } else if Quaternion::from(lambda).is_similar(mu.into(), tol.sim) {
            Kind::Elliptic1Rot
        } else {
            Kind::Elliptic2Rot
        }
    } else {
        return Err(Error::AmbiguousClassification {
            abt_margin: abt - 2.0,
            lambda_margin,
            mu_margin,
        });
    };
    Ok(out)
}

/// `P M P⁻¹` for SL-normalized `M` and `P`.
pub fn conjugate(m: &MatH2, p: &MatH2, tol: &Tolerances) -> Result<MatH2> {
    for x in [m, p] {
        let det = x.det();
        if (det - 1.0).abs() > tol.det {
            return Err(Error::NotSlNormalized { det, tol: tol.det });
        }
    }
    m.conjugate_by(p, tol.det)
}
