//! Seeded random elements of SL(2,ℍ).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MatH2;
use crate::mobius::{apply, classify, BoundaryPoint, Kind};
use crate::quaternion::{Complex64, Quaternion};
use crate::tolerance::Tolerances;

/// Determinant floor (before normalization) below which a draw is rejected.
pub const MIN_RAW_DET: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 10_000;

/// How [`sample_sl2h`] draws its matrices.
///
/// i.i.d. Gaussian entries give hyperbolic elements with probability one:
/// elliptic and parabolic elements form lower-dimensional subsets of
/// SL(2,ℍ). `NormalForms` instead picks a dynamical type uniformly, builds
/// its normal form, and conjugates it by a Gaussian frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum SampleDistribution {
    Gaussian { scale: f64 },
    NormalForms { scale: f64 },
}

impl Default for SampleDistribution {
    fn default() -> Self {
        Self::Gaussian { scale: 1.0 }
    }
}

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Quaternion {
    let mut draw = || scale * rng.sample::<f64, _>(StandardNormal);
    Quaternion::new(draw(), draw(), draw(), draw())
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> MatH2 {
    MatH2::new(
        gaussian_quaternion(rng, scale),
        gaussian_quaternion(rng, scale),
        gaussian_quaternion(rng, scale),
        gaussian_quaternion(rng, scale),
    )
}

/// Gaussian matrix rescaled to determinant 1, rejecting near-singular draws.
pub fn gaussian_sl2h<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> MatH2 {
    loop {
        let m = gaussian_matrix(rng, scale);
        if m.det() >= MIN_RAW_DET * scale.powi(2) {
            return m.sl_normalized(0.0).expect("determinant above floor");
        }
    }
}

/// `κ(P) = max|P| · max|P⁻¹|`, entrywise.
fn frame_condition(p: &MatH2) -> f64 {
    p.inverse(0.0)
        .map(|inv| p.max_entry_norm() * inv.max_entry_norm())
        .unwrap_or(f64::INFINITY)
}

fn unit(rng: &mut (impl Rng + ?Sized)) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..PI))
}

pub fn sample_sl2h<R: Rng + ?Sized>(rng: &mut R, dist: &SampleDistribution) -> MatH2 {
    match *dist {
        SampleDistribution::Gaussian { scale } => gaussian_sl2h(rng, scale),
        SampleDistribution::NormalForms { scale } => {
            let normal = match rng.random_range(0..3u8) {
                0 => {
                    let r = rng.random_range(0.05f64..1.5).exp();
                    MatH2::diag_complex(unit(rng) * r, unit(rng) / r)
                }
                1 => MatH2::diag_complex(unit(rng), unit(rng)),
                _ => {
                    let lambda = Quaternion::from(unit(rng));
                    MatH2::new(lambda, Quaternion::ONE, Quaternion::ZERO, lambda)
                }
            };
            let p = gaussian_sl2h(rng, scale);
            normal.conjugate_by(&p, 0.0).expect("SL frame is invertible")
        }
    }
}

/// Same as [`sample_sl2h`] from a bare seed.
pub fn sample_sl2h_seeded(seed: u64, dist: &SampleDistribution) -> MatH2 {
    sample_sl2h(&mut ChaCha8Rng::seed_from_u64(seed), dist)
}

/// A hyperbolic `g = P diag(λ, μ) P⁻¹` with `g(z₀) = z₀`.
///
/// `|λ| ∈ [1 + margin, 3 + margin]`, `|λμ| = 1`, arguments uniform in
/// `[0, π]`. `P` sends ∞ to `z₀`, and its other column is random, so the
/// second fixed point `P(0)` is generic. Draws whose frame is badly
/// conditioned, whose second fixed point is near 0 or ∞, or whose
/// classification is not an unambiguous `hyperbolic` are rejected.
pub fn sample_hyperbolic_fixing<R: Rng + ?Sized>(
    rng: &mut R,
    z0: &BoundaryPoint,
    margin: f64,
    tol: &Tolerances,
) -> Result<MatH2> {
    let z0 = match z0.as_finite() {
        Some(q) if !q.is_zero() && !z0.is_infinite_within(tol.fix) => q,
        _ => return Err(Error::InvalidInput("z0 must be finite and nonzero".into())),
    };
    let target = BoundaryPoint::Finite(z0);
    for _ in 0..MAX_ATTEMPTS {
        let c = gaussian_quaternion(rng, 1.0);
        let b = gaussian_quaternion(rng, 1.0);
        let d = gaussian_quaternion(rng, 1.0);
        let raw = MatH2::new(z0 * c, b, c, d);
        if raw.det() < MIN_RAW_DET {
            continue;
        }
        let p = raw.sl_normalized(0.0)?;
        if frame_condition(&p) > 1e3 {
            continue;
        }
        let other = apply(&p, &Quaternion::ZERO.into(), tol)?;
        let zero = BoundaryPoint::Finite(Quaternion::ZERO);
        if other.chordal_distance(&zero) < 1e-3 || other.chordal_distance(&BoundaryPoint::INFINITY) < 1e-3 {
            continue;
        }

        let r = 1.0 + margin + rng.random_range(0.0..2.0);
        let lambda = unit(rng) * r;
        let mu = unit(rng) / r;
        let g = MatH2::diag_complex(lambda, mu).conjugate_by(&p, tol.det)?;
        if !apply(&g, &target, tol)?.approx_eq(&target, tol.fix) {
            continue;
        }
        if matches!(classify(&g, tol), Ok(c) if c.kind == Kind::Hyperbolic) {
            return Ok(g);
        }
    }
    Err(Error::InvalidInput(
        "could not draw a hyperbolic element fixing z0".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_and_deterministic() {
        let dist = SampleDistribution::default();
        let a = sample_sl2h_seeded(7, &dist);
        let b = sample_sl2h_seeded(7, &dist);
        assert_eq!(a, b);
        assert!((a.det() - 1.0).abs() < 1e-9);
        assert_ne!(a, sample_sl2h_seeded(8, &dist));
    }

    #[test]
    fn streams_are_independent() {
        let mut r0 = trial_rng(1, 0);
        let mut r1 = trial_rng(1, 1);
        assert_ne!(gaussian_quaternion(&mut r0, 1.0), gaussian_quaternion(&mut r1, 1.0));
    }

    #[test]
    fn hyperbolic_fixing_postconditions() {
        let tol = Tolerances::default();
        let z0 = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let mut rng = trial_rng(3, 0);
        for _ in 0..50 {
            let g = sample_hyperbolic_fixing(&mut rng, &z0.into(), 1e-3, &tol).unwrap();
            assert!((g.det() - 1.0).abs() <= 1e-9);
            let image = apply(&g, &z0.into(), &tol).unwrap();
            assert!(image.chordal_distance(&z0.into()) <= 1e-8);
            let c = classify(&g, &tol).unwrap();
            assert_eq!(c.kind, Kind::Hyperbolic);
            assert!(c.abt > 2.0);
        }
    }

    #[test]
    fn hyperbolic_fixing_rejects_bad_points() {
        let tol = Tolerances::default();
        let mut rng = trial_rng(3, 0);
        assert!(sample_hyperbolic_fixing(&mut rng, &BoundaryPoint::INFINITY, 1e-3, &tol).is_err());
        assert!(sample_hyperbolic_fixing(&mut rng, &Quaternion::ZERO.into(), 1e-3, &tol).is_err());
    }

    #[test]
    fn distribution_json() {
        let s = serde_json::to_string(&SampleDistribution::NormalForms { scale: 1.0 }).unwrap();
        assert_eq!(s, r#"{"distribution":"normal_forms","scale":1.0}"#);
    }
}
