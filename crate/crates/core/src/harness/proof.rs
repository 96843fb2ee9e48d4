//! The explicit matrices and identities used when a non-discrete group is
//! approached by a sequence `hₙ → h`.
//!
//! For a fixed point `z₀ ∉ {0, ∞}` of `g = [[a, b], [c, d]]`:
//!
//! * `h = [[z₀⁻¹, -1], [0, z₀]]` sends `z₀` to 0, so `hgh⁻¹` fixes 0 and its
//!   top-right entry `z₀⁻¹a + z₀⁻¹bz₀⁻¹ - c - dz₀⁻¹` vanishes;
//! * `u = [[1, 0], [-z₀⁻¹, 1]]` fixes 0 and sends `z₀` to ∞, so the
//!   bottom-left entry `-z₀⁻¹(a + bz₀⁻¹) + (c + dz₀⁻¹)` of `ugu⁻¹` vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MatH2;
use crate::mobius::{apply, BoundaryPoint};
use crate::quaternion::Quaternion;
use crate::tolerance::Tolerances;

fn nonzero_inverse(z0: Quaternion) -> Result<Quaternion> {
    z0.inverse()
        .map_err(|_| Error::InvalidInput("z0 must be a nonzero quaternion".into()))
}

/// `[[z₀⁻¹, -1], [0, z₀]]`.
pub fn conjugator_h(z0: Quaternion) -> Result<MatH2> {
    let z0_inv = nonzero_inverse(z0)?;
    Ok(MatH2::new(z0_inv, -Quaternion::ONE, Quaternion::ZERO, z0))
}

/// `[[z₀, 1], [0, z₀⁻¹]]`, the inverse of [`conjugator_h`].
pub fn conjugator_h_inverse(z0: Quaternion) -> Result<MatH2> {
    let z0_inv = nonzero_inverse(z0)?;
    Ok(MatH2::new(z0, Quaternion::ONE, Quaternion::ZERO, z0_inv))
}

/// `[[1, 0], [-z₀⁻¹, 1]]`.
pub fn conjugator_u(z0: Quaternion) -> Result<MatH2> {
    let z0_inv = nonzero_inverse(z0)?;
    Ok(MatH2::new(Quaternion::ONE, Quaternion::ZERO, -z0_inv, Quaternion::ONE))
}

/// `[[1, 0], [z₀⁻¹, 1]]`, the inverse of [`conjugator_u`].
pub fn conjugator_u_inverse(z0: Quaternion) -> Result<MatH2> {
    let z0_inv = nonzero_inverse(z0)?;
    Ok(MatH2::new(Quaternion::ONE, Quaternion::ZERO, z0_inv, Quaternion::ONE))
}

/// Entrywise closed form of `hgh⁻¹` for `h = conjugator_h(z₀)`:
///
/// ```text
/// [[ z₀⁻¹az₀ - cz₀,  z₀⁻¹a + z₀⁻¹bz₀⁻¹ - c - dz₀⁻¹ ],
///  [ z₀cz₀,          z₀c + z₀dz₀⁻¹                ]]
/// ```
///
/// The `-cz₀` term of the top-left entry is easy to drop; without it the
/// formula only holds when `c = 0`.
pub fn h_conjugate_closed_form(g: &MatH2, z0: Quaternion) -> Result<MatH2> {
    let zi = nonzero_inverse(z0)?;
    let MatH2 { a, b, c, d } = *g;
    Ok(MatH2::new(
        zi * a * z0 - c * z0,
        zi * a + zi * b * zi - c - d * zi,
        z0 * c * z0,
        z0 * c + z0 * d * zi,
    ))
}

/// Entrywise closed form of `ugu⁻¹` for `u = conjugator_u(z₀)`.
pub fn u_conjugate_closed_form(g: &MatH2, z0: Quaternion) -> Result<MatH2> {
    let zi = nonzero_inverse(z0)?;
    let MatH2 { a, b, c, d } = *g;
    Ok(MatH2::new(
        a + b * zi,
        b,
        -zi * (a + b * zi) + (c + d * zi),
        -zi * b + d,
    ))
}

/// Outcome of [`verify_offdiag_vanishing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanishingRecord {
    /// `hgh⁻¹` computed by matrix products.
    pub conjugated: MatH2,
    /// The same matrix from [`h_conjugate_closed_form`].
    pub closed_form: MatH2,
    /// Largest entrywise distance between the two.
    pub closed_form_distance: f64,
    /// `|b₀| |c₀|` of `hgh⁻¹`.
    pub offdiag_product: f64,
    /// Bound the product was checked against.
    pub bound: f64,
    /// `|z₀⁻¹az₀ - a₀|`, i.e. `|cz₀|`: how far the top-left entry is from
    /// the shortened formula without the `-cz₀` term.
    pub short_top_left_gap: f64,
}

/// Checks that `hgh⁻¹` has vanishing off-diagonal product and matches the
/// closed form entrywise, for `g` fixing `z₀`.
///
/// Both checks are scaled: the product against `tol.identity · s²` and the
/// entrywise agreement against `tol.identity / 10 · s`, with
/// `s = max(1, max entry norm of hgh⁻¹)`.
pub fn verify_offdiag_vanishing(g: &MatH2, z0: Quaternion, tol: &Tolerances) -> Result<VanishingRecord> {
    let h = conjugator_h(z0)?;
    let image = apply(g, &BoundaryPoint::Finite(z0), tol)?;
    if !image.approx_eq(&BoundaryPoint::Finite(z0), tol.fix) {
        return Err(Error::InvalidInput(format!(
            "g does not fix z0 (chordal displacement {:e})",
            image.chordal_distance(&BoundaryPoint::Finite(z0))
        )));
    }
    let conjugated = h * *g * conjugator_h_inverse(z0)?;
    let closed_form = h_conjugate_closed_form(g, z0)?;
    let s = conjugated.max_entry_norm().max(1.0);

    let offdiag_product = conjugated.b.norm() * conjugated.c.norm();
    let bound = tol.identity * s * s;
    if offdiag_product > bound {
        return Err(Error::IdentityViolated {
            residual: offdiag_product,
            bound,
        });
    }
    let closed_form_distance = conjugated.max_entry_distance(&closed_form);
    let entry_bound = 0.1 * tol.identity * s;
    if closed_form_distance > entry_bound {
        return Err(Error::IdentityViolated {
            residual: closed_form_distance,
            bound: entry_bound,
        });
    }
    let zi = z0.inverse().expect("checked nonzero");
    Ok(VanishingRecord {
        conjugated,
        closed_form,
        closed_form_distance,
        offdiag_product,
        bound,
        short_top_left_gap: (zi * g.a * z0 - conjugated.a).norm(),
    })
}

/// `Lₙ = hₙ g hₙ⁻¹ f hₙ g⁻¹ hₙ⁻¹`, the conjugate of `f` by `hₙ g hₙ⁻¹`.
pub fn build_ln(f: &MatH2, g: &MatH2, hn: &MatH2, tol: &Tolerances) -> Result<MatH2> {
    for m in [f, g, hn] {
        let det = m.det();
        if (det - 1.0).abs() > tol.det {
            return Err(Error::NotSlNormalized { det, tol: tol.det });
        }
    }
    let k = g.conjugate_by(hn, tol.det)?;
    f.conjugate_by(&k, tol.det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::TOL_DET;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    const ONE: Quaternion = Quaternion::ONE;

    #[test]
    fn h_for_unit_z0() {
        let h = conjugator_h(ONE).unwrap();
        assert_eq!(h, MatH2::new(ONE, -ONE, Quaternion::ZERO, ONE));
        assert!(conjugator_h(Quaternion::ZERO).is_err());
        assert!(conjugator_u(Quaternion::ZERO).is_err());
    }

    #[test]
    fn h_sends_z0_to_zero_and_inverts() {
        let z0 = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let h = conjugator_h(z0).unwrap();
        assert!((h.det() - 1.0).abs() < 1e-15);
        let p = apply(&h, &z0.into(), &tol()).unwrap();
        assert!(p.approx_eq(&Quaternion::ZERO.into(), 1e-15));
        let inv = h.inverse(TOL_DET).unwrap();
        assert!(inv.max_entry_distance(&conjugator_h_inverse(z0).unwrap()) < 1e-15);
    }

    #[test]
    fn u_fixes_zero_and_inverts() {
        let z0 = Quaternion::new(2.0, 0.0, 1.0, 0.0);
        let u = conjugator_u(z0).unwrap();
        assert_eq!(u, MatH2::new(ONE, Quaternion::ZERO, -z0.inverse().unwrap(), ONE));
        assert_eq!(
            apply(&u, &Quaternion::ZERO.into(), &tol()).unwrap(),
            Quaternion::ZERO.into()
        );
        assert_eq!(
            apply(&u, &z0.into(), &tol()).unwrap(),
            BoundaryPoint::INFINITY
        );
        let inv = u.inverse(TOL_DET).unwrap();
        assert!(inv.max_entry_distance(&conjugator_u_inverse(z0).unwrap()) < 1e-15);
        assert_eq!(conjugator_u(ONE).unwrap(), MatH2::new(ONE, Quaternion::ZERO, -ONE, ONE));
    }

    /// `P diag(2, 1/2) P⁻¹` with `P(∞) = z₀`.
    fn hyperbolic_fixing(z0: Quaternion) -> MatH2 {
        let c = Quaternion::new(0.4, 0.1, -0.3, 0.2);
        let p = MatH2::new(z0 * c, Quaternion::new(0.2, 0.0, 0.5, -0.1), c, Quaternion::new(1.0, 0.3, 0.0, 0.0))
            .sl_normalized(TOL_DET)
            .unwrap();
        MatH2::diag(ONE * 2.0, ONE * 0.5).conjugate_by(&p, TOL_DET).unwrap()
    }

    #[test]
    fn vanishing_for_conjugated_diagonal() {
        let z0 = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let g = hyperbolic_fixing(z0);
        let rec = verify_offdiag_vanishing(&g, z0, &tol()).unwrap();
        assert!(rec.offdiag_product <= 1e-8);
        assert!(rec.closed_form_distance <= 1e-9);
        // c ≠ 0, so dropping -cz₀ from the top-left entry is visibly wrong
        assert!((rec.short_top_left_gap - (g.c * z0).norm()).abs() < 1e-12);
        assert!(rec.short_top_left_gap > 1e-3);
    }

    #[test]
    fn vanishing_when_g_also_fixes_infinity() {
        // upper triangular g with g(z0) = z0: a z0 + b = z0 d
        let z0 = Quaternion::new(0.5, 0.0, 1.0, 0.0);
        let a = ONE * 2.0;
        let d = ONE * 0.5;
        let b = z0 * d - a * z0;
        let g = MatH2::new(a, b, Quaternion::ZERO, d);
        let rec = verify_offdiag_vanishing(&g, z0, &tol()).unwrap();
        assert_eq!(rec.conjugated.c.norm(), 0.0);
        assert!(rec.offdiag_product == 0.0);
        assert!(rec.short_top_left_gap < 1e-15);
    }

    #[test]
    fn vanishing_rejects_non_fixed_point() {
        let g = MatH2::diag(ONE * 2.0, ONE * 0.5);
        assert!(matches!(
            verify_offdiag_vanishing(&g, ONE, &tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn u_closed_form_matches_product() {
        let z0 = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let g = hyperbolic_fixing(z0);
        let direct = conjugator_u(z0).unwrap() * g * conjugator_u_inverse(z0).unwrap();
        let closed = u_conjugate_closed_form(&g, z0).unwrap();
        assert!(direct.max_entry_distance(&closed) < 1e-12);
        assert!(direct.c.norm() < 1e-12);
    }

    #[test]
    fn ln_special_cases() {
        let z0 = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let g = hyperbolic_fixing(z0);
        let f = MatH2::diag(Quaternion::from_polar(1.0, 0.3), Quaternion::from_polar(1.0, 0.5));
        let hn = conjugator_h(z0).unwrap();

        let l = build_ln(&MatH2::IDENTITY, &g, &hn, &tol()).unwrap();
        assert!(l.max_entry_distance(&MatH2::IDENTITY) < 1e-12);

        let l = build_ln(&f, &g, &MatH2::IDENTITY, &tol()).unwrap();
        let gfg = g * f * g.inverse(TOL_DET).unwrap();
        assert!(l.max_entry_distance(&gfg) < 1e-12);

        let l = build_ln(&f, &g, &hn, &tol()).unwrap();
        assert!((l.det() - 1.0).abs() < 1e-8);
        // hgh⁻¹ fixes 0, so L = (hgh⁻¹) f (hgh⁻¹)⁻¹ fixes 0 too
        assert!(l.b.norm() < 1e-10);

        assert!(build_ln(&f.scale(2.0), &g, &hn, &tol()).is_err());
    }
}
