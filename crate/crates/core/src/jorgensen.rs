//! Jørgensen-type inequalities for two-generator subgroups of SL(2,ℍ) and
//! the admissibility conditions on test maps.
//!
//! Each test returns a [`Certificate`]. For the three inequality tests the
//! certificate is one-sided: `violated` certifies that `⟨S, T⟩` is *not*
//! both discrete and non-elementary, and `satisfied` claims nothing.
//!
//! * general: `{(Re λ - Re μ)² + (|Im λ| + |Im μ|)²}(1 + |bc|) ≥ 1`
//!   for `T = diag(λ, μ)` with `λ` not similar to `μ`;
//! * elliptic/hyperbolic: `2(cosh τ - cos(α + β))(1 + |bc|) ≥ 1`
//!   with `α = arg λ`, `β = arg μ`, `τ = 2 log |λ|`;
//! * translation: `|c| |μ| ≥ 1` for `T = [[1, μ], [0, 1]]`.

use std::f64::consts::FRAC_PI_3;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{diagonalizing_frame, eigen_representatives, MatH2};
use crate::mobius::{classify, Kind};
use crate::quaternion::{Complex64, Quaternion};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    JorgensenGeneral,
    JorgensenEllipticHyperbolic,
    ShimizuTranslation,
    TestmapElliptic,
    TestmapHyperbolic,
    TestmapParabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Violated,
    Satisfied,
    Inapplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Violated => "violated",
            Verdict::Satisfied => "satisfied",
            Verdict::Inapplicable => "inapplicable",
        })
    }
}

/// Outcome of one inequality or admissibility test.
///
/// For inequality tests `verdict == Violated` iff `lhs < threshold - tol_cert`.
/// For the `testmap_*` tests `Satisfied` means the test map meets the
/// admissibility condition `lhs < threshold` (`lhs <= threshold` for the
/// parabolic case) with the same band, and `Violated` means it does not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub test: TestName,
    pub verdict: Verdict,
    pub lhs: Option<f64>,
    pub threshold: f64,
    /// `|lhs - threshold|`.
    pub margin: Option<f64>,
    pub at_boundary: bool,
    pub inputs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    fn inequality(test: TestName, lhs: f64, threshold: f64, tol: f64, inputs: Value) -> Self {
        let verdict = if lhs < threshold - tol {
            Verdict::Violated
        } else {
            Verdict::Satisfied
        };
        Self {
            test,
            verdict,
            lhs: Some(lhs),
            threshold,
            margin: Some((lhs - threshold).abs()),
            at_boundary: (lhs - threshold).abs() <= tol,
            inputs,
            reason: None,
            notes: Vec::new(),
        }
    }

    fn inapplicable(test: TestName, threshold: f64, reason: impl Into<String>, inputs: Value) -> Self {
        Self {
            test,
            verdict: Verdict::Inapplicable,
            lhs: None,
            threshold,
            margin: None,
            at_boundary: false,
            inputs,
            reason: Some(reason.into()),
            notes: Vec::new(),
        }
    }

    fn admissibility(
        test: TestName,
        lhs: f64,
        threshold: f64,
        admissible: bool,
        tol: f64,
        inputs: Value,
    ) -> Self {
        Self {
            test,
            verdict: if admissible {
                Verdict::Satisfied
            } else {
                Verdict::Violated
            },
            lhs: Some(lhs),
            threshold,
            margin: Some((lhs - threshold).abs()),
            at_boundary: (lhs - threshold).abs() <= tol,
            inputs,
            reason: None,
            notes: Vec::new(),
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn arg(z: Complex64) -> f64 {
    Quaternion::from(z).argument().unwrap_or(0.0)
}

fn similar(lambda: Complex64, mu: Complex64, tol: &Tolerances) -> bool {
    Quaternion::from(lambda).is_similar(mu.into(), tol.sim)
}

const REPEATED: &str = "diagonal part is 1-rotatory or repeated";

/// `(Re λ - Re μ)² + (|Im λ| + |Im μ|)²`.
pub fn trace_factor(lambda: Complex64, mu: Complex64) -> f64 {
    (lambda.re - mu.re).powi(2) + (lambda.im.abs() + mu.im.abs()).powi(2)
}

/// The general test with the diagonal part `(λ, μ)` and `|bc|` given directly.
pub fn jorgensen_general(
    lambda: Complex64,
    mu: Complex64,
    bc_norm: f64,
    tol: &Tolerances,
) -> Result<Certificate> {
    if !(bc_norm >= 0.0) || !bc_norm.is_finite() {
        return Err(Error::InvalidInput(format!("|bc| must be a finite non-negative real, got {bc_norm}")));
    }
    let inputs = json!({ "lambda": pair(lambda), "mu": pair(mu), "bc_norm": bc_norm });
    if similar(lambda, mu, tol) {
        return Ok(Certificate::inapplicable(TestName::JorgensenGeneral, 1.0, REPEATED, inputs));
    }
    let lhs = trace_factor(lambda, mu) * (1.0 + bc_norm);
    Ok(Certificate::inequality(TestName::JorgensenGeneral, lhs, 1.0, tol.cert, inputs))
}

/// The general test reading `|bc| = |b||c|` off `S`.
pub fn jorgensen_general_for(
    s: &MatH2,
    lambda: Complex64,
    mu: Complex64,
    tol: &Tolerances,
) -> Result<Certificate> {
    let mut cert = jorgensen_general(lambda, mu, s.b.norm() * s.c.norm(), tol)?;
    cert.inputs["S"] = serde_json::to_value(s).expect("matrix serializes");
    Ok(cert)
}

fn require_sl(m: &MatH2, tol: &Tolerances) -> Result<()> {
    let det = m.det();
    if (det - 1.0).abs() > tol.det {
        return Err(Error::NotSlNormalized { det, tol: tol.det });
    }
    Ok(())
}

fn is_diagonal(m: &MatH2, tol: &Tolerances) -> bool {
    let scale = m.max_entry_norm().max(1.0);
    m.b.norm() <= tol.fix * scale && m.c.norm() <= tol.fix * scale
}

/// `2(cosh τ - cos(α + β))(1 + |bc|)` for SL-normalized `S` and `T`.
///
/// When `T` is not diagonal, both generators are first conjugated by the
/// frame of right eigenvectors of `T`. `|bc|` does not depend on which
/// diagonalizing frame is used, since diagonal conjugation multiplies `b`
/// and `c` by inverse norms.
pub fn jorgensen_elliptic_hyperbolic(s: &MatH2, t: &MatH2, tol: &Tolerances) -> Result<Certificate> {
    require_sl(s, tol)?;
    require_sl(t, tol)?;
    let test = TestName::JorgensenEllipticHyperbolic;
    let mut inputs = json!({ "S": s, "T": t });

    let reps = eigen_representatives(t, tol)?;
    inputs["lambda"] = json!(pair(reps.lambda));
    inputs["mu"] = json!(pair(reps.mu));
    if similar(reps.lambda, reps.mu, tol) {
        return Ok(Certificate::inapplicable(test, 1.0, REPEATED, inputs));
    }

    let mut notes = Vec::new();
    let (s_diag, lambda, mu) = if is_diagonal(t, tol) {
        (*s, reps.lambda, reps.mu)
    } else {
        let (frame, lambda, mu) = diagonalizing_frame(t, tol)?;
        notes.push("T conjugated to diagonal form by its eigenvector frame".to_string());
        (s.conjugate_by(&frame.inverse(tol.det)?, tol.det)?, lambda, mu)
    };

    let bc = s_diag.b.norm() * s_diag.c.norm();
    let (alpha, beta) = (arg(lambda), arg(mu));
    let tau = 2.0 * lambda.norm().ln();
    inputs["bc_norm"] = json!(bc);
    inputs["tau"] = json!(tau);
    inputs["alpha"] = json!(alpha);
    inputs["beta"] = json!(beta);

    let lhs = 2.0 * (tau.cosh() - (alpha + beta).cos()) * (1.0 + bc);
    let mut cert = Certificate::inequality(test, lhs, 1.0, tol.cert, inputs);
    cert.notes = notes;
    Ok(cert)
}

/// `|c| |μ|` against 1 for the translation `T = [[1, μ], [0, 1]]`.
pub fn shimizu_translation(s: &MatH2, t_mu: Quaternion, tol: &Tolerances) -> Certificate {
    let test = TestName::ShimizuTranslation;
    let inputs = json!({ "S": s, "mu": t_mu });
    if t_mu.is_zero() {
        return Certificate::inapplicable(test, 1.0, "T is identity", inputs);
    }
    Certificate::inequality(test, s.c.norm() * t_mu.norm(), 1.0, tol.cert, inputs)
}

/// `μ` when `m` is within `tol` of `±[[1, μ], [0, 1]]`, normalizing the sign.
pub fn translation_part(m: &MatH2, tol: f64) -> Option<Quaternion> {
    [*m, -*m].into_iter().find_map(|n| {
        let unipotent = (n.a - Quaternion::ONE).norm() <= tol
            && (n.d - Quaternion::ONE).norm() <= tol
            && n.c.norm() <= tol;
        unipotent.then_some(n.b)
    })
}

/// Checks whether `f` satisfies the hypotheses on the test map.
///
/// * 2-rotatory elliptic: `0 < at(f) < π/3`;
/// * hyperbolic: `(abt(f)² - 3) / 2 < cos(at(f))`;
/// * parabolic: `f = ±[[1, μ], [0, 1]]` in the supplied coordinates with
///   `|μ| <= 1`.
///
/// 1-rotatory elliptic elements and `±I` are inapplicable.
pub fn testmap_admissible(f: &MatH2, tol: &Tolerances) -> Result<Certificate> {
    let cls = classify(f, tol)?;
    let inputs = json!({ "f": f, "classification": cls });
    let band = tol.cert;
    Ok(match cls.kind {
        Kind::Elliptic2Rot => {
            let at = cls.at;
            let admissible = at > band && at < FRAC_PI_3 - band;
            let mut cert =
                Certificate::admissibility(TestName::TestmapElliptic, at, FRAC_PI_3, admissible, band, inputs);
            if (at - FRAC_PI_3).abs() <= band {
                cert = cert.with_note("at(f) = π/3: the limiting inequality is an equality and inconclusive");
            }
            cert
        }
        Kind::Hyperbolic => {
            let lhs = 0.5 * (cls.abt * cls.abt - 3.0);
            let threshold = cls.at.cos();
            Certificate::admissibility(
                TestName::TestmapHyperbolic,
                lhs,
                threshold,
                lhs < threshold - band,
                band,
                inputs,
            )
        }
        Kind::Parabolic => {
            let test = TestName::TestmapParabolic;
            match translation_part(f, tol.cls) {
                None => Certificate::inapplicable(
                    test,
                    1.0,
                    "parabolic test map is not of the form [[1, mu], [0, 1]] in the supplied coordinates",
                    inputs,
                ),
                Some(mu) => {
                    let lhs = mu.norm();
                    Certificate::admissibility(test, lhs, 1.0, lhs <= 1.0 + band, band, inputs)
                        .with_note(
                            "|mu| <= 1 is checked in the supplied coordinates; conjugating by \
                             diag(s, 1/s) rescales mu, so the condition is not conjugation invariant",
                        )
                }
            }
        }
        Kind::Elliptic1Rot => Certificate::inapplicable(
            TestName::TestmapElliptic,
            FRAC_PI_3,
            "1-rotatory elliptic elements are not admissible test maps",
            inputs,
        ),
        Kind::Identity => Certificate::inapplicable(
            TestName::TestmapElliptic,
            FRAC_PI_3,
            "test map is +/-I",
            inputs,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn unit(theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, theta)
    }

    #[test]
    fn general_examples() {
        let c = jorgensen_general(unit(PI / 8.0), unit(3.0 * PI / 8.0), 0.0, &tol()).unwrap();
        // 2(1 - cos(π/2))
        assert_abs_diff_eq!(c.lhs.unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(c.verdict, Verdict::Satisfied);

        let c = jorgensen_general(unit(PI / 12.0), unit(PI / 6.0), 0.0, &tol()).unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 2.0 - 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(c.verdict, Verdict::Violated);

        let c = jorgensen_general(
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, 0.5),
            0.0,
            &tol(),
        )
        .unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 6.25, epsilon = 1e-14);
        assert_eq!(c.verdict, Verdict::Satisfied);
    }

    #[test]
    fn general_inapplicable_and_invalid() {
        let c = jorgensen_general(unit(0.3), unit(-0.3), 0.0, &tol()).unwrap();
        assert_eq!(c.verdict, Verdict::Inapplicable);
        assert!(c.lhs.is_none());
        assert_eq!(c.reason.as_deref(), Some(REPEATED));
        assert!(jorgensen_general(unit(0.1), unit(0.2), -1.0, &tol()).is_err());
    }

    #[test]
    fn knife_edge_is_not_violated() {
        let c = jorgensen_general(unit(PI / 12.0), unit(PI / 4.0), 0.0, &tol()).unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 1.0, epsilon = 1e-12);
        assert_ne!(c.verdict, Verdict::Violated);
        assert!(c.at_boundary);
    }

    #[test]
    fn elliptic_hyperbolic_examples() {
        let s = MatH2::IDENTITY;
        let t = MatH2::diag_complex(unit(PI / 12.0), unit(PI / 6.0));
        let c = jorgensen_elliptic_hyperbolic(&s, &t, &tol()).unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(c.verdict, Verdict::Violated);

        let t = MatH2::diag_complex(
            Complex64::from_polar(1.05, 0.1),
            Complex64::from_polar(1.0 / 1.05, 0.1),
        );
        let c = jorgensen_elliptic_hyperbolic(&s, &t, &tol()).unwrap();
        // 2(cosh(2 ln 1.05) - cos 0.2) = 1.05² + 1.05⁻² - 2 cos 0.2
        let expected = 1.1025 + 1.0 / 1.1025 - 2.0 * 0.2f64.cos();
        assert_abs_diff_eq!(c.lhs.unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(c.lhs.unwrap(), 0.049396, epsilon = 1e-6);
        assert_eq!(c.verdict, Verdict::Violated);

        // |b||c| = 10
        let s = MatH2::new(
            Quaternion::ONE * 11f64.sqrt(),
            Quaternion::J * 2.0,
            Quaternion::K * 5.0,
            Quaternion::ONE * 11f64.sqrt(),
        );
        let s = s.sl_normalized(1e-9).unwrap();
        let bc = s.b.norm() * s.c.norm();
        let t = MatH2::diag(Quaternion::real(2.0), Quaternion::real(0.5));
        let c = jorgensen_elliptic_hyperbolic(&s, &t, &tol()).unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 2.0 * (17.0 / 8.0 - 1.0) * (1.0 + bc), epsilon = 1e-12);
        assert_eq!(c.verdict, Verdict::Satisfied);
    }

    #[test]
    fn elliptic_hyperbolic_with_exact_bc_ten() {
        // a d - a c a⁻¹ b with a = d = √11, |b| = 2, |c| = 5 and b, c
        // anticommuting with nothing in particular: det = |11 - c b|.
        let s = MatH2::new(
            Quaternion::ONE * 11f64.sqrt(),
            Quaternion::ONE * 2.0,
            Quaternion::ONE * 5.0,
            Quaternion::ONE * 11f64.sqrt(),
        );
        assert_abs_diff_eq!(s.det(), 1.0, epsilon = 1e-14);
        let t = MatH2::diag(Quaternion::real(2.0), Quaternion::real(0.5));
        let c = jorgensen_elliptic_hyperbolic(&s, &t, &tol()).unwrap();
        assert_abs_diff_eq!(c.lhs.unwrap(), 24.75, epsilon = 1e-12);
    }

    #[test]
    fn non_diagonal_generator_is_diagonalized() {
        let p = MatH2::new(
            Quaternion::new(1.0, 0.3, 0.0, -0.2),
            Quaternion::new(0.5, 0.0, 0.4, 0.0),
            Quaternion::new(0.0, -0.6, 0.2, 0.1),
            Quaternion::new(1.2, 0.0, 0.0, 0.5),
        )
        .sl_normalized(1e-9)
        .unwrap();
        let t = MatH2::diag_complex(unit(PI / 12.0), unit(PI / 6.0));
        let s = MatH2::new(
            Quaternion::ONE * 2.0,
            Quaternion::J * 0.3,
            Quaternion::K * 0.7,
            Quaternion::ONE,
        )
        .sl_normalized(1e-9)
        .unwrap();
        let direct = jorgensen_elliptic_hyperbolic(&s, &t, &tol()).unwrap();
        let moved = jorgensen_elliptic_hyperbolic(
            &s.conjugate_by(&p, 1e-9).unwrap(),
            &t.conjugate_by(&p, 1e-9).unwrap(),
            &tol(),
        )
        .unwrap();
        assert!(!moved.notes.is_empty());
        assert_eq!(direct.verdict, moved.verdict);
        assert_abs_diff_eq!(direct.lhs.unwrap(), moved.lhs.unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn shimizu_examples() {
        let s = |c: f64| MatH2::new(Quaternion::ONE, Quaternion::ZERO, Quaternion::J * c, Quaternion::ONE);
        let mu = Quaternion::real(0.5);
        let c = shimizu_translation(&s(1.0), mu, &tol());
        assert_abs_diff_eq!(c.lhs.unwrap(), 0.5);
        assert_eq!(c.verdict, Verdict::Violated);
        let c = shimizu_translation(&s(4.0), mu, &tol());
        assert_abs_diff_eq!(c.lhs.unwrap(), 2.0);
        assert_eq!(c.verdict, Verdict::Satisfied);
        let c = shimizu_translation(&s(4.0), Quaternion::ZERO, &tol());
        assert_eq!(c.verdict, Verdict::Inapplicable);
        assert_eq!(c.reason.as_deref(), Some("T is identity"));
    }

    #[test]
    fn testmap_examples() {
        let f = MatH2::diag_complex(unit(PI / 12.0), unit(PI / 6.0));
        let c = testmap_admissible(&f, &tol()).unwrap();
        assert_eq!(c.test, TestName::TestmapElliptic);
        assert_eq!(c.verdict, Verdict::Satisfied);
        assert_abs_diff_eq!(c.lhs.unwrap(), PI / 4.0, epsilon = 1e-12);

        let f = MatH2::diag(Quaternion::real(1.05), Quaternion::real(1.0 / 1.05));
        let c = testmap_admissible(&f, &tol()).unwrap();
        assert_eq!(c.test, TestName::TestmapHyperbolic);
        let abt = 1.05 + 1.0 / 1.05;
        assert_abs_diff_eq!(c.lhs.unwrap(), 0.5 * (abt * abt - 3.0), epsilon = 1e-10);
        assert_abs_diff_eq!(c.lhs.unwrap(), 0.504765, epsilon = 1e-6);
        assert_eq!(c.verdict, Verdict::Satisfied);

        let f = MatH2::translation(Quaternion::real(0.5));
        let c = testmap_admissible(&f, &tol()).unwrap();
        assert_eq!(c.test, TestName::TestmapParabolic);
        assert_eq!(c.verdict, Verdict::Satisfied);
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn testmap_rejections() {
        // λ = μ: 1-rotatory
        let f = MatH2::diag_complex(unit(PI / 4.0), unit(PI / 4.0));
        assert_eq!(testmap_admissible(&f, &tol()).unwrap().verdict, Verdict::Inapplicable);

        // at = π/2 + 0.2 > π/3
        let f = MatH2::diag_complex(unit(PI / 6.0), unit(FRAC_PI_2 - PI / 6.0 + 0.2));
        assert_eq!(testmap_admissible(&f, &tol()).unwrap().verdict, Verdict::Violated);

        // knife edge at(f) = π/3 is never admissible
        let f = MatH2::diag_complex(unit(PI / 12.0), unit(PI / 4.0));
        let c = testmap_admissible(&f, &tol()).unwrap();
        assert_eq!(c.verdict, Verdict::Violated);
        assert!(c.at_boundary);

        // strongly hyperbolic map fails the trace condition
        let f = MatH2::diag(Quaternion::real(3.0), Quaternion::real(1.0 / 3.0));
        assert_eq!(testmap_admissible(&f, &tol()).unwrap().verdict, Verdict::Violated);

        let f = MatH2::translation(Quaternion::J * 1.5);
        assert_eq!(testmap_admissible(&f, &tol()).unwrap().verdict, Verdict::Violated);

        // -I times a translation is the same isometry
        let f = -MatH2::translation(Quaternion::J * 0.5);
        assert_eq!(testmap_admissible(&f, &tol()).unwrap().verdict, Verdict::Satisfied);

        assert_eq!(
            testmap_admissible(&MatH2::IDENTITY, &tol()).unwrap().verdict,
            Verdict::Inapplicable
        );
    }

    #[test]
    fn certificate_json_fields() {
        let c = jorgensen_general(unit(PI / 12.0), unit(PI / 6.0), 0.0, &tol()).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        for key in ["test", "verdict", "lhs", "threshold", "margin", "at_boundary", "inputs"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["test"], "jorgensen_general");
        assert_eq!(v["verdict"], "violated");
    }
}
