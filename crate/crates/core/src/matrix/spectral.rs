//! Spectral data of a quaternionic 2×2 matrix read off its complex embedding.
//!
//! The embedding's spectrum is `{λ, λ̄, μ, μ̄}`. A null vector `v` of
//! `embed(M) - λ` is the first column of `embed(V)` for a quaternion vector
//! `V = (V₁, V₂)` with `M V = V λ`, so eigenvectors of the embedding are
//! right eigenvectors of `M`, and `V₁ V₂⁻¹` is a boundary fixed point.

use nalgebra::{Matrix4, Vector4};

use super::MatH2;
use crate::error::{Error, Result};
use crate::quaternion::{Complex64, Quaternion};
use crate::tolerance::Tolerances;

/// Similarity-class representatives `(λ, μ)` with `Im ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRepresentatives {
    /// Larger modulus; argument ascending on modulus ties.
    pub lambda: Complex64,
    pub mu: Complex64,
    pub diagonalizable: bool,
    /// `λ` and `μ` lie within 1e-6 of each other, so the pairing of the four
    /// embedding eigenvalues is a convention rather than forced.
    pub near_degenerate: bool,
}

const NEAR_DEGENERATE: f64 = 1e-6;

fn scale_of(a: &Matrix4<Complex64>) -> f64 {
    a.norm().max(1.0)
}

fn shifted(a: &Matrix4<Complex64>, ev: Complex64) -> Matrix4<Complex64> {
    a - Matrix4::from_diagonal_element(ev)
}

/// Singular values and right singular vectors of `a - ev`, ascending.
fn null_directions(a: &Matrix4<Complex64>, ev: Complex64) -> Result<Vec<(f64, Vector4<Complex64>)>> {
    let svd = shifted(a, ev).svd(false, true);
    let v_t = svd.v_t.ok_or(Error::Eigen("SVD did not return right singular vectors"))?;
    let mut out: Vec<_> = (0..4)
        .map(|k| {
            let v: Vector4<Complex64> = v_t.row(k).transpose().map(|z| z.conj());
            (svd.singular_values[k], v)
        })
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(out)
}

/// Reads a vector of ℂ⁴ as the quaternion pair whose embedding has it as
/// first column: `(z₁, -w̄₁, z₂, -w̄₂) ↦ (z₁ + w₁ j, z₂ + w₂ j)`.
pub(crate) fn symplectic_vector(v: &Vector4<Complex64>) -> (Quaternion, Quaternion) {
    (
        Quaternion::from_symplectic(v[0], -v[1].conj()),
        Quaternion::from_symplectic(v[2], -v[3].conj()),
    )
}

fn embedding_spectrum(m: &MatH2, tol: &Tolerances) -> Result<(Matrix4<Complex64>, [Complex64; 4])> {
    let det = m.det();
    if !(det > tol.det) {
        return Err(Error::Singular { det });
    }
    let e = m.embed();
    let ev = e
        .eigenvalues()
        .ok_or(Error::Eigen("Schur decomposition did not converge"))?;
    Ok((e.0, ev))
}

/// Groups eigenvalues closer than `radius` (transitively).
fn clusters(ev: &[Complex64; 4], radius: f64) -> Vec<Vec<usize>> {
    let mut label = [0usize, 1, 2, 3];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (ev[i] - ev[j]).norm() <= radius {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, l) in label.iter().enumerate() {
        match out.iter_mut().find(|g| label[g[0]] == *l) {
            Some(g) => g.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

fn fold(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im.abs())
}

/// Eigenvalues of `embed(M)` with defective clusters snapped to their
/// centroid, plus the diagonalizability verdict.
///
/// Eigenvalue clusters (within `tol.cls`, scaled) are tested by comparing
/// their size to the nullity of `embed(M) - c` at relative singular-value
/// floor `tol.rank`. The centroid of a defective cluster is far more
/// accurate than the individual perturbed eigenvalues of a Jordan block.
struct RefinedSpectrum {
    embedding: Matrix4<Complex64>,
    eigenvalues: [Complex64; 4],
    diagonalizable: bool,
    scale: f64,
}

fn refined_spectrum(m: &MatH2, tol: &Tolerances) -> Result<RefinedSpectrum> {
    let (a, mut ev) = embedding_spectrum(m, tol)?;
    let scale = scale_of(&a);

    let mut diagonalizable = true;
    for group in clusters(&ev, tol.cls * scale) {
        if group.len() < 2 {
            continue;
        }
        let centroid = group.iter().map(|&i| ev[i]).sum::<Complex64>() / group.len() as f64;
        let nullity = null_directions(&a, centroid)?
            .iter()
            .filter(|(s, _)| *s <= tol.rank * scale)
            .count();
        if nullity < group.len() {
            diagonalizable = false;
            for &i in &group {
                ev[i] = centroid;
            }
        }
    }
    Ok(RefinedSpectrum {
        embedding: a,
        eigenvalues: ev,
        diagonalizable,
        scale,
    })
}

/// Computes `(λ, μ)` from the four eigenvalues of `embed(M)`.
pub fn eigen_representatives(m: &MatH2, tol: &Tolerances) -> Result<EigenRepresentatives> {
    let RefinedSpectrum {
        eigenvalues: ev,
        diagonalizable,
        ..
    } = refined_spectrum(m, tol)?;

    // Pair the folded eigenvalues; of the three possible pairings take the
    // tightest one.
    let f = ev.map(fold);
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    let cost = |((i, j), (k, l)): ((usize, usize), (usize, usize))| {
        (f[i] - f[j]).norm() + (f[k] - f[l]).norm()
    };
    let ((i, j), (k, l)) = pairings
        .into_iter()
        .min_by(|p, q| cost(*p).total_cmp(&cost(*q)))
        .expect("three pairings");
    let r1 = (f[i] + f[j]) * 0.5;
    let r2 = (f[k] + f[l]) * 0.5;

    let (lambda, mu) = order_pair(r1, r2, tol.cls);
    Ok(EigenRepresentatives {
        lambda,
        mu,
        diagonalizable,
        near_degenerate: (lambda - mu).norm() <= NEAR_DEGENERATE,
    })
}

/// Modulus descending; within `tie` of equal modulus, argument ascending.
fn order_pair(r1: Complex64, r2: Complex64, tie: f64) -> (Complex64, Complex64) {
    let (m1, m2) = (r1.norm(), r2.norm());
    let first_is_r1 = if (m1 - m2).abs() > tie {
        m1 > m2
    } else {
        r1.arg() <= r2.arg()
    };
    if first_is_r1 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Right eigenvectors `(V₁, V₂)` of `M` paired with the complex eigenvalue
/// they belong to, over every eigenvalue of the embedding.
///
/// Each eigenvalue contributes its best null direction plus any further
/// direction whose singular value is below the rank floor.
pub(crate) fn eigenvector_points(
    m: &MatH2,
    tol: &Tolerances,
) -> Result<Vec<(Complex64, Quaternion, Quaternion)>> {
    let RefinedSpectrum {
        embedding: a,
        eigenvalues: ev,
        scale,
        ..
    } = refined_spectrum(m, tol)?;
    let mut out = Vec::new();
    for z in ev {
        for (idx, (s, v)) in null_directions(&a, z)?.into_iter().enumerate() {
            if idx > 0 && s > tol.rank * scale {
                break;
            }
            let (v1, v2) = symplectic_vector(&v);
            out.push((z, v1, v2));
        }
    }
    Ok(out)
}

/// A frame `P` (SL-normalized) and complex `λ, μ` with `P⁻¹ T P = diag(λ, μ)`.
///
/// Requires `λ` not similar to `μ`; the columns of `P` are right
/// eigenvectors of `T` for `λ` and `μ`.
pub fn diagonalizing_frame(t: &MatH2, tol: &Tolerances) -> Result<(MatH2, Complex64, Complex64)> {
    let reps = eigen_representatives(t, tol)?;
    let (lambda, mu) = (reps.lambda, reps.mu);
    if Quaternion::from(lambda).is_similar(mu.into(), tol.sim) {
        return Err(Error::InvalidInput(
            "diagonalizing frame needs non-similar eigenvalues".into(),
        ));
    }
    let a = t.embed().0;
    let column = |ev: Complex64| -> Result<(Quaternion, Quaternion)> {
        let dirs = null_directions(&a, ev)?;
        Ok(symplectic_vector(&dirs[0].1))
    };
    let (v1, v2) = column(lambda)?;
    let (w1, w2) = column(mu)?;
    let p = MatH2::new(v1, w1, v2, w2).sl_normalized(tol.det)?;
    Ok((p, lambda, mu))
}
