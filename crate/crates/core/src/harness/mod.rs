//! Seeded replay of the limit arguments: a hyperbolic `g` fixing `z₀`, a
//! test map `f`, and a sequence `hₙ → h` of perturbed conjugators.
//!
//! Each trial draws `g` and a perturbation direction `Δ` from its own
//! ChaCha stream, so trials can run in parallel without changing the output.

mod proof;
mod sampling;

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jorgensen::{
    jorgensen_elliptic_hyperbolic, shimizu_translation, testmap_admissible, translation_part, Certificate,
    Verdict,
};
use crate::matrix::MatH2;
use crate::mobius::{apply, classify, fixed_points, BoundaryPoint, Kind};
use crate::quaternion::{Complex64, Quaternion};
use crate::tolerance::Tolerances;

pub use proof::{
    build_ln, conjugator_h, conjugator_h_inverse, conjugator_u, conjugator_u_inverse, h_conjugate_closed_form,
    u_conjugate_closed_form, verify_offdiag_vanishing, VanishingRecord,
};
pub use sampling::{
    gaussian_matrix, gaussian_quaternion, gaussian_sl2h, sample_hyperbolic_fixing, sample_sl2h,
    sample_sl2h_seeded, trial_rng, SampleDistribution, MIN_RAW_DET,
};

/// Slack allowed in the `m(2k) <= m(k)` monotonicity diagnostic.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Smallest accepted `r(N/2) / r(N)` for the limit residual `r`. First order
/// perturbation theory gives 2; the quadratic terms move it slightly.
pub const MIN_HALVING_RATIO: f64 = 1.5;
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Thm1Elliptic,
    Thm1Hyperbolic,
    Thm1Parabolic,
    Thm2Elliptic,
    Thm2Hyperbolic,
    Thm2Parabolic,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Thm1Elliptic,
        Mode::Thm1Hyperbolic,
        Mode::Thm1Parabolic,
        Mode::Thm2Elliptic,
        Mode::Thm2Hyperbolic,
        Mode::Thm2Parabolic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Thm1Elliptic => "thm1_elliptic",
            Mode::Thm1Hyperbolic => "thm1_hyperbolic",
            Mode::Thm1Parabolic => "thm1_parabolic",
            Mode::Thm2Elliptic => "thm2_elliptic",
            Mode::Thm2Hyperbolic => "thm2_hyperbolic",
            Mode::Thm2Parabolic => "thm2_parabolic",
        }
    }

    /// Monitors `Lₙ = kₙ f kₙ⁻¹` rather than `kₙ = hₙ g hₙ⁻¹` itself.
    pub fn uses_ln(&self) -> bool {
        matches!(self, Mode::Thm2Elliptic | Mode::Thm2Hyperbolic | Mode::Thm2Parabolic)
    }

    pub fn is_parabolic(&self) -> bool {
        matches!(self, Mode::Thm1Parabolic | Mode::Thm2Parabolic)
    }

    /// The kind `f` must have.
    pub fn test_map_kind(&self) -> Kind {
        match self {
            Mode::Thm1Elliptic | Mode::Thm2Elliptic => Kind::Elliptic2Rot,
            Mode::Thm1Hyperbolic | Mode::Thm2Hyperbolic => Kind::Hyperbolic,
            Mode::Thm1Parabolic | Mode::Thm2Parabolic => Kind::Parabolic,
        }
    }

    /// `diag(e^{iπ/12}, e^{iπ/6})`, `diag(1.05e^{0.1i}, 1.05⁻¹e^{0.1i})` or
    /// `[[1, 0.5], [0, 1]]`.
    pub fn default_test_map(&self) -> MatH2 {
        match self.test_map_kind() {
            Kind::Elliptic2Rot => {
                MatH2::diag_complex(Complex64::from_polar(1.0, PI / 12.0), Complex64::from_polar(1.0, PI / 6.0))
            }
            Kind::Hyperbolic => {
                MatH2::diag_complex(Complex64::from_polar(1.05, 0.1), Complex64::from_polar(1.05f64.recip(), 0.1))
            }
            _ => MatH2::translation(Quaternion::real(0.5)),
        }
    }

    /// `h` sends `z₀` to 0 (elliptic and hyperbolic modes); `u` sends it to
    /// ∞ (parabolic modes).
    pub fn conjugator(&self, z0: Quaternion) -> Result<MatH2> {
        if self.is_parabolic() {
            conjugator_u(z0)
        } else {
            conjugator_h(z0)
        }
    }

    fn forbidden_image(&self) -> BoundaryPoint {
        if self.is_parabolic() {
            BoundaryPoint::INFINITY
        } else {
            BoundaryPoint::Finite(Quaternion::ZERO)
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    /// `N`: the sequence runs over `n = 1..=N`.
    pub sequence_length: usize,
    /// `ε₀`: `hₙ = h + (ε₀/n) Δ` before normalization.
    pub perturbation_scale: f64,
    pub z0: Quaternion,
    /// `|λ| >= 1 + margin` for the sampled hyperbolic `g`.
    pub hyperbolic_margin: f64,
    /// Replaces the mode's default test map.
    pub test_map: Option<MatH2>,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1,
            sequence_length: 64,
            perturbation_scale: 0.1,
            z0: Quaternion::new(1.0, 1.0, 0.0, 0.0),
            hyperbolic_margin: 0.05,
            test_map: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.sequence_length == 0 {
            return Err(Error::InvalidInput("trials and sequence_length must be positive".into()));
        }
        if !(self.perturbation_scale > 0.0 && self.perturbation_scale.is_finite()) {
            return Err(Error::InvalidInput("perturbation_scale must be positive".into()));
        }
        if !(self.hyperbolic_margin > 0.0) {
            return Err(Error::InvalidInput("hyperbolic_margin must be positive".into()));
        }
        if self.z0.is_zero() || !self.z0.is_finite() {
            return Err(Error::InvalidInput("z0 must be finite and nonzero".into()));
        }
        Ok(())
    }
}

/// One line of the JSONL output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub trial: usize,
    pub n: usize,
    /// `hₙ g hₙ⁻¹` (thm1 modes) or `Lₙ` (thm2 modes).
    pub matrix: MatH2,
    /// `|bₙ||cₙ|` or `|cₙ|` of `matrix`.
    pub monitored: f64,
    pub certificate: Certificate,
    /// `f` and `matrix` share a boundary fixed point.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub possibly_elementary: bool,
}

/// The same quantities at the exact conjugator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRecord {
    pub matrix: MatH2,
    pub monitored: f64,
    /// `tol.identity` scaled by the entry norms of `matrix`.
    pub bound: f64,
    pub certificate: Certificate,
    pub possibly_elementary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub g: MatH2,
    /// `Δ`, rescaled to unit max entry norm.
    pub perturbation: MatH2,
    /// Times `Δ` was redrawn because some `hₙ(z₀)` hit the point the exact
    /// conjugator sends `z₀` to.
    pub redraws: usize,
    pub fixed_points_g: Vec<BoundaryPoint>,
    pub records: Vec<SequenceRecord>,
    pub limit: LimitRecord,
    /// Smallest `n*` such that every certificate with `n >= n*` is violated.
    pub violation_index: Option<usize>,
    /// Smallest `k` from which `m(2k) <= m(k) + MONOTONE_SLACK` holds.
    pub burn_in: Option<usize>,
    /// `r(N/2) / r(N)` with `r(n) = |m(n) - m(∞)|`.
    pub halving_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub mode: Mode,
    pub config: ExperimentConfig,
    pub f: MatH2,
    pub conjugator: MatH2,
    pub admissibility: Certificate,
    pub fixed_points_f: Vec<BoundaryPoint>,
    /// Hypotheses taken as given rather than checked.
    pub assumptions: Vec<String>,
    pub trials: Vec<TrialReport>,
}

impl SequenceReport {
    pub fn records(&self) -> impl Iterator<Item = &SequenceRecord> {
        self.trials.iter().flat_map(|t| t.records.iter())
    }

    /// Writes one JSON object per `(trial, n)`, sorted.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut records: Vec<&SequenceRecord> = self.records().collect();
        records.sort_by_key(|r| (r.trial, r.n));
        for r in records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }
}

fn assumptions(mode: Mode) -> Vec<String> {
    let mut out = vec![
        "G is assumed non-discrete and Zariski dense, so that a sequence h_n -> h exists in G; \
         the sequence used here is an explicit perturbation and is not checked to lie in any group"
            .to_string(),
        "h_n(z0) is kept away from h(z0) by rejection at every index; this is a numerical check, \
         not a construction"
            .to_string(),
        "verdict satisfied never certifies discreteness; possibly_elementary is a shared fixed point \
         heuristic only"
            .to_string(),
    ];
    if mode.is_parabolic() {
        out.push("|mu| <= 1 is checked in the coordinates of f as supplied".to_string());
    }
    out
}

/// Checks `f` against the mode and the admissibility predicate.
pub fn admissible_test_map(mode: Mode, f: &MatH2, tol: &Tolerances) -> Result<Certificate> {
    let reject = |reason: String| Error::InadmissibleTestMap {
        mode: mode.to_string(),
        reason,
    };
    let kind = classify(f, tol)?.kind;
    if kind != mode.test_map_kind() {
        return Err(reject(format!(
            "test map is {}, mode needs {}",
            kind.as_str(),
            mode.test_map_kind().as_str()
        )));
    }
    let cert = testmap_admissible(f, tol)?;
    if cert.verdict != Verdict::Satisfied {
        return Err(reject(
            cert.reason
                .clone()
                .unwrap_or_else(|| format!("admissibility value {:?} against {}", cert.lhs, cert.threshold)),
        ));
    }
    Ok(cert)
}

struct Context {
    mode: Mode,
    f: MatH2,
    mu: Option<Quaternion>,
    fixed_f: Vec<BoundaryPoint>,
    conjugator: MatH2,
}

impl Context {
    fn monitored_matrix(&self, g: &MatH2, hn: &MatH2, tol: &Tolerances) -> Result<MatH2> {
        if self.mode.uses_ln() {
            build_ln(&self.f, g, hn, tol)
        } else {
            g.conjugate_by(hn, tol.det)
        }
    }

    fn monitored(&self, m: &MatH2) -> f64 {
        if self.mode.is_parabolic() {
            m.c.norm()
        } else {
            m.b.norm() * m.c.norm()
        }
    }

    fn certificate(&self, m: &MatH2, tol: &Tolerances) -> Result<Certificate> {
        match self.mu {
            Some(mu) => Ok(shimizu_translation(m, mu, tol)),
            None => jorgensen_elliptic_hyperbolic(m, &self.f, tol),
        }
    }

    fn shares_fixed_point(&self, m: &MatH2, tol: &Tolerances) -> Result<bool> {
        let merge = tol.fix.sqrt();
        let points = match fixed_points(m, tol) {
            Ok(p) => p,
            Err(Error::NoIsolatedFixedPoints) => return Ok(true),
            Err(e) => return Err(e),
        };
        Ok(points
            .iter()
            .any(|p| self.fixed_f.iter().any(|q| p.approx_eq(q, merge))))
    }
}

fn unit_direction<R: rand::Rng + ?Sized>(rng: &mut R) -> MatH2 {
    loop {
        let d = gaussian_matrix(rng, 1.0);
        let s = d.max_entry_norm();
        if s > 0.0 {
            return d.scale(s.recip());
        }
    }
}

fn first_index_of_tail(records: &[SequenceRecord]) -> Option<usize> {
    let tail = records.iter().rev().take_while(|r| r.certificate.is_violated()).count();
    (tail > 0).then(|| records[records.len() - tail].n)
}

/// Smallest `k` such that `m(2j) <= m(j) + slack` for all `j >= k` with
/// `2j <= N`. `None` when `N < 2` or the last pair already fails.
pub fn burn_in(monitored: &[f64], slack: f64) -> Option<usize> {
    let n_max = monitored.len();
    let m = |n: usize| monitored[n - 1];
    let mut k = None;
    for j in (1..=n_max / 2).rev() {
        if m(2 * j) <= m(j) + slack {
            k = Some(j);
        } else {
            break;
        }
    }
    k
}

fn run_trial(ctx: &Context, config: &ExperimentConfig, trial: usize) -> Result<TrialReport> {
    let tol = &config.tolerances;
    let mut rng = trial_rng(config.seed, trial as u64);
    let z0 = BoundaryPoint::Finite(config.z0);
    let g = sample_hyperbolic_fixing(&mut rng, &z0, config.hyperbolic_margin, tol)?;
    let forbidden = ctx.mode.forbidden_image();

    let mut redraws = 0;
    let (perturbation, sequence) = 'draw: loop {
        let delta = unit_direction(&mut rng);
        let mut sequence = Vec::with_capacity(config.sequence_length);
        for n in 1..=config.sequence_length {
            let step = config.perturbation_scale / n as f64;
            let raw = MatH2::new(
                ctx.conjugator.a + delta.a * step,
                ctx.conjugator.b + delta.b * step,
                ctx.conjugator.c + delta.c * step,
                ctx.conjugator.d + delta.d * step,
            );
            let hn = match raw.sl_normalized(MIN_RAW_DET) {
                Ok(h) => h,
                Err(_) => {
                    redraws += 1;
                    if redraws > MAX_REDRAWS {
                        return Err(Error::InvalidInput("perturbed conjugator keeps degenerating".into()));
                    }
                    continue 'draw;
                }
            };
            if apply(&hn, &z0, tol)?.approx_eq(&forbidden, tol.fix) {
                redraws += 1;
                if redraws > MAX_REDRAWS {
                    return Err(Error::InvalidInput("h_n(z0) keeps hitting h(z0)".into()));
                }
                continue 'draw;
            }
            sequence.push(hn);
        }
        break (delta, sequence);
    };

    let mut records = Vec::with_capacity(sequence.len());
    for (i, hn) in sequence.iter().enumerate() {
        let matrix = ctx.monitored_matrix(&g, hn, tol)?;
        records.push(SequenceRecord {
            trial,
            n: i + 1,
            matrix,
            monitored: ctx.monitored(&matrix),
            certificate: ctx.certificate(&matrix, tol)?,
            possibly_elementary: ctx.shares_fixed_point(&matrix, tol)?,
        });
    }

    let limit_matrix = ctx.monitored_matrix(&g, &ctx.conjugator, tol)?;
    let limit_monitored = ctx.monitored(&limit_matrix);
    let s = limit_matrix.max_entry_norm().max(1.0);
    let bound = tol.identity * if ctx.mode.is_parabolic() { s } else { s * s };
    if limit_monitored > bound {
        return Err(Error::IdentityViolated {
            residual: limit_monitored,
            bound,
        });
    }
    let limit_certificate = ctx.certificate(&limit_matrix, tol)?;
    if !limit_certificate.is_violated() {
        return Err(Error::LimitNotViolated {
            lhs: limit_certificate.lhs.unwrap_or(f64::NAN),
            threshold: limit_certificate.threshold,
        });
    }
    let limit = LimitRecord {
        matrix: limit_matrix,
        monitored: limit_monitored,
        bound,
        possibly_elementary: ctx.shares_fixed_point(&limit_matrix, tol)?,
        certificate: limit_certificate,
    };

    let monitored: Vec<f64> = records.iter().map(|r| r.monitored).collect();
    let n_max = monitored.len();
    let halving_ratio = if n_max >= 2 {
        let half = n_max / 2;
        let r_half = (monitored[half - 1] - limit.monitored).abs();
        let r_full = (monitored[n_max - 1] - limit.monitored).abs();
        if r_half == 0.0 && r_full == 0.0 {
            None
        } else {
            let ratio = r_half / r_full;
            if ratio < MIN_HALVING_RATIO {
                return Err(Error::SequenceDiverged {
                    half,
                    full: n_max,
                    at_half: monitored[half - 1],
                    at_full: monitored[n_max - 1],
                });
            }
            Some(ratio)
        }
    } else {
        None
    };

    Ok(TrialReport {
        trial,
        g,
        perturbation,
        redraws,
        fixed_points_g: fixed_points(&g, tol)?,
        violation_index: first_index_of_tail(&records),
        burn_in: burn_in(&monitored, MONOTONE_SLACK),
        halving_ratio,
        records,
        limit,
    })
}

/// Runs `config.trials` independent trials in parallel.
pub fn run_testmap_experiment(config: &ExperimentConfig, mode: Mode) -> Result<SequenceReport> {
    config.validate()?;
    let tol = &config.tolerances;
    let f = config.test_map.unwrap_or_else(|| mode.default_test_map());
    let admissibility = admissible_test_map(mode, &f, tol)?;
    let mu = if mode.is_parabolic() {
        Some(translation_part(&f, tol.cls).ok_or_else(|| Error::InadmissibleTestMap {
            mode: mode.to_string(),
            reason: "parabolic test map is not a translation".into(),
        })?)
    } else {
        None
    };
    let ctx = Context {
        mode,
        f,
        mu,
        fixed_f: fixed_points(&f, tol)?,
        conjugator: mode.conjugator(config.z0)?,
    };

    let trials = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(&ctx, config, t))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    Ok(SequenceReport {
        mode,
        config: config.clone(),
        f,
        conjugator: ctx.conjugator,
        admissibility,
        fixed_points_f: ctx.fixed_f,
        assumptions: assumptions(mode),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            seed: 11,
            trials,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("thm3".parse::<Mode>().is_err());
    }

    #[test]
    fn default_test_maps_are_admissible() {
        let tol = Tolerances::default();
        for m in Mode::ALL {
            admissible_test_map(m, &m.default_test_map(), &tol).unwrap();
        }
    }

    #[test]
    fn wrong_kind_or_inadmissible_test_map() {
        let tol = Tolerances::default();
        let f = Mode::Thm1Hyperbolic.default_test_map();
        assert!(matches!(
            admissible_test_map(Mode::Thm1Elliptic, &f, &tol),
            Err(Error::InadmissibleTestMap { .. })
        ));
        let wide = MatH2::diag_complex(Complex64::from_polar(1.0, 0.1), Complex64::from_polar(1.0, 1.2));
        assert!(matches!(
            admissible_test_map(Mode::Thm2Elliptic, &wide, &tol),
            Err(Error::InadmissibleTestMap { .. })
        ));
        let long = MatH2::translation(Quaternion::real(1.5));
        assert!(admissible_test_map(Mode::Thm1Parabolic, &long, &tol).is_err());
    }

    #[test]
    fn elliptic_limit_value() {
        let report = run_testmap_experiment(&config(2), Mode::Thm1Elliptic).unwrap();
        for t in &report.trials {
            let lhs = t.limit.certificate.lhs.unwrap();
            assert!((lhs - 2.0 * (1.0 - (PI / 4.0).cos())).abs() < 1e-8);
            assert!(t.limit.monitored <= t.limit.bound);
            assert!(t.violation_index.is_some());
            assert_eq!(t.records.len(), 64);
            assert!(t.limit.possibly_elementary);
        }
    }

    #[test]
    fn parabolic_violation_once_c_is_small() {
        let report = run_testmap_experiment(&config(3), Mode::Thm1Parabolic).unwrap();
        for r in report.records() {
            assert_eq!(r.certificate.is_violated(), r.monitored * 0.5 < 1.0 - 1e-10);
        }
    }

    #[test]
    fn burn_in_diagnostic() {
        assert_eq!(burn_in(&[4.0, 2.0, 1.5, 1.0], 0.0), Some(1));
        assert_eq!(burn_in(&[1.0, 2.0, 1.5, 1.0], 0.0), Some(2));
        assert_eq!(burn_in(&[1.0, 2.0, 1.5, 3.0], 0.0), None);
        assert_eq!(burn_in(&[1.0], 0.0), None);
    }

    #[test]
    fn invalid_config() {
        let mut c = config(1);
        c.trials = 0;
        assert!(run_testmap_experiment(&c, Mode::Thm1Elliptic).is_err());
        let mut c = config(1);
        c.z0 = Quaternion::ZERO;
        assert!(run_testmap_experiment(&c, Mode::Thm1Elliptic).is_err());
    }

    #[test]
    fn jsonl_sorted_and_deterministic() {
        let a = run_testmap_experiment(&config(4), Mode::Thm2Parabolic).unwrap();
        let b = run_testmap_experiment(&config(4), Mode::Thm2Parabolic).unwrap();
        let (mut out_a, mut out_b) = (Vec::new(), Vec::new());
        a.write_jsonl(&mut out_a).unwrap();
        b.write_jsonl(&mut out_b).unwrap();
        assert_eq!(out_a, out_b);
        let lines: Vec<serde_json::Value> = std::str::from_utf8(&out_a)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 4 * 64);
        assert_eq!(lines[0]["trial"], 0);
        assert_eq!(lines[0]["n"], 1);
        assert_eq!(lines[64]["trial"], 1);
        for key in ["trial", "n", "matrix", "monitored", "certificate"] {
            assert!(lines[5].get(key).is_some(), "{key}");
        }
    }
}
