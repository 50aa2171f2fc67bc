//! Seeded batch runner over the invariant checks.
//!
//! Each trial draws from its own stream `stream(seed, check, dim, trial)`, so
//! adding trials or checks never changes earlier draws. Trials run in
//! parallel and are gathered by index before the report is assembled.

use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximation;
use crate::conjugation;
use crate::decomposition;
use crate::error::{Error, Result};
use crate::jordan_mult;
use crate::linalg::{self, C64, RMat, RVec};
use crate::random::{self, TrialRng};
use crate::sc_space::{self, ScElement};
use crate::structure;

pub const SCHEMA: &str = "sc-jordan/suite-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Check identifiers with the smallest dimension each accepts.
pub const CHECKS: &[(&str, usize)] = &[
    ("conjugation", 1),
    ("takagi", 1),
    ("wvn", 2),
    ("wvn_diagonalize", 2),
    ("lspec", 2),
    ("jordan_norm", 1),
    ("sylvester", 2),
    ("roberts", 2),
    ("duality", 1),
    ("automorphism", 2),
    ("invertible", 2),
    ("path", 2),
    ("generation", 2),
    ("normality", 2),
    ("irreducible", 2),
];

fn default_dims() -> Vec<usize> {
    vec![4]
}
fn default_trials() -> usize {
    10
}
fn default_seed() -> u64 {
    7
}
fn default_checks() -> Vec<String> {
    CHECKS.iter().map(|(id, _)| id.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tol_override: Option<f64>,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    /// Not echoed into the report, so the same run written to two paths is
    /// byte-identical.
    #[serde(default, skip_serializing)]
    pub output_path: Option<PathBuf>,
    /// Record wall-clock time per check. Off by default so that reports are
    /// byte-identical across runs.
    #[serde(default)]
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dims: default_dims(),
            trials: default_trials(),
            seed: default_seed(),
            tol_override: None,
            checks: default_checks(),
            output_path: None,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Ok(());
        }
        if self.dims.is_empty() {
            return Err(Error::BadConfig("dims must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::BadConfig("trials must be at least 1".into()));
        }
        if let Some(t) = self.tol_override {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::BadConfig(format!("tol_override must be positive, got {t}")));
            }
        }
        for id in &self.checks {
            let min_dim = CHECKS
                .iter()
                .find(|(name, _)| name == id)
                .map(|(_, d)| *d)
                .ok_or_else(|| Error::BadConfig(format!("unknown check `{id}`")))?;
            if let Some(&d) = self.dims.iter().find(|&&d| d < min_dim) {
                return Err(Error::BadConfig(format!("check `{id}` needs n >= {min_dim}, got {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub dim: usize,
    pub trials: usize,
    pub passes: usize,
    pub passed: bool,
    /// Largest normalized residual; a trial passes when this is at most `tolerance`.
    pub worst_residual: f64,
    pub tolerance: f64,
    /// Measured quantity and its theoretical bound at the tightest trial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub schema_version: u32,
    pub version: String,
    pub config: SuiteConfig,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy)]
struct Trial {
    residual: f64,
    /// Structural condition independent of the residual tolerance.
    ok: bool,
    measured: Option<(f64, f64)>,
}

impl Trial {
    fn residual(residual: f64) -> Self {
        Trial { residual, ok: true, measured: None }
    }

    fn require(mut self, ok: bool) -> Self {
        self.ok &= ok;
        self
    }

    fn measure(mut self, value: f64, bound: f64) -> Self {
        self.measured = Some((value, bound));
        self
    }
}

/// Default residual tolerance of each check.
fn default_tolerance(check: &str) -> f64 {
    match check {
        "lspec" => 1e-7,
        "sylvester" | "duality" | "path" => 1e-8,
        "roberts" | "jordan_norm" | "invertible" => 1e-10,
        _ => 1e-9,
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut records = Vec::new();
    for id in &config.checks {
        let tolerance = config.tol_override.unwrap_or_else(|| default_tolerance(id));
        for &dim in &config.dims {
            let start = Instant::now();
            let outcomes: Vec<Result<Trial>> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = random::stream(config.seed, id, dim, trial);
                    run_trial(id, dim, &mut rng)
                })
                .collect();
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let mut passes = 0;
            let mut worst = 0.0f64;
            let mut tightest: Option<(f64, f64)> = None;
            for outcome in outcomes {
                let t = outcome?;
                if t.ok && t.residual <= tolerance {
                    passes += 1;
                }
                worst = worst.max(if t.residual.is_nan() { f64::MAX } else { t.residual.min(f64::MAX) });
                if let Some((value, bound)) = t.measured {
                    let ratio = |(v, b): (f64, f64)| if b > 0.0 { v / b } else { v };
                    if tightest.is_none_or(|prev| ratio((value, bound)) > ratio(prev)) {
                        tightest = Some((value, bound));
                    }
                }
            }
            records.push(CheckRecord {
                check: id.clone(),
                dim,
                trials: config.trials,
                passes,
                passed: passes == config.trials,
                worst_residual: worst,
                tolerance,
                measured: tightest.map(|m| m.0),
                bound: tightest.map(|m| m.1),
                elapsed_ms: config.timing.then_some(elapsed),
            });
        }
    }
    Ok(SuiteReport {
        schema: SCHEMA.into(),
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        passed: records.iter().all(|r| r.passed),
        records,
    })
}

fn run_trial(check: &str, n: usize, rng: &mut TrialRng) -> Result<Trial> {
    let c = random::random_conjugation(n, rng);
    match check {
        "conjugation" => {
            let b = c.fixed_basis();
            let fixed = (b - c.matrix() * linalg::conj(b)).norm();
            let d = random::random_conjugation(n, rng);
            let mid = conjugation::conjugation_path(&c, &d, 0.5)?;
            let end = conjugation::conjugation_path(&c, &d, 1.0)?;
            let end_gap = (end.matrix() - d.matrix()).norm();
            let sym = (mid.matrix() - mid.matrix().transpose()).norm();
            let unit = linalg::unitarity_residual(mid.matrix());
            Ok(Trial::residual(fixed.max(end_gap).max(sym).max(unit) / n as f64))
        }
        "takagi" => {
            let t = random::random_sc(&c, rng);
            let scale = t.matrix().norm();
            let polar = decomposition::refined_polar(&t);
            Ok(Trial::residual(polar.factor_residual(&t).max(polar.commute_residual()) / scale))
        }
        "wvn" => {
            let t = random::random_selfadjoint_sc(&c, rng);
            let e = random::unit_vector(n, rng);
            let intervals = 8;
            let cert = approximation::wvn_perturbation(&t, &e, intervals, 2.0)?;
            let residual = [
                cert.k_selfadjoint_residual,
                cert.ckc_residual,
                cert.commute_residual,
                cert.cpc_residual,
                cert.e_residual,
                cert.reduces_c_residual,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok(Trial::residual(residual)
                .require(cert.measured_norm <= cert.bound && cert.rank_p as u64 <= 2 * intervals)
                .measure(cert.measured_norm, cert.bound))
        }
        "wvn_diagonalize" => {
            let t = random::random_selfadjoint_sc(&c, rng);
            let eps = 0.1;
            let out = approximation::wvn_diagonalize(&t, eps, 2.0)?;
            let membership = sc_space::membership_residual(out.d.matrix(), &c);
            let basis = &out.eigenbasis;
            let diag = linalg::to_complex(&RMat::from_diagonal(&RVec::from_column_slice(&out.eigenvalues)));
            let recon = (basis * diag * basis.adjoint() - out.d.matrix()).norm();
            Ok(Trial::residual(membership.max(recon) / (1.0 + t.matrix().norm()))
                .require(out.distance < eps)
                .measure(out.distance, eps))
        }
        "lspec" => {
            let t = random::random_sc(&c, rng);
            let cmp = jordan_mult::compare_spectrum(&t);
            Ok(Trial::residual(cmp.multiset_distance / (1.0 + cmp.t_norm)))
        }
        "jordan_norm" => {
            let t = random::random_sc(&c, rng);
            let report = jordan_mult::norm_check(&t, 8, rng)?;
            let excess = (report.max_ratio - report.t_norm).max(0.0);
            let attain = (report.at_identity - report.t_norm).abs();
            Ok(Trial::residual(excess.max(attain) / report.t_norm.max(1.0))
                .measure(report.max_ratio, report.t_norm))
        }
        "sylvester" => {
            let eig: Vec<C64> = (0..n)
                .map(|_| C64::new(0.05 + rng.random::<f64>(), 2.0 * rng.random::<f64>() - 1.0))
                .collect();
            let t = random::random_with_spectrum(&c, &eig, rng);
            let y = random::random_sc(&c, rng);
            let sol = jordan_mult::solve_sylvester(&t, y.matrix())?;
            let membership = sc_space::membership_residual(&sol.x, &c) / sol.x.norm().max(1.0);
            let scaled = sol.residual / (sol.kappa * y.matrix().norm());
            Ok(Trial::residual(scaled).require(sol.projected_to_sc && membership <= 1e-9))
        }
        "roberts" => {
            let a = random::random_sc(&c, rng);
            let b = sc_space::skew_part(&random::ginibre(n, rng), &c)?;
            let pair = sc_space::trace_pair(a.matrix(), b.matrix())?.norm() / (a.matrix().norm() * b.matrix().norm());
            let lambdas: Vec<C64> = (0..4).map(|_| random::complex_normal(rng)).collect();
            let defect = sc_space::roberts_defect(&a, &b, &lambdas)?;
            Ok(Trial::residual(pair.max(defect)))
        }
        "duality" => {
            let k = random::random_sc(&c, rng);
            let trace_norm = sc_space::schatten_norm(k.matrix(), 1.0)?;
            let (x, value) = sc_space::duality_attain(&k)?;
            let shortfall = ((trace_norm - value) / trace_norm).max(0.0);
            let x_norm = linalg::op_norm(x.matrix());
            Ok(Trial::residual(shortfall).require(x_norm <= 1.0 + 1e-9).measure(value, trace_norm))
        }
        "automorphism" => {
            let v = random::random_c_real_unitary(&c, rng);
            let good = structure::check_jordan_automorphism(&v, &c, 4, rng)?;
            let w = random::haar_unitary(n, rng);
            let generic = structure::check_jordan_automorphism(&w, &c, 4, rng)?;
            let residual = good.sampled_membership.max(good.preserves_product).max(good.preserves_adjoint).max(good.isometric);
            Ok(Trial::residual(residual).require(
                good.commutes_with_c && good.preserves_sc && good.consistent() && generic.consistent(),
            ))
        }
        "invertible" => {
            let t = random::random_rank_deficient_sc(&c, n / 2, rng);
            let eps = 0.1;
            let te = approximation::invertible_approx(&t, eps)?;
            let gap = linalg::op_norm(&(te.matrix() - t.matrix()));
            let smin = linalg::sigma_min(te.matrix());
            let residual = (gap - 0.5 * eps).max(0.5 * eps - smin).max(0.0);
            Ok(Trial::residual(residual).measure(gap, 0.5 * eps))
        }
        "path" => {
            let t = random::random_sc(&c, rng);
            let scale = 1.0 + t.matrix().norm();
            let start = approximation::invertible_path(&t, 0.0)?;
            let end = approximation::invertible_path(&t, 1.0)?;
            let mut residual = (start.matrix() - t.matrix()).norm().max((end.matrix() - linalg::identity(n)).norm()) / scale;
            let mut min_sigma = f64::INFINITY;
            for k in 0..=10 {
                let p = approximation::invertible_path(&t, k as f64 / 10.0)?;
                residual = residual.max(sc_space::membership_residual(p.matrix(), &c) / scale);
                min_sigma = min_sigma.min(linalg::sigma_min(p.matrix()));
            }
            Ok(Trial::residual(residual).require(min_sigma > 0.0))
        }
        "generation" => {
            let z = random::random_sc(&c, rng);
            let gen = structure::generation_dimension(&c, 2)?;
            let simple = structure::jordan_simplicity_witness(&z)?;
            Ok(Trial::residual(0.0).require(gen == n * n && simple == n * (n + 1) / 2))
        }
        "normality" => {
            let normal_draw = rng.random::<bool>();
            let t: ScElement = if normal_draw {
                random::random_normal_sc(&c, rng)
            } else {
                random::random_sc(&c, rng)
            };
            let report = structure::normality_report(&t);
            Ok(Trial::residual(0.0).require(report.agree() && (report.normal || !report.gram_in_sc)))
        }
        "irreducible" => {
            let t = random::ginibre(n, rng);
            let generic = structure::irreducibility_check(&t);
            let reducible = structure::irreducibility_check(&linalg::identity(n));
            Ok(Trial::residual(0.0).require(generic.irreducible && !reducible.irreducible))
        }
        other => Err(Error::BadConfig(format!("unknown check `{other}`"))),
    }
}
