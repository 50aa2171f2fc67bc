//! Command-line front end. Exit codes: 0 pass, 1 check failure, 2 usage or
//! parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::approximation;
use crate::conjugation::Conjugation;
use crate::decomposition;
use crate::error::{Error, Result};
use crate::io;
use crate::jordan_mult::{self, SylvesterMethod};
use crate::linalg::{self, C64, CMat};
use crate::random;
use crate::sc_space::{self, ScElement};
use crate::structure;
use crate::suite::{self, SuiteConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sc-jordan", version, about = "C-symmetric matrices and their Jordan multipliers")]
pub struct Cli {
    /// Seed for every random draw (0 when absent; the suite default is 7).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Residual tolerance overriding the command default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; the report goes to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Takagi factorization of a complex symmetric matrix.
    Takagi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Structured Weyl-von Neumann step on a seeded selfadjoint element.
    Wvn {
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        intervals: u64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Spectrum of the Jordan multiplier against pairwise means.
    Lspec {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Solves T X + X T = Y; `--out` receives X.
    Sylvester {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Tests whether X -> V X V* is a Jordan automorphism of S_C.
    Autocheck {
        #[arg(long)]
        v: PathBuf,
        /// Conjugation document; the standard conjugation when absent.
        #[arg(long)]
        c: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Exits 0 when the operator has trivial commutant, 1 otherwise.
    Irreducible {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Samples the path of invertible elements from T to I.
    Path {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Runs the seeded invariant suite.
    Suite {
        /// JSON suite configuration; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Record per-check wall-clock time.
        #[arg(long)]
        timing: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0) || !t.is_finite() {
            let _ = writeln!(stderr, "error: --tol must be positive, got {t}");
            return EXIT_USAGE;
        }
    }
    match execute(&cli, stdout) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::SingularJordanMultiplier { .. } | Error::NonDiagonalizable => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn emit(value: &Value, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => io::write_json(path, value),
        None => Ok(stdout.write_all(io::to_pretty(value).as_bytes())?),
    }
}

fn complex_list(values: &[C64]) -> Value {
    Value::Array(values.iter().map(|z| json!([z.re, z.im])).collect())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    let out = cli.out.as_deref();
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Takagi { input } => {
            let a = io::load_matrix(input)?;
            let f = decomposition::takagi(&a)?;
            let n = a.nrows();
            let scale = a.norm().max(f64::MIN_POSITIVE);
            let recon = (f.reconstruct() - &a).norm();
            let unitarity = linalg::unitarity_residual(&f.q);
            let svd = linalg::singular_values(&a);
            let sigma_gap = svd.iter().zip(&f.sigma).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
            let tol = cli.tol.unwrap_or(1e-10);
            let pass = recon / scale <= tol && unitarity <= tol * n as f64 && sigma_gap <= tol * scale;
            let report = json!({
                "kind": "takagi",
                "q": io::matrix_value(&f.q, "matrix"),
                "sigma": f.sigma,
                "reconstruction_residual": recon,
                "relative_residual": recon / scale,
                "unitarity_residual": unitarity,
                "singular_value_gap": sigma_gap,
                "tolerance": tol,
                "pass": pass,
            });
            emit(&report, out, stdout)?;
            Ok(pass)
        }
        Command::Wvn { dim, intervals, p } => {
            if *dim == 0 {
                return Err(Error::InvalidDimension(0));
            }
            let mut rng = random::stream(seed, "cli-wvn", *dim, 0);
            let c = random::random_conjugation(*dim, &mut rng);
            let t = random::random_selfadjoint_sc(&c, &mut rng);
            let e = random::unit_vector(*dim, &mut rng);
            let cert = approximation::wvn_perturbation(&t, &e, *intervals, *p)?;
            let tol = cli.tol.unwrap_or(1e-9);
            let checks: serde_json::Map<String, Value> =
                cert.checks(tol).into_iter().map(|(k, ok)| (k.to_string(), Value::Bool(ok))).collect();
            let pass = cert.passed(tol);
            let report = json!({
                "kind": "perturbation_certificate",
                "dim": dim,
                "seed": seed,
                "t": io::sc_element_value(&t),
                "e": complex_list(e.as_slice()),
                "k": io::matrix_value(&cert.k, "matrix"),
                "projection": io::matrix_value(&cert.projection, "matrix"),
                "intervals": cert.intervals,
                "p": cert.p,
                "spectrum_interval": [cert.spectrum_interval.0, cert.spectrum_interval.1],
                "measured_norm": cert.measured_norm,
                "bound": cert.bound,
                "commute_residual": cert.commute_residual,
                "rank_p": cert.rank_p,
                "cpc_residual": cert.cpc_residual,
                "ckc_residual": cert.ckc_residual,
                "reduces_c_residual": cert.reduces_c_residual,
                "k_selfadjoint_residual": cert.k_selfadjoint_residual,
                "e_residual": cert.e_residual,
                "tolerance": tol,
                "checks": checks,
                "pass": pass,
            });
            emit(&report, out, stdout)?;
            Ok(pass)
        }
        Command::Lspec { input } => {
            let t = io::load_sc_element(input, None)?;
            let cmp = jordan_mult::compare_spectrum(&t);
            let tol = cli.tol.unwrap_or(1e-7) * (1.0 + cmp.t_norm);
            let pass = cmp.multiset_distance <= tol;
            let report = json!({
                "kind": "jordan_spectrum",
                "l_eigenvalues": complex_list(&cmp.l_eigenvalues),
                "t_eigenvalues": complex_list(&cmp.t_eigenvalues),
                "pair_means": complex_list(&cmp.pair_means),
                "multiset_distance": cmp.multiset_distance,
                "set_distance": cmp.set_distance,
                "t_norm": cmp.t_norm,
                "tolerance": tol,
                "pass": pass,
            });
            emit(&report, None, stdout)?;
            Ok(pass)
        }
        Command::Sylvester { t, y } => {
            let t = io::load_sc_element(t, None)?;
            let y = io::load_matrix(y)?;
            let sol = jordan_mult::solve_sylvester(&t, &y)?;
            let tol = cli.tol.unwrap_or(1e-8) * sol.kappa * y.norm().max(f64::MIN_POSITIVE);
            let pass = sol.residual <= tol;
            if let Some(path) = out {
                io::save_matrix(path, &sol.x, "matrix")?;
            }
            let mut report = json!({
                "kind": "sylvester",
                "method": match sol.method { SylvesterMethod::EigenFrame => "eigenframe", SylvesterMethod::Dense => "dense" },
                "kappa": sol.kappa,
                "residual": sol.residual,
                "tolerance": tol,
                "projected_to_sc": sol.projected_to_sc,
                "membership_residual": sc_space::membership_residual(&sol.x, t.conjugation()),
                "pass": pass,
            });
            if out.is_none() {
                report["x"] = io::matrix_value(&sol.x, "matrix");
            }
            emit(&report, None, stdout)?;
            Ok(pass)
        }
        Command::Autocheck { v, c, samples } => {
            let v = io::load_matrix(v)?;
            let c = match c {
                Some(path) => io::load_conjugation(path)?,
                None => Conjugation::standard(v.nrows())?,
            };
            let mut rng = random::stream(seed, "cli-autocheck", c.dim(), 0);
            let r = structure::check_jordan_automorphism(&v, &c, *samples, &mut rng)?;
            let tol = cli.tol.unwrap_or(1e-9);
            let residuals_ok = [r.sampled_membership, r.preserves_product, r.preserves_adjoint, r.isometric]
                .iter()
                .all(|&x| x <= tol);
            let automorphism = r.preserves_sc && residuals_ok;
            let report = json!({
                "kind": "automorphism_report",
                "commutes_with_c": r.commutes_with_c,
                "alpha": r.alpha.map(|a| json!([a.re, a.im])),
                "preserves_sc": r.preserves_sc,
                "sampled_membership": r.sampled_membership,
                "preserves_product": r.preserves_product,
                "preserves_adjoint": r.preserves_adjoint,
                "isometric": r.isometric,
                "counterexample": r.counterexample.as_ref().map(|x| io::matrix_value(x, "matrix")),
                "consistent": r.consistent(),
                "automorphism": automorphism,
            });
            emit(&report, out, stdout)?;
            Ok(automorphism && r.consistent())
        }
        Command::Irreducible { input } => {
            let t = io::load_matrix(input)?;
            let r = structure::irreducibility_check(&t);
            let report = json!({
                "kind": "irreducibility",
                "commutant_dimension": r.commutant_dimension,
                "irreducible": r.irreducible,
            });
            emit(&report, out, stdout)?;
            Ok(r.irreducible)
        }
        Command::Path { input, samples } => {
            if *samples < 2 {
                return Err(Error::InvalidParameter("path needs at least 2 samples".into()));
            }
            let t = io::load_sc_element(input, None)?;
            path_report(&t, *samples, cli.tol.unwrap_or(1e-8), out, stdout)
        }
        Command::Suite { config, dims, trials, checks, timing } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str::<SuiteConfig>(&text).map_err(|e| {
                        Error::BadConfig(format!("line {} column {}: {e}", e.line(), e.column()))
                    })?
                }
                None => SuiteConfig::default(),
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(d) = dims {
                cfg.dims = d.clone();
            }
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            if let Some(c) = checks {
                cfg.checks = c.iter().filter(|id| !id.is_empty()).cloned().collect();
            }
            if cli.tol.is_some() {
                cfg.tol_override = cli.tol;
            }
            if out.is_some() {
                cfg.output_path = out.map(Path::to_path_buf);
            }
            cfg.timing |= *timing;
            let report = suite::run_suite(&cfg)?;
            let text = report.to_json();
            match &cfg.output_path {
                Some(path) => io::write_atomic(path, text.as_bytes())?,
                None => stdout.write_all(text.as_bytes())?,
            }
            Ok(report.passed)
        }
    }
}

fn path_report(t: &ScElement, samples: usize, tol: f64, out: Option<&Path>, stdout: &mut dyn Write) -> Result<bool> {
    let c = t.conjugation();
    let n = t.dim();
    let scale = 1.0 + t.matrix().norm();
    let mut points = Vec::with_capacity(samples);
    let mut pass = true;
    let mut first: Option<CMat> = None;
    let mut last: Option<CMat> = None;
    for k in 0..samples {
        let s = k as f64 / (samples - 1) as f64;
        let p = approximation::invertible_path(t, s)?;
        let smin = linalg::sigma_min(p.matrix());
        let membership = sc_space::membership_residual(p.matrix(), c);
        pass &= smin > 0.0 && membership <= tol * scale;
        points.push(json!({ "s": s, "sigma_min": smin, "membership_residual": membership }));
        if k == 0 {
            first = Some(p.matrix().clone());
        }
        last = Some(p.into_matrix());
    }
    let start_gap = (first.expect("samples >= 2") - t.matrix()).norm();
    let end_gap = (last.expect("samples >= 2") - linalg::identity(n)).norm();
    pass &= start_gap <= tol * scale && end_gap <= tol * scale;
    let report = json!({
        "kind": "invertible_path",
        "samples": points,
        "start_residual": start_gap,
        "end_residual": end_gap,
        "tolerance": tol,
        "pass": pass,
    });
    emit(&report, out, stdout)?;
    Ok(pass)
}
