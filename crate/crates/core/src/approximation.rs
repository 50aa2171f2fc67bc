//! Constructive approximation inside S_C: the structured Weyl–von Neumann
//! step and diagonalization loop, C-fixed diagonalization of normals,
//! invertible and finite-spectrum approximation, and paths to the identity.
//!
//! Selfadjoint members of S_C are real symmetric in the C-fixed frame, so the
//! spectral work below runs on real matrices in that frame and maps back.

use std::collections::BTreeMap;

use crate::conjugation;
use crate::decomposition::{extend_partial_conjugation, refined_polar};
use crate::error::{Error, Result};
use crate::linalg::{self, conj, default_tol, rank_tol, C64, CMat, RMat, RVec};
use crate::sc_space::{schatten_norm, ScElement};

/// Output of one structured Weyl–von Neumann step.
#[derive(Debug, Clone)]
pub struct PerturbationCertificate {
    /// Selfadjoint perturbation in S_C.
    pub k: CMat,
    /// Finite-rank projection in S_C reducing `T + K`, with `e ∈ ran P`.
    pub projection: CMat,
    pub intervals: u64,
    pub p: f64,
    pub spectrum_interval: (f64, f64),
    pub measured_norm: f64,
    /// `4(b − a)/intervals^{1/q}` with `1/p + 1/q = 1`.
    pub bound: f64,
    pub commute_residual: f64,
    pub rank_p: usize,
    pub cpc_residual: f64,
    pub ckc_residual: f64,
    /// Largest `‖C E_i C − E_i‖` over the spectral projections.
    pub reduces_c_residual: f64,
    pub k_selfadjoint_residual: f64,
    /// `‖(I − P) e‖ / ‖e‖`.
    pub e_residual: f64,
}

impl PerturbationCertificate {
    pub fn checks(&self, tol: f64) -> Vec<(&'static str, bool)> {
        vec![
            ("k_selfadjoint", self.k_selfadjoint_residual <= tol),
            ("k_in_sc", self.ckc_residual <= tol),
            ("norm_bound", self.measured_norm <= self.bound + tol),
            ("commutes", self.commute_residual <= tol),
            ("rank_bound", self.rank_p as u64 <= 2 * self.intervals),
            ("p_in_sc", self.cpc_residual <= tol),
            ("e_in_range", self.e_residual <= tol),
            ("spectral_subspaces_reduce_c", self.reduces_c_residual <= tol),
        ]
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.checks(tol).iter().all(|(_, ok)| *ok)
    }
}

/// Real-frame result of one step.
struct Step {
    k: RMat,
    p: RMat,
    /// Orthonormal bases of the spaces `M_i`, one block per occupied interval.
    blocks: Vec<RMat>,
    /// Orthonormal bases of the spectral subspaces `H_i`.
    spectral: Vec<RMat>,
    lo: f64,
    hi: f64,
}

fn real_orthonormal(cands: &[RVec], cutoff: f64) -> Vec<RVec> {
    let mut out: Vec<RVec> = Vec::new();
    for c in cands {
        let mut r = c.clone();
        for _ in 0..2 {
            for q in &out {
                let d = q.dot(&r);
                r -= q * d;
            }
        }
        let norm = r.norm();
        if norm > cutoff {
            out.push(r.unscale(norm));
        }
    }
    out
}

fn columns(rows: usize, cols: &[RVec]) -> RMat {
    let mut m = RMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// One step on a real symmetric `a` and vector `c_re + i c_im`.
///
/// Eigenvalues go to half-open intervals `[lo + k w, lo + (k+1) w)` by
/// `floor`, the top index clamped into the last interval. In each occupied
/// interval the off-diagonal coupling between `M_i = span{Re c_i, Im c_i}`
/// and the rest of `H_i` is cancelled.
fn step(a: &RMat, c_re: &RVec, c_im: &RVec, intervals: u64, pad: f64) -> Step {
    let n = a.nrows();
    let (vals, vecs) = linalg::real_symmetric_eigen(a);
    let lo = vals[0] - pad;
    let hi = vals[n - 1] + pad;
    let width = (hi - lo) / intervals as f64;
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in vals.iter().enumerate() {
        let raw = ((l - lo) / width).floor();
        let idx = if raw.is_finite() && raw > 0.0 { (raw as u64).min(intervals - 1) } else { 0 };
        groups.entry(idx).or_default().push(i);
    }
    let cutoff = 1e-13 * (c_re.norm_squared() + c_im.norm_squared()).sqrt().max(f64::MIN_POSITIVE);
    let mut k = RMat::zeros(n, n);
    let mut p = RMat::zeros(n, n);
    let mut blocks = Vec::new();
    let mut spectral = Vec::new();
    for members in groups.values() {
        let g = members.len();
        let v = RMat::from_fn(n, g, |r, j| vecs[(r, members[j])]);
        let lam = RMat::from_diagonal(&RVec::from_iterator(g, members.iter().map(|&i| vals[i])));
        let u_re = v.transpose() * c_re;
        let u_im = v.transpose() * c_im;
        let basis = real_orthonormal(&[u_re, u_im], cutoff);
        spectral.push(v.clone());
        if basis.is_empty() {
            continue;
        }
        let m = columns(g, &basis);
        let pg = &m * m.transpose();
        let qg = RMat::identity(g, g) - &pg;
        let kg = -(&pg * &lam * &qg + &qg * &lam * &pg);
        k += &v * kg * v.transpose();
        let vm = &v * m;
        p += &vm * vm.transpose();
        blocks.push(vm);
    }
    Step { k, p, blocks, spectral, lo, hi }
}

/// `1/q` for the dual exponent of `p` (`p = 0` is the operator norm).
fn inverse_q(p: f64) -> Result<f64> {
    if p == 0.0 || p.is_infinite() && p > 0.0 {
        Ok(1.0)
    } else if p > 1.0 {
        Ok(1.0 - 1.0 / p)
    } else {
        Err(Error::InvalidP(p))
    }
}

fn check_selfadjoint(t: &ScElement) -> Result<()> {
    let m = t.matrix();
    let residual = (m - m.adjoint()).norm();
    if residual > default_tol(t.dim(), m.norm()) {
        return Err(Error::NotSelfadjoint { residual });
    }
    Ok(())
}

fn real_frame(t: &ScElement) -> RMat {
    let a = linalg::real_part(&t.fixed_frame());
    (&a + a.transpose()).scale(0.5)
}

/// One structured Weyl–von Neumann step for selfadjoint `T ∈ S_C`.
pub fn wvn_perturbation(t: &ScElement, e: &crate::linalg::CVec, intervals: u64, p: f64) -> Result<PerturbationCertificate> {
    check_selfadjoint(t)?;
    let inv_q = inverse_q(p)?;
    if intervals == 0 {
        return Err(Error::InvalidParameter("intervals must be positive".into()));
    }
    let n = t.dim();
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.len(),
        });
    }
    if e.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c = t.conjugation();
    let b = c.fixed_basis();
    let coords = b.adjoint() * e;
    let c_re = coords.map(|z| z.re);
    let c_im = coords.map(|z| z.im);
    let a = real_frame(t);
    let pad = default_tol(n, t.matrix().norm());
    let s = step(&a, &c_re, &c_im, intervals, pad);

    let k = c.from_fixed_frame(&linalg::to_complex(&s.k));
    let proj = c.from_fixed_frame(&linalg::to_complex(&s.p));
    let sum = t.matrix() + &k;
    let commute_residual = (&sum * &proj - &proj * &sum).norm();
    let reduces_c_residual = s
        .spectral
        .iter()
        .map(|v| {
            let e_i = c.from_fixed_frame(&linalg::to_complex(&(v * v.transpose())));
            (c.sandwich(&e_i) - &e_i).norm()
        })
        .fold(0.0, f64::max);
    let e_residual = (e - &proj * e).norm() / e.norm();
    Ok(PerturbationCertificate {
        measured_norm: schatten_norm(&k, p)?,
        bound: 4.0 * (s.hi - s.lo) / (intervals as f64).powf(inv_q),
        spectrum_interval: (s.lo, s.hi),
        commute_residual,
        rank_p: s.blocks.iter().map(|m| m.ncols()).sum(),
        cpc_residual: (c.sandwich(&proj) - &proj).norm(),
        ckc_residual: (c.sandwich(&k) - &k).norm(),
        reduces_c_residual,
        k_selfadjoint_residual: (&k - k.adjoint()).norm(),
        e_residual,
        k,
        projection: proj,
        intervals,
        p,
    })
}

/// Diagnostics of one pass of the diagonalization loop.
#[derive(Debug, Clone)]
pub struct LoopStep {
    pub basis_index: usize,
    pub intervals: u64,
    pub budget: f64,
    pub measured_norm: f64,
}

#[derive(Debug, Clone)]
pub struct WvnDiagonalization {
    pub d: ScElement,
    /// Unitary whose columns are C-fixed eigenvectors of `D`.
    pub eigenbasis: CMat,
    pub eigenvalues: Vec<f64>,
    /// `‖T − D‖_p`.
    pub distance: f64,
    pub steps: Vec<LoopStep>,
}

const MAX_INTERVALS: u64 = 1 << 53;

/// Runs the structured step over the C-fixed basis vectors with budgets
/// `ε/2^s`, producing a diagonalizable `D ∈ S_C` with `‖T − D‖_p < ε`.
pub fn wvn_diagonalize(t: &ScElement, epsilon: f64, p: f64) -> Result<WvnDiagonalization> {
    check_selfadjoint(t)?;
    let inv_q = inverse_q(p)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let n = t.dim();
    let c = t.conjugation();
    let mut d = real_frame(t);
    let mut w = RMat::identity(n, n);
    let mut vectors: Vec<RVec> = Vec::with_capacity(n);
    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut steps = Vec::new();
    for idx in 0..n {
        if w.ncols() == 0 {
            break;
        }
        let v = w.row(idx).transpose();
        if v.norm() < 1e-12 {
            continue;
        }
        let budget = epsilon / 2f64.powi(steps.len() as i32 + 1);
        let local = w.transpose() * &d * &w;
        let pad = default_tol(local.nrows(), local.norm());
        let (vals, _) = linalg::real_symmetric_eigen(&local);
        let spread = vals[vals.len() - 1] - vals[0] + 2.0 * pad;
        let intervals = if spread <= f64::EPSILON * local.norm().max(1.0) {
            1
        } else {
            let x = (4.0 * spread / budget).powf(1.0 / inv_q).floor();
            if x >= MAX_INTERVALS as f64 { MAX_INTERVALS } else { x as u64 + 1 }
        };
        let zero = RVec::zeros(v.len());
        let s = step(&local, &v, &zero, intervals, pad);
        let measured = schatten_norm(&linalg::to_complex(&s.k), p)?;
        steps.push(LoopStep {
            basis_index: idx,
            intervals,
            budget,
            measured_norm: measured,
        });
        let updated = &local + &s.k;
        d += &w * &s.k * w.transpose();
        for y in &s.blocks {
            let block = y.transpose() * &updated * y;
            let (bv, bvec) = linalg::real_symmetric_eigen(&block);
            for (j, &lam) in bv.iter().enumerate() {
                vectors.push(&w * (y * bvec.column(j)));
                values.push(lam);
            }
        }
        let covered = RMat::identity(local.nrows(), local.nrows()) - &s.p;
        let (cv, cvec) = linalg::real_symmetric_eigen(&covered);
        let keep: Vec<usize> = (0..cv.len()).filter(|&j| cv[j] > 0.5).collect();
        let comp = RMat::from_fn(local.nrows(), keep.len(), |r, j| cvec[(r, keep[j])]);
        w = &w * comp;
    }
    let d = (&d + d.transpose()).scale(0.5);
    let dm = c.from_fixed_frame(&linalg::to_complex(&d));
    let distance = schatten_norm(&(t.matrix() - &dm), p)?;
    let eig_real = columns(n, &vectors);
    let eigenbasis = c.fixed_basis() * linalg::to_complex(&eig_real);
    Ok(WvnDiagonalization {
        d: ScElement::settle(dm, c),
        eigenbasis,
        eigenvalues: values,
        distance,
        steps,
    })
}

/// Orthogonal matrix simultaneously diagonalizing commuting real symmetric
/// matrices. Eigenvalues of each matrix are clustered with gap
/// `1e-8·max(1, ‖M‖)` and later matrices refine the clusters.
pub fn joint_real_diagonalize(mats: &[RMat]) -> RMat {
    let n = mats.first().map(|m| m.nrows()).unwrap_or(0);
    let mut clusters: Vec<RMat> = vec![RMat::identity(n, n)];
    for m in mats {
        let gap = 1e-8 * m.norm().max(1.0);
        let mut next = Vec::new();
        for w in &clusters {
            let local = w.transpose() * m * w;
            let (vals, vecs) = linalg::real_symmetric_eigen(&local);
            let mut start = 0;
            for j in 1..=vals.len() {
                if j == vals.len() || vals[j] - vals[j - 1] > gap {
                    next.push(w * vecs.columns(start, j - start));
                    start = j;
                }
            }
        }
        clusters = next;
    }
    let cols: Vec<RVec> = clusters
        .iter()
        .flat_map(|w| (0..w.ncols()).map(move |j| w.column(j).into_owned()))
        .collect();
    columns(n, &cols)
}

fn check_normal(t: &ScElement) -> Result<()> {
    let m = t.matrix();
    let residual = (m * m.adjoint() - m.adjoint() * m).norm();
    if residual > default_tol(t.dim(), m.norm_squared()) {
        return Err(Error::NotNormal { residual });
    }
    Ok(())
}

/// C-fixed orthonormal eigenbasis of a normal `T ∈ S_C`.
///
/// In the fixed frame `T` is `X + iY` with `X, Y` real symmetric and
/// commuting, so a real orthogonal joint eigenbasis exists.
pub fn c_fixed_diagonalize(t: &ScElement) -> Result<(CMat, Vec<C64>)> {
    let (basis, mut values) = c_fixed_joint_diagonalize(std::slice::from_ref(t))?;
    Ok((basis, values.remove(0)))
}

/// One C-fixed basis diagonalizing several commuting normal elements.
pub fn c_fixed_joint_diagonalize(ts: &[ScElement]) -> Result<(CMat, Vec<Vec<C64>>)> {
    let first = ts.first().ok_or_else(|| Error::InvalidParameter("no operators given".into()))?;
    let c = first.conjugation();
    for t in ts {
        if !t.conjugation().same_as(c) {
            return Err(Error::ConjugationMismatch);
        }
        check_normal(t)?;
    }
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            let r = (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
            if r > default_tol(a.dim(), a.matrix().norm() * b.matrix().norm()) {
                return Err(Error::InvalidParameter(format!("operators do not commute (residual {r:.3e})")));
            }
        }
    }
    let frames: Vec<CMat> = ts.iter().map(|t| t.fixed_frame()).collect();
    let mut parts = Vec::with_capacity(2 * ts.len());
    for a in &frames {
        let re = linalg::real_part(a);
        let im = linalg::imag_part(a);
        parts.push((&re + re.transpose()).scale(0.5));
        parts.push((&im + im.transpose()).scale(0.5));
    }
    let o = joint_real_diagonalize(&parts);
    let oc = linalg::to_complex(&o);
    let values = frames
        .iter()
        .map(|a| {
            let diag = oc.transpose() * a * &oc;
            diag.diagonal().iter().copied().collect()
        })
        .collect();
    Ok((c.fixed_basis() * oc, values))
}

/// `T_ε = C J̃ Q` with `Q = max(|T|, ε/2 − η)`: invertible, in S_C, and within
/// `ε/2` of `T`. The margin `η = min(10⁻¹²·max(1, ‖T‖), ε/4)` keeps the
/// computed distance at or below `ε/2` where the kernel attains it exactly.
pub fn invertible_approx(t: &ScElement, epsilon: f64) -> Result<ScElement> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let polar = refined_polar(t);
    let full = extend_partial_conjugation(&polar.j);
    let margin = (1e-12 * linalg::op_norm(t.matrix()).max(1.0)).min(0.25 * epsilon);
    let floor = 0.5 * epsilon - margin;
    let q = linalg::hermitian_apply(&polar.p, |s| s.max(floor));
    let unitary = t.conjugation().matrix() * conj(full.matrix());
    Ok(ScElement::settle(unitary * q, t.conjugation()))
}

/// Rounds the spectrum of selfadjoint `T` to the grid `ε·ℤ` (half up).
pub fn finite_spectrum_approx(t: &ScElement, epsilon: f64) -> Result<ScElement> {
    check_selfadjoint(t)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let a = real_frame(t);
    let (vals, vecs) = linalg::real_symmetric_eigen(&a);
    let rounded = RVec::from_iterator(vals.len(), vals.iter().map(|&l| epsilon * (l / epsilon + 0.5).floor()));
    let s = &vecs * RMat::from_diagonal(&rounded) * vecs.transpose();
    let c = t.conjugation();
    Ok(ScElement::settle(c.from_fixed_frame(&linalg::to_complex(&s)), c))
}

/// Point `s ∈ [0, 1]` on a path of invertible S_C elements from `T` to `I`.
///
/// On `[0, ½]` the modulus is contracted: `U·(λ + (1 − λ)|T|)` with `λ = 2s`
/// and `U = C J` from the refined polar form. On `[½, 1]` the conjugation
/// `J` is moved to `C` along a conjugation path, giving unitaries `C J(r)`.
pub fn invertible_path(t: &ScElement, s: f64) -> Result<ScElement> {
    let smin = linalg::sigma_min(t.matrix());
    let smax = linalg::op_norm(t.matrix());
    if smin <= rank_tol(smax) {
        return Err(Error::NotInvertible { sigma_min: smin });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("path parameter {s} outside [0, 1]")));
    }
    let c = t.conjugation();
    let n = t.dim();
    let polar = refined_polar(t);
    let j = extend_partial_conjugation(&polar.j);
    let value = if s <= 0.5 {
        let lambda = 2.0 * s;
        let unitary = c.matrix() * conj(j.matrix());
        let modulus = linalg::identity(n).scale(lambda) + polar.p.scale(1.0 - lambda);
        unitary * modulus
    } else {
        let js = conjugation::conjugation_path(&j, c, 2.0 * s - 1.0)?;
        c.matrix() * conj(js.matrix())
    };
    Ok(ScElement::settle(value, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugation::Conjugation;
    use crate::random::{self, stream};
    use crate::sc_space::{is_symmetric, membership_residual};

    fn diag(c: &Conjugation, d: &[f64]) -> ScElement {
        let m = CMat::from_diagonal(&crate::linalg::CVec::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0))));
        ScElement::new(c.from_fixed_frame(&m), c).unwrap()
    }

    #[test]
    fn perturbation_of_a_diagonal_is_zero() {
        let c = Conjugation::standard(4).unwrap();
        let t = diag(&c, &[1.0, 2.0, 3.0, 4.0]);
        let mut e1 = crate::linalg::CVec::zeros(4);
        e1[0] = C64::new(1.0, 0.0);
        let cert = wvn_perturbation(&t, &e1, 4, 2.0).unwrap();
        assert!(cert.k.norm() < 1e-14);
        let mut expect = CMat::zeros(4, 4);
        expect[(0, 0)] = C64::new(1.0, 0.0);
        assert!((&cert.projection - expect).norm() < 1e-14);
        assert_eq!(cert.rank_p, 1);
    }

    #[test]
    fn perturbation_certificate_on_random_input() {
        let mut rng = stream(1, "wvn", 32, 0);
        let c = random::random_conjugation(32, &mut rng);
        let t = random::random_selfadjoint_sc(&c, &mut rng);
        let e = random::gaussian_vector(32, &mut rng);
        let cert = wvn_perturbation(&t, &e, 8, 2.0).unwrap();
        assert!(cert.passed(1e-9), "{:?}", cert.checks(1e-9));
        assert!(cert.measured_norm <= 4.0 * (cert.spectrum_interval.1 - cert.spectrum_interval.0) / 8f64.sqrt());
        let finer = wvn_perturbation(&t, &e, 32, 2.0).unwrap();
        let coarse_bound_at_32 = 4.0 * (cert.spectrum_interval.1 - cert.spectrum_interval.0) / 32f64.sqrt();
        assert!(finer.measured_norm <= coarse_bound_at_32);
    }

    #[test]
    fn perturbation_rejects_bad_input() {
        let mut rng = stream(2, "wvn", 4, 0);
        let c = random::random_conjugation(4, &mut rng);
        let t = random::random_selfadjoint_sc(&c, &mut rng);
        let e = random::gaussian_vector(4, &mut rng);
        assert!(matches!(wvn_perturbation(&t, &e, 4, 1.0), Err(Error::InvalidP(_))));
        assert!(matches!(wvn_perturbation(&t, &e, 4, 0.5), Err(Error::InvalidP(_))));
        assert!(wvn_perturbation(&t, &e, 4, 0.0).is_ok());
        let zero = crate::linalg::CVec::zeros(4);
        assert!(matches!(wvn_perturbation(&t, &zero, 4, 2.0), Err(Error::ZeroVector)));
        let g = random::random_sc(&c, &mut rng);
        assert!(matches!(wvn_perturbation(&g, &e, 4, 2.0), Err(Error::NotSelfadjoint { .. })));
    }

    #[test]
    fn diagonalize_loop() {
        let mut rng = stream(3, "wvn", 16, 0);
        let c = random::random_conjugation(16, &mut rng);
        let t = random::random_selfadjoint_sc(&c, &mut rng);
        for eps in [0.1, 0.01] {
            let out = wvn_diagonalize(&t, eps, 2.0).unwrap();
            assert!(out.distance < eps);
            assert!(linalg::unitarity_residual(&out.eigenbasis) < 1e-10);
            let fixed = c.matrix() * conj(&out.eigenbasis) - &out.eigenbasis;
            assert!(fixed.norm() < 1e-10);
            let dm = out.d.matrix();
            for (j, &lam) in out.eigenvalues.iter().enumerate() {
                let b = out.eigenbasis.column(j);
                assert!((dm * b - b * C64::new(lam, 0.0)).norm() < 1e-9);
            }
            assert!(membership_residual(dm, &c) < 1e-10);
        }
        let d = diag(&c, &[1.0, -2.0, 0.5, 3.0, 1.5, 2.5, 0.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let out = wvn_diagonalize(&d, 0.1, 2.0).unwrap();
        assert!((out.d.matrix() - d.matrix()).norm() < 1e-10);
        let slack = wvn_diagonalize(&t, 10.0 * linalg::op_norm(t.matrix()), 2.0).unwrap();
        assert!(slack.distance < 10.0 * linalg::op_norm(t.matrix()));
    }

    #[test]
    fn c_fixed_diagonalization_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let (b, d) = c_fixed_diagonalize(&diag(&c2, &[1.0, 2.0])).unwrap();
        assert!((b.clone().map(|z| z.norm()) - linalg::identity(2).map(|z| z.norm())).norm() < 1e-14);
        assert!((d[0] - C64::new(1.0, 0.0)).norm() < 1e-14);

        let i = C64::new(0.0, 1.0);
        let t = ScElement::new(CMat::from_row_slice(2, 2, &[C64::new(0., 0.), i, i, C64::new(0., 0.)]), &c2).unwrap();
        let (b, d) = c_fixed_diagonalize(&t).unwrap();
        let mut got: Vec<f64> = d.iter().map(|z| z.im).collect();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((got[0] + 1.0).abs() < 1e-14 && (got[1] - 1.0).abs() < 1e-14);
        for j in 0..2 {
            let col = b.column(j).into_owned();
            assert!((t.matrix() * &col - &col * d[j]).norm() < 1e-14);
            assert!((c2.apply(&col) - &col).norm() < 1e-14);
        }

        let non_normal = ScElement::new(
            CMat::from_row_slice(2, 2, &[C64::new(1., 0.), i, i, C64::new(-1., 0.)]),
            &c2,
        )
        .unwrap();
        assert!(matches!(c_fixed_diagonalize(&non_normal), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn joint_diagonalization_of_commuting_normals() {
        let mut rng = stream(4, "cfix", 6, 0);
        let c = random::random_conjugation(6, &mut rng);
        let o = random::real_orthogonal(6, &mut rng);
        let mk = |d: Vec<C64>| {
            let m = &o * CMat::from_diagonal(&crate::linalg::CVec::from_vec(d)) * o.transpose();
            ScElement::settle(c.from_fixed_frame(&m), &c)
        };
        let one = C64::new(1.0, 0.0);
        let two = C64::new(2.0, 1.0);
        let n1 = mk(vec![one, one, one, two, two, two]);
        let n2 = mk(vec![one, two, C64::new(0., 3.), one, two, C64::new(0., 3.)]);
        let (b, vals) = c_fixed_joint_diagonalize(&[n1.clone(), n2.clone()]).unwrap();
        for (t, d) in [(&n1, &vals[0]), (&n2, &vals[1])] {
            for j in 0..6 {
                let col = b.column(j).into_owned();
                assert!((t.matrix() * &col - &col * d[j]).norm() < 1e-10);
                assert!((c.apply(&col) - &col).norm() < 1e-10);
                // C maps the eigenspace into itself
                assert!((t.matrix() * c.apply(&col) - c.apply(&col) * d[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn invertible_approx_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let t = diag(&c2, &[1.0, 0.0]);
        let te = invertible_approx(&t, 0.2).unwrap();
        assert!((te.matrix() - diag(&c2, &[1.0, 0.1]).matrix()).norm() < 1e-11);
        assert!((linalg::op_norm(&(te.matrix() - t.matrix())) - 0.1).abs() < 1e-11);

        let zero = diag(&c2, &[0.0, 0.0]);
        let z = invertible_approx(&zero, 0.2).unwrap();
        assert!((linalg::op_norm(z.matrix()) - 0.1).abs() < 1e-11);
        assert!((linalg::sigma_min(z.matrix()) - 0.1).abs() < 1e-11);

        let inv = diag(&c2, &[2.0, -3.0]);
        assert!((invertible_approx(&inv, 0.2).unwrap().matrix() - inv.matrix()).norm() < 1e-12);
        assert!(matches!(invertible_approx(&inv, 0.0), Err(Error::InvalidEpsilon(_))));

        let mut rng = stream(5, "inv", 6, 0);
        let c = random::random_conjugation(6, &mut rng);
        let r = random::random_rank_deficient_sc(&c, 3, &mut rng);
        let raw_polar = refined_polar(&r);
        let full = extend_partial_conjugation(&raw_polar.j);
        let q = linalg::hermitian_apply(&raw_polar.p, |s| s.max(0.05));
        let raw = c.matrix() * conj(full.matrix()) * q;
        assert!(membership_residual(&raw, &c) < 1e-10);
        let re = invertible_approx(&r, 0.1).unwrap();
        assert!(linalg::op_norm(&(re.matrix() - r.matrix())) <= 0.05 + 1e-12);
        assert!(linalg::sigma_min(re.matrix()) >= 0.05 - 1e-10);
    }

    #[test]
    fn finite_spectrum_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let t = diag(&c2, &[0.1, 0.9]);
        let s = finite_spectrum_approx(&t, 1.0).unwrap();
        assert!((s.matrix() - diag(&c2, &[0.0, 1.0]).matrix()).norm() < 1e-14);
        let g = diag(&c2, &[0.5, -1.5]);
        assert!((finite_spectrum_approx(&g, 0.5).unwrap().matrix() - g.matrix()).norm() < 1e-14);

        let mut rng = stream(6, "fin", 16, 0);
        let c = random::random_conjugation(16, &mut rng);
        let h = random::random_selfadjoint_sc(&c, &mut rng);
        let s = finite_spectrum_approx(&h, 0.05).unwrap();
        assert!(linalg::op_norm(&(s.matrix() - h.matrix())) <= 0.025 + 1e-12);
        let eig = linalg::hermitian_eigen(h.matrix()).0;
        let mut distinct: Vec<f64> = linalg::hermitian_eigen(s.matrix()).0;
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let bound = ((eig[15] - eig[0]) / 0.05).ceil() as usize + 1;
        assert!(distinct.len() <= bound);
        assert!(is_symmetric(s.matrix(), &c, 1e-10).unwrap());
    }

    #[test]
    fn invertible_path_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let id = diag(&c2, &[1.0, 1.0]);
        for s in [0.0, 0.3, 0.5, 0.8, 1.0] {
            assert!((invertible_path(&id, s).unwrap().matrix() - linalg::identity(2)).norm() < 1e-12);
        }
        let t = diag(&c2, &[2.0, 3.0]);
        assert!((invertible_path(&t, 0.0).unwrap().matrix() - t.matrix()).norm() < 1e-12);
        assert!((invertible_path(&t, 0.5).unwrap().matrix() - linalg::identity(2)).norm() < 1e-12);
        for k in 1..10 {
            let v = invertible_path(&t, k as f64 / 10.0).unwrap();
            assert!(linalg::sigma_min(v.matrix()) > 0.0);
            assert!(membership_residual(v.matrix(), &c2) < 1e-12);
        }
        assert!((invertible_path(&t, 1.0).unwrap().matrix() - linalg::identity(2)).norm() < 1e-8);
        let sing = diag(&c2, &[1.0, 0.0]);
        assert!(matches!(invertible_path(&sing, 0.3), Err(Error::NotInvertible { .. })));
        assert!(matches!(invertible_path(&t, 1.3), Err(Error::InvalidParameter(_))));

        let mut rng = stream(7, "path", 5, 0);
        let c = random::random_conjugation(5, &mut rng);
        let g = random::random_sc(&c, &mut rng);
        for k in 0..50 {
            let v = invertible_path(&g, k as f64 / 49.0).unwrap();
            assert!(linalg::sigma_min(v.matrix()) > 0.0);
        }
        assert!((invertible_path(&g, 1.0).unwrap().matrix() - linalg::identity(5)).norm() < 1e-8);
    }
}
