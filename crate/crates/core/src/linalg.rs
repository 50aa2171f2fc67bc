//! Dense complex linear-algebra helpers shared by every module.
//!
//! Everything here is a thin layer over nalgebra: sorted SVD and Hermitian
//! eigen-decompositions, a Schur-based general eigensolver, null spaces,
//! pivoted orthonormalization and an incremental orthonormal span.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Project-wide default tolerance: `1e-12 * n * max(1, ‖A‖_F)`.
pub fn default_tol(n: usize, frobenius: f64) -> f64 {
    1e-12 * n.max(1) as f64 * frobenius.max(1.0)
}

/// Default tolerance for a square matrix.
pub fn tol_for(m: &CMat) -> f64 {
    default_tol(m.nrows(), m.norm())
}

/// Relative rank cutoff `1e-10 * max(1, σ_max)`.
pub fn rank_tol(sigma_max: f64) -> f64 {
    1e-10 * sigma_max.max(1.0)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `‖U*U − I‖_F`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

/// Frobenius inner product `⟨A, B⟩ = tr(A* B)`.
pub fn frobenius_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

pub struct Svd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns (not `V*`).
    pub v: CMat,
}

/// Full SVD with singular values sorted nonincreasing. Wide inputs are padded
/// with zero rows so that `v` is always square.
pub fn svd(m: &CMat) -> Svd {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = CMat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let dec = padded.svd(true, true);
    let u = dec.u.expect("svd u");
    let v = dec.v_t.expect("svd v_t").adjoint();
    let mut order: Vec<usize> = (0..dec.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        dec.singular_values[b]
            .partial_cmp(&dec.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sigma = order.iter().map(|&k| dec.singular_values[k]).collect();
    let u = CMat::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let v = CMat::from_fn(v.nrows(), order.len(), |i, j| v[(i, order[j])]);
    let u = if r < c { u.rows(0, r).into_owned() } else { u };
    Svd { u, sigma, v }
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn sigma_min(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()).scale(0.5);
    let dec = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        dec.eigenvalues[a]
            .partial_cmp(&dec.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vecs = CMat::from_fn(m.nrows(), order.len(), |i, j| dec.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
pub fn real_symmetric_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let h = (m + m.transpose()).scale(0.5);
    let dec = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        dec.eigenvalues[a]
            .partial_cmp(&dec.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vecs = RMat::from_fn(m.nrows(), order.len(), |i, j| dec.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Principal square root and functional calculus of a Hermitian PSD matrix.
pub fn hermitian_apply(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| C64::new(f(x), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.is_empty() {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Eigenvalues and unit eigenvectors (columns) of a general complex matrix.
///
/// Eigenvectors come from back-substitution on the triangular Schur factor;
/// near-coincident diagonal entries are perturbed in the same way LAPACK's
/// `trevc` does, so defective inputs yield an ill-conditioned (not NaN) basis.
pub fn eigen_decomposition(m: &CMat) -> (Vec<C64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let (q, t) = m.clone().schur().unpack();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut s = ZERO;
            for l in (j + 1)..=k {
                s += t[(j, l)] * y[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[(j, k)] = -s / denom;
        }
        let norm = y.column(k).norm();
        y.column_mut(k).unscale_mut(norm);
    }
    let vals = t.diagonal().iter().copied().collect();
    (vals, q * y)
}

/// Numerical kernel of `m` as an orthonormal set of columns. A singular value
/// counts as zero when it is at most `cutoff`.
pub fn null_space(m: &CMat, cutoff: f64) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    let dec = svd(m);
    let rank = dec.sigma.iter().filter(|&&s| s > cutoff).count();
    dec.v.columns(rank, cols - rank).into_owned()
}

/// Greedy pivoted Gram–Schmidt: repeatedly picks the candidate with the
/// largest remaining norm (ties resolved towards the lowest index) until
/// `max_count` vectors are chosen or every residual falls below `cutoff`.
pub fn pivoted_orthonormalize(candidates: &[CVec], max_count: usize, cutoff: f64) -> Vec<CVec> {
    let mut residuals: Vec<CVec> = candidates.to_vec();
    let mut used = vec![false; residuals.len()];
    let mut basis: Vec<CVec> = Vec::new();
    while basis.len() < max_count {
        let norms: Vec<f64> = residuals.iter().map(|r| r.norm()).collect();
        let best = norms
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(_, &x)| x)
            .fold(0.0, f64::max);
        if best <= cutoff {
            break;
        }
        let pivot = (0..residuals.len())
            .find(|&k| !used[k] && norms[k] >= best * (1.0 - 1e-10))
            .expect("pivot exists");
        used[pivot] = true;
        let mut b = residuals[pivot].clone();
        for q in &basis {
            let c = q.dotc(&b);
            b -= q * c;
        }
        let norm = b.norm();
        if norm <= cutoff {
            continue;
        }
        b.unscale_mut(norm);
        for (k, r) in residuals.iter_mut().enumerate() {
            if !used[k] {
                let c = b.dotc(r);
                *r -= &b * c;
            }
        }
        basis.push(b);
    }
    basis
}

pub fn columns_to_matrix(rows: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Incrementally grown orthonormal basis of a subspace of `C^d`.
#[derive(Debug, Clone)]
pub struct OrthoSpan {
    dim: usize,
    basis: Vec<CVec>,
    cutoff: f64,
}

impl OrthoSpan {
    pub fn new(dim: usize, cutoff: f64) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            cutoff,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() >= self.dim
    }

    pub fn basis(&self) -> &[CVec] {
        &self.basis
    }

    /// Adds `v` if it is independent of the current span (relative residual
    /// above the cutoff). Returns the new unit vector when added.
    pub fn insert(&mut self, v: &CVec) -> Option<CVec> {
        let norm = v.norm();
        if norm == 0.0 || self.is_full() {
            return None;
        }
        let mut r = v.unscale(norm);
        // two passes keep the basis orthonormal to working precision
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let rn = r.norm();
        if rn <= self.cutoff {
            return None;
        }
        r.unscale_mut(rn);
        self.basis.push(r.clone());
        Some(r)
    }
}

/// Bottleneck matching distance between two equal-size multisets of complex
/// numbers: the smallest `d` such that a perfect matching exists using only
/// pairs at distance `≤ d`.
pub fn bottleneck_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut thresholds: Vec<f64> = dist.iter().flatten().copied().collect();
    thresholds.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    thresholds.dedup();
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(&dist, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

fn perfect_matching_exists(dist: &[Vec<f64>], limit: f64) -> bool {
    let n = dist.len();
    let mut match_of_right: Vec<Option<usize>> = vec![None; n];
    fn augment(
        u: usize,
        dist: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        match_of_right: &mut [Option<usize>],
    ) -> bool {
        for v in 0..dist.len() {
            if dist[u][v] <= limit && !seen[v] {
                seen[v] = true;
                if match_of_right[v].is_none_or(|w| augment(w, dist, limit, seen, match_of_right)) {
                    match_of_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|u| {
        let mut seen = vec![false; n];
        augment(u, dist, limit, &mut seen, &mut match_of_right)
    })
}

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    let directed = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
