//! Takagi factorization and the refined polar decomposition `T = C J |T|`.

use crate::conjugation::Conjugation;
use crate::error::{Error, Result};
use crate::linalg::{self, conj, rank_tol, tol_for, C64, CMat, CVec, RMat, ZERO};
use crate::sc_space::ScElement;

/// `A = Q Σ Qᵀ` with `Q` unitary and `σ` nonincreasing.
#[derive(Debug, Clone)]
pub struct TakagiFactors {
    pub q: CMat,
    pub sigma: Vec<f64>,
}

impl TakagiFactors {
    pub fn reconstruct(&self) -> CMat {
        let d = CVec::from_iterator(self.sigma.len(), self.sigma.iter().map(|&s| C64::new(s, 0.0)));
        &self.q * CMat::from_diagonal(&d) * self.q.transpose()
    }
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Uses the real symmetric embedding `M = [[Re A, Im A], [Im A, −Re A]]`:
/// an eigenvector `[x; y]` of `M` with eigenvalue `σ > 0` gives
/// `q = x + iy` with `A·conj(q) = σ·q`. Eigenvalues of `M` come in pairs
/// `±σ`, so the near-zero eigenspace has real dimension `2k` and carries the
/// `k`-dimensional complex kernel.
pub fn takagi(a: &CMat) -> Result<TakagiFactors> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let residual = (a - a.transpose()).norm();
    if residual > tol_for(a) {
        return Err(Error::NotSymmetric { residual });
    }
    if a.iter().all(|z| *z == ZERO) {
        return Ok(TakagiFactors {
            q: linalg::identity(n),
            sigma: vec![0.0; n],
        });
    }
    let a = (a + a.transpose()).scale(0.5);
    let re = linalg::real_part(&a);
    let im = linalg::imag_part(&a);
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&re);
    m.view_mut((0, n), (n, n)).copy_from(&im);
    m.view_mut((n, 0), (n, n)).copy_from(&im);
    m.view_mut((n, n), (n, n)).copy_from(&(-&re));
    let (vals, vecs) = linalg::real_symmetric_eigen(&m);

    let as_complex = |col: usize| -> CVec {
        CVec::from_fn(n, |i, _| C64::new(vecs[(i, col)], vecs[(i + n, col)]))
    };
    let cutoff = rank_tol(vals[2 * n - 1].abs());
    let positive: Vec<usize> = (0..2 * n).rev().filter(|&k| vals[k] > cutoff).take(n).collect();
    let mut q_cols: Vec<CVec> = Vec::with_capacity(n);
    let mut sigma: Vec<f64> = Vec::with_capacity(n);
    for &k in &positive {
        let v = as_complex(k);
        let norm = v.norm();
        q_cols.push(v.unscale(norm));
        sigma.push(vals[k]);
    }

    let k = n - positive.len();
    if k > 0 {
        let mut near_zero: Vec<usize> = (0..2 * n).collect();
        near_zero.sort_by(|&x, &y| vals[x].abs().partial_cmp(&vals[y].abs()).unwrap_or(std::cmp::Ordering::Equal));
        let z_cols: Vec<CVec> = near_zero.iter().take(2 * k).map(|&c| as_complex(c)).collect();
        let z = linalg::columns_to_matrix(n, &z_cols);
        let dec = linalg::svd(&z);
        let mut kernel: Vec<(f64, CVec)> = (0..k)
            .map(|j| {
                let mut v = dec.u.column(j).into_owned();
                // remove any leakage onto the positive block
                for q in &q_cols {
                    let c = q.dotc(&v);
                    v -= q * c;
                }
                let norm = v.norm();
                v.unscale_mut(norm);
                ((&a * linalg::conj_vec(&v)).norm(), v)
            })
            .collect();
        kernel.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        for (s, v) in kernel {
            sigma.push(s);
            q_cols.push(v);
        }
    }
    Ok(TakagiFactors {
        q: linalg::columns_to_matrix(n, &q_cols),
        sigma,
    })
}

/// Antilinear partial isometry `x ↦ V·conj(x)`, a conjugation on its support.
#[derive(Debug, Clone)]
pub struct PartialConjugation {
    pub v: CMat,
}

impl PartialConjugation {
    pub fn apply(&self, x: &CVec) -> CVec {
        &self.v * linalg::conj_vec(x)
    }

    /// `V·conj(V)`, the orthogonal projection onto the support.
    pub fn support_projection(&self) -> CMat {
        &self.v * conj(&self.v)
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }
}

/// `T = C J |T|` with `J |T| = |T| J`.
#[derive(Debug, Clone)]
pub struct RefinedPolar {
    pub j: PartialConjugation,
    pub p: CMat,
    pub support_rank: usize,
}

impl RefinedPolar {
    /// `‖T − C J P‖_F`, where `C J P` is the linear map `U·conj(V)·P`.
    pub fn factor_residual(&self, t: &ScElement) -> f64 {
        let cj = t.conjugation().matrix() * conj(&self.j.v);
        (t.matrix() - cj * &self.p).norm()
    }

    /// `‖J P − P J‖_F`, as antilinear maps `V·conj(P)` and `P·V`.
    pub fn commute_residual(&self) -> f64 {
        (&self.j.v * conj(&self.p) - &self.p * &self.j.v).norm()
    }
}

pub fn refined_polar(t: &ScElement) -> RefinedPolar {
    let c = t.conjugation();
    let n = t.dim();
    let a = t.fixed_frame();
    let a = (&a + a.transpose()).scale(0.5);
    let tk = takagi(&a).expect("fixed-frame matrix of an S_C element is symmetric");
    let cutoff = rank_tol(tk.sigma.first().copied().unwrap_or(0.0));
    let support_rank = tk.sigma.iter().filter(|&&s| s > cutoff).count();
    let qbar = conj(&tk.q);
    let sigma = CMat::from_diagonal(&CVec::from_iterator(n, tk.sigma.iter().map(|&s| C64::new(s, 0.0))));
    let pi = CMat::from_diagonal(&CVec::from_fn(n, |i, _| {
        if i < support_rank {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    }));
    let modulus = &qbar * sigma * tk.q.transpose();
    let vj = &qbar * pi * tk.q.adjoint();
    let b = c.fixed_basis();
    let p = b * modulus * b.adjoint();
    let p = (&p + p.adjoint()).scale(0.5);
    let v = b * vj * b.transpose();
    let v = (&v + v.transpose()).scale(0.5);
    RefinedPolar {
        j: PartialConjugation { v },
        p,
        support_rank,
    }
}

/// Extends `J` to a full conjugation by installing entrywise conjugation in
/// an orthonormal frame `K` of the kernel: `Ṽ = V + K·Kᵀ`.
pub fn extend_partial_conjugation(j: &PartialConjugation) -> Conjugation {
    let n = j.dim();
    let proj = j.support_projection();
    let rank = linalg::trace(&proj).re.round().max(0.0) as usize;
    let mut v = j.v.clone();
    if rank < n {
        let comp = linalg::identity(n) - proj;
        let candidates: Vec<CVec> = (0..n).map(|k| comp.column(k).into_owned()).collect();
        let kernel = linalg::pivoted_orthonormalize(&candidates, n - rank, 1e-6);
        let k = linalg::columns_to_matrix(n, &kernel);
        v += &k * k.transpose();
    }
    Conjugation::wrap((&v + v.transpose()).scale(0.5))
}
