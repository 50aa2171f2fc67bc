//! Conjugations on `C^n`: antilinear involutive isometries `x ↦ U·conj(x)`.
//!
//! A conjugation is stored as its symmetric unitary matrix `U`; the
//! antilinear action is only ever enacted by the methods below. The C-fixed
//! orthonormal basis is computed lazily and cached.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{self, conj, conj_vec, default_tol, C64, CMat, CVec, I, ONE};

#[derive(Debug)]
struct Inner {
    u: CMat,
    fixed_basis: OnceLock<CMat>,
}

/// A conjugation `C(x) = U·conj(x)` with `U` symmetric unitary.
///
/// Cloning is cheap; clones share the cached fixed basis.
#[derive(Debug, Clone)]
pub struct Conjugation {
    inner: Arc<Inner>,
}

impl Conjugation {
    /// Entrywise complex conjugation on `C^n` (`U = I`).
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let c = Self::wrap(linalg::identity(n));
        let _ = c.inner.fixed_basis.set(linalg::identity(n));
        Ok(c)
    }

    /// Validates `u` (unitary and symmetric within the default tolerance).
    pub fn from_unitary(u: CMat) -> Result<Self> {
        let tol = default_tol(u.nrows(), u.norm());
        Self::from_unitary_with_tol(u, tol)
    }

    pub fn from_unitary_with_tol(u: CMat, tol: f64) -> Result<Self> {
        let n = u.nrows();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.ncols(),
            });
        }
        let residual = linalg::unitarity_residual(&u);
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        let residual = (&u - u.transpose()).norm();
        if residual > tol {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(Self::wrap(u))
    }

    pub(crate) fn wrap(u: CMat) -> Self {
        Self {
            inner: Arc::new(Inner {
                u,
                fixed_basis: OnceLock::new(),
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.u.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.inner.u
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        &self.inner.u * conj_vec(x)
    }

    /// `C X C` as an ordinary matrix: `U·conj(X)·U*`.
    pub fn sandwich(&self, x: &CMat) -> CMat {
        let u = &self.inner.u;
        u * conj(x) * u.adjoint()
    }

    /// `Xᵗ = C X* C = U·Xᵀ·U*`.
    pub fn transpose_of(&self, x: &CMat) -> CMat {
        let u = &self.inner.u;
        u * x.transpose() * u.adjoint()
    }

    /// True when both handles name the same conjugation.
    pub fn same_as(&self, other: &Conjugation) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.u == other.inner.u
    }

    /// Unitary `B` whose columns satisfy `C(b) = b`.
    ///
    /// Candidates `(I+U)e_j` and `i(I−U)e_j` are all C-fixed, and inner
    /// products between fixed vectors are real, so pivoted Gram–Schmidt over
    /// them (largest residual first, lowest index on ties) stays fixed.
    pub fn fixed_basis(&self) -> &CMat {
        self.inner.fixed_basis.get_or_init(|| {
            let u = &self.inner.u;
            let n = u.nrows();
            let mut candidates = Vec::with_capacity(2 * n);
            for j in 0..n {
                let mut c = u.column(j).into_owned();
                c[j] += ONE;
                candidates.push(c);
            }
            for j in 0..n {
                let mut c = -u.column(j).into_owned();
                c[j] += ONE;
                candidates.push(c * I);
            }
            let basis = linalg::pivoted_orthonormalize(&candidates, n, 1e-8);
            assert_eq!(basis.len(), n, "fixed basis must span C^n");
            let basis: Vec<CVec> = basis
                .into_iter()
                .map(|b| {
                    let sym = (&b + self.apply(&b)).scale(0.5);
                    let norm = sym.norm();
                    sym.unscale(norm)
                })
                .collect();
            linalg::columns_to_matrix(n, &basis)
        })
    }

    /// Coordinates in the C-fixed frame: `B*·X·B`. In this frame `C` is
    /// entrywise conjugation.
    pub fn to_fixed_frame(&self, x: &CMat) -> CMat {
        let b = self.fixed_basis();
        b.adjoint() * x * b
    }

    pub fn from_fixed_frame(&self, a: &CMat) -> CMat {
        let b = self.fixed_basis();
        b * a * b.adjoint()
    }

    /// Direct sum `C_1 ⊕ C_2 ⊕ …` acting block-diagonally.
    pub fn direct_sum(parts: &[&Conjugation]) -> Result<Self> {
        let n: usize = parts.iter().map(|c| c.dim()).sum();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut u = CMat::zeros(n, n);
        let mut offset = 0;
        for c in parts {
            let k = c.dim();
            u.view_mut((offset, offset), (k, k)).copy_from(c.matrix());
            offset += k;
        }
        Ok(Self::wrap(u))
    }
}

fn check_same_dim(c1: &Conjugation, c2: &Conjugation) -> Result<()> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            found: c2.dim(),
        });
    }
    Ok(())
}

/// Unitary `W` with `W*·C1·W = C2`, built as `B1·B2*`.
pub fn equivalence_unitary(c1: &Conjugation, c2: &Conjugation) -> Result<CMat> {
    check_same_dim(c1, c2)?;
    Ok(c1.fixed_basis() * c2.fixed_basis().adjoint())
}

/// Unitary path `V(t)` from `I` to `w` through the principal logarithm.
///
/// When `w` has a spectral point near −1 the whole spectrum is first rotated
/// so that the widest angular gap straddles the branch cut.
pub(crate) fn unitary_path(w: &CMat, t: f64) -> CMat {
    let n = w.nrows();
    let (q, tri) = w.clone().schur().unpack();
    let eig: Vec<C64> = tri.diagonal().iter().copied().collect();
    let near_cut = eig.iter().any(|z| (z + ONE).norm() < 1e-6);
    let theta = if near_cut { rotation_for_gap(&eig) } else { 0.0 };
    let rot = C64::from_polar(1.0, -theta);
    let diag = CVec::from_iterator(
        n,
        eig.iter().map(|z| {
            let phase = (rot * z).arg();
            C64::from_polar(1.0, t * (phase + theta))
        }),
    );
    &q * CMat::from_diagonal(&diag) * q.adjoint()
}

fn rotation_for_gap(eig: &[C64]) -> f64 {
    let mut phases: Vec<f64> = eig.iter().map(|z| z.arg()).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut best_gap = 0.0;
    let mut best_mid = 0.0;
    for k in 0..phases.len() {
        let lo = phases[k];
        let hi = if k + 1 < phases.len() {
            phases[k + 1]
        } else {
            phases[0] + 2.0 * PI
        };
        if hi - lo > best_gap {
            best_gap = hi - lo;
            best_mid = 0.5 * (lo + hi);
        }
    }
    // rotate so the gap midpoint lands on the branch cut at π
    best_mid - PI
}

/// Point `t ∈ [0, 1]` on the path `V(t)*·C1·V(t)` from `C1` to `C2`.
pub fn conjugation_path(c1: &Conjugation, c2: &Conjugation, t: f64) -> Result<Conjugation> {
    check_same_dim(c1, c2)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("path parameter t = {t} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(c1.clone());
    }
    let w = equivalence_unitary(c1, c2)?;
    let v = unitary_path(&w, t);
    let u = v.adjoint() * c1.matrix() * conj(&v);
    // symmetrize away rounding
    let u = (&u + u.transpose()).scale(0.5);
    Conjugation::from_unitary(u)
}

/// Unimodular `α` with `U_C = α·U_D`, if one exists (then `S_C = S_D`).
pub fn same_sc(c: &Conjugation, d: &Conjugation) -> Result<Option<C64>> {
    check_same_dim(c, d)?;
    let (uc, ud) = (c.matrix(), d.matrix());
    let alpha = linalg::frobenius_inner(ud, uc) / C64::new(c.dim() as f64, 0.0);
    if alpha.norm() < 0.5 {
        return Ok(None);
    }
    let alpha = alpha / alpha.norm();
    let residual = (uc - ud * alpha).norm();
    if residual <= default_tol(c.dim(), uc.norm()) {
        Ok(Some(alpha))
    } else {
        Ok(None)
    }
}
