//! The spaces S_C (C-symmetric) and O_C (C-skew-symmetric) and their
//! Jordan, norm and duality structure.

use crate::conjugation::Conjugation;
use crate::decomposition;
use crate::error::{Error, Result};
use crate::linalg::{self, default_tol, C64, CMat, CVec, RMat};

/// A matrix `T` with `C T C = T*`.
#[derive(Debug, Clone)]
pub struct ScElement {
    conj: Conjugation,
    a: CMat,
}

/// A matrix `X` with `C X C = −X*`.
#[derive(Debug, Clone)]
pub struct OcElement {
    conj: Conjugation,
    a: CMat,
}

fn check_square(x: &CMat, c: &Conjugation) -> Result<()> {
    let n = c.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if x.nrows() != n { x.nrows() } else { x.ncols() },
        });
    }
    Ok(())
}

/// `‖X − Xᵗ‖_F / 2`, the distance from `X` to S_C.
pub fn membership_residual(x: &CMat, c: &Conjugation) -> f64 {
    0.5 * (x - c.transpose_of(x)).norm()
}

/// `‖X + Xᵗ‖_F / 2`, the distance from `X` to O_C.
pub fn skew_residual(x: &CMat, c: &Conjugation) -> f64 {
    0.5 * (x + c.transpose_of(x)).norm()
}

impl ScElement {
    /// Validates membership with the default tolerance.
    pub fn new(a: CMat, c: &Conjugation) -> Result<Self> {
        let tol = default_tol(c.dim(), a.norm());
        Self::with_tol(a, c, tol)
    }

    pub fn with_tol(a: CMat, c: &Conjugation, tol: f64) -> Result<Self> {
        check_square(&a, c)?;
        let residual = membership_residual(&a, c);
        if residual > tol {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(Self { conj: c.clone(), a })
    }

    /// Projects `a` onto S_C. Used to strip rounding noise from matrices that
    /// are members by construction.
    pub fn settle(a: CMat, c: &Conjugation) -> Self {
        let a = (&a + c.transpose_of(&a)).scale(0.5);
        Self { conj: c.clone(), a }
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn into_matrix(self) -> CMat {
        self.a
    }

    pub fn conjugation(&self) -> &Conjugation {
        &self.conj
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// The symmetric matrix `B* T B` in the C-fixed frame.
    pub fn fixed_frame(&self) -> CMat {
        self.conj.to_fixed_frame(&self.a)
    }
}

impl OcElement {
    pub fn new(a: CMat, c: &Conjugation) -> Result<Self> {
        check_square(&a, c)?;
        let residual = skew_residual(&a, c);
        if residual > default_tol(c.dim(), a.norm()) {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(Self { conj: c.clone(), a })
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn conjugation(&self) -> &Conjugation {
        &self.conj
    }
}

/// `½(X + C X* C)`.
pub fn sym_part(x: &CMat, c: &Conjugation) -> Result<ScElement> {
    check_square(x, c)?;
    Ok(ScElement::settle(x.clone(), c))
}

/// `½(X − C X* C)`.
pub fn skew_part(x: &CMat, c: &Conjugation) -> Result<OcElement> {
    check_square(x, c)?;
    let a = (x - c.transpose_of(x)).scale(0.5);
    Ok(OcElement { conj: c.clone(), a })
}

pub fn is_symmetric(x: &CMat, c: &Conjugation, tol: f64) -> Result<bool> {
    check_square(x, c)?;
    Ok(membership_residual(x, c) <= tol)
}

/// `A ∘ B = ½(AB + BA)` on plain matrices.
pub fn jordan(a: &CMat, b: &CMat) -> CMat {
    (a * b + b * a).scale(0.5)
}

pub fn jordan_product(a: &ScElement, b: &ScElement) -> Result<ScElement> {
    if !a.conj.same_as(&b.conj) {
        return Err(Error::ConjugationMismatch);
    }
    Ok(ScElement::settle(jordan(&a.a, &b.a), &a.conj))
}

/// `Xᵗ = C X* C`.
pub fn transpose_map(x: &CMat, c: &Conjugation) -> Result<CMat> {
    check_square(x, c)?;
    Ok(c.transpose_of(x))
}

/// Schatten `p`-norm; `p = 0` selects the operator norm.
pub fn schatten_norm(x: &CMat, p: f64) -> Result<f64> {
    let s = linalg::singular_values(x);
    if p == 0.0 {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    if p == 1.0 {
        return Ok(s.iter().sum());
    }
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = s.iter().map(|v| (v / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

pub fn trace_pair(a: &CMat, b: &CMat) -> Result<C64> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok((0..a.nrows())
        .map(|i| a.row(i).iter().zip(b.column(i).iter()).map(|(x, y)| x * y).sum::<C64>())
        .sum())
}

/// An element `X ∈ S_C` with `‖X‖ ≤ 1` and `tr(XK) = ‖K‖₁`.
///
/// From `K = C J |K|`, extend `J` to a full conjugation `J̃`; the unitary
/// `X = (C J̃)*` is C-symmetric and `tr(XK) = tr|K|`.
pub fn duality_attain(k: &ScElement) -> Result<(ScElement, f64)> {
    if k.a.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::ZeroInput);
    }
    let polar = decomposition::refined_polar(k);
    let full = decomposition::extend_partial_conjugation(&polar.j);
    let x = full.matrix() * k.conj.matrix().adjoint();
    let x = ScElement::settle(x, &k.conj);
    let value = trace_pair(x.matrix(), k.matrix())?.re;
    Ok((x, value))
}

/// `X = e f* + (Cf)(Ce)*`, an element of S_C with `1 ≤ ‖X‖ ≤ 2`.
pub fn rank_one_sym(e: &CVec, f: &CVec, c: &Conjugation) -> Result<ScElement> {
    for v in [e, f] {
        if v.len() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                found: v.len(),
            });
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm });
        }
    }
    Ok(ScElement::settle(rank_one_sym_raw(e, f, c), c))
}

pub(crate) fn rank_one_sym_raw(e: &CVec, f: &CVec, c: &Conjugation) -> CMat {
    e * f.adjoint() + c.apply(f) * c.apply(e).adjoint()
}

/// `D(x₁, x₂) = (C x₂, C x₁)` on `C^{2n}`.
pub fn doubling_conjugation(c: &Conjugation) -> Conjugation {
    let n = c.dim();
    let mut u = CMat::zeros(2 * n, 2 * n);
    u.view_mut((0, n), (n, n)).copy_from(c.matrix());
    u.view_mut((n, 0), (n, n)).copy_from(c.matrix());
    Conjugation::from_unitary(u).expect("antidiagonal blocks of a conjugation")
}

/// The Jordan embedding `X ↦ X ⊕ Xᵗ` into S_D, `D` the doubling conjugation.
pub fn doubling_embed(x: &CMat, c: &Conjugation) -> Result<ScElement> {
    doubling_embed_into(x, c, &doubling_conjugation(c))
}

/// As [`doubling_embed`], reusing a precomputed doubling conjugation.
pub fn doubling_embed_into(x: &CMat, c: &Conjugation, d: &Conjugation) -> Result<ScElement> {
    check_square(x, c)?;
    let n = c.dim();
    if d.dim() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: d.dim(),
        });
    }
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(x);
    m.view_mut((n, n), (n, n)).copy_from(&c.transpose_of(x));
    ScElement::new(m, d)
}

/// Largest `|‖A − λB‖ − ‖A + λB‖|` over the sampled `λ` (operator norm).
pub fn roberts_defect(a: &ScElement, b: &OcElement, lambdas: &[C64]) -> Result<f64> {
    if !a.conj.same_as(&b.conj) {
        return Err(Error::ConjugationMismatch);
    }
    Ok(lambdas
        .iter()
        .map(|&l| {
            let lb = b.matrix() * l;
            (linalg::op_norm(&(a.matrix() - &lb)) - linalg::op_norm(&(a.matrix() + &lb))).abs()
        })
        .fold(0.0, f64::max))
}

pub fn roberts_check(a: &ScElement, b: &OcElement, lambdas: &[C64], tol: f64) -> Result<bool> {
    Ok(roberts_defect(a, b, lambdas)? <= tol)
}

/// Orthonormal basis of real symmetric matrices: `E_ii` first, then
/// `(E_ij + E_ji)/√2` for `i < j` in lexicographic order.
pub fn symmetric_basis_real(n: usize) -> Vec<RMat> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut e = RMat::zeros(n, n);
        e[(i, i)] = 1.0;
        out.push(e);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = RMat::zeros(n, n);
            e[(i, j)] = s;
            e[(j, i)] = s;
            out.push(e);
        }
    }
    out
}

/// Basis of S_C: the real symmetric basis conjugated into the original frame.
pub fn sc_basis(c: &Conjugation) -> Vec<CMat> {
    symmetric_basis_real(c.dim())
        .iter()
        .map(|e| c.from_fixed_frame(&linalg::to_complex(e)))
        .collect()
}

/// Basis of O_C: `(E_ij − E_ji)/√2` for `i < j` in the fixed frame.
pub fn oc_basis(c: &Conjugation) -> Vec<CMat> {
    let n = c.dim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = C64::new(s, 0.0);
            e[(j, i)] = C64::new(-s, 0.0);
            out.push(c.from_fixed_frame(&e));
        }
    }
    out
}

/// Coordinates of a fixed-frame matrix against the symmetric basis.
pub fn symmetric_coords(a: &CMat) -> CVec {
    let n = a.nrows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        v.push(a[(i, i)]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            v.push((a[(i, j)] + a[(j, i)]) * s);
        }
    }
    CVec::from_vec(v)
}

/// Coordinates of a fixed-frame matrix against the skew basis.
pub fn skew_coords(a: &CMat) -> CVec {
    let n = a.nrows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            v.push((a[(i, j)] - a[(j, i)]) * s);
        }
    }
    CVec::from_vec(v)
}

/// Inverse of [`symmetric_coords`].
pub fn symmetric_from_coords(n: usize, v: &CVec) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = v[i];
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            a[(i, j)] = v[k] * s;
            a[(j, i)] = v[k] * s;
            k += 1;
        }
    }
    a
}
