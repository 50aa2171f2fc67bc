//! The Jordan multiplier `L_T : X ↦ T ∘ X` on S_C as an explicit matrix,
//! its spectrum and kernels, and the equation `TX + XT = Y`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec};
use crate::random;
use crate::sc_space::{self, is_symmetric, jordan, ScElement};

/// Matrix of `L_T` against the orthonormal S_C basis (see
/// [`sc_space::sc_basis`]); `m = n(n+1)/2`.
#[derive(Debug, Clone)]
pub struct JordanMultMatrix {
    pub t: ScElement,
    pub m: CMat,
}

/// `A ∘ E` for a basis element `E = s·(e_i e_jᵀ + e_j e_iᵀ)` given sparsely.
fn jordan_with_unit(a: &CMat, i: usize, j: usize, s: f64) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros(n, n);
    let scale = C64::new(0.5 * s, 0.0);
    let pairs: &[(usize, usize)] = if i == j { &[(i, i)] } else { &[(i, j), (j, i)] };
    for &(p, q) in pairs {
        // A·e_p e_qᵀ puts column p of A into column q; e_p e_qᵀ·A puts row q into row p
        for r in 0..n {
            out[(r, q)] += a[(r, p)] * scale;
            out[(p, r)] += a[(q, r)] * scale;
        }
    }
    out
}

fn basis_index_pairs(n: usize) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j, std::f64::consts::FRAC_1_SQRT_2));
        }
    }
    out
}

impl JordanMultMatrix {
    pub fn build(t: &ScElement) -> Self {
        let n = t.dim();
        let a = t.fixed_frame();
        let pairs = basis_index_pairs(n);
        let cols: Vec<CVec> = pairs
            .par_iter()
            .map(|&(i, j, s)| sc_space::symmetric_coords(&jordan_with_unit(&a, i, j, s)))
            .collect();
        Self {
            t: t.clone(),
            m: linalg::columns_to_matrix(pairs.len(), &cols),
        }
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    /// Coordinates of `X ∈ S_C` against the S_C basis.
    pub fn coords(&self, x: &CMat) -> CVec {
        sc_space::symmetric_coords(&self.t.conjugation().to_fixed_frame(x))
    }

    pub fn from_coords(&self, v: &CVec) -> CMat {
        let n = self.t.dim();
        self.t
            .conjugation()
            .from_fixed_frame(&sc_space::symmetric_from_coords(n, v))
    }

    /// `L_T(X)` computed through the matrix.
    pub fn apply(&self, x: &CMat) -> CMat {
        self.from_coords(&(&self.m * self.coords(x)))
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        linalg::eigenvalues(&self.m)
    }
}

pub fn build_l(t: &ScElement) -> JordanMultMatrix {
    JordanMultMatrix::build(t)
}

/// Matrix of `X ↦ T ∘ X` restricted to O_C, against the skew basis.
pub fn build_l_skew(t: &ScElement) -> CMat {
    let n = t.dim();
    let a = t.fixed_frame();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = C64::new(s, 0.0);
            e[(j, i)] = C64::new(-s, 0.0);
            cols.push(sc_space::skew_coords(&jordan(&a, &e)));
        }
    }
    linalg::columns_to_matrix(n * n.saturating_sub(1) / 2, &cols)
}

pub fn spectrum_l(t: &ScElement) -> Vec<C64> {
    build_l(t).eigenvalues()
}

/// `{½(λ_i + λ_j) : i ≤ j}` (or `i < j` when `strict`).
pub fn pairwise_means(eig: &[C64], strict: bool) -> Vec<C64> {
    let mut out = Vec::new();
    for i in 0..eig.len() {
        let start = if strict { i + 1 } else { i };
        for j in start..eig.len() {
            out.push((eig[i] + eig[j]) * 0.5);
        }
    }
    out
}

/// Comparison of the spectrum of `L_T` with the pairwise means of `σ(T)`.
#[derive(Debug, Clone)]
pub struct SpectrumComparison {
    pub l_eigenvalues: Vec<C64>,
    pub t_eigenvalues: Vec<C64>,
    pub pair_means: Vec<C64>,
    /// Bottleneck distance between the two multisets.
    pub multiset_distance: f64,
    /// Hausdorff distance between the two sets.
    pub set_distance: f64,
    pub t_norm: f64,
}

pub fn compare_spectrum(t: &ScElement) -> SpectrumComparison {
    let l_eigenvalues = spectrum_l(t);
    let t_eigenvalues = linalg::eigenvalues(t.matrix());
    let pair_means = pairwise_means(&t_eigenvalues, false);
    SpectrumComparison {
        multiset_distance: linalg::bottleneck_distance(&l_eigenvalues, &pair_means),
        set_distance: linalg::hausdorff_distance(&l_eigenvalues, &pair_means),
        t_norm: linalg::op_norm(t.matrix()),
        l_eigenvalues,
        t_eigenvalues,
        pair_means,
    }
}

#[derive(Debug, Clone)]
pub struct NormReport {
    pub t_norm: f64,
    /// `‖L_T(I)‖`.
    pub at_identity: f64,
    /// Largest sampled `‖T ∘ X‖ / ‖X‖`.
    pub max_ratio: f64,
    pub samples: usize,
}

impl NormReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_ratio <= self.t_norm + tol && (self.at_identity - self.t_norm).abs() <= tol
    }
}

/// Checks `‖T ∘ X‖ ≤ ‖T‖ ‖X‖` on random `X ∈ S_C` and attainment at `X = I`.
pub fn norm_check<R: Rng + ?Sized>(t: &ScElement, samples: usize, rng: &mut R) -> Result<NormReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let c = t.conjugation();
    let t_norm = linalg::op_norm(t.matrix());
    let id = linalg::identity(t.dim());
    let at_identity = linalg::op_norm(&jordan(t.matrix(), &id));
    let mut max_ratio: f64 = 0.0;
    for _ in 0..samples {
        let x = random::random_sc(c, rng);
        let xn = linalg::op_norm(x.matrix());
        if xn > 0.0 {
            max_ratio = max_ratio.max(linalg::op_norm(&jordan(t.matrix(), x.matrix())) / xn);
        }
    }
    Ok(NormReport {
        t_norm,
        at_identity,
        max_ratio,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SylvesterMethod {
    EigenFrame,
    Dense,
}

#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub x: CMat,
    pub method: SylvesterMethod,
    /// `max(1, ‖T‖)/min_{i≤j} |λ_i + λ_j|`.
    pub kappa: f64,
    /// `‖TX + XT − Y‖_F`.
    pub residual: f64,
    pub projected_to_sc: bool,
}

/// Solves `T X + X T = Y`.
///
/// Primary route: in an eigenframe `T = V Λ V⁻¹`, `X̂_ij = Ŷ_ij/(λ_i + λ_j)`.
/// If the eigenvector matrix is ill conditioned the dense Kronecker system
/// `(I ⊗ T + Tᵀ ⊗ I) vec X = vec Y` is solved instead. When `Y ∈ S_C` the
/// unique solution lies in S_C and the result is projected there.
pub fn solve_sylvester(t: &ScElement, y: &CMat) -> Result<SylvesterSolution> {
    let n = t.dim();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.nrows(),
        });
    }
    let tm = t.matrix();
    let t_norm = linalg::op_norm(tm);
    let threshold = 1e-8 * t_norm.max(1.0);
    let (eig, v) = linalg::eigen_decomposition(tm);
    let mut worst = (0, 0, f64::INFINITY);
    for i in 0..n {
        for j in i..n {
            let s = (eig[i] + eig[j]).norm();
            if s < worst.2 {
                worst = (i, j, s);
            }
        }
    }
    if worst.2 <= threshold {
        return Err(Error::SingularJordanMultiplier {
            i: worst.0,
            j: worst.1,
            value: worst.2,
        });
    }
    let kappa = t_norm.max(1.0) / worst.2;
    let sv = linalg::singular_values(&v);
    let cond = sv[0] / sv[n - 1];
    // an eigenframe that does not reproduce Y (defective T) is discarded
    let accept = 1e-10 * (1.0 + t_norm) * y.norm().max(f64::MIN_POSITIVE);
    let eigen_frame = if cond.is_finite() && cond <= 1e10 {
        v.clone()
            .try_inverse()
            .map(|vinv| {
                let yh = &vinv * y * &v;
                let xh = CMat::from_fn(n, n, |i, j| yh[(i, j)] / (eig[i] + eig[j]));
                &v * xh * vinv
            })
            .filter(|x| (tm * x + x * tm - y).norm() <= accept)
    } else {
        None
    };
    let (mut x, method) = match eigen_frame {
        Some(x) => (x, SylvesterMethod::EigenFrame),
        None => (dense_sylvester(tm, y)?, SylvesterMethod::Dense),
    };
    let c = t.conjugation();
    let projected_to_sc = is_symmetric(y, c, linalg::tol_for(y))?;
    if projected_to_sc {
        x = sc_space::sym_part(&x, c)?.into_matrix();
    }
    let residual = (tm * &x + &x * tm - y).norm();
    Ok(SylvesterSolution {
        x,
        method,
        kappa,
        residual,
        projected_to_sc,
    })
}

fn dense_sylvester(t: &CMat, y: &CMat) -> Result<CMat> {
    let n = t.nrows();
    let id = linalg::identity(n);
    let system = id.kronecker(t) + t.transpose().kronecker(&id);
    let rhs = CVec::from_column_slice(y.as_slice());
    let smin = linalg::sigma_min(&system);
    if smin <= 1e-13 * linalg::op_norm(&system).max(1.0) {
        return Err(Error::NonDiagonalizable);
    }
    let sol = system.lu().solve(&rhs).ok_or(Error::NonDiagonalizable)?;
    Ok(CMat::from_column_slice(n, n, sol.as_slice()))
}

/// Kernel of `L_T − μ` plus a check of the pair eigenvectors
/// `X = e (Cg)* + g (Ce)*` built from eigenvectors `Te = λe`, `Tg = νg`
/// with `½(λ + ν) = μ`.
#[derive(Debug, Clone)]
pub struct KernelAnalysis {
    pub dimension: usize,
    /// S_C elements spanning the kernel.
    pub basis: Vec<CMat>,
    /// Largest relative distance of a pair eigenvector from the kernel;
    /// `None` when no eigenvalue pair averages to `μ`.
    pub pair_residual: Option<f64>,
}

pub fn pair_eigenvector(t: &ScElement, e: &CVec, g: &CVec) -> CMat {
    let c = t.conjugation();
    e * c.apply(g).adjoint() + g * c.apply(e).adjoint()
}

pub fn kernel_analysis(t: &ScElement, mu: C64) -> KernelAnalysis {
    let l = build_l(t);
    let m = l.size();
    let shifted = &l.m - CMat::identity(m, m) * mu;
    let top = linalg::op_norm(&shifted);
    let kernel = linalg::null_space(&shifted, linalg::rank_tol(top));
    let basis: Vec<CMat> = (0..kernel.ncols())
        .map(|j| l.from_coords(&kernel.column(j).into_owned()))
        .collect();

    let (eig, vecs) = linalg::eigen_decomposition(t.matrix());
    let match_tol = 1e-8 * (1.0 + linalg::op_norm(t.matrix()));
    let mut pair_residual: Option<f64> = None;
    for i in 0..eig.len() {
        for j in i..eig.len() {
            if ((eig[i] + eig[j]) * 0.5 - mu).norm() > match_tol {
                continue;
            }
            let x = pair_eigenvector(t, &vecs.column(i).into_owned(), &vecs.column(j).into_owned());
            let coords = l.coords(&x);
            let norm = coords.norm();
            if norm < 1e-8 {
                continue;
            }
            let proj = &kernel * (kernel.adjoint() * &coords);
            let r = (&coords - proj).norm() / norm;
            pair_residual = Some(pair_residual.map_or(r, |p: f64| p.max(r)));
        }
    }
    KernelAnalysis {
        dimension: kernel.ncols(),
        basis,
        pair_residual,
    }
}

/// `L_T` relative residual of the pair eigenvector for eigenpairs `i, j`.
pub fn pair_eigen_residual(t: &ScElement, i: usize, j: usize) -> Option<f64> {
    let (eig, vecs) = linalg::eigen_decomposition(t.matrix());
    let x = pair_eigenvector(t, &vecs.column(i).into_owned(), &vecs.column(j).into_owned());
    let norm = x.norm();
    if norm < 1e-8 {
        return None;
    }
    let lx = jordan(t.matrix(), &x);
    let mean = (eig[i] + eig[j]) * 0.5;
    Some((lx - &x * mean).norm() / norm)
}

/// `{½(λ_i + λ_j)}` for the full `n²` pair multiset of `½τ_{T,−T}`.
pub fn rosenblum_half_spectrum(eig: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(eig.len() * eig.len());
    for a in eig {
        for b in eig {
            out.push((a + b) * 0.5);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugation::Conjugation;
    use crate::random::stream;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(cj: &Conjugation, d: &[C64]) -> ScElement {
        let m = CMat::from_diagonal(&CVec::from_column_slice(d));
        ScElement::new(cj.from_fixed_frame(&m), cj).unwrap()
    }

    #[test]
    fn build_examples() {
        let cj = Conjugation::standard(3).unwrap();
        let id = ScElement::new(linalg::identity(3), &cj).unwrap();
        assert!((build_l(&id).m - linalg::identity(6)).norm() < 1e-15);
        let zero = ScElement::new(CMat::zeros(3, 3), &cj).unwrap();
        assert_eq!(build_l(&zero).m.norm(), 0.0);

        let c2 = Conjugation::standard(2).unwrap();
        let (a, b) = (c(2., 1.), c(-0.5, 3.));
        let l = build_l(&diag(&c2, &[a, b]));
        // basis order: E11, E22, (E12 + E21)/√2
        let expect = CMat::from_diagonal(&CVec::from_vec(vec![a, b, (a + b) * 0.5]));
        assert!((l.m - expect).norm() < 1e-15);
    }

    #[test]
    fn matrix_agrees_with_direct_product() {
        let mut rng = stream(1, "lt", 5, 0);
        let cj = random::random_conjugation(5, &mut rng);
        for _ in 0..20 {
            let t = random::random_sc(&cj, &mut rng);
            let x = random::random_sc(&cj, &mut rng);
            let l = build_l(&t);
            let direct = jordan(t.matrix(), x.matrix());
            assert!((l.apply(x.matrix()) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let s = spectrum_l(&diag(&c2, &[c(1., 0.), c(-1., 0.)]));
        let want = [c(1., 0.), c(0., 0.), c(-1., 0.)];
        assert!(linalg::bottleneck_distance(&s, &want) < 1e-14);

        let c4 = Conjugation::standard(4).unwrap();
        let s = spectrum_l(&ScElement::new(linalg::identity(4), &c4).unwrap());
        assert!(s.iter().all(|z| (z - c(1., 0.)).norm() < 1e-14) && s.len() == 10);

        let mut rng = stream(2, "lt", 3, 0);
        let cj = random::random_conjugation(3, &mut rng);
        let eig = [c(2., 0.), c(0., 3.), c(-1., 0.)];
        let t = random::random_with_spectrum(&cj, &eig, &mut rng);
        let want = [c(2., 0.), c(0., 3.), c(-1., 0.), c(1., 1.5), c(0.5, 0.), c(-0.5, 1.5)];
        assert!(linalg::bottleneck_distance(&spectrum_l(&t), &want) < 1e-9);
    }

    #[test]
    fn random_spectrum_matches_pair_means() {
        for n in 2..=6 {
            let mut rng = stream(3, "lt", n, 0);
            let cj = random::random_conjugation(n, &mut rng);
            let t = random::random_sc(&cj, &mut rng);
            let cmp = compare_spectrum(&t);
            assert!(cmp.set_distance <= 1e-7 * (1.0 + cmp.t_norm));
            assert!(cmp.multiset_distance <= 1e-7 * (1.0 + cmp.t_norm));
        }
    }

    #[test]
    fn skew_restriction_completes_the_rosenblum_spectrum() {
        let mut rng = stream(4, "lt", 4, 0);
        let cj = random::random_conjugation(4, &mut rng);
        let t = random::random_sc(&cj, &mut rng);
        let eig = linalg::eigenvalues(t.matrix());
        let skew = linalg::eigenvalues(&build_l_skew(&t));
        assert!(linalg::bottleneck_distance(&skew, &pairwise_means(&eig, true)) < 1e-9);
        let mut union = spectrum_l(&t);
        union.extend(skew);
        assert!(linalg::bottleneck_distance(&union, &rosenblum_half_spectrum(&eig)) < 1e-9);
        // the skew restriction maps O_C into O_C
        let k = sc_space::skew_part(&random::ginibre(4, &mut rng), &cj).unwrap();
        assert!(sc_space::skew_residual(&jordan(t.matrix(), k.matrix()), &cj) < 1e-12);
    }

    #[test]
    fn norm_check_examples() {
        let mut rng = stream(5, "lt", 4, 0);
        let cj = random::random_conjugation(4, &mut rng);
        let id = ScElement::new(linalg::identity(4), &cj).unwrap();
        let r = norm_check(&id, 10, &mut rng).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-12 && r.passed(1e-12));
        let t = random::random_sc(&cj, &mut rng);
        let r = norm_check(&t, 100, &mut rng).unwrap();
        assert!(r.passed(1e-10));
        assert_eq!(r.at_identity, linalg::op_norm(t.matrix()));

        let c2 = Conjugation::standard(2).unwrap();
        let i = c(0., 1.);
        let t = ScElement::new(CMat::from_row_slice(2, 2, &[c(0., 0.), i, i, c(0., 0.)]), &c2).unwrap();
        let r = norm_check(&t, 50, &mut rng).unwrap();
        assert!((r.t_norm - 1.0).abs() < 1e-14 && r.max_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn sylvester_examples() {
        let c2 = Conjugation::standard(2).unwrap();
        let mut rng = stream(6, "syl", 2, 0);
        let y = random::ginibre(2, &mut rng);
        let id = ScElement::new(linalg::identity(2), &c2).unwrap();
        let sol = solve_sylvester(&id, &y).unwrap();
        assert!((sol.x - y.scale(0.5)).norm() < 1e-14);

        let t = diag(&c2, &[c(1., 0.), c(-1., 0.)]);
        match solve_sylvester(&t, &y) {
            Err(Error::SingularJordanMultiplier { i, j, value }) => {
                assert_eq!((i, j), (0, 1));
                assert!(value < 1e-12);
            }
            other => panic!("expected singular multiplier, got {other:?}"),
        }

        let t = diag(&c2, &[c(1., 0.), c(2., 0.)]);
        let sol = solve_sylvester(&t, &linalg::identity(2)).unwrap();
        let want = CMat::from_diagonal(&CVec::from_vec(vec![c(0.5, 0.), c(0.25, 0.)]));
        assert!((sol.x - want).norm() < 1e-14);
    }

    #[test]
    fn sylvester_preserves_symmetry_and_falls_back_on_defective_input() {
        let mut rng = stream(7, "syl", 6, 0);
        let cj = random::random_conjugation(6, &mut rng);
        let shift = ScElement::new(linalg::identity(6).scale(3.0), &cj).unwrap();
        let t = ScElement::settle(random::random_sc(&cj, &mut rng).matrix() + shift.matrix(), &cj);
        let y = random::random_sc(&cj, &mut rng);
        let sol = solve_sylvester(&t, y.matrix()).unwrap();
        assert!(sol.projected_to_sc);
        assert!(sc_space::membership_residual(&sol.x, &cj) < 1e-12);
        assert!(sol.residual <= 1e-8 * sol.kappa * y.matrix().norm());

        // a symmetric Jordan block: nilpotent part N = [[1, i], [i, −1]] plus 2·I
        let c2 = Conjugation::standard(2).unwrap();
        let i = c(0., 1.);
        let jb = CMat::from_row_slice(2, 2, &[c(3., 0.), i, i, c(1., 0.)]);
        let t = ScElement::new(jb, &c2).unwrap();
        let y = random::ginibre(2, &mut rng);
        let sol = solve_sylvester(&t, &y).unwrap();
        assert_eq!(sol.method, SylvesterMethod::Dense);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn block_example_kernels() {
        for k in [2usize, 4] {
            let half = Conjugation::standard(k).unwrap();
            let block = Conjugation::direct_sum(&[&half, &half]).unwrap();
            let mut d = vec![c(1., 0.); k];
            d.extend(vec![c(-1., 0.); k]);
            let t = diag(&block, &d);
            let spec = spectrum_l(&t);
            for z in &spec {
                let ok = [0.0, 1.0, -1.0].iter().any(|&v| (z - c(v, 0.)).norm() < 1e-12);
                assert!(ok, "unexpected eigenvalue {z}");
            }
            assert_eq!(kernel_analysis(&t, c(0., 0.)).dimension, k * k);
            assert_eq!(kernel_analysis(&t, c(1., 0.)).dimension, k * (k + 1) / 2);
            assert_eq!(kernel_analysis(&t, c(-1., 0.)).dimension, k * (k + 1) / 2);
        }
        let c2 = Conjugation::standard(2).unwrap();
        let t = diag(&c2, &[c(1., 0.), c(2., 0.)]);
        let ka = kernel_analysis(&t, c(1.5, 0.));
        assert_eq!(ka.dimension, 1);
        let b = &ka.basis[0];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[(0, 1)].norm() - s).abs() < 1e-14 && b[(0, 0)].norm() < 1e-14);
        assert!(ka.pair_residual.unwrap() < 1e-12);
    }

    #[test]
    fn pair_eigenvectors_on_random_input() {
        let mut rng = stream(8, "lt", 5, 0);
        let cj = random::random_conjugation(5, &mut rng);
        let t = random::random_sc(&cj, &mut rng);
        for i in 0..5 {
            for j in i..5 {
                if let Some(r) = pair_eigen_residual(&t, i, j) {
                    assert!(r < 1e-9, "pair ({i}, {j}) residual {r}");
                }
            }
        }
    }
}
