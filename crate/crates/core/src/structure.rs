//! Structural predicates: Jordan automorphisms, normality, generation of the
//! full matrix algebra, Jordan simplicity and irreducibility.

use rand::Rng;

use crate::conjugation::Conjugation;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, OrthoSpan};
use crate::random;
use crate::sc_space::{self, jordan, membership_residual, ScElement};

#[derive(Debug, Clone)]
pub struct AutomorphismReport {
    /// Some unimodular multiple `αV` commutes with `C`.
    pub commutes_with_c: bool,
    pub alpha: Option<C64>,
    /// Exact check: `V E V*` lies in S_C for every basis element `E`.
    pub preserves_sc: bool,
    /// Largest membership residual of `V X V*` over the sampled `X`.
    pub sampled_membership: f64,
    pub preserves_product: f64,
    pub preserves_adjoint: f64,
    pub isometric: f64,
    pub counterexample: Option<CMat>,
}

impl AutomorphismReport {
    pub fn consistent(&self) -> bool {
        self.commutes_with_c == self.preserves_sc && self.preserves_sc == self.counterexample.is_none()
    }
}

/// Tests whether `X ↦ V X V*` is a Jordan automorphism of S_C.
///
/// `αV` commutes with `C` exactly when `U·conj(V) = α²·V·U`; the scalar
/// `s = α²` is the least-squares fit `⟨VU, U·conj(V)⟩/‖VU‖²`.
pub fn check_jordan_automorphism<R: Rng + ?Sized>(
    v: &CMat,
    c: &Conjugation,
    samples: usize,
    rng: &mut R,
) -> Result<AutomorphismReport> {
    let n = c.dim();
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.nrows(),
        });
    }
    let residual = linalg::unitarity_residual(v);
    if residual > 1e-10 * n as f64 {
        return Err(Error::NotUnitary { residual });
    }
    let tol = 1e-10 * n as f64;
    let u = c.matrix();
    let vu = v * u;
    let target = u * linalg::conj(v);
    let s = linalg::frobenius_inner(&vu, &target) / C64::new(vu.norm_squared(), 0.0);
    let commutes_with_c = (&target - &vu * s).norm() <= tol && (s.norm() - 1.0).abs() <= tol;
    let alpha = commutes_with_c.then(|| s.sqrt());

    let mut counterexample = None;
    for e in sc_space::sc_basis(c) {
        let image = v * &e * v.adjoint();
        if membership_residual(&image, c) > tol {
            counterexample = Some(e);
            break;
        }
    }
    let preserves_sc = counterexample.is_none();

    let mut report = AutomorphismReport {
        commutes_with_c,
        alpha,
        preserves_sc,
        sampled_membership: 0.0,
        preserves_product: 0.0,
        preserves_adjoint: 0.0,
        isometric: 0.0,
        counterexample,
    };
    let phi = |x: &CMat| v * x * v.adjoint();
    for _ in 0..samples {
        let x = random::random_sc(c, rng);
        let y = random::random_sc(c, rng);
        let (px, py) = (phi(x.matrix()), phi(y.matrix()));
        report.sampled_membership = report.sampled_membership.max(membership_residual(&px, c));
        let prod = phi(&jordan(x.matrix(), y.matrix())) - jordan(&px, &py);
        report.preserves_product = report.preserves_product.max(prod.norm());
        let adj = phi(&x.matrix().adjoint()) - px.adjoint();
        report.preserves_adjoint = report.preserves_adjoint.max(adj.norm());
        let iso = (linalg::op_norm(&px) - linalg::op_norm(x.matrix())).abs();
        report.isometric = report.isometric.max(iso);
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct NormalityReport {
    /// `‖TT* − T*T‖_F`.
    pub normal_residual: f64,
    pub normal: bool,
    /// Membership residual of `|T|`.
    pub modulus_residual: f64,
    pub modulus_in_sc: bool,
    /// Membership residual of `T*T`.
    pub gram_residual: f64,
    pub gram_in_sc: bool,
}

impl NormalityReport {
    pub fn agree(&self) -> bool {
        self.normal == self.modulus_in_sc && self.modulus_in_sc == self.gram_in_sc
    }
}

/// Evaluates normality, `|T| ∈ S_C` and `T*T ∈ S_C` independently.
pub fn normality_report(t: &ScElement) -> NormalityReport {
    let c = t.conjugation();
    let m = t.matrix();
    let n = t.dim();
    let scale = m.norm().max(1.0);
    let quad_tol = 1e-10 * n as f64 * scale * scale;
    let lin_tol = 1e-8 * n as f64 * scale;
    let gram = m.adjoint() * m;
    let normal_residual = (m * m.adjoint() - &gram).norm();
    let dec = linalg::svd(m);
    let sigma = CMat::from_diagonal(&CVec::from_iterator(n, dec.sigma.iter().map(|&s| C64::new(s, 0.0))));
    let modulus = &dec.v * sigma * dec.v.adjoint();
    let modulus_residual = membership_residual(&modulus, c);
    let gram_residual = membership_residual(&gram, c);
    NormalityReport {
        normal: normal_residual <= quad_tol,
        normal_residual,
        modulus_in_sc: modulus_residual <= lin_tol,
        modulus_residual,
        gram_in_sc: gram_residual <= quad_tol,
        gram_residual,
    }
}

fn flatten(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Dimension of the span of all products of at most `degree` elements of
/// S_C. Computed in the C-fixed frame, where S_C is the symmetric matrices.
pub fn generation_dimension(c: &Conjugation, degree: usize) -> Result<usize> {
    if degree == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let n = c.dim();
    let basis: Vec<CMat> = sc_space::symmetric_basis_real(n).iter().map(linalg::to_complex).collect();
    let mut span = OrthoSpan::new(n * n, 1e-9);
    let mut frontier: Vec<CMat> = Vec::new();
    for e in &basis {
        if span.insert(&flatten(e)).is_some() {
            frontier.push(e.clone());
        }
    }
    for _ in 1..degree {
        if span.is_full() || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        'outer: for w in &frontier {
            for e in &basis {
                let prod = e * w;
                if let Some(unit) = span.insert(&flatten(&prod)) {
                    next.push(CMat::from_column_slice(n, n, unit.as_slice()));
                    if span.is_full() {
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(span.len())
}

/// Dimension of the smallest Jordan ideal of S_C containing `Z`: the span of
/// `Z` closed under `X ↦ E ∘ X` for basis elements `E`.
pub fn jordan_simplicity_witness(z: &ScElement) -> Result<usize> {
    if z.matrix().iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return Err(Error::ZeroInput);
    }
    let n = z.dim();
    let m = n * (n + 1) / 2;
    let basis: Vec<CMat> = sc_space::symmetric_basis_real(n).iter().map(linalg::to_complex).collect();
    let mut span = OrthoSpan::new(m, 1e-9);
    let mut queue: Vec<CVec> = Vec::new();
    if let Some(u) = span.insert(&sc_space::symmetric_coords(&z.fixed_frame())) {
        queue.push(u);
    }
    while let Some(v) = queue.pop() {
        if span.is_full() {
            break;
        }
        let x = sc_space::symmetric_from_coords(n, &v);
        for e in &basis {
            if let Some(u) = span.insert(&sc_space::symmetric_coords(&jordan(e, &x))) {
                queue.push(u);
            }
        }
    }
    Ok(span.len())
}

#[derive(Debug, Clone)]
pub struct IrreducibilityReport {
    pub commutant_dimension: usize,
    pub irreducible: bool,
}

/// The commutant of `{T, T*}` is the kernel of the stacked system
/// `[I ⊗ T − Tᵀ ⊗ I; I ⊗ T* − T̄ ⊗ I]` acting on `vec P`.
pub fn irreducibility_check(t: &CMat) -> IrreducibilityReport {
    let n = t.nrows();
    let id = linalg::identity(n);
    let ta = t.adjoint();
    let top = id.kronecker(t) - t.transpose().kronecker(&id);
    let bottom = id.kronecker(&ta) - ta.transpose().kronecker(&id);
    let mut system = CMat::zeros(2 * n * n, n * n);
    system.view_mut((0, 0), (n * n, n * n)).copy_from(&top);
    system.view_mut((n * n, 0), (n * n, n * n)).copy_from(&bottom);
    let cutoff = 1e-9 * n as f64 * linalg::op_norm(t).max(1.0);
    let sv = linalg::singular_values(&system);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let commutant_dimension = n * n - rank;
    IrreducibilityReport {
        commutant_dimension,
        irreducible: commutant_dimension == 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::stream;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn automorphism_examples() {
        let mut rng = stream(1, "auto", 4, 0);
        let cj = random::random_conjugation(4, &mut rng);
        let r = check_jordan_automorphism(&linalg::identity(4), &cj, 10, &mut rng).unwrap();
        assert!(r.commutes_with_c && r.preserves_sc && r.consistent());
        assert!((r.alpha.unwrap() - c(1., 0.)).norm() < 1e-12);

        let std = Conjugation::standard(5).unwrap();
        let o = random::real_orthogonal(5, &mut rng);
        let r = check_jordan_automorphism(&o, &std, 20, &mut rng).unwrap();
        assert!(r.commutes_with_c && r.preserves_sc && r.counterexample.is_none());
        for res in [r.sampled_membership, r.preserves_product, r.preserves_adjoint, r.isometric] {
            assert!(res < 1e-12);
        }

        let std2 = Conjugation::standard(2).unwrap();
        let v = CMat::from_diagonal(&CVec::from_vec(vec![c(1., 0.), c(0., 1.)]));
        let r = check_jordan_automorphism(&v, &std2, 5, &mut rng).unwrap();
        assert!(!r.commutes_with_c && !r.preserves_sc && r.consistent());
        let x = r.counterexample.unwrap().scale(std::f64::consts::SQRT_2);
        let swap = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert!((&x - &swap).norm() < 1e-14);
        let image = &v * &x * v.adjoint();
        let want = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        assert!((image - want).norm() < 1e-14);

        let bad = linalg::identity(2).scale(2.0);
        assert!(matches!(
            check_jordan_automorphism(&bad, &std2, 1, &mut rng),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn phase_multiples_of_c_real_unitaries_pass() {
        let mut rng = stream(2, "auto", 6, 0);
        let cj = random::random_conjugation(6, &mut rng);
        for _ in 0..5 {
            let v = random::random_c_real_unitary(&cj, &mut rng);
            let r = check_jordan_automorphism(&v, &cj, 5, &mut rng).unwrap();
            assert!(r.commutes_with_c && r.preserves_sc);
            let a = r.alpha.unwrap();
            let av = &v * a;
            assert!((cj.matrix() * linalg::conj(&av) - &av * cj.matrix()).norm() < 1e-10);
        }
        let h = random::haar_unitary(6, &mut rng);
        let r = check_jordan_automorphism(&h, &cj, 5, &mut rng).unwrap();
        assert!(!r.commutes_with_c && r.consistent());
    }

    #[test]
    fn normality_examples() {
        let std2 = Conjugation::standard(2).unwrap();
        let d = ScElement::new(CMat::from_diagonal(&CVec::from_vec(vec![c(1., 2.), c(-3., 0.)])), &std2).unwrap();
        let r = normality_report(&d);
        assert!(r.normal && r.modulus_in_sc && r.gram_in_sc);

        let i = c(0., 1.);
        let t = ScElement::new(CMat::from_row_slice(2, 2, &[c(1., 0.), i, i, c(-1., 0.)]), &std2).unwrap();
        let r = normality_report(&t);
        assert!(!r.normal && !r.modulus_in_sc && !r.gram_in_sc && r.agree());
        let tt = t.matrix() * t.matrix().adjoint();
        let want = CMat::from_row_slice(2, 2, &[c(2., 0.), c(0., -2.), c(0., 2.), c(2., 0.)]);
        assert!((tt - want).norm() < 1e-14);

        let mut rng = stream(3, "norm", 6, 0);
        let std6 = Conjugation::standard(6).unwrap();
        let g = random::real_gaussian(6, &mut rng);
        let rs = ScElement::new(linalg::to_complex(&(&g + g.transpose())), &std6).unwrap();
        let r = normality_report(&rs);
        assert!(r.normal && r.modulus_in_sc && r.gram_in_sc);
    }

    #[test]
    fn generation_examples() {
        let std2 = Conjugation::standard(2).unwrap();
        assert_eq!(generation_dimension(&std2, 1).unwrap(), 3);
        assert_eq!(generation_dimension(&std2, 2).unwrap(), 4);
        let mut rng = stream(4, "gen", 4, 0);
        let cj = random::random_conjugation(4, &mut rng);
        assert_eq!(generation_dimension(&cj, 2).unwrap(), 16);
        assert_eq!(generation_dimension(&cj, 1).unwrap(), 10);
    }

    #[test]
    fn simplicity_examples() {
        let std3 = Conjugation::standard(3).unwrap();
        let id = ScElement::new(linalg::identity(3), &std3).unwrap();
        assert_eq!(jordan_simplicity_witness(&id).unwrap(), 6);
        let mut e11 = CMat::zeros(3, 3);
        e11[(0, 0)] = c(1., 0.);
        assert_eq!(jordan_simplicity_witness(&ScElement::new(e11, &std3).unwrap()).unwrap(), 6);
        let zero = ScElement::new(CMat::zeros(3, 3), &std3).unwrap();
        assert!(matches!(jordan_simplicity_witness(&zero), Err(Error::ZeroInput)));
        for n in 2..=4 {
            let mut rng = stream(5, "simple", n, 0);
            let cj = random::random_conjugation(n, &mut rng);
            let z = random::random_sc(&cj, &mut rng);
            assert_eq!(jordan_simplicity_witness(&z).unwrap(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn irreducibility_examples() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1., 0.), c(2., 0.)]));
        let r = irreducibility_check(&d);
        assert!(!r.irreducible && r.commutant_dimension == 2);
        let t = CMat::from_row_slice(2, 2, &[c(0., 1.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert!(irreducibility_check(&t).irreducible);
        let id = irreducibility_check(&linalg::identity(3));
        assert!(!id.irreducible && id.commutant_dimension == 9);
    }
}
