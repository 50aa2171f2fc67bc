//! Seeded random generators for conjugations and S_C elements.
//!
//! Every trial draws from its own ChaCha8 stream whose 256-bit seed is
//! `SHA-256(seed ‖ check id ‖ dim ‖ trial)`, so streams are platform
//! independent and adding trials never perturbs earlier ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::conjugation::Conjugation;
use crate::linalg::{self, C64, CMat, CVec, RMat};
use crate::sc_space::ScElement;

pub type TrialRng = ChaCha8Rng;

/// Derives the RNG stream of one trial.
pub fn stream(seed: u64, check: &str, dim: usize, trial: usize) -> TrialRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((check.len() as u64).to_le_bytes());
    h.update(check.as_bytes());
    h.update((dim as u64).to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| complex_normal(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-8 {
            return v.unscale(norm);
        }
    }
}

/// Complex Ginibre matrix (row-major draw order).
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn real_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMat {
    let mut m = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = normal(rng);
        }
    }
    m
}

/// Haar-distributed unitary: QR of a Ginibre draw with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = ginibre(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed real orthogonal matrix, returned as a complex matrix.
pub fn real_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    linalg::to_complex(&real_orthogonal_real(n, rng))
}

pub fn real_orthogonal_real<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMat {
    let (mut q, r) = real_gaussian(n, rng).qr().unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random conjugation `U = W·Wᵀ` with `W` Haar unitary.
pub fn random_conjugation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Conjugation {
    let w = haar_unitary(n, rng);
    let u = &w * w.transpose();
    let u = (&u + u.transpose()).scale(0.5);
    Conjugation::from_unitary(u).expect("W·Wᵀ is a symmetric unitary")
}

/// `sym_part` of a Ginibre draw.
pub fn random_sc<R: Rng + ?Sized>(c: &Conjugation, rng: &mut R) -> ScElement {
    let x = ginibre(c.dim(), rng);
    crate::sc_space::sym_part(&x, c).expect("dimensions agree")
}

/// Selfadjoint element of S_C: a real symmetric matrix in the fixed frame.
pub fn random_selfadjoint_sc<R: Rng + ?Sized>(c: &Conjugation, rng: &mut R) -> ScElement {
    let t = random_sc(c, rng);
    let h = (t.matrix() + t.matrix().adjoint()).scale(0.5);
    ScElement::settle(h, c)
}

/// Normal element `B·O·diag(d)·Oᵀ·B*` with `O` real orthogonal and complex
/// eigenvalues `d`.
pub fn random_normal_sc<R: Rng + ?Sized>(c: &Conjugation, rng: &mut R) -> ScElement {
    let n = c.dim();
    let o = real_orthogonal(n, rng);
    let d = CMat::from_diagonal(&gaussian_vector(n, rng));
    ScElement::settle(c.from_fixed_frame(&(&o * d * o.transpose())), c)
}

/// Element with prescribed rank: `B·Q·Σ·Qᵀ·B*` with `Q` Haar unitary.
pub fn random_rank_deficient_sc<R: Rng + ?Sized>(c: &Conjugation, rank: usize, rng: &mut R) -> ScElement {
    let n = c.dim();
    let q = haar_unitary(n, rng);
    let sigma = CVec::from_fn(n, |i, _| {
        if i < rank {
            C64::new(0.5 + rng.random::<f64>(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a = &q * CMat::from_diagonal(&sigma) * q.transpose();
    ScElement::settle(c.from_fixed_frame(&a), c)
}

/// Diagonalizable element with the given eigenvalues: `B·S·diag(λ)·S⁻¹·B*`
/// for a random complex orthogonal `S = exp(i·K)`, `K` real skew.
pub fn random_with_spectrum<R: Rng + ?Sized>(c: &Conjugation, eig: &[C64], rng: &mut R) -> ScElement {
    let n = c.dim();
    let g = real_gaussian(n, rng);
    let k = (&g - g.transpose()).scale(0.25);
    let ik = linalg::to_complex(&k) * C64::new(0.0, 1.0);
    let s = ik.exp();
    let s_inv = (-ik).exp();
    let d = CMat::from_diagonal(&CVec::from_column_slice(eig));
    let a = &s * d * &s_inv;
    let a = (&a + a.transpose()).scale(0.5);
    ScElement::settle(c.from_fixed_frame(&a), c)
}

/// Unitary that commutes with `C` up to a phase: `B·O·B*` for real orthogonal
/// `O`, times a random unimodular scalar.
pub fn random_c_real_unitary<R: Rng + ?Sized>(c: &Conjugation, rng: &mut R) -> CMat {
    let o = real_orthogonal(c.dim(), rng);
    let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>());
    c.from_fixed_frame(&o) * phase
}
