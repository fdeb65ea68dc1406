//! Seeded random instances: complex Gaussian data, Haar-ish unitaries, PD weights.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::semispace::{cdiag, CMatrix, CVector, QParam, Weight};

/// Deterministic generator for `(seed, stream)`; distinct streams are independent.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    DVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Unitary from the QR factorization of a Gaussian matrix, with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U diag(lambda) U^H` with `lambda` log-uniform on `[lo, hi]`.
pub fn random_pd_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let lambda: Vec<f64> = (0..n)
        .map(|_| rng.random_range(lo.ln()..=hi.ln()).exp())
        .collect();
    &u * cdiag(&lambda) * u.adjoint()
}

/// Positive definite weight with spectrum log-uniform on `[0.1, 10]`.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Weight {
    Weight::new(random_pd_matrix(rng, n, 0.1, 10.0)).expect("random PD matrix is a valid weight")
}

/// `q` with modulus uniform on `(0, 1]` and uniform phase; `q = 1` with probability `p_one`.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R, p_one: f64) -> QParam {
    if rng.random::<f64>() < p_one {
        return QParam::one();
    }
    let modulus = 1.0 - rng.random::<f64>();
    QParam::new(Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU)))
        .expect("modulus lies in (0, 1]")
}
