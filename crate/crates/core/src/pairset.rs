//! Pairs `(x, y)` with `||x||_A = ||y||_A = 1` and `<x, y>_A = q`.
//!
//! Every admissible pair has the form `y = conj(q) x + sqrt(1 - |q|^2) e^{i theta} z`
//! with `z` A-unit and A-orthogonal to `x`, which makes the constraint exact by
//! construction.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{gaussian_vector, rng};
use crate::semispace::{a_inner, a_norm_vec, CVector, QParam, Weight};

const INPUT_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct UnitPair {
    #[serde(serialize_with = "crate::radius::serialize_cvec")]
    pub x: CVector,
    #[serde(serialize_with = "crate::radius::serialize_cvec")]
    pub y: CVector,
    pub q_achieved: Complex64,
    pub constraint_residual: f64,
}

/// Residual of the pair constraints: unit seminorms and `<x, y>_A = q`.
pub fn pair_residual(w: &Weight, x: &CVector, y: &CVector, q: QParam) -> Result<(Complex64, f64)> {
    let nx = a_norm_vec(w, x)?;
    let ny = a_norm_vec(w, y)?;
    let qa = a_inner(w, x, y)?;
    let res = (nx - 1.0).abs().max((ny - 1.0).abs()).max((qa - q.value()).norm());
    Ok((qa, res))
}

/// Completes an A-unit `x` to an admissible pair using the A-unit direction `z`
/// (A-orthogonal to `x`) and the phase `theta`.
pub fn complete_pair(w: &Weight, x: &CVector, z: &CVector, theta: f64, q: QParam) -> Result<UnitPair> {
    let input_res = (a_norm_vec(w, x)? - 1.0)
        .abs()
        .max((a_norm_vec(w, z)? - 1.0).abs())
        .max(a_inner(w, z, x)?.norm());
    if input_res > INPUT_TOL {
        return Err(Error::InvalidPairInput(input_res));
    }
    Ok(complete_unchecked(w, x, z, theta, q)?)
}

fn complete_unchecked(w: &Weight, x: &CVector, z: &CVector, theta: f64, q: QParam) -> Result<UnitPair> {
    let y = x * q.value().conj() + z * Complex64::from_polar(q.complement(), theta);
    let (q_achieved, constraint_residual) = pair_residual(w, x, &y, q)?;
    if constraint_residual > RESIDUAL_TOL {
        return Err(Error::ConstraintResidual(constraint_residual));
    }
    Ok(UnitPair {
        x: x.clone(),
        y,
        q_achieved,
        constraint_residual,
    })
}

fn random_a_unit<R: Rng + ?Sized>(w: &Weight, rng: &mut R) -> CVector {
    loop {
        let u = gaussian_vector(rng, w.rank());
        let n = u.norm();
        if n > 1e-12 {
            return w.lift(&(u / Complex64::new(n, 0.0)));
        }
    }
}

/// Draws `count` admissible pairs; the result depends only on `(w, q, count, seed)`.
pub fn sample_pairs(w: &Weight, q: QParam, count: usize, seed: u64) -> Result<Vec<UnitPair>> {
    if w.rank() < 2 && !q.is_unimodular() {
        return Err(Error::RankTooLow { rank: w.rank() });
    }
    let mut rng = rng(seed, 0x7061_6972);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = random_a_unit(w, &mut rng);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        if w.rank() < 2 {
            // |q| = 1 and no A-orthogonal direction exists; its coefficient is zero anyway.
            let z = CVector::zeros(w.dim());
            out.push(complete_unchecked(w, &x, &z, theta, q)?);
            continue;
        }
        let mut z = None;
        for _ in 0..MAX_REDRAWS {
            let raw = random_a_unit(w, &mut rng);
            let proj = a_inner(w, &raw, &x)?;
            let orth = &raw - &x * proj;
            let n = a_norm_vec(w, &orth)?;
            if n > 1e-8 {
                z = Some(orth / Complex64::new(n, 0.0));
                break;
            }
        }
        let z = z.ok_or(Error::GramSchmidtBreakdown(MAX_REDRAWS))?;
        out.push(complete_pair(w, &x, &z, theta, q)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semispace::cdiag;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(n: usize, k: usize) -> CVector {
        CVector::from_fn(n, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn q_one_forces_y_equal_x() {
        let w = Weight::identity(2);
        let p = complete_pair(&w, &e(2, 0), &e(2, 1), 0.0, QParam::one()).unwrap();
        assert!((&p.y - e(2, 0)).norm() < 1e-15);
    }

    #[test]
    fn half_q_by_substitution() {
        let w = Weight::identity(2);
        let p = complete_pair(&w, &e(2, 0), &e(2, 1), 0.0, QParam::real(0.5).unwrap()).unwrap();
        let expect = CVector::from_column_slice(&[c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)]);
        assert!((&p.y - expect).norm() < 1e-15);
        assert!((p.q_achieved - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weighted_imaginary_q() {
        let w = Weight::new(cdiag(&[1.0, 4.0])).unwrap();
        let z = e(2, 1) * c(0.5, 0.0);
        let q = QParam::new(c(0.0, 0.6)).unwrap();
        let p = complete_pair(&w, &e(2, 0), &z, std::f64::consts::FRAC_PI_2, q).unwrap();
        let expect = e(2, 0) * c(0.0, -0.6) + &z * c(0.0, 0.8);
        assert!((&p.y - expect).norm() < 1e-15);
        assert!(p.constraint_residual < 1e-12);
    }

    #[test]
    fn complete_pair_rejects_non_orthogonal_direction() {
        let w = Weight::identity(2);
        let z = CVector::from_column_slice(&[c(0.6, 0.0), c(0.8, 0.0)]);
        assert!(matches!(
            complete_pair(&w, &e(2, 0), &z, 0.0, QParam::real(0.5).unwrap()),
            Err(Error::InvalidPairInput(_))
        ));
    }

    #[test]
    fn rank_one_weight_rejects_interior_q() {
        let w = Weight::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(
            sample_pairs(&w, QParam::real(0.5).unwrap(), 3, 0).unwrap_err(),
            Error::RankTooLow { rank: 1 }
        );
        let pairs = sample_pairs(&w, QParam::one(), 3, 0).unwrap();
        assert!(pairs.iter().all(|p| (&p.x - &p.y).norm() < 1e-15));
    }

    #[test]
    fn q_one_samples_have_y_equal_x() {
        let pairs = sample_pairs(&Weight::identity(2), QParam::one(), 50, 9).unwrap();
        assert!(pairs.iter().all(|p| (&p.x - &p.y).norm() < 1e-15));
    }

    #[test]
    fn residual_audit_identity_three() {
        let q = QParam::real(0.7).unwrap();
        let pairs = sample_pairs(&Weight::identity(3), q, 1000, 3).unwrap();
        assert_eq!(pairs.len(), 1000);
        assert!(pairs.iter().all(|p| (p.q_achieved - c(0.7, 0.0)).norm() <= 1e-9));
    }

    #[test]
    fn sampling_is_reproducible() {
        let w = Weight::diagonal(&[1.0, 2.0, 5.0]).unwrap();
        let q = QParam::new(c(0.3, -0.4)).unwrap();
        let a = sample_pairs(&w, q, 20, 42).unwrap();
        let b = sample_pairs(&w, q, 20, 42).unwrap();
        for (p, r) in a.iter().zip(&b) {
            assert_eq!(p.x, r.x);
            assert_eq!(p.y, r.y);
        }
        let other = sample_pairs(&w, q, 20, 43).unwrap();
        assert_ne!(a[0].x, other[0].x);
    }
}
