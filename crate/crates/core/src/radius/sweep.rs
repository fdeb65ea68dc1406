//! Support-function sweeps of the classical numerical range.
//!
//! For `H(phi) = (e^{i phi} B + e^{-i phi} B^H) / 2`,
//! `max_phi lambda_max(H(phi))` is the numerical radius and
//! `max(0, max_phi lambda_min(H(phi)))` is the distance from the origin to the
//! numerical range, i.e. the Crawford number.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::semispace::{CMatrix, CVector};

const GOLDEN_TOL: f64 = 1e-10;
const REFINED_PEAKS: usize = 3;

pub(crate) fn hermitian_part(b: &CMatrix, phi: f64) -> CMatrix {
    let rot = Complex64::from_polar(1.0, phi);
    (b * rot + b.adjoint() * rot.conj()).scale(0.5)
}

/// Extreme eigenpair of a Hermitian matrix.
pub(crate) fn extreme_eig(h: &CMatrix, largest: bool) -> (f64, CVector) {
    let eig = SymmetricEigen::new(h.clone());
    let mut k = 0;
    for i in 1..eig.eigenvalues.len() {
        let better = if largest {
            eig.eigenvalues[i] > eig.eigenvalues[k]
        } else {
            eig.eigenvalues[i] < eig.eigenvalues[k]
        };
        if better {
            k = i;
        }
    }
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes a `2 pi`-periodic function: coarse grid, then golden-section
/// refinement around the best few local peaks.
pub(crate) fn periodic_max<F: Fn(f64) -> f64>(f: F, points: usize) -> (f64, f64) {
    let points = points.max(8);
    let h = std::f64::consts::TAU / points as f64;
    let vals: Vec<f64> = (0..points).map(|k| f(k as f64 * h)).collect();
    let mut peaks: Vec<usize> = (0..points)
        .filter(|&k| {
            let prev = vals[(k + points - 1) % points];
            let next = vals[(k + 1) % points];
            vals[k] >= prev && vals[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(REFINED_PEAKS);
    let mut best = (0.0, f64::NEG_INFINITY);
    for &k in &peaks {
        let c = k as f64 * h;
        let cand = golden_max(&f, c - h, c + h);
        let cand = if vals[k] > cand.1 { (c, vals[k]) } else { cand };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// `(phi*, max_phi lambda_max(H(phi)), eigenvector)`.
pub(crate) fn radius_sweep(b: &CMatrix, points: usize) -> (f64, f64, CVector) {
    let (phi, _) = periodic_max(|phi| extreme_eig(&hermitian_part(b, phi), true).0, points);
    let (lam, x) = extreme_eig(&hermitian_part(b, phi), true);
    (phi, lam, x)
}

/// `(phi*, max_phi lambda_min(H(phi)), eigenvector)`.
pub(crate) fn crawford_sweep(b: &CMatrix, points: usize) -> (f64, f64, CVector) {
    let (phi, _) = periodic_max(|phi| extreme_eig(&hermitian_part(b, phi), false).0, points);
    let (lam, x) = extreme_eig(&hermitian_part(b, phi), false);
    (phi, lam, x)
}

fn rayleigh(b: &CMatrix, x: &CVector) -> Complex64 {
    x.dotc(&(b * x)) / Complex64::new(x.norm_squared(), 0.0)
}

/// Unit `x` in `span{u1, u2}` with `x^H D x = 0`, given unit `u1, u2` whose
/// Rayleigh values lie on opposite sides of the origin along one line.
fn segment_root(d: &CMatrix, u1: &CVector, u2: &CVector) -> Option<CVector> {
    let d1 = rayleigh(d, u1);
    let d2 = rayleigh(d, u2);
    if d1.norm() == 0.0 {
        return Some(u1.clone());
    }
    if d2.norm() == 0.0 {
        return Some(u2.clone());
    }
    let rot = d1.conj() / d1.norm();
    let dr = d * rot;
    let beta = u1.dotc(&(&dr * u2));
    let gamma = u2.dotc(&(&dr * u1));
    let delta = beta - gamma.conj();
    let phase = if delta.norm() > 0.0 {
        (delta / delta.norm()).conj()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let point = |t: f64| -> CVector { u1 * Complex64::new(t.cos(), 0.0) + u2 * (phase * t.sin()) };
    let g = |t: f64| rayleigh(&dr, &point(t)).re;
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let x = point(0.5 * (lo + hi));
    let n = x.norm();
    if n == 0.0 {
        return None;
    }
    Some(x / Complex64::new(n, 0.0))
}

/// A unit vector with `x^H B x = 0`, when the origin lies inside the numerical range.
///
/// Boundary points from a support sweep surround the origin; a fan triangle
/// containing it reduces the search to two two-dimensional root problems.
pub(crate) fn zero_witness(b: &CMatrix) -> Option<CVector> {
    let n = b.nrows();
    let scale = crate::semispace::frobenius(b).max(f64::MIN_POSITIVE);
    for points in [64usize, 512] {
        let support: Vec<(Complex64, CVector)> = (0..points)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / points as f64;
                // Support point in direction e^{-i phi}.
                let (_, x) = extreme_eig(&hermitian_part(b, phi), true);
                (rayleigh(b, &x), x)
            })
            .collect();
        // Degenerate ranges (segments): the origin between two support points.
        for i in 0..points {
            for j in i + 1..points {
                let (wa, xa) = &support[i];
                let (wb, xb) = &support[j];
                let cross = wa.re * wb.im - wa.im * wb.re;
                let dot = wa.re * wb.re + wa.im * wb.im;
                if dot < 0.0 && cross.abs() <= 1e-13 * wa.norm() * wb.norm() {
                    if let Some(x) = segment_root(b, xa, xb) {
                        if rayleigh(b, &x).norm() <= 1e-12 * scale {
                            return Some(x);
                        }
                    }
                }
            }
        }
        let (w0, x0) = &support[0];
        for k in 1..points - 1 {
            let (wa, xa) = &support[k];
            let (wb, xb) = &support[k + 1];
            let Some((l0, la, lb)) = barycentric(*w0, *wa, *wb) else {
                continue;
            };
            if l0 < 0.0 || la < 0.0 || lb < 0.0 {
                continue;
            }
            let candidate = if la + lb == 0.0 {
                Some(x0.clone())
            } else if l0 == 0.0 {
                let v = (*wa * la + *wb * lb) / (la + lb);
                segment_root(&(b - CMatrix::identity(n, n) * v), xa, xb)
            } else {
                // v on [wa, wb] with 0 on [w0, v].
                let v = (*wa * la + *wb * lb) / (la + lb);
                let shifted = b - CMatrix::identity(n, n) * v;
                segment_root(&shifted, xa, xb).and_then(|xv| segment_root(b, x0, &xv))
            };
            if let Some(x) = candidate {
                if rayleigh(b, &x).norm() <= 1e-12 * scale {
                    return Some(x);
                }
            }
        }
    }
    None
}

fn barycentric(a: Complex64, b: Complex64, c: Complex64) -> Option<(f64, f64, f64)> {
    // Solve 0 = l0 a + la b + lb c with l0 + la + lb = 1.
    let (e1, e2) = (b - a, c - a);
    let det = e1.re * e2.im - e1.im * e2.re;
    let scale = e1.norm() * e2.norm();
    if det.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let (px, py) = (-a.re, -a.im);
    let la = (px * e2.im - py * e2.re) / det;
    let lb = (e1.re * py - e1.im * px) / det;
    Some((1.0 - la - lb, la, lb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, rng};
    use crate::semispace::{cdiag, rmat};

    #[test]
    fn periodic_max_of_cosine() {
        let (phi, v) = periodic_max(|p| (p - 1.0).cos(), 256);
        assert!((phi - 1.0).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_of_hermitian_and_nilpotent() {
        let (_, lam, _) = radius_sweep(&cdiag(&[-2.0, 1.0]), 256);
        assert!((lam - 2.0).abs() < 1e-12);
        let (_, lam, _) = radius_sweep(&rmat(&[&[0.0, 1.0 / 24.0], &[0.0, 0.0]]), 256);
        assert!((lam - 1.0 / 48.0).abs() < 1e-12);
    }

    #[test]
    fn zero_witness_for_segment_and_random() {
        let b = cdiag(&[1.0, -1.0]);
        let x = zero_witness(&b).expect("origin is inside [-1, 1]");
        assert!(rayleigh(&b, &x).norm() < 1e-12);

        let mut g = rng(3, 3);
        let mut found = 0;
        for _ in 0..20 {
            let b = gaussian_matrix(&mut g, 4);
            let (_, m, _) = crawford_sweep(&b, 256);
            if m < -1e-6 {
                let x = zero_witness(&b).expect("origin inside the numerical range");
                assert!(rayleigh(&b, &x).norm() < 1e-11);
                found += 1;
            }
        }
        assert!(found > 5);
    }
}
