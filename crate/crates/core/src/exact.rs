//! Closed forms: the 2x2 canonical form and its elliptical q-numerical range,
//! and the q-numerical radius of the 3x3 Jordan block.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::radius::sweep::periodic_max;
use crate::semispace::{check_operator, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const DISTANCE_TOL: f64 = 1e-12;

/// `U^H T U = e^{it} [[gamma, a], [b, gamma]]` with `0 <= b <= a`, `0 <= t < 2 pi`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalForm2x2 {
    pub t: f64,
    pub gamma: Complex64,
    pub a: f64,
    pub b: f64,
    #[serde(skip)]
    pub u_similar: CMatrix,
}

impl CanonicalForm2x2 {
    /// `e^{it} [[gamma, a], [b, gamma]]`.
    pub fn matrix(&self) -> CMatrix {
        let rot = Complex64::from_polar(1.0, self.t);
        CMatrix::from_row_slice(
            2,
            2,
            &[self.gamma * rot, rot * self.a, rot * self.b, self.gamma * rot],
        )
    }
}

/// The filled ellipse `e^{it} { gamma q + r (A cos s + i B sin s) }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseDisk {
    pub center: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub rotation: f64,
}

impl EllipseDisk {
    /// Boundary point at parameter `s`.
    pub fn boundary(&self, s: f64) -> Complex64 {
        self.center + Complex64::from_polar(1.0, self.rotation) * Complex64::new(self.semi_major * s.cos(), self.semi_minor * s.sin())
    }

    /// Offset of `z` from the center in the ellipse's own axes.
    fn local(&self, z: Complex64) -> Complex64 {
        (z - self.center) * Complex64::from_polar(1.0, -self.rotation)
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        let w = self.local(z);
        let (a, b) = (self.semi_major, self.semi_minor);
        if b <= tol {
            return w.im.abs() <= tol && w.re.abs() <= a + tol;
        }
        (w.re / (a + tol)).powi(2) + (w.im / (b + tol)).powi(2) <= 1.0
    }

    /// Largest modulus over the set; attained on the boundary.
    pub fn max_modulus(&self) -> f64 {
        periodic_max(|s| self.boundary(s).norm(), 1024).1
    }

    /// Distance from the origin to the set.
    pub fn distance_to_origin(&self) -> f64 {
        let w = self.local(ZERO);
        if self.contains(ZERO, 0.0) {
            return 0.0;
        }
        point_to_ellipse(w.re.abs(), w.im.abs(), self.semi_major, self.semi_minor)
    }
}

/// Distance from `(y0, y1)` (nonnegative, outside) to the ellipse with
/// semi-axes `e0 >= e1 >= 0`, by safeguarded Newton on
/// `F(s) = (e0 y0 / (s + e0^2))^2 + (e1 y1 / (s + e1^2))^2 - 1`.
fn point_to_ellipse(y0: f64, y1: f64, e0: f64, e1: f64) -> f64 {
    if e0 == 0.0 {
        return y0.hypot(y1);
    }
    if e1 == 0.0 || y1 == 0.0 {
        if e1 == 0.0 {
            return (y0 - e0).max(0.0).hypot(y1);
        }
        return y0 - e0;
    }
    if y0 == 0.0 {
        return y1 - e1;
    }
    let f = |s: f64| {
        let r0 = e0 * y0 / (s + e0 * e0);
        let r1 = e1 * y1 / (s + e1 * e1);
        r0 * r0 + r1 * r1 - 1.0
    };
    let df = |s: f64| {
        let r0 = e0 * y0 / (s + e0 * e0);
        let r1 = e1 * y1 / (s + e1 * e1);
        -2.0 * (r0 * r0 / (s + e0 * e0) + r1 * r1 / (s + e1 * e1))
    };
    // F decreases on (-e1^2, inf); the root lies in [lo, hi].
    let mut lo = -e1 * e1 + e1 * y1;
    let mut hi = -e1 * e1 + (e0 * e0 * y0 * y0 + e1 * e1 * y1 * y1).sqrt();
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fs = f(s);
        if fs > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - fs / df(s);
        s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= DISTANCE_TOL * (1.0 + hi.abs()) || fs.abs() <= 1e-15 {
            break;
        }
    }
    let x0 = e0 * e0 * y0 / (s + e0 * e0);
    let x1 = e1 * e1 * y1 / (s + e1 * e1);
    (y0 - x0).hypot(y1 - x1)
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

fn to_c(m: &Matrix2<Complex64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Unitary `U` with `U^H T0 U` upper triangular, for a traceless `T0`.
fn schur_basis(t0: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let (al, be, ga) = (t0[(0, 0)], t0[(0, 1)], t0[(1, 0)]);
    let lambda = (al * al + be * ga).sqrt();
    let v = if be.norm() >= ga.norm() && be.norm() > 0.0 {
        [be, lambda - al]
    } else if ga.norm() > 0.0 {
        [lambda + al, ga]
    } else {
        [ONE, ZERO]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let (v0, v1) = if n > 0.0 { (v[0] / n, v[1] / n) } else { (ONE, ZERO) };
    Matrix2::new(v0, -v1.conj(), v1, v0.conj())
}

/// Nakazato canonical form of a 2x2 matrix.
///
/// Removes the trace, rotates the traceless part to zero diagonal through its
/// Schur form, then equalizes the phases of the two off-diagonal entries.
pub fn canonical_2x2(t: &CMatrix) -> Result<CanonicalForm2x2> {
    check_operator(t)?;
    if t.nrows() != 2 {
        return Err(Error::WrongSize {
            expected: 2,
            got: t.nrows(),
        });
    }
    let m = Matrix2::new(t[(0, 0)], t[(0, 1)], t[(1, 0)], t[(1, 1)]);
    let half_trace = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let t0 = m - Matrix2::identity() * half_trace;

    let u = schur_basis(&t0);
    let s = u.adjoint() * t0 * u;
    let (lambda, mm) = (s[(0, 0)], s[(0, 1)]);
    // x = (cos tau, e^{i psi} sin tau) gives x^H S x = lambda cos 2tau + (m/2) e^{i psi} sin 2tau.
    let (tau, phase) = if mm.norm() == 0.0 {
        (std::f64::consts::FRAC_PI_4, ONE)
    } else {
        let lam_phase = if lambda.norm() > 0.0 { lambda / lambda.norm() } else { ONE };
        (
            0.5 * (2.0 * lambda.norm()).atan2(mm.norm()),
            -lam_phase * mm.conj() / mm.norm(),
        )
    };
    let (c, sn) = (Complex64::new(tau.cos(), 0.0), Complex64::new(tau.sin(), 0.0));
    let rot = Matrix2::new(c, -phase.conj() * sn, phase * sn, c);
    let mut basis = u * rot;
    let z = basis.adjoint() * t0 * basis;

    let (ou, ov) = (z[(0, 1)], z[(1, 0)]);
    let (au, av) = (arg_or_zero(ou), arg_or_zero(ov));
    let psi = 0.5 * (av - au);
    let mut theta = 0.5 * (au + av);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta -= TAU;
    }
    basis *= Matrix2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, psi));
    let (mut a, mut b) = (ou.norm(), ov.norm());
    if a < b {
        basis *= Matrix2::new(ZERO, ONE, ONE, ZERO);
        std::mem::swap(&mut a, &mut b);
    }
    Ok(CanonicalForm2x2 {
        t: theta,
        gamma: half_trace * Complex64::from_polar(1.0, -theta),
        a,
        b,
        u_similar: to_c(&basis),
    })
}

fn real_q(q: Complex64) -> Result<f64> {
    if q.im != 0.0 || !(0.0..=1.0).contains(&q.re) {
        return Err(Error::ComplexQUnsupported);
    }
    Ok(q.re)
}

/// The q-numerical range of the canonical form for real `q` in `[0, 1]`.
pub fn q_range_2x2(form: &CanonicalForm2x2, q: Complex64) -> Result<EllipseDisk> {
    let q = real_q(q)?;
    let c = 0.5 * (form.a + form.b);
    let d = 0.5 * (form.a - form.b);
    let p = (1.0 - q * q).max(0.0).sqrt();
    Ok(EllipseDisk {
        center: Complex64::from_polar(1.0, form.t) * form.gamma * q,
        semi_major: c + p * d,
        semi_minor: d + p * c,
        rotation: form.t,
    })
}

pub fn q_radius_2x2(form: &CanonicalForm2x2, q: Complex64) -> Result<f64> {
    Ok(q_range_2x2(form, q)?.max_modulus())
}

pub fn q_crawford_2x2(form: &CanonicalForm2x2, q: Complex64) -> Result<f64> {
    Ok(q_range_2x2(form, q)?.distance_to_origin())
}

/// `omega_q` of the 3x3 nilpotent Jordan block for `q` in `[1/2, 1]`.
pub fn jordan3_q_radius(q: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&q) {
        return Err(Error::QOutOfRange { q, lo: 0.5, hi: 1.0 });
    }
    let inner = ((1.0 - q) * (9.0 + 7.0 * q)).sqrt();
    Ok((27.0 + 18.0 * q - 13.0 * q * q + (9.0 + 7.0 * q) * inner).sqrt() / 8.0)
}

/// `omega_q` of `[[0, m], [0, 0]]`, `(|m| / 2)(1 + sqrt(1 - q^2))`.
pub fn nilpotent2_q_radius(m: f64, q: f64) -> f64 {
    0.5 * m.abs() * (1.0 + (1.0 - q * q).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, rng};
    use crate::semispace::{cmat, rmat};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruction_residual(t: &CMatrix, f: &CanonicalForm2x2) -> f64 {
        let u = &f.u_similar;
        let lhs = u.adjoint() * t * u;
        (lhs - f.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn example1_form() {
        let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        let f = canonical_2x2(&t).unwrap();
        assert!(f.t.abs() < 1e-15);
        assert!(f.gamma.norm() < 1e-15);
        assert!((f.a - 1.0 / 70.0).abs() < 1e-15);
        assert!(f.b.abs() < 1e-15);
    }

    #[test]
    fn scalar_form() {
        let t = cmat(&[&[c(0.3, -0.2), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.3, -0.2)]]);
        let f = canonical_2x2(&t).unwrap();
        assert_eq!((f.a, f.b, f.t), (0.0, 0.0, 0.0));
        assert!((f.gamma - c(0.3, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn reconstruction_and_ordering() {
        let t = rmat(&[&[1.0, 2.0], &[-1.0, 1.0]]);
        let f = canonical_2x2(&t).unwrap();
        assert!(reconstruction_residual(&t, &f) < 1e-9);
        let mut g = rng(21, 0);
        for _ in 0..500 {
            let t = gaussian_matrix(&mut g, 2);
            let f = canonical_2x2(&t).unwrap();
            assert!(reconstruction_residual(&t, &f) < 1e-9);
            assert!(0.0 <= f.b && f.b <= f.a);
            assert!((0.0..TAU).contains(&f.t));
            let uu = f.u_similar.adjoint() * &f.u_similar;
            assert!((uu - CMatrix::identity(2, 2)).norm() < 1e-12);
        }
    }

    #[test]
    fn ellipse_parameters() {
        let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        let f = canonical_2x2(&t).unwrap();
        let e = q_range_2x2(&f, c(0.0, 0.0)).unwrap();
        assert!((e.semi_major - 1.0 / 70.0).abs() < 1e-15);
        assert!((e.semi_minor - 1.0 / 70.0).abs() < 1e-15);
        let e = q_range_2x2(&f, c(1.0, 0.0)).unwrap();
        assert!((e.semi_major - 1.0 / 140.0).abs() < 1e-15);
        assert!((e.semi_minor - 1.0 / 140.0).abs() < 1e-15);
        let normal = CanonicalForm2x2 {
            t: 0.0,
            gamma: ONE,
            a: 2.0,
            b: 2.0,
            u_similar: CMatrix::identity(2, 2),
        };
        let e = q_range_2x2(&normal, c(0.6, 0.0)).unwrap();
        assert!((e.semi_major - 2.0).abs() < 1e-15 && (e.semi_minor - 1.6).abs() < 1e-15);
        assert_eq!(q_range_2x2(&f, c(0.5, 0.1)).unwrap_err(), Error::ComplexQUnsupported);
    }

    #[test]
    fn example_radii() {
        let t1 = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        let t2 = rmat(&[&[0.0, 1.0 / 24.0], &[0.0, 0.0]]);
        let (f1, f2) = (canonical_2x2(&t1).unwrap(), canonical_2x2(&t2).unwrap());
        for k in 1..=10 {
            let q = k as f64 / 10.0;
            let r1 = q_radius_2x2(&f1, c(q, 0.0)).unwrap();
            assert!((r1 - (1.0 + (1.0 - q * q).sqrt()) / 140.0).abs() < 1e-12);
            let r2 = q_radius_2x2(&f2, c(q, 0.0)).unwrap();
            assert!((r2 - (1.0 + (1.0 - q * q).sqrt()) / 48.0).abs() < 1e-12);
        }
        let s = canonical_2x2(&rmat(&[&[0.05, 0.0], &[0.0, 0.05]])).unwrap();
        for q in [0.1, 0.5, 1.0] {
            assert!((q_radius_2x2(&s, c(q, 0.0)).unwrap() - q / 20.0).abs() < 1e-15);
            assert!((q_crawford_2x2(&s, c(q, 0.0)).unwrap() - q / 20.0).abs() < 1e-15);
        }
    }

    #[test]
    fn jordan_formula() {
        assert!((jordan3_q_radius(1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((jordan3_q_radius(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((jordan3_q_radius(0.75).unwrap() - 0.968_921_639_437_144_2).abs() < 1e-12);
        assert!(matches!(jordan3_q_radius(0.4), Err(Error::QOutOfRange { .. })));
    }

    #[test]
    fn crawford_distance_against_boundary_sampling() {
        let mut g = rng(22, 0);
        for _ in 0..100 {
            let t = gaussian_matrix(&mut g, 2) + CMatrix::identity(2, 2) * c(2.0, 1.0);
            let f = canonical_2x2(&t).unwrap();
            for q in [0.3, 0.8, 1.0] {
                let e = q_range_2x2(&f, c(q, 0.0)).unwrap();
                let dist = e.distance_to_origin();
                let sampled = (0..20000)
                    .map(|k| e.boundary(TAU * k as f64 / 20000.0).norm())
                    .fold(f64::INFINITY, f64::min);
                if e.contains(ZERO, 0.0) {
                    assert_eq!(dist, 0.0);
                } else {
                    assert!(dist <= sampled + 1e-12);
                    assert!(sampled - dist < 1e-6 * (1.0 + sampled));
                }
            }
        }
    }

    #[test]
    fn radius_on_outer_boundary() {
        let mut g = rng(23, 0);
        for _ in 0..5 {
            let t = gaussian_matrix(&mut g, 2);
            let f = canonical_2x2(&t).unwrap();
            let e = q_range_2x2(&f, c(0.6, 0.0)).unwrap();
            let n = 2000;
            let mut grid = 0.0f64;
            for i in 0..=n {
                let r = i as f64 / n as f64;
                for k in 0..n {
                    let s = TAU * k as f64 / n as f64;
                    let z = e.center
                        + Complex64::from_polar(r, e.rotation) * c(e.semi_major * s.cos(), e.semi_minor * s.sin());
                    grid = grid.max(z.norm());
                }
            }
            let r = e.max_modulus();
            assert!(r >= grid - 1e-12 && r - grid < 1e-5);
        }
    }

    #[test]
    fn central_symmetry() {
        let mut g = rng(24, 0);
        let f = canonical_2x2(&gaussian_matrix(&mut g, 2)).unwrap();
        let e = q_range_2x2(&f, c(0.7, 0.0)).unwrap();
        for k in 0..200 {
            let s = TAU * k as f64 / 200.0;
            let off = e.boundary(s) - e.center;
            let r = 0.3 + 0.7 * (k as f64 / 200.0);
            assert_eq!(e.contains(e.center + off * r, 1e-12), e.contains(e.center - off * r, 1e-12));
            assert!(e.contains(e.center + off * r, 1e-12));
        }
    }
}
