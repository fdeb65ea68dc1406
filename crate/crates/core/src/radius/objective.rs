//! The partner-vector search in closed form.
//!
//! For a reduced unit vector `u` and an admissible partner
//! `y = conj(q) u + p e^{i theta} z` (`z` unit, orthogonal to `u`,
//! `p = sqrt(1 - |q|^2)`), the range value is
//! `y^H B u = q h + p e^{-i theta} z^H r` with `h = u^H B u` and
//! `r = (I - u u^H) B u`. Over all `(z, theta)` it sweeps the disk of radius
//! `p ||r||` about `q h` when `dim >= 3`, and only its boundary circle when
//! `dim = 2`. The searches over `u` below therefore maximize or minimize the
//! modulus over that disk or circle.

use num_complex::Complex64;

use crate::semispace::{CMatrix, CVector, QParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    /// `|q| |h| + p ||r||`.
    Sup,
    /// `| |q| |h| - p ||r|| |`.
    InfCircle,
    /// `max(0, |q| |h| - p ||r||)`.
    InfDisk,
}

impl Goal {
    pub(crate) fn inf_for_dim(dim: usize) -> Self {
        if dim >= 3 {
            Goal::InfDisk
        } else {
            Goal::InfCircle
        }
    }

    pub(crate) fn maximizes(self) -> bool {
        self == Goal::Sup
    }
}

pub(crate) struct PairObjective<'a> {
    b: &'a CMatrix,
    bh: CMatrix,
    q: Complex64,
    qm: f64,
    p: f64,
    goal: Goal,
}

struct Parts {
    h: Complex64,
    bu: CVector,
    r: CVector,
    rn: f64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl<'a> PairObjective<'a> {
    pub(crate) fn new(b: &'a CMatrix, q: QParam, goal: Goal) -> Self {
        Self {
            b,
            bh: b.adjoint(),
            q: q.value(),
            qm: q.modulus(),
            p: q.complement(),
            goal,
        }
    }

    fn parts(&self, u: &CVector) -> Parts {
        let bu = self.b * u;
        let h = u.dotc(&bu);
        let r = &bu - u * h;
        let rn = r.norm();
        Parts { h, bu, r, rn }
    }

    fn combine(&self, h: Complex64, rn: f64) -> f64 {
        let s = self.qm * h.norm();
        let t = self.p * rn;
        match self.goal {
            Goal::Sup => s + t,
            Goal::InfCircle => (s - t).abs(),
            Goal::InfDisk => (s - t).max(0.0),
        }
    }

    pub(crate) fn value(&self, u: &CVector) -> f64 {
        let pt = self.parts(u);
        self.combine(pt.h, pt.rn)
    }

    /// Value and Euclidean gradient `g` with `df = Re(du^H g)`, valid on the unit sphere.
    pub(crate) fn value_grad(&self, u: &CVector) -> (f64, CVector) {
        let pt = self.parts(u);
        let value = self.combine(pt.h, pt.rn);
        let bhu = &self.bh * u;
        let hn = pt.h.norm();
        let grad_h = if hn > 0.0 {
            let ph = pt.h / hn;
            &pt.bu * ph.conj() + &bhu * ph
        } else {
            CVector::zeros(u.len())
        };
        let grad_r = if pt.rn > 0.0 {
            (&self.bh * &pt.bu - &pt.bu * pt.h.conj() - &bhu * pt.h) / Complex64::new(pt.rn, 0.0)
        } else {
            CVector::zeros(u.len())
        };
        let qm = Complex64::new(self.qm, 0.0);
        let p = Complex64::new(self.p, 0.0);
        let grad = match self.goal {
            Goal::Sup => grad_h * qm + grad_r * p,
            Goal::InfCircle => {
                let sign = if self.qm * hn >= self.p * pt.rn { 1.0 } else { -1.0 };
                (grad_h * qm - grad_r * p) * Complex64::new(sign, 0.0)
            }
            Goal::InfDisk => {
                if self.qm * hn > self.p * pt.rn {
                    grad_h * qm - grad_r * p
                } else {
                    CVector::zeros(u.len())
                }
            }
        };
        (value, grad)
    }

    /// The partner `y` attaining the objective value at unit `u`.
    pub(crate) fn partner(&self, u: &CVector) -> CVector {
        let d = u.len();
        let base = u * self.q.conj();
        if self.p == 0.0 || d < 2 {
            return base;
        }
        let pt = self.parts(u);
        let c = self.q * pt.h;
        let phase_c = if c.norm() > 0.0 { c / c.norm() } else { ONE };
        let scale = pt.bu.norm().max(f64::MIN_POSITIVE);
        let rhat = if pt.rn > 1e-14 * scale {
            &pt.r / Complex64::new(pt.rn, 0.0)
        } else {
            orthogonal_unit(&[u])
        };
        let (z, rot) = match self.goal {
            // p e^{-i theta} ||r|| aligned with c.
            Goal::Sup => (rhat, phase_c.conj()),
            Goal::InfCircle => (rhat, -phase_c.conj()),
            Goal::InfDisk => {
                let s = self.qm * pt.h.norm();
                let t = self.p * pt.rn;
                if s >= t {
                    (rhat, -phase_c.conj())
                } else {
                    // Shrink z^H r to |c| / p so the two terms cancel exactly.
                    let alpha = s / t;
                    let other = orthogonal_unit(&[u, &rhat]);
                    let z = &rhat * Complex64::new(alpha, 0.0)
                        + other * Complex64::new((1.0 - alpha * alpha).max(0.0).sqrt(), 0.0);
                    (z, -phase_c.conj())
                }
            }
        };
        // e^{i theta} = rot, so e^{-i theta} = conj(rot) = +/- phase_c.
        base + z * (rot * self.p)
    }
}

/// A unit vector orthogonal to every (unit) vector in `against`; needs `dim > against.len()`.
pub(crate) fn orthogonal_unit(against: &[&CVector]) -> CVector {
    let d = against[0].len();
    let mut best = CVector::zeros(d);
    let mut best_norm = -1.0;
    for k in 0..d {
        let mut v = CVector::from_fn(d, |i, _| if i == k { ONE } else { ZERO });
        for _ in 0..2 {
            for a in against {
                let proj = a.dotc(&v);
                v -= *a * proj;
            }
        }
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    best / Complex64::new(best_norm, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, gaussian_vector, rng, unit_phase};

    fn unit(v: CVector) -> CVector {
        let n = v.norm();
        v / Complex64::new(n, 0.0)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut g = rng(11, 0);
        for goal in [Goal::Sup, Goal::InfCircle, Goal::InfDisk] {
            for d in [2usize, 3, 5] {
                let b = gaussian_matrix(&mut g, d);
                let q = QParam::new(Complex64::from_polar(0.35, 1.1)).unwrap();
                let obj = PairObjective::new(&b, q, goal);
                let u = unit(gaussian_vector(&mut g, d));
                let (_, grad) = obj.value_grad(&u);
                // Tangent directions only: the gradient is meaningful on the sphere.
                for _ in 0..4 {
                    let mut dir = gaussian_vector(&mut g, d);
                    let radial = u.dotc(&dir).re;
                    dir -= &u * Complex64::new(radial, 0.0);
                    let eps = 1e-6;
                    let plus = unit(&u + &dir * Complex64::new(eps, 0.0));
                    let minus = unit(&u - &dir * Complex64::new(eps, 0.0));
                    let fd = (obj.value(&plus) - obj.value(&minus)) / (2.0 * eps);
                    let an = grad.dotc(&dir).re;
                    if goal == Goal::InfDisk && obj.value(&u) == 0.0 {
                        continue;
                    }
                    assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "{goal:?} d={d}: fd {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn inner_maximization_identity() {
        let mut g = rng(5, 1);
        for d in [2usize, 3, 4] {
            let b = gaussian_matrix(&mut g, d);
            let q = QParam::new(Complex64::from_polar(0.6, -0.7)).unwrap();
            let p = q.complement();
            let obj = PairObjective::new(&b, q, Goal::Sup);
            for _ in 0..2500 {
                let u = unit(gaussian_vector(&mut g, d));
                let mut z = gaussian_vector(&mut g, d);
                let proj = u.dotc(&z);
                z -= &u * proj;
                let z = unit(z);
                let theta = unit_phase(&mut g);
                let bu = &b * &u;
                let lhs = (q.value() * u.dotc(&bu) + theta.conj() * p * z.dotc(&bu)).norm();
                assert!(lhs <= obj.value(&u) + 1e-12);
            }
            // Equality at the constructed partner.
            let u = unit(gaussian_vector(&mut g, d));
            let y = obj.partner(&u);
            assert!(((&b * &u).dotc(&y).conj().norm() - obj.value(&u)).abs() < 1e-12);
            let y_dot = u.dotc(&y).conj();
            assert!((y_dot - q.value()).norm() < 1e-12);
            assert!((y.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partner_attains_inf_objectives() {
        let mut g = rng(8, 2);
        for d in [2usize, 3, 4] {
            let b = gaussian_matrix(&mut g, d);
            for qm in [0.2, 0.7, 0.95] {
                let q = QParam::new(Complex64::from_polar(qm, 0.4)).unwrap();
                let obj = PairObjective::new(&b, q, Goal::inf_for_dim(d));
                for _ in 0..50 {
                    let u = unit(gaussian_vector(&mut g, d));
                    let y = obj.partner(&u);
                    let val = y.dotc(&(&b * &u)).norm();
                    assert!((val - obj.value(&u)).abs() < 1e-12, "d={d}");
                    assert!((u.dotc(&y).conj() - q.value()).norm() < 1e-12);
                    assert!((y.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
