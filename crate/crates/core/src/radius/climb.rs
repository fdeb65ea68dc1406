//! Projected ascent on the complex unit sphere.
//!
//! Conjugate-gradient directions (Polak-Ribiere, restarted whenever the
//! direction stops being an ascent direction) along great circles, with a
//! doubling/halving line search. Each stall triggers a small random kick from
//! the best point until the kick allowance is exhausted.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::random::gaussian_vector;
use crate::semispace::CVector;

const MIN_STEP: f64 = 1e-13;
const MAX_STEP: f64 = 1.0;
const KICKS: usize = 2;
const KICK_SIZE: f64 = 1e-2;

pub(crate) struct Climb {
    pub u: CVector,
    pub value: f64,
}

fn normalize(v: CVector) -> CVector {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn tangent(u: &CVector, g: &CVector) -> CVector {
    let radial = u.dotc(g).re;
    g - u * Complex64::new(radial, 0.0)
}

fn along(u: &CVector, dir: &CVector, step: f64) -> CVector {
    normalize(u * Complex64::new(step.cos(), 0.0) + dir * Complex64::new(step.sin(), 0.0))
}

/// Maximizes (or minimizes) over unit vectors starting from `start`.
///
/// `value` evaluates the objective; `value_grad` also returns the Euclidean
/// gradient in the `Re(du^H g)` convention.
pub(crate) fn climb<V, G>(
    value: V,
    value_grad: G,
    start: CVector,
    iterations: usize,
    maximize: bool,
    rng: &mut ChaCha8Rng,
) -> Climb
where
    V: Fn(&CVector) -> f64,
    G: Fn(&CVector) -> (f64, CVector),
{
    let sign = if maximize { 1.0 } else { -1.0 };
    let better = |a: f64, b: f64| sign * a > sign * b;

    let mut u = normalize(start);
    let (mut v, g) = value_grad(&u);
    let mut grad = tangent(&u, &(g * Complex64::new(sign, 0.0)));
    let mut dir = grad.clone();
    let mut step = 0.25;
    let mut best = Climb { u: u.clone(), value: v };
    let mut kicks = 0;

    for _ in 0..iterations {
        let gn = grad.norm();
        let dn = dir.norm();
        let stalled = if gn <= 1e-15 * (1.0 + v.abs()) || dn == 0.0 {
            true
        } else {
            let unit_dir = &dir / Complex64::new(dn, 0.0);
            // Line search: halve until improvement, then keep doubling while it helps.
            let mut found: Option<(CVector, f64, f64)> = None;
            while step >= MIN_STEP {
                let cand = along(&u, &unit_dir, step);
                let vc = value(&cand);
                if better(vc, v) {
                    found = Some((cand, vc, step));
                    break;
                }
                step *= 0.5;
            }
            match found {
                None => true,
                Some((mut cand, mut vc, mut s)) => {
                    for _ in 0..6 {
                        let s2 = (2.0 * s).min(MAX_STEP);
                        if s2 <= s {
                            break;
                        }
                        let c2 = along(&u, &unit_dir, s2);
                        let v2 = value(&c2);
                        if better(v2, vc) {
                            cand = c2;
                            vc = v2;
                            s = s2;
                        } else {
                            break;
                        }
                    }
                    step = s;
                    let (vn, gn_raw) = value_grad(&cand);
                    let new_grad = tangent(&cand, &(gn_raw * Complex64::new(sign, 0.0)));
                    let old_grad = tangent(&cand, &grad);
                    let denom = grad.norm_squared();
                    let beta = if denom > 0.0 {
                        (new_grad.dotc(&(&new_grad - &old_grad)).re / denom).max(0.0)
                    } else {
                        0.0
                    };
                    let mut new_dir = &new_grad + tangent(&cand, &dir) * Complex64::new(beta, 0.0);
                    if new_dir.dotc(&new_grad).re <= 0.0 {
                        new_dir = new_grad.clone();
                    }
                    u = cand;
                    v = vn;
                    grad = new_grad;
                    dir = new_dir;
                    if better(v, best.value) {
                        best = Climb { u: u.clone(), value: v };
                    }
                    false
                }
            }
        };
        if stalled {
            if !dir.iter().zip(grad.iter()).all(|(a, b)| a == b) {
                // Drop the conjugate history before giving up on this point.
                dir = grad.clone();
                step = step.max(1e-6);
                continue;
            }
            if kicks >= KICKS {
                break;
            }
            kicks += 1;
            let noise = tangent(&best.u, &gaussian_vector(rng, best.u.len()));
            let nn = noise.norm();
            if nn == 0.0 {
                break;
            }
            let kick = KICK_SIZE * (0.5 + rng.random::<f64>());
            u = along(&best.u, &(noise / Complex64::new(nn, 0.0)), kick);
            let (vk, gk) = value_grad(&u);
            v = vk;
            grad = tangent(&u, &(gk * Complex64::new(sign, 0.0)));
            dir = grad.clone();
            step = 0.25 * KICK_SIZE;
            if better(v, best.value) {
                best = Climb { u: u.clone(), value: v };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;
    use crate::semispace::{cdiag, CMatrix};

    #[test]
    fn finds_rayleigh_extremes() {
        let h: CMatrix = cdiag(&[3.0, -1.0, 0.5, 2.0]);
        let value = |u: &CVector| u.dotc(&(&h * u)).re;
        let value_grad = |u: &CVector| {
            let hu = &h * u;
            (u.dotc(&hu).re, hu * Complex64::new(2.0, 0.0))
        };
        let mut r = rng(0, 0);
        let start = gaussian_vector(&mut r, 4);
        let top = climb(value, value_grad, start.clone(), 500, true, &mut r);
        assert!((top.value - 3.0).abs() < 1e-10);
        let bottom = climb(value, value_grad, start, 500, false, &mut r);
        assert!((bottom.value + 1.0).abs() < 1e-10);
    }
}
