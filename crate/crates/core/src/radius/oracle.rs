//! Brute-force reference values by direct evaluation over the pair set.
//!
//! Pairs are parameterized as `y = conj(q) x + p e^{i theta} z` in the original
//! coordinates, with `x` and `z` built from angles over an A-orthonormal basis
//! of `range(A)` and `|<Tx, y>_A|` evaluated directly. Dimension 2 is an
//! exhaustive grid over its three angles; dimension 3 has seven angles, so it
//! uses a coarser grid. Both finish with a compass search from the best grid
//! points.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::semispace::{a_inner, a_norm_vec, check_operator, CMatrix, CVector, QParam, Weight};

const REFINE_TOP: usize = 24;
const REFINE_MIN_STEP: f64 = 1e-10;
const REFINE_MAX_EVALS: usize = 20_000;
/// Infimum values below this fraction of the supremum count as zero.
const ZERO_FLOOR: f64 = 1e-12;

struct Evaluator {
    /// A-orthonormal basis of `range(A)`, as columns.
    basis: Vec<CVector>,
    at: CMatrix,
    a: CMatrix,
    q: Complex64,
    p: f64,
}

impl Evaluator {
    fn new(w: &Weight, t: &CMatrix, q: QParam) -> Result<Self> {
        let n = w.dim();
        // Gram-Schmidt under <.,.>_A over the standard basis, keeping the
        // directions with non-negligible seminorm.
        let mut basis: Vec<CVector> = Vec::new();
        let scale = w.eigvals()[0].sqrt();
        for k in 0..n {
            let mut v = CVector::from_fn(n, |i, _| if i == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
            for _ in 0..2 {
                for e in &basis {
                    let c = a_inner(w, &v, e)?;
                    v -= e * c;
                }
            }
            let nv = a_norm_vec(w, &v)?;
            if nv > 1e-7 * scale {
                basis.push(v / Complex64::new(nv, 0.0));
            }
        }
        Ok(Self {
            basis,
            at: w.matrix() * t,
            a: w.matrix().clone(),
            q: q.value(),
            p: q.complement(),
        })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn combine(&self, coeffs: &[Complex64]) -> CVector {
        let mut v = CVector::zeros(self.basis[0].len());
        for (c, e) in coeffs.iter().zip(&self.basis) {
            v += e * *c;
        }
        v
    }

    /// A-orthonormal completion of `x` in `range(A)`.
    fn complement(&self, x: &CVector) -> Vec<CVector> {
        let mut out: Vec<CVector> = Vec::new();
        let mut cands: Vec<(f64, CVector)> = self
            .basis
            .iter()
            .map(|e| {
                let mut v = e.clone();
                for _ in 0..2 {
                    let c = x.dotc(&(&self.a * &v));
                    v -= x * c;
                }
                (self.norm(&v), v)
            })
            .collect();
        // Most independent candidates first.
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (_, mut v) in cands {
            if out.len() + 1 == self.dim() {
                break;
            }
            for _ in 0..2 {
                for e in &out {
                    let c = e.dotc(&(&self.a * &v));
                    v -= e * c;
                }
            }
            let nv = self.norm(&v);
            if nv > 1e-6 {
                out.push(v / Complex64::new(nv, 0.0));
            }
        }
        out
    }

    fn norm(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.a * v)).re.max(0.0).sqrt()
    }

    fn value(&self, x: &CVector, y: &CVector) -> f64 {
        y.dotc(&(&self.at * x)).norm()
    }

    /// Maps an angle vector to `(x, y)`.
    ///
    /// Layout: angles for `x` (`2d - 2` of them), then for `z` (`2d - 4`), then `theta`.
    fn pair(&self, angles: &[f64]) -> (CVector, CVector) {
        let d = self.dim();
        let x = self.combine(&sphere_point(&angles[..2 * d - 2]));
        if self.p == 0.0 || d < 2 {
            return (x.clone(), x * self.q.conj());
        }
        let comp = self.complement(&x);
        let zc = sphere_point(&angles[2 * d - 2..2 * d - 2 + 2 * (d - 1) - 2]);
        let mut z = CVector::zeros(x.len());
        for (c, e) in zc.iter().zip(&comp) {
            z += e * *c;
        }
        let theta = angles[angles.len() - 1];
        let y = &x * self.q.conj() + z * Complex64::from_polar(self.p, theta);
        (x, y)
    }

    fn eval(&self, angles: &[f64]) -> f64 {
        let (x, y) = self.pair(angles);
        self.value(&x, &y)
    }

    fn n_angles(&self) -> usize {
        let d = self.dim();
        if self.p == 0.0 || d < 2 {
            2 * d - 2
        } else {
            (2 * d - 2) + (2 * d - 4) + 1
        }
    }
}

/// Unit vector in `C^m` from `2m - 2` angles: moduli from hyperspherical
/// angles in `[0, pi/2]`, then phases for all but the first coordinate.
fn sphere_point(angles: &[f64]) -> Vec<Complex64> {
    let m = angles.len() / 2 + 1;
    let (polar, phases) = angles.split_at(m - 1);
    let mut out = Vec::with_capacity(m);
    let mut rest = 1.0;
    for k in 0..m {
        let modulus = if k + 1 < m { rest * polar[k].cos() } else { rest };
        if k + 1 < m {
            rest *= polar[k].sin();
        }
        let phase = if k == 0 { 0.0 } else { phases[k - 1] };
        out.push(Complex64::from_polar(modulus, phase));
    }
    out
}

/// Grid axes: polar angles on `[0, pi/2]` inclusive, phases on `[0, 2 pi)`.
fn axes(ev: &Evaluator, points: usize) -> Vec<Vec<f64>> {
    let d = ev.dim();
    let polar = |k: usize| -> Vec<f64> { (0..k).map(|i| FRAC_PI_2 * i as f64 / (k - 1).max(1) as f64).collect() };
    let phase = |k: usize| -> Vec<f64> { (0..k).map(|i| TAU * i as f64 / k as f64).collect() };
    let mut out = Vec::new();
    let sphere = |m: usize, out: &mut Vec<Vec<f64>>| {
        for _ in 0..m - 1 {
            out.push(polar(points));
        }
        for _ in 0..m - 1 {
            out.push(phase(points));
        }
    };
    sphere(d, &mut out);
    if ev.n_angles() > 2 * d - 2 {
        if d > 2 {
            sphere(d - 1, &mut out);
        }
        out.push(phase(points));
    }
    out
}

/// Coordinate pattern search. Minimization stops once the value is below
/// `floor`; every start gets at most `REFINE_MAX_EVALS` evaluations.
fn compass<F: Fn(&[f64]) -> f64>(f: &F, start: Vec<f64>, fstart: f64, step: f64, maximize: bool, floor: f64) -> f64 {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut x = start;
    let mut fx = fstart;
    let mut h = step;
    let mut evals = 0;
    while h > REFINE_MIN_STEP && evals < REFINE_MAX_EVALS {
        if !maximize && fx <= floor {
            break;
        }
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[i] += dir * h;
                let fc = f(&cand);
                evals += 1;
                if sign * fc > sign * fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    fx
}

/// `(lower_sup, upper_inf)` of `|<Tx, y>_A|` over admissible pairs, by grid
/// search and local refinement. `resolution` is the number of points per angle
/// in dimension 2; dimension 3 uses `ceil(resolution^(3/7))`, keeping the
/// evaluation count comparable.
pub fn oracle_grid(w: &Weight, t: &CMatrix, q: QParam, resolution: usize) -> Result<(f64, f64)> {
    check_operator(t)?;
    if t.nrows() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: t.nrows(),
        });
    }
    if w.rank() > 3 {
        return Err(Error::OracleDimension(w.rank()));
    }
    if w.rank() < 2 && !q.is_unimodular() {
        return Err(Error::RankTooLow { rank: w.rank() });
    }
    let ev = Evaluator::new(w, t, q)?;
    if ev.n_angles() == 0 {
        let v = ev.eval(&[0.0]);
        return Ok((v, v));
    }
    let per_axis = if ev.dim() <= 2 {
        resolution.max(4)
    } else {
        (resolution.max(2) as f64).powf(3.0 / 7.0).ceil() as usize
    };
    let ax = axes(&ev, per_axis);
    let nx = 2 * ev.dim() - 2;
    let (x_axes, rest_axes) = ax.split_at(nx.min(ax.len()));

    let mut top_max = Top::new(true);
    let mut top_min = Top::new(false);
    let mut angles = vec![0.0; ax.len()];
    for_each_point(x_axes, |xa| {
        angles[..nx].copy_from_slice(xa);
        let x = ev.combine(&sphere_point(xa));
        let atx = &ev.at * &x;
        let head = x.dotc(&atx) * ev.q;
        if rest_axes.is_empty() {
            let v = head.norm();
            top_max.offer(v, &angles);
            top_min.offer(v, &angles);
            return;
        }
        let comp = ev.complement(&x);
        let (z_axes, theta_axis) = rest_axes.split_at(rest_axes.len() - 1);
        let thetas: Vec<Complex64> = theta_axis[0].iter().map(|&t| Complex64::from_polar(ev.p, -t)).collect();
        for_each_point(z_axes, |za| {
            angles[nx..nx + za.len()].copy_from_slice(za);
            let zc = sphere_point(za);
            let mut zt = Complex64::new(0.0, 0.0);
            for (c, e) in zc.iter().zip(&comp) {
                zt += c.conj() * e.dotc(&atx);
            }
            for (i, rot) in thetas.iter().enumerate() {
                // y^H A T x with y = conj(q) x + p e^{i theta} z.
                let v = (head + rot * zt).norm();
                angles[ax.len() - 1] = theta_axis[0][i];
                top_max.offer(v, &angles);
                top_min.offer(v, &angles);
            }
        });
    });

    let step = TAU / per_axis as f64;
    let f = |a: &[f64]| ev.eval(a);
    let sup = top_max
        .entries
        .into_iter()
        .map(|(v, a)| compass(&f, a, v, step, true, 0.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = ZERO_FLOOR * sup.max(f64::MIN_POSITIVE);
    let inf = top_min
        .entries
        .into_iter()
        .map(|(v, a)| compass(&f, a, v, step, false, floor))
        .fold(f64::INFINITY, f64::min);
    Ok((sup, inf))
}

/// Calls `f` on every point of the product grid `axes`.
fn for_each_point<F: FnMut(&[f64])>(axes: &[Vec<f64>], mut f: F) {
    let total: usize = axes.iter().map(|a| a.len()).product();
    let mut idx = vec![0usize; axes.len()];
    let mut point = vec![0.0; axes.len()];
    for _ in 0..total {
        for (k, &i) in idx.iter().enumerate() {
            point[k] = axes[k][i];
        }
        f(&point);
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// The best `REFINE_TOP` grid points seen so far.
struct Top {
    entries: Vec<(f64, Vec<f64>)>,
    maximize: bool,
    /// Value a new point has to beat once the list is full.
    threshold: f64,
}

impl Top {
    fn new(maximize: bool) -> Self {
        Self {
            entries: Vec::with_capacity(REFINE_TOP),
            maximize,
            threshold: if maximize { f64::NEG_INFINITY } else { f64::INFINITY },
        }
    }

    fn worse(&self, a: f64, b: f64) -> bool {
        if self.maximize {
            a < b
        } else {
            a > b
        }
    }

    fn offer(&mut self, v: f64, angles: &[f64]) {
        if self.entries.len() < REFINE_TOP {
            self.entries.push((v, angles.to_vec()));
        } else if self.worse(self.threshold, v) {
            let wi = self.worst_index();
            self.entries[wi] = (v, angles.to_vec());
        } else {
            return;
        }
        if self.entries.len() == REFINE_TOP {
            self.threshold = self.entries[self.worst_index()].0;
        }
    }

    fn worst_index(&self) -> usize {
        let mut wi = 0;
        for (i, e) in self.entries.iter().enumerate() {
            if self.worse(e.0, self.entries[wi].0) {
                wi = i;
            }
        }
        wi
    }
}
