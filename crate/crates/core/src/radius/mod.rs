//! Estimators for `omega_{A,q}`, `c_{A,q}`, `omega_A`, `c_A` and the gaps.
//!
//! Everything runs on the reduced matrix `B` of [`reduce_compressed`], where the
//! A-quantities of `T` become standard quantities of `B`. The classical
//! radius and Crawford number come from support-function sweeps; the `q`
//! versions from multi-start ascent over the reduced unit sphere with the
//! partner vector eliminated in closed form (see [`objective`]).

mod climb;
mod objective;
mod oracle;
pub(crate) mod sweep;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pairset::sample_pairs;
use crate::random::{gaussian_vector, rng};
use crate::semispace::{a_opnorm, reduce_compressed, CMatrix, CVector, QParam, Weight};

use climb::climb;
use objective::{Goal, PairObjective};

pub use oracle::oracle_grid;

/// Restart stream offset; restart `k` draws from stream `RESTART_STREAM + k`.
const RESTART_STREAM: u64 = 1000;

/// Estimator effort. `grid_resolution` is the number of rotation angles in the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
    pub grid_resolution: usize,
    /// Sampled pairs screened for the first start.
    pub pair_samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 500,
            grid_resolution: 256,
            pair_samples: 256,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_restarts(restarts: usize) -> Self {
        Self {
            restarts,
            ..Self::default()
        }
    }

    /// `k` times the restarts, same everything else.
    pub fn scaled(&self, k: usize) -> Self {
        Self {
            restarts: self.restarts * k,
            ..*self
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    LowerBoundOfSup,
    UpperBoundOfInf,
    TwoSided,
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub direction: Direction,
    #[serde(serialize_with = "serialize_cvec")]
    pub witness_x: CVector,
    #[serde(serialize_with = "serialize_cvec")]
    pub witness_y: CVector,
    pub budget: Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapValue {
    pub op_norm: f64,
    pub radius_or_crawford: f64,
    pub gap: f64,
}

impl GapValue {
    pub fn new(op_norm: f64, radius_or_crawford: f64) -> Self {
        Self {
            op_norm,
            radius_or_crawford,
            gap: op_norm - radius_or_crawford,
        }
    }
}

/// Serializes a complex vector as `{"re": [...], "im": [...]}`.
pub fn serialize_cvec<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: Vec<f64>,
        im: Vec<f64>,
    }
    Parts {
        re: v.iter().map(|z| z.re).collect(),
        im: v.iter().map(|z| z.im).collect(),
    }
    .serialize(s)
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn witness(w: &Weight, b: &CMatrix, u: &CVector, v: &CVector, direction: Direction, budget: &Budget) -> Estimate {
    Estimate {
        value: v.dotc(&(b * u)).norm(),
        direction,
        witness_x: w.lift(u),
        witness_y: w.lift(v),
        budget: *budget,
    }
}

fn scalar_estimate(w: &Weight, b: &CMatrix, q: QParam, direction: Direction, budget: &Budget) -> Estimate {
    let u = CVector::from_element(1, Complex64::new(1.0, 0.0));
    let v = &u * q.value().conj();
    witness(w, b, &u, &v, direction, budget)
}

/// `omega_A(T)` by the rotation sweep on the reduced matrix.
pub fn a_radius(w: &Weight, t: &CMatrix) -> Result<Estimate> {
    a_radius_with(w, t, &Budget::default())
}

pub fn a_radius_with(w: &Weight, t: &CMatrix, budget: &Budget) -> Result<Estimate> {
    let b = reduce_compressed(w, t)?.b;
    if b.nrows() == 1 {
        return Ok(scalar_estimate(w, &b, QParam::one(), Direction::TwoSided, budget));
    }
    let (_, _, x) = sweep::radius_sweep(&b, budget.grid_resolution);
    Ok(witness(w, &b, &x, &x, Direction::TwoSided, budget))
}

/// `c_A(T)`: the distance from the origin to the numerical range of the reduced matrix.
///
/// When the sweep certifies a positive distance the witness is polished by
/// descent; when it finds the origin inside, a zero witness is constructed.
pub fn a_crawford(w: &Weight, t: &CMatrix) -> Result<Estimate> {
    a_crawford_with(w, t, &Budget::default())
}

pub fn a_crawford_with(w: &Weight, t: &CMatrix, budget: &Budget) -> Result<Estimate> {
    let b = reduce_compressed(w, t)?.b;
    if b.nrows() == 1 {
        return Ok(scalar_estimate(w, &b, QParam::one(), Direction::TwoSided, budget));
    }
    let (_, m, x) = sweep::crawford_sweep(&b, budget.grid_resolution);
    let scale = crate::semispace::frobenius(&b);
    if m <= 1e-12 * scale {
        if let Some(z) = sweep::zero_witness(&b) {
            return Ok(witness(w, &b, &z, &z, Direction::TwoSided, budget));
        }
    }
    let obj = PairObjective::new(&b, QParam::one(), Goal::InfCircle);
    let mut r = rng(budget.seed, RESTART_STREAM);
    let polished = climb(|u| obj.value(u), |u| obj.value_grad(u), x.clone(), budget.iterations, false, &mut r);
    let u = if polished.value < obj.value(&x) { polished.u } else { x };
    Ok(witness(w, &b, &u, &u, Direction::TwoSided, budget))
}

fn check_rank(w: &Weight, q: QParam) -> Result<()> {
    if w.rank() < 2 && !q.is_unimodular() {
        return Err(Error::RankTooLow { rank: w.rank() });
    }
    Ok(())
}

/// Runs the multi-start search for `goal` and returns the best reduced unit vector.
///
/// Start 0 is the best of `pair_samples` sampled admissible pairs, start 1
/// the extreme eigenvector of the matching sweep, the rest are Gaussian.
/// Ties go to the lower restart index, so more restarts never give a worse result.
fn search(w: &Weight, t: &CMatrix, b: &CMatrix, q: QParam, goal: Goal, budget: &Budget) -> Result<CVector> {
    let d = b.nrows();
    let obj = PairObjective::new(b, q, goal);
    let maximize = goal.maximizes();
    let better = |a: f64, c: f64| if maximize { a > c } else { a < c };

    let mut best: Option<(CVector, f64)> = None;
    for k in 0..budget.restarts.max(1) {
        let mut r: ChaCha8Rng = rng(budget.seed, RESTART_STREAM + k as u64);
        let start = match k {
            0 => sampled_start(w, t, q, budget, maximize)?.unwrap_or_else(|| unit(gaussian_vector(&mut r, d))),
            1 => {
                let (_, _, x) = if maximize {
                    sweep::radius_sweep(b, budget.grid_resolution)
                } else {
                    sweep::crawford_sweep(b, budget.grid_resolution)
                };
                x
            }
            _ => unit(gaussian_vector(&mut r, d)),
        };
        let c = climb(|u| obj.value(u), |u| obj.value_grad(u), start, budget.iterations, maximize, &mut r);
        if best.as_ref().is_none_or(|(_, v)| better(c.value, *v)) {
            best = Some((c.u, c.value));
        }
    }
    Ok(best.expect("at least one restart").0)
}

fn sampled_start(
    w: &Weight,
    t: &CMatrix,
    q: QParam,
    budget: &Budget,
    maximize: bool,
) -> Result<Option<CVector>> {
    if budget.pair_samples == 0 {
        return Ok(None);
    }
    let pairs = sample_pairs(w, q, budget.pair_samples, budget.seed)?;
    let at = w.matrix() * t;
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in pairs.iter().enumerate() {
        let v = p.y.dotc(&(&at * &p.x)).norm();
        let improves = match best {
            None => true,
            Some((_, bv)) => (maximize && v > bv) || (!maximize && v < bv),
        };
        if improves {
            best = Some((i, v));
        }
    }
    match best {
        None => Ok(None),
        Some((i, _)) => Ok(Some(unit(w.to_reduced(&pairs[i].x)?))),
    }
}

fn aq_estimate(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget, sup: bool) -> Result<Estimate> {
    check_rank(w, q)?;
    let b = reduce_compressed(w, t)?.b;
    let direction = if sup {
        Direction::LowerBoundOfSup
    } else {
        Direction::UpperBoundOfInf
    };
    if b.nrows() == 1 {
        return Ok(scalar_estimate(w, &b, q, direction, budget));
    }
    let goal = if sup { Goal::Sup } else { Goal::inf_for_dim(b.nrows()) };
    let u = search(w, t, &b, q, goal, budget)?;
    let v = PairObjective::new(&b, q, goal).partner(&u);
    Ok(witness(w, &b, &u, &v, direction, budget))
}

/// Lower bound of `omega_{A,q}(T)` with an admissible witness pair.
pub fn aq_radius(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Estimate> {
    aq_estimate(w, t, q, budget, true)
}

/// Upper bound of `c_{A,q}(T)` with an admissible witness pair.
pub fn aq_crawford(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Estimate> {
    aq_estimate(w, t, q, budget, false)
}

/// `(g_omega, g_c)`: `||T||_A` minus the radius and minus the Crawford number.
pub fn gaps(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<(GapValue, GapValue)> {
    let norm = a_opnorm(w, t)?;
    let omega = aq_radius(w, t, q, budget)?.value;
    let c = aq_crawford(w, t, q, budget)?.value;
    Ok((GapValue::new(norm, omega), GapValue::new(norm, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, random_weight};
    use crate::semispace::{a_inner, cdiag, rmat};

    fn q(v: f64) -> QParam {
        QParam::real(v).unwrap()
    }

    fn small() -> Budget {
        Budget::with_restarts(8)
    }

    fn check_witness(w: &Weight, t: &CMatrix, qp: QParam, e: &Estimate) {
        let tx = t * &e.witness_x;
        let val = a_inner(w, &tx, &e.witness_y).unwrap().norm();
        assert!((val - e.value).abs() <= 1e-7);
        let achieved = a_inner(w, &e.witness_x, &e.witness_y).unwrap();
        assert!((achieved - qp.value()).norm() <= 1e-9);
    }

    #[test]
    fn classical_radius_examples() {
        let w = Weight::identity(2);
        let e = a_radius(&w, &rmat(&[&[0.0, 1.0 / 24.0], &[0.0, 0.0]])).unwrap();
        assert!((e.value - 1.0 / 48.0).abs() < 1e-12);
        let j = rmat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let e = a_radius(&Weight::identity(3), &j).unwrap();
        assert!((e.value - 0.5f64.sqrt()).abs() < 1e-12);
        let e = a_radius(&w, &cdiag(&[-2.0, 1.0])).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn example1_q_radius() {
        let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        let w = Weight::identity(2);
        for qv in [1e-9f64, 0.25, 0.5, 0.75, 1.0] {
            let qp = q(qv.max(1e-9));
            let e = aq_radius(&w, &t, qp, &small()).unwrap();
            let expect = (1.0 + (1.0 - qv * qv).sqrt()) / 140.0;
            assert!((e.value - expect).abs() < 1e-6, "q={qv}: {} vs {expect}", e.value);
            check_witness(&w, &t, qp, &e);
        }
    }

    #[test]
    fn scalar_radius_and_crawford() {
        let t = cdiag(&[0.05, 0.05]);
        let w = Weight::identity(2);
        for qv in [0.1, 0.5, 0.9, 1.0] {
            let r = aq_radius(&w, &t, q(qv), &small()).unwrap();
            let c = aq_crawford(&w, &t, q(qv), &small()).unwrap();
            assert!((r.value - qv / 20.0).abs() < 1e-12);
            assert!((c.value - qv / 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn crawford_examples() {
        let w = Weight::identity(2);
        let nil = rmat(&[&[0.0, 3.0], &[0.0, 0.0]]);
        for qv in [0.2, 0.6, 0.9] {
            let c = aq_crawford(&w, &nil, q(qv), &small()).unwrap();
            assert!(c.value < 1e-10);
            check_witness(&w, &nil, q(qv), &c);
        }
        let c = aq_crawford(&w, &cdiag(&[1.0, 3.0]), QParam::one(), &small()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-10);
        let c = a_crawford(&w, &cdiag(&[1.0, -1.0])).unwrap();
        assert!(c.value < 1e-12);
        let mut g = crate::random::rng(1, 1);
        let wa = random_weight(&mut g, 3);
        let c = a_crawford(&wa, &CMatrix::identity(3, 3)).unwrap();
        assert!((c.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn q_one_matches_classical() {
        let mut g = crate::random::rng(2, 0);
        for d in [2usize, 3, 4] {
            let w = random_weight(&mut g, d);
            let t = gaussian_matrix(&mut g, d);
            let r1 = aq_radius(&w, &t, QParam::one(), &small()).unwrap();
            let r = a_radius(&w, &t).unwrap();
            assert!((r1.value - r.value).abs() < 1e-6);
            let c1 = aq_crawford(&w, &t, QParam::one(), &small()).unwrap();
            let c = a_crawford(&w, &t).unwrap();
            assert!((c1.value - c.value).abs() < 1e-6, "d={d}: {} vs {}", c1.value, c.value);
        }
    }

    #[test]
    fn gaps_of_identity() {
        let w = Weight::identity(3);
        let t = CMatrix::identity(3, 3);
        let qp = QParam::new(Complex64::from_polar(0.6, 0.3)).unwrap();
        let (go, gc) = gaps(&w, &t, qp, &small()).unwrap();
        assert!((go.gap - 0.4).abs() < 1e-9);
        assert!((gc.gap - 0.4).abs() < 1e-9);
        let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        let (go, _) = gaps(&Weight::identity(2), &t, QParam::one(), &small()).unwrap();
        assert!((go.gap - 1.0 / 140.0).abs() < 1e-9);
    }

    #[test]
    fn rank_one_weight() {
        let w = Weight::diagonal(&[2.0, 0.0]).unwrap();
        let t = rmat(&[&[3.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(
            aq_radius(&w, &t, q(0.5), &small()).unwrap_err(),
            Error::RankTooLow { rank: 1 }
        );
        let e = aq_radius(&w, &t, QParam::one(), &small()).unwrap();
        assert!((e.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn more_restarts_never_hurt() {
        let mut g = crate::random::rng(4, 0);
        let w = random_weight(&mut g, 3);
        let t = gaussian_matrix(&mut g, 3);
        let qp = QParam::new(Complex64::from_polar(0.4, 2.0)).unwrap();
        let r4 = aq_radius(&w, &t, qp, &Budget::with_restarts(4)).unwrap().value;
        let r8 = aq_radius(&w, &t, qp, &Budget::with_restarts(8)).unwrap().value;
        assert!(r8 >= r4);
        let c4 = aq_crawford(&w, &t, qp, &Budget::with_restarts(4)).unwrap().value;
        let c8 = aq_crawford(&w, &t, qp, &Budget::with_restarts(8)).unwrap().value;
        assert!(c8 <= c4);
    }
}
