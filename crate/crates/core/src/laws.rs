//! The inequalities between radii, Crawford numbers and norms as executable checks.
//!
//! Every check is `lhs <= rhs` with slack `rhs - lhs`, passing when
//! `slack >= -tol`. Checks whose sides are exact (or where estimator error can
//! only increase the slack) use [`TOL_EXACT`]; checks where a lower bound of a
//! supremum sits on the larger side, or an upper bound of an infimum on the
//! smaller side, use [`TOL_LOOSE`]. A failing law is re-run at 4x and then 16x
//! the restarts; only a failure that survives both is reported.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pairset::sample_pairs;
use crate::radius::{a_crawford_with, a_radius_with, aq_crawford, aq_radius, Budget};
use crate::random::{complex_normal, gaussian_matrix, random_q, random_weight, rng, unit_phase};
use crate::semispace::{
    a_adjoint, a_norm_vec, a_opnorm, direct_sum, kron, CMatrix, QParam, Weight,
};

pub const TOL_EXACT: f64 = 1e-7;
pub const TOL_LOOSE: f64 = 5e-3;
/// Agreement of two independent estimates in the phase-covariance identities.
pub const TOL_EQUAL: f64 = 2e-3;
/// Denominators below this skip the corresponding quotient bound.
pub const MIN_DENOMINATOR: f64 = 1e-6;
const RECHECK_FACTORS: [usize; 2] = [4, 16];
const NORM_IDENTITY_TOL: f64 = 1e-8;
const NORM_IDENTITY_PAIRS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub tol_law: f64,
    pub instance_digest: String,
    pub estimator_budget: Budget,
}

/// `lambda, mu` and `gamma = sqrt(|lambda|^2 + |mu|^2 + 2 Re(lambda conj(mu) q))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinComboParams {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub gamma: f64,
}

impl LinComboParams {
    pub fn new(lambda: Complex64, mu: Complex64, q: QParam) -> Result<Self> {
        let g2 = lambda.norm_sqr() + mu.norm_sqr() + 2.0 * (lambda * mu.conj() * q.value()).re;
        if g2 <= 0.0 {
            return Err(Error::SkippedDomain(0.0));
        }
        Ok(Self {
            lambda,
            mu,
            gamma: g2.sqrt(),
        })
    }
}

/// Which composite parameter the linear-combination bounds use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompositeForm {
    /// `(lambda + mu conj(q)) / gamma`, the parameter of the pair `((lambda x + mu y)/gamma, x)`.
    Statement,
    /// `(lambda + conj(mu) q) / gamma`.
    Proof,
}

/// Which adjoint stands in for `T*` in the linear-combination bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdjointKind {
    /// `A^+ T^H A`, the adjoint with respect to `<., .>_A`.
    Weighted,
    /// `T^H`; agrees with the weighted one only when `A` is a multiple of `I`.
    Ordinary,
}

impl LinComboParams {
    pub fn composite(&self, q: QParam, form: CompositeForm) -> Complex64 {
        let num = match form {
            CompositeForm::Statement => self.lambda + self.mu * q.value().conj(),
            CompositeForm::Proof => self.lambda + self.mu.conj() * q.value(),
        };
        num / self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    OmegaQ,
    CrawfordQ,
    OmegaA,
    CrawfordA,
    Norm,
}

/// Memoized quantities; estimates are keyed by operator, weight, `q` and budget factor.
pub struct Evaluator {
    budget: Budget,
    cache: HashMap<(u64, Kind, u64, u64, usize), f64>,
}

fn digest(w: &Weight, t: &CMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    for m in [w.matrix(), t] {
        m.nrows().hash(&mut h);
        for z in m.iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

impl Evaluator {
    pub fn new(budget: Budget) -> Self {
        Self {
            budget,
            cache: HashMap::new(),
        }
    }

    pub fn budget(&self, mult: usize) -> Budget {
        self.budget.scaled(mult)
    }

    fn get(&mut self, w: &Weight, t: &CMatrix, q: Option<QParam>, kind: Kind, mult: usize) -> Result<f64> {
        let qv = q.map_or(Complex64::new(1.0, 0.0), |q| q.value());
        let key = (digest(w, t), kind, qv.re.to_bits(), qv.im.to_bits(), mult);
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let budget = self.budget(mult);
        let v = match kind {
            Kind::OmegaQ => aq_radius(w, t, q.expect("q"), &budget)?.value,
            Kind::CrawfordQ => aq_crawford(w, t, q.expect("q"), &budget)?.value,
            Kind::OmegaA => a_radius_with(w, t, &budget)?.value,
            Kind::CrawfordA => a_crawford_with(w, t, &budget)?.value,
            Kind::Norm => a_opnorm(w, t)?,
        };
        self.cache.insert(key, v);
        Ok(v)
    }

    pub fn omega_q(&mut self, w: &Weight, t: &CMatrix, q: QParam, mult: usize) -> Result<f64> {
        self.get(w, t, Some(q), Kind::OmegaQ, mult)
    }

    pub fn crawford_q(&mut self, w: &Weight, t: &CMatrix, q: QParam, mult: usize) -> Result<f64> {
        self.get(w, t, Some(q), Kind::CrawfordQ, mult)
    }

    /// The sweep-based classical values do not depend on the restart count.
    pub fn omega_a(&mut self, w: &Weight, t: &CMatrix) -> Result<f64> {
        self.get(w, t, None, Kind::OmegaA, 1)
    }

    pub fn crawford_a(&mut self, w: &Weight, t: &CMatrix) -> Result<f64> {
        self.get(w, t, None, Kind::CrawfordA, 1)
    }

    pub fn norm(&mut self, w: &Weight, t: &CMatrix) -> Result<f64> {
        self.get(w, t, None, Kind::Norm, 1)
    }
}

/// One `lhs <= rhs` comparison produced by a law.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
}

impl Check {
    fn new(id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            lhs,
            rhs,
            tol,
        }
    }

    fn passes(&self) -> bool {
        self.rhs - self.lhs >= -self.tol
    }
}

/// Runs `law` at the base budget and re-runs failures at the recheck factors.
pub fn evaluate_law<F>(eval: &mut Evaluator, instance_digest: &str, law: F) -> Result<Vec<LawReport>>
where
    F: Fn(&mut Evaluator, usize) -> Result<Vec<Check>>,
{
    let mut mult = 1;
    let mut checks = law(eval, mult)?;
    for factor in RECHECK_FACTORS {
        if checks.iter().all(Check::passes) {
            break;
        }
        mult = factor;
        checks = law(eval, mult)?;
    }
    let budget = eval.budget(mult);
    Ok(checks
        .into_iter()
        .map(|c| LawReport {
            pass: c.passes(),
            slack: c.rhs - c.lhs,
            law_id: c.id,
            lhs: c.lhs,
            rhs: c.rhs,
            tol_law: c.tol,
            instance_digest: instance_digest.to_string(),
            estimator_budget: budget,
        })
        .collect())
}

fn s_factor(q: QParam) -> f64 {
    (2.0 * (1.0 - q.value().re)).max(0.0).sqrt()
}

// Individual laws. Each returns the checks for one instance at budget factor `m`.

/// `omega_{A,q}(T) <= ||T||_A`.
pub fn check_t1_1(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let lhs = e.omega_q(w, t, q, m)?;
    Ok(vec![Check::new("T1(1)", lhs, e.norm(w, t)?, TOL_EXACT)])
}

/// `omega_{A,q}(alpha T) = omega_{A,alpha q}(T)` and the Crawford analogue, `|alpha| = 1`.
pub fn check_t1_23(
    e: &mut Evaluator,
    w: &Weight,
    t: &CMatrix,
    q: QParam,
    alpha: Complex64,
    m: usize,
) -> Result<Vec<Check>> {
    let at = t * alpha;
    let aq = QParam::new(alpha * q.value())?;
    let r = (e.omega_q(w, &at, q, m)? - e.omega_q(w, t, aq, m)?).abs();
    let c = (e.crawford_q(w, &at, q, m)? - e.crawford_q(w, t, aq, m)?).abs();
    Ok(vec![
        Check::new("T1(2)", r, 0.0, TOL_EQUAL),
        Check::new("T1(3)", c, 0.0, TOL_EQUAL),
    ])
}

/// Linear-combination bounds:
/// `gamma omega_{A,q'}(T) <= |lambda| omega_A(T) + |mu| omega_{A,q}(T*)` and
/// `gamma c_{A,q'}(T) <= |lambda| omega_A(T) + |mu| c_{A,q}(T*)`.
#[allow(clippy::too_many_arguments)]
pub fn check_t1_45(
    e: &mut Evaluator,
    w: &Weight,
    t: &CMatrix,
    q: QParam,
    params: LinComboParams,
    form: CompositeForm,
    adjoint: AdjointKind,
    m: usize,
) -> Result<Vec<Check>> {
    let qc = params.composite(q, form);
    if qc.norm() < MIN_DENOMINATOR || qc.norm() > 1.0 + 1e-12 {
        return Err(Error::SkippedDomain(qc.norm()));
    }
    let qc = QParam::new(qc)?;
    let ts = match adjoint {
        AdjointKind::Weighted => a_adjoint(w, t)?,
        AdjointKind::Ordinary => t.adjoint(),
    };
    let suffix = match (form, adjoint) {
        (CompositeForm::Statement, AdjointKind::Weighted) => "",
        (CompositeForm::Proof, AdjointKind::Weighted) => "-proof",
        (CompositeForm::Statement, AdjointKind::Ordinary) => "-ordinary",
        (CompositeForm::Proof, AdjointKind::Ordinary) => "-proof-ordinary",
    };
    let (l, mu, g) = (params.lambda.norm(), params.mu.norm(), params.gamma);
    let wa = e.omega_a(w, t)?;
    let lhs4 = g * e.omega_q(w, t, qc, m)?;
    let rhs4 = l * wa + mu * e.omega_q(w, &ts, q, m)?;
    let lhs5 = g * e.crawford_q(w, t, qc, m)?;
    let rhs5 = l * wa + mu * e.crawford_q(w, &ts, q, m)?;
    Ok(vec![
        Check::new(format!("T1(4){suffix}"), lhs4, rhs4, TOL_LOOSE),
        Check::new(format!("T1(5){suffix}"), lhs5, rhs5, TOL_LOOSE),
    ])
}

/// `| ||x +- y||_A - sqrt(2) sqrt(1 +- Re q) | <= 1e-8` over sampled pairs.
pub fn check_t1_6(w: &Weight, q: QParam, seed: u64) -> Result<Vec<Check>> {
    let pairs = sample_pairs(w, q, NORM_IDENTITY_PAIRS, seed)?;
    let mut worst: f64 = 0.0;
    for p in &pairs {
        for sign in [1.0, -1.0] {
            let s = &p.x + &p.y * Complex64::new(sign, 0.0);
            let expect = 2f64.sqrt() * (1.0 + sign * q.value().re).max(0.0).sqrt();
            worst = worst.max((a_norm_vec(w, &s)? - expect).abs());
        }
    }
    Ok(vec![Check::new("T1(6)", worst, NORM_IDENTITY_TOL, 0.0)])
}

/// Splitting bounds for `omega_A` and `c_A` with `s = sqrt(2(1 - Re q))` and `q'' = (1 - q)/s`.
pub fn check_t1_78(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let s = s_factor(q);
    if (Complex64::new(1.0, 0.0) - q.value()).norm() < 1e-12 || s == 0.0 {
        return Err(Error::QIsOne);
    }
    let qpp = QParam::new((Complex64::new(1.0, 0.0) - q.value()) / s)?;
    let tail = s * e.omega_q(w, t, qpp, m)?;
    let r7 = e.omega_q(w, t, q, m)? + tail;
    let r8 = e.crawford_q(w, t, q, m)? + tail;
    Ok(vec![
        Check::new("T1(7)", e.omega_a(w, t)?, r7, TOL_LOOSE),
        Check::new("T1(8)", e.crawford_a(w, t)?, r8, TOL_LOOSE),
    ])
}

/// `(1 - sqrt(2(1 - Re q))) omega_A(T) <= omega_{A,q}(T)`.
pub fn check_note(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let lhs = (1.0 - s_factor(q)) * e.omega_a(w, t)?;
    Ok(vec![Check::new("Note", lhs, e.omega_q(w, t, q, m)?, TOL_LOOSE)])
}

/// `2|Re q| omega_A <= omega_{A,q} + omega_{A,conj q} <= 2 omega_A + 2 sqrt(2) sqrt(1 - Re q) ||T||_A`.
pub fn check_t2(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let wa = e.omega_a(w, t)?;
    let mid = e.omega_q(w, t, q, m)? + e.omega_q(w, t, q.conj(), m)?;
    let upper = 2.0 * wa + 2.0 * 2f64.sqrt() * (1.0 - q.value().re).max(0.0).sqrt() * e.norm(w, t)?;
    Ok(vec![
        Check::new("T2.lower", 2.0 * q.value().re.abs() * wa, mid, TOL_LOOSE),
        Check::new("T2.upper", mid, upper, TOL_EXACT),
    ])
}

/// One factor of a tensor product or direct sum.
#[derive(Debug, Clone)]
pub struct Factor {
    pub w: Weight,
    pub t: CMatrix,
    pub q: QParam,
}

struct ProductValues {
    c: f64,
    w: f64,
    c1: f64,
    w1: f64,
    c2: f64,
    w2: f64,
}

fn product_values(e: &mut Evaluator, f1: &Factor, f2: &Factor, m: usize) -> Result<ProductValues> {
    let w = Weight::new(kron(f1.w.matrix(), f2.w.matrix()))?;
    let t = kron(&f1.t, &f2.t);
    let q = QParam::new(f1.q.value() * f2.q.value())?;
    Ok(ProductValues {
        c: e.crawford_q(&w, &t, q, m)?,
        w: e.omega_q(&w, &t, q, m)?,
        c1: e.crawford_q(&f1.w, &f1.t, f1.q, m)?,
        w1: e.omega_q(&f1.w, &f1.t, f1.q, m)?,
        c2: e.crawford_q(&f2.w, &f2.t, f2.q, m)?,
        w2: e.omega_q(&f2.w, &f2.t, f2.q, m)?,
    })
}

/// `c_{A,q}(T) <= c_1 c_2 <= omega_1 omega_2 <= omega_{A,q}(T)` for `T = T_1 (x) T_2`, `q = q_1 q_2`.
pub fn check_t3(e: &mut Evaluator, f1: &Factor, f2: &Factor, m: usize) -> Result<Vec<Check>> {
    let v = product_values(e, f1, f2, m)?;
    Ok(vec![
        Check::new("T3.c", v.c, v.c1 * v.c2, TOL_LOOSE),
        Check::new("T3.middle", v.c1 * v.c2, v.w1 * v.w2, TOL_LOOSE),
        Check::new("T3.omega", v.w1 * v.w2, v.w, TOL_LOOSE),
    ])
}

/// The scalar consequences of the tensor inclusions.
///
/// (a) `omega_2 <= omega / c_1` and (b) `omega_1 <= omega / c_2` as printed.
/// For (c) and (d) the printed `c_2 <= c / omega_1` fails already for
/// `T_1 = diag(1, 2)`, `T_2 = I`, `q = 1`; what the inclusions give is the
/// reverse, `c / omega_1 <= c_2` and `c / omega_2 <= c_1`, checked here.
pub fn check_cor1(e: &mut Evaluator, f1: &Factor, f2: &Factor, m: usize) -> Result<Vec<Check>> {
    let v = product_values(e, f1, f2, m)?;
    let mut out = Vec::new();
    let mut skipped = None;
    for (id, den, lhs, rhs_num, reversed) in [
        ("Cor1.a", v.c1, v.w2, v.w, false),
        ("Cor1.b", v.c2, v.w1, v.w, false),
        ("Cor1.c", v.w1, v.c2, v.c, true),
        ("Cor1.d", v.w2, v.c1, v.c, true),
    ] {
        if den <= MIN_DENOMINATOR {
            skipped = Some(den);
            continue;
        }
        if reversed {
            out.push(Check::new(id, rhs_num / den, lhs, TOL_LOOSE));
        } else {
            out.push(Check::new(id, lhs, rhs_num / den, TOL_LOOSE));
        }
    }
    match (out.is_empty(), skipped) {
        (true, Some(d)) => Err(Error::NearZeroDenominator(d)),
        _ => Ok(out),
    }
}

/// `|omega_{A,q}(T) - omega_A(T)| <= sqrt(2(1 - Re q)) ||T||_A`.
pub fn check_t4_1(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let lhs = (e.omega_q(w, t, q, m)? - e.omega_a(w, t)?).abs();
    Ok(vec![Check::new("T4(1)", lhs, s_factor(q) * e.norm(w, t)?, TOL_LOOSE)])
}

/// `|c_{A,q}(T) - c_A(T)| <= sqrt(2(1 - Re q)) ||T||_A`.
pub fn check_t5_1(e: &mut Evaluator, w: &Weight, t: &CMatrix, q: QParam, m: usize) -> Result<Vec<Check>> {
    let lhs = (e.crawford_q(w, t, q, m)? - e.crawford_a(w, t)?).abs();
    Ok(vec![Check::new("T5(1)", lhs, s_factor(q) * e.norm(w, t)?, TOL_LOOSE)])
}

/// `|c_{A,q}(T) - c_{A,q}(S)| <= omega_{A,q}(T - S)`.
pub fn check_t5_3(
    e: &mut Evaluator,
    w: &Weight,
    t: &CMatrix,
    s: &CMatrix,
    q: QParam,
    m: usize,
) -> Result<Vec<Check>> {
    let lhs = (e.crawford_q(w, t, q, m)? - e.crawford_q(w, s, q, m)?).abs();
    let rhs = e.omega_q(w, &(t - s), q, m)?;
    Ok(vec![Check::new("T5(3)", lhs, rhs, TOL_LOOSE)])
}

/// Gap bounds for `T = S (+) M` over `A = A_1 (+) A_2`:
/// `g_omega(T) <= max(g_omega(S), g_omega(M))` and `g_c(T) >= max(g_c(S), g_c(M))`.
pub fn check_app1(e: &mut Evaluator, s: &Factor, mm: &Factor, q: QParam, m: usize) -> Result<Vec<Check>> {
    let w = Weight::new(direct_sum(s.w.matrix(), mm.w.matrix()))?;
    let t = direct_sum(&s.t, &mm.t);
    let norm = e.norm(&w, &t)?;
    let (ns, nm) = (e.norm(&s.w, &s.t)?, e.norm(&mm.w, &mm.t)?);
    let gw = norm - e.omega_q(&w, &t, q, m)?;
    let gw_s = ns - e.omega_q(&s.w, &s.t, q, m)?;
    let gw_m = nm - e.omega_q(&mm.w, &mm.t, q, m)?;
    let gc = norm - e.crawford_q(&w, &t, q, m)?;
    let gc_s = ns - e.crawford_q(&s.w, &s.t, q, m)?;
    let gc_m = nm - e.crawford_q(&mm.w, &mm.t, q, m)?;
    Ok(vec![
        Check::new("App1.omega", gw, gw_s.max(gw_m), TOL_LOOSE),
        Check::new("App1.c", gc_s.max(gc_m), gc, TOL_LOOSE),
    ])
}

// Single-instance entry points.

pub fn law_t1_1(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t1_1(e, w, t, q, m))
}

pub fn law_t1_23(w: &Weight, t: &CMatrix, q: QParam, alpha: Complex64, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t1_23(e, w, t, q, alpha, m))
}

pub fn law_t1_45(
    w: &Weight,
    t: &CMatrix,
    q: QParam,
    params: LinComboParams,
    form: CompositeForm,
    budget: &Budget,
) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| {
        check_t1_45(e, w, t, q, params, form, AdjointKind::Weighted, m)
    })
}

pub fn law_t1_78(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t1_78(e, w, t, q, m))
}

pub fn law_note(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_note(e, w, t, q, m))
}

pub fn law_t2(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t2(e, w, t, q, m))
}

pub fn law_t3(f1: &Factor, f2: &Factor, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t3(e, f1, f2, m))
}

pub fn law_cor1(f1: &Factor, f2: &Factor, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_cor1(e, f1, f2, m))
}

pub fn law_t4_1(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t4_1(e, w, t, q, m))
}

pub fn law_t5_1(w: &Weight, t: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t5_1(e, w, t, q, m))
}

pub fn law_t5_3(w: &Weight, t: &CMatrix, s: &CMatrix, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_t5_3(e, w, t, s, q, m))
}

pub fn law_app1(s: &Factor, mm: &Factor, q: QParam, budget: &Budget) -> Result<Vec<LawReport>> {
    evaluate_law(&mut Evaluator::new(*budget), "single", |e, m| check_app1(e, s, mm, q, m))
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub n_instances: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub budget: Budget,
    /// Also check the linear-combination bounds with the parameter `(lambda + conj(mu) q) / gamma`.
    pub check_proof_form: bool,
    /// Also check the linear-combination bounds with the ordinary adjoint `T^H` in place of the A-adjoint.
    pub check_ordinary_adjoint: bool,
    /// Rechecks disabled: failures are reported at the base budget.
    pub no_recheck: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_instances: 200,
            dims: vec![2, 3, 4],
            seed: 0,
            budget: Budget::default(),
            check_proof_form: false,
            check_ordinary_adjoint: false,
            no_recheck: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Skip {
    pub law_id: String,
    pub instance_digest: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct SuiteResult {
    pub reports: Vec<LawReport>,
    pub skips: Vec<Skip>,
}

impl SuiteResult {
    pub fn failures(&self) -> impl Iterator<Item = &LawReport> {
        self.reports.iter().filter(|r| !r.pass)
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&serde_json::to_string(r).expect("reports serialize"));
            s.push('\n');
        }
        s
    }

    /// `law_id,count,pass_rate,min_slack,skipped`, one row per law in id order.
    pub fn summary_csv(&self) -> String {
        let mut rows: std::collections::BTreeMap<&str, (usize, usize, f64, usize)> = Default::default();
        for r in &self.reports {
            let e = rows.entry(&r.law_id).or_insert((0, 0, f64::INFINITY, 0));
            e.0 += 1;
            e.1 += r.pass as usize;
            e.2 = e.2.min(r.slack);
        }
        for s in &self.skips {
            rows.entry(&s.law_id).or_insert((0, 0, f64::INFINITY, 0)).3 += 1;
        }
        let mut out = String::from("law_id,count,pass_rate,min_slack,skipped\n");
        for (id, (n, pass, min_slack, skipped)) in rows {
            let rate = if n == 0 { 1.0 } else { pass as f64 / n as f64 };
            let slack = if min_slack.is_finite() { format!("{min_slack:.12e}") } else { String::new() };
            out.push_str(&format!("{id},{n},{rate:.6},{slack},{skipped}\n"));
        }
        out
    }
}

/// A random instance of the suite.
#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub digest: String,
    pub main: Factor,
    /// 2x2 partner for the tensor and direct-sum laws.
    pub partner: Factor,
    pub alpha: Complex64,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub s: CMatrix,
}

/// Gaussian matrix, shifted by a random multiple of `I` in half the draws so
/// that Crawford numbers are not all zero.
fn random_operator<R: Rng>(r: &mut R, d: usize) -> CMatrix {
    let g = gaussian_matrix(r, d);
    if r.random::<f64>() < 0.5 {
        let shift = complex_normal(r) * (2.0 * (d as f64).sqrt());
        g + CMatrix::identity(d, d) * shift
    } else {
        g
    }
}

pub fn suite_instance(seed: u64, index: usize, dims: &[usize]) -> SuiteInstance {
    let mut r = rng(seed, index as u64);
    let d = dims[r.random_range(0..dims.len())];
    let w = random_weight(&mut r, d);
    let t = random_operator(&mut r, d);
    let q = random_q(&mut r, 0.1);
    let pw = random_weight(&mut r, 2);
    let pt = random_operator(&mut r, 2);
    let pq = random_q(&mut r, 0.1);
    let alpha = unit_phase(&mut r);
    let lambda = complex_normal(&mut r);
    let mu = complex_normal(&mut r);
    let s = &t + gaussian_matrix(&mut r, d) * Complex64::new(0.5, 0.0);
    SuiteInstance {
        digest: format!("seed={seed}/i={index:05}/d={d}"),
        main: Factor { w, t, q },
        partner: Factor { w: pw, t: pt, q: pq },
        alpha,
        lambda,
        mu,
        s,
    }
}

type LawFn<'a> = Box<dyn Fn(&mut Evaluator, usize) -> Result<Vec<Check>> + 'a>;

/// Runs every law on one instance, appending reports and skips.
pub fn run_instance(inst: &SuiteInstance, config: &SuiteConfig, out: &mut SuiteResult) {
    let budget = config.budget.with_seed(config.budget.seed);
    let mut eval = Evaluator::new(budget);
    let (w, t, q) = (&inst.main.w, &inst.main.t, inst.main.q);
    let mut laws: Vec<(&str, LawFn)> = vec![
        ("T1(1)", Box::new(move |e, m| check_t1_1(e, w, t, q, m))),
        ("T1(2)", Box::new(move |e, m| check_t1_23(e, w, t, q, inst.alpha, m))),
        ("T1(6)", Box::new(move |_, _| check_t1_6(w, q, budget.seed))),
        ("T1(7)", Box::new(move |e, m| check_t1_78(e, w, t, q, m))),
        ("Note", Box::new(move |e, m| check_note(e, w, t, q, m))),
        ("T2", Box::new(move |e, m| check_t2(e, w, t, q, m))),
        ("T3", Box::new(move |e, m| check_t3(e, &inst.main, &inst.partner, m))),
        ("Cor1", Box::new(move |e, m| check_cor1(e, &inst.main, &inst.partner, m))),
        ("T4(1)", Box::new(move |e, m| check_t4_1(e, w, t, q, m))),
        ("T5(1)", Box::new(move |e, m| check_t5_1(e, w, t, q, m))),
        ("T5(3)", Box::new(move |e, m| check_t5_3(e, w, t, &inst.s, q, m))),
        ("App1", Box::new(move |e, m| check_app1(e, &inst.main, &inst.partner, q, m))),
    ];
    let mut variants = vec![(CompositeForm::Statement, AdjointKind::Weighted)];
    if config.check_proof_form {
        variants.push((CompositeForm::Proof, AdjointKind::Weighted));
    }
    if config.check_ordinary_adjoint {
        variants.push((CompositeForm::Statement, AdjointKind::Ordinary));
    }
    for (form, adjoint) in variants {
        laws.push((
            "T1(4)",
            Box::new(move |e, m| {
                let params = LinComboParams::new(inst.lambda, inst.mu, q)?;
                check_t1_45(e, w, t, q, params, form, adjoint, m)
            }),
        ));
    }
    for (id, law) in laws {
        let result = if config.no_recheck {
            law(&mut eval, 1).map(|checks| {
                checks
                    .into_iter()
                    .map(|c| LawReport {
                        pass: c.passes(),
                        slack: c.rhs - c.lhs,
                        law_id: c.id,
                        lhs: c.lhs,
                        rhs: c.rhs,
                        tol_law: c.tol,
                        instance_digest: inst.digest.clone(),
                        estimator_budget: budget,
                    })
                    .collect()
            })
        } else {
            evaluate_law(&mut eval, &inst.digest, law)
        };
        match result {
            Ok(reports) => out.reports.extend(reports),
            Err(e) if e.is_skip() => out.skips.push(Skip {
                law_id: id.to_string(),
                instance_digest: inst.digest.clone(),
                reason: e.to_string(),
            }),
            // Anything else is a broken instance, which the suite reports as a failure.
            Err(e) => out.reports.push(LawReport {
                law_id: id.to_string(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                slack: f64::NAN,
                pass: false,
                tol_law: 0.0,
                instance_digest: format!("{} ({e})", inst.digest),
                estimator_budget: budget,
            }),
        }
    }
}

/// Runs the randomized law suite; deterministic for a fixed configuration.
pub fn run_suite(config: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::default();
    if config.dims.is_empty() {
        return out;
    }
    for i in 0..config.n_instances {
        let inst = suite_instance(config.seed, i, &config.dims);
        run_instance(&inst, config, &mut out);
    }
    out.reports
        .sort_by(|a, b| (&a.instance_digest, &a.law_id).cmp(&(&b.instance_digest, &b.law_id)));
    out
}
