//! Convergence traces for operator sequences `T_n -> T` and parameter sequences `q_n -> 1`.
//!
//! Each trace records `|value_n - target|` next to the Lipschitz envelope that
//! bounds it and fails with [`Error::EnvelopeViolated`] if any index breaks it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig12;
use crate::radius::{a_crawford_with, a_radius_with, aq_crawford, aq_radius, gaps, Budget};
use crate::semispace::{a_opnorm, direct_sum, CMatrix, QParam, Weight};

/// Allowance for one sampled estimate. Envelopes comparing two estimates add it twice.
pub const ESTIMATOR_SLACK: f64 = 2.5e-3;

/// How `T_n` is produced.
#[derive(Debug, Clone)]
pub enum SequenceRule {
    /// `T + E / n`.
    Perturbation { base: CMatrix, direction: CMatrix },
    /// `diag(phi(x_i, n))` on grid points `x_i`.
    Multiplication { grid: Vec<f64>, phi: fn(f64, usize) -> f64 },
    /// `T_n` listed explicitly for `n = 1, 2, ...`; the last term repeats.
    Explicit(Vec<CMatrix>),
    /// Block-diagonal `S_n (+) M_n`.
    DirectSum(Box<OperatorSequence>, Box<OperatorSequence>),
}

#[derive(Debug, Clone)]
pub struct OperatorSequence {
    pub rule: SequenceRule,
    pub limit: CMatrix,
    pub weight: Weight,
}

/// `1 + x`, the weight density of the multiplication example.
pub fn psi_default(x: f64) -> f64 {
    1.0 + x
}

/// `1 + x / n`, converging uniformly to `1`.
pub fn phi_default(x: f64, n: usize) -> f64 {
    1.0 + x / n as f64
}

/// `points` equally spaced points of `[0, 1]`, endpoints included.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

impl OperatorSequence {
    pub fn perturbation(weight: Weight, base: CMatrix, direction: CMatrix) -> Result<Self> {
        let n = weight.dim();
        for m in [&base, &direction] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
            }
        }
        Ok(Self {
            limit: base.clone(),
            rule: SequenceRule::Perturbation { base, direction },
            weight,
        })
    }

    /// `(1 + 1/n) T`.
    pub fn scaling(weight: Weight, t: CMatrix) -> Result<Self> {
        Self::perturbation(weight, t.clone(), t)
    }

    pub fn constant(weight: Weight, t: CMatrix) -> Result<Self> {
        let zero = CMatrix::zeros(t.nrows(), t.ncols());
        Self::perturbation(weight, t, zero)
    }

    /// Multiplication operators on a grid with weight `diag(psi(x_i))` and limit `diag(limit(x_i))`.
    pub fn multiplication(
        grid: Vec<f64>,
        psi: fn(f64) -> f64,
        phi: fn(f64, usize) -> f64,
        limit: fn(f64) -> f64,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Empty);
        }
        let psi_vals: Vec<f64> = grid.iter().map(|&x| psi(x)).collect();
        let limit_vals: Vec<f64> = grid.iter().map(|&x| limit(x)).collect();
        Ok(Self {
            weight: Weight::diagonal(&psi_vals)?,
            limit: real_diag(&limit_vals),
            rule: SequenceRule::Multiplication { grid, phi },
        })
    }

    /// `psi(x) = 1 + x`, `phi_n(x) = 1 + x/n`, limit the identity.
    pub fn multiplication_default(points: usize) -> Result<Self> {
        Self::multiplication(unit_grid(points), psi_default, phi_default, |_| 1.0)
    }

    pub fn explicit(weight: Weight, terms: Vec<CMatrix>, limit: CMatrix) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Empty);
        }
        let n = weight.dim();
        for m in terms.iter().chain(std::iter::once(&limit)) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
            }
        }
        Ok(Self {
            rule: SequenceRule::Explicit(terms),
            limit,
            weight,
        })
    }

    pub fn direct_sum(s: OperatorSequence, m: OperatorSequence) -> Result<Self> {
        let weight = Weight::new(direct_sum(s.weight.matrix(), m.weight.matrix()))?;
        Ok(Self {
            limit: direct_sum(&s.limit, &m.limit),
            rule: SequenceRule::DirectSum(Box::new(s), Box::new(m)),
            weight,
        })
    }

    /// `T_n` for `n >= 1`.
    pub fn term(&self, n: usize) -> Result<CMatrix> {
        if n == 0 {
            return Err(Error::NotConvergent("indices start at 1".into()));
        }
        Ok(match &self.rule {
            SequenceRule::Perturbation { base, direction } => base + direction.scale(1.0 / n as f64),
            SequenceRule::Multiplication { grid, phi } => {
                real_diag(&grid.iter().map(|&x| phi(x, n)).collect::<Vec<_>>())
            }
            SequenceRule::Explicit(terms) => terms[(n - 1).min(terms.len() - 1)].clone(),
            SequenceRule::DirectSum(s, m) => direct_sum(&s.term(n)?, &m.term(n)?),
        })
    }

    /// `||T_n - T||_A`.
    pub fn distance(&self, n: usize) -> Result<f64> {
        a_opnorm(&self.weight, &(self.term(n)? - &self.limit))
    }

    /// Checks that the distances to the limit are finite and the last one is within `tol`.
    pub fn check_convergence(&self, indices: &[usize], tol: f64) -> Result<()> {
        let d: Vec<f64> = indices.iter().map(|&n| self.distance(n)).collect::<Result<_>>()?;
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotConvergent("non-finite distance".into()));
        }
        match d.last() {
            Some(&last) if last > tol => Err(Error::NotConvergent(format!(
                "final distance {last:e} exceeds {tol:e}"
            ))),
            _ => Ok(()),
        }
    }
}

fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConvergenceTrace {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub target: f64,
    /// `|value_n - target|`.
    pub rates: Vec<f64>,
    /// Upper bound for each rate.
    pub envelopes: Vec<f64>,
}

impl ConvergenceTrace {
    fn new(indices: Vec<usize>, values: Vec<f64>, target: f64, envelopes: Vec<f64>) -> Self {
        let rates = values.iter().map(|v| (v - target).abs()).collect();
        Self {
            indices,
            values,
            target,
            rates,
            envelopes,
        }
    }

    /// Largest `rate - envelope` over the trace (negative when all hold).
    pub fn max_excess(&self) -> f64 {
        self.rates
            .iter()
            .zip(&self.envelopes)
            .map(|(r, e)| r - e)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_rate(&self) -> Option<f64> {
        self.rates.last().copied()
    }

    pub fn final_value(&self) -> Option<f64> {
        self.values.last().copied()
    }

    fn checked(self, law: &'static str) -> Result<Self> {
        for (k, (r, e)) in self.rates.iter().zip(&self.envelopes).enumerate() {
            if !r.is_finite() || r > e {
                return Err(Error::EnvelopeViolated {
                    law,
                    index: self.indices[k],
                    excess: r - e,
                });
            }
        }
        Ok(self)
    }

    /// Columns `n,value,target,rate,envelope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,target,rate,envelope\n");
        for k in 0..self.indices.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.indices[k],
                sig12(self.values[k]),
                sig12(self.target),
                sig12(self.rates[k]),
                sig12(self.envelopes[k]),
            ));
        }
        out
    }
}

/// `1, 2, 4, ..., 256`.
pub fn default_schedule() -> Vec<usize> {
    geometric_schedule(256)
}

/// Powers of two up to `max`.
pub fn geometric_schedule(max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&n| n.checked_mul(2))
        .take_while(|&n| n <= max.max(1))
        .collect()
}

/// `omega_{A,q}(T_n)` against `omega_{A,q}(T)`, envelope `||T_n - T||_A + 2 slack`.
pub fn trace_radius(seq: &OperatorSequence, q: QParam, indices: &[usize], budget: &Budget) -> Result<ConvergenceTrace> {
    trace_operator(seq, indices, "radius", |t| Ok(aq_radius(&seq.weight, t, q, budget)?.value))
}

/// `c_{A,q}(T_n)` against `c_{A,q}(T)`, envelope `||T_n - T||_A + 2 slack`.
pub fn trace_crawford(
    seq: &OperatorSequence,
    q: QParam,
    indices: &[usize],
    budget: &Budget,
) -> Result<ConvergenceTrace> {
    trace_operator(seq, indices, "crawford", |t| Ok(aq_crawford(&seq.weight, t, q, budget)?.value))
}

fn trace_operator<F>(seq: &OperatorSequence, indices: &[usize], law: &'static str, f: F) -> Result<ConvergenceTrace>
where
    F: Fn(&CMatrix) -> Result<f64>,
{
    let target = f(&seq.limit)?;
    let mut values = Vec::with_capacity(indices.len());
    let mut envelopes = Vec::with_capacity(indices.len());
    for &n in indices {
        values.push(f(&seq.term(n)?)?);
        envelopes.push(seq.distance(n)? + 2.0 * ESTIMATOR_SLACK);
    }
    ConvergenceTrace::new(indices.to_vec(), values, target, envelopes).checked(law)
}

/// `omega_{A,q_n}(T)` against `omega_A(T)`, envelope `sqrt(2(1 - Re q_n)) ||T||_A + slack`.
/// Indices are `1..=q_list.len()`.
pub fn trace_q(w: &Weight, t: &CMatrix, q_list: &[QParam], budget: &Budget) -> Result<ConvergenceTrace> {
    let target = a_radius_with(w, t, budget)?.value;
    trace_parameter(w, t, q_list, target, "q-radius", |q| Ok(aq_radius(w, t, q, budget)?.value))
}

/// `c_{A,q_n}(T)` against `c_A(T)`, same envelope as [`trace_q`].
pub fn trace_q_crawford(w: &Weight, t: &CMatrix, q_list: &[QParam], budget: &Budget) -> Result<ConvergenceTrace> {
    let target = a_crawford_with(w, t, budget)?.value;
    trace_parameter(w, t, q_list, target, "q-crawford", |q| Ok(aq_crawford(w, t, q, budget)?.value))
}

fn trace_parameter<F>(
    w: &Weight,
    t: &CMatrix,
    q_list: &[QParam],
    target: f64,
    law: &'static str,
    f: F,
) -> Result<ConvergenceTrace>
where
    F: Fn(QParam) -> Result<f64>,
{
    let norm = a_opnorm(w, t)?;
    let values = q_list.iter().map(|&q| f(q)).collect::<Result<Vec<_>>>()?;
    let envelopes = q_list
        .iter()
        .map(|q| (2.0 * (1.0 - q.value().re)).max(0.0).sqrt() * norm + ESTIMATOR_SLACK)
        .collect();
    ConvergenceTrace::new((1..=q_list.len()).collect(), values, target, envelopes).checked(law)
}

/// Gap traces `(g_omega, g_c)`, envelope `2 ||T_n - T||_A + 2 slack`.
pub fn trace_gaps(
    seq: &OperatorSequence,
    q: QParam,
    indices: &[usize],
    budget: &Budget,
) -> Result<(ConvergenceTrace, ConvergenceTrace)> {
    let (tw, tc) = gaps(&seq.weight, &seq.limit, q, budget)?;
    let mut vw = Vec::with_capacity(indices.len());
    let mut vc = Vec::with_capacity(indices.len());
    let mut env = Vec::with_capacity(indices.len());
    for &n in indices {
        let (gw, gc) = gaps(&seq.weight, &seq.term(n)?, q, budget)?;
        vw.push(gw.gap);
        vc.push(gc.gap);
        env.push(2.0 * seq.distance(n)? + 2.0 * ESTIMATOR_SLACK);
    }
    let ow = ConvergenceTrace::new(indices.to_vec(), vw, tw.gap, env.clone()).checked("gap-radius")?;
    let oc = ConvergenceTrace::new(indices.to_vec(), vc, tc.gap, env).checked("gap-crawford")?;
    Ok((ow, oc))
}
