//! Dense complex matrices over a weighted semi-inner product.
//!
//! A positive semidefinite weight `A` induces `<x, y>_A = <Ax, y> = y^H A x`,
//! linear in the first slot and conjugate-linear in the second. Every
//! A-quantity of an operator `T` is computed by passing to the reduced matrix
//! `B = L^{1/2} V^H T V L^{-1/2}`, where `A = V L V^H` is the compact spectral
//! factorization on `range(A)`: with `u = L^{1/2} V^H x` we have
//! `<Tx, y>_A = v^H B u` and `||x||_A = ||u||`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative eigenvalue threshold below which a weight direction counts as null.
pub const DEFAULT_PSD_RTOL: f64 = 1e-10;

/// Relative leakage of `A^{1/2} T` on `null(A)` tolerated by the A-boundedness test.
pub const BOUNDED_RTOL: f64 = 1e-8;

const HERMITIAN_RTOL: f64 = 1e-8;
const SELF_INNER_TOL: f64 = 1e-10;

/// Checks the operator invariants: non-empty, square, finite entries.
pub fn check_operator(t: &CMatrix) -> Result<()> {
    if t.nrows() == 0 || t.ncols() == 0 {
        return Err(Error::Empty);
    }
    if t.nrows() != t.ncols() {
        return Err(Error::NotSquare {
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    for j in 0..t.ncols() {
        for i in 0..t.nrows() {
            let z = t[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Builds a square matrix from row-major rows of complex entries.
pub fn cmat(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Builds a matrix with real entries from row-major rows.
pub fn rmat(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn cdiag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// The complex scalar `q` of a pair constraint `<x, y>_A = q`, with `0 < |q| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct QParam(Complex64);

impl QParam {
    pub fn new(q: Complex64) -> Result<Self> {
        let m = q.norm();
        if !(m.is_finite() && m > 0.0 && m <= 1.0 + 1e-12) {
            return Err(Error::InvalidQ(m));
        }
        // Rounding may push |q| a hair above one; pull it back onto the unit circle.
        if m > 1.0 {
            return Ok(Self(q / m));
        }
        Ok(Self(q))
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    pub fn one() -> Self {
        Self(Complex64::new(1.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// `sqrt(1 - |q|^2)`, the weight of the A-orthogonal part of a partner vector.
    pub fn complement(&self) -> f64 {
        (1.0 - self.0.norm_sqr()).max(0.0).sqrt()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    pub fn is_unimodular(&self) -> bool {
        (self.0.norm() - 1.0).abs() <= 1e-15
    }
}

impl TryFrom<Complex64> for QParam {
    type Error = Error;
    fn try_from(q: Complex64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QParam> for Complex64 {
    fn from(q: QParam) -> Complex64 {
        q.0
    }
}

/// A nonzero Hermitian positive semidefinite weight with its spectral factorization.
#[derive(Debug, Clone)]
pub struct Weight {
    a: CMatrix,
    eigvals: Vec<f64>,
    eigvecs: CMatrix,
    rank: usize,
    psd_tol: f64,
    sqrt_a: CMatrix,
    pinv_sqrt_a: CMatrix,
}

impl Weight {
    /// Factors `a` with the default threshold `1e-10 * lambda_max`.
    pub fn new(a: CMatrix) -> Result<Self> {
        Self::with_tol(a, None)
    }

    pub fn with_tol(a: CMatrix, psd_tol: Option<f64>) -> Result<Self> {
        check_operator(&a)?;
        let n = a.nrows();
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::ZeroWeight);
        }
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] - a[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_RTOL * scale {
            return Err(Error::NotHermitian(asym));
        }
        let a = (&a + a.adjoint()).scale(0.5);

        let eig = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let lambda_max = eig.eigenvalues[order[0]];
        if lambda_max <= 0.0 {
            return Err(Error::ZeroWeight);
        }
        let psd_tol = psd_tol.unwrap_or(DEFAULT_PSD_RTOL * lambda_max);

        let mut eigvals = Vec::with_capacity(n);
        let mut eigvecs = CMatrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            let lam = eig.eigenvalues[i];
            if lam < -psd_tol {
                return Err(Error::NotPositive(lam));
            }
            eigvals.push(lam.max(0.0));
            eigvecs.set_column(k, &eig.eigenvectors.column(i));
        }
        let rank = eigvals.iter().filter(|&&l| l > psd_tol).count();

        let diag_sqrt: Vec<f64> = eigvals
            .iter()
            .enumerate()
            .map(|(k, &l)| if k < rank { l.sqrt() } else { 0.0 })
            .collect();
        let diag_pinv: Vec<f64> = diag_sqrt
            .iter()
            .map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 })
            .collect();
        let sqrt_a = &eigvecs * cdiag(&diag_sqrt) * eigvecs.adjoint();
        let pinv_sqrt_a = &eigvecs * cdiag(&diag_pinv) * eigvecs.adjoint();

        Ok(Self {
            a,
            eigvals,
            eigvecs,
            rank,
            psd_tol,
            sqrt_a,
            pinv_sqrt_a,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMatrix::identity(n, n)).expect("identity is a valid weight")
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(cdiag(values))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_definite(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    /// Eigenvalues in descending order, negatives within tolerance clamped to zero.
    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &CMatrix {
        &self.eigvecs
    }

    pub fn psd_tol(&self) -> f64 {
        self.psd_tol
    }

    pub fn sqrt_a(&self) -> &CMatrix {
        &self.sqrt_a
    }

    pub fn pinv_sqrt_a(&self) -> &CMatrix {
        &self.pinv_sqrt_a
    }

    /// Moore-Penrose pseudo-inverse of `A`.
    pub fn pinv(&self) -> CMatrix {
        &self.pinv_sqrt_a * &self.pinv_sqrt_a
    }

    fn range_basis(&self) -> CMatrix {
        self.eigvecs.columns(0, self.rank).into_owned()
    }

    fn range_scale(&self) -> Vec<f64> {
        self.eigvals[..self.rank].iter().map(|l| l.sqrt()).collect()
    }

    /// Reduced coordinates `L^{1/2} V^H x` of `x`; `||x||_A` equals their Euclidean norm.
    pub fn to_reduced(&self, x: &CVector) -> Result<CVector> {
        self.check_vec(x)?;
        let mut u = self.range_basis().adjoint() * x;
        for (k, s) in self.range_scale().into_iter().enumerate() {
            u[k] *= s;
        }
        Ok(u)
    }

    /// The vector in `range(A)` whose reduced coordinates are `u`.
    pub fn lift(&self, u: &CVector) -> CVector {
        assert_eq!(u.len(), self.rank, "reduced vector has wrong length");
        let mut scaled = u.clone();
        for (k, s) in self.range_scale().into_iter().enumerate() {
            scaled[k] /= s;
        }
        self.range_basis() * scaled
    }

    fn check_vec(&self, x: &CVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_op(&self, t: &CMatrix) -> Result<()> {
        check_operator(t)?;
        if t.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.nrows(),
            });
        }
        Ok(())
    }
}

/// `<x, y>_A = y^H A x`.
pub fn a_inner(w: &Weight, x: &CVector, y: &CVector) -> Result<Complex64> {
    w.check_vec(x)?;
    w.check_vec(y)?;
    Ok(y.dotc(&(w.matrix() * x)))
}

/// `||x||_A`; fails if `<x, x>_A` is not real, which signals a broken weight.
pub fn a_norm_vec(w: &Weight, x: &CVector) -> Result<f64> {
    let s = a_inner(w, x, x)?;
    let scale = s.re.abs().max(w.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max) * x.norm_squared());
    if s.im.abs() > SELF_INNER_TOL * scale.max(1.0) {
        return Err(Error::NonRealSelfInner(s.im));
    }
    Ok(s.re.max(0.0).sqrt())
}

/// An operator expressed in the reduced coordinates of a weight.
#[derive(Debug, Clone)]
pub struct Reduced {
    /// `rank x rank` matrix with `<Tx, y>_A = v^H b u` for reduced coordinates `u, v`.
    pub b: CMatrix,
}

impl Reduced {
    pub fn dim(&self) -> usize {
        self.b.nrows()
    }
}

/// Null-space leakage `||A^{1/2} T P_null||_F` relative to `||A^{1/2}||_F ||T||_F`.
fn bounded_leakage(w: &Weight, t: &CMatrix) -> f64 {
    if w.is_definite() {
        return 0.0;
    }
    let n = w.dim();
    let null = w.eigvecs.columns(w.rank, n - w.rank).into_owned();
    let leak = frobenius(&(w.sqrt_a() * t * &null));
    let scale = frobenius(w.sqrt_a()) * frobenius(t);
    if scale == 0.0 {
        0.0
    } else {
        leak / scale
    }
}

fn ensure_bounded(w: &Weight, t: &CMatrix) -> Result<()> {
    w.check_op(t)?;
    let leak = bounded_leakage(w, t);
    if leak > BOUNDED_RTOL {
        return Err(Error::NotABounded(leak));
    }
    Ok(())
}

/// Compresses `T` onto `range(A)` in reduced coordinates.
pub fn reduce_compressed(w: &Weight, t: &CMatrix) -> Result<Reduced> {
    ensure_bounded(w, t)?;
    let basis = w.range_basis();
    let scale = w.range_scale();
    let mut b = basis.adjoint() * t * &basis;
    for i in 0..w.rank {
        for j in 0..w.rank {
            b[(i, j)] *= scale[i] / scale[j];
        }
    }
    Ok(Reduced { b })
}

/// `A^{1/2} T (A^{1/2})^+`, the standard-inner-product image of `T`.
///
/// Rejects operators that move `null(A)` into `range(A)`, which are exactly
/// those that fail to be A-bounded.
pub fn reduce(w: &Weight, t: &CMatrix) -> Result<CMatrix> {
    ensure_bounded(w, t)?;
    Ok(w.sqrt_a() * t * w.pinv_sqrt_a())
}

/// `||T||_A`.
pub fn a_opnorm(w: &Weight, t: &CMatrix) -> Result<f64> {
    Ok(spectral_norm(&reduce_compressed(w, t)?.b))
}

/// The A-adjoint `A^+ T^H A`, the operator with `<Tx, y>_A = <x, T^# y>_A`
/// on `range(A)`. Coincides with `T^H` when `A = I`.
pub fn a_adjoint(w: &Weight, t: &CMatrix) -> Result<CMatrix> {
    ensure_bounded(w, t)?;
    Ok(w.pinv() * t.adjoint() * w.matrix())
}

/// Kronecker product; `(a (x) b)[(i p + k), (j p + l)] = a[i, j] b[k, l]` for `b` of size `p`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal `a (+) b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Matrix file format: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_tol: Option<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
            psd_tol: None,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let len = self.rows * self.cols;
        if self.re.len() != len {
            return Err(Error::Json(format!("expected {len} real parts, got {}", self.re.len())));
        }
        // A missing imaginary part means a real matrix.
        if !self.im.is_empty() && self.im.len() != len {
            return Err(Error::Json(format!("expected {len} imaginary parts, got {}", self.im.len())));
        }
        let m = CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            Complex64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0))
        });
        check_operator(&m)?;
        Ok(m)
    }

    pub fn to_weight(&self) -> Result<Weight> {
        Weight::with_tol(self.to_matrix()?, self.psd_tol)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(values: &[Complex64]) -> CVector {
        CVector::from_column_slice(values)
    }

    #[test]
    fn inner_on_identity_and_diagonal() {
        let w = Weight::identity(2);
        let e1 = cv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = cv(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(a_inner(&w, &e1, &e2).unwrap(), c(0.0, 0.0));

        let w = Weight::diagonal(&[2.0, 3.0]).unwrap();
        assert!((a_inner(&w, &e1, &e1).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn inner_matches_triple_loop() {
        let w = Weight::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let x = cv(&[c(0.3, -0.1), c(1.2, 0.7), c(-0.4, 0.2)]);
        let y = cv(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let a = w.matrix();
        let mut expect = c(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                expect += y[i].conj() * a[(i, j)] * x[j];
            }
        }
        // Only the e2 row survives: 2 * x_2.
        assert!((expect - c(2.4, 1.4)).norm() < 1e-14);
        assert!((a_inner(&w, &x, &y).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let w = Weight::identity(2);
        let x = cv(&[c(1.0, 0.0)]);
        let y = cv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            a_inner(&w, &x, &y),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn seminorm_examples() {
        let w = Weight::identity(2);
        let x = cv(&[c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((a_norm_vec(&w, &x).unwrap() - 5.0).abs() < 1e-14);

        let w = Weight::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(w.rank(), 1);
        let x = cv(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(a_norm_vec(&w, &x).unwrap(), 0.0);

        let w = Weight::diagonal(&[2.0, 3.0]).unwrap();
        let x = cv(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((a_norm_vec(&w, &x).unwrap() - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weight_rejects_bad_input() {
        assert_eq!(Weight::diagonal(&[0.0, 0.0]).unwrap_err(), Error::ZeroWeight);
        assert!(matches!(Weight::diagonal(&[1.0, -0.5]), Err(Error::NotPositive(_))));
        let skew = rmat(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(Weight::new(skew), Err(Error::NotHermitian(_))));
        let nan = rmat(&[&[f64::NAN, 0.0], &[0.0, 1.0]]);
        assert!(matches!(Weight::new(nan), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn weight_factorization_invariants() {
        let a = cmat(&[
            &[c(2.0, 0.0), c(0.5, 0.5), c(0.0, 0.0)],
            &[c(0.5, -0.5), c(3.0, 0.0), c(0.1, 0.0)],
            &[c(0.0, 0.0), c(0.1, 0.0), c(1.0, 0.0)],
        ]);
        let w = Weight::new(a.clone()).unwrap();
        let sq = w.sqrt_a() * w.sqrt_a();
        assert!(frobenius(&(sq - &a)) <= 1e-10 * frobenius(&a));
        assert!(w.eigvals().windows(2).all(|p| p[0] >= p[1]));
        assert_eq!(w.rank(), 3);
    }

    #[test]
    fn qparam_domain() {
        assert!(QParam::real(0.0).is_err());
        assert!(QParam::real(1.5).is_err());
        assert!(QParam::new(c(0.6, 0.8)).is_ok());
        assert!((QParam::real(0.6).unwrap().complement() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn reduce_identity_weight_is_noop() {
        let t = cmat(&[&[c(1.0, 2.0), c(0.0, -1.0)], &[c(3.0, 0.0), c(0.5, 0.5)]]);
        let r = reduce(&Weight::identity(2), &t).unwrap();
        assert!(frobenius(&(r - &t)) < 1e-14);
    }

    #[test]
    fn reduce_diagonal_weight_by_hand() {
        let w = Weight::diagonal(&[4.0, 1.0]).unwrap();
        let t = rmat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = reduce(&w, &t).unwrap();
        let expect = rmat(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(frobenius(&(r - expect)) < 1e-14);
    }

    #[test]
    fn reduce_rejects_null_to_range_operator() {
        // e2 spans null(A); T e2 = e1 lands in range(A), so ||T e2||_A > 0 = ||e2||_A.
        let w = Weight::diagonal(&[1.0, 0.0]).unwrap();
        let t = rmat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(reduce(&w, &t), Err(Error::NotABounded(_))));
        assert!(matches!(a_opnorm(&w, &t), Err(Error::NotABounded(_))));
        // Mapping range into null is fine: the image simply has zero seminorm.
        let t = rmat(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(a_opnorm(&w, &t).unwrap(), 0.0);
    }

    #[test]
    fn opnorm_examples() {
        let w = Weight::identity(2);
        let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
        assert!((a_opnorm(&w, &t).unwrap() - 1.0 / 70.0).abs() < 1e-15);
        let t = CMatrix::identity(2, 2).scale(1.0 / 20.0);
        assert!((a_opnorm(&w, &t).unwrap() - 1.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn kron_examples() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));
        assert_eq!(kron(&cdiag(&[1.0, 2.0]), &cdiag(&[3.0, 4.0])), cdiag(&[3.0, 4.0, 6.0, 8.0]));
        let n = rmat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let k = kron(&n, &n);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 3) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_index_formula() {
        let a = cmat(&[&[c(1.0, 1.0), c(2.0, 0.0)], &[c(0.0, -1.0), c(3.0, 0.5)]]);
        let b = cmat(&[
            &[c(0.5, 0.0), c(1.0, 2.0), c(0.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, -2.0)],
            &[c(-1.0, 0.0), c(0.3, 0.0), c(0.0, 0.7)],
        ]);
        let k = kron(&a, &b);
        let p = 3;
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..p {
                    for s in 0..p {
                        assert_eq!(k[(i * p + r, j * p + s)], a[(i, j)] * b[(r, s)]);
                    }
                }
            }
        }
    }

    #[test]
    fn direct_sum_blocks() {
        let s = direct_sum(&cdiag(&[1.0]), &rmat(&[&[0.0, 1.0], &[2.0, 0.0]]));
        assert_eq!(s, rmat(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 2.0, 0.0]]));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let m = cmat(&[&[c(1.0, 0.25), c(-2.0, 0.0)], &[c(0.0, 1e-300), c(3.5, -4.0)]]);
        let j = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back = MatrixJson::parse(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.to_matrix().unwrap(), m);

        let bad = MatrixJson::parse(r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[]}"#).unwrap();
        assert!(matches!(bad.to_matrix(), Err(Error::Json(_))));
        let rect = MatrixJson::parse(r#"{"rows":1,"cols":2,"re":[1,2],"im":[0,0]}"#).unwrap();
        assert!(matches!(rect.to_matrix(), Err(Error::NotSquare { .. })));
        let w = MatrixJson::parse(r#"{"rows":2,"cols":2,"re":[1,0,0,1e-12],"im":[],"psd_tol":1e-9}"#)
            .unwrap()
            .to_weight()
            .unwrap();
        assert_eq!(w.rank(), 1);
    }
}
