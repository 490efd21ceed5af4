//! Dense complex linear algebra substrate.
//!
//! Everything downstream works through [`ComplexMatrix`]: a row-major dense
//! complex matrix with a self-contained Hermitian eigensolver (cyclic Jacobi)
//! and a one-sided Jacobi SVD. Target dimensions are small (a few dozen), so
//! Jacobi's high relative accuracy wins over asymptotics.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical admission and comparison thresholds.
///
/// `tol_cluster` is a coefficient: eigenvalue clustering uses
/// `tol_cluster * max(1, ‖A‖_max)` so degenerate spectra of scaled operators
/// still group correctly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToleranceProfile {
    /// Hermiticity / positivity admission.
    pub tol_input: f64,
    /// Eigenvalue grouping coefficient.
    pub tol_cluster: f64,
    /// Zero tests on inner products and singular values.
    pub tol_zero: f64,
    /// Probability normalization.
    pub tol_prob: f64,
    /// Orthonormality checks.
    pub tol_ortho: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            tol_input: 1e-10,
            tol_cluster: 1e-8,
            tol_zero: 1e-9,
            tol_prob: 1e-9,
            tol_ortho: 1e-10,
        }
    }
}

impl ToleranceProfile {
    /// Clustering tolerance resolved against an operator scale.
    pub fn cluster_for(&self, norm: f64) -> f64 {
        self.tol_cluster * norm.max(1.0)
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        assert_eq!(data.len(), rows * cols, "data length must match dimensions");
        for (i, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i / cols, col: i % cols });
            }
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let rows = cols[0].len();
        let mut m = Self::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            m.set_column(c, col);
        }
        m
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            for k in 0..self.cols {
                acc += self[(i, k)] * v[k];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, z: C64) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a * z).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, x: f64) -> ComplexMatrix {
        self.scale(C64::new(x, 0.0))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a.conj()).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Entrywise max norm ‖·‖_max.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max deviation from its own adjoint.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// (M + M†)/2, stripping antisymmetric numerical noise.
    pub fn hermitized(&self) -> ComplexMatrix {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Kronecker product, index convention `(i1*d2 + i2, j1*d2 + j2)`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        ComplexMatrix::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Partial trace over one factor of a `d1*d2` square matrix.
    pub fn partial_trace(&self, d1: usize, d2: usize, over_first: bool) -> Result<ComplexMatrix> {
        if !self.is_square() || self.rows != d1 * d2 {
            return Err(Error::DimensionMismatch { left: self.rows, right: d1 * d2 });
        }
        if over_first {
            let mut out = ComplexMatrix::zeros(d2, d2);
            for i in 0..d2 {
                for j in 0..d2 {
                    let mut acc = ZERO;
                    for k in 0..d1 {
                        acc += self[(k * d2 + i, k * d2 + j)];
                    }
                    out[(i, j)] = acc;
                }
            }
            Ok(out)
        } else {
            let mut out = ComplexMatrix::zeros(d1, d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    let mut acc = ZERO;
                    for k in 0..d2 {
                        acc += self[(i * d2 + k, j * d2 + k)];
                    }
                    out[(i, j)] = acc;
                }
            }
            Ok(out)
        }
    }

    /// Reinterprets an operator on `A⊗B⊗C` as one on `A⊗C⊗B`.
    pub fn swap_last_two_legs(&self, da: usize, db: usize, dc: usize) -> ComplexMatrix {
        assert_eq!(self.rows, da * db * dc);
        assert!(self.is_square());
        let idx_abc = |i: usize, j: usize, k: usize| (i * db + j) * dc + k;
        let idx_acb = |i: usize, k: usize, j: usize| (i * dc + k) * db + j;
        let mut out = ComplexMatrix::zeros(self.rows, self.rows);
        for i in 0..da {
            for j in 0..db {
                for k in 0..dc {
                    for i2 in 0..da {
                        for j2 in 0..db {
                            for k2 in 0..dc {
                                out[(idx_acb(i, k, j), idx_acb(i2, k2, j2))] =
                                    self[(idx_abc(i, j, k), idx_abc(i2, j2, k2))];
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

// ---------------------------------------------------------------------------
// vectors

pub fn vec_inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_scale(a: &[C64], z: C64) -> Vec<C64> {
    a.iter().map(|x| x * z).collect()
}

pub fn vec_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_normalize(a: &[C64]) -> Vec<C64> {
    let n = vec_norm(a);
    assert!(n > 0.0, "cannot normalize a zero vector");
    vec_scale(a, C64::new(1.0 / n, 0.0))
}

pub fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// |v⟩⟨w|.
pub fn outer(v: &[C64], w: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
}

// ---------------------------------------------------------------------------
// eigendecomposition

/// Hermitian eigendecomposition; eigenvalues ascending, eigenvectors as the
/// columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// One real Jacobi rotation for the 2x2 Hermitian block [[a, g],[g*, b]].
/// Returns (c, s, phase) with phase = g/|g|.
fn jacobi_rotation(alpha: f64, beta: f64, gamma: C64) -> (f64, f64, C64) {
    let r = gamma.norm();
    let phase = gamma / C64::new(r, 0.0);
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Cyclic Jacobi for Hermitian matrices.
///
/// Phase convention: within each eigenvector the largest-magnitude entry is
/// made real and nonnegative, so repeated runs produce identical output.
pub fn eig_hermitian(m: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Eigendecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { left: m.rows, right: m.cols });
    }
    let dev = m.hermiticity_deviation();
    if dev > tol.tol_input {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = m.dim();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let stop = 0.5 * f64::EPSILON * scale;
    let max_sweeps = 64;

    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                if apq.norm() <= stop {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                // R = [[phase*c, phase*s], [-s, c]] acting on the (p,q) plane.
                let (cc, sc) = (C64::new(c, 0.0), C64::new(s, 0.0));
                let (rp_p, rp_q) = (phase * cc, phase * sc);
                let (rq_p, rq_q) = (-sc, cc);
                // A <- A R
                for k in 0..d {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * rp_p + akq * rq_p;
                    a[(k, q)] = akp * rp_q + akq * rq_q;
                }
                // A <- R† A
                for k in 0..d {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = rp_p.conj() * apk + rq_p.conj() * aqk;
                    a[(q, k)] = rp_q.conj() * apk + rq_q.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                // V <- V R
                for k in 0..d {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * rp_p + vkq * rq_p;
                    v[(k, q)] = vkp * rp_q + vkq * rq_q;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (new_c, &old_c) in order.iter().enumerate() {
        let mut col = v.column(old_c);
        // largest entry real and nonnegative
        let mut best = 0;
        for (i, z) in col.iter().enumerate() {
            if z.norm() > col[best].norm() {
                best = i;
            }
        }
        let pivot = col[best];
        if pivot.norm() > 0.0 {
            let ph = pivot.conj() / C64::new(pivot.norm(), 0.0);
            col = vec_scale(&col, ph);
        }
        vectors.set_column(new_c, &col);
    }
    Ok(Eigendecomposition { eigenvalues, eigenvectors: vectors })
}

// ---------------------------------------------------------------------------
// singular value decomposition

/// Thin SVD `m = left · diag(σ) · right†`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

/// One-sided Jacobi SVD. Small singular values keep full relative accuracy
/// here, which the kernel detection thresholds rely on.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows < m.cols {
        let s = svd(&m.adjoint())?;
        return Ok(Svd { singular_values: s.singular_values, left: s.right, right: s.left });
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    let max_sweeps = 64;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..rows {
                    let (wp, wq) = (w[(k, p)], w[(k, q)]);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                let (cc, sc) = (C64::new(c, 0.0), C64::new(s, 0.0));
                let (rp_p, rp_q) = (phase * cc, phase * sc);
                let (rq_p, rq_q) = (-sc, cc);
                for k in 0..rows {
                    let (wp, wq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = wp * rp_p + wq * rq_p;
                    w[(k, q)] = wp * rp_q + wq * rq_q;
                }
                for k in 0..cols {
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp * rp_p + vq * rq_p;
                    v[(k, q)] = vp * rp_q + vq * rq_q;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let mut sigma: Vec<f64> = (0..cols).map(|c| vec_norm(&w.column(c))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    sigma = order.iter().map(|&i| sigma[i]).collect();

    let sig_max = sigma.first().copied().unwrap_or(0.0);
    let floor = 1e3 * f64::EPSILON * sig_max.max(f64::MIN_POSITIVE);
    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(cols);
    let mut right = ComplexMatrix::zeros(cols, cols);
    for (new_c, &old_c) in order.iter().enumerate() {
        right.set_column(new_c, &v.column(old_c));
        if sigma[new_c] > floor {
            left_cols.push(vec_scale(&w.column(old_c), C64::new(1.0 / sigma[new_c], 0.0)));
        }
    }
    // null columns of the working matrix get a deterministic orthonormal fill
    let missing = cols - left_cols.len();
    for extra in complete_orthonormal_count(&left_cols, rows, missing) {
        left_cols.push(extra);
    }
    Ok(Svd { singular_values: sigma, left: ComplexMatrix::from_columns(&left_cols), right })
}

// ---------------------------------------------------------------------------
// orthonormalization

/// Modified Gram-Schmidt with reorthogonalization; vectors whose residual
/// drops below `drop_tol * scale` are dropped from the span.
pub fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let scale = vectors.iter().map(|v| vec_norm(v)).fold(0.0, f64::max).max(1.0);
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = vec_inner(b, &r);
                r = vec_sub(&r, &vec_scale(b, c));
            }
        }
        if vec_norm(&r) > drop_tol * scale {
            basis.push(vec_normalize(&r));
        }
    }
    basis
}

/// Deterministically extends an orthonormal list to a full basis by pulling
/// in the standard basis vector with the largest residual at each step.
pub fn complete_orthonormal_basis(existing: &[Vec<C64>], ambient: usize) -> Vec<Vec<C64>> {
    complete_orthonormal_count(existing, ambient, ambient - existing.len())
}

/// Like [`complete_orthonormal_basis`] but stops after `count` new vectors.
pub fn complete_orthonormal_count(
    existing: &[Vec<C64>],
    ambient: usize,
    count: usize,
) -> Vec<Vec<C64>> {
    let target = (existing.len() + count).min(ambient);
    let mut basis: Vec<Vec<C64>> = existing.to_vec();
    let mut added = Vec::new();
    while basis.len() < target {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..ambient {
            let mut r = basis_vector(ambient, i);
            for _ in 0..2 {
                for b in &basis {
                    let c = vec_inner(b, &r);
                    r = vec_sub(&r, &vec_scale(b, c));
                }
            }
            let n = vec_norm(&r);
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, r));
            }
        }
        let (n, r) = best.unwrap();
        assert!(n > 1e-8, "cannot complete basis: residual collapsed");
        let unit = vec_normalize(&r);
        basis.push(unit.clone());
        added.push(unit);
    }
    added
}

/// Unitary sending `domain[i] -> image[i]`, completed deterministically on
/// the orthogonal complement. Both lists must be orthonormal.
pub fn unitary_from_partial_isometry(
    domain: &[Vec<C64>],
    image: &[Vec<C64>],
    dim: usize,
) -> ComplexMatrix {
    assert_eq!(domain.len(), image.len());
    let mut dom: Vec<Vec<C64>> = domain.to_vec();
    let mut img: Vec<Vec<C64>> = image.to_vec();
    dom.extend(complete_orthonormal_basis(domain, dim));
    img.extend(complete_orthonormal_basis(image, dim));
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (d, i) in dom.iter().zip(&img) {
        u = u.add(&outer(i, d));
    }
    u
}

// ---------------------------------------------------------------------------
// subspaces

/// A subspace of C^n carried by an orthonormal basis (possibly empty).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<C64>>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<C64>>, tol: &ToleranceProfile) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(Error::DimensionMismatch { left: basis.len(), right: ambient_dim });
        }
        for (i, a) in basis.iter().enumerate() {
            if a.len() != ambient_dim {
                return Err(Error::DimensionMismatch { left: a.len(), right: ambient_dim });
            }
            for (j, b) in basis.iter().enumerate() {
                let g = vec_inner(a, b);
                let target = if i == j { ONE } else { ZERO };
                if (g - target).norm() > tol.tol_ortho * 10.0 {
                    return Err(Error::InvalidState(format!(
                        "subspace basis is not orthonormal (gram deviation {:.3e})",
                        (g - target).norm()
                    )));
                }
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| basis_vector(ambient_dim, i)).collect();
        Subspace { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.basis {
            p = p.add(&outer(b, b));
        }
        p
    }

    /// `other ⊆ self`, tested as ‖(I−P_self)·P_other‖ ≤ tol.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let p = self.projector();
        let q = other.projector();
        let residual = q.sub(&p.mul(&q));
        residual.max_abs() <= tol
    }

    pub fn contains_vector(&self, v: &[C64], tol: f64) -> bool {
        let p = self.projector();
        let pv = p.mul_vec(v);
        vec_norm(&vec_sub(v, &pv)) <= tol * vec_norm(v).max(1.0)
    }

    pub fn intersect(&self, other: &Subspace, tol: &ToleranceProfile) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let i = ComplexMatrix::identity(self.ambient_dim);
        let a = i.sub(&self.projector());
        let b = i.sub(&other.projector());
        largest_common_kernel(&[a, b], tol)
    }
}

/// Orthonormal basis of the intersection of the kernels, via a stacked SVD.
///
/// Singular values below `tol_zero * max(1, σ_max)` count as zero; the
/// `max(1, ·)` floor keeps near-zero stacks (e.g. differences of equal
/// projectors) resolving to the full space rather than noise.
pub fn largest_common_kernel(ops: &[ComplexMatrix], tol: &ToleranceProfile) -> Subspace {
    assert!(!ops.is_empty());
    let dim = ops[0].cols();
    let total_rows: usize = ops.iter().map(|o| o.rows()).sum();
    let mut stack = ComplexMatrix::zeros(total_rows, dim);
    let mut row0 = 0;
    for op in ops {
        assert_eq!(op.cols(), dim, "all operators must share a dimension");
        for r in 0..op.rows() {
            for c in 0..dim {
                stack[(row0 + r, c)] = op[(r, c)];
            }
        }
        row0 += op.rows();
    }
    let decomp = svd(&stack).expect("svd of a finite matrix converges");
    let sig_max = decomp.singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol.tol_zero * sig_max.max(1.0);
    let mut basis = Vec::new();
    for (i, &s) in decomp.singular_values.iter().enumerate() {
        if s <= threshold {
            basis.push(decomp.right.column(i));
        }
    }
    Subspace { ambient_dim: dim, basis }
}

// ---------------------------------------------------------------------------
// random instances

/// Matrix of standard complex Gaussians (variance 1 per complex entry).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re / 2f64.sqrt(), im / 2f64.sqrt())
    })
}

/// Haar-distributed unitary via Gram-Schmidt of a Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let g = complex_gaussian(rng, dim, dim);
        let cols: Vec<Vec<C64>> = (0..dim).map(|c| g.column(c)).collect();
        let basis = orthonormalize(&cols, 1e-12);
        if basis.len() == dim {
            return ComplexMatrix::from_columns(&basis);
        }
    }
}

pub fn random_state_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let g = complex_gaussian(rng, dim, 1);
        let v = g.column(0);
        if vec_norm(&v) > 1e-6 {
            return vec_normalize(&v);
        }
    }
}

/// G·G†/Tr[G·G†]: positive with unit trace by construction.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = complex_gaussian(rng, dim, dim);
    let gg = g.mul(&g.adjoint());
    let t = gg.trace().re;
    gg.scale_re(1.0 / t).hermitized()
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = complex_gaussian(rng, dim, dim);
    g.add(&g.adjoint()).scale_re(0.5)
}

/// Random POVM effects: Aᵢ = GᵢGᵢ† normalized by S^{-1/2}·Aᵢ·S^{-1/2}.
pub fn random_effects<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n_outcomes: usize,
    tol: &ToleranceProfile,
) -> Result<Vec<ComplexMatrix>> {
    let retries = 5;
    for _ in 0..retries {
        let raw: Vec<ComplexMatrix> = (0..n_outcomes)
            .map(|_| {
                let g = complex_gaussian(rng, dim, dim);
                g.mul(&g.adjoint()).hermitized()
            })
            .collect();
        let mut s = ComplexMatrix::zeros(dim, dim);
        for a in &raw {
            s = s.add(a);
        }
        let eig = eig_hermitian(&s, tol)?;
        if eig.eigenvalues[0] <= tol.tol_zero * eig.eigenvalues[dim - 1].max(1.0) {
            continue;
        }
        let mut inv_sqrt = ComplexMatrix::zeros(dim, dim);
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            let col = eig.eigenvectors.column(i);
            inv_sqrt = inv_sqrt.add(&outer(&col, &col).scale_re(1.0 / l.sqrt()));
        }
        return Ok(raw.iter().map(|a| inv_sqrt.mul(a).mul(&inv_sqrt).hermitized()).collect());
    }
    Err(Error::SingularNormalizer { retries })
}
