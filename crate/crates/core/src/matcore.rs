//! Dense complex linear algebra for matrices of dimension at most 16.
//!
//! Singular values come from one-sided (Hestenes) Jacobi, Hermitian
//! eigenproblems from cyclic two-sided Jacobi, and general eigenproblems
//! from a Hessenberg reduction followed by single-shift complex QR. None of
//! these are fast for large `n`; all of them are deterministic and accurate
//! at the sizes used here.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use crate::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput("matrix dimension must be positive"));
    }
    if dim > MAX_DIM {
        return Err(Error::TooLarge(dim));
    }
    Ok(())
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Panics if `dim` is zero or above [`MAX_DIM`].
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square matrix from real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "ragged rows");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "ragged rows");
            rows[i][j]
        })
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    /// Nilpotent Jordan block: ones on the superdiagonal.
    pub fn jordan(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if j == i + 1 { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + s·I`.
    pub fn shift(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] += s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A A* − A* A‖_F ≤ tol · ‖A‖_F²`.
    pub fn is_normal(&self, tol: f64) -> bool {
        let a_star = self.adjoint();
        let comm = &(self * &a_star) - &(&a_star * self);
        let scale = self.frobenius_norm().powi(2);
        comm.frobenius_norm() <= tol * scale.max(f64::MIN_POSITIVE)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

pub(crate) fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x* y`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

// ---------------------------------------------------------------------------
// Singular value decomposition

/// One singular triple `(σ, u, v)` with `M v = σ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided Jacobi on the columns of a `rows × cols` matrix (column-major
/// `cols`). On return the columns are mutually orthogonal and `v` holds the
/// accumulated right rotations, so that `A_in · V = A_out`.
pub(crate) fn one_sided_jacobi(columns: &mut [Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let n = columns.len();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    if n < 2 {
        return Ok(v);
    }
    let rows = columns[0].len().max(1);
    let tol = f64::EPSILON * rows as f64;
    let total: f64 = columns.iter().flatten().map(|z| z.norm_sqr()).sum();
    // pairs at roundoff level relative to the whole matrix are left alone
    let floor = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&columns[p], &columns[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() || g <= floor {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // [x' y'] = [x y] [[c, s e^{iφ}], [-s e^{-iφ}, c]]
                let sp = phase * s;
                let spc = phase.conj() * s;
                rotate_pair(columns, p, q, c, sp, spc);
                rotate_pair(&mut v, p, q, c, sp, spc);
            }
        }
        if !rotated {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence("one-sided Jacobi SVD"))
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, sp: C64, spc: C64) {
    let (left, right) = cols.split_at_mut(q);
    let x = &mut left[p];
    let y = &mut right[0];
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi;
        *xi = a * c - spc * b;
        *yi = sp * a + b * c;
    }
}

/// Full SVD of a square matrix, triplets sorted by descending `sigma`.
///
/// The right vector of each triplet is phase-normalized so that its
/// largest-magnitude component is real and positive.
pub fn svd(m: &ComplexMatrix) -> Result<Vec<SingularTriplet>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    let v = one_sided_jacobi(&mut cols)?;
    let mut triplets: Vec<SingularTriplet> = cols
        .into_iter()
        .zip(v)
        .map(|(col, vj)| {
            let sigma = vec_norm(&col);
            SingularTriplet {
                sigma,
                u: col,
                v: vj,
            }
        })
        .collect();
    // stable: ties keep sweep order
    triplets.sort_by(|a, b| {
        b.sigma
            .partial_cmp(&a.sigma)
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let smax = triplets[0].sigma;
    let rank_floor = smax * f64::EPSILON * n as f64;
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (idx, t) in triplets.iter_mut().enumerate() {
        if t.sigma > rank_floor && t.sigma > 0.0 {
            let inv = 1.0 / t.sigma;
            t.u.iter_mut().for_each(|z| *z *= inv);
            basis.push(t.u.clone());
        } else {
            pending.push(idx);
        }
    }
    for idx in pending {
        let u = complete_basis(&basis, n);
        basis.push(u.clone());
        triplets[idx].u = u;
    }
    for t in triplets.iter_mut() {
        normalize_phase(t);
    }
    Ok(triplets)
}

/// Unit vector orthogonal to every vector in `basis`.
fn complete_basis(basis: &[Vec<C64>], n: usize) -> Vec<C64> {
    let mut best: Option<Vec<C64>> = None;
    let mut best_norm = 0.0;
    for e in 0..n {
        let mut x: Vec<C64> = (0..n).map(|i| if i == e { ONE } else { ZERO }).collect();
        for _ in 0..2 {
            for b in basis {
                let c = inner(b, &x);
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
            }
        }
        let nx = vec_norm(&x);
        if nx > best_norm {
            best_norm = nx;
            best = Some(x);
        }
        if nx > 0.5 {
            break;
        }
    }
    let mut x = best.expect("dimension is positive");
    let inv = 1.0 / best_norm;
    x.iter_mut().for_each(|z| *z *= inv);
    x
}

fn normalize_phase(t: &mut SingularTriplet) {
    let mut idx = 0;
    let mut mag = -1.0;
    for (i, z) in t.v.iter().enumerate() {
        let a = z.norm();
        if a > mag * (1.0 + 1e-12) {
            mag = a;
            idx = i;
        }
    }
    if mag <= 0.0 {
        return;
    }
    let phase = (t.v[idx] / mag).conj();
    t.v.iter_mut().for_each(|z| *z *= phase);
    t.u.iter_mut().for_each(|z| *z *= phase);
    t.v[idx] = C64::new(t.v[idx].re, 0.0);
}

/// Spectral norm `‖M‖₂`.
pub fn norm2(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.dim() == 1 {
        return Ok(m[(0, 0)].norm());
    }
    Ok(svd(m)?[0].sigma)
}

/// `σ_max / σ_min`; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let s = svd(m)?;
    let smin = s[s.len() - 1].sigma;
    Ok(if smin == 0.0 {
        f64::INFINITY
    } else {
        s[0].sigma / smin
    })
}

// ---------------------------------------------------------------------------
// Hermitian eigenproblem

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi for Hermitian `h`. Only the upper triangle's Hermitian
/// part is meaningful; the input is symmetrized first.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = h.dim();
    let mut a = ComplexMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let mut converged = n == 1 || scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 0.1 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q)
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                for i in 0..n {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = x * g_pp + y * g_qp;
                    a[(i, q)] = x * g_pq + y * g_qq;
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * g_pp + y * g_qp;
                    v[(i, q)] = x * g_pq + y * g_qq;
                }
                for j in 0..n {
                    let x = a[(p, j)];
                    let y = a[(q, j)];
                    a[(p, j)] = g_pp.conj() * x + g_qp.conj() * y;
                    a[(q, j)] = g_pq.conj() * x + g_qq.conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Hermitian Jacobi eigensolver"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

// ---------------------------------------------------------------------------
// General eigenproblem

/// Eigendecomposition `M X = X Λ`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: ComplexMatrix,
    /// `κ₂(X)`.
    pub condition: f64,
    /// Set when `condition` exceeds [`DEFECTIVE_CONDITION`].
    pub defective: bool,
}

/// Eigenvector condition above which a matrix is treated as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;

/// Givens rotation `[[c, s], [-s̄, c]]` with `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, ONE);
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

/// Complex Schur form `M = Q T Q*` with `T` upper triangular.
pub fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);

    // Householder reduction to upper Hessenberg form.
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = vec_norm(&x);
        if xn == 0.0 {
            continue;
        }
        let lead_phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let mut w = x.clone();
        w[0] += lead_phase * xn;
        let wn = vec_norm(&w);
        if wn == 0.0 {
            continue;
        }
        w.iter_mut().for_each(|z| *z /= wn);
        // h <- P h P with P = I - 2 w w*
        for j in 0..n {
            let dot: C64 = (0..w.len()).map(|i| w[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..w.len() {
                h[(k + 1 + i, j)] -= w[i] * dot * 2.0;
            }
        }
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = (0..w.len()).map(|l| mat[(i, k + 1 + l)] * w[l]).sum();
                for l in 0..w.len() {
                    mat[(i, k + 1 + l)] -= dot * w[l].conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }

    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n * n {
            return Err(Error::NoConvergence("complex QR eigensolver"));
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mu1 = (a + d) * 0.5 + disc;
            let mu2 = (a + d) * 0.5 - disc;
            if (mu1 - d).norm() < (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };
        // implicit single-shift QR sweep on rows/cols l..=hi
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (c, s) = givens(x, y);
            let col_start = if k > l { k - 1 } else { l };
            for j in col_start..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + s.conj() * b;
                h[(i, k + 1)] = -s * a + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + s.conj() * b;
                q[(i, k + 1)] = -s * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok((h, q))
}

/// Eigenvalues and right eigenvectors of a general square matrix.
pub fn eig_general(m: &ComplexMatrix) -> Result<Eigen> {
    let n = m.dim();
    let (t, q) = schur(m)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let small = f64::EPSILON * t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut y = ComplexMatrix::zeros(n);
    for k in 0..n {
        let lambda = values[k];
        let mut col = vec![ZERO; n];
        col[k] = ONE;
        for j in (0..k).rev() {
            let sum: C64 = (j + 1..=k).map(|l| t[(j, l)] * col[l]).sum();
            let mut den = t[(j, j)] - lambda;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            col[j] = -sum / den;
        }
        y.set_column(k, &col);
    }
    let mut x = &q * &y;
    for k in 0..n {
        let col = x.column(k);
        let nrm = vec_norm(&col);
        if nrm > 0.0 && nrm.is_finite() {
            let scaled: Vec<C64> = col.iter().map(|z| z / nrm).collect();
            x.set_column(k, &scaled);
        }
    }
    let condition = if x.is_finite() {
        condition_number(&x)?
    } else {
        f64::INFINITY
    };
    Ok(Eigen {
        values,
        vectors: x,
        condition,
        defective: !(condition <= DEFECTIVE_CONDITION),
    })
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    let (t, _) = schur(m)?;
    Ok((0..m.dim()).map(|i| t[(i, i)].norm()).fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Linear solves

/// Condition estimate above which [`solve`] reports a singular matrix.
pub const SINGULAR_CONDITION: f64 = 1e12;

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

fn lu_factor(m: &ComplexMatrix) -> Result<Lu> {
    let n = m.dim();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve_column(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = rhs.dim();
        let mut out = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = self.solve_column(&rhs.column(j));
            out.set_column(j, &col);
        }
        out
    }
}

/// Solves `M X = RHS`.
///
/// Fails with [`Error::Singular`] when the 1-norm condition estimate
/// `‖M‖₁‖M⁻¹‖₁` exceeds [`SINGULAR_CONDITION`].
pub fn solve(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() != rhs.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rhs.dim(),
        });
    }
    if !m.is_finite() || !rhs.is_finite() {
        return Err(Error::NonFinite);
    }
    let lu = lu_factor(m)?;
    let inv = lu.solve(&ComplexMatrix::identity(m.dim()));
    let condition = m.norm1() * inv.norm1();
    if !(condition <= SINGULAR_CONDITION) {
        return Err(Error::Singular { condition });
    }
    Ok(lu.solve(rhs))
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(m, &ComplexMatrix::identity(m.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Power iteration on `M*M`; independent of the Jacobi sweep.
    fn power_sigma(m: &ComplexMatrix) -> (f64, Vec<C64>) {
        let mm = &m.adjoint() * m;
        let n = m.dim();
        let mut x: Vec<C64> = (0..n).map(|i| c(1.0 + i as f64 * 0.1, 0.3)).collect();
        for _ in 0..2000 {
            let y = mm.mul_vec(&x);
            let ny = vec_norm(&y);
            x = y.iter().map(|z| z / ny).collect();
        }
        let y = m.mul_vec(&x);
        (vec_norm(&y), x)
    }

    fn parallel(a: &[C64], idx: usize) -> bool {
        (a[idx].norm() - 1.0).abs() < 1e-10
    }

    #[test]
    fn norm2_of_jordan_blocks_is_one() {
        for n in 2..=6 {
            assert!((norm2(&ComplexMatrix::jordan(n)).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn norm2_of_diagonal() {
        let m = ComplexMatrix::diag(&[c(2.0, 0.0), c(0.0, -3.0)]);
        assert!((norm2(&m).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn norm2_exact_in_dimension_one() {
        let m = ComplexMatrix::new(1, vec![c(3.0, 4.0)]).unwrap();
        assert_eq!(norm2(&m).unwrap(), 5.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            ComplexMatrix::new(1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
        assert!(matches!(
            ComplexMatrix::new(17, vec![ZERO; 289]),
            Err(Error::TooLarge(17))
        ));
    }

    #[test]
    fn svd_of_identity() {
        let s = svd(&ComplexMatrix::identity(3)).unwrap();
        assert!(s.iter().all(|t| (t.sigma - 1.0).abs() < 1e-15));
    }

    #[test]
    fn svd_of_rank_one() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        let s = svd(&m).unwrap();
        assert!((s[0].sigma - 2.0).abs() < 1e-15);
        assert!(s[1].sigma.abs() < 1e-15);
        assert!(parallel(&s[0].u, 0));
        assert!(parallel(&s[0].v, 1));
        // completed left vector is a unit vector orthogonal to u1
        assert!((vec_norm(&s[1].u) - 1.0).abs() < 1e-14);
        assert!(inner(&s[0].u, &s[1].u).norm() < 1e-14);
    }

    #[test]
    fn svd_of_blaschke_image_of_t() {
        // displayed B(T) at k = 0.8: k' = 0.6
        let k: f64 = 0.8;
        let kp = (1.0 - k * k).sqrt();
        let m = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0],
            &[0.0, k / (1.0 + kp), 0.0],
            &[(1.0 - kp) / (1.0 + kp), 0.0, 0.0],
        ]);
        let (oracle, _) = power_sigma(&m);
        let s = svd(&m).unwrap();
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!((s[0].sigma - oracle).abs() < 1e-12);
        assert!(parallel(&s[0].u, 0));
        assert!(parallel(&s[0].v, 2));
    }

    #[test]
    fn svd_phase_normalized() {
        let m =
            ComplexMatrix::from_rows(&[&[c(1.0, 2.0), c(0.5, -1.0)], &[c(-0.3, 0.1), c(2.0, 2.0)]]);
        for t in svd(&m).unwrap() {
            let big =
                t.v.iter()
                    .fold(ZERO, |acc, &z| if z.norm() > acc.norm() { z } else { acc });
            assert!(big.im == 0.0 && big.re > 0.0);
            let mv = m.mul_vec(&t.v);
            for (a, b) in mv.iter().zip(&t.u) {
                assert!((a - b * t.sigma).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eig_of_diagonal() {
        let e = eig_general(&ComplexMatrix::real_diag(&[1.0, 2.0, 3.0])).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, want) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - want).abs() < 1e-14);
        }
        assert!(!e.defective);
    }

    #[test]
    fn eig_of_off_diagonal_pair() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.25, 0.0]]);
        let e = eig_general(&m).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 0.5).abs() < 1e-14 && (vals[1] - 0.5).abs() < 1e-14);
        assert!(e.values.iter().all(|z| z.im.abs() < 1e-14));
    }

    #[test]
    fn eig_of_scaled_tridiagonal_family() {
        let b: f64 = 0.5;
        let s = 1.0 / (2.0 * b).sqrt();
        let m =
            ComplexMatrix::from_real_rows(&[&[0.0, s, 0.0], &[b * s, 0.0, s], &[0.0, b * s, 0.0]]);
        let e = eig_general(&m).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, want) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - want).abs() < 1e-10, "{vals:?}");
        }
        let lhs = &m * &e.vectors;
        let rhs = &e.vectors * &ComplexMatrix::diag(&e.values);
        assert!(lhs.max_abs_diff(&rhs) < 1e-8 * norm2(&m).unwrap());
    }

    #[test]
    fn jordan_block_flagged_defective() {
        let e = eig_general(&ComplexMatrix::jordan(3)).unwrap();
        assert!(e.defective);
        assert!(e.values.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let rhs =
            ComplexMatrix::from_rows(&[&[c(1.0, 2.0), c(3.0, 0.0)], &[c(0.0, -1.0), c(4.0, 4.0)]]);
        assert_eq!(solve(&ComplexMatrix::identity(2), &rhs).unwrap(), rhs);
        let x = solve(
            &ComplexMatrix::real_diag(&[2.0, 4.0]),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert!(x.max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.25])) < 1e-15);
    }

    #[test]
    fn solve_resolvent_of_jordan_block() {
        // (I - a J)^{-1} = I + a J + a^2 J^2 for the 3x3 nilpotent block
        let a = 0.5;
        let j = ComplexMatrix::jordan(3);
        let m = &ComplexMatrix::identity(3) - &j.scale_real(a);
        let rhs = j.shift(c(-0.5, 0.0));
        let inv =
            ComplexMatrix::from_real_rows(&[&[1.0, a, a * a], &[0.0, 1.0, a], &[0.0, 0.0, 1.0]]);
        let expected = &inv * &rhs;
        assert!(solve(&m, &rhs).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            solve(&m, &ComplexMatrix::identity(2)),
            Err(Error::Singular { .. })
        ));
        let nearly = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-14]]);
        assert!(matches!(inverse(&nearly), Err(Error::Singular { .. })));
    }

    #[test]
    fn eigh_sorts_descending() {
        let h =
            ComplexMatrix::from_rows(&[&[c(2.0, 0.0), c(0.0, 1.0)], &[c(0.0, -1.0), c(2.0, 0.0)]]);
        let e = eigh(&h).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        let hv = h.mul_vec(&v0);
        for (a, b) in hv.iter().zip(&v0) {
            assert!((a - b * 3.0).norm() < 1e-13);
        }
    }
}
