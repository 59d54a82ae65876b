//! Search for the Blaschke product maximizing `‖B(M)‖₂` over degrees
//! `0..=max_degree`, for a matrix `M = φ(A)` with spectrum in the unit disk.
//!
//! Each zero is encoded as a point `w` of the plane and squashed into the
//! disk by `w ↦ tanh(|w|) w/|w|`; the encoded problem is unconstrained and
//! is attacked with multi-start Nelder–Mead.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blaschke::{BlaschkeProduct, SPECTRAL_TOL, ZERO_MARGIN};
use crate::matcore::{
    condition_number, eig_general, inverse, norm2, spectral_radius, svd, ComplexMatrix,
};
use crate::{Error, Result};

/// Conjectured universal bound on the Crouzeix ratio.
pub const CONJECTURED_BOUND: f64 = 2.0;
/// Proven universal bound `1 + √2`.
pub const PROVEN_BOUND: f64 = 1.0 + core::f64::consts::SQRT_2;
/// `|u₁*v₁|` below which a certificate passes.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Singular gap below which a certificate is indeterminate.
pub const GAP_TOL: f64 = 1e-10;
/// Slack for checking `A = D C D⁻¹` and `‖C‖₂ ≤ 1`.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Starts per degree: the origin, up to three spectrum-derived points,
    /// random points for the rest.
    pub starts: usize,
    pub seed: u64,
    /// Objective evaluations per local search pass.
    pub budget: usize,
    /// Restarts of the simplex around the incumbent after convergence.
    pub restarts: usize,
    /// Relative tolerance for co-extremal values.
    pub tie_tol: f64,
    /// Zeros with modulus above `1 − boundary_tol` trigger a degree-drop
    /// check.
    pub boundary_tol: f64,
    /// Distance below which two zero sets are the same.
    pub zero_match_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0x5eed,
            budget: 4000,
            restarts: 4,
            tie_tol: 1e-8,
            boundary_tol: 1e-6,
            zero_match_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateStatus {
    Passed,
    Failed,
    /// The top singular value is (numerically) repeated, so `u₁`, `v₁` are
    /// not determined.
    Indeterminate,
}

/// Necessary extremality condition `u₁*v₁ = 0` for the top singular pair
/// of `B(M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub sigma: f64,
    pub overlap: f64,
    pub gap: f64,
    pub status: CertificateStatus,
}

/// One local search.
#[derive(Clone, Debug, PartialEq)]
pub struct StartOutcome {
    pub start: usize,
    pub initial: Vec<C64>,
    pub zeros: Vec<C64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Set when boundary zeros were removed without losing value; holds
    /// the polished lower-degree zeros and their value.
    pub dropped: Option<(Vec<C64>, f64)>,
}

impl StartOutcome {
    /// Zeros and value as reported: the reduced product after a drop.
    pub fn effective(&self) -> (&[C64], f64) {
        match &self.dropped {
            Some((z, v)) => (z, *v),
            None => (&self.zeros, self.value),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeOptimum {
    pub degree: usize,
    /// Best product of exactly this degree, or the best reduced product
    /// when every start dropped degree.
    pub product: BlaschkeProduct,
    pub value: f64,
    pub dropped: bool,
    pub converged: bool,
    pub certificate: Certificate,
    pub outcomes: Vec<StartOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extremal {
    pub product: BlaschkeProduct,
    pub value: f64,
    pub certificate: Certificate,
}

impl Extremal {
    pub fn degree(&self) -> usize {
        self.product.degree()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalResult {
    pub by_degree: Vec<DegreeOptimum>,
    /// Co-extremal products, best first, with distinct zero sets.
    pub overall: Vec<Extremal>,
    pub ratio: f64,
    /// Every reported optimum came from a converged search.
    pub certified: bool,
    pub exceeds_conjectured_bound: bool,
}

impl ExtremalResult {
    pub fn degree(&self, m: usize) -> Option<&DegreeOptimum> {
        self.by_degree.get(m)
    }

    pub fn is_tie(&self) -> bool {
        self.overall.len() > 1
    }
}

/// `‖B(M)‖₂` for the Blaschke product with phase 0 and the given zeros.
pub fn objective(m: &ComplexMatrix, zeros: &[C64]) -> Result<f64> {
    let b = BlaschkeProduct::new(zeros.to_vec(), 0.0)?;
    norm2(&b.eval_matrix(m)?)
}

/// Eigenvector condition up to which the search evaluates `B(M)` as
/// `X B(Λ) X⁻¹`.
pub const SPECTRAL_EVAL_CONDITION: f64 = 1e4;

/// `B(M)` for one fixed `M`, repeated over many products.
///
/// A diagonalizable `M` with well-conditioned eigenvectors goes through a
/// cached eigendecomposition. Eigenvalues on or outside the unit circle
/// (by rounding; [`maximize`] rejects anything beyond [`SPECTRAL_TOL`]) are
/// put on it and their factors normalized to modulus one, so zeros crowding
/// such an eigenvalue cannot gain from rounding. Other matrices use
/// resolvent solves.
enum Evaluator<'a> {
    Spectral {
        x: ComplexMatrix,
        x_inv: ComplexMatrix,
        values: Vec<C64>,
        on_circle: Vec<bool>,
    },
    Resolvent(&'a ComplexMatrix),
}

impl<'a> Evaluator<'a> {
    fn new(m: &'a ComplexMatrix) -> Result<Self> {
        let eig = eig_general(m)?;
        if !(eig.condition <= SPECTRAL_EVAL_CONDITION) {
            return Ok(Evaluator::Resolvent(m));
        }
        let Ok(x_inv) = inverse(&eig.vectors) else {
            return Ok(Evaluator::Resolvent(m));
        };
        // only eigenvalues pushed outside the disk by rounding are moved;
        // one just inside keeps its exact |B(λ)| < 1
        let on_circle: Vec<bool> = eig.values.iter().map(|z| z.norm() >= 1.0).collect();
        let values = eig
            .values
            .iter()
            .zip(&on_circle)
            .map(|(&z, &c)| if c { z / z.norm() } else { z })
            .collect();
        Ok(Evaluator::Spectral {
            x: eig.vectors,
            x_inv,
            values,
            on_circle,
        })
    }

    fn matrix(&self, b: &BlaschkeProduct) -> Result<ComplexMatrix> {
        match self {
            Evaluator::Resolvent(m) => b.eval_matrix_unchecked(m),
            Evaluator::Spectral {
                x,
                x_inv,
                values,
                on_circle,
            } => {
                let d = values
                    .iter()
                    .zip(on_circle)
                    .map(|(&z, &c)| {
                        let w = b.eval_scalar(z)?;
                        Ok(if c { w / w.norm() } else { w })
                    })
                    .collect::<Result<Vec<C64>>>()?;
                let xd = ComplexMatrix::from_fn(x.dim(), |i, j| x[(i, j)] * d[j]);
                Ok(&xd * x_inv)
            }
        }
    }

    fn value(&self, zeros: &[C64]) -> Result<f64> {
        norm2(&self.matrix(&BlaschkeProduct::new(zeros.to_vec(), 0.0)?)?)
    }

    fn certificate(&self, b: &BlaschkeProduct) -> Result<Certificate> {
        certificate_of(&self.matrix(b)?)
    }
}

/// Top singular value of `B(M)`, `|u₁*v₁|` and `σ₁ − σ₂`.
pub fn certificate(m: &ComplexMatrix, b: &BlaschkeProduct) -> Result<Certificate> {
    certificate_of(&b.eval_matrix(m)?)
}

fn certificate_of(p: &ComplexMatrix) -> Result<Certificate> {
    let s = svd(p)?;
    let sigma = s[0].sigma;
    let gap = if s.len() > 1 {
        sigma - s[1].sigma
    } else {
        sigma
    };
    let overlap = crate::matcore::inner(&s[0].u, &s[0].v).norm();
    let status = if gap < GAP_TOL {
        CertificateStatus::Indeterminate
    } else if overlap < CERTIFICATE_TOL {
        CertificateStatus::Passed
    } else {
        CertificateStatus::Failed
    };
    Ok(Certificate {
        sigma,
        overlap,
        gap,
        status,
    })
}

/// `κ(D)` for a factorization `M = D C D⁻¹` with `‖C‖₂ ≤ 1`; an upper
/// bound on `‖B(M)‖₂` over all Blaschke products.
pub fn dcd_bound(m: &ComplexMatrix, d: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    let n = m.dim();
    if d.dim() != n || c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if d.dim() != n { d.dim() } else { c.dim() },
        });
    }
    let dinv = crate::matcore::inverse(d)?;
    let rebuilt = &(d * c) * &dinv;
    let residual = rebuilt.max_abs_diff(m) / m.max_abs().max(1.0);
    if !(residual <= DECOMPOSITION_TOL) {
        return Err(Error::InvalidDecomposition { residual });
    }
    let cn = norm2(c)?;
    if !(cn <= 1.0 + DECOMPOSITION_TOL) {
        return Err(Error::InvalidDecomposition { residual: cn - 1.0 });
    }
    condition_number(d)
}

// ---------------------------------------------------------------------------
// encoding

fn squash(x: f64, y: f64) -> C64 {
    let r = x.hypot(y);
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let t = r.tanh().min(1.0 - 2.0 * ZERO_MARGIN);
    C64::new(x, y) * (t / r)
}

fn unsquash(a: C64) -> (f64, f64) {
    let r = a.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let s = r.min(1.0 - 2.0 * ZERO_MARGIN).atanh() / r;
    (a.re * s, a.im * s)
}

fn decode(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| squash(p[0], p[1])).collect()
}

fn encode(zeros: &[C64]) -> Vec<f64> {
    zeros
        .iter()
        .flat_map(|&a| {
            let (x, y) = unsquash(a);
            [x, y]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Nelder–Mead, adaptive coefficients

struct Minimum {
    x: Vec<f64>,
    f: f64,
    evaluations: usize,
    converged: bool,
}

const F_TOL: f64 = 1e-15;
const X_TOL: f64 = 1e-10;
const STALL_ITERS: usize = 100;
/// Zeros smaller than this are tried at exactly 0 after a local search.
const SNAP_RADIUS: f64 = 0.05;

fn nelder_mead(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, budget: usize) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    let mut stalled = 0usize;
    let mut last_best = f64::INFINITY;
    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(d).map(|(ci, di)| ci + t * (di - ci)).collect()
    };
    while evals < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| {
            values[i]
                .partial_cmp(&values[j])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = values[n] - values[0];
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let flat = f_spread <= F_TOL * (1.0 + values[0].abs());
        if values[0] < last_best - F_TOL * (1.0 + values[0].abs()) {
            last_best = values[0];
            stalled = 0;
        } else {
            stalled += 1;
        }
        // the second exit covers maxima that are flat to roundoff in some
        // direction, where the simplex cannot shrink below X_TOL
        if flat && (x_spread <= X_TOL || stalled >= STALL_ITERS * n) {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].clone();
        let xr = point(&centroid, &worst, -alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = point(&centroid, &worst, -alpha * beta);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[n] {
            let xc = point(&centroid, &worst, -alpha * gamma);
            let fc = f(&xc);
            (xc, fc, fr)
        } else {
            let xc = point(&centroid, &worst, gamma);
            let fc = f(&xc);
            (xc, fc, values[n])
        };
        evals += 1;
        if fc <= accept {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = point(&best, &simplex[i], delta);
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }
    let (ib, _) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
        );
    Minimum {
        x: simplex[ib].clone(),
        f: values[ib],
        evaluations: evals,
        converged,
    }
}

/// Maximizes over zeros of fixed count starting at `zeros`, with restarts.
fn local_search(
    ev: &Evaluator<'_>,
    zeros: &[C64],
    cfg: &SearchConfig,
) -> (Vec<C64>, f64, usize, bool) {
    let mut f = |x: &[f64]| match ev.value(&decode(x)) {
        Ok(v) if v.is_finite() => -v,
        _ => f64::INFINITY,
    };
    if zeros.is_empty() {
        return (Vec::new(), -f(&[]), 1, true);
    }
    let mut x = encode(zeros);
    let mut best = f(&x);
    let mut evals = 1;
    let mut converged = false;
    let mut step = 0.25;
    for pass in 0..=cfg.restarts {
        let r = nelder_mead(&mut f, &x, step, cfg.budget);
        evals += r.evaluations;
        let improved = best - r.f;
        if r.f <= best {
            x = r.x;
            best = r.f;
        }
        converged = r.converged;
        if pass > 0 && r.converged && improved <= F_TOL * (1.0 + best.abs()) {
            break;
        }
        step = (step * 0.1).max(1e-4);
    }
    let zeros = decode(&x);
    let value = -best;
    // snap the smallest zeros to the origin when that costs nothing; the
    // objective is flat to high order there for nilpotent matrices
    let mut order: Vec<usize> = (0..zeros.len())
        .filter(|&i| zeros[i].norm() < SNAP_RADIUS && zeros[i].norm() > 0.0)
        .collect();
    order.sort_by(|&i, &j| {
        zeros[j]
            .norm()
            .partial_cmp(&zeros[i].norm())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    while !order.is_empty() {
        let mut snapped = zeros.clone();
        for &i in &order {
            snapped[i] = C64::new(0.0, 0.0);
        }
        evals += 1;
        if let Ok(v) = ev.value(&snapped) {
            if v >= value * (1.0 - 4.0 * f64::EPSILON) {
                return (snapped, v.max(value), evals, converged);
            }
        }
        // keep the largest candidate out of the next attempt
        order.remove(0);
    }
    (zeros, value, evals, converged)
}

fn start_points(m: &ComplexMatrix, degree: usize, cfg: &SearchConfig) -> Result<Vec<Vec<C64>>> {
    let mut eigs = eig_general(m)?.values;
    eigs.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let clamp = |z: C64| {
        if z.norm() > 0.95 {
            z * (0.95 / z.norm())
        } else {
            z
        }
    };
    let mut starts = vec![vec![C64::new(0.0, 0.0); degree]];
    let nonzero: Vec<C64> = eigs.into_iter().filter(|z| z.norm() > 1e-8).collect();
    if !nonzero.is_empty() {
        for s in [C64::new(0.9, 0.0), C64::new(0.5, 0.0), C64::new(-0.5, 0.0)] {
            if starts.len() >= cfg.starts {
                break;
            }
            starts.push(
                (0..degree)
                    .map(|j| clamp(nonzero[j % nonzero.len()] * s))
                    .collect(),
            );
        }
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed ^ (degree as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    while starts.len() < cfg.starts {
        let z: Vec<C64> = (0..degree)
            .map(|_| {
                let r = 0.9 * rng.gen::<f64>().sqrt();
                C64::from_polar(r, core::f64::consts::TAU * rng.gen::<f64>())
            })
            .collect();
        starts.push(z);
    }
    Ok(starts)
}

/// Whether two zero sets agree up to permutation within `tol`.
pub fn same_zero_set(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| {
            (x - b[i])
                .norm()
                .partial_cmp(&(x - b[j]).norm())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        match hit {
            Some(j) if (x - b[j]).norm() <= tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

fn run_start(
    ev: &Evaluator<'_>,
    start: usize,
    initial: Vec<C64>,
    cfg: &SearchConfig,
) -> StartOutcome {
    let (zeros, value, mut evaluations, converged) = local_search(ev, &initial, cfg);
    let interior: Vec<C64> = zeros
        .iter()
        .copied()
        .filter(|z| z.norm() <= 1.0 - cfg.boundary_tol)
        .collect();
    let mut dropped = None;
    if interior.len() < zeros.len() {
        let (rz, rv, e, _) = local_search(ev, &interior, cfg);
        evaluations += e;
        if rv >= value * (1.0 - cfg.tie_tol) {
            dropped = Some((rz, rv));
        }
    }
    StartOutcome {
        start,
        initial,
        zeros,
        value,
        evaluations,
        converged,
        dropped,
    }
}

/// Maximizes `‖B(M)‖₂` over Blaschke products of each degree up to
/// `max_degree`.
pub fn maximize(
    m: &ComplexMatrix,
    max_degree: usize,
    cfg: &SearchConfig,
) -> Result<ExtremalResult> {
    if max_degree >= m.dim() {
        return Err(Error::InvalidInput(
            "maximum degree must be below the matrix dimension",
        ));
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidInput("at least one start is required"));
    }
    let rho = spectral_radius(m)?;
    if !(rho < 1.0 + SPECTRAL_TOL) {
        return Err(Error::Domain {
            what: "spectral radius of mapped matrix",
            value: rho,
        });
    }
    let ev = Evaluator::new(m)?;
    let mut by_degree = Vec::with_capacity(max_degree + 1);
    for degree in 0..=max_degree {
        let outcomes: Vec<StartOutcome> = if degree == 0 {
            vec![run_start(&ev, 0, Vec::new(), cfg)]
        } else {
            start_points(m, degree, cfg)?
                .into_iter()
                .enumerate()
                .map(|(i, z)| run_start(&ev, i, z, cfg))
                .collect()
        };
        let pick = |genuine: bool| {
            outcomes
                .iter()
                .filter(|o| o.dropped.is_none() == genuine)
                .max_by(|a, b| {
                    a.effective()
                        .1
                        .partial_cmp(&b.effective().1)
                        .unwrap_or(core::cmp::Ordering::Equal)
                })
        };
        let (best, dropped) = match pick(true) {
            Some(o) => (o, false),
            None => (
                pick(false).ok_or(Error::NoConvergence("no start produced a value"))?,
                true,
            ),
        };
        let (zeros, value) = best.effective();
        let product = BlaschkeProduct::new(zeros.to_vec(), 0.0)?;
        let certificate = ev.certificate(&product)?;
        by_degree.push(DegreeOptimum {
            degree,
            value,
            dropped,
            converged: best.converged,
            certificate,
            product,
            outcomes,
        });
    }

    let ratio = by_degree.iter().map(|d| d.value).fold(0.0, f64::max);
    let mut overall: Vec<Extremal> = Vec::new();
    let mut certified = true;
    for d in &by_degree {
        for o in d.outcomes.iter().filter(|o| o.dropped.is_none()) {
            if o.value < ratio * (1.0 - cfg.tie_tol) {
                continue;
            }
            if overall
                .iter()
                .any(|e| same_zero_set(e.product.zeros(), &o.zeros, cfg.zero_match_tol))
            {
                continue;
            }
            certified &= o.converged;
            let product = BlaschkeProduct::new(o.zeros.clone(), 0.0)?;
            let certificate = ev.certificate(&product)?;
            overall.push(Extremal {
                product,
                value: o.value,
                certificate,
            });
        }
    }
    overall.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(ExtremalResult {
        by_degree,
        overall,
        ratio,
        certified,
        exceeds_conjectured_bound: ratio > CONJECTURED_BOUND + 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nonunique_mapped(t: f64) -> ComplexMatrix {
        let r = (1.0 + (1.0 - t) * (1.0 - t)).sqrt() / 2.0;
        ComplexMatrix::from_real_rows(&[
            &[0.0, 1.0 / r, 0.0],
            &[0.0, 0.0, (1.0 - t) / r],
            &[0.0, 0.0, 0.0],
        ])
    }

    #[test]
    fn objective_examples() {
        let m = ComplexMatrix::jordan(3).scale_real(SQRT_2);
        assert!((objective(&m, &[c(0.0, 0.0); 2]).unwrap() - 2.0).abs() < 1e-14);
        assert!((objective(&m, &[]).unwrap() - 1.0).abs() < 1e-15);
        let t0 = 1.0 - 1.0 / 3f64.sqrt();
        let m = nonunique_mapped(t0);
        let s3 = 3f64.sqrt();
        assert!((objective(&m, &[c(0.0, 0.0)]).unwrap() - s3).abs() < 1e-14);
        assert!((objective(&m, &[c(0.0, 0.0); 2]).unwrap() - s3).abs() < 1e-14);
    }

    #[test]
    fn squash_round_trip() {
        for z in [c(0.0, 0.0), c(0.3, -0.4), c(-0.999, 0.0), c(0.0, 1e-9)] {
            let (x, y) = unsquash(z);
            assert!((squash(x, y) - z).norm() < 1e-13);
        }
        assert!(squash(1e3, 0.0).norm() < 1.0 - ZERO_MARGIN);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], 0.5, 5000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-7 && (r.x[1] + 0.5).abs() < 1e-7);
    }

    #[test]
    fn jordan_two() {
        let m = ComplexMatrix::jordan(2).scale_real(2.0);
        let r = maximize(&m, 1, &SearchConfig::default()).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-10);
        assert!(r.overall[0].product.zeros()[0].norm() < 1e-6);
        assert_eq!(r.overall.len(), 1);
    }

    #[test]
    fn jordan_three() {
        let m = ComplexMatrix::jordan(3).scale_real(SQRT_2);
        let r = maximize(&m, 2, &SearchConfig::default()).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-10, "{}", r.ratio);
        let best = &r.overall[0];
        assert_eq!(best.degree(), 2);
        assert!(best.product.zeros().iter().all(|z| z.norm() < 1e-6));
        assert!(r.certified);
    }

    #[test]
    fn nonunique_tie() {
        let t0 = 1.0 - 1.0 / 3f64.sqrt();
        let r = maximize(&nonunique_mapped(t0), 2, &SearchConfig::default()).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r.by_degree[1].value - s3).abs() < 1e-8);
        assert!((r.by_degree[2].value - s3).abs() < 1e-8);
        assert!(r.is_tie());
        let degrees: Vec<usize> = r.overall.iter().map(|e| e.degree()).collect();
        assert!(degrees.contains(&1) && degrees.contains(&2), "{degrees:?}");
    }

    #[test]
    fn degree_drop_after_crossover() {
        let t = 1.0 - 1.0 / 3f64.sqrt() + 0.05;
        let r = maximize(&nonunique_mapped(t), 2, &SearchConfig::default()).unwrap();
        let rr = (1.0 + (1.0 - t) * (1.0 - t)).sqrt() / 2.0;
        assert!((r.ratio - 1.0 / rr).abs() < 1e-8);
        assert_eq!(r.overall.len(), 1);
        assert_eq!(r.overall[0].degree(), 1);
    }

    #[test]
    fn certificates() {
        let t0 = 1.0 - 1.0 / 3f64.sqrt();
        let m = nonunique_mapped(t0);
        let cert = certificate(&m, &BlaschkeProduct::power(1)).unwrap();
        assert!(cert.overlap < 1e-8);
        let cst = BlaschkeProduct::new(vec![], 0.0).unwrap();
        let cert = certificate(&m, &cst).unwrap();
        assert!((cert.sigma - 1.0).abs() < 1e-15);
        assert_eq!(cert.status, CertificateStatus::Indeterminate);
    }

    #[test]
    fn dcd_examples() {
        let n = 4;
        let cc = 1.0 / (core::f64::consts::PI / (n as f64 + 1.0)).cos();
        let m = ComplexMatrix::jordan(n).scale_real(cc);
        let d = ComplexMatrix::real_diag(&[1.0, 1.0 / cc, 1.0 / (cc * cc), 1.0 / cc.powi(3)]);
        let bound = dcd_bound(&m, &d, &ComplexMatrix::jordan(n)).unwrap();
        assert!((bound - cc.powi(3)).abs() < 1e-12);
        let contraction = ComplexMatrix::jordan(3).scale_real(0.9);
        let i3 = ComplexMatrix::identity(3);
        assert!((dcd_bound(&contraction, &i3, &contraction).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            dcd_bound(&m, &ComplexMatrix::identity(4), &ComplexMatrix::jordan(4)),
            Err(Error::InvalidDecomposition { .. })
        ));
    }

    #[test]
    fn zero_set_matching() {
        let a = [c(0.5, 0.0), c(-0.5, 0.0)];
        let b = [c(-0.5, 1e-9), c(0.5, 0.0)];
        assert!(same_zero_set(&a, &b, 1e-6));
        assert!(!same_zero_set(&a, &b[..1], 1e-6));
        assert!(!same_zero_set(&a, &[c(0.5, 0.0), c(0.5, 0.0)], 1e-6));
    }
}
