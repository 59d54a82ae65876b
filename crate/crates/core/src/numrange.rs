//! Numerical range boundaries, conic recognition and the 2×2 normal form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::matcore::{self, eigh, inner, ComplexMatrix};
use crate::{Error, Result};

/// Default number of support angles for a boundary sweep.
pub const DEFAULT_SAMPLES: usize = 256;
/// Minimum support angles accepted by [`boundary`].
pub const MIN_SAMPLES: usize = 8;
/// Minimum boundary points accepted by [`fit_conic`].
pub const MIN_FIT_POINTS: usize = 32;
/// Relative axis gap `(a − b)/a` below which an ellipse is a disk.
pub const DISK_TOL: f64 = 1e-10;
/// Relative minor axis below which an ellipse is a segment.
pub const SEGMENT_TOL: f64 = 1e-10;
/// Largest relative radial residual accepted by [`fit_conic`].
pub const FIT_REJECT: f64 = 1e-6;

/// Ordered samples of `∂W(A)` with the support angle that produced each.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    pub points: Vec<C64>,
    pub angles: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeShape {
    Disk,
    Ellipse,
    Segment,
}

/// A closed ellipse (possibly a disk or a segment) in the plane.
///
/// `rho` is the sum of the semi-axes once the foci are scaled to `±1`; it
/// is infinite for a disk and 1 for a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseGeometry {
    pub center: C64,
    /// Angle of the major axis, in `(−π/2, π/2]`.
    pub rotation: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub eccentricity: f64,
    pub rho: f64,
    pub shape: RangeShape,
}

fn wrap_half_turn(theta: f64) -> f64 {
    let mut t = theta % PI;
    if t <= -PI / 2.0 {
        t += PI;
    } else if t > PI / 2.0 {
        t -= PI;
    }
    t
}

impl EllipseGeometry {
    /// Builds and classifies an ellipse from its axes. The larger of the two
    /// lengths is taken as the major axis.
    pub fn from_axes(center: C64, rotation: f64, axis_1: f64, axis_2: f64) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite() && rotation.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(axis_1.is_finite() && axis_2.is_finite()) || axis_1 < 0.0 || axis_2 < 0.0 {
            return Err(Error::InvalidInput(
                "ellipse axes must be finite and non-negative",
            ));
        }
        let (a, b, rotation) = if axis_1 >= axis_2 {
            (axis_1, axis_2, rotation)
        } else {
            (axis_2, axis_1, rotation + PI / 2.0)
        };
        if a == 0.0 {
            return Err(Error::DegenerateGeometry(
                "numerical range is a single point",
            ));
        }
        let gap = (a - b) / a;
        let (shape, b) = if gap < DISK_TOL {
            (RangeShape::Disk, a)
        } else if b <= SEGMENT_TOL * a {
            (RangeShape::Segment, 0.0)
        } else {
            (RangeShape::Ellipse, b)
        };
        let (eccentricity, rho, rotation) = match shape {
            RangeShape::Disk => (0.0, f64::INFINITY, 0.0),
            RangeShape::Segment => (1.0, 1.0, wrap_half_turn(rotation)),
            RangeShape::Ellipse => {
                let c = ((a - b) * (a + b)).sqrt();
                (c / a, ((a + b) / (a - b)).sqrt(), wrap_half_turn(rotation))
            }
        };
        Ok(Self {
            center,
            rotation,
            semi_major: a,
            semi_minor: b,
            eccentricity,
            rho,
            shape,
        })
    }

    /// Disk of radius `r` about `center`.
    pub fn disk(center: C64, r: f64) -> Result<Self> {
        Self::from_axes(center, 0.0, r, r)
    }

    /// Distance from the center to either focus.
    pub fn focal_distance(&self) -> f64 {
        let (a, b) = (self.semi_major, self.semi_minor);
        ((a - b) * (a + b)).sqrt()
    }

    /// The two foci, first on the positive major-axis side.
    pub fn foci(&self) -> [C64; 2] {
        let d = C64::from_polar(self.focal_distance(), self.rotation);
        [self.center + d, self.center - d]
    }

    /// `e^{−iθ}(z − c)`: coordinates with the major axis along the real line.
    pub fn to_axis_frame(&self, z: C64) -> C64 {
        (z - self.center) * C64::from_polar(1.0, -self.rotation)
    }

    /// Boundary point at parameter `s`: `c + e^{iθ}(a cos s + i b sin s)`.
    pub fn boundary_point(&self, s: f64) -> C64 {
        let local = C64::new(self.semi_major * s.cos(), self.semi_minor * s.sin());
        self.center + local * C64::from_polar(1.0, self.rotation)
    }

    /// `√((x/a)² + (y/b)²)` in the axis frame; 1 on the boundary. Infinite
    /// for points off a segment.
    pub fn level(&self, z: C64) -> f64 {
        let w = self.to_axis_frame(z);
        let x = w.re / self.semi_major;
        if self.semi_minor == 0.0 {
            return if w.im == 0.0 { x.abs() } else { f64::INFINITY };
        }
        x.hypot(w.im / self.semi_minor)
    }

    /// Whether `z` lies in the closed ellipse up to `tol` (relative to the
    /// semi-major axis) along the ray from the center.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.radial_excess(z) <= tol
    }

    /// Signed distance outside the ellipse along the ray from the center,
    /// relative to the semi-major axis.
    pub fn radial_excess(&self, z: C64) -> f64 {
        let dist = (z - self.center).norm();
        if dist == 0.0 {
            return -1.0;
        }
        let level = self.level(z);
        if !level.is_finite() {
            return f64::INFINITY;
        }
        dist * (1.0 - 1.0 / level) / self.semi_major
    }
}

/// Samples `∂W(A)` at `samples` uniformly spaced support angles.
pub fn boundary(a: &ComplexMatrix, samples: usize) -> Result<BoundaryCurve> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(
            "boundary sweep needs at least 8 samples",
        ));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let adj = a.adjoint();
    let mut points = Vec::with_capacity(samples);
    let mut angles = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = 2.0 * PI * j as f64 / samples as f64;
        let rot = C64::from_polar(0.5, theta);
        let h = &a.scale(rot) + &adj.scale(rot.conj());
        let eig = eigh(&h)?;
        let q = eig.vectors.column(0);
        points.push(inner(&q, &a.mul_vec(&q)));
        angles.push(theta);
    }
    Ok(BoundaryCurve { points, angles })
}

/// Max radial residual of `points` against `g`, relative to the semi-major
/// axis.
pub fn fit_residual(g: &EllipseGeometry, points: &[C64]) -> f64 {
    points
        .iter()
        .map(|&p| g.radial_excess(p).abs())
        .fold(0.0, f64::max)
}

/// Least-squares conic through the boundary samples, classified as disk,
/// ellipse or segment.
pub fn fit_conic(curve: &BoundaryCurve) -> Result<EllipseGeometry> {
    let pts = &curve.points;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidInput(
            "conic fit needs at least 32 boundary points",
        ));
    }
    if pts.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let n = pts.len() as f64;
    let mean: C64 = pts.iter().sum::<C64>() / n;
    let scale = pts.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max);
    if scale <= 1e-14 * mean.norm().max(1.0) {
        return Err(Error::DegenerateGeometry(
            "numerical range is a single point",
        ));
    }
    let local: Vec<C64> = pts.iter().map(|p| (p - mean) / scale).collect();

    // covariance of the samples; a vanishing minor direction is a segment
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &local {
        sxx += p.re * p.re;
        sxy += p.re * p.im;
        syy += p.im * p.im;
    }
    let half_tr = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if l2 <= (SEGMENT_TOL * SEGMENT_TOL) * l1 {
        return fit_segment(pts, mean, 0.5 * (2.0 * sxy).atan2(sxx - syy));
    }

    let mut cols: Vec<Vec<C64>> = (0..6).map(|_| Vec::with_capacity(pts.len())).collect();
    for p in &local {
        let (x, y) = (p.re, p.im);
        for (c, v) in cols.iter_mut().zip([x * x, x * y, y * y, x, y, 1.0]) {
            c.push(C64::new(v, 0.0));
        }
    }
    let v = matcore::one_sided_jacobi(&mut cols)?;
    let smallest = (0..6)
        .min_by(|&i, &j| {
            let ni = matcore::vec_norm(&cols[i]);
            let nj = matcore::vec_norm(&cols[j]);
            ni.partial_cmp(&nj).unwrap_or(core::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let coef: Vec<f64> = (0..6).map(|i| v[smallest][i].re).collect();
    let (ca, cb, cc, cd, ce, cf) = (coef[0], coef[1], coef[2], coef[3], coef[4], coef[5]);
    let det = 4.0 * ca * cc - cb * cb;
    if !(det > 0.0) {
        return Err(Error::NotAnEllipse {
            residual: f64::INFINITY,
        });
    }
    let x0 = (cb * ce - 2.0 * cc * cd) / det;
    let y0 = (cb * cd - 2.0 * ca * ce) / det;
    let f0 = ca * x0 * x0 + cb * x0 * y0 + cc * y0 * y0 + cd * x0 + ce * y0 + cf;
    // eigenvalues of [[A, B/2], [B/2, C]]
    let mid = 0.5 * (ca + cc);
    let rad = (0.25 * (ca - cc).powi(2) + 0.25 * cb * cb).sqrt();
    let (m1, m2) = (mid - rad, mid + rad);
    let (m_small, m_large) = if m1.abs() <= m2.abs() {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let ax_major = (-f0 / m_small).sqrt();
    let ax_minor = (-f0 / m_large).sqrt();
    if !(ax_major.is_finite() && ax_minor.is_finite()) {
        return Err(Error::NotAnEllipse {
            residual: f64::INFINITY,
        });
    }
    // major axis is the eigenvector of the smaller-magnitude eigenvalue
    let rotation = if rad <= 1e-14 * mid.abs() {
        0.0
    } else {
        // two forms of the same eigenvector; take the better conditioned
        let (u1, u2) = ((0.5 * cb, m_small - ca), (m_small - cc, 0.5 * cb));
        let (x, y) = if u1.0.hypot(u1.1) >= u2.0.hypot(u2.1) {
            u1
        } else {
            u2
        };
        y.atan2(x)
    };
    let center = mean + C64::new(x0, y0) * scale;
    let g = EllipseGeometry::from_axes(center, rotation, ax_major * scale, ax_minor * scale)?;
    let residual = fit_residual(&g, pts);
    if !(residual <= FIT_REJECT) {
        return Err(Error::NotAnEllipse { residual });
    }
    Ok(g)
}

fn fit_segment(pts: &[C64], mean: C64, angle: f64) -> Result<EllipseGeometry> {
    let dir = C64::from_polar(1.0, angle);
    let proj = |p: &C64| ((p - mean) * dir.conj()).re;
    let lo = pts.iter().map(proj).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(proj).fold(f64::NEG_INFINITY, f64::max);
    let center = mean + dir * (0.5 * (lo + hi));
    EllipseGeometry::from_axes(center, angle, 0.5 * (hi - lo), 0.0)
}

/// Nome `q = ρ⁻⁴ = ((a − b)/(a + b))²` of a proper ellipse.
pub fn nome_for_ellipse(g: &EllipseGeometry) -> Result<f64> {
    match g.shape {
        RangeShape::Ellipse => {
            let (a, b) = (g.semi_major, g.semi_minor);
            Ok(((a - b) / (a + b)).powi(2))
        }
        RangeShape::Disk => Err(Error::DegenerateGeometry("a disk has no elliptic nome")),
        RangeShape::Segment => Err(Error::DegenerateGeometry("a segment has no elliptic nome")),
    }
}

/// Record of the transform taking a 2×2 matrix to `[[0, a], [d, 0]]`:
/// `A = shift·I + e^{iθ} W C W*`, with `C` the canonical form (transposed
/// first when `transposed` is set).
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization2x2 {
    pub shift: C64,
    pub rotation: f64,
    pub unitary: ComplexMatrix,
    pub transposed: bool,
}

impl Normalization2x2 {
    /// Maps a canonical-frame matrix back to the original frame.
    pub fn restore(&self, canonical: &ComplexMatrix) -> ComplexMatrix {
        let c = if self.transposed {
            canonical.transpose()
        } else {
            canonical.clone()
        };
        let w = &self.unitary;
        (&(w * &c) * &w.adjoint())
            .scale(C64::from_polar(1.0, self.rotation))
            .shift(self.shift)
    }

    /// Numerical range of `A` from the canonical entries `a ≥ d ≥ 0`.
    pub fn geometry(&self, a: f64, d: f64) -> Result<EllipseGeometry> {
        EllipseGeometry::from_axes(self.shift, self.rotation, 0.5 * (a + d), 0.5 * (a - d))
    }
}

/// Canonical 2×2 form with its transform record and the entries `(a, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Canonical2x2 {
    pub transform: Normalization2x2,
    pub matrix: ComplexMatrix,
    pub a: f64,
    pub d: f64,
}

/// Unitary similarity, rotation and translation of a 2×2 matrix to
/// `[[0, a], [d, 0]]` with `a ≥ d ≥ 0`.
pub fn normalize_2x2(m: &ComplexMatrix) -> Result<Canonical2x2> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let shift = m.trace() * 0.5;
    let a0 = m.shift(-shift);
    if a0.max_abs() <= 1e-14 * m.max_abs().max(1.0) {
        return Err(Error::TrivialMatrix);
    }
    let one = C64::new(1.0, 0.0);
    let u = if a0[(0, 0)].norm() <= 1e-15 * a0.max_abs() {
        ComplexMatrix::identity(2)
    } else {
        // u = (e₊ + e^{iχ} e₋)/√2 has u*A₀u = 0 for eigenvectors e± of the
        // Hermitian part
        let h = &a0 + &a0.adjoint();
        let eig = eigh(&h)?;
        let ep = eig.vectors.column(0);
        let em = eig.vectors.column(1);
        let alpha = inner(&ep, &a0.mul_vec(&em));
        let beta = inner(&em, &a0.mul_vec(&ep));
        let chi = if alpha.norm() > 0.0 {
            0.5 * ((-beta).arg() - alpha.arg())
        } else {
            0.0
        };
        let ph = C64::from_polar(1.0, chi);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let c1: Vec<C64> = ep.iter().zip(&em).map(|(x, y)| (x + ph * y) * s).collect();
        let c2: Vec<C64> = ep.iter().zip(&em).map(|(x, y)| (x - ph * y) * s).collect();
        let mut u = ComplexMatrix::zeros(2);
        u.set_column(0, &c1);
        u.set_column(1, &c2);
        u
    };
    let b = &(&u.adjoint() * &a0) * &u;
    let (x, y) = (b[(0, 1)], b[(1, 0)]);
    let psi = if x.norm() > 0.0 && y.norm() > 0.0 {
        0.5 * (y.arg() - x.arg())
    } else {
        0.0
    };
    let mu = if x.norm() == 0.0 {
        y.arg()
    } else if y.norm() == 0.0 {
        x.arg()
    } else {
        0.5 * (x.arg() + y.arg())
    };
    let w = &u * &ComplexMatrix::diag(&[one, C64::from_polar(1.0, psi)]);
    let (mut ea, mut ed) = (x.norm(), y.norm());
    let transposed = ea < ed;
    if transposed {
        core::mem::swap(&mut ea, &mut ed);
    }
    let matrix = ComplexMatrix::from_real_rows(&[&[0.0, ea], &[ed, 0.0]]);
    Ok(Canonical2x2 {
        transform: Normalization2x2 {
            shift,
            rotation: mu,
            unitary: w,
            transposed,
        },
        matrix,
        a: ea,
        d: ed,
    })
}
