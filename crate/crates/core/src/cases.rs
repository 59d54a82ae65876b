//! The four structured families with closed-form extremal values: the
//! canonical 2×2 pair, Jordan blocks, a 3×3 tridiagonal family with
//! elliptic numerical range, and a 3×3 nilpotent family whose extremal
//! product is not unique at one parameter.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::blaschke::BlaschkeProduct;
use crate::conformal::{build_map, ConformalMap};
use crate::elliptic::modulus_from_nome;
use crate::extremal::{dcd_bound, maximize, ExtremalResult, SearchConfig};
use crate::matcore::ComplexMatrix;
use crate::numrange::{boundary, fit_conic, nome_for_ellipse, EllipseGeometry, DEFAULT_SAMPLES};
use crate::{Error, Result};

/// Largest Jordan block handled by [`jordan`].
pub const MAX_JORDAN: usize = 8;
/// Offset used in place of a removable-singularity endpoint of a grid.
pub const GRID_OFFSET: f64 = 1e-3;
/// Tolerance for recognizing a family member from matrix entries.
const RECOGNIZE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    TwoByTwo,
    Jordan,
    Elliptic3,
    Nonunique,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::TwoByTwo,
        Family::Jordan,
        Family::Elliptic3,
        Family::Nonunique,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TwoByTwo => "two_by_two",
            Family::Jordan => "jordan",
            Family::Elliptic3 => "elliptic3",
            Family::Nonunique => "nonunique",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// A family member with its closed-form predictions, before any search.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub family: Family,
    pub parameter: f64,
    pub matrix: ComplexMatrix,
    /// `φ(A)`; absent for a normal member, whose ratio is 1.
    pub mapped: Option<ComplexMatrix>,
    pub predicted_norm: f64,
    pub predicted_zeros: Vec<C64>,
    /// A second extremal zero set predicted at a crossover.
    pub co_extremal_zeros: Option<Vec<C64>>,
    /// `(D, C)` with `φ(A) = D C D⁻¹`, `‖C‖₂ ≤ 1`.
    pub decomposition: Option<(ComplexMatrix, ComplexMatrix)>,
    pub map: Option<ConformalMap>,
    /// Modulus of the Szegő map where one is used.
    pub modulus: Option<f64>,
}

impl FamilyMember {
    pub fn max_degree(&self) -> usize {
        self.matrix.dim() - 1
    }
}

/// Side checks run alongside a case.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CaseChecks {
    /// `max |φ(A) − closed form|` with `φ(A)` from spectral evaluation.
    pub map_residual: Option<f64>,
    /// `κ(D)` of the closed-form decomposition.
    pub dcd_bound: Option<f64>,
    /// `|k_fit − k|` with `k_fit` from the boundary-sweep geometry.
    pub modulus_cross_check: Option<f64>,
    /// Entrywise distance of `B̂(T)` from its closed form.
    pub b_hat_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub member: FamilyMember,
    /// `None` for normal members.
    pub attained: Option<ExtremalResult>,
    pub ratio: f64,
    pub checks: CaseChecks,
}

impl CaseResult {
    pub fn relative_error(&self) -> f64 {
        (self.ratio - self.member.predicted_norm).abs() / self.member.predicted_norm
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_unit_interval(b: f64, what: &'static str) -> Result<()> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::Domain { what, value: b });
    }
    Ok(())
}

fn normal_member(family: Family, parameter: f64, matrix: ComplexMatrix) -> FamilyMember {
    FamilyMember {
        family,
        parameter,
        matrix,
        mapped: None,
        predicted_norm: 1.0,
        predicted_zeros: Vec::new(),
        co_extremal_zeros: None,
        decomposition: None,
        map: None,
        modulus: None,
    }
}

/// `[[0, √(k/b)], [√(kb), 0]]` with `k = k(b²)`; `φ(A) = A`.
pub fn two_by_two_member(b: f64) -> Result<FamilyMember> {
    check_unit_interval(b, "two_by_two parameter")?;
    if b == 1.0 {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        return Ok(normal_member(Family::TwoByTwo, b, m));
    }
    let k = modulus_from_nome(b * b)?.k;
    let (x, y) = ((k / b).sqrt(), (k * b).sqrt());
    let matrix = ComplexMatrix::from_real_rows(&[&[0.0, x], &[y, 0.0]]);
    let geometry = EllipseGeometry::from_axes(zero(), 0.0, 0.5 * (x + y), 0.5 * (x - y))?;
    let d = ComplexMatrix::real_diag(&[1.0, (b / k).sqrt()]);
    let c = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[k, 0.0]]);
    Ok(FamilyMember {
        family: Family::TwoByTwo,
        parameter: b,
        mapped: Some(matrix.clone()),
        matrix,
        predicted_norm: (k / b).sqrt(),
        predicted_zeros: vec![zero()],
        co_extremal_zeros: None,
        decomposition: Some((d, c)),
        map: Some(build_map(&geometry)?),
        modulus: Some(k),
    })
}

/// Nilpotent Jordan block `J_n`; `W(J_n)` is the disk of radius
/// `cos(π/(n+1))`.
pub fn jordan_member(n: usize) -> Result<FamilyMember> {
    if !(2..=MAX_JORDAN).contains(&n) {
        return Err(Error::Domain {
            what: "Jordan block size",
            value: n as f64,
        });
    }
    let radius = (PI / (n as f64 + 1.0)).cos();
    let c = 1.0 / radius;
    let j = ComplexMatrix::jordan(n);
    let d = ComplexMatrix::real_diag(&(0..n).map(|i| c.powi(-(i as i32))).collect::<Vec<_>>());
    Ok(FamilyMember {
        family: Family::Jordan,
        parameter: n as f64,
        mapped: Some(j.scale_real(c)),
        predicted_norm: c.powi(n as i32 - 1),
        predicted_zeros: vec![zero(); n - 1],
        co_extremal_zeros: None,
        decomposition: Some((d, j.clone())),
        map: Some(ConformalMap::centered_disk(radius)?),
        modulus: None,
        matrix: j,
    })
}

/// `T` of the 3×3 family: the contraction with `φ(A) = D T D⁻¹`, which
/// depends on the modulus only.
pub fn t_matrix(k: f64) -> ComplexMatrix {
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    t_matrix_with(k, kp)
}

fn t_matrix_with(k: f64, kp: f64) -> ComplexMatrix {
    let x = (0.5 * (1.0 + kp)).sqrt();
    let y = k / (2.0 * (1.0 + kp)).sqrt();
    ComplexMatrix::from_real_rows(&[&[0.0, x, 0.0], &[y, 0.0, x], &[0.0, y, 0.0]])
}

/// Closed form of `B̂(T)` for `B̂(z) = (z² − α²)/(1 − α² z²)`.
pub fn b_hat_t(k: f64) -> ComplexMatrix {
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 1.0],
        &[0.0, k / (1.0 + kp), 0.0],
        &[(1.0 - kp) / (1.0 + kp), 0.0, 0.0],
    ])
}

/// `α = √(k/(1 + k′))`, the positive extremal zero of the 3×3 family.
pub fn elliptic3_alpha(k: f64, kp: f64) -> f64 {
    (k / (1.0 + kp)).sqrt()
}

/// `(1/√(2b))·[[0, 1, 0], [b, 0, 1], [0, b, 0]]`; eigenvalues `0, ±1`
/// at the foci of `W(A)`, `φ(A) = √k·A` with `k = k(b²)`.
pub fn elliptic3_member(b: f64) -> Result<FamilyMember> {
    check_unit_interval(b, "elliptic3 parameter")?;
    let s = 1.0 / (2.0 * b).sqrt();
    let matrix =
        ComplexMatrix::from_real_rows(&[&[0.0, s, 0.0], &[b * s, 0.0, s], &[0.0, b * s, 0.0]]);
    if b == 1.0 {
        return Ok(normal_member(Family::Elliptic3, b, matrix));
    }
    let p = modulus_from_nome(b * b)?;
    let (k, kp) = (p.k, p.k_complement);
    let t = b * (1.0 + kp) / k;
    if !(t > 0.5 && t <= 1.0 + 1e-12) {
        return Err(Error::Domain {
            what: "elliptic3 t outside (1/2, 1]",
            value: t,
        });
    }
    let alpha = elliptic3_alpha(k, kp);
    let rb = b.sqrt();
    let geometry =
        EllipseGeometry::from_axes(zero(), 0.0, (1.0 + b) / (2.0 * rb), (1.0 - b) / (2.0 * rb))?;
    let d = ComplexMatrix::real_diag(&[1.0, t.sqrt(), t]);
    Ok(FamilyMember {
        family: Family::Elliptic3,
        parameter: b,
        mapped: Some(matrix.scale_real(k.sqrt())),
        matrix,
        predicted_norm: 1.0 / t,
        predicted_zeros: vec![C64::new(alpha, 0.0), C64::new(-alpha, 0.0)],
        co_extremal_zeros: None,
        decomposition: Some((d, t_matrix_with(k, kp))),
        map: Some(build_map(&geometry)?),
        modulus: Some(k),
    })
}

/// Crossover `t₀ = 1 − 1/√3` of the nonunique family.
pub fn nonunique_crossover() -> f64 {
    1.0 - 1.0 / 3f64.sqrt()
}

/// Upper end `√3 − 1` of the nonunique family's parameter range.
pub fn nonunique_t_max() -> f64 {
    3f64.sqrt() - 1.0
}

/// Radius `√(1 + (1−t)²)/2` of the disk `W(A)` in the nonunique family.
pub fn nonunique_radius(t: f64) -> f64 {
    (1.0 + (1.0 - t) * (1.0 - t)).sqrt() / 2.0
}

/// Norms of `B(φ(A))` for `B = z` and `B = z²` in the nonunique family.
pub fn nonunique_branches(t: f64) -> (f64, f64) {
    let r = nonunique_radius(t);
    (1.0 / r, (1.0 - t) / (r * r))
}

/// `[[0, 1, 0], [0, 0, 1−t], [0, 0, 0]]` for `t ∈ [0, √3 − 1]`.
pub fn nonunique_member(t: f64) -> Result<FamilyMember> {
    if !(t >= 0.0 && t <= nonunique_t_max() + 1e-12) {
        return Err(Error::Domain {
            what: "nonunique parameter",
            value: t,
        });
    }
    let r = nonunique_radius(t);
    let matrix =
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0 - t], &[0.0, 0.0, 0.0]]);
    let (v1, v2) = nonunique_branches(t);
    let linear = vec![zero()];
    let square = vec![zero(); 2];
    let tie = (v1 - v2).abs() <= 1e-12 * v1;
    let (predicted_zeros, co_extremal_zeros) = if tie {
        (square, Some(linear))
    } else if v1 > v2 {
        (linear, None)
    } else {
        (square, None)
    };
    let d = ComplexMatrix::real_diag(&[1.0, r, r * r / (1.0 - t)]);
    Ok(FamilyMember {
        family: Family::Nonunique,
        parameter: t,
        mapped: Some(matrix.scale_real(1.0 / r)),
        matrix,
        predicted_norm: v1.max(v2),
        predicted_zeros,
        co_extremal_zeros,
        decomposition: Some((d, ComplexMatrix::jordan(3))),
        map: Some(ConformalMap::centered_disk(r)?),
        modulus: None,
    })
}

pub fn member(family: Family, parameter: f64) -> Result<FamilyMember> {
    match family {
        Family::TwoByTwo => two_by_two_member(parameter),
        Family::Jordan => {
            if parameter.fract() != 0.0 || parameter < 0.0 {
                return Err(Error::Domain {
                    what: "Jordan block size",
                    value: parameter,
                });
            }
            jordan_member(parameter as usize)
        }
        Family::Elliptic3 => elliptic3_member(parameter),
        Family::Nonunique => nonunique_member(parameter),
    }
}

/// Closed-form side checks that do not need the search.
pub fn side_checks(member: &FamilyMember) -> Result<CaseChecks> {
    let mut checks = CaseChecks::default();
    let (Some(mapped), Some(map)) = (&member.mapped, &member.map) else {
        return Ok(checks);
    };
    // spectral evaluation breaks down once the eigenvalues reach the
    // boundary in floating point
    match map.apply_matrix(&member.matrix) {
        Ok(m) => checks.map_residual = Some(m.max_abs_diff(mapped)),
        Err(Error::Domain { .. }) | Err(Error::PoleProximity { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some((d, c)) = &member.decomposition {
        checks.dcd_bound = Some(dcd_bound(mapped, d, c)?);
    }
    if member.family == Family::Elliptic3 {
        if let Some(k) = member.modulus {
            if k < 1.0 {
                let a = member.predicted_zeros[0];
                let b_hat = BlaschkeProduct::new(vec![a, -a], 0.0)?;
                let (_, t) = member
                    .decomposition
                    .as_ref()
                    .ok_or(Error::InvalidInput("missing T"))?;
                let got = b_hat.eval_matrix_unchecked(t)?;
                checks.b_hat_residual = Some(got.max_abs_diff(&b_hat_t(k)));
            }
            let g = fit_conic(&boundary(&member.matrix, DEFAULT_SAMPLES)?)?;
            if let Ok(q) = nome_for_ellipse(&g) {
                if let Ok(p) = modulus_from_nome(q) {
                    checks.modulus_cross_check = Some((p.k - k).abs());
                }
            }
        }
    }
    Ok(checks)
}

/// Runs the search on a prepared case.
pub fn run(member: FamilyMember, cfg: &SearchConfig) -> Result<CaseResult> {
    let checks = side_checks(&member)?;
    let Some(mapped) = &member.mapped else {
        return Ok(CaseResult {
            member,
            attained: None,
            ratio: 1.0,
            checks,
        });
    };
    let attained = maximize(mapped, member.max_degree(), cfg)?;
    Ok(CaseResult {
        ratio: attained.ratio,
        attained: Some(attained),
        member,
        checks,
    })
}

pub fn two_by_two(b: f64, cfg: &SearchConfig) -> Result<CaseResult> {
    run(two_by_two_member(b)?, cfg)
}

pub fn jordan(n: usize, cfg: &SearchConfig) -> Result<CaseResult> {
    run(jordan_member(n)?, cfg)
}

pub fn elliptic3(b: f64, cfg: &SearchConfig) -> Result<CaseResult> {
    run(elliptic3_member(b)?, cfg)
}

pub fn nonunique(t: f64, cfg: &SearchConfig) -> Result<CaseResult> {
    run(nonunique_member(t)?, cfg)
}

/// `points` uniformly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Default parameter grid of a family. Jordan sizes run from 2 upwards
/// and stop at [`MAX_JORDAN`].
pub fn default_grid(family: Family, points: usize) -> Vec<f64> {
    match family {
        Family::TwoByTwo | Family::Elliptic3 => linspace(GRID_OFFSET, 1.0, points),
        Family::Jordan => (2..(2 + points).min(MAX_JORDAN + 1))
            .map(|n| n as f64)
            .collect(),
        Family::Nonunique => linspace(0.0, nonunique_t_max(), points),
    }
}

fn close(a: C64, b: f64) -> bool {
    (a - C64::new(b, 0.0)).norm() <= RECOGNIZE_TOL * (1.0 + b.abs())
}

/// Identifies a matrix as a member of one of the families.
pub fn recognize(m: &ComplexMatrix) -> Option<(Family, f64)> {
    let n = m.dim();
    let zero_except = |allowed: &[(usize, usize)]| {
        (0..n)
            .all(|i| (0..n).all(|j| allowed.contains(&(i, j)) || m[(i, j)].norm() <= RECOGNIZE_TOL))
    };
    if (2..=MAX_JORDAN).contains(&n) && *m == ComplexMatrix::jordan(n) {
        return Some((Family::Jordan, n as f64));
    }
    if n == 2 && zero_except(&[(0, 1), (1, 0)]) {
        let (x, y) = (m[(0, 1)], m[(1, 0)]);
        if x.im.abs() <= RECOGNIZE_TOL && y.im.abs() <= RECOGNIZE_TOL && x.re > 0.0 && y.re > 0.0 {
            let b = y.re / x.re;
            if b == 1.0 && close(x, 1.0) {
                return Some((Family::TwoByTwo, 1.0));
            }
            if b > 0.0 && b < 1.0 {
                if let Ok(p) = modulus_from_nome(b * b) {
                    if close(x, (p.k / b).sqrt()) {
                        return Some((Family::TwoByTwo, b));
                    }
                }
            }
        }
    }
    if n == 3 {
        if zero_except(&[(0, 1), (1, 2)]) && close(m[(0, 1)], 1.0) {
            let t = 1.0 - m[(1, 2)].re;
            if m[(1, 2)].im.abs() <= RECOGNIZE_TOL
                && t >= -RECOGNIZE_TOL
                && t <= nonunique_t_max() + RECOGNIZE_TOL
            {
                return Some((Family::Nonunique, t.max(0.0)));
            }
        }
        if zero_except(&[(0, 1), (1, 0), (1, 2), (2, 1)]) {
            let s = m[(0, 1)].re;
            if s > 0.0 {
                let b = 1.0 / (2.0 * s * s);
                if b > 0.0
                    && b <= 1.0 + RECOGNIZE_TOL
                    && close(m[(1, 2)], s)
                    && close(m[(1, 0)], b * s)
                    && close(m[(2, 1)], b * s)
                    && m[(0, 1)].im.abs() <= RECOGNIZE_TOL
                {
                    return Some((Family::Elliptic3, b.min(1.0)));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let j2 = jordan_member(2).unwrap();
        assert!((j2.predicted_norm - 2.0).abs() < 1e-14);
        let j3 = jordan_member(3).unwrap();
        assert!((j3.predicted_norm - 2.0).abs() < 1e-14);
        assert!(jordan_member(1).is_err() && jordan_member(9).is_err());

        let s0 = nonunique_member(0.0).unwrap();
        assert!((s0.predicted_norm - 2.0).abs() < 1e-14);
        assert_eq!(s0.predicted_zeros.len(), 2);
        let tie = nonunique_member(nonunique_crossover()).unwrap();
        assert!((tie.predicted_norm - 3f64.sqrt()).abs() < 1e-14);
        assert!(tie.co_extremal_zeros.is_some());
        assert!(nonunique_member(0.8).is_err());
        assert!(two_by_two_member(0.0).is_err() && elliptic3_member(1.5).is_err());
    }

    #[test]
    fn decompositions_are_tight_bounds() {
        for s in [
            two_by_two_member(0.5).unwrap(),
            jordan_member(4).unwrap(),
            elliptic3_member(0.5).unwrap(),
            nonunique_member(0.3).unwrap(),
        ] {
            let checks = side_checks(&s).unwrap();
            let bound = checks.dcd_bound.unwrap();
            assert!(
                (bound - s.predicted_norm).abs() < 1e-12 * s.predicted_norm,
                "{:?}",
                s.family
            );
            if let Some(r) = checks.map_residual {
                assert!(r < 1e-10, "{:?} {r}", s.family);
            }
        }
    }

    #[test]
    fn elliptic3_checks() {
        let s = elliptic3_member(0.5).unwrap();
        let c = side_checks(&s).unwrap();
        assert!(c.b_hat_residual.unwrap() < 1e-12);
        assert!(c.modulus_cross_check.unwrap() < 1e-8);
        // half-nome identity: 1/t = √(k(b⁴))/b
        let k4 = modulus_from_nome(0.5f64.powi(4)).unwrap().k;
        assert!((s.predicted_norm - k4.sqrt() / 0.5).abs() < 1e-10);
    }

    #[test]
    fn normal_endpoints() {
        let r = two_by_two(1.0, &SearchConfig::default()).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.attained.is_none());
        let r = elliptic3(1.0, &SearchConfig::default()).unwrap();
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn recognizes_members() {
        assert_eq!(
            recognize(&ComplexMatrix::jordan(4)),
            Some((Family::Jordan, 4.0))
        );
        let s = nonunique_member(0.42).unwrap();
        let (f, t) = recognize(&s.matrix).unwrap();
        assert_eq!(f, Family::Nonunique);
        assert!((t - 0.42).abs() < 1e-12);
        let s = elliptic3_member(0.3).unwrap();
        let (f, b) = recognize(&s.matrix).unwrap();
        assert_eq!(f, Family::Elliptic3);
        assert!((b - 0.3).abs() < 1e-12);
        let s = two_by_two_member(0.4).unwrap();
        let (f, b) = recognize(&s.matrix).unwrap();
        assert_eq!(f, Family::TwoByTwo);
        assert!((b - 0.4).abs() < 1e-12);
        assert_eq!(recognize(&ComplexMatrix::identity(3)), None);
    }

    #[test]
    fn grids() {
        let g = default_grid(Family::TwoByTwo, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], GRID_OFFSET);
        assert_eq!(g[19], 1.0);
        assert_eq!(
            default_grid(Family::Jordan, 5),
            vec![2.0, 3.0, 4.0, 5.0, 6.0]
        );
        assert_eq!(default_grid(Family::Jordan, 20).len(), 7);
        assert!((default_grid(Family::Nonunique, 3)[2] - nonunique_t_max()).abs() < 1e-15);
    }
}
