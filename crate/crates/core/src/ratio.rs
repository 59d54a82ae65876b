//! Crouzeix ratio of a general matrix: classification of `W(A)`, the
//! conformal map, and the Blaschke search.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cases::{self, Family};
use crate::conformal::{build_map, ConformalMap};
use crate::extremal::{maximize, ExtremalResult, SearchConfig};
use crate::matcore::{norm2, ComplexMatrix};
use crate::numrange::{
    boundary, fit_conic, normalize_2x2, EllipseGeometry, RangeShape, DEFAULT_SAMPLES,
};
use crate::{Error, Result};

/// Relative departure from normality (`‖AA* − A*A‖ / ‖A‖²`) below which a
/// matrix is treated as normal.
pub const NORMAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub ratio: f64,
    pub normal: bool,
    /// `W(A)`; absent for normal matrices.
    pub geometry: Option<EllipseGeometry>,
    pub map: Option<ConformalMap>,
    /// `φ(A)` (for 2×2 input, of the canonical form).
    pub mapped: Option<ComplexMatrix>,
    pub extremal: Option<ExtremalResult>,
    /// Family membership with its closed-form ratio.
    pub family: Option<(Family, f64, f64)>,
}

fn departure_from_normality(a: &ComplexMatrix) -> f64 {
    let adj = a.adjoint();
    let scale = a.frobenius_norm().powi(2);
    if scale == 0.0 {
        return 0.0;
    }
    (&(a * &adj) - &(&adj * a)).frobenius_norm() / scale
}

/// `sup ‖f(A)‖₂ / max_{W(A)} |f|` for `A` whose numerical range is a disk
/// or an ellipse, searching degrees up to `max_degree` (default `n − 1`).
pub fn crouzeix_ratio(
    a: &ComplexMatrix,
    max_degree: Option<usize>,
    cfg: &SearchConfig,
) -> Result<RatioReport> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let family = cases::recognize(a)
        .and_then(|(f, p)| cases::member(f, p).ok().map(|s| (f, p, s.predicted_norm)));
    if n == 1 || departure_from_normality(a) <= NORMAL_TOL {
        return Ok(RatioReport {
            ratio: 1.0,
            normal: true,
            geometry: None,
            map: None,
            mapped: None,
            extremal: None,
            family,
        });
    }
    let max_degree = max_degree.unwrap_or(n - 1);
    if max_degree >= n {
        return Err(Error::InvalidInput(
            "maximum degree must be below the matrix dimension",
        ));
    }
    let (geometry, work) = if n == 2 {
        // the ratio is invariant under the normalizing transforms
        let c = normalize_2x2(a)?;
        let g = EllipseGeometry::from_axes(
            C64::new(0.0, 0.0),
            0.0,
            0.5 * (c.a + c.d),
            0.5 * (c.a - c.d),
        )?;
        (g, c.matrix)
    } else {
        (fit_conic(&boundary(a, DEFAULT_SAMPLES)?)?, a.clone())
    };
    if geometry.shape == RangeShape::Segment {
        return Err(Error::NotSupported(
            "numerical range is a segment but the matrix is not normal",
        ));
    }
    let map = build_map(&geometry)?;
    let mapped = map.apply_matrix(&work)?;
    let extremal = maximize(&mapped, max_degree, cfg)?;
    Ok(RatioReport {
        ratio: extremal.ratio,
        normal: false,
        geometry: Some(geometry),
        map: Some(map),
        mapped: Some(mapped),
        extremal: Some(extremal),
        family,
    })
}

/// `p(A)` by Horner's rule, coefficients in increasing degree.
pub fn poly_matrix(coeffs: &[C64], a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut acc = ComplexMatrix::zeros(n);
    for &c in coeffs.iter().rev() {
        acc = (&acc * a).shift(c);
    }
    acc
}

fn poly_scalar(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `‖p(A)‖₂ / max |p|` over the polygon through the boundary samples of
/// `W(A)`, each edge subdivided `refine` times. The polygon lies inside
/// `W(A)`, so the result is at least the true ratio for this `p`.
pub fn polynomial_ratio(
    a: &ComplexMatrix,
    coeffs: &[C64],
    samples: usize,
    refine: usize,
) -> Result<f64> {
    let curve = boundary(a, samples)?;
    let pts = &curve.points;
    let mut peak: f64 = 0.0;
    for i in 0..pts.len() {
        let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
        for s in 0..refine.max(1) {
            let z = p + (q - p) * (s as f64 / refine.max(1) as f64);
            peak = peak.max(poly_scalar(coeffs, z).norm());
        }
    }
    let num = norm2(&poly_matrix(coeffs, a))?;
    if peak == 0.0 {
        return if num == 0.0 {
            Ok(1.0)
        } else {
            Ok(f64::INFINITY)
        };
    }
    Ok(num / peak)
}

/// `Some(1)` when `A` is normal, skipping geometry and search.
pub fn trivial_ratio(a: &ComplexMatrix) -> Option<f64> {
    (departure_from_normality(a) <= NORMAL_TOL).then_some(1.0)
}

/// Eigenvalues of `A` mapped through `φ`, for reporting.
pub fn mapped_spectrum(map: &ConformalMap, a: &ComplexMatrix) -> Result<Vec<C64>> {
    crate::matcore::eig_general(a)?
        .values
        .into_iter()
        .map(|z| map.apply_scalar(z))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jordan3_ratio() {
        let r = crouzeix_ratio(&ComplexMatrix::jordan(3), None, &SearchConfig::default()).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-10);
        assert_eq!(r.geometry.unwrap().shape, RangeShape::Disk);
        assert_eq!(r.family.unwrap().0, Family::Jordan);
    }

    #[test]
    fn normal_is_one() {
        let r = crouzeix_ratio(
            &ComplexMatrix::real_diag(&[1.0, 2.0]),
            None,
            &SearchConfig::default(),
        )
        .unwrap();
        assert!(r.normal && r.ratio == 1.0);
    }

    #[test]
    fn general_2x2_matches_canonical() {
        let m =
            ComplexMatrix::from_rows(&[&[c(0.3, -1.2), c(0.7, 0.4)], &[c(-2.0, 0.1), c(1.1, 0.9)]]);
        let r = crouzeix_ratio(&m, None, &SearchConfig::default()).unwrap();
        let canon = normalize_2x2(&m).unwrap();
        // canonical [[0, a], [d, 0]] has ratio √(k/b) with b the foci-scaled
        // axis ratio, i.e. ‖mapped‖ for B(z) = z
        let mapped = r.mapped.as_ref().unwrap();
        assert!((r.ratio - norm2(mapped).unwrap()).abs() < 1e-9);
        assert!(r.ratio > 1.0 && r.ratio <= 2.0);
        assert!(canon.a > canon.d);
    }

    #[test]
    fn triangle_range_unsupported() {
        let m = ComplexMatrix::from_rows(&[
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ]);
        let err = crouzeix_ratio(&m, None, &SearchConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotAnEllipse { .. }), "{err:?}");
    }

    #[test]
    fn polynomial_ratio_of_jordan() {
        // p(z) = z on J₂: ‖J₂‖ / max_{|z| ≤ 1/2} |z| = 2
        let r = polynomial_ratio(
            &ComplexMatrix::jordan(2),
            &[c(0.0, 0.0), c(1.0, 0.0)],
            256,
            4,
        )
        .unwrap();
        assert!((r - 2.0).abs() < 1e-3 && r >= 2.0 - 1e-12);
    }
}
