//! Conformal maps of a disk or an ellipse onto the unit disk.
//!
//! A disk is mapped affinely. An ellipse is first moved to the frame with
//! foci at `±1`, then sent to the disk by the Szegő map
//! `w ↦ √k · sn((2K/π) asin w, k)`, whose nome is `ρ⁻⁴`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::elliptic::{jacobi_sn_params, modulus_from_nome, EllipticParams};
use crate::matcore::{eig_general, solve, ComplexMatrix};
use crate::numrange::{nome_for_ellipse, EllipseGeometry, RangeShape};
use crate::{Error, Result};

/// How far outside the region a point may lie before it is rejected,
/// relative to the semi-major axis.
pub const REGION_TOL: f64 = 1e-9;
/// Inward nudge applied to boundary points before evaluation.
const BOUNDARY_NUDGE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    DiskLinear,
    EllipseSzego,
}

/// `φ(z) = g(scale·(z − center))`, with `g` the identity for a disk and the
/// Szegő map for an ellipse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalMap {
    pub kind: MapKind,
    pub center: C64,
    /// `1/r` for a disk, `e^{−iθ}/c_f` for an ellipse with focal distance
    /// `c_f`.
    pub scale: C64,
    pub params: Option<EllipticParams>,
    pub geometry: EllipseGeometry,
}

/// Conformal map of the interior of `geometry` onto the unit disk.
pub fn build_map(geometry: &EllipseGeometry) -> Result<ConformalMap> {
    match geometry.shape {
        RangeShape::Segment => Err(Error::NotSupported(
            "a segment has no interior to map onto the disk",
        )),
        RangeShape::Disk => Ok(ConformalMap {
            kind: MapKind::DiskLinear,
            center: geometry.center,
            scale: C64::new(1.0 / geometry.semi_major, 0.0),
            params: None,
            geometry: *geometry,
        }),
        RangeShape::Ellipse => {
            let q = nome_for_ellipse(geometry)?;
            let params = modulus_from_nome(q)?;
            Ok(ConformalMap {
                kind: MapKind::EllipseSzego,
                center: geometry.center,
                scale: C64::from_polar(1.0 / geometry.focal_distance(), -geometry.rotation),
                params: Some(params),
                geometry: *geometry,
            })
        }
    }
}

impl ConformalMap {
    /// Disk of radius `r` about the origin.
    pub fn centered_disk(r: f64) -> Result<Self> {
        build_map(&EllipseGeometry::disk(C64::new(0.0, 0.0), r)?)
    }

    /// Modulus of the Szegő map, if any.
    pub fn modulus(&self) -> Option<f64> {
        self.params.map(|p| p.k)
    }

    /// `φ(z)`; points outside the region by more than [`REGION_TOL`] are
    /// rejected.
    pub fn apply_scalar(&self, z: C64) -> Result<C64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let excess = self.geometry.radial_excess(z);
        if excess > REGION_TOL {
            return Err(Error::Domain {
                what: "point outside the mapped region",
                value: excess,
            });
        }
        let mut w = (z - self.center) * self.scale;
        // clamp boundary points to just inside
        if excess > -BOUNDARY_NUDGE {
            let level = self.geometry.level(z);
            if level > 0.0 && level.is_finite() {
                w *= (1.0 - BOUNDARY_NUDGE) / level;
            }
        }
        match (self.kind, &self.params) {
            (MapKind::EllipseSzego, Some(p)) => szego(w, p),
            _ => Ok(w),
        }
    }

    /// `φ(M)` by spectral calculus for the Szegő map, exactly for a disk.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.kind == MapKind::DiskLinear {
            return Ok(m.shift(-self.center).scale(self.scale));
        }
        let eig = eig_general(m)?;
        if eig.defective {
            return Err(Error::NotSupported(
                "conformal map of a defective matrix through an ellipse",
            ));
        }
        let mapped: Vec<C64> = eig
            .values
            .iter()
            .map(|&z| self.apply_scalar(z))
            .collect::<Result<_>>()?;
        let x = &eig.vectors;
        let n = m.dim();
        let xl = ComplexMatrix::from_fn(n, |i, j| x[(i, j)] * mapped[j]);
        // X φ(Λ) X⁻¹ = (X⁻* (X φ(Λ))*)*
        let rhs = xl.adjoint();
        Ok(solve(&x.adjoint(), &rhs)?.adjoint())
    }
}

fn szego(w: C64, p: &EllipticParams) -> Result<C64> {
    let u = w.asin() * (2.0 * p.big_k / PI);
    Ok(jacobi_sn_params(u, p)? * p.k.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn canonical_pair(b: f64) -> (ComplexMatrix, f64, EllipseGeometry) {
        let k = modulus_from_nome(b * b).unwrap().k;
        let (x, y) = ((k / b).sqrt(), (k * b).sqrt());
        let a = ComplexMatrix::from_real_rows(&[&[0.0, x], &[y, 0.0]]);
        let g = EllipseGeometry::from_axes(c(0.0, 0.0), 0.0, 0.5 * (x + y), 0.5 * (x - y)).unwrap();
        (a, k, g)
    }

    #[test]
    fn disk_map_is_linear() {
        let map = ConformalMap::centered_disk(FRAC_1_SQRT_2).unwrap();
        let z = c(0.3, -0.2);
        assert!((map.apply_scalar(z).unwrap() - z * SQRT_2).norm() < 1e-15);
        let j = ComplexMatrix::jordan(3);
        let phi = map.apply_matrix(&j).unwrap();
        assert!(phi.max_abs_diff(&j.scale_real(SQRT_2)) < 1e-15);
        assert_eq!(map.apply_scalar(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn eigenvalues_of_pair_are_fixed() {
        let (a, k, g) = canonical_pair(0.5);
        let map = build_map(&g).unwrap();
        assert!((map.modulus().unwrap() - k).abs() < 1e-15);
        for s in [1.0, -1.0] {
            let z = c(s * k.sqrt(), 0.0);
            assert!((map.apply_scalar(z).unwrap() - z).norm() < 1e-12);
        }
        assert!(map.apply_scalar(c(0.0, 0.0)).unwrap().norm() < 1e-16);
        let phi = map.apply_matrix(&a).unwrap();
        assert!(phi.max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn focus_maps_to_root_modulus() {
        let g = EllipseGeometry::from_axes(c(0.0, 0.0), 0.0, 1.25, 0.75).unwrap();
        let map = build_map(&g).unwrap();
        let k = map.modulus().unwrap();
        let z = map.apply_scalar(c(1.0, 0.0)).unwrap();
        assert!((z - c(k.sqrt(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn boundary_goes_to_unit_circle_monotonically() {
        let (_, _, g) = canonical_pair(0.5);
        let map = build_map(&g).unwrap();
        let mut last = -PI;
        for j in 0..64 {
            let s = -PI + 2.0 * PI * (j as f64 + 0.5) / 64.0;
            let w = map.apply_scalar(g.boundary_point(s)).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-9, "{j}: {}", w.norm());
            assert!(w.arg() > last);
            last = w.arg();
        }
    }

    #[test]
    fn vertices_on_branch_cut() {
        let (_, _, g) = canonical_pair(0.2);
        let map = build_map(&g).unwrap();
        for z in [
            c(g.semi_major, 0.0),
            c(-g.semi_major, 0.0),
            c(0.0, g.semi_minor),
        ] {
            assert!((map.apply_scalar(z).unwrap().norm() - 1.0).abs() < 1e-9);
        }
        // interior of the real axis beyond the foci
        let x = 0.5 * (g.focal_distance() + g.semi_major);
        let w = map.apply_scalar(c(x, 0.0)).unwrap();
        assert!(w.im.abs() < 1e-14 && w.re > 0.0 && w.re < 1.0);
    }

    #[test]
    fn ellipse_map_is_odd() {
        let g = EllipseGeometry::from_axes(c(0.0, 0.0), 0.0, 1.0, 0.4).unwrap();
        let map = build_map(&g).unwrap();
        for z in [c(0.3, 0.1), c(-0.7, 0.2), c(0.05, -0.35)] {
            let p = map.apply_scalar(z).unwrap();
            let m = map.apply_scalar(-z).unwrap();
            assert!((p + m).norm() < 1e-11);
            assert!(p.norm() < 1.0);
        }
    }

    #[test]
    fn three_by_three_family_maps_to_multiple() {
        let b: f64 = 0.5;
        let s = 1.0 / (2.0 * b).sqrt();
        let a =
            ComplexMatrix::from_real_rows(&[&[0.0, s, 0.0], &[b * s, 0.0, s], &[0.0, b * s, 0.0]]);
        // foci ±1 and ρ = 1/√b
        let g = EllipseGeometry::from_axes(
            c(0.0, 0.0),
            0.0,
            (1.0 + b) / (2.0 * b.sqrt()),
            (1.0 - b) / (2.0 * b.sqrt()),
        )
        .unwrap();
        let map = build_map(&g).unwrap();
        let k = map.modulus().unwrap();
        let phi = map.apply_matrix(&a).unwrap();
        assert!(phi.max_abs_diff(&a.scale_real(k.sqrt())) < 1e-10);
    }

    #[test]
    fn spectral_consistency() {
        let g = EllipseGeometry::from_axes(c(0.1, 0.0), 0.3, 1.0, 0.6).unwrap();
        let map = build_map(&g).unwrap();
        let m =
            ComplexMatrix::from_rows(&[&[c(0.2, 0.1), c(0.3, 0.0)], &[c(0.0, 0.1), c(-0.1, 0.05)]]);
        let phi = map.apply_matrix(&m).unwrap();
        let mut want: Vec<C64> = eig_general(&m)
            .unwrap()
            .values
            .iter()
            .map(|&z| map.apply_scalar(z).unwrap())
            .collect();
        let mut got = eig_general(&phi).unwrap().values;
        let key = |z: &C64| (z.re * 1e6).round() as i64;
        want.sort_by_key(key);
        got.sort_by_key(key);
        for (w, g) in want.iter().zip(&got) {
            assert!((w - g).norm() < 1e-9);
        }
    }

    #[test]
    fn rejections() {
        let seg = EllipseGeometry::from_axes(c(0.0, 0.0), 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(build_map(&seg), Err(Error::NotSupported(_))));
        let g = EllipseGeometry::from_axes(c(0.0, 0.0), 0.0, 1.0, 0.5).unwrap();
        let map = build_map(&g).unwrap();
        assert!(matches!(
            map.apply_scalar(c(1.01, 0.0)),
            Err(Error::Domain { .. })
        ));
        assert!(map
            .apply_matrix(&ComplexMatrix::jordan(2).scale_real(0.1))
            .is_err());
    }
}
