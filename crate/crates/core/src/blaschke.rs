//! Finite Blaschke products `e^{iγ} ∏ (z − αⱼ)/(1 − ᾱⱼ z)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::matcore::{solve, spectral_radius, ComplexMatrix};
use crate::{Error, Result};

/// Zeros must satisfy `|α| < 1 − ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-12;
/// Spectral radius accepted by [`BlaschkeProduct::eval_matrix`] above 1;
/// covers eigenvalues that sit inside the disk by less than one rounding
/// step.
pub const SPECTRAL_TOL: f64 = 1e-12;
/// Largest coefficient count for [`BlaschkeProduct::taylor_coeffs_at_zero`].
pub const MAX_TAYLOR: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyBasis {
    /// Powers of a nilpotent Jordan block: `B(J) = Σ pⱼ Jʲ`.
    PowersOfJ,
    /// `p₀ I + p₁ T + p₂ T²` for `T` with spectrum `{0, ±√k}`.
    MinimalPolyT,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs {
    pub coeffs: Vec<C64>,
    pub basis: PolyBasis,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>, phase: f64) -> Result<Self> {
        if !phase.is_finite()
            || zeros
                .iter()
                .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0 - ZERO_MARGIN)) {
            return Err(Error::Domain {
                what: "Blaschke zero modulus",
                value: z.norm(),
            });
        }
        Ok(Self { zeros, phase })
    }

    /// `B(z) = z^m`.
    pub fn power(m: usize) -> Self {
        Self {
            zeros: vec![C64::new(0.0, 0.0); m],
            phase: 0.0,
        }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    fn unit(&self) -> C64 {
        C64::from_polar(1.0, self.phase)
    }

    pub fn eval_scalar(&self, z: C64) -> Result<C64> {
        let mut acc = self.unit();
        for &a in &self.zeros {
            let den = C64::new(1.0, 0.0) - a.conj() * z;
            if den.norm() <= f64::EPSILON * (1.0 + z.norm()) {
                return Err(Error::Pole);
            }
            acc *= (z - a) / den;
        }
        Ok(acc)
    }

    /// `B(M)`; the spectrum of `M` must lie in the closed unit disk up to
    /// [`SPECTRAL_TOL`].
    pub fn eval_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let rho = spectral_radius(m)?;
        if !(rho < 1.0 + SPECTRAL_TOL) {
            return Err(Error::Domain {
                what: "spectral radius of Blaschke argument",
                value: rho,
            });
        }
        self.eval_matrix_unchecked(m)
    }

    /// `B(M)` via resolvent solves, factors applied in zero order, without
    /// the spectral radius check.
    pub fn eval_matrix_unchecked(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = m.dim();
        let mut acc = ComplexMatrix::identity(n).scale(self.unit());
        let eye = ComplexMatrix::identity(n);
        for &a in &self.zeros {
            let num = m.shift(-a);
            let den = &eye - &m.scale(a.conj());
            let factor = solve(&den, &num).map_err(|e| match e {
                Error::Singular { .. } => Error::Pole,
                other => other,
            })?;
            acc = &acc * &factor;
        }
        Ok(acc)
    }

    /// Taylor coefficients `p₀ … p_{count−1}` at the origin, read from the
    /// first row of `B(J_count)`.
    pub fn taylor_coeffs_at_zero(&self, count: usize) -> Result<PolyCoeffs> {
        if count == 0 || count > MAX_TAYLOR {
            return Err(Error::InvalidInput(
                "taylor coefficient count must be in 1..=8",
            ));
        }
        let p = self.eval_matrix_unchecked(&ComplexMatrix::jordan(count))?;
        Ok(PolyCoeffs {
            coeffs: p.row(0).to_vec(),
            basis: PolyBasis::PowersOfJ,
        })
    }

    /// `B(T) = p₀ I + p₁ T + p₂ T²` for a degree-2 product and a `T` whose
    /// minimal polynomial is `T³ − kT`, by interpolation at `{0, ±√k}`.
    pub fn minimal_poly_coeffs_t(&self, k: f64) -> Result<PolyCoeffs> {
        if self.degree() != 2 {
            return Err(Error::InvalidInput(
                "minimal polynomial coefficients need exactly two zeros",
            ));
        }
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain {
                what: "modulus",
                value: k,
            });
        }
        let s = k.sqrt();
        let f0 = self.eval_scalar(C64::new(0.0, 0.0))?;
        let fp = self.eval_scalar(C64::new(s, 0.0))?;
        let fm = self.eval_scalar(C64::new(-s, 0.0))?;
        Ok(PolyCoeffs {
            coeffs: vec![f0, (fp - fm) / (2.0 * s), (fp + fm - f0 * 2.0) / (2.0 * k)],
            basis: PolyBasis::MinimalPolyT,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::norm2;
    use core::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn alpha(k: f64) -> f64 {
        (k / (1.0 + (1.0 - k * k).sqrt())).sqrt()
    }

    #[test]
    fn identity_product() {
        let b = BlaschkeProduct::power(1);
        assert_eq!(b.eval_scalar(c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
        let m =
            ComplexMatrix::from_rows(&[&[c(0.1, 0.2), c(0.3, 0.0)], &[c(0.0, -0.1), c(-0.2, 0.1)]]);
        assert!(b.eval_matrix(&m).unwrap().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn symmetric_pair_vanishes_at_zero() {
        let a = alpha(0.8);
        let b = BlaschkeProduct::new(vec![c(a, 0.0), c(-a, 0.0)], 0.0).unwrap();
        assert!(b.eval_scalar(c(a, 0.0)).unwrap().norm() < 1e-16);
    }

    #[test]
    fn pole_and_domain_errors() {
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)], 0.0).unwrap();
        assert_eq!(b.eval_scalar(c(2.0, 0.0)), Err(Error::Pole));
        assert!(BlaschkeProduct::new(vec![c(1.0, 0.0)], 0.0).is_err());
        let big = ComplexMatrix::identity(2).scale_real(1.5);
        assert!(matches!(b.eval_matrix(&big), Err(Error::Domain { .. })));
        // I − ᾱM singular at M = 2I, α = 1/2
        let at_pole = ComplexMatrix::identity(2).scale_real(2.0);
        assert_eq!(b.eval_matrix_unchecked(&at_pole), Err(Error::Pole));
    }

    #[test]
    fn square_on_scaled_jordan() {
        let m = ComplexMatrix::jordan(3).scale_real(SQRT_2);
        let p = BlaschkeProduct::power(2).eval_matrix(&m).unwrap();
        assert!((norm2(&p).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_product() {
        let b = BlaschkeProduct::new(vec![], 0.3).unwrap();
        let p = b.eval_matrix(&ComplexMatrix::jordan(3)).unwrap();
        assert!(
            p.max_abs_diff(&ComplexMatrix::identity(3).scale(C64::from_polar(1.0, 0.3))) < 1e-15
        );
    }

    #[test]
    fn taylor_leading_coefficient() {
        let zs = vec![c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.5)];
        let b = BlaschkeProduct::new(zs.clone(), 0.0).unwrap();
        let p = b.taylor_coeffs_at_zero(4).unwrap();
        // p₀ = B(0) = (−1)^m ∏ αⱼ
        let prod: C64 = zs.iter().product();
        assert!((p.coeffs[0] + prod).norm() < 1e-15);

        // p₁ = (−1)^{m−1} Σⱼ (∏_{i≠j} αᵢ)(1 − |αⱼ|²)
        let p1: C64 = (0..3)
            .map(|j| {
                let others: C64 = (0..3).filter(|&i| i != j).map(|i| zs[i]).product();
                others * (1.0 - zs[j].norm_sqr())
            })
            .sum();
        assert!((p.coeffs[1] - p1).norm() < 1e-11);

        // central difference of eval_scalar along the real axis
        let h = 1e-5;
        let fd =
            (b.eval_scalar(c(h, 0.0)).unwrap() - b.eval_scalar(c(-h, 0.0)).unwrap()) / (2.0 * h);
        assert!((p.coeffs[1] - fd).norm() < 1e-9);
    }

    #[test]
    fn taylor_of_power() {
        let p = BlaschkeProduct::power(2).taylor_coeffs_at_zero(3).unwrap();
        assert_eq!(p.coeffs, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(BlaschkeProduct::power(1).taylor_coeffs_at_zero(9).is_err());
    }

    #[test]
    fn minimal_poly_extremal_pair() {
        let k: f64 = 0.8;
        let kp = (1.0 - k * k).sqrt();
        let a = alpha(k);
        let b = BlaschkeProduct::new(vec![c(a, 0.0), c(-a, 0.0)], 0.0).unwrap();
        let p = b.minimal_poly_coeffs_t(k).unwrap();
        assert!((p.coeffs[0] - c(-k / (1.0 + kp), 0.0)).norm() < 1e-11);
        assert!(p.coeffs[1].norm() < 1e-11);
        assert!((p.coeffs[2] - c(2.0 / (1.0 + kp), 0.0)).norm() < 1e-11);
        let z2 = BlaschkeProduct::power(2)
            .minimal_poly_coeffs_t(0.5)
            .unwrap();
        assert!((z2.coeffs[2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(z2.coeffs[0].norm() < 1e-16 && z2.coeffs[1].norm() < 1e-15);
        assert!(BlaschkeProduct::power(1)
            .minimal_poly_coeffs_t(0.5)
            .is_err());
    }
}
