//! Complete elliptic integrals, Jacobi theta functions, the nome/modulus
//! correspondence, and `sn` for complex argument.
//!
//! The nome convention throughout is `q = exp(−π K′/K)` with real
//! `q ∈ (0, 1)`.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Upper limit on the nome accepted by the theta routines.
pub const NOME_MAX: f64 = 1.0 - 1e-6;

const SERIES_TERM_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 200;
const AGM_MAX_STEPS: usize = 64;

/// Modulus, complementary modulus, nome and quarter periods of one
/// elliptic parameter set.
///
/// `k_complement` is carried separately from `k` because for nomes close to
/// one `k` rounds to 1 while `k′` is still meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticParams {
    pub k: f64,
    pub k_complement: f64,
    pub q: f64,
    pub big_k: f64,
    pub big_k_prime: f64,
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2 AGM(1, k′))`.
pub fn agm_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain {
            what: "complete elliptic integral modulus",
            value: k,
        });
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, kp))
}

/// `K` evaluated from the complementary modulus, accurate as `k′ → 0`.
fn big_k_from_complement(kp: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kp)
}

fn check_nome(q: f64) -> Result<()> {
    if q > 0.0 && q < NOME_MAX {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "nome",
            value: q,
        })
    }
}

/// Direct q-series; only called with `q ≤ e^{−π}` where they converge fast.
fn theta_series(q: f64) -> (f64, f64, f64) {
    // θ₂ = 2 q^{1/4} Σ_{n≥0} q^{n(n+1)}
    let mut s2 = 1.0;
    let mut term = 1.0;
    let mut mult = q * q;
    for _ in 0..SERIES_MAX_TERMS {
        term *= mult;
        s2 += term;
        if term < SERIES_TERM_TOL * s2 {
            break;
        }
        mult *= q * q;
    }
    let theta2 = 2.0 * q.powf(0.25) * s2;
    // θ₃, θ₄ = 1 + 2 Σ_{n≥1} (±1)^n q^{n²}
    let mut s3 = 0.0;
    let mut s4 = 0.0;
    let mut term = q;
    let mut mult = q * q * q;
    let mut sign = -1.0;
    for _ in 0..SERIES_MAX_TERMS {
        s3 += term;
        s4 += sign * term;
        if term < SERIES_TERM_TOL * (1.0 + 2.0 * s3) {
            break;
        }
        term *= mult;
        mult *= q * q;
        sign = -sign;
    }
    (theta2, 1.0 + 2.0 * s3, 1.0 + 2.0 * s4)
}

/// Theta values together with the scale `s^{-1/2}` factored out when the
/// imaginary transformation is used (`1` otherwise).
struct ThetaParts {
    scale: f64,
    t2: f64,
    t3: f64,
    t4: f64,
}

fn theta_parts(q: f64) -> ThetaParts {
    let self_dual = (-PI).exp();
    if q <= self_dual {
        let (t2, t3, t4) = theta_series(q);
        ThetaParts {
            scale: 1.0,
            t2,
            t3,
            t4,
        }
    } else {
        // q = e^{−πs}: θ₃(q) = s^{−1/2}θ₃(q̃), θ₂(q) = s^{−1/2}θ₄(q̃),
        // θ₄(q) = s^{−1/2}θ₂(q̃) with q̃ = e^{−π/s}.
        let s = -q.ln() / PI;
        let dual = (-PI / s).exp();
        let (d2, d3, d4) = if dual > 0.0 {
            theta_series(dual)
        } else {
            (0.0, 1.0, 1.0)
        };
        ThetaParts {
            scale: 1.0 / s.sqrt(),
            t2: d4,
            t3: d3,
            t4: d2,
        }
    }
}

/// `(θ₂(q), θ₃(q), θ₄(q))`.
pub fn thetas(q: f64) -> Result<(f64, f64, f64)> {
    check_nome(q)?;
    let p = theta_parts(q);
    Ok((p.scale * p.t2, p.scale * p.t3, p.scale * p.t4))
}

pub fn theta_2(q: f64) -> Result<f64> {
    thetas(q).map(|t| t.0)
}

pub fn theta_3(q: f64) -> Result<f64> {
    thetas(q).map(|t| t.1)
}

pub fn theta_4(q: f64) -> Result<f64> {
    thetas(q).map(|t| t.2)
}

/// `k = (θ₂/θ₃)²`, `k′ = (θ₄/θ₃)²`, `K = (π/2)θ₃²`, `K′ = K·(−ln q)/π`.
pub fn modulus_from_nome(q: f64) -> Result<EllipticParams> {
    check_nome(q)?;
    let p = theta_parts(q);
    let k = (p.t2 / p.t3).powi(2);
    let k_complement = (p.t4 / p.t3).powi(2);
    let big_k = FRAC_PI_2 * (p.scale * p.t3).powi(2);
    let big_k_prime = big_k * (-q.ln()) / PI;
    Ok(EllipticParams {
        k,
        k_complement,
        q,
        big_k,
        big_k_prime,
    })
}

/// Inverse map via AGM: `q = exp(−π K(k′)/K(k))`.
pub fn nome_from_modulus(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain {
            what: "elliptic modulus",
            value: k,
        });
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    let big_k = big_k_from_complement(kp);
    let big_k_prime = big_k_from_complement(k);
    Ok((-PI * big_k_prime / big_k).exp())
}

impl EllipticParams {
    /// Parameters for a modulus given directly; quarter periods from AGM.
    pub fn from_modulus(k: f64) -> Result<Self> {
        let q = nome_from_modulus(k)?;
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self {
            k,
            k_complement: kp,
            q,
            big_k: big_k_from_complement(kp),
            big_k_prime: big_k_from_complement(k),
        })
    }
}

/// Smallest modulus handled by the `sin`-based tail of the Landen descent.
const LANDEN_FLOOR: f64 = 1e-5;

fn sn_descend(z: C64, k: f64, kp: f64, depth: usize) -> Result<C64> {
    if k < LANDEN_FLOOR || depth > 40 {
        let (s, c) = (z.sin(), z.cos());
        return Ok(s - (z - s * c) * c * (k * k / 4.0));
    }
    // k₁ = (1 − k′)/(1 + k′) = k²/(1 + k′)², k₁′ = 2√k′/(1 + k′)
    let k1 = (k / (1.0 + kp)).powi(2);
    let kp1 = 2.0 * kp.sqrt() / (1.0 + kp);
    let inner = sn_descend(z / (1.0 + k1), k1, kp1, depth + 1)?;
    let den = C64::new(1.0, 0.0) + inner * inner * k1;
    if den.norm() < 1e-300 {
        return Err(Error::PoleProximity { distance: 0.0 });
    }
    Ok(inner * (1.0 + k1) / den)
}

/// Minimum distance to a pole of `sn` accepted by [`jacobi_sn`].
pub const SN_POLE_DISTANCE: f64 = 1e-8;

/// `sn(u, k)` for complex `u` in the strip `|Im u| < K′`, by descending
/// Landen transformation.
pub fn jacobi_sn(u: C64, k: f64) -> Result<C64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain {
            what: "Jacobi sn modulus",
            value: k,
        });
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    sn_checked(
        u,
        k,
        kp,
        big_k_from_complement(kp),
        big_k_from_complement(k),
    )
}

/// `sn(u, k)` using the modulus pair stored in `params`.
pub fn jacobi_sn_params(u: C64, params: &EllipticParams) -> Result<C64> {
    sn_checked(
        u,
        params.k,
        params.k_complement,
        params.big_k,
        params.big_k_prime,
    )
}

fn sn_checked(u: C64, k: f64, kp: f64, big_k: f64, big_k_prime: f64) -> Result<C64> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Domain {
            what: "Jacobi sn argument",
            value: f64::NAN,
        });
    }
    if u.im.abs() >= big_k_prime - SN_POLE_DISTANCE {
        // nearest pole 2mK + i·sign·K′
        let m = (u.re / (2.0 * big_k)).round();
        let pole = C64::new(2.0 * m * big_k, big_k_prime.copysign(u.im));
        let distance = (u - pole).norm();
        if distance < SN_POLE_DISTANCE {
            return Err(Error::PoleProximity { distance });
        }
        if u.im.abs() >= big_k_prime {
            return Err(Error::Domain {
                what: "Jacobi sn argument outside the fundamental strip",
                value: u.im,
            });
        }
    }
    sn_descend(u, k, kp, 0)
}

/// Both forms of the half-nome identity at one nome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfNomeResidual {
    pub q: f64,
    /// `√k(q²)`.
    pub lhs: f64,
    /// `k(q) / (1 + √(1 − k(q)²))`.
    pub rhs: f64,
    pub residual: f64,
    /// `θ₂(q²)(θ₃(q)² + θ₄(q)²) − θ₂(q)²θ₃(q²)`.
    pub theta_residual: f64,
}

/// Largest nome accepted by [`half_nome_identity_residual`].
pub const HALF_NOME_MAX: f64 = 1.0 - 1e-3;

pub fn half_nome_identity_residual(q: f64) -> Result<HalfNomeResidual> {
    if !(q > 0.0 && q < HALF_NOME_MAX) {
        return Err(Error::Domain {
            what: "half-nome identity nome",
            value: q,
        });
    }
    let outer = modulus_from_nome(q)?;
    let inner = modulus_from_nome(q * q)?;
    let lhs = inner.k.sqrt();
    let rhs = outer.k / (1.0 + outer.k_complement);
    let (t2, t3, t4) = thetas(q)?;
    let (s2, s3, _) = thetas(q * q)?;
    let theta_residual = s2 * (t3 * t3 + t4 * t4) - t2 * t2 * s3;
    Ok(HalfNomeResidual {
        q,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        theta_residual,
    })
}

const BOUND_MAX_TERMS: usize = 100_000_000;

/// Exact Crouzeix constant of a 2×2 matrix whose numerical range is an
/// ellipse of eccentricity `epsilon`:
/// `2 exp(−Σ_{n≥1} ((−1)^{n+1}/n) · 2/(1 + q^{−n}))` with
/// `q = ρ^{−4}`, `ρ = (1 + √(1−ε²))/ε`.
///
/// `q` is the nome of the ellipse's Szegő map; with that nome the series
/// equals `√(k(q)/√q)`, the norm attained by `B(z) = z`.
pub fn crouzeix_2x2_bound(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain {
            what: "eccentricity",
            value: epsilon,
        });
    }
    let root = ((1.0 - epsilon) * (1.0 + epsilon)).sqrt();
    // r = ρ^{−4}
    let r = (epsilon / (1.0 + root)).powi(4);
    let sum = if r >= 1.0 {
        core::f64::consts::LN_2
    } else {
        let mut sum = 0.0;
        let mut rn = 1.0;
        let mut sign = 1.0;
        let mut last = 0.0;
        for n in 1..=BOUND_MAX_TERMS {
            rn *= r;
            let term = 2.0 * rn / ((1.0 + rn) * n as f64);
            sum += sign * term;
            last = sign * term;
            if term < SERIES_TERM_TOL {
                last = 0.0;
                break;
            }
            sign = -sign;
        }
        // alternating tail estimate when the term cap was hit
        sum - 0.5 * last
    };
    Ok((2.0 * (-sum).exp()).clamp(1.0, 2.0))
}
