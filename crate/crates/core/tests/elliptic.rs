use std::f64::consts::{FRAC_PI_2, PI};

use crouzeix_core::elliptic::{
    agm_k, crouzeix_2x2_bound, half_nome_identity_residual, jacobi_sn, modulus_from_nome,
    nome_from_modulus, thetas,
};
use crouzeix_core::C64;
use proptest::prelude::*;

/// `∫₀^φ dθ / √(1 − k² sin²θ)` by composite Simpson.
fn incomplete_f(phi: f64, k: f64) -> f64 {
    let n = 4096;
    let h = phi / n as f64;
    let f = |t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt();
    let mut s = f(0.0) + f(phi);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn nome_by_quadrature(k: f64) -> f64 {
    let kp = (1.0 - k * k).sqrt();
    (-PI * incomplete_f(FRAC_PI_2, kp) / incomplete_f(FRAC_PI_2, k)).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complete_integral_matches_quadrature(k in 0.0..0.98f64) {
        let want = incomplete_f(FRAC_PI_2, k);
        prop_assert!((agm_k(k).unwrap() - want).abs() <= 1e-11 * want);
    }

    #[test]
    fn nome_matches_quadrature(k in 0.05..0.98f64) {
        let q = nome_from_modulus(k).unwrap();
        let want = nome_by_quadrature(k);
        prop_assert!((q - want).abs() <= 1e-11, "{q} {want}");
        prop_assert!((modulus_from_nome(q).unwrap().k - k).abs() <= 1e-12);
    }

    #[test]
    fn sn_inverts_the_integral(k in 0.0..0.95f64, phi in 0.0..1.5f64) {
        let u = incomplete_f(phi, k);
        let sn = jacobi_sn(C64::new(u, 0.0), k).unwrap();
        prop_assert!((sn - C64::new(phi.sin(), 0.0)).norm() <= 1e-11);
    }

    #[test]
    fn sn_imaginary_argument(k in 0.05..0.9f64, y in 0.0..1.0f64) {
        // Jacobi imaginary transformation: sn(iy, k) = i sc(y, k′)
        let kp = (1.0 - k * k).sqrt();
        let sn_real = jacobi_sn(C64::new(y, 0.0), kp).unwrap().re;
        let cn_real = (1.0 - sn_real * sn_real).sqrt();
        let want = C64::new(0.0, sn_real / cn_real);
        prop_assert!((jacobi_sn(C64::new(0.0, y), k).unwrap() - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn thetas_match_direct_sums(q in 0.0..0.9f64) {
        let (t2, t3, t4) = thetas(q).unwrap();
        let mut s2 = 0.0;
        let mut s3 = 1.0;
        let mut s4 = 1.0;
        for n in 0..400i32 {
            let h = (n as f64 + 0.5).powi(2);
            s2 += 2.0 * q.powf(h);
            if n > 0 {
                let p = q.powi(n * n);
                s3 += 2.0 * p;
                s4 += 2.0 * p * if n % 2 == 1 { -1.0 } else { 1.0 };
            }
        }
        prop_assert!((t2 - s2).abs() <= 1e-12 * s2.max(1.0));
        prop_assert!((t3 - s3).abs() <= 1e-12 * s3);
        prop_assert!((t4 - s4).abs() <= 1e-12 * s3);
    }

    #[test]
    fn half_nome_identity(q in 1e-3..0.9f64) {
        let r = half_nome_identity_residual(q).unwrap();
        prop_assert!(r.residual <= 1e-11 && r.theta_residual <= 1e-12);
    }

    #[test]
    fn bound_is_between_one_and_two(eps in 0.01..1.0f64) {
        let v = crouzeix_2x2_bound(eps).unwrap();
        prop_assert!(v > 1.0 - 1e-12 && v < 2.0);
    }

    #[test]
    fn bound_equals_norm_of_canonical_form(b in 0.05..0.6f64) {
        // ‖[[0, √(k/b)], [√(kb), 0]]‖₂ = √(k/b), k from quadrature; past
        // b ≈ 0.6 the quadrature cannot resolve k′
        let eps = 2.0 * b.sqrt() / (1.0 + b);
        let q = b * b;
        let k = bisect_modulus(q);
        let want = (k / b).sqrt();
        let got = crouzeix_2x2_bound(eps).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want, "{got} {want}");
    }
}

/// `k` with nome `q`, by bisection on the quadrature nome.
fn bisect_modulus(q: f64) -> f64 {
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nome_by_quadrature(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn limits() {
    assert_eq!(crouzeix_2x2_bound(1.0).unwrap(), 1.0);
    assert!((crouzeix_2x2_bound(1e-6).unwrap() - 2.0).abs() < 1e-5);
    assert!((jacobi_sn(C64::new(0.3, 0.0), 0.0).unwrap().re - 0.3f64.sin()).abs() < 1e-15);
    assert!(modulus_from_nome(1.0).is_err());
    assert!(crouzeix_2x2_bound(0.0).is_err());
}
