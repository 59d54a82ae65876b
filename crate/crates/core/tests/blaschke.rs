use crouzeix_core::blaschke::BlaschkeProduct;
use crouzeix_core::matcore::{norm2, ComplexMatrix};
use crouzeix_core::C64;
use proptest::prelude::*;

fn zero() -> impl Strategy<Value = C64> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn entry() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| C64::new(x, y))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(entry(), n * n).prop_map(move |d| ComplexMatrix::new(n, d).unwrap())
}

/// Scales `m` to spectral norm `s`.
fn contraction(m: &ComplexMatrix, s: f64) -> ComplexMatrix {
    let n = norm2(m).unwrap();
    m.scale_real(s / n.max(1e-300))
}

/// Truncated product of the series `(z − a) Σ (āz)ʲ`.
fn series(zeros: &[C64], phase: f64, count: usize) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); count];
    acc[0] = C64::from_polar(1.0, phase);
    for &a in zeros {
        let mut factor = vec![C64::new(0.0, 0.0); count];
        let mut pw = C64::new(1.0, 0.0);
        for j in 0..count {
            factor[j] -= a * pw;
            if j + 1 < count {
                factor[j + 1] += pw;
            }
            pw *= a.conj();
        }
        let mut next = vec![C64::new(0.0, 0.0); count];
        for i in 0..count {
            for j in 0..count - i {
                next[i + j] += acc[i] * factor[j];
            }
        }
        acc = next;
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn taylor_coefficients_match_series(
        zeros in prop::collection::vec(zero(), 0..4),
        phase in -3.0..3.0f64,
        count in 1usize..=8,
    ) {
        let b = BlaschkeProduct::new(zeros.clone(), phase).unwrap();
        let got = b.taylor_coeffs_at_zero(count).unwrap().coeffs;
        let want = series(&zeros, phase, count);
        prop_assert_eq!(got.len(), count);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).norm() <= 1e-10 * (1.0 + w.norm()), "{g} vs {w}");
        }
    }

    #[test]
    fn unimodular_on_circle(
        zeros in prop::collection::vec(zero(), 1..5),
        phase in -3.0..3.0f64,
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let b = BlaschkeProduct::new(zeros, phase).unwrap();
        let w = b.eval_scalar(C64::from_polar(1.0, theta)).unwrap();
        prop_assert!((w.norm() - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn von_neumann_on_contractions(
        n in 2usize..=5,
        seed in matrix(5),
        s in 0.05..0.97f64,
        zeros in prop::collection::vec(zero(), 1..4),
    ) {
        let m = ComplexMatrix::from_fn(n, |i, j| seed[(i, j)]);
        let c = contraction(&m, s);
        let b = BlaschkeProduct::new(zeros, 0.0).unwrap();
        let v = norm2(&b.eval_matrix(&c).unwrap()).unwrap();
        prop_assert!(v <= 1.0 + 1e-9, "{v}");
    }

    #[test]
    fn commutes_with_argument(
        seed in matrix(4),
        zeros in prop::collection::vec(zero(), 1..4),
    ) {
        let c = contraction(&seed, 0.9);
        let b = BlaschkeProduct::new(zeros, 0.4).unwrap().eval_matrix(&c).unwrap();
        let gap = (&(&b * &c) - &(&c * &b)).max_abs();
        prop_assert!(gap <= 1e-10, "{gap}");
    }

    #[test]
    fn phase_leaves_norm_unchanged(
        seed in matrix(3),
        zeros in prop::collection::vec(zero(), 1..3),
        phase in -3.0..3.0f64,
    ) {
        let c = contraction(&seed, 0.8);
        let v0 = norm2(&BlaschkeProduct::new(zeros.clone(), 0.0).unwrap().eval_matrix(&c).unwrap()).unwrap();
        let v1 = norm2(&BlaschkeProduct::new(zeros, phase).unwrap().eval_matrix(&c).unwrap()).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-12 * v0.max(1.0));
    }

    #[test]
    fn jordan_image_is_upper_toeplitz(
        n in 2usize..=6,
        zeros in prop::collection::vec(zero(), 1..4),
    ) {
        let j = ComplexMatrix::jordan(n).scale_real(0.5);
        let b = BlaschkeProduct::new(zeros, 0.0).unwrap().eval_matrix(&j).unwrap();
        for i in 0..n {
            for k in 0..n {
                if k < i {
                    prop_assert!(b[(i, k)].norm() <= 1e-12);
                } else {
                    prop_assert!((b[(i, k)] - b[(0, k - i)]).norm() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn rejects_zeros_on_or_outside_circle() {
    assert!(BlaschkeProduct::new(vec![C64::new(1.0, 0.0)], 0.0).is_err());
    assert!(BlaschkeProduct::new(vec![C64::new(0.0, 1.5)], 0.0).is_err());
    assert!(BlaschkeProduct::new(vec![C64::new(f64::NAN, 0.0)], 0.0).is_err());
}

#[test]
fn rejects_spectrum_outside_disk() {
    let b = BlaschkeProduct::new(vec![C64::new(0.2, 0.0)], 0.0).unwrap();
    assert!(b
        .eval_matrix(&ComplexMatrix::real_diag(&[0.5, 1.5]))
        .is_err());
}
