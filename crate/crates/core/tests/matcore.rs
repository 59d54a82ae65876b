use crouzeix_core::matcore::{eigh, norm2, svd, ComplexMatrix};
use crouzeix_core::numrange::{boundary, fit_conic, RangeShape};
use crouzeix_core::C64;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |d| {
            ComplexMatrix::new(n, d.into_iter().map(|(x, y)| C64::new(x, y)).collect()).unwrap()
        })
    })
}

/// `λ_max` of a Hermitian matrix by power iteration on `H + cI`, an oracle
/// independent of the Jacobi solver.
fn lambda_max(h: &ComplexMatrix) -> f64 {
    let n = h.dim();
    let c = h.norm1() + 1.0;
    let shifted = h.shift(C64::new(c, 0.0));
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64))
        .collect();
    for _ in 0..5000 {
        let w = shifted.mul_vec(&v);
        let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / nw).collect();
    }
    // Rayleigh quotient, unit v
    let hv = h.mul_vec(&v);
    v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn svd_reconstructs(m in matrix()) {
        let n = m.dim();
        let parts = svd(&m).unwrap();
        let mut r = ComplexMatrix::zeros(n);
        for t in &parts {
            for i in 0..n {
                for j in 0..n {
                    r[(i, j)] += t.u[i] * t.v[j].conj() * t.sigma;
                }
            }
        }
        let rel = (&r - &m).frobenius_norm() / m.frobenius_norm().max(1e-300);
        prop_assert!(rel <= 1e-10, "{rel}");
        prop_assert!(parts.windows(2).all(|w| w[0].sigma >= w[1].sigma));
    }

    #[test]
    fn norm2_bounds(m in matrix()) {
        let s = norm2(&m).unwrap();
        let f = m.frobenius_norm();
        prop_assert!(s <= f * (1.0 + 1e-12));
        prop_assert!(s >= f / (m.dim() as f64).sqrt() * (1.0 - 1e-12));
    }

    #[test]
    fn hermitian_eigenpairs(m in matrix()) {
        let h = &m + &m.adjoint();
        let e = eigh(&h).unwrap();
        let top = e.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((top - lambda_max(&h)).abs() <= 1e-7 * (1.0 + top.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn boundary_points_support_the_range(m in matrix()) {
        let curve = boundary(&m, 64).unwrap();
        for (&z, &th) in curve.points.iter().zip(&curve.angles) {
            let rot = C64::from_polar(1.0, th);
            let h = (&m.scale(rot) + &m.adjoint().scale(rot.conj())).scale_real(0.5);
            let support = lambda_max(&h);
            let proj = (rot * z).re;
            prop_assert!((proj - support).abs() <= 1e-9 * (1.0 + support.abs()), "{proj} {support}");
        }
    }
}

#[test]
fn jordan_range_is_disk_of_cosine_radius() {
    for n in 2..=6 {
        let g = fit_conic(&boundary(&ComplexMatrix::jordan(n), 256).unwrap()).unwrap();
        let r = (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert_eq!(g.shape, RangeShape::Disk);
        assert!((g.semi_major - r).abs() < 1e-10, "{n}: {}", g.semi_major);
        assert!(g.center.norm() < 1e-10);
    }
}

#[test]
fn hermitian_range_is_segment() {
    let g =
        fit_conic(&boundary(&ComplexMatrix::real_diag(&[-1.0, 0.5, 2.0]), 256).unwrap()).unwrap();
    assert_eq!(g.shape, RangeShape::Segment);
}
