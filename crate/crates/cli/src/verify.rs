//! Verification suite: every acceptance criterion as a list of
//! `{check, expected, observed, tolerance, pass}` records.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crouzeix_core::blaschke::BlaschkeProduct;
use crouzeix_core::cases::{self, CaseResult, Family};
use crouzeix_core::elliptic::{crouzeix_2x2_bound, half_nome_identity_residual, modulus_from_nome};
use crouzeix_core::extremal::{Certificate, PROVEN_BOUND};
use crouzeix_core::matcore::{eigh, norm2, svd};
use crouzeix_core::numrange::boundary;
use crouzeix_core::ratio::polynomial_ratio;
use crouzeix_core::{crouzeix_ratio, ComplexMatrix, Error, ExtremalResult, SearchConfig, C64};

use crate::commands::par_map;

/// How `observed` is compared with `expected` and `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    /// `|observed − expected| ≤ tolerance`
    Abs,
    /// `|observed − expected| ≤ tolerance·|expected|`
    Rel,
    /// `observed ≤ expected + tolerance`
    AtMost,
    /// `observed ≥ expected − tolerance`
    AtLeast,
    /// `observed > tolerance`; `expected` repeats the threshold
    Exceeds,
}

impl Cmp {
    pub fn eval(self, expected: f64, observed: f64, tolerance: f64) -> bool {
        match self {
            Cmp::Abs => (observed - expected).abs() <= tolerance,
            Cmp::Rel => (observed - expected).abs() <= tolerance * expected.abs(),
            Cmp::AtMost => observed <= expected + tolerance,
            Cmp::AtLeast => observed >= expected - tolerance,
            Cmp::Exceeds => observed > tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub cmp: Cmp,
}

impl CheckRecord {
    pub fn new(
        check: impl Into<String>,
        expected: f64,
        observed: f64,
        tolerance: f64,
        cmp: Cmp,
    ) -> Self {
        Self {
            check: check.into(),
            expected,
            observed,
            tolerance,
            pass: cmp.eval(expected, observed, tolerance),
            cmp,
        }
    }

    /// A check that could not be computed.
    fn error(check: impl Into<String>, e: &Error) -> Self {
        Self::new(
            format!("{}: {e}", check.into()),
            0.0,
            f64::NAN,
            0.0,
            Cmp::Abs,
        )
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.cmp.eval(self.expected, self.observed, tolerance);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl CriterionReport {
    fn new(id: u8, checks: Vec<CheckRecord>) -> Self {
        Self {
            id,
            title: title(id),
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "Jordan equality cases n = 2, 3",
        2 => "Jordan n = 4, 5 closed form",
        3 => "2x2 family: optimizer, modulus formula and series agree",
        4 => "2x2 uniqueness corroboration",
        5 => "3x3 elliptic family value and zeros",
        6 => "extremal product evaluated on T",
        7 => "nonuniqueness crossover",
        8 => "half-nome and theta identities",
        9 => "singular-vector orthogonality certificates",
        10 => "property suites",
        _ => "unknown",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub search: SearchConfig,
    /// Seed of the random property suites.
    pub seed: u64,
    /// Replaces every check's tolerance; used to confirm failures surface.
    pub tol_override: Option<f64>,
    /// Restricts the run to these criteria.
    pub only: Option<Vec<u8>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            seed: 20_240_601,
            tol_override: None,
            only: None,
        }
    }
}

/// Records plus the certificates of every optimum a criterion produced.
type Partial = (Vec<CheckRecord>, Vec<(String, Certificate)>);

fn collect_certificates(label: &str, x: &ExtremalResult, out: &mut Vec<(String, Certificate)>) {
    for (i, e) in x.overall.iter().enumerate() {
        out.push((format!("{label}/extremal{i}"), e.certificate));
    }
}

fn case(
    label: &str,
    r: Result<CaseResult, Error>,
    recs: &mut Vec<CheckRecord>,
) -> Option<CaseResult> {
    match r {
        Ok(r) => Some(r),
        Err(e) => {
            recs.push(CheckRecord::error(label, &e));
            None
        }
    }
}

fn max_modulus(zs: &[C64]) -> f64 {
    zs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c1(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    for n in [2usize, 3] {
        let label = format!("c1/jordan:{n}");
        let Some(r) = case(&label, cases::jordan(n, cfg), &mut recs) else {
            continue;
        };
        recs.push(CheckRecord::new(
            format!("{label}/ratio"),
            2.0,
            r.ratio,
            1e-8,
            Cmp::Abs,
        ));
        if let Some(x) = &r.attained {
            let best = &x.overall[0];
            recs.push(CheckRecord::new(
                format!("{label}/extremal_degree"),
                (n - 1) as f64,
                best.degree() as f64,
                0.0,
                Cmp::Abs,
            ));
            recs.push(CheckRecord::new(
                format!("{label}/zeros_max_modulus"),
                0.0,
                max_modulus(best.product.zeros()),
                1e-6,
                Cmp::AtMost,
            ));
            collect_certificates(&label, x, &mut certs);
        }
    }
    (recs, certs)
}

fn c2(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    for n in [4usize, 5] {
        let label = format!("c2/jordan:{n}");
        let Some(r) = case(&label, cases::jordan(n, cfg), &mut recs) else {
            continue;
        };
        let want = (PI / (n + 1) as f64).cos().recip().powi(n as i32 - 1);
        recs.push(CheckRecord::new(
            format!("{label}/ratio"),
            want,
            r.ratio,
            1e-7,
            Cmp::Rel,
        ));
        recs.push(CheckRecord::new(
            format!("{label}/at_most_2"),
            2.0,
            r.ratio,
            0.0,
            Cmp::AtMost,
        ));
        if let Some(x) = &r.attained {
            collect_certificates(&label, x, &mut certs);
        }
    }
    (recs, certs)
}

/// `√(k(b²)/b)`, with the `b → 1` limit 1.
fn two_by_two_closed_form(b: f64) -> Result<f64, Error> {
    if b == 1.0 {
        return Ok(1.0);
    }
    Ok((modulus_from_nome(b * b)?.k / b).sqrt())
}

fn c3(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    let grid = cases::linspace(0.05, 1.0, 20);
    let results = par_map(&grid, |&b| cases::two_by_two(b, cfg));
    for (&b, r) in grid.iter().zip(results) {
        let label = format!("c3/b={b:.4}");
        let Some(r) = case(&label, r, &mut recs) else {
            continue;
        };
        match two_by_two_closed_form(b) {
            Ok(want) => recs.push(CheckRecord::new(
                format!("{label}/modulus_formula"),
                want,
                r.ratio,
                1e-7,
                Cmp::Rel,
            )),
            Err(e) => recs.push(CheckRecord::error(format!("{label}/modulus_formula"), &e)),
        }
        let eps = 2.0 * b.sqrt() / (1.0 + b);
        match crouzeix_2x2_bound(eps) {
            Ok(want) => recs.push(CheckRecord::new(
                format!("{label}/series_formula"),
                want,
                r.ratio,
                1e-7,
                Cmp::Rel,
            )),
            Err(e) => recs.push(CheckRecord::error(format!("{label}/series_formula"), &e)),
        }
        if let Some(x) = &r.attained {
            collect_certificates(&label, x, &mut certs);
        }
    }
    (recs, certs)
}

fn c4(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    for b in [0.3, 0.7] {
        let label = format!("c4/b={b}");
        let Some(r) = case(&label, cases::two_by_two(b, cfg), &mut recs) else {
            continue;
        };
        let Some(x) = &r.attained else { continue };
        let Some(d1) = x.degree(1) else { continue };
        recs.push(CheckRecord::new(
            format!("{label}/starts"),
            cfg.starts as f64,
            d1.outcomes.len() as f64,
            0.0,
            Cmp::Abs,
        ));
        let converged: Vec<_> = d1.outcomes.iter().filter(|o| o.converged).collect();
        recs.push(CheckRecord::new(
            format!("{label}/converged_starts"),
            1.0,
            converged.len() as f64,
            0.0,
            Cmp::AtLeast,
        ));
        let worst = converged
            .iter()
            .map(|o| max_modulus(o.effective().0))
            .fold(0.0, f64::max);
        recs.push(CheckRecord::new(
            format!("{label}/max_zero_modulus"),
            0.0,
            worst,
            1e-6,
            Cmp::AtMost,
        ));
        collect_certificates(&label, x, &mut certs);
    }
    (recs, certs)
}

/// Distance between a two-zero set and `{α, −α}`, minimized over order.
fn pair_distance(zs: &[C64], alpha: f64) -> f64 {
    if zs.len() != 2 {
        return f64::INFINITY;
    }
    let a = C64::new(alpha, 0.0);
    let d = |x: C64, y: C64| (zs[0] - x).norm().max((zs[1] - y).norm());
    d(a, -a).min(d(-a, a))
}

fn c5(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    let grid = cases::default_grid(Family::Elliptic3, 20);
    let results = par_map(&grid, |&b| cases::elliptic3(b, cfg));
    for (&b, r) in grid.iter().zip(results) {
        let label = format!("c5/b={b:.4}");
        let Some(r) = case(&label, r, &mut recs) else {
            continue;
        };
        if b == 1.0 {
            recs.push(CheckRecord::new(
                format!("{label}/ratio"),
                1.0,
                r.ratio,
                1e-7,
                Cmp::Rel,
            ));
            continue;
        }
        let p = match modulus_from_nome(b * b) {
            Ok(p) => p,
            Err(e) => {
                recs.push(CheckRecord::error(&label, &e));
                continue;
            }
        };
        let (k, kp) = (p.k, p.k_complement);
        let inv_t = k / (b * (1.0 + kp));
        recs.push(CheckRecord::new(
            format!("{label}/ratio"),
            inv_t,
            r.ratio,
            1e-7,
            Cmp::Rel,
        ));
        if let Some(x) = &r.attained {
            let alpha = (k / (1.0 + kp)).sqrt();
            recs.push(CheckRecord::new(
                format!("{label}/zeros"),
                0.0,
                pair_distance(x.overall[0].product.zeros(), alpha),
                1e-5,
                Cmp::AtMost,
            ));
            collect_certificates(&label, x, &mut certs);
        }
    }
    (recs, certs)
}

fn c6() -> Partial {
    let mut recs = Vec::new();
    for k in [0.3f64, 0.6, 0.9] {
        let label = format!("c6/k={k}");
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        let alpha = (k / (1.0 + kp)).sqrt();
        let got = BlaschkeProduct::new(vec![C64::new(alpha, 0.0), C64::new(-alpha, 0.0)], 0.0)
            .and_then(|b| b.eval_matrix(&cases::t_matrix(k)));
        let got = match got {
            Ok(m) => m,
            Err(e) => {
                recs.push(CheckRecord::error(&label, &e));
                continue;
            }
        };
        let want = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0],
            &[0.0, k / (1.0 + kp), 0.0],
            &[(1.0 - kp) / (1.0 + kp), 0.0, 0.0],
        ]);
        recs.push(CheckRecord::new(
            format!("{label}/entrywise"),
            0.0,
            got.max_abs_diff(&want),
            1e-10,
            Cmp::AtMost,
        ));
    }
    (recs, Vec::new())
}

fn c7(cfg: &SearchConfig) -> Partial {
    let (mut recs, mut certs) = (Vec::new(), Vec::new());
    let t0 = 1.0 - 1.0 / 3f64.sqrt();
    let s3 = 3f64.sqrt();
    let values = |x: &ExtremalResult| {
        (
            x.degree(1).map_or(f64::NAN, |d| d.value),
            x.degree(2).map_or(f64::NAN, |d| d.value),
        )
    };
    let label = "c7/t0";
    if let Some(r) = case(label, cases::nonunique(t0, cfg), &mut recs) {
        if let Some(x) = &r.attained {
            let (v1, v2) = values(x);
            recs.push(CheckRecord::new(
                format!("{label}/degree1"),
                s3,
                v1,
                1e-8,
                Cmp::Abs,
            ));
            recs.push(CheckRecord::new(
                format!("{label}/degree2"),
                s3,
                v2,
                1e-8,
                Cmp::Abs,
            ));
            recs.push(CheckRecord::new(
                format!("{label}/co_extremal_count"),
                2.0,
                x.overall.len() as f64,
                0.0,
                Cmp::AtLeast,
            ));
            collect_certificates(label, x, &mut certs);
        }
    }
    for (dt, winner) in [(-0.05, 2usize), (0.05, 1)] {
        let t = t0 + dt;
        let label = format!("c7/t0{dt:+}");
        let Some(r) = case(&label, cases::nonunique(t, cfg), &mut recs) else {
            continue;
        };
        let Some(x) = &r.attained else { continue };
        let (v1, v2) = values(x);
        let rad = (1.0 + (1.0 - t) * (1.0 - t)).sqrt() / 2.0;
        let want = (1.0 / rad).max((1.0 - t) / (rad * rad));
        recs.push(CheckRecord::new(
            format!("{label}/margin"),
            1e-3,
            (v1 - v2).abs(),
            1e-3,
            Cmp::Exceeds,
        ));
        recs.push(CheckRecord::new(
            format!("{label}/winner_value"),
            want,
            v1.max(v2),
            1e-8,
            Cmp::Abs,
        ));
        recs.push(CheckRecord::new(
            format!("{label}/winner_degree"),
            winner as f64,
            x.overall[0].degree() as f64,
            0.0,
            Cmp::Abs,
        ));
        recs.push(CheckRecord::new(
            format!("{label}/extremal_count"),
            1.0,
            x.overall.len() as f64,
            0.0,
            Cmp::Abs,
        ));
        collect_certificates(&label, x, &mut certs);
    }
    (recs, certs)
}

fn c8() -> Partial {
    let mut recs = Vec::new();
    let (mut worst, mut worst_theta) = (0.0f64, 0.0f64);
    for q in cases::linspace(1e-3, 0.9, 50) {
        match half_nome_identity_residual(q) {
            Ok(r) => {
                worst = worst.max(r.residual);
                worst_theta = worst_theta.max(r.theta_residual.abs());
            }
            Err(e) => recs.push(CheckRecord::error(format!("c8/q={q}"), &e)),
        }
    }
    recs.push(CheckRecord::new(
        "c8/half_nome_max_residual",
        0.0,
        worst,
        1e-11,
        Cmp::AtMost,
    ));
    recs.push(CheckRecord::new(
        "c8/theta_quartic_max_residual",
        0.0,
        worst_theta,
        1e-12,
        Cmp::AtMost,
    ));
    (recs, Vec::new())
}

fn c9(certs: &[(String, Certificate)]) -> Vec<CheckRecord> {
    let gapped: Vec<_> = certs.iter().filter(|(_, c)| c.gap > 1e-6).collect();
    let (worst, which) = gapped
        .iter()
        .map(|(l, c)| (c.overlap, l.as_str()))
        .fold((0.0, "none"), |a, b| if b.0 > a.0 { b } else { a });
    vec![
        CheckRecord::new(
            "c9/optima_with_gap",
            1.0,
            gapped.len() as f64,
            0.0,
            Cmp::AtLeast,
        ),
        CheckRecord::new(
            format!("c9/max_overlap ({which})"),
            0.0,
            worst,
            1e-6,
            Cmp::AtMost,
        ),
    ]
}

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| random_complex(rng))
}

fn random_product(
    rng: &mut ChaCha8Rng,
    max_degree: usize,
    radius: f64,
) -> Result<BlaschkeProduct, Error> {
    let m = rng.gen_range(0..=max_degree);
    let zeros = (0..m)
        .map(|_| C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)))
        .collect();
    BlaschkeProduct::new(zeros, rng.gen_range(-PI..PI))
}

fn c10(seed: u64) -> Partial {
    let mut recs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failed = |label: &str, e: Error, recs: &mut Vec<CheckRecord>| {
        recs.push(CheckRecord::error(label, &e))
    };

    // von Neumann: ‖B(C)‖ ≤ 1 for contractions
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let c = random_matrix(&mut rng, n);
        let scale = rng.gen_range(0.05..=1.0) / norm2(&c).unwrap_or(1.0);
        let c = c.scale_real(scale);
        let r = random_product(&mut rng, 3, 0.95).and_then(|b| norm2(&b.eval_matrix(&c)?));
        match r {
            Ok(v) => worst = worst.max(v - 1.0),
            Err(e) => failed("c10/von_neumann", e, &mut recs),
        }
    }
    recs.push(CheckRecord::new(
        "c10/von_neumann_excess",
        0.0,
        worst,
        1e-9,
        Cmp::AtMost,
    ));

    // unimodularity on the circle
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let b = match random_product(&mut rng, 6, 0.99) {
            Ok(b) => b,
            Err(e) => {
                failed("c10/unimodular", e, &mut recs);
                continue;
            }
        };
        for j in 0..64 {
            let z = C64::from_polar(1.0, 2.0 * PI * j as f64 / 64.0);
            match b.eval_scalar(z) {
                Ok(w) => worst = worst.max((w.norm() - 1.0).abs()),
                Err(e) => failed("c10/unimodular", e, &mut recs),
            }
        }
    }
    recs.push(CheckRecord::new(
        "c10/unimodular_deviation",
        0.0,
        worst,
        1e-11,
        Cmp::AtMost,
    ));

    // svd reconstruction
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let a = random_matrix(&mut rng, n);
        match svd(&a) {
            Ok(trip) => {
                let rebuilt = ComplexMatrix::from_fn(n, |i, j| {
                    trip.iter().map(|s| s.u[i] * s.v[j].conj() * s.sigma).sum()
                });
                worst = worst.max((&rebuilt - &a).frobenius_norm() / a.frobenius_norm());
            }
            Err(e) => failed("c10/svd", e, &mut recs),
        }
    }
    recs.push(CheckRecord::new(
        "c10/svd_relative_residual",
        0.0,
        worst,
        1e-10,
        Cmp::AtMost,
    ));

    // boundary samples lie in every supporting half-plane and on their own
    // support line
    let (mut outside, mut off_line) = (f64::NEG_INFINITY, 0.0f64);
    let support = |a: &ComplexMatrix, phi: f64| -> Result<f64, Error> {
        let e = C64::from_polar(1.0, phi);
        let h = (&a.scale(e) + &a.adjoint().scale(e.conj())).scale_real(0.5);
        let eig = eigh(&h)?;
        Ok(eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let a = random_matrix(&mut rng, n);
        let curve = match boundary(&a, 64) {
            Ok(c) => c,
            Err(e) => {
                failed("c10/boundary", e, &mut recs);
                continue;
            }
        };
        let tests: Vec<f64> = (0..256).map(|j| 2.0 * PI * j as f64 / 256.0).collect();
        let hs: Result<Vec<f64>, Error> = tests.iter().map(|&p| support(&a, p)).collect();
        let Ok(hs) = hs else { continue };
        for (z, &theta) in curve.points.iter().zip(&curve.angles) {
            for (&p, &h) in tests.iter().zip(&hs) {
                outside = outside.max((z * C64::from_polar(1.0, p)).re - h);
            }
            if let Ok(h) = support(&a, theta) {
                off_line = off_line.max(((z * C64::from_polar(1.0, theta)).re - h).abs());
            }
        }
    }
    recs.push(CheckRecord::new(
        "c10/boundary_outside_excess",
        0.0,
        outside,
        1e-9,
        Cmp::AtMost,
    ));
    recs.push(CheckRecord::new(
        "c10/boundary_support_residual",
        0.0,
        off_line,
        1e-9,
        Cmp::AtMost,
    ));

    // ratio envelope: exact ratios for n ≤ 2, polynomial ratios above
    let (mut worst, mut worst_2x2) = (0.0f64, 0.0f64);
    let cfg = SearchConfig::default();
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, n);
        if n <= 2 {
            match crouzeix_ratio(&a, None, &cfg) {
                Ok(r) => {
                    worst = worst.max(r.ratio);
                    worst_2x2 = worst_2x2.max(r.ratio);
                }
                Err(e) => failed("c10/envelope", e, &mut recs),
            }
        } else {
            for _ in 0..8 {
                let coeffs: Vec<C64> = (0..n).map(|_| random_complex(&mut rng)).collect();
                match polynomial_ratio(&a, &coeffs, 128, 4) {
                    Ok(v) => worst = worst.max(v),
                    Err(e) => failed("c10/envelope", e, &mut recs),
                }
            }
        }
    }
    recs.push(CheckRecord::new(
        "c10/envelope_max_ratio",
        PROVEN_BOUND,
        worst,
        1e-6,
        Cmp::AtMost,
    ));
    recs.push(CheckRecord::new(
        "c10/envelope_max_ratio_2x2",
        2.0,
        worst_2x2,
        1e-6,
        Cmp::AtMost,
    ));
    (recs, Vec::new())
}

/// Runs the selected criteria, concurrently, in criterion order.
pub fn run(opts: &VerifyOptions) -> Vec<CriterionReport> {
    let selected = |id: u8| opts.only.as_ref().is_none_or(|o| o.contains(&id));
    // certificates feed criterion 9, so 1–7 run whenever 9 is selected
    let needed: Vec<u8> = CRITERIA
        .into_iter()
        .filter(|&id| id != 9 && (selected(id) || (selected(9) && id <= 7)))
        .collect();
    let cfg = &opts.search;
    let partials = par_map(&needed, |&id| match id {
        1 => c1(cfg),
        2 => c2(cfg),
        3 => c3(cfg),
        4 => c4(cfg),
        5 => c5(cfg),
        6 => c6(),
        7 => c7(cfg),
        8 => c8(),
        _ => c10(opts.seed),
    });
    let mut certs = Vec::new();
    let mut reports: Vec<CriterionReport> = Vec::new();
    for (&id, (recs, c)) in needed.iter().zip(partials) {
        certs.extend(c);
        if selected(id) {
            reports.push(CriterionReport::new(id, recs));
        }
    }
    if selected(9) {
        reports.push(CriterionReport::new(9, c9(&certs)));
        reports.sort_by_key(|r| r.id);
    }
    if let Some(t) = opts.tol_override {
        for r in &mut reports {
            let checks = std::mem::take(&mut r.checks);
            *r = CriterionReport::new(
                r.id,
                checks.into_iter().map(|c| c.with_tolerance(t)).collect(),
            );
        }
    }
    reports
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary<'a> {
    pub pass: bool,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionSummary<'a>>,
    pub checks: Vec<&'a CheckRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSummary<'a> {
    pub id: u8,
    pub title: &'a str,
    pub pass: bool,
}

pub fn summary(reports: &[CriterionReport]) -> Summary<'_> {
    let checks: Vec<&CheckRecord> = reports.iter().flat_map(|r| &r.checks).collect();
    let failed = checks.iter().filter(|c| !c.pass).count();
    Summary {
        pass: failed == 0 && reports.iter().all(|r| r.pass),
        passed: checks.len() - failed,
        failed,
        criteria: reports
            .iter()
            .map(|r| CriterionSummary {
                id: r.id,
                title: r.title,
                pass: r.pass,
            })
            .collect(),
        checks,
    }
}

/// One line per criterion, failing checks indented beneath.
pub fn render(reports: &[CriterionReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s += &format!(
            "criterion {:>2} {}: {} ({} checks)\n",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.title,
            r.checks.len()
        );
        for c in r.failures() {
            s += &format!(
                "    {} expected {:e} observed {:e} tolerance {:e}\n",
                c.check, c.expected, c.observed, c.tolerance
            );
        }
    }
    s
}
