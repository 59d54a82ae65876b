//! The `ratio`, `sweep`, `identity` and `range` subcommands.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Serialize;

use crouzeix_core::cases::{self, CaseResult, Family};
use crouzeix_core::elliptic::{half_nome_identity_residual, modulus_from_nome};
use crouzeix_core::extremal::{Certificate, CertificateStatus, CONJECTURED_BOUND};
use crouzeix_core::numrange::{
    boundary, fit_conic, nome_for_ellipse, normalize_2x2, DEFAULT_SAMPLES, MIN_SAMPLES,
};
use crouzeix_core::{
    crouzeix_ratio, BoundaryCurve, EllipseGeometry, Error, RangeShape, SearchConfig, C64,
};

use crate::input::{self, Loaded, Source};
use crate::output::{num, opt, sink, write_json, Format, Table};
use crate::CliError;

/// Options shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    /// Relative tie tolerance for the search.
    pub tol: Option<f64>,
}

impl Default for Common {
    fn default() -> Self {
        Self {
            out: None,
            format: None,
            seed: SearchConfig::default().seed,
            tol: None,
        }
    }
}

impl Common {
    pub fn search(&self) -> Result<SearchConfig, CliError> {
        let mut cfg = SearchConfig {
            seed: self.seed,
            ..SearchConfig::default()
        };
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Parse(format!(
                    "--tol must be in (0, 1), found {t}"
                )));
            }
            cfg.tie_tol = t;
        }
        Ok(cfg)
    }

    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        sink(self.out.as_deref())
    }
}

/// Applies `f` to every item on all available cores; results keep the
/// input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

pub fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", num(z.re), sign, num(z.im.abs()))
}

fn fmt_zeros(zs: &[C64]) -> String {
    zs.iter()
        .map(|&z| fmt_complex(z))
        .collect::<Vec<_>>()
        .join(";")
}

fn status_name(s: CertificateStatus) -> &'static str {
    match s {
        CertificateStatus::Passed => "passed",
        CertificateStatus::Failed => "failed",
        CertificateStatus::Indeterminate => "indeterminate",
    }
}

fn shape_name(s: RangeShape) -> &'static str {
    match s {
        RangeShape::Disk => "disk",
        RangeShape::Ellipse => "ellipse",
        RangeShape::Segment => "segment",
    }
}

// ---------------------------------------------------------------------------
// ratio

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub sigma: f64,
    pub overlap: f64,
    pub gap: f64,
    pub status: &'static str,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        Self {
            sigma: c.sigma,
            overlap: c.overlap,
            gap: c.gap,
            status: status_name(c.status),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeJson {
    pub degree: usize,
    pub norm: f64,
    pub zeros: Vec<[f64; 2]>,
    pub dropped: bool,
    pub converged: bool,
    pub certificate: CertificateJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalJson {
    pub degree: usize,
    pub norm: f64,
    pub zeros: Vec<[f64; 2]>,
    pub certificate: CertificateJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryJson {
    pub shape: &'static str,
    pub center: [f64; 2],
    pub rotation: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub focal_distance: f64,
    pub eccentricity: f64,
    /// `null` for a disk.
    pub rho: Option<f64>,
    pub nome: Option<f64>,
    pub modulus: Option<f64>,
}

impl From<&EllipseGeometry> for GeometryJson {
    fn from(g: &EllipseGeometry) -> Self {
        let nome = nome_for_ellipse(g).ok();
        Self {
            shape: shape_name(g.shape),
            center: [g.center.re, g.center.im],
            rotation: g.rotation,
            semi_major: g.semi_major,
            semi_minor: g.semi_minor,
            focal_distance: g.focal_distance(),
            eccentricity: g.eccentricity,
            rho: g.rho.is_finite().then_some(g.rho),
            nome,
            modulus: nome.and_then(|q| modulus_from_nome(q).ok()).map(|p| p.k),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyJson {
    pub family: &'static str,
    pub parameter: f64,
    pub closed_form: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioJson {
    pub dimension: usize,
    pub normal: bool,
    pub ratio: f64,
    pub geometry: Option<GeometryJson>,
    pub degrees: Vec<DegreeJson>,
    pub extremal: Vec<ExtremalJson>,
    pub tie: bool,
    pub certified: bool,
    pub exceeds_conjectured_bound: bool,
    pub family: Option<FamilyJson>,
}

fn pairs(zs: &[C64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

pub fn ratio_report(
    loaded: &Loaded,
    max_degree: Option<usize>,
    cfg: &SearchConfig,
) -> Result<RatioJson, CliError> {
    let r = crouzeix_ratio(&loaded.matrix, max_degree, cfg)?;
    let (degrees, extremal, tie, certified, exceeds) = match &r.extremal {
        Some(x) => (
            x.by_degree
                .iter()
                .map(|d| DegreeJson {
                    degree: d.degree,
                    norm: d.value,
                    zeros: pairs(d.product.zeros()),
                    dropped: d.dropped,
                    converged: d.converged,
                    certificate: (&d.certificate).into(),
                })
                .collect(),
            x.overall
                .iter()
                .map(|e| ExtremalJson {
                    degree: e.degree(),
                    norm: e.value,
                    zeros: pairs(e.product.zeros()),
                    certificate: (&e.certificate).into(),
                })
                .collect(),
            x.is_tie(),
            x.certified,
            x.exceeds_conjectured_bound,
        ),
        None => (Vec::new(), Vec::new(), false, true, false),
    };
    Ok(RatioJson {
        dimension: loaded.matrix.dim(),
        normal: r.normal,
        ratio: r.ratio,
        geometry: r.geometry.as_ref().map(Into::into),
        degrees,
        extremal,
        tie,
        certified,
        exceeds_conjectured_bound: exceeds,
        family: r.family.map(|(f, p, v)| FamilyJson {
            family: f.name(),
            parameter: p,
            closed_form: v,
        }),
    })
}

fn write_ratio_text(r: &RatioJson, mut out: impl Write) -> Result<(), CliError> {
    writeln!(out, "dimension: {}", r.dimension)?;
    if r.normal {
        writeln!(
            out,
            "normal matrix: W(A) is the convex hull of the spectrum"
        )?;
    }
    if let Some(g) = &r.geometry {
        writeln!(
            out,
            "numerical range: {} center {} semi-axes {} {}",
            g.shape,
            fmt_complex(C64::new(g.center[0], g.center[1])),
            num(g.semi_major),
            num(g.semi_minor)
        )?;
        if let (Some(q), Some(k)) = (g.nome, g.modulus) {
            writeln!(out, "nome: {}  modulus: {}", num(q), num(k))?;
        }
    }
    writeln!(out, "ratio: {}", num(r.ratio))?;
    for d in &r.degrees {
        let zs: Vec<C64> = d.zeros.iter().map(|p| C64::new(p[0], p[1])).collect();
        writeln!(
            out,
            "degree {}: norm {} zeros [{}] certificate {} (|u1*v1| {}, gap {}){}",
            d.degree,
            num(d.norm),
            fmt_zeros(&zs),
            d.certificate.status,
            num(d.certificate.overlap),
            num(d.certificate.gap),
            if d.dropped { " reduced degree" } else { "" }
        )?;
    }
    if r.tie {
        let degs: Vec<String> = r.extremal.iter().map(|e| e.degree.to_string()).collect();
        writeln!(
            out,
            "tie: {} co-extremal products (degrees {})",
            r.extremal.len(),
            degs.join(", ")
        )?;
    }
    if !r.certified {
        writeln!(
            out,
            "warning: an optimum came from a search that did not converge"
        )?;
    }
    if let Some(f) = &r.family {
        writeln!(
            out,
            "family: {}:{} closed form {}",
            f.family,
            f.parameter,
            num(f.closed_form)
        )?;
    }
    Ok(())
}

pub fn cmd_ratio(matrix: &str, max_degree: Option<usize>, common: &Common) -> Result<(), CliError> {
    let loaded = input::load(matrix)?;
    let report = ratio_report(&loaded, max_degree, &common.search()?)?;
    if report.exceeds_conjectured_bound {
        eprintln!(
            "WARNING: attained ratio {} exceeds the conjectured bound {CONJECTURED_BOUND}",
            num(report.ratio)
        );
    }
    let out = common.sink()?;
    match common.format {
        None => write_ratio_text(&report, out),
        Some(Format::Json) => write_json(&report, out),
        Some(Format::Csv) => {
            let mut t = Table::new([
                "degree",
                "norm",
                "zeros",
                "dropped",
                "overlap",
                "gap",
                "certificate",
            ]);
            for d in &report.degrees {
                let zs: Vec<C64> = d.zeros.iter().map(|p| C64::new(p[0], p[1])).collect();
                t.push(vec![
                    d.degree.to_string(),
                    num(d.norm),
                    fmt_zeros(&zs),
                    d.dropped.to_string(),
                    num(d.certificate.overlap),
                    num(d.certificate.gap),
                    d.certificate.status.to_string(),
                ]);
            }
            t.write_csv(out)
        }
    }
}

// ---------------------------------------------------------------------------
// sweep

/// Grid of a sweep: `points` values from `from` to `to`, family defaults
/// where unset. Jordan sizes are the integers in `[from, to]`.
pub fn sweep_grid(
    family: Family,
    points: usize,
    from: Option<f64>,
    to: Option<f64>,
) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Parse("--grid must be positive".into()));
    }
    if family == Family::Jordan {
        let lo = from.unwrap_or(2.0);
        let hi = to.unwrap_or_else(|| (lo + points as f64 - 1.0).min(cases::MAX_JORDAN as f64));
        if lo.fract() != 0.0 || hi.fract() != 0.0 || lo > hi {
            return Err(CliError::Parse(
                "Jordan sizes must be integers with from ≤ to".into(),
            ));
        }
        return Ok((lo as usize..=hi as usize).map(|n| n as f64).collect());
    }
    let default = cases::default_grid(family, points);
    let lo = from.unwrap_or(default[0]);
    let hi = to.unwrap_or(*default.last().expect("grid is nonempty"));
    Ok(cases::linspace(lo, hi, points))
}

pub fn sweep_results(
    family: Family,
    grid: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<CaseResult>, CliError> {
    par_map(grid, |&p| {
        cases::member(family, p).and_then(|s| cases::run(s, cfg))
    })
    .into_iter()
    .collect::<Result<Vec<_>, Error>>()
    .map_err(Into::into)
}

pub fn sweep_table(results: &[CaseResult]) -> Table {
    let max_degree = results
        .iter()
        .map(|r| r.member.max_degree())
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = [
        "parameter",
        "predicted_norm",
        "attained_norm",
        "relative_error",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    header.extend((0..=max_degree).map(|m| format!("norm_degree_{m}")));
    header.extend(
        [
            "extremal_degree",
            "tie",
            "certificate_overlap",
            "certificate_gap",
            "map_residual",
            "dcd_bound",
        ]
        .into_iter()
        .map(String::from),
    );
    let mut t = Table::new(header);
    for r in results {
        let mut row = vec![
            num(r.member.parameter),
            num(r.member.predicted_norm),
            num(r.ratio),
            num(r.relative_error()),
        ];
        let best = r.attained.as_ref().and_then(|a| a.overall.first());
        for m in 0..=max_degree {
            row.push(opt(r
                .attained
                .as_ref()
                .and_then(|a| a.degree(m))
                .map(|d| d.value)));
        }
        row.push(best.map(|e| e.degree().to_string()).unwrap_or_default());
        row.push(r.attained.as_ref().is_some_and(|a| a.is_tie()).to_string());
        row.push(opt(best.map(|e| e.certificate.overlap)));
        row.push(opt(best.map(|e| e.certificate.gap)));
        row.push(opt(r.checks.map_residual));
        row.push(opt(r.checks.dcd_bound));
        t.push(row);
    }
    t
}

#[derive(Clone, Debug, Serialize)]
struct SweepRowJson {
    parameter: f64,
    predicted_norm: f64,
    attained_norm: f64,
    relative_error: f64,
    degree_norms: Vec<f64>,
    extremal_zeros: Vec<Vec<[f64; 2]>>,
    certificate: Option<CertificateJson>,
    map_residual: Option<f64>,
    dcd_bound: Option<f64>,
}

pub fn cmd_sweep(
    family: &str,
    points: usize,
    from: Option<f64>,
    to: Option<f64>,
    common: &Common,
) -> Result<(), CliError> {
    let family = Family::from_name(family).ok_or_else(|| {
        CliError::Parse(format!(
            "unknown family {family:?}; expected one of two_by_two, jordan, elliptic3, nonunique"
        ))
    })?;
    let grid = sweep_grid(family, points, from, to)?;
    let results = sweep_results(family, &grid, &common.search()?)?;
    let out = common.sink()?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_table(&results).write_csv(out),
        Format::Json => {
            let rows: Vec<SweepRowJson> = results
                .iter()
                .map(|r| SweepRowJson {
                    parameter: r.member.parameter,
                    predicted_norm: r.member.predicted_norm,
                    attained_norm: r.ratio,
                    relative_error: r.relative_error(),
                    degree_norms: r
                        .attained
                        .as_ref()
                        .map(|a| a.by_degree.iter().map(|d| d.value).collect())
                        .unwrap_or_default(),
                    extremal_zeros: r
                        .attained
                        .as_ref()
                        .map(|a| a.overall.iter().map(|e| pairs(e.product.zeros())).collect())
                        .unwrap_or_default(),
                    certificate: r
                        .attained
                        .as_ref()
                        .and_then(|a| a.overall.first())
                        .map(|e| (&e.certificate).into()),
                    map_residual: r.checks.map_residual,
                    dcd_bound: r.checks.dcd_bound,
                })
                .collect();
            write_json(&rows, out)
        }
    }
}

// ---------------------------------------------------------------------------
// identity

pub const IDENTITY_QMIN: f64 = 1e-3;
pub const IDENTITY_QMAX: f64 = 0.9;
pub const IDENTITY_POINTS: usize = 50;

pub fn identity_table(qmin: f64, qmax: f64, points: usize) -> Result<Table, CliError> {
    if !(qmin > 0.0 && qmin < qmax && qmax < 1.0) {
        return Err(CliError::Parse(format!(
            "need 0 < qmin < qmax < 1, found {qmin} and {qmax}"
        )));
    }
    if points < 2 {
        return Err(CliError::Parse(
            "identity grid needs at least 2 points".into(),
        ));
    }
    let mut t = Table::new(["q", "lhs", "rhs", "residual"]);
    for q in cases::linspace(qmin, qmax, points) {
        let r = half_nome_identity_residual(q)?;
        t.push(vec![num(r.q), num(r.lhs), num(r.rhs), num(r.residual)]);
    }
    Ok(t)
}

pub fn cmd_identity(qmin: f64, qmax: f64, points: usize, common: &Common) -> Result<(), CliError> {
    let t = identity_table(qmin, qmax, points)?;
    let out = common.sink()?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => t.write_csv(out),
        Format::Json => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = t
                .rows
                .iter()
                .map(|r| {
                    t.header
                        .iter()
                        .zip(r)
                        .map(|(h, v)| {
                            (
                                h.clone(),
                                v.parse::<f64>().map_or(serde_json::Value::Null, Into::into),
                            )
                        })
                        .collect()
                })
                .collect();
            write_json(&rows, out)
        }
    }
}

// ---------------------------------------------------------------------------
// range

/// Boundary samples plus the best available geometry: closed form for named
/// families and 2×2 input, a conic fit otherwise.
pub fn range_geometry(
    loaded: &Loaded,
    samples: usize,
) -> Result<(BoundaryCurve, Option<EllipseGeometry>), CliError> {
    if samples < MIN_SAMPLES {
        return Err(CliError::Parse(format!(
            "--samples must be at least {MIN_SAMPLES}"
        )));
    }
    let curve = boundary(&loaded.matrix, samples)?;
    if let Source::Family(f, p) = loaded.source {
        if let Some(map) = cases::member(f, p)?.map {
            return Ok((curve, Some(map.geometry)));
        }
    }
    let geometry = if loaded.matrix.dim() == 2 {
        match normalize_2x2(&loaded.matrix) {
            Ok(c) => Some(c.transform.geometry(c.a, c.d)?),
            Err(Error::TrivialMatrix) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        match fit_conic(&curve) {
            Ok(g) => Some(g),
            Err(Error::NotAnEllipse { .. } | Error::DegenerateGeometry(_)) => None,
            Err(e) => return Err(e.into()),
        }
    };
    Ok((curve, geometry))
}

#[derive(Clone, Debug, Serialize)]
struct RangeJson {
    points: Vec<[f64; 3]>,
    geometry: Option<GeometryJson>,
}

pub fn range_table(curve: &BoundaryCurve, g: Option<&EllipseGeometry>) -> Table {
    let mut t = Table::new([
        "angle",
        "re",
        "im",
        "shape",
        "center_re",
        "center_im",
        "rotation",
        "semi_major",
        "semi_minor",
        "focal_distance",
        "eccentricity",
        "rho",
        "nome",
        "modulus",
    ]);
    let gj = g.map(GeometryJson::from);
    for (z, a) in curve.points.iter().zip(&curve.angles) {
        let mut row = vec![num(*a), num(z.re), num(z.im)];
        match &gj {
            Some(g) => row.extend([
                g.shape.to_string(),
                num(g.center[0]),
                num(g.center[1]),
                num(g.rotation),
                num(g.semi_major),
                num(g.semi_minor),
                num(g.focal_distance),
                num(g.eccentricity),
                opt(g.rho),
                opt(g.nome),
                opt(g.modulus),
            ]),
            None => {
                row.push("other".into());
                row.extend(std::iter::repeat_n(String::new(), 10));
            }
        }
        t.push(row);
    }
    t
}

pub fn cmd_range(matrix: &str, samples: Option<usize>, common: &Common) -> Result<(), CliError> {
    let loaded = input::load(matrix)?;
    let (curve, g) = range_geometry(&loaded, samples.unwrap_or(DEFAULT_SAMPLES))?;
    let out = common.sink()?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => range_table(&curve, g.as_ref()).write_csv(out),
        Format::Json => write_json(
            &RangeJson {
                points: curve
                    .points
                    .iter()
                    .zip(&curve.angles)
                    .map(|(z, a)| [*a, z.re, z.im])
                    .collect(),
                geometry: g.as_ref().map(Into::into),
            },
            out,
        ),
    }
}
