//! Matrix sources: a text file (or `-` for stdin) holding `n` followed by
//! `n` rows of complex entries, or a family name with a parameter such as
//! `jordan:4` or `nonunique:0.42`.

use std::fs;
use std::io::{self, Read};

use crouzeix_core::cases::{self, Family};
use crouzeix_core::matcore::MAX_DIM;
use crouzeix_core::{ComplexMatrix, C64};

use crate::CliError;

/// Where a matrix came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Family(Family, f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Loaded {
    pub source: Source,
    pub matrix: ComplexMatrix,
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `j` for the imaginary unit).
pub fn parse_complex(token: &str) -> Result<C64, CliError> {
    let bad = || CliError::Parse(format!("bad complex entry {token:?}"));
    let s = token.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let z = match s.strip_suffix(['i', 'j']) {
        None => C64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            // split at the last sign that is not a leading sign or an exponent sign
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|_| bad())?,
            };
            C64::new(re.parse::<f64>().map_err(|_| bad())?, im)
        }
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CliError::Parse(format!("non-finite entry {token:?}")));
    }
    Ok(z)
}

/// Text format: first non-comment line `n`, then `n` lines of `n` entries.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, CliError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CliError::Parse("empty matrix input".into()))?;
    let n: usize = header.parse().map_err(|_| {
        CliError::Parse(format!(
            "first line must be the dimension, found {header:?}"
        ))
    })?;
    if n == 0 || n > MAX_DIM {
        return Err(CliError::Parse(format!(
            "dimension must be in 1..={MAX_DIM}, found {n}"
        )));
    }
    let mut data = Vec::with_capacity(n * n);
    for row in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| CliError::Parse(format!("expected {n} rows, found {row}")))?;
        let entries = line
            .split_whitespace()
            .map(parse_complex)
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != n {
            return Err(CliError::Parse(format!(
                "row {} has {} entries, expected {n}",
                row + 1,
                entries.len()
            )));
        }
        data.extend(entries);
    }
    if let Some(extra) = lines.next() {
        return Err(CliError::Parse(format!(
            "unexpected trailing line {extra:?}"
        )));
    }
    Ok(ComplexMatrix::new(n, data)?)
}

/// `family:parameter`, for example `elliptic3:0.5`.
pub fn parse_family(member: &str) -> Option<Result<(Family, f64), CliError>> {
    let (name, value) = member.split_once(':')?;
    let family = Family::from_name(name)?;
    Some(
        value
            .trim()
            .parse::<f64>()
            .map(|p| (family, p))
            .map_err(|_| CliError::Parse(format!("bad parameter {value:?} for {name}"))),
    )
}

/// Resolves a command-line matrix argument.
pub fn load(arg: &str) -> Result<Loaded, CliError> {
    if let Some(parsed) = parse_family(arg) {
        let (family, p) = parsed?;
        let member =
            cases::member(family, p).map_err(|e| CliError::Parse(format!("{arg}: {e}")))?;
        return Ok(Loaded {
            source: Source::Family(family, p),
            matrix: member.matrix,
        });
    }
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Parse(format!("cannot read {arg}: {e}")))?
    };
    Ok(Loaded {
        source: Source::Text(arg.to_string()),
        matrix: parse_matrix(&text)?,
    })
}
