//! Reading sieve, code, pattern and map files.

use std::path::Path;

use kfree::linmaps::ZLinearMap;
use kfree::rings::EtaleAlgebra;
use kfree::shiftspace::{parse_code, BoxRegion, WindowCode};
use kfree::sieve::{kfree_sieve, parse_sieve};
use kfree::{Pattern, Sieve};

use crate::CliError;

pub fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.to_string()),
        _ => CliError::Io(format!("{path}: {e}")),
    })
}

pub fn sieve(path: &str) -> Result<Sieve, CliError> {
    Ok(parse_sieve(&read(path)?)?)
}

pub fn code(path: &str) -> Result<WindowCode, CliError> {
    Ok(parse_code(&read(path)?)?)
}

pub fn algebra(s: &str) -> Result<EtaleAlgebra, CliError> {
    Ok(EtaleAlgebra::parse(s)?)
}

/// A finite pattern with the box it is known on and the box to report.
pub struct PatternInput {
    pub pattern: Pattern,
    pub known: Option<BoxRegion>,
    pub region: Option<BoxRegion>,
}

/// Pattern file: `algebra`, `points`, optional `known` and `region` boxes.
pub fn pattern_file(path: &str, fallback: &EtaleAlgebra) -> Result<PatternInput, CliError> {
    let text = read(path)?;
    let mut alg = None;
    let mut points = None;
    let (mut known, mut region) = (None, None);
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "algebra" => alg = Some(EtaleAlgebra::parse(rest)?),
            "points" => points = Some(rest.to_string()),
            "known" => known = Some(BoxRegion::parse(rest.trim())?),
            "region" => region = Some(BoxRegion::parse(rest.trim())?),
            other => {
                return Err(
                    kfree::Error::Parse(format!("{path}: unknown pattern line `{other}`")).into(),
                )
            }
        }
    }
    let alg = alg.unwrap_or_else(|| fallback.clone());
    if &alg != fallback {
        return Err(kfree::Error::ComponentMismatch(format!(
            "{path} is over {alg}, expected {fallback}"
        ))
        .into());
    }
    let pattern = Pattern::parse(&alg, points.as_deref().unwrap_or(""))?;
    Ok(PatternInput {
        pattern,
        known,
        region,
    })
}

/// `--pattern FILE` or `--points LIST`.
pub fn pattern(
    file: Option<&str>,
    points: Option<&str>,
    alg: &EtaleAlgebra,
) -> Result<PatternInput, CliError> {
    match (file, points) {
        (Some(f), None) => pattern_file(f, alg),
        (None, Some(p)) => Ok(PatternInput {
            pattern: Pattern::parse(alg, p)?,
            known: None,
            region: None,
        }),
        _ => Err(CliError::Usage(
            "give exactly one of --pattern and --points".into(),
        )),
    }
}

fn looks_like_path(s: &str) -> bool {
    s.contains('/') || s.contains('.')
}

/// `incl_Q_sqrt<d>`: the inclusion ℤ → O_{ℚ(√d)}.
fn builtin_map(name: &str) -> Option<Result<ZLinearMap, CliError>> {
    let d: i64 = name.strip_prefix("incl_Q_sqrt")?.parse().ok()?;
    Some((|| {
        let q = EtaleAlgebra::rational();
        let l = EtaleAlgebra::quadratic(d)?;
        Ok(ZLinearMap::from_columns(q, l.clone(), &[l.one::<i64>()]))
    })())
}

/// Map file: `source`, optional `target` (defaults to the source) and
/// `matrix` with row-major entries.
fn map_file(path: &str) -> Result<ZLinearMap, CliError> {
    let text = read(path)?;
    let (mut src, mut tgt, mut entries) = (None, None, None);
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "source" => src = Some(EtaleAlgebra::parse(rest)?),
            "target" => tgt = Some(EtaleAlgebra::parse(rest)?),
            "matrix" => entries = Some(int_list(rest)?),
            other => {
                return Err(
                    kfree::Error::Parse(format!("{path}: unknown map line `{other}`")).into(),
                )
            }
        }
    }
    let src = src.ok_or_else(|| kfree::Error::Parse(format!("{path}: missing `source`")))?;
    let tgt = tgt.unwrap_or_else(|| src.clone());
    let entries =
        entries.ok_or_else(|| kfree::Error::Parse(format!("{path}: missing `matrix`")))?;
    Ok(ZLinearMap::from_row_major(src, tgt, &entries)?)
}

pub fn int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split([',', ' ', ';'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim().parse::<i64>().map_err(|_| {
                CliError::Core(kfree::Error::Parse(format!("`{t}` is not an integer")))
            })
        })
        .collect()
}

pub struct MapArgs<'a> {
    pub map: Option<&'a str>,
    pub source: Option<&'a str>,
    pub target: Option<&'a str>,
    pub matrix: Option<&'a str>,
}

pub fn linear_map(a: &MapArgs) -> Result<ZLinearMap, CliError> {
    match (a.map, a.matrix) {
        (Some(m), None) => {
            if Path::new(m).is_file() {
                map_file(m)
            } else if let Some(b) = builtin_map(m) {
                b
            } else if looks_like_path(m) {
                Err(CliError::FileNotFound(m.to_string()))
            } else {
                Err(CliError::Usage(format!(
                    "`{m}` is neither a map file nor a built-in map"
                )))
            }
        }
        (None, Some(mx)) => {
            let src = algebra(a.source.unwrap_or("Q"))?;
            let tgt = match a.target {
                Some(t) => algebra(t)?,
                None => src.clone(),
            };
            Ok(ZLinearMap::from_row_major(src, tgt, &int_list(mx)?)?)
        }
        _ => Err(CliError::Usage(
            "give exactly one of --map and --matrix".into(),
        )),
    }
}

/// The sieve from `path`, or the k-free sieve of `alg`.
pub fn sieve_or_kfree(path: Option<&str>, alg: &EtaleAlgebra, k: u32) -> Result<Sieve, CliError> {
    let s = match path {
        Some(p) => sieve(p)?,
        None => kfree_sieve(alg, k)?,
    };
    if &s.algebra != alg {
        return Err(kfree::Error::ComponentMismatch(format!(
            "sieve is over {}, map side is {alg}",
            s.algebra
        ))
        .into());
    }
    Ok(s)
}
