//! Parsers for the CLI spec grammars: kernels, radius grids, maps, and points.

use ballmap::func1d::Func1D;
use ballmap::holomap::HoloMap;
use ballmap::kernel::{registry, Kernel};
use ballmap::linalg::CVec;
use ballmap::map::{BallMap, Func1DMap};
use ballmap::{Error, Result, C64};

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("cannot parse {what} from '{s}'")))
}

/// `mobius:A,B` or `generic:NAME`.
pub fn parse_kernel(s: &str) -> Result<Kernel<f64>> {
    if let Some(rest) = s.strip_prefix("mobius:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::InvalidParam(format!(
                "expected mobius:A,B, got '{s}'"
            )));
        }
        Kernel::mobius(parse_f64(parts[0], "A")?, parse_f64(parts[1], "B")?)
    } else if let Some(name) = s.strip_prefix("generic:") {
        registry(name)
            .ok_or_else(|| Error::InvalidParam(format!("unknown generic kernel '{name}'")))
    } else {
        Err(Error::InvalidParam(format!(
            "kernel spec must be mobius:A,B or generic:NAME, got '{s}'"
        )))
    }
}

/// `start:end:count` or a single value.
pub fn parse_radius_grid(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParam(format!(
                "expected start:end:count, got '{s}'"
            )));
        }
        let start = parse_f64(parts[0], "grid start")?;
        let end = parse_f64(parts[1], "grid end")?;
        let count: usize = parts[2].parse().map_err(|_| {
            Error::InvalidParam(format!("cannot parse grid count from '{}'", parts[2]))
        })?;
        if count == 0 {
            return Err(Error::InvalidParam("grid count must be positive".into()));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        Ok((0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        Ok(vec![parse_f64(s, "radius")?])
    }
}

/// `re,im;re,im;...`
pub fn parse_point(s: &str) -> Result<CVec<f64>> {
    let mut entries = Vec::new();
    for part in s.split(';') {
        let nums: Vec<&str> = part.split(',').collect();
        if nums.len() != 2 {
            return Err(Error::InvalidParam(format!(
                "expected re,im pairs separated by ';', got '{s}'"
            )));
        }
        entries.push(C64::new(
            parse_f64(nums[0], "re")?,
            parse_f64(nums[1], "im")?,
        ));
    }
    if entries.is_empty() {
        return Err(Error::InvalidParam(
            "point must have at least one component".into(),
        ));
    }
    Ok(CVec(entries))
}

/// `identity` | `koebe` | `mobius-starlike:A,B,c_re[,c_im]` | FILE.json
pub fn parse_func1d(s: &str) -> Result<Func1D<f64>> {
    match s {
        "identity" => Ok(Func1D::Identity),
        "koebe" => Ok(Func1D::Koebe),
        other => {
            if let Some(rest) = other.strip_prefix("mobius-starlike:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() < 3 || parts.len() > 4 {
                    return Err(Error::InvalidParam(format!(
                        "expected mobius-starlike:A,B,c_re[,c_im], got '{s}'"
                    )));
                }
                let c_im = if parts.len() == 4 {
                    parse_f64(parts[3], "c_im")?
                } else {
                    0.0
                };
                return Func1D::mobius_starlike(
                    parse_f64(parts[0], "A")?,
                    parse_f64(parts[1], "B")?,
                    C64::new(parse_f64(parts[2], "c_re")?, c_im),
                );
            }
            if other.ends_with(".json") {
                let text = std::fs::read_to_string(other)
                    .map_err(|e| Error::InvalidParam(format!("cannot read {other}: {e}")))?;
                return Func1D::from_json(&text);
            }
            Err(Error::InvalidParam(format!(
                "unknown 1-D function spec '{s}'"
            )))
        }
    }
}

/// A membership subject: a polynomial map or a 1-D disk function.
pub enum Subject {
    Poly(HoloMap<f64>),
    Disk(Func1DMap),
}

impl Subject {
    pub fn as_map(&self) -> &dyn BallMap {
        match self {
            Subject::Poly(m) => m,
            Subject::Disk(m) => m,
        }
    }
}

/// `identity` | `neg` | any 1-D spec | FILE.json (tried as a 1-D function,
/// then as a polynomial map).
pub fn parse_map_subject(s: &str, n: usize) -> Result<Subject> {
    match s {
        "identity" => Ok(Subject::Poly(HoloMap::identity(n))),
        "neg" => Ok(Subject::Poly(HoloMap::scaled(n, C64::new(-1.0, 0.0)))),
        other => {
            if other.ends_with(".json") {
                let text = std::fs::read_to_string(other)
                    .map_err(|e| Error::InvalidParam(format!("cannot read {other}: {e}")))?;
                if let Ok(f) = Func1D::from_json(&text) {
                    return Ok(Subject::Disk(Func1DMap(f)));
                }
                return Ok(Subject::Poly(HoloMap::from_json(&text)?));
            }
            Ok(Subject::Disk(Func1DMap(parse_func1d(other)?)))
        }
    }
}
