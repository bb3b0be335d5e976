//! File formats and argument values.

use aperiodic::certificate::{Profile, Window};
use aperiodic::geometry::Point;
use aperiodic::patterns::{AcceptabilityParams, Site};
use aperiodic::rational::{fmt_q, parse_q, Q};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("reading {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("writing {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("{0}")]
    Value(String),
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Read { path: path.display().to_string(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| InputError::Parse { path: path.display().to_string(), detail: e.to_string() })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), InputError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| InputError::Write { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, text).map_err(|source| InputError::Write { path: path.display().to_string(), source })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), InputError> {
    write_text(path, &to_json(v))
}

pub fn rational(s: &str) -> Result<Q, InputError> {
    parse_q(s).map_err(|e| InputError::Value(e.to_string()))
}

/// `X,Y` with rational coordinates.
pub fn point(s: &str) -> Result<Point, InputError> {
    let (x, y) = s.split_once(',').ok_or_else(|| InputError::Value(format!("expected X,Y, got {s:?}")))?;
    Ok(Point::new(rational(x)?, rational(y)?))
}

/// `H` for the square `[-H, H]²`, or `X0,Y0,X1,Y1`.
pub fn window(s: &str) -> Result<Window, InputError> {
    let parts: Vec<&str> = s.split(',').collect();
    let w = match parts.as_slice() {
        [h] => Window::square(rational(h)?),
        [a, b, c, d] => Window::new(rational(a)?, rational(b)?, rational(c)?, rational(d)?),
        _ => return Err(InputError::Value(format!("expected H or X0,Y0,X1,Y1, got {s:?}"))),
    };
    if w.min.x > w.max.x || w.min.y > w.max.y {
        return Err(InputError::Value(format!("window {s:?} is empty")));
    }
    Ok(w)
}

pub fn window_text(w: &Window) -> String {
    [&w.min.x, &w.min.y, &w.max.x, &w.max.y].map(fmt_q).join(",")
}

/// A named certificate profile or a JSON profile file.
pub fn profile(s: &str) -> Result<Profile, InputError> {
    if let Some(p) = Profile::named(s) {
        return Ok(p);
    }
    let path = Path::new(s);
    if path.exists() {
        return read_json(path);
    }
    Err(InputError::Value(format!("unknown profile {s:?}")))
}

/// Acceptability parameters as `N1,N2,..:R1,R2,..` or a JSON file with
/// `n_seq` and `r_seq`.
pub fn acceptability(s: &str) -> Result<AcceptabilityParams, InputError> {
    let path = Path::new(s);
    if path.exists() {
        let p: AcceptabilityParams = read_json(path)?;
        return AcceptabilityParams::new(p.n_seq, p.r_seq).map_err(|e| InputError::Value(e.to_string()));
    }
    let bad = || InputError::Value(format!("expected N1,N2,..:R1,R2,.. or a file, got {s:?}"));
    let (n, r) = s.split_once(':').ok_or_else(bad)?;
    let list =
        |t: &str| t.split(',').map(|v| v.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>();
    AcceptabilityParams::new(list(n)?, list(r)?).map_err(|e| InputError::Value(e.to_string()))
}

/// One site per line as `x y` or `x,y`; blank lines and `#` comments are
/// skipped.
pub fn parse_region(text: &str) -> Result<Vec<Site>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split([',', ' ', '\t']).filter(|t| !t.is_empty()).collect();
        let site = match parts.as_slice() {
            [x, y] => x.parse().ok().zip(y.parse().ok()).map(|(x, y)| Site::new(x, y)),
            _ => None,
        };
        out.push(site.ok_or_else(|| format!("line {}: expected two integers, got {line:?}", i + 1))?);
    }
    Ok(out)
}

pub fn region_text(sites: &[Site]) -> String {
    sites.iter().map(|s| format!("{} {}\n", s.x, s.y)).collect()
}

pub fn read_region(path: &Path) -> Result<Vec<Site>, InputError> {
    parse_region(&read_text(path)?).map_err(|detail| InputError::Parse { path: path.display().to_string(), detail })
}

/// What produced an output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<PathBuf>,
    pub profile: Option<String>,
    pub window: Option<String>,
    pub budget: Option<u64>,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunManifest {
    pub fn write(&self) -> Result<(), InputError> {
        write_json(&self.out.join("manifest.json"), self)
    }
}
