//! Finite two-dimensional patterns and their periodicity defects.
//!
//! A pair of sites `u ≡ v (mod n)` (coordinatewise) carrying different
//! symbols is an *n-aperiodic pair*; a pattern without one is consistent
//! with period `n` in both directions.

mod construct;
mod lined;

pub use construct::{
    capital_r, construct_example, params_of, tile_variant, ConstructError, ConstructOptions, RBound, Stage,
};
pub use lined::{thue_morse, z_line_extend, LinedSequence};

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    pub fn congruent(&self, other: &Site, n: u64) -> bool {
        let n = n as i64;
        (self.x - other.x).rem_euclid(n) == 0 && (self.y - other.y).rem_euclid(n) == 0
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern is {w}x{h}, expected a {r}x{r} square")]
    Dimension { w: usize, h: usize, r: u64 },
    #[error("pattern has undefined cells")]
    Partial,
    #[error("level {k} not in 1..={levels}")]
    Level { k: usize, levels: usize },
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    Symbol { symbol: u32, alphabet: u32 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("need {need} bits of z, have {have}")]
    ShortSequence { need: usize, have: usize },
    #[error("no tabulated n_k is divisible by {0}")]
    NoDivisibleLevel(u64),
    #[error("acceptability parameters are not strictly increasing")]
    Params,
}

/// A partial rectangular array of symbols.
///
/// Row 0 is the top row (largest `y`); column 0 is the smallest `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub x_min: i64,
    pub y_max: i64,
    pub width: usize,
    pub height: usize,
    pub alphabet: u32,
    cells: Vec<Option<u32>>,
}

impl Pattern {
    pub fn filled(x_min: i64, y_max: i64, width: usize, height: usize, alphabet: u32, v: u32) -> Self {
        assert!(v < alphabet);
        Pattern { x_min, y_max, width, height, alphabet, cells: vec![Some(v); width * height] }
    }

    /// An `r×r` binary pattern centered at the origin (`r` odd).
    pub fn centered(r: usize, v: u32) -> Self {
        assert!(r % 2 == 1, "centered patterns have odd side");
        let h = (r / 2) as i64;
        Pattern::filled(-h, h, r, r, 2, v)
    }

    /// Builds from rows of symbols, row 0 on top, anchored at `(x_min, y_max)`.
    pub fn from_rows(x_min: i64, y_max: i64, alphabet: u32, rows: &[Vec<u32>]) -> Result<Self, PatternError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let mut cells = Vec::with_capacity(width * height);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(PatternError::Parse { line: i + 2, msg: "ragged row".into() });
            }
            for &s in row {
                if s >= alphabet {
                    return Err(PatternError::Symbol { symbol: s, alphabet });
                }
                cells.push(Some(s));
            }
        }
        Ok(Pattern { x_min, y_max, width, height, alphabet, cells })
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.width as i64 - 1
    }

    pub fn y_min(&self) -> i64 {
        self.y_max - self.height as i64 + 1
    }

    fn index(&self, s: Site) -> Option<usize> {
        if s.x < self.x_min || s.x > self.x_max() || s.y < self.y_min() || s.y > self.y_max {
            return None;
        }
        let row = (self.y_max - s.y) as usize;
        let col = (s.x - self.x_min) as usize;
        Some(row * self.width + col)
    }

    pub fn get(&self, s: Site) -> Option<u32> {
        self.index(s).and_then(|i| self.cells[i])
    }

    pub fn at(&self, row: usize, col: usize) -> Option<u32> {
        self.cells[row * self.width + col]
    }

    pub fn site_of(&self, row: usize, col: usize) -> Site {
        Site::new(self.x_min + col as i64, self.y_max - row as i64)
    }

    pub fn set(&mut self, s: Site, v: Option<u32>) {
        if let Some(v) = v {
            assert!(v < self.alphabet, "symbol outside alphabet");
        }
        let i = self.index(s).expect("site inside the pattern frame");
        self.cells[i] = v;
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Option::is_none)
    }

    /// Defined sites in ascending `(x, y)` order.
    pub fn sites(&self) -> Vec<(Site, u32)> {
        let mut out = Vec::new();
        for col in 0..self.width {
            for row in (0..self.height).rev() {
                if let Some(v) = self.at(row, col) {
                    out.push((self.site_of(row, col), v));
                }
            }
        }
        out
    }

    /// Copies `other` over `self` wherever `other` is defined.
    pub fn paste(&mut self, other: &Pattern) {
        for (s, v) in other.sites() {
            self.set(s, Some(v));
        }
    }

    /// Shifts the pattern by `(dx, dy)`.
    pub fn translated(&self, dx: i64, dy: i64) -> Pattern {
        Pattern { x_min: self.x_min + dx, y_max: self.y_max + dy, ..self.clone() }
    }

    /// The `size×size` sub-pattern whose top-left cell is at `(row, col)`.
    pub fn window(&self, row: usize, col: usize, size: usize) -> Pattern {
        let mut cells = Vec::with_capacity(size * size);
        for r in row..row + size {
            for c in col..col + size {
                cells.push(self.at(r, c));
            }
        }
        let s = self.site_of(row, col);
        Pattern { x_min: s.x, y_max: s.y, width: size, height: size, alphabet: self.alphabet, cells }
    }

    /// Text form: `pattern <w> <h> <alphabet>` then one line per row.
    /// Undefined cells are written as `.`.
    pub fn to_text(&self) -> String {
        let mut out = format!("pattern {} {} {}\n", self.width, self.height, self.alphabet);
        for r in 0..self.height {
            let row: Vec<String> =
                (0..self.width).map(|c| self.at(r, c).map_or(".".to_string(), |v| v.to_string())).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`Pattern::to_text`] output; the pattern is anchored with its
    /// bottom-left cell at the origin.
    pub fn from_text(text: &str) -> Result<Pattern, PatternError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(PatternError::Parse { line: 1, msg: "empty file".into() })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "pattern" {
            return Err(PatternError::Parse { line: 1, msg: "expected `pattern <w> <h> <alphabet>`".into() });
        }
        let num = |s: &str| -> Result<usize, PatternError> {
            s.parse().map_err(|_| PatternError::Parse { line: 1, msg: format!("bad number {s:?}") })
        };
        let (width, height, alphabet) = (num(parts[1])?, num(parts[2])?, num(parts[3])? as u32);
        if alphabet == 0 {
            return Err(PatternError::Parse { line: 1, msg: "alphabet size must be positive".into() });
        }
        let mut cells = Vec::with_capacity(width * height);
        let mut rows = 0;
        for (i, line) in lines {
            rows += 1;
            if rows > height {
                return Err(PatternError::Parse { line: i + 1, msg: "too many rows".into() });
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != width {
                return Err(PatternError::Parse { line: i + 1, msg: format!("expected {width} cells") });
            }
            for t in toks {
                if t == "." {
                    cells.push(None);
                    continue;
                }
                let v: u32 =
                    t.parse().map_err(|_| PatternError::Parse { line: i + 1, msg: format!("bad symbol {t:?}") })?;
                if v >= alphabet {
                    return Err(PatternError::Symbol { symbol: v, alphabet });
                }
                cells.push(Some(v));
            }
        }
        if rows != height {
            return Err(PatternError::Parse { line: rows + 1, msg: format!("expected {height} rows") });
        }
        Ok(Pattern { x_min: 0, y_max: height as i64 - 1, width, height, alphabet, cells })
    }
}

/// The lexicographically least `n`-aperiodic pair `(u, v)` with `u < v`.
pub fn aperiodic_pair(p: &Pattern, n: u64) -> Option<(Site, Site)> {
    aperiodic_pair_in(p.sites(), n)
}

/// [`aperiodic_pair`] over an arbitrary finite set of defined sites.
pub fn aperiodic_pair_in(cells: impl IntoIterator<Item = (Site, u32)>, n: u64) -> Option<(Site, Site)> {
    assert!(n >= 1, "modulus must be positive");
    let nn = n as i64;
    let mut classes: std::collections::BTreeMap<(i64, i64), Vec<(Site, u32)>> = Default::default();
    for (s, v) in cells {
        classes.entry((s.x.rem_euclid(nn), s.y.rem_euclid(nn))).or_default().push((s, v));
    }
    let mut best: Option<(Site, Site)> = None;
    for members in classes.values_mut() {
        members.sort();
        // members are in ascending site order; find the first element with a
        // later element of a different symbol.
        let len = members.len();
        let mut next_diff = vec![None; len];
        for i in (0..len.saturating_sub(1)).rev() {
            next_diff[i] = if members[i + 1].1 != members[i].1 { Some(i + 1) } else { next_diff[i + 1] };
        }
        if let Some((i, j)) = (0..len).find_map(|i| next_diff[i].map(|j| (i, j))) {
            let cand = (members[i].0, members[j].0);
            if best.is_none_or(|b| cand < b) {
                best = Some(cand);
            }
        }
    }
    best
}

/// True iff the `size×size` window at `(row, col)` of a total pattern has an
/// `n`-aperiodic pair.
fn window_has_pair(p: &Pattern, row: usize, col: usize, size: usize, n: usize) -> bool {
    for r in row..row + size {
        for c in col..col + size {
            let v = p.at(r, c);
            if r >= row + n && p.at(r - n, c) != v {
                return true;
            }
            if c >= col + n && p.at(r, c - n) != v {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptabilityParams {
    pub n_seq: Vec<u64>,
    pub r_seq: Vec<u64>,
}

impl AcceptabilityParams {
    pub fn new(n_seq: Vec<u64>, r_seq: Vec<u64>) -> Result<Self, PatternError> {
        let inc = |v: &[u64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|&x| x >= 1);
        if n_seq.len() != r_seq.len() || !inc(&n_seq) || !inc(&r_seq) {
            return Err(PatternError::Params);
        }
        Ok(AcceptabilityParams { n_seq, r_seq })
    }

    pub fn levels(&self) -> usize {
        self.n_seq.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    /// Top-left cell of the offending window as (row, column).
    pub offset: (usize, usize),
}

/// Checks every `r_m×r_m` window (`m ≤ k`) for an `n_m`-aperiodic pair.
///
/// Windows are scanned with `m` ascending, then offsets row-major; the first
/// failing window is returned.
pub fn is_acceptable(p: &Pattern, params: &AcceptabilityParams, k: usize) -> Result<Option<Violation>, PatternError> {
    if k == 0 || k > params.levels() {
        return Err(PatternError::Level { k, levels: params.levels() });
    }
    let r = params.r_seq[k - 1];
    if p.width as u64 != r || p.height as u64 != r {
        return Err(PatternError::Dimension { w: p.width, h: p.height, r });
    }
    if !p.is_total() {
        return Err(PatternError::Partial);
    }
    for m in 1..=k {
        let size = params.r_seq[m - 1] as usize;
        let n = params.n_seq[m - 1] as usize;
        for row in 0..=(p.height - size) {
            for col in 0..=(p.width - size) {
                if !window_has_pair(p, row, col, size, n) {
                    return Ok(Some(Violation { level: m, offset: (row, col) }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_no_pair() {
        assert_eq!(aperiodic_pair(&Pattern::centered(3, 0), 1), None);
    }

    #[test]
    fn two_cells() {
        let p = Pattern::from_rows(0, 0, 2, &[vec![0, 1]]).unwrap();
        assert_eq!(aperiodic_pair(&p, 1), Some((Site::new(0, 0), Site::new(1, 0))));
    }

    #[test]
    fn checkerboard_mod_two() {
        let p = Pattern::from_rows(0, 1, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(aperiodic_pair(&p, 2), None);
        assert!(aperiodic_pair(&p, 1).is_some());
    }

    #[test]
    fn text_round_trip() {
        let mut p = Pattern::from_rows(0, 1, 3, &[vec![0, 2, 1], vec![1, 1, 0]]).unwrap();
        p.set(Site::new(1, 0), None);
        let q = Pattern::from_text(&p.to_text()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn text_rejects_bad_symbols() {
        assert!(matches!(
            Pattern::from_text("pattern 2 1 2\n0 2\n"),
            Err(PatternError::Symbol { symbol: 2, alphabet: 2 })
        ));
        assert!(Pattern::from_text("pattern 2 2 2\n0 1\n").is_err());
    }

    #[test]
    fn all_zero_square_fails_at_origin() {
        let params = AcceptabilityParams::new(vec![1], vec![9]).unwrap();
        let v = is_acceptable(&Pattern::centered(9, 0), &params, 1).unwrap();
        assert_eq!(v, Some(Violation { level: 1, offset: (0, 0) }));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let params = AcceptabilityParams::new(vec![1], vec![9]).unwrap();
        assert!(is_acceptable(&Pattern::centered(7, 0), &params, 1).is_err());
    }
}
