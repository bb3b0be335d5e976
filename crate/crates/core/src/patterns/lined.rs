use super::{Pattern, PatternError, Site};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The first `len` bits of the Thue–Morse sequence (`z_i` = parity of popcount(i)).
pub fn thue_morse(len: usize) -> Vec<u8> {
    (0..len).map(|i| (i.count_ones() % 2) as u8).collect()
}

/// A binary word together with window lengths `s_n`: every length-`s_n`
/// subword of `bits` contains positions `i < j`, `j ≡ i (mod n)`, with
/// different bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinedSequence {
    pub bits: Vec<u8>,
    pub s_table: BTreeMap<u64, u64>,
}

impl LinedSequence {
    pub fn thue_morse(len: usize) -> Self {
        LinedSequence { bits: thue_morse(len), s_table: BTreeMap::new() }
    }

    /// Least window length forcing an `n`-aperiodic pair within `bits`, or
    /// `None` if even the whole word is `n`-periodic.
    ///
    /// A window `[a, a+s)` lacks a pair iff `z_i = z_{i+n}` for every
    /// `i ∈ [a, a+s-n)`, so `s_n = n + 1 + (longest run of such equalities)`.
    pub fn window_for(&self, n: u64) -> Option<u64> {
        let n = n as usize;
        if self.bits.len() <= n {
            return None;
        }
        let mut longest = 0usize;
        let mut run = 0usize;
        let mut any_break = false;
        for i in 0..self.bits.len() - n {
            if self.bits[i] == self.bits[i + n] {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
                any_break = true;
            }
        }
        if !any_break {
            return None;
        }
        let s = n + 1 + longest;
        (s <= self.bits.len()).then_some(s as u64)
    }

    /// Computes and stores `s_n`, returning it.
    pub fn tabulate(&mut self, n: u64) -> Result<u64, PatternError> {
        if let Some(&s) = self.s_table.get(&n) {
            return Ok(s);
        }
        let s =
            self.window_for(n).ok_or(PatternError::ShortSequence { need: n as usize + 2, have: self.bits.len() })?;
        self.s_table.insert(n, s);
        Ok(s)
    }

    pub fn s(&self, n: u64) -> Option<u64> {
        self.s_table.get(&n).copied()
    }
}

/// Surrounds a square `N×N` pattern with a one-cell frame whose sides, read
/// counter-clockwise and excluding corners, are the first `N` bits of `z`.
/// Corner cells are set to 0.
pub fn z_line_extend(p: &Pattern, z: &LinedSequence) -> Result<Pattern, PatternError> {
    let n = p.width;
    if p.height != n {
        return Err(PatternError::Dimension { w: p.width, h: p.height, r: n as u64 });
    }
    if z.bits.len() < n {
        return Err(PatternError::ShortSequence { need: n, have: z.bits.len() });
    }
    let mut out = Pattern::filled(p.x_min - 1, p.y_max + 1, n + 2, n + 2, p.alphabet.max(2), 0);
    out.paste(p);
    let (x0, x1) = (p.x_min - 1, p.x_max() + 1);
    let (y0, y1) = (p.y_min() - 1, p.y_max + 1);
    for i in 0..n {
        let b = Some(z.bits[i] as u32);
        let i = i as i64;
        out.set(Site::new(x0 + 1 + i, y0), b); // bottom, left to right
        out.set(Site::new(x1, y0 + 1 + i), b); // right, bottom to top
        out.set(Site::new(x1 - 1 - i, y1), b); // top, right to left
        out.set(Site::new(x0, y1 - 1 - i), b); // left, top to bottom
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_prefix() {
        assert_eq!(thue_morse(8), vec![0, 1, 1, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn s1_is_three() {
        // Thue–Morse has squares 00/11 but no cubes.
        let z = LinedSequence::thue_morse(1024);
        assert_eq!(z.window_for(1), Some(3));
    }

    #[test]
    fn single_cell_frame() {
        let z = LinedSequence::thue_morse(16);
        let p = Pattern::centered(1, 0);
        let e = z_line_extend(&p, &z).unwrap();
        assert_eq!((e.width, e.height), (3, 3));
        for s in [Site::new(0, -1), Site::new(1, 0), Site::new(0, 1), Site::new(-1, 0)] {
            assert_eq!(e.get(s), Some(0));
        }
        assert_eq!(e.get(Site::new(0, 0)), Some(0));
    }

    #[test]
    fn short_sequence_rejected() {
        let z = LinedSequence::thue_morse(2);
        assert!(z_line_extend(&Pattern::centered(3, 0), &z).is_err());
    }
}
