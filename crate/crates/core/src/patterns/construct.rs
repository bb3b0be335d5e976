use super::{is_acceptable, z_line_extend, AcceptabilityParams, LinedSequence, Pattern, PatternError, Site};
use serde::{Deserialize, Serialize};

/// Which window length bounds `r_{k+1}` from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RBound {
    /// `r_{k+1} ≥ 2·s_{n_k} + 2`.
    CurrentLevel,
    /// `r_{k+1} ≥ 2·s_{n_{k+1}} + 2`.
    NextLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructOptions {
    pub r_bound: RBound,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { r_bound: RBound::NextLevel }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub k: usize,
    pub n: u64,
    pub r: u64,
    pub x: Pattern,
    pub g: u64,
    /// Central `(2g+1)²` replacement with `b_0 = 1`.
    pub b: Pattern,
    pub y: Pattern,
    /// Candidates tested while searching for `(g, b)`.
    pub candidates: u64,
}

impl Stage {
    /// `(g, row-major bits of b)`, the order in which candidates are searched.
    pub fn order_key(&self) -> (u64, Vec<u32>) {
        let b = &self.b;
        let bits = (0..b.height).flat_map(|r| (0..b.width).map(move |c| b.at(r, c).expect("b is total"))).collect();
        (self.g, bits)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructError {
    #[error("candidate budget exhausted at stage {stage} after {tested} candidates")]
    Budget { stage: usize, tested: u64, partial: Vec<Stage> },
    #[error("n_{next} = {n} is even, so it has no odd multiple")]
    EvenModulus { next: usize, n: u64, partial: Vec<Stage> },
    #[error("no acceptable (g, b) exists at stage {stage}")]
    Exhausted { stage: usize, partial: Vec<Stage> },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// `R_n = min { r_k : n | n_k }` over the tabulated levels.
pub fn capital_r(n: u64, params: &AcceptabilityParams) -> Result<u64, PatternError> {
    params
        .n_seq
        .iter()
        .zip(&params.r_seq)
        .filter(|(nk, _)| *nk % n == 0)
        .map(|(_, rk)| *rk)
        .min()
        .ok_or(PatternError::NoDivisibleLevel(n))
}

fn smallest_odd_multiple_at_least(n: u64, bound: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return None;
    }
    let mut m = bound.div_ceil(n).max(1);
    if m.is_multiple_of(2) {
        m += 1;
    }
    Some(m * n)
}

/// `x` with the central `(2g+1)²` block replaced by `b`.
fn replace_center(x: &Pattern, b: &Pattern) -> Pattern {
    let mut y = x.clone();
    y.paste(b);
    y
}

/// Searches `(g, b)` in increasing order: `g` ascending, then `b` by its
/// row-major bit string, with the central bit fixed to 1.
fn find_gb(
    x: &Pattern,
    params: &AcceptabilityParams,
    k: usize,
    budget: u64,
    used: &mut u64,
) -> Result<Option<(u64, Pattern, Pattern, u64)>, PatternError> {
    let r = params.r_seq[k - 1];
    let mut tested = 0u64;
    for g in 0..=(r - 1) / 2 {
        let side = (2 * g + 1) as usize;
        let cells = side * side;
        let center = cells / 2;
        let free = cells - 1;
        // Enumerate free bits as a counter, most significant first, which is
        // the lexicographic order of the full row-major string.
        let total: u128 = 1u128 << free.min(127);
        let mut counter: u128 = 0;
        while counter < total {
            if *used >= budget {
                return Ok(None);
            }
            *used += 1;
            tested += 1;
            let mut bits = Vec::with_capacity(cells);
            let mut fi = 0;
            for i in 0..cells {
                if i == center {
                    bits.push(1);
                } else {
                    bits.push(((counter >> (free - 1 - fi)) & 1) as u32);
                    fi += 1;
                }
            }
            let rows: Vec<Vec<u32>> = bits.chunks(side).map(<[u32]>::to_vec).collect();
            let b = Pattern::from_rows(-(g as i64), g as i64, 2, &rows)?;
            let y = replace_center(x, &b);
            if is_acceptable(&y, params, k)?.is_none() {
                return Ok(Some((g, b, y, tested)));
            }
            counter += 1;
        }
    }
    Err(PatternError::Params)
}

/// The stage-`k` obstruction: `x^(k+1)` with its centre replaced by `b^(k)`,
/// which is tiled by translates of the lined `y^(k)`.
pub fn tile_variant(next_x: &Pattern, stage: &Stage) -> Pattern {
    replace_center(next_x, &stage.b)
}

/// Runs the inductive construction to depth `depth`.
///
/// Stage 1 uses `n_1 = 1`, `r_1 = 2 s_1 + 3` and an `x^(1)` that is zero
/// except for a 1 in its top-left corner. `budget` caps the total number of
/// `(g, b)` candidates tested over all stages.
pub fn construct_example(
    depth: usize,
    z: &mut LinedSequence,
    budget: u64,
    opts: ConstructOptions,
) -> Result<Vec<Stage>, ConstructError> {
    assert!(depth >= 1, "depth must be positive");
    let mut stages: Vec<Stage> = Vec::new();
    let mut n_seq = vec![1u64];
    let s1 = z.tabulate(1)?;
    let mut r_seq = vec![2 * s1 + 3];
    let mut x = Pattern::centered(r_seq[0] as usize, 0);
    let corner = Site::new(x.x_min, x.y_max);
    x.set(corner, Some(1));
    let mut used = 0u64;
    for k in 1..=depth {
        let params = AcceptabilityParams::new(n_seq.clone(), r_seq.clone())?;
        let found = find_gb(&x, &params, k, budget, &mut used).map_err(|e| match e {
            PatternError::Params => ConstructError::Exhausted { stage: k, partial: stages.clone() },
            other => other.into(),
        })?;
        let Some((g, b, y, candidates)) = found else {
            return Err(ConstructError::Budget { stage: k, tested: used, partial: stages });
        };
        stages.push(Stage { k, n: n_seq[k - 1], r: r_seq[k - 1], x: x.clone(), g, b, y: y.clone(), candidates });
        if k == depth {
            break;
        }
        let r_k = r_seq[k - 1];
        let n_next = k as u64 * (r_k + 2);
        let bound_n = match opts.r_bound {
            RBound::CurrentLevel => n_seq[k - 1],
            RBound::NextLevel => n_next,
        };
        let s = z.tabulate(bound_n)?;
        let r_next = smallest_odd_multiple_at_least(n_next, 2 * s + 2).ok_or(ConstructError::EvenModulus {
            next: k + 1,
            n: n_next,
            partial: stages.clone(),
        })?;
        let x_hat = z_line_extend(&x, z)?;
        let y_hat = z_line_extend(&y, z)?;
        let period = (r_k + 2) as i64;
        let half = (r_next / 2) as i64;
        let mut next = Pattern::centered(r_next as usize, 0);
        let reach = half / period + 1;
        for i in -reach..=reach {
            for j in -reach..=reach {
                let tile = if i == 0 && j == 0 { &x_hat } else { &y_hat };
                let t = tile.translated(i * period, j * period);
                for (site, v) in t.sites() {
                    if site.x.abs() <= half && site.y.abs() <= half {
                        next.set(site, Some(v));
                    }
                }
            }
        }
        n_seq.push(n_next);
        r_seq.push(r_next);
        x = next;
    }
    Ok(stages)
}

/// Acceptability parameters read off a run of stages.
pub fn params_of(stages: &[Stage]) -> AcceptabilityParams {
    AcceptabilityParams { n_seq: stages.iter().map(|s| s.n).collect(), r_seq: stages.iter().map(|s| s.r).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_multiples() {
        assert_eq!(smallest_odd_multiple_at_least(11, 8), Some(11));
        assert_eq!(smallest_odd_multiple_at_least(11, 12), Some(33));
        assert_eq!(smallest_odd_multiple_at_least(11, 23), Some(33));
        assert_eq!(smallest_odd_multiple_at_least(11, 34), Some(55));
        assert_eq!(smallest_odd_multiple_at_least(22, 5), None);
    }

    #[test]
    fn capital_r_minimum() {
        let p = AcceptabilityParams::new(vec![1, 11], vec![9, 33]).unwrap();
        assert_eq!(capital_r(1, &p).unwrap(), 9);
        assert_eq!(capital_r(11, &p).unwrap(), 33);
        assert!(capital_r(7, &p).is_err());
    }
}
