use crate::geometry::Point;
use crate::rational::{frac, from_f64_approx, int, serde_q, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Witnesses per frame. Paper-scale counts do not fit a machine word, so
/// they are kept as an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxCount {
    Count(u64),
    PowerOfTwo { log2: u64 },
}

impl BoxCount {
    pub fn get(&self) -> Option<u64> {
        match *self {
            BoxCount::Count(n) => Some(n),
            BoxCount::PowerOfTwo { log2 } if log2 < 64 => Some(1u64 << log2),
            BoxCount::PowerOfTwo { .. } => None,
        }
    }

    /// Whether the count is at least `2^e`.
    pub fn at_least_pow2(&self, e: u64) -> bool {
        match *self {
            BoxCount::Count(n) => e < 64 && n >= 1u64 << e,
            BoxCount::PowerOfTwo { log2 } => log2 >= e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelParams {
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
    pub n_boxes: BoxCount,
}

impl LevelParams {
    pub fn new(w: Q, h: Q, n_boxes: u64) -> Self {
        LevelParams { w, h, n_boxes: BoxCount::Count(n_boxes) }
    }

    /// Frame radius, `10/9` of the box length.
    pub fn r(&self) -> Q {
        &self.w * frac(10, 9)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub levels: Vec<LevelParams>,
    pub k_dir: usize,
    pub k_sec: usize,
    /// Exact unit vectors; `directions.len() == k_dir`.
    pub directions: Vec<Point>,
    #[serde(with = "serde_q")]
    pub density_factor: Q,
    #[serde(with = "serde_q")]
    pub separation_factor: Q,
}

/// Spacing between neighbouring box axes within a frame, in units of `h`.
pub const STACK_SPACING: i64 = 102;

/// `k` exact rational unit vectors close to the angles `2πj/k`.
///
/// One, two and four directions are the axis directions; otherwise each
/// angle is approximated through the rational parametrization of the circle.
pub fn direction_set(k: usize) -> Vec<Point> {
    let axis = |x: i64, y: i64| Point::new(int(x), int(y));
    match k {
        1 => vec![axis(1, 0)],
        2 => vec![axis(1, 0), axis(-1, 0)],
        4 => vec![axis(1, 0), axis(0, 1), axis(-1, 0), axis(0, -1)],
        _ => (0..k)
            .map(|j| {
                let angle = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                if 2 * j == k {
                    return axis(-1, 0);
                }
                let m = from_f64_approx((angle / 2.0).tan(), 10_000);
                unit_from_slope(&m)
            })
            .collect(),
    }
}

/// `((1-m²)/(1+m²), 2m/(1+m²))`.
pub fn unit_from_slope(m: &Q) -> Point {
    let m2 = m * m;
    let den = Q::one() + &m2;
    Point::new((Q::one() - &m2) / &den, (m * int(2)) / den)
}

impl Profile {
    pub fn new(name: &str, levels: Vec<LevelParams>, k_dir: usize, k_sec: usize) -> Self {
        Profile {
            name: name.to_string(),
            levels,
            k_dir,
            k_sec,
            directions: direction_set(k_dir),
            density_factor: int(10),
            separation_factor: frac(1, 2),
        }
    }

    /// One level, one direction, one section: two boxes per frame.
    pub fn desk1() -> Self {
        Profile::new("desk1", vec![LevelParams::new(int(9900), int(2), 2)], 1, 1)
    }

    /// `desk1` plus a second level of sixteen boxes.
    pub fn desk2() -> Self {
        Profile::new(
            "desk2",
            vec![LevelParams::new(int(9900), int(2), 2), LevelParams::new(int(9_000_000_000), int(100_000), 16)],
            1,
            1,
        )
    }

    /// Two directions and two sections, one level.
    pub fn desk_k2() -> Self {
        Profile::new("desk-k2", vec![LevelParams::new(int(180_000), int(2), 16)], 2, 2)
    }

    /// `desk1` with frames large enough to stack three boxes.
    pub fn wide1() -> Self {
        Profile::new("wide1", vec![LevelParams::new(int(19_800), int(2), 2)], 1, 1)
    }

    /// Four directions and sections: representable, too large for the oracle.
    pub fn desk_k4() -> Self {
        Profile::new("desk-k4", vec![LevelParams::new(int(700_000_000), int(2), 1 << 16)], 4, 4)
    }

    /// A thousand directions and sections with `N_n = 2^(10^6 n²)`.
    pub fn paper_scale() -> Self {
        let mut levels = Vec::new();
        let (mut w, mut h) = (int(10_000), int(1));
        for n in 1..=3u64 {
            levels.push(LevelParams {
                w: w.clone(),
                h: h.clone(),
                n_boxes: BoxCount::PowerOfTwo { log2: 1_000_000 * n * n },
            });
            h = (&w + &h) * int(100);
            w = (&h + &w) * int(100);
        }
        Profile::new("paper", levels, 1000, 1000)
    }

    pub fn named(name: &str) -> Option<Profile> {
        Some(match name {
            "desk1" => Profile::desk1(),
            "desk2" => Profile::desk2(),
            "desk-k2" => Profile::desk_k2(),
            "wide1" => Profile::wide1(),
            "desk-k4" => Profile::desk_k4(),
            "paper" => Profile::paper_scale(),
            _ => return None,
        })
    }

    pub fn level(&self, n: usize) -> &LevelParams {
        &self.levels[n - 1]
    }

    pub fn r(&self, n: usize) -> Q {
        self.level(n).r()
    }

    /// `n²·K_dir·K_sec`.
    pub fn bucket_count(&self, n: usize) -> usize {
        n * n * self.k_dir * self.k_sec
    }

    /// Index of the `(θ, σ)` component, with `σ` starting at 1.
    pub fn component(&self, theta: usize, sigma: usize) -> usize {
        theta * self.k_sec + (sigma - 1)
    }

    pub fn components(&self) -> usize {
        self.k_dir * self.k_sec
    }

    pub fn check(&self) -> ProfileReport {
        let ten = int(10);
        let mut growth = Vec::new();
        let mut count_bound = Vec::new();
        let mut stack_fits = Vec::new();
        for (i, l) in self.levels.iter().enumerate() {
            let n = i + 1;
            if i == 0 {
                growth.push(true);
            } else {
                let prev = &self.levels[i - 1];
                growth.push(l.h > &ten * (&prev.w + &prev.h) && l.w > &ten * (&l.h + &prev.w));
            }
            count_bound.push(l.n_boxes.at_least_pow2(self.bucket_count(n) as u64));
            stack_fits.push(l.n_boxes.get().is_some_and(|nb| stack_reach(&l.h, nb) * int(100) <= l.r()));
        }
        let directions_unit = self.directions.len() == self.k_dir && self.directions.iter().all(|d| d.norm2().is_one());
        let h1_small = self.levels.first().is_none_or(|l| &l.h * int(1000) <= l.w);
        let positive = self.levels.iter().all(|l| l.w > Q::zero() && l.h > Q::zero() && l.n_boxes.get() != Some(0));
        ProfileReport { positive, h1_small, growth, count_bound, stack_fits, directions_unit }
    }

    /// Small enough for exhaustive orientability checks on every frame.
    pub fn executable(&self) -> bool {
        self.levels
            .iter()
            .enumerate()
            .all(|(i, l)| l.n_boxes.get().is_some_and(|nb| nb <= 64) && self.bucket_count(i + 1) <= 16)
    }
}

/// Largest `|offset| + h/2` among `count` boxes stacked at the standard
/// spacing, allowing for the quarter-`h` slack of the exact corner fit.
pub fn stack_reach(h: &Q, count: u64) -> Q {
    let span = int(count.saturating_sub(1) as i64) * int(STACK_SPACING) * h / int(2);
    span + h * frac(3, 4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub positive: bool,
    /// `h_1 <= w_1 / 1000`.
    pub h1_small: bool,
    /// Per level: `h_{n+1} > 10(w_n + h_n)` and `w_{n+1} > 10(h_{n+1} + w_n)`.
    pub growth: Vec<bool>,
    /// Per level: `N_n >= 2^(n² K_dir K_sec)`. Failing this is a warning.
    pub count_bound: Vec<bool>,
    /// Per level: `N_n` boxes stack within the almost-radial band.
    pub stack_fits: Vec<bool>,
    pub directions_unit: bool,
}

impl ProfileReport {
    /// Everything but the count bound.
    pub fn ok(&self) -> bool {
        self.positive
            && self.h1_small
            && self.directions_unit
            && self.growth.iter().all(|&b| b)
            && self.stack_fits.iter().all(|&b| b)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.count_bound
            .iter()
            .enumerate()
            .filter(|(_, ok)| !**ok)
            .map(|(i, _)| format!("level {}: too few boxes to guarantee an unorientable CBC", i + 1))
            .collect()
    }
}
