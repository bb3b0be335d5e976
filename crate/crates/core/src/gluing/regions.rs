use super::{GlueError, Side};
use crate::certificate::{LocalRect, Profile, Window};
use crate::geometry::Point;
use crate::patterns::Site;
use crate::rational::{ceil_int, floor_int, int, to_f64, Q};
use num_traits::ToPrimitive;
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Sites closer than this (squared) to `E_y` are kept out of `E_x`.
const NEAR2: i64 = 9;
/// Margin of the worked area around the bounding box of `E_y`.
const AREA_MARGIN: i64 = 5;

const NEIGHBORS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// The part of the plane left over by a union of open unit squares
/// `s + (-1, 1)²`, as closed cells, edges and isolated points.
#[derive(Debug, Clone, Default)]
pub struct Zone {
    pieces: Vec<LocalRect>,
    approx: Vec<[f64; 4]>,
}

impl Zone {
    /// Complement of the squares around `member` sites; non-members all
    /// lie in `[lo, hi]`.
    fn from_members(lo: Site, hi: Site, member: impl Fn(Site) -> bool) -> Zone {
        let free = |x: i64, y: i64| x >= lo.x && x <= hi.x && y >= lo.y && y <= hi.y && !member(Site::new(x, y));
        let cell = |x: i64, y: i64| free(x, y) && free(x + 1, y) && free(x, y + 1) && free(x + 1, y + 1);
        let mut rects = Vec::new();
        let r = |x0: i64, x1: i64, y0: i64, y1: i64| LocalRect { x0: int(x0), x1: int(x1), y0: int(y0), y1: int(y1) };
        for y in lo.y..hi.y {
            let mut x = lo.x;
            while x < hi.x {
                if !cell(x, y) {
                    x += 1;
                    continue;
                }
                let start = x;
                while x < hi.x && cell(x, y) {
                    x += 1;
                }
                rects.push(r(start, x, y, y + 1));
            }
        }
        for y in lo.y..=hi.y {
            for x in lo.x..=hi.x {
                if !free(x, y) {
                    continue;
                }
                if free(x + 1, y) && !cell(x, y) && !cell(x, y - 1) {
                    rects.push(r(x, x + 1, y, y));
                }
                if free(x, y + 1) && !cell(x, y) && !cell(x - 1, y) {
                    rects.push(r(x, x, y, y + 1));
                }
                if NEIGHBORS.iter().all(|(dx, dy)| !free(x + dx, y + dy)) {
                    rects.push(r(x, x, y, y));
                }
            }
        }
        let approx = rects.iter().map(|p| [to_f64(&p.x0), to_f64(&p.x1), to_f64(&p.y0), to_f64(&p.y1)]).collect();
        Zone { pieces: rects, approx }
    }

    pub fn pieces(&self) -> &[LocalRect] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Pieces whose distance to `p` may be minimal: a float pass picks the
    /// candidates, exact arithmetic decides among them.
    fn candidates(&self, p: &Point) -> Vec<usize> {
        let (px, py) = (to_f64(&p.x), to_f64(&p.y));
        let d: Vec<f64> = self
            .approx
            .iter()
            .map(|[x0, x1, y0, y1]| {
                let dx = (x0 - px).max(px - x1).max(0.0);
                let dy = (y0 - py).max(py - y1).max(0.0);
                dx.hypot(dy)
            })
            .collect();
        let m = d.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-6 * (1.0 + m) + 1e-3;
        (0..d.len()).filter(|&i| d[i] <= m + tol).collect()
    }

    /// Pieces whose bounding box may meet the segment `ab`.
    pub fn near_segment(&self, a: &Point, b: &Point) -> impl Iterator<Item = &LocalRect> {
        let (ax, ay, bx, by) = (to_f64(&a.x), to_f64(&a.y), to_f64(&b.x), to_f64(&b.y));
        let tol = 1e-6 * (1.0 + ax.abs().max(bx.abs()).max(ay.abs()).max(by.abs()));
        let (x0, x1, y0, y1) = (ax.min(bx) - tol, ax.max(bx) + tol, ay.min(by) - tol, ay.max(by) + tol);
        self.pieces
            .iter()
            .zip(&self.approx)
            .filter(move |(_, [px0, px1, py0, py1])| *px0 <= x1 && x0 <= *px1 && *py0 <= y1 && y0 <= *py1)
            .map(|(r, _)| r)
    }

    pub fn dist2(&self, p: &Point) -> Option<Q> {
        self.candidates(p).into_iter().map(|i| nearest_on(&self.pieces[i], p).dist2(p)).min()
    }

    /// Nearest point, ties to the smaller `(x, y)`.
    pub fn nearest(&self, p: &Point) -> Option<Point> {
        self.candidates(p)
            .into_iter()
            .map(|i| nearest_on(&self.pieces[i], p))
            .min_by(|a, b| a.dist2(p).cmp(&b.dist2(p)).then_with(|| (&a.x, &a.y).cmp(&(&b.x, &b.y))))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.candidates(p).into_iter().any(|i| self.pieces[i].contains(p))
    }
}

fn nearest_on(r: &LocalRect, p: &Point) -> Point {
    let clamp = |v: &Q, lo: &Q, hi: &Q| v.clone().max(lo.clone()).min(hi.clone());
    Point::new(clamp(&p.x, &r.x0, &r.x1), clamp(&p.y, &r.y0, &r.y1))
}

/// Zones and gap of a glue run. Everything outside the area
/// `[area_lo, area_hi]` belongs to `E_x`.
#[derive(Debug, Clone)]
pub struct RegionSetup {
    pub e_y: BTreeSet<Site>,
    pub area_lo: Site,
    pub area_hi: Site,
    e_x: HashSet<Site>,
    pub gap_sites: BTreeSet<Site>,
    /// Squared diameter of the open zone around `E_y`.
    pub diameter2: Q,
    /// Least squared distance between `E_x` and `E_y`.
    pub separation2: i64,
    pub n0: usize,
    pub not_x: Zone,
    pub not_y: Zone,
    pub gap: Zone,
}

impl RegionSetup {
    pub fn in_area(&self, s: Site) -> bool {
        s.x >= self.area_lo.x && s.x <= self.area_hi.x && s.y >= self.area_lo.y && s.y <= self.area_hi.y
    }

    pub fn in_x(&self, s: Site) -> bool {
        !self.in_area(s) || self.e_x.contains(&s)
    }

    pub fn in_y(&self, s: Site) -> bool {
        self.e_y.contains(&s)
    }

    pub fn side_of(&self, s: Site) -> Option<Side> {
        if self.in_y(s) {
            Some(Side::Y)
        } else if self.in_x(s) {
            Some(Side::X)
        } else {
            None
        }
    }

    /// Sites `s` with `|p - s|_∞ < 1`.
    fn sites_near(p: &Point) -> Vec<Site> {
        let axis = |v: &Q| {
            let (f, c) = (floor_int(v).to_i64().expect("fits i64"), ceil_int(v).to_i64().expect("fits i64"));
            if f == c {
                vec![f]
            } else {
                vec![f, c]
            }
        };
        let (xs, ys) = (axis(&p.x), axis(&p.y));
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| Site::new(x, y))).collect()
    }

    /// Whether `p` lies in the open zone `E_side + (-1, 1)²`.
    pub fn in_zone(&self, side: Side, p: &Point) -> bool {
        Self::sites_near(p).into_iter().any(|s| match side {
            Side::X => self.in_x(s),
            Side::Y => self.in_y(s),
        })
    }

    /// Whether `p` lies in the closed gap.
    pub fn in_gap(&self, p: &Point) -> bool {
        !self.in_zone(Side::X, p) && !self.in_zone(Side::Y, p)
    }

    /// Squared distance from `p` to the complement of a zone.
    pub fn outside_dist2(&self, side: Side, p: &Point) -> Q {
        if !self.in_zone(side, p) {
            return Q::from_integer(0.into());
        }
        let z = match side {
            Side::X => &self.not_x,
            Side::Y => &self.not_y,
        };
        z.dist2(p).expect("a zone complement is never empty")
    }

    pub fn nearest_gap_point(&self, p: &Point) -> Point {
        if self.in_gap(p) {
            return p.clone();
        }
        self.gap.nearest(p).expect("the gap is never empty")
    }

    pub fn is_gap_site(&self, s: &Site) -> bool {
        self.gap_sites.contains(s)
    }
}

/// Sites of `within` 4-connected to some start.
fn flood(within: &BTreeSet<Site>, starts: impl Iterator<Item = Site>) -> HashSet<Site> {
    let mut seen: HashSet<Site> = starts.collect();
    let mut queue: VecDeque<Site> = seen.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        for (dx, dy) in NEIGHBORS {
            let t = Site::new(s.x + dx, s.y + dy);
            if within.contains(&t) && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Squared diameter of `⋃ s + (-1, 1)²`: the farthest pair of square
/// corners, found on their convex hull.
fn zone_diameter2(sites: &BTreeSet<Site>) -> i64 {
    let mut pts: Vec<(i64, i64)> =
        sites.iter().flat_map(|s| [(-1, -1), (1, -1), (1, 1), (-1, 1)].map(|(dx, dy)| (s.x + dx, s.y + dy))).collect();
    pts.sort_unstable();
    pts.dedup();
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best = 0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2));
        }
    }
    best
}

/// Zones, gap and level threshold for gluing along a finite, 4-connected
/// `E_y` without holes.
pub fn make_regions(e_y: &[Site], p: &Profile, window: &Window) -> Result<RegionSetup, GlueError> {
    let e_y: BTreeSet<Site> = e_y.iter().copied().collect();
    let first = *e_y.iter().next().ok_or(GlueError::EmptyRegion)?;
    if let Some(s) = e_y.iter().find(|s| !window.contains_site(s)) {
        return Err(GlueError::OutsideWindow(*s));
    }
    let reached = flood(&e_y, std::iter::once(first));
    if let Some(s) = e_y.iter().find(|s| !reached.contains(s)) {
        return Err(GlueError::NotConnected(*s));
    }
    let (xs, ys) = (e_y.iter().map(|s| s.x), e_y.iter().map(|s| s.y));
    let lo = Site::new(xs.clone().min().unwrap() - AREA_MARGIN, ys.clone().min().unwrap() - AREA_MARGIN);
    let hi = Site::new(xs.max().unwrap() + AREA_MARGIN, ys.max().unwrap() + AREA_MARGIN);
    let in_area = |s: Site| s.x >= lo.x && s.x <= hi.x && s.y >= lo.y && s.y <= hi.y;
    let boundary = |s: Site| s.x == lo.x || s.x == hi.x || s.y == lo.y || s.y == hi.y;

    let area_sites = (lo.y..=hi.y).flat_map(|y| (lo.x..=hi.x).map(move |x| Site::new(x, y)));
    let open: BTreeSet<Site> = area_sites.clone().filter(|s| !e_y.contains(s)).collect();
    let outside = flood(&open, open.iter().copied().filter(|&s| boundary(s)));
    if let Some(s) = open.iter().find(|s| !outside.contains(s)) {
        return Err(GlueError::HasHole(*s));
    }

    let mut near: HashSet<Site> = HashSet::new();
    for s in &e_y {
        for dy in -3..=3i64 {
            for dx in -3..=3i64 {
                if dx * dx + dy * dy <= NEAR2 {
                    near.insert(Site::new(s.x + dx, s.y + dy));
                }
            }
        }
    }
    let mut e_x: HashSet<Site> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in area_sites.clone().filter(|&s| boundary(s)) {
        e_x.insert(s);
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        for (dx, dy) in NEIGHBORS {
            let t = Site::new(s.x + dx, s.y + dy);
            if in_area(t) && !near.contains(&t) && e_x.insert(t) {
                queue.push_back(t);
            }
        }
    }
    let gap_sites: BTreeSet<Site> = area_sites.filter(|s| !e_x.contains(s) && !e_y.contains(s)).collect();

    let mut separation2 = i64::MAX;
    for s in &e_y {
        for dy in -4..=4i64 {
            for dx in -4..=4i64 {
                let t = Site::new(s.x + dx, s.y + dy);
                if !in_area(t) || e_x.contains(&t) {
                    separation2 = separation2.min(dx * dx + dy * dy);
                }
            }
        }
    }
    if separation2 <= NEAR2 {
        return Err(GlueError::Separation(separation2));
    }

    let diameter2 = int(zone_diameter2(&e_y));
    let n0 = (1..=p.levels.len()).find(|&n| int(100) * &diameter2 < p.r(n) * p.r(n)).unwrap_or(p.levels.len() + 1);

    let is_x = |s: Site| !in_area(s) || e_x.contains(&s);
    let not_x = Zone::from_members(lo, hi, is_x);
    let not_y = Zone::from_members(lo, hi, |s| e_y.contains(&s));
    let gap = Zone::from_members(lo, hi, |s| is_x(s) || e_y.contains(&s));
    if gap.is_empty() {
        return Err(GlueError::EmptyGap);
    }
    Ok(RegionSetup { e_y, area_lo: lo, area_hi: hi, e_x, gap_sites, diameter2, separation2, n0, not_x, not_y, gap })
}
