use super::plfn::PlFn;
use super::shapes::{point_segment_dist2, segments_intersect, BBox, Convex, DiamondSpec, Point};
use crate::rational::{serde_q, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Per-level diamond (or rectangle) dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDims {
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
}

impl LevelDims {
    pub fn new(w: Q, h: Q) -> Self {
        LevelDims { w, h }
    }

    pub fn alpha(&self) -> Q {
        &self.h / &self.w
    }
}

/// Equator height plus both jigsaws' breakpoints: equal keys, equal regions.
pub type RegionKey = (Q, Vec<(Q, Q)>, Vec<(Q, Q)>);

/// The region between `ey - lower(x)` and `ey + upper(x)` for `x` in the
/// equator interval; both jigsaws are stored on that whole interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleJigsaw {
    #[serde(with = "serde_q")]
    pub ey: Q,
    pub upper: PlFn,
    pub lower: PlFn,
}

impl DoubleJigsaw {
    pub fn from_diamond(d: &DiamondSpec) -> Self {
        let half_w = &d.w / Q::from_integer(2.into());
        let (lo, hi) = (&d.center.x - &half_w, &d.center.x + &half_w);
        let j = if d.h.is_zero() {
            PlFn::constant(lo, hi, Q::zero())
        } else {
            PlFn::tri(&d.center.x, &(&d.h / Q::from_integer(2.into())), &d.alpha()).expect("positive slope")
        };
        DoubleJigsaw { ey: d.center.y.clone(), upper: j.clone(), lower: j }
    }

    pub fn lo(&self) -> &Q {
        self.upper.lo()
    }

    pub fn hi(&self) -> &Q {
        self.upper.hi()
    }

    /// Equator segment.
    pub fn equator(&self) -> (Point, Point) {
        (Point::new(self.lo().clone(), self.ey.clone()), Point::new(self.hi().clone(), self.ey.clone()))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self.upper.value_at(&p.x), self.lower.value_at(&p.x)) {
            (Some(u), Some(l)) => p.y <= &self.ey + u && p.y >= &self.ey - l,
            _ => false,
        }
    }

    /// Closed vertical cross-section at `x`, if any.
    pub fn section(&self, x: &Q) -> Option<(Q, Q)> {
        let u = self.upper.value_at(x)?;
        let l = self.lower.value_at(x)?;
        Some((&self.ey - l, &self.ey + u))
    }

    /// Boundary polygon: the upper graph left to right, then the lower graph
    /// right to left. Degenerate stretches are kept as zero-width spikes.
    pub fn polygon(&self) -> Vec<Point> {
        let mut out: Vec<Point> =
            self.upper.points().iter().map(|(x, v)| Point::new(x.clone(), &self.ey + v)).collect();
        out.extend(self.lower.points().iter().rev().map(|(x, v)| Point::new(x.clone(), &self.ey - v)));
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    pub fn edges(&self) -> Vec<(Point, Point)> {
        polygon_edges(&self.polygon())
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.polygon()).expect("nonempty region")
    }

    fn with_common_interval(ey: Q, upper: PlFn, lower: PlFn) -> Self {
        let lo = upper.lo().min(lower.lo()).clone();
        let hi = upper.hi().max(lower.hi()).clone();
        DoubleJigsaw { ey, upper: upper.extended(&lo, &hi), lower: lower.extended(&lo, &hi) }
    }

    /// Adjoins `d`: its north pole's triangle is maxed into the upper jigsaw
    /// when the pole is strictly above the equator line, and the south pole's
    /// triangle, reflected across that line, into the lower one when strictly
    /// below. A flat diamond changes nothing.
    pub fn adjoin(&self, d: &DiamondSpec) -> Self {
        if d.h.is_zero() {
            return self.clone();
        }
        let alpha = d.alpha();
        let north = d.north().y - &self.ey;
        let south = &self.ey - d.south().y;
        let upper = if north.is_positive() {
            self.upper.max(&PlFn::tri(&d.center.x, &north, &alpha).expect("positive slope"))
        } else {
            self.upper.clone()
        };
        let lower = if south.is_positive() {
            self.lower.max(&PlFn::tri(&d.center.x, &south, &alpha).expect("positive slope"))
        } else {
            self.lower.clone()
        };
        Self::with_common_interval(self.ey.clone(), upper, lower)
    }

    /// Largest vertical thickness.
    pub fn max_thickness(&self) -> Q {
        let mut xs: Vec<&Q> = self.upper.points().iter().chain(self.lower.points()).map(|p| &p.0).collect();
        xs.sort();
        xs.dedup();
        xs.into_iter()
            .map(|x| self.upper.value_at(x).unwrap_or_default() + self.lower.value_at(x).unwrap_or_default())
            .max()
            .unwrap_or_default()
    }

    /// Canonical form for comparing regions.
    pub fn key(&self) -> RegionKey {
        (self.ey.clone(), self.upper.points().to_vec(), self.lower.points().to_vec())
    }
}

pub fn polygon_edges(poly: &[Point]) -> Vec<(Point, Point)> {
    if poly.len() == 1 {
        return vec![(poly[0].clone(), poly[0].clone())];
    }
    (0..poly.len()).map(|i| (poly[i].clone(), poly[(i + 1) % poly.len()].clone())).collect()
}

/// Squared Euclidean distance between a diamond and a double jigsaw (0 when
/// they meet).
pub fn diamond_region_dist2(d: &DiamondSpec, g: &DoubleJigsaw) -> Q {
    let dv = d.vertices();
    region_dist2(&polygon_edges(&dv), &dv, |p| d.contains(p), g)
}

/// Squared distance between two double jigsaws.
pub fn regions_dist2(a: &DoubleJigsaw, b: &DoubleJigsaw) -> Q {
    let av = a.polygon();
    region_dist2(&polygon_edges(&av), &av, |p| a.contains(p), b)
}

/// Squared distance from a point to a double jigsaw.
pub fn point_region_dist2(p: &Point, g: &DoubleJigsaw) -> Q {
    if g.contains(p) {
        return Q::zero();
    }
    g.edges().iter().map(|(a, b)| point_segment_dist2(p, a, b)).min().expect("edges")
}

fn region_dist2(edges: &[(Point, Point)], verts: &[Point], contains: impl Fn(&Point) -> bool, g: &DoubleJigsaw) -> Q {
    let ge = g.edges();
    if verts.iter().any(|v| g.contains(v)) || g.polygon().iter().any(&contains) {
        return Q::zero();
    }
    let mut best: Option<Q> = None;
    for (a, b) in edges {
        for (c, e) in &ge {
            if segments_intersect(a, b, c, e) {
                return Q::zero();
            }
            for v in [
                point_segment_dist2(a, c, e),
                point_segment_dist2(b, c, e),
                point_segment_dist2(c, a, b),
                point_segment_dist2(e, a, b),
            ] {
                if best.as_ref().is_none_or(|m| &v < m) {
                    best = Some(v);
                }
            }
        }
    }
    best.expect("edges")
}

/// Whether two double jigsaws share a point.
pub fn regions_meet(a: &DoubleJigsaw, b: &DoubleJigsaw) -> bool {
    let (ab, bb) = (a.bbox(), b.bbox());
    if ab.max.x < bb.min.x || bb.max.x < ab.min.x || ab.max.y < bb.min.y || bb.max.y < ab.min.y {
        return false;
    }
    regions_dist2(a, b).is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullElement {
    pub region: DoubleJigsaw,
    /// Level of the diamond that created this element.
    pub seed_level: usize,
    /// Indices of input diamonds, seed first, in merge order.
    pub provenance: Vec<usize>,
}

/// Record of one merge, with the box bounding the added area and the diamond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merge {
    pub diamond: usize,
    pub element: usize,
    pub level: usize,
    pub changed: BBox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    pub elements: Vec<HullElement>,
    pub merges: Vec<Merge>,
}

impl Hull {
    pub fn contains(&self, p: &Point) -> bool {
        self.elements.iter().any(|e| e.region.contains(p))
    }

    /// Regions in canonical order, for set comparison.
    pub fn canonical(&self) -> Vec<RegionKey> {
        let mut v: Vec<_> = self.elements.iter().map(|e| e.region.key()).collect();
        v.sort();
        v
    }
}

/// Bounding box of `new \ old` (in heights above the axis), if nonempty.
fn changed_extent(old: &PlFn, new: &PlFn) -> Option<(Q, Q, Q, Q)> {
    let mut xs: Vec<Q> = old.points().iter().chain(new.points()).map(|p| p.0.clone()).collect();
    xs.sort();
    xs.dedup();
    let mut ext: Option<(Q, Q, Q, Q)> = None;
    let mut add = |a: &Q, b: &Q, lo: Q, hi: Q| {
        ext = Some(match ext.take() {
            None => (a.clone(), b.clone(), lo, hi),
            Some((x0, x1, v0, v1)) => (x0.min(a.clone()), x1.max(b.clone()), v0.min(lo), v1.max(hi)),
        });
    };
    for x in &xs {
        let n = new.eval(x);
        let o = old.eval(x);
        if n > o {
            add(x, x, o, n);
        }
    }
    for w in xs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (oa, ob) = (old.limits(a).1, old.limits(b).0);
        let (na, nb) = (new.limits(a).1, new.limits(b).0);
        if na > oa || nb > ob {
            add(a, b, oa.min(ob), na.max(nb));
        }
    }
    ext
}

fn changed_bbox(before: &DoubleJigsaw, after: &DoubleJigsaw) -> Option<BBox> {
    let ey = &before.ey;
    let mut pts = Vec::new();
    if let Some((x0, x1, v0, v1)) = changed_extent(&before.upper, &after.upper) {
        pts.push(Point::new(x0, ey + v0));
        pts.push(Point::new(x1, ey + v1));
    }
    if let Some((x0, x1, v0, v1)) = changed_extent(&before.lower, &after.lower) {
        pts.push(Point::new(x0, ey - v0));
        pts.push(Point::new(x1, ey - v1));
    }
    BBox::of(&pts)
}

/// Builds the hull, visiting levels from the top down; within a level,
/// diamonds go in `(cx, cy)` order.
pub fn build_hull(diamonds: &[DiamondSpec], dims: &[LevelDims]) -> Hull {
    let mut order: Vec<usize> = (0..diamonds.len()).collect();
    order.sort_by(|&a, &b| {
        let (da, db) = (&diamonds[a], &diamonds[b]);
        (&da.center.x, &da.center.y, a).cmp(&(&db.center.x, &db.center.y, b))
    });
    build_hull_in_order(diamonds, dims, &order)
}

/// As [`build_hull`], but within each level diamonds are visited in the
/// order they appear in `order`. A diamond joins the nearest element within
/// `h_n`, ties going to the earliest-created element.
pub fn build_hull_in_order(diamonds: &[DiamondSpec], dims: &[LevelDims], order: &[usize]) -> Hull {
    let mut hull = Hull { elements: Vec::new(), merges: Vec::new() };
    for n in (1..=dims.len()).rev() {
        let h2 = &dims[n - 1].h * &dims[n - 1].h;
        for &i in order.iter().filter(|&&i| diamonds[i].level == n) {
            let d = &diamonds[i];
            let mut best: Option<(Q, usize)> = None;
            for (k, e) in hull.elements.iter().enumerate() {
                let bb = e.region.bbox();
                let db = d.bbox();
                let gap_x = (&db.min.x - &bb.max.x).max(&bb.min.x - &db.max.x);
                let gap_y = (&db.min.y - &bb.max.y).max(&bb.min.y - &db.max.y);
                if (gap_x.is_positive() && &gap_x * &gap_x > h2) || (gap_y.is_positive() && &gap_y * &gap_y > h2) {
                    continue;
                }
                let d2 = diamond_region_dist2(d, &e.region);
                if d2 <= h2 && best.as_ref().is_none_or(|(b, _)| &d2 < b) {
                    best = Some((d2, k));
                }
            }
            match best {
                None => hull.elements.push(HullElement {
                    region: DoubleJigsaw::from_diamond(d),
                    seed_level: n,
                    provenance: vec![i],
                }),
                Some((_, k)) => {
                    let before = hull.elements[k].region.clone();
                    let after = before.adjoin(d);
                    let changed = match changed_bbox(&before, &after) {
                        Some(c) => c.union(&d.bbox()),
                        None => d.bbox(),
                    };
                    hull.merges.push(Merge { diamond: i, element: k, level: n, changed });
                    hull.elements[k].region = after;
                    hull.elements[k].provenance.push(i);
                }
            }
        }
    }
    hull
}

/// Outcome of checking the hull properties that hold under the sparsity and
/// growth hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullReport {
    /// Merges whose added area plus diamond does not fit in `5w_n × 5h_n`.
    pub wide_merges: Vec<usize>,
    /// Elements not fitting in `2w_n × 2h_n` for their seed level.
    pub oversized: Vec<usize>,
    /// Pairs of elements that meet.
    pub overlapping: Vec<(usize, usize)>,
    /// Largest covered vertical run, against the bound `2h_N`.
    pub max_run: Q,
    pub run_bound: Q,
}

impl HullReport {
    pub fn ok(&self) -> bool {
        self.wide_merges.is_empty()
            && self.oversized.is_empty()
            && self.overlapping.is_empty()
            && self.max_run < self.run_bound
    }
}

pub fn check_hull(hull: &Hull, dims: &[LevelDims]) -> HullReport {
    let five = Q::from_integer(5.into());
    let two = Q::from_integer(2.into());
    let wide_merges = hull
        .merges
        .iter()
        .enumerate()
        .filter(|(_, m)| {
            let d = &dims[m.level - 1];
            m.changed.width() >= &five * &d.w || m.changed.height() >= &five * &d.h
        })
        .map(|(i, _)| i)
        .collect();
    let oversized = hull
        .elements
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let d = &dims[e.seed_level - 1];
            let b = e.region.bbox();
            b.width() >= &two * &d.w || b.height() >= &two * &d.h
        })
        .map(|(i, _)| i)
        .collect();
    let mut overlapping = Vec::new();
    for i in 0..hull.elements.len() {
        for j in i + 1..hull.elements.len() {
            if regions_meet(&hull.elements[i].region, &hull.elements[j].region) {
                overlapping.push((i, j));
            }
        }
    }
    let mut xs: Vec<Q> = hull
        .elements
        .iter()
        .flat_map(|e| e.region.upper.points().iter().chain(e.region.lower.points()).map(|p| p.0.clone()))
        .collect();
    xs.sort();
    xs.dedup();
    let max_run = xs.iter().map(|x| longest_covered_run(hull, x)).max().unwrap_or_default();
    let run_bound = dims.last().map(|d| &two * &d.h).unwrap_or_default();
    HullReport { wide_merges, oversized, overlapping, max_run, run_bound }
}

/// Longest closed vertical run covered by the hull at abscissa `x`.
pub fn longest_covered_run(hull: &Hull, x: &Q) -> Q {
    let mut ivs: Vec<(Q, Q)> = hull.elements.iter().filter_map(|e| e.region.section(x)).collect();
    ivs.sort();
    let mut best = Q::zero();
    let mut cur: Option<(Q, Q)> = None;
    for (a, b) in ivs {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                best = best.max(&cb - &ca);
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((ca, cb)) = cur {
        best = best.max(cb - ca);
    }
    best
}

/// Whether the closed vertical segment from `(x, y0)` up to `(x, y0 + len)`
/// has a point outside the hull.
pub fn vertical_probe_escapes(hull: &Hull, x: &Q, y0: &Q, len: &Q) -> bool {
    let mut ivs: Vec<(Q, Q)> = hull.elements.iter().filter_map(|e| e.region.section(x)).collect();
    if !ivs.iter().any(|(a, b)| a <= y0 && y0 <= b) {
        return true;
    }
    ivs.sort();
    let mut reach = y0.clone();
    for (a, b) in ivs {
        if a > reach {
            break;
        }
        if b > reach {
            reach = b;
        }
    }
    reach < y0 + len
}
