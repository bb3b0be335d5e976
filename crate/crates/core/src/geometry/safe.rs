use super::hull::{build_hull, point_region_dist2, regions_dist2, DoubleJigsaw, Hull, LevelDims};
use super::plfn::PlFn;
use super::shapes::{diamond_of_rect, first_dense_pair, Convex, DiamondSpec, Point, RectSpec};
use super::GeometryError;
use crate::rational::{int, sqrt_lower, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Which of the hull hypotheses hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// Every shape carries its level's dimensions and a valid level.
    pub dims_match: bool,
    /// Per level: the family is sparse at the required factor.
    pub sparse: Vec<bool>,
    /// Per level: `h_n > 10 h_{<=n-1}` and `w_n > 10 w_{<=n-1}` (vacuous at level 1).
    pub growth: Vec<bool>,
    /// Per level: `alpha_n < alpha_{n-1} / 10` (vacuous at level 1).
    pub slopes: Vec<bool>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.dims_match && self.sparse.iter().chain(&self.growth).chain(&self.slopes).all(|&b| b)
    }
}

fn dims_report(dims: &[LevelDims]) -> (Vec<bool>, Vec<bool>) {
    let ten = int(10);
    let mut growth = Vec::new();
    let mut slopes = Vec::new();
    let (mut hs, mut ws) = (Q::zero(), Q::zero());
    for (i, d) in dims.iter().enumerate() {
        if i == 0 {
            growth.push(true);
            slopes.push(true);
        } else {
            growth.push(d.h > &ten * &hs && d.w > &ten * &ws);
            slopes.push(d.alpha() * &ten < dims[i - 1].alpha());
        }
        hs += &d.h;
        ws += &d.w;
    }
    (growth, slopes)
}

fn per_level_sparse<T: Convex + Clone>(shapes: &[T], level: impl Fn(&T) -> usize, levels: usize, c: &Q) -> Vec<bool> {
    (1..=levels)
        .map(|n| {
            let fam: Vec<T> = shapes.iter().filter(|s| level(s) == n).cloned().collect();
            first_dense_pair(&fam, c).is_none()
        })
        .collect()
}

/// Hypotheses for hulls of leveled diamond families: 20-sparse levels plus
/// dimension growth and slope decay.
pub fn check_hypotheses(diamonds: &[DiamondSpec], dims: &[LevelDims]) -> HypothesisReport {
    let dims_match = diamonds
        .iter()
        .all(|d| d.level >= 1 && d.level <= dims.len() && d.w == dims[d.level - 1].w && d.h == dims[d.level - 1].h);
    let (growth, slopes) = dims_report(dims);
    HypothesisReport {
        dims_match,
        sparse: per_level_sparse(diamonds, |d| d.level, dims.len(), &int(20)),
        growth,
        slopes,
    }
}

/// Hypotheses for rectangle families: 80-sparse levels plus the same growth
/// and slope conditions.
pub fn check_rect_hypotheses(rects: &[RectSpec], dims: &[LevelDims]) -> HypothesisReport {
    let dims_match = rects
        .iter()
        .all(|r| r.level >= 1 && r.level <= dims.len() && r.w == dims[r.level - 1].w && r.h == dims[r.level - 1].h);
    let (growth, slopes) = dims_report(dims);
    HypothesisReport { dims_match, sparse: per_level_sparse(rects, |r| r.level, dims.len(), &int(80)), growth, slopes }
}

/// The safe set of a leveled rectangle family: the complement of the hull of
/// the diamonds `◇(2R)`.
#[derive(Debug, Clone)]
pub struct SafeSet {
    pub rects: Vec<RectSpec>,
    pub rect_dims: Vec<LevelDims>,
    pub diamonds: Vec<DiamondSpec>,
    pub diamond_dims: Vec<LevelDims>,
    pub hull: Hull,
}

impl SafeSet {
    pub fn new(rects: &[RectSpec], dims: &[LevelDims]) -> Self {
        let two = int(2);
        let diamonds: Vec<DiamondSpec> = rects.iter().map(|r| diamond_of_rect(&r.scaled(&two))).collect();
        let diamond_dims: Vec<LevelDims> = dims.iter().map(|d| LevelDims::new(&d.w * int(4), &d.h * int(4))).collect();
        let hull = build_hull(&diamonds, &diamond_dims);
        SafeSet { rects: rects.to_vec(), rect_dims: dims.to_vec(), diamonds, diamond_dims, hull }
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.hull.contains(p)
    }

    pub fn path(&self, p: &Point, extent: &Q) -> Result<SafePath, GeometryError> {
        hull_path(&self.hull, &self.diamond_dims, p, extent)
    }
}

/// A graph over `[p.x - extent, p.x + extent]` through `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafePath {
    pub points: Vec<Point>,
    /// Clearance used above (or below) each obstacle.
    #[serde(with = "crate::rational::serde_q")]
    pub clearance: Q,
    pub halvings: u32,
}

impl SafePath {
    pub fn function(&self) -> PlFn {
        PlFn::new(self.points.iter().map(|p| (p.x.clone(), p.y.clone())).collect()).expect("path is a graph")
    }
}

const MAX_HALVINGS: u32 = 64;

/// Envelope hugging `g` from above (`up`) or below at distance `eps`, falling
/// back to the equator with slope `alpha` beyond its ends, constant `ey`
/// elsewhere on `[l, r]`.
fn envelope(g: &DoubleJigsaw, eps: &Q, alpha: &Q, l: &Q, r: &Q, up: bool) -> PlFn {
    let side = if up { &g.upper } else { &g.lower };
    let sign = if up { int(1) } else { int(-1) };
    let at = |v: &Q| &g.ey + &sign * v;
    let lo_v = side.value_at(g.lo()).expect("in domain");
    let hi_v = side.value_at(g.hi()).expect("in domain");
    let ramp_l = g.lo() - (&lo_v + eps) / alpha;
    let ramp_r = g.hi() + (&hi_v + eps) / alpha;
    let mut pts = Vec::new();
    if l < &ramp_l {
        pts.push((l.clone(), g.ey.clone()));
    }
    pts.push((ramp_l, g.ey.clone()));
    for (x, v) in side.points() {
        pts.push((x.clone(), at(&(v + eps))));
    }
    pts.push((ramp_r.clone(), g.ey.clone()));
    if r > &ramp_r {
        pts.push((r.clone(), g.ey.clone()));
    }
    PlFn::new(pts).expect("monotone envelope")
}

fn reach(g: &DoubleJigsaw, pad: &Q, alpha: &Q) -> (Q, Q) {
    let span = (g.upper.peak().max(g.lower.peak()) + pad) / alpha;
    (g.lo() - &span, g.hi() + &span)
}

/// Whether the graph of `f` on `[x0, x1]` avoids `g`.
fn graph_avoids(f: &PlFn, g: &DoubleJigsaw, x0: &Q, x1: &Q) -> bool {
    let a = g.lo().max(x0).clone();
    let b = g.hi().min(x1).clone();
    if a > b {
        return true;
    }
    let top = g.upper.map_y(|v| &g.ey + v);
    f.strictly_above(&top, &a, &b) || f.strictly_below_neg(&g.lower, &g.ey, &a, &b)
}

/// A polygonal graph through `p`, disjoint from the hull, with every slope at
/// most `h_1 / w_1` in absolute value.
///
/// The path is `p.y` pushed over each element whose equator is not above `p`
/// and under each other element, keeping clearance `eps` and slope `alpha_1`
/// ramps at the ends. `eps` starts at half the smallest of the local element
/// gaps, the distance from `p` to the hull and `h_1/4`, and is halved until
/// the exact checks pass.
pub fn hull_path(hull: &Hull, dims: &[LevelDims], p: &Point, extent: &Q) -> Result<SafePath, GeometryError> {
    if hull.contains(p) {
        return Err(GeometryError::UnsafePoint);
    }
    let x0 = &p.x - extent;
    let x1 = &p.x + extent;
    if hull.elements.is_empty() || dims.is_empty() {
        let pts = vec![Point::new(x0, p.y.clone()), Point::new(x1, p.y.clone())];
        return Ok(SafePath { points: pts, clearance: Q::zero(), halvings: 0 });
    }
    let alpha = dims[0].alpha();
    let cap = &dims[0].h / int(4);
    let near: Vec<&DoubleJigsaw> = hull
        .elements
        .iter()
        .map(|e| &e.region)
        .filter(|g| {
            let (a, b) = reach(g, &cap, &alpha);
            a <= x1 && b >= x0
        })
        .collect();
    let mut eps = cap.clone();
    for g in &near {
        eps = eps.min(sqrt_lower(&point_region_dist2(p, g)));
    }
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            eps = eps.min(sqrt_lower(&regions_dist2(near[i], near[j])));
        }
    }
    eps /= int(2);
    if !eps.is_positive() {
        return Err(GeometryError::PathNotFound { halvings: 0 });
    }
    for halvings in 0..=MAX_HALVINGS {
        let mut l = x0.clone();
        let mut r = x1.clone();
        for g in &near {
            let (a, b) = reach(g, &eps, &alpha);
            l = l.min(a);
            r = r.max(b);
        }
        let mut f = PlFn::constant(l.clone(), r.clone(), p.y.clone());
        for g in near.iter().filter(|g| g.ey <= p.y) {
            f = f.max(&envelope(g, &eps, &alpha, &l, &r, true));
        }
        for g in near.iter().filter(|g| g.ey > p.y) {
            f = f.min(&envelope(g, &eps, &alpha, &l, &r, false));
        }
        let f = f.restricted(&x0, &x1);
        let slope_ok = f.max_abs_slope().is_some_and(|s| s <= alpha);
        let through_p = f.value_at(&p.x).as_ref() == Some(&p.y);
        if slope_ok && through_p && hull.elements.iter().all(|e| graph_avoids(&f, &e.region, &x0, &x1)) {
            let points = f.points().iter().map(|(x, y)| Point::new(x.clone(), y.clone())).collect();
            return Ok(SafePath { points, clearance: eps, halvings });
        }
        eps /= int(2);
    }
    Err(GeometryError::PathNotFound { halvings: MAX_HALVINGS })
}

/// Exact re-check of a path against a hull: graph form, slope bound, passing
/// through `p`, and disjointness.
pub fn verify_path(hull: &Hull, dims: &[LevelDims], p: &Point, path: &SafePath) -> bool {
    let Ok(f) = PlFn::new(path.points.iter().map(|q| (q.x.clone(), q.y.clone())).collect()) else {
        return false;
    };
    let alpha = match dims.first() {
        Some(d) => d.alpha(),
        None => return f.max_abs_slope().is_some(),
    };
    let (x0, x1) = (f.lo().clone(), f.hi().clone());
    f.max_abs_slope().is_some_and(|s| s <= alpha)
        && f.value_at(&p.x).as_ref() == Some(&p.y)
        && hull.elements.iter().all(|e| graph_avoids(&f, &e.region, &x0, &x1))
}
