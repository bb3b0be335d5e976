use crate::rational::{serde_q, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "serde_q")]
    pub x: Q,
    #[serde(with = "serde_q")]
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, c: &Q) -> Point {
        Point::new(&self.x * c, &self.y * c)
    }

    pub fn dot(&self, o: &Point) -> Q {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Q {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point) -> Q {
        self.sub(o).norm2()
    }

    /// Sup-norm distance.
    pub fn dist_inf(&self, o: &Point) -> Q {
        (&self.x - &o.x).abs().max((&self.y - &o.y).abs())
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> Option<BBox> {
        let first = points.first()?;
        let mut b = BBox { min: first.clone(), max: first.clone() };
        for p in &points[1..] {
            b.include(p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: &Point) {
        if p.x < self.min.x {
            self.min.x = p.x.clone();
        }
        if p.y < self.min.y {
            self.min.y = p.y.clone();
        }
        if p.x > self.max.x {
            self.max.x = p.x.clone();
        }
        if p.y > self.max.y {
            self.max.y = p.y.clone();
        }
    }

    pub fn union(&self, o: &BBox) -> BBox {
        let mut b = self.clone();
        b.include(&o.min);
        b.include(&o.max);
        b
    }

    pub fn width(&self) -> Q {
        &self.max.x - &self.min.x
    }

    pub fn height(&self) -> Q {
        &self.max.y - &self.min.y
    }
}

fn sign(v: &Q) -> Ordering {
    v.cmp(&Q::zero())
}

/// Orientation of `c` relative to the directed line `a -> b`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    sign(&b.sub(a).cross(&c.sub(a)))
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient(a, b, p) == Ordering::Equal
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `ab` and `cd` share a point.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let opposite = |x: Ordering, y: Ordering| x != Ordering::Equal && y != Ordering::Equal && x != y;
    if opposite(o1, o2) && opposite(o3, o4) {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Squared distance from `p` to the closed segment `ab`.
pub fn point_segment_dist2(p: &Point, a: &Point, b: &Point) -> Q {
    let ab = b.sub(a);
    let len2 = ab.norm2();
    if len2.is_zero() {
        return p.dist2(a);
    }
    let t = p.sub(a).dot(&ab);
    if !t.is_positive() {
        return p.dist2(a);
    }
    if t >= len2 {
        return p.dist2(b);
    }
    let c = p.sub(a).cross(&ab);
    &c * &c / len2
}

/// Closest point of the closed segment `ab` to `p`.
pub fn closest_on_segment(p: &Point, a: &Point, b: &Point) -> Point {
    let ab = b.sub(a);
    let len2 = ab.norm2();
    if len2.is_zero() {
        return a.clone();
    }
    let t = p.sub(a).dot(&ab) / &len2;
    if !t.is_positive() {
        a.clone()
    } else if t >= Q::from_integer(1.into()) {
        b.clone()
    } else {
        a.add(&ab.scale(&t))
    }
}

pub fn segment_dist2(a: &Point, b: &Point, c: &Point, d: &Point) -> Q {
    if segments_intersect(a, b, c, d) {
        return Q::zero();
    }
    [
        point_segment_dist2(a, c, d),
        point_segment_dist2(b, c, d),
        point_segment_dist2(c, a, b),
        point_segment_dist2(d, a, b),
    ]
    .into_iter()
    .min()
    .expect("four candidates")
}

/// A closed convex polygon given by its vertices in counter-clockwise order
/// (degenerate polygons such as segments are allowed).
pub trait Convex {
    fn vertices(&self) -> Vec<Point>;
    fn center(&self) -> &Point;
    fn contains(&self, p: &Point) -> bool;
    fn scaled(&self, c: &Q) -> Self;
}

/// Rectilinear diamond: convex hull of `center ± (w/2, 0)` and `center ± (0, h/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondSpec {
    pub level: usize,
    #[serde(flatten)]
    pub center: Point,
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
}

/// Axis-aligned rectangle of dimensions `w × h` about `center`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectSpec {
    pub level: usize,
    #[serde(flatten)]
    pub center: Point,
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
}

impl DiamondSpec {
    pub fn new(level: usize, cx: Q, cy: Q, w: Q, h: Q) -> Self {
        DiamondSpec { level, center: Point::new(cx, cy), w, h }
    }

    pub fn north(&self) -> Point {
        Point::new(self.center.x.clone(), &self.center.y + &self.h / Q::from_integer(2.into()))
    }

    pub fn south(&self) -> Point {
        Point::new(self.center.x.clone(), &self.center.y - &self.h / Q::from_integer(2.into()))
    }

    /// Side slope `h / w`.
    pub fn alpha(&self) -> Q {
        &self.h / &self.w
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices()).expect("vertices")
    }
}

impl RectSpec {
    pub fn new(level: usize, cx: Q, cy: Q, w: Q, h: Q) -> Self {
        RectSpec { level, center: Point::new(cx, cy), w, h }
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices()).expect("vertices")
    }
}

fn half(v: &Q) -> Q {
    v / Q::from_integer(2.into())
}

impl Convex for DiamondSpec {
    fn vertices(&self) -> Vec<Point> {
        let (cx, cy) = (&self.center.x, &self.center.y);
        let (hw, hh) = (half(&self.w), half(&self.h));
        vec![
            Point::new(cx + &hw, cy.clone()),
            Point::new(cx.clone(), cy + &hh),
            Point::new(cx - &hw, cy.clone()),
            Point::new(cx.clone(), cy - &hh),
        ]
    }

    fn center(&self) -> &Point {
        &self.center
    }

    fn contains(&self, p: &Point) -> bool {
        let dx = (&p.x - &self.center.x).abs();
        let dy = (&p.y - &self.center.y).abs();
        if self.h.is_zero() {
            return dy.is_zero() && dx <= half(&self.w);
        }
        dx * &self.h + dy * &self.w <= &self.w * &self.h / Q::from_integer(2.into())
    }

    fn scaled(&self, c: &Q) -> Self {
        DiamondSpec { level: self.level, center: self.center.clone(), w: &self.w * c, h: &self.h * c }
    }
}

impl Convex for RectSpec {
    fn vertices(&self) -> Vec<Point> {
        let (cx, cy) = (&self.center.x, &self.center.y);
        let (hw, hh) = (half(&self.w), half(&self.h));
        vec![
            Point::new(cx - &hw, cy - &hh),
            Point::new(cx + &hw, cy - &hh),
            Point::new(cx + &hw, cy + &hh),
            Point::new(cx - &hw, cy + &hh),
        ]
    }

    fn center(&self) -> &Point {
        &self.center
    }

    fn contains(&self, p: &Point) -> bool {
        (&p.x - &self.center.x).abs() <= half(&self.w) && (&p.y - &self.center.y).abs() <= half(&self.h)
    }

    fn scaled(&self, c: &Q) -> Self {
        RectSpec { level: self.level, center: self.center.clone(), w: &self.w * c, h: &self.h * c }
    }
}

/// Closed convex polygons share a point. Separating-axis test over edge
/// normals and edge directions of both, so touching counts as meeting.
pub fn convex_intersect(a: &[Point], b: &[Point]) -> bool {
    let mut axes = Vec::new();
    for poly in [a, b] {
        for i in 0..poly.len() {
            let e = poly[(i + 1) % poly.len()].sub(&poly[i]);
            if e.norm2().is_zero() {
                continue;
            }
            axes.push(Point::new(-e.y.clone(), e.x.clone()));
            axes.push(e);
        }
    }
    let project = |poly: &[Point], ax: &Point| {
        let vals: Vec<Q> = poly.iter().map(|p| p.dot(ax)).collect();
        (vals.iter().min().expect("vertices").clone(), vals.iter().max().expect("vertices").clone())
    };
    for ax in &axes {
        let (amin, amax) = project(a, ax);
        let (bmin, bmax) = project(b, ax);
        if amax < bmin || bmax < amin {
            return false;
        }
    }
    true
}

/// Whether `E ∩ cE' = cE ∩ E' = ∅` for every distinct pair.
pub fn is_sparse<T: Convex>(family: &[T], c: &Q) -> bool {
    first_dense_pair(family, c).is_none()
}

/// The first pair (in index order) violating `c`-sparsity.
pub fn first_dense_pair<T: Convex>(family: &[T], c: &Q) -> Option<(usize, usize)> {
    let verts: Vec<Vec<Point>> = family.iter().map(|e| e.vertices()).collect();
    let scaled: Vec<Vec<Point>> = family.iter().map(|e| e.scaled(c).vertices()).collect();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if convex_intersect(&verts[i], &scaled[j]) || convex_intersect(&scaled[i], &verts[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// The closed diamond of dimensions `2w × 2h` about the rectangle's center.
pub fn diamond_of_rect(r: &RectSpec) -> DiamondSpec {
    let two = Q::from_integer(2.into());
    DiamondSpec { level: r.level, center: r.center.clone(), w: &r.w * &two, h: &r.h * &two }
}

pub fn scale_about_center<T: Convex>(s: &T, c: &Q) -> T {
    s.scaled(c)
}
