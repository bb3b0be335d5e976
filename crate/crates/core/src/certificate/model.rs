use super::profile::Profile;
use crate::geometry::{convex_intersect, polygon_edges, segment_dist2, BBox, Point};
use crate::patterns::Site;
use crate::rational::{ceil_int, floor_int, frac, int, serde_q, Q};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Sites serialized as `[x, y]`.
pub mod site_pair {
    use crate::patterns::Site;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(s: &Site, ser: S) -> Result<S::Ok, S::Error> {
        [s.x, s.y].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Site, D::Error> {
        let [x, y] = <[i64; 2]>::deserialize(d)?;
        Ok(Site::new(x, y))
    }
}

/// Closed axis-aligned region over which density is assessed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub min: Point,
    pub max: Point,
}

impl Window {
    pub fn new(x0: Q, y0: Q, x1: Q, y1: Q) -> Self {
        Window { min: Point::new(x0, y0), max: Point::new(x1, y1) }
    }

    /// The square `[-half, half]²`.
    pub fn square(half: Q) -> Self {
        Window::new(-half.clone(), -half.clone(), half.clone(), half)
    }

    pub fn center(&self) -> Point {
        self.min.add(&self.max).scale(&frac(1, 2))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }

    pub fn contains_site(&self, s: &Site) -> bool {
        self.contains(&site_point(s))
    }

    /// Integer sites inside the window, row-major from the bottom left.
    pub fn sites(&self) -> Vec<Site> {
        let big = |v: &Q, up: bool| (if up { ceil_int(v) } else { floor_int(v) }).to_i64().expect("window fits i64");
        let (x0, x1) = (big(&self.min.x, true), big(&self.max.x, false));
        let (y0, y1) = (big(&self.min.y, true), big(&self.max.y, false));
        (y0..=y1).flat_map(|y| (x0..=x1).map(move |x| Site::new(x, y))).collect()
    }
}

pub fn site_point(s: &Site) -> Point {
    Point::new(int(s.x), int(s.y))
}

/// The site nearest to `p`, rounding halves up.
pub fn anchor_of(p: &Point) -> Site {
    let r = |v: &Q| floor_int(&(v + frac(1, 2))).to_i64().expect("anchor fits i64");
    Site::new(r(&p.x), r(&p.y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Point,
    #[serde(with = "site_pair")]
    pub anchor: Site,
}

impl Witness {
    /// A witness sitting exactly on a site.
    pub fn at_site(s: Site) -> Self {
        Witness { point: site_point(&s), anchor: s }
    }

    pub fn at(point: Point) -> Self {
        let anchor = anchor_of(&point);
        Witness { point, anchor }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertBox {
    pub center: Point,
    /// Index into the profile's directions; the long axis points along it,
    /// towards the frame center.
    pub orientation: usize,
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
    pub sections: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub level: usize,
    pub center: Point,
    #[serde(with = "serde_q")]
    pub r: Q,
    pub orientation: usize,
    pub boxes: Vec<CertBox>,
}

/// Frames grouped by level: `levels[n - 1]` holds the `n`-frames.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub levels: Vec<Vec<Frame>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrameId {
    pub level: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoxId {
    pub level: usize,
    pub frame: usize,
    pub index: usize,
}

impl BoxId {
    pub fn frame_id(&self) -> FrameId {
        FrameId { level: self.level, index: self.frame }
    }
}

impl fmt::Display for FrameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "frame {}:{}", self.level, self.index)
    }
}

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "box {}:{}:{}", self.level, self.frame, self.index)
    }
}

impl Certificate {
    pub fn with_levels(n: usize) -> Self {
        Certificate { levels: vec![Vec::new(); n] }
    }

    pub fn frame(&self, id: FrameId) -> Option<&Frame> {
        self.levels.get(id.level.checked_sub(1)?)?.get(id.index)
    }

    pub fn cert_box(&self, id: BoxId) -> Option<&CertBox> {
        self.frame(id.frame_id())?.boxes.get(id.index)
    }

    pub fn push_frame(&mut self, f: Frame) -> FrameId {
        while self.levels.len() < f.level {
            self.levels.push(Vec::new());
        }
        let list = &mut self.levels[f.level - 1];
        list.push(f);
        FrameId { level: list[list.len() - 1].level, index: list.len() - 1 }
    }

    pub fn frame_ids(&self) -> Vec<FrameId> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, fs)| (0..fs.len()).map(move |index| FrameId { level: l + 1, index }))
            .collect()
    }

    pub fn box_ids(&self) -> Vec<BoxId> {
        self.frame_ids()
            .into_iter()
            .flat_map(|f| {
                let n = self.frame(f).map_or(0, |fr| fr.boxes.len());
                (0..n).map(move |index| BoxId { level: f.level, frame: f.index, index })
            })
            .collect()
    }

    pub fn frame_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Every witness with its box.
    pub fn witnesses(&self) -> Vec<(BoxId, &CertBox, &Witness)> {
        self.box_ids()
            .into_iter()
            .filter_map(|id| {
                let b = self.cert_box(id)?;
                Some((id, b, b.witness.as_ref()?))
            })
            .collect()
    }
}

/// Coordinates in which a box is axis-aligned: `x` runs along its
/// direction `u`, `y` along `u` turned a quarter counter-clockwise, and the
/// box center is the origin.
#[derive(Debug, Clone)]
pub struct BoxFrame {
    pub origin: Point,
    pub u: Point,
    pub v: Point,
}

impl BoxFrame {
    pub fn new(origin: Point, u: Point) -> Self {
        let v = Point::new(-u.y.clone(), u.x.clone());
        BoxFrame { origin, u, v }
    }

    pub fn of(b: &CertBox, p: &Profile) -> Self {
        BoxFrame::new(b.center.clone(), p.directions[b.orientation].clone())
    }

    pub fn local(&self, p: &Point) -> Point {
        let d = p.sub(&self.origin);
        Point::new(d.dot(&self.u), d.dot(&self.v))
    }

    pub fn world(&self, l: &Point) -> Point {
        self.origin.add(&self.u.scale(&l.x)).add(&self.v.scale(&l.y))
    }
}

/// Closed rectangle in some box's local coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRect {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl LocalRect {
    pub fn centered(c: &Point, w: &Q, h: &Q) -> Self {
        let (hw, hh) = (w * frac(1, 2), h * frac(1, 2));
        LocalRect { x0: &c.x - &hw, x1: &c.x + &hw, y0: &c.y - &hh, y1: &c.y + hh }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.x0 <= p.x && p.x <= self.x1 && self.y0 <= p.y && p.y <= self.y1
    }

    pub fn meets(&self, o: &LocalRect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn center(&self) -> Point {
        Point::new((&self.x0 + &self.x1) * frac(1, 2), (&self.y0 + &self.y1) * frac(1, 2))
    }

    pub fn width(&self) -> Q {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> Q {
        &self.y1 - &self.y0
    }

    pub fn scaled(&self, c: &Q) -> LocalRect {
        LocalRect::centered(&self.center(), &(self.width() * c), &(self.height() * c))
    }

    pub fn shifted(&self, d: &Point) -> LocalRect {
        LocalRect { x0: &self.x0 + &d.x, x1: &self.x1 + &d.x, y0: &self.y0 + &d.y, y1: &self.y1 + &d.y }
    }

    /// Squared distance between two closed rectangles.
    pub fn dist2(&self, o: &LocalRect) -> Q {
        let gap = |a0: &Q, a1: &Q, b0: &Q, b1: &Q| {
            if a1 < b0 {
                b0 - a1
            } else if b1 < a0 {
                a0 - b1
            } else {
                Q::zero()
            }
        };
        let dx = gap(&self.x0, &self.x1, &o.x0, &o.x1);
        let dy = gap(&self.y0, &self.y1, &o.y0, &o.y1);
        &dx * &dx + &dy * &dy
    }

    /// Counter-clockwise corners.
    pub fn corners(&self) -> Vec<Point> {
        vec![
            Point::new(self.x0.clone(), self.y0.clone()),
            Point::new(self.x1.clone(), self.y0.clone()),
            Point::new(self.x1.clone(), self.y1.clone()),
            Point::new(self.x0.clone(), self.y1.clone()),
        ]
    }
}

impl CertBox {
    pub fn local_rect(&self) -> LocalRect {
        LocalRect::centered(&Point::new(Q::zero(), Q::zero()), &self.w, &self.h)
    }

    /// Section `i` (from 1) in local coordinates; section 1 is the end
    /// nearest the frame center, at `x = w/2`.
    pub fn section_rect(&self, i: usize) -> LocalRect {
        let sw = &self.w / int(self.sections as i64);
        let half = &self.w * frac(1, 2);
        LocalRect {
            x0: &half - &sw * int(i as i64),
            x1: &half - &sw * int(i as i64 - 1),
            y0: -(&self.h * frac(1, 2)),
            y1: &self.h * frac(1, 2),
        }
    }

    /// Section index of a local point; shared edges go to the lower index.
    pub fn section_of_local(&self, l: &Point) -> usize {
        let sw = &self.w / int(self.sections as i64);
        let t = ceil_int(&((&self.w * frac(1, 2) - &l.x) / sw)).to_i64().unwrap_or(1);
        (t.max(1) as usize).min(self.sections)
    }

    /// Squared distance between section `i` of `self` and section `j` of
    /// `o` (section 0 meaning the whole box).
    pub fn section_dist2(&self, i: usize, o: &CertBox, j: usize, p: &Profile) -> Q {
        let part = |b: &CertBox, k: usize| if k == 0 { b.local_rect() } else { b.section_rect(k) };
        if self.orientation == o.orientation {
            let shift = BoxFrame::of(self, p).local(&o.center);
            return part(self, i).dist2(&part(o, j).shifted(&shift));
        }
        let (fa, fb) = (BoxFrame::of(self, p), BoxFrame::of(o, p));
        let a: Vec<Point> = part(self, i).corners().iter().map(|c| fa.world(c)).collect();
        let b: Vec<Point> = part(o, j).corners().iter().map(|c| fb.world(c)).collect();
        polygon_dist2(&a, &b)
    }

    pub fn corners(&self, p: &Profile) -> Vec<Point> {
        let f = BoxFrame::of(self, p);
        self.local_rect().corners().iter().map(|c| f.world(c)).collect()
    }

    pub fn section_corners(&self, p: &Profile, i: usize) -> Vec<Point> {
        let f = BoxFrame::of(self, p);
        self.section_rect(i).corners().iter().map(|c| f.world(c)).collect()
    }

    pub fn contains(&self, p: &Profile, q: &Point) -> bool {
        self.local_rect().contains(&BoxFrame::of(self, p).local(q))
    }

    pub fn bbox(&self, p: &Profile) -> BBox {
        BBox::of(&self.corners(p)).expect("four corners")
    }
}

/// Squared distance between closed convex polygons.
pub fn polygon_dist2(a: &[Point], b: &[Point]) -> Q {
    if convex_intersect(a, b) {
        return Q::zero();
    }
    let (ea, eb) = (polygon_edges(a), polygon_edges(b));
    ea.iter()
        .flat_map(|(p, q)| eb.iter().map(move |(r, s)| segment_dist2(p, q, r, s)))
        .min()
        .expect("nonempty polygons")
}
