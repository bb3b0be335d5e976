use super::regions::RegionSetup;
use super::verify::{verify_glue, GlueReport};
use super::{make_regions, GlueError, Side};
use crate::certificate::{
    bucket_index, cbc, clip_segment, compatible, find_radial_rects, obstacle_family, placements, site_pair, site_point,
    split_coins, validate_certificate, witness_safe, BoxFrame, BoxId, CertError, Certificate, Configuration, Frame,
    FrameId, Oracle, Placement, Profile, Window, Witness,
};
use crate::game::{apply_move, forced_coin, Coin, GameState, Move, Rules};
use crate::geometry::{closest_on_segment, Point, SafeSet};
use crate::patterns::Site;
use crate::rational::{fmt_q, frac, int, to_f64, Q};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEntry {
    Admit {
        step: Step,
        source: Side,
        source_frame: FrameId,
        frame: FrameId,
    },
    Relocate {
        frame: FrameId,
        index: usize,
        from: Point,
        to: Point,
    },
    Write {
        #[serde(with = "site_pair")]
        site: Site,
        component: usize,
        coin: Coin,
    },
    Skip {
        step: Step,
        source: Side,
        source_frame: FrameId,
        reason: String,
    },
    Shift {
        source: Side,
        source_frame: FrameId,
        from: Point,
        to: Point,
        gap_point: Point,
    },
}

/// The growing output of a run. `used` holds every input frame already
/// admitted, rebuilt or spent as a donor.
#[derive(Debug, Clone)]
pub struct GlueState {
    pub z: Configuration,
    pub c: Certificate,
    pub log: Vec<LogEntry>,
    pub used: BTreeSet<(Side, FrameId)>,
}

#[derive(Debug, Clone)]
pub struct GlueOutcome {
    pub setup: RegionSetup,
    pub z: Configuration,
    pub c: Certificate,
    pub log: Vec<LogEntry>,
    pub report: GlueReport,
}

/// An aborted run with whatever it had built.
#[derive(Debug, Clone)]
pub struct GlueFailure {
    pub error: GlueError,
    pub state: Option<GlueState>,
}

/// A new frame and the coins written for it.
type Built = (FrameId, Vec<(Site, usize, Coin)>);

struct Run<'a> {
    x: &'a Configuration,
    cx: &'a Certificate,
    y: &'a Configuration,
    cy: &'a Certificate,
    setup: &'a RegionSetup,
    p: &'a Profile,
    window: &'a Window,
    oracle: Oracle,
    st: GlueState,
}

/// Glues `x` (certified by `cx`) outside `E_y` to `y` (certified by `cy`)
/// on it.
#[allow(clippy::too_many_arguments)]
pub fn glue(
    x: &Configuration,
    cx: &Certificate,
    y: &Configuration,
    cy: &Certificate,
    e_y: &[Site],
    p: &Profile,
    window: &Window,
    budget: usize,
) -> Result<GlueOutcome, Box<GlueFailure>> {
    let fail = |error: GlueError| Box::new(GlueFailure { error, state: None });
    let setup = make_regions(e_y, p, window).map_err(fail)?;
    if x.fill != y.fill {
        return Err(fail(GlueError::FillMismatch { x: x.fill, y: y.fill }));
    }
    for (side, cfg, cert) in [(Side::X, x, cx), (Side::Y, y, cy)] {
        if cert.levels.len() > p.levels.len() {
            return Err(fail(GlueError::TooManyLevels { side }));
        }
        let report = compatible(cfg, cert, p, budget).map_err(|e| fail(e.into()))?;
        if let Some(v) = report.frames.iter().find(|v| !v.result.is_unorientable()) {
            return Err(fail(GlueError::Incompatible { side, frame: v.frame, verdict: v.result.label().to_string() }));
        }
    }
    let mut z = Configuration::new(p.components(), x.fill);
    for (side, cfg) in [(Side::X, x), (Side::Y, y)] {
        for (sx, sy, comp, coin) in cfg.assignments() {
            let s = Site::new(sx, sy);
            if setup.side_of(s) == Some(side) {
                z.assign(s, comp, coin).map_err(|e| fail(e.into()))?;
            }
        }
    }
    let st = GlueState { z, c: Certificate::with_levels(p.levels.len()), log: Vec::new(), used: BTreeSet::new() };
    let mut run = Run { x, cx, y, cy, setup: &setup, p, window, oracle: Oracle::new(budget), st };
    if let Err(error) = run.steps() {
        return Err(Box::new(GlueFailure { error, state: Some(run.st) }));
    }
    let GlueState { z, c, log, .. } = run.st;
    let report = verify_glue(x, y, &setup, &z, &c, &log, p, window, budget);
    Ok(GlueOutcome { setup, z, c, log, report })
}

/// Where a witness of `cert` moves: `None` when its safe path, clipped to
/// the box, misses the gap; else the path's gap point nearest the frame
/// center, ties to smaller box-local `x` then `y`.
pub fn relocation_target(
    setup: &RegionSetup,
    cert: &Certificate,
    p: &Profile,
    id: BoxId,
) -> Result<Option<Point>, GlueError> {
    let f = cert.frame(id.frame_id()).ok_or(CertError::NoSuchFrame(id.frame_id()))?;
    let b = cert.cert_box(id).ok_or(CertError::NoSuchBox(id))?;
    let w = b.witness.as_ref().ok_or(CertError::MissingWitness(id))?;
    let bb = b.bbox(p);
    let (lo, hi) = (site_point(&setup.area_lo), site_point(&setup.area_hi));
    if bb.max.x < lo.x || bb.min.x > hi.x || bb.max.y < lo.y || bb.min.y > hi.y {
        return Ok(None);
    }
    let fam = obstacle_family(cert, p, id)?;
    let safe = SafeSet::new(&fam.rects, &fam.dims);
    let bf = BoxFrame::of(b, p);
    let half = &b.w * frac(1, 2);
    let path = safe.path(&bf.local(&w.point), &b.w).map_err(|source| GlueError::Path { box_id: id, source })?;
    let g = path.function().restricted(&-half.clone(), &half);
    let mut pts: Vec<Point> = g.points().iter().map(|(x, y)| bf.world(&Point::new(x.clone(), y.clone()))).collect();
    if pts.len() == 1 {
        pts.push(pts[0].clone());
    }
    let u = &f.center;
    let mut best: Option<(Q, Q, Q, Point)> = None;
    for seg in pts.windows(2) {
        let d = seg[1].sub(&seg[0]);
        for piece in setup.gap.near_segment(&seg[0], &seg[1]) {
            let Some((t0, t1)) = clip_segment(&seg[0], &seg[1], piece) else { continue };
            let (s0, s1) = (seg[0].add(&d.scale(&t0)), seg[0].add(&d.scale(&t1)));
            let q = closest_on_segment(u, &s0, &s1);
            let l = bf.local(&q);
            let key = (q.dist2(u), l.x, l.y, q);
            if best.as_ref().is_none_or(|b| (&key.0, &key.1, &key.2) < (&b.0, &b.1, &b.2)) {
                best = Some(key);
            }
        }
    }
    Ok(best.map(|b| b.3))
}

/// The first failing admission condition for a newly pushed frame:
/// center separation, the frame's own structure, safety of its witnesses
/// in the whole certificate, and safety of nearby higher-level witnesses.
fn admission_failure(c: &Certificate, p: &Profile, id: FrameId) -> Option<String> {
    let f = c.frame(id)?;
    let n = id.level;
    let sep = &f.r * &p.separation_factor;
    for (j, o) in c.levels[n - 1].iter().enumerate() {
        if j != id.index && o.center.dist2(&f.center) <= &sep * &sep {
            return Some(format!("center_separation: {id} and frame {n}:{j}"));
        }
    }
    let mut solo = Certificate::with_levels(n);
    solo.levels[n - 1].push(f.clone());
    let report = validate_certificate(&solo, p, None);
    if let Some(ch) = report.checks.iter().find(|ch| !ch.ok && ch.name != "witness_safety") {
        return Some(format!("{}: {}", ch.name, ch.counterexample.clone().unwrap_or_default()));
    }
    let reach = &f.r + int(1);
    let near = |b: &crate::certificate::CertBox| {
        let bb = b.bbox(p);
        bb.min.x <= &f.center.x + &reach
            && &f.center.x - &reach <= bb.max.x
            && bb.min.y <= &f.center.y + &reach
            && &f.center.y - &reach <= bb.max.y
    };
    let boxes =
        c.box_ids().into_iter().filter(|b| b.frame_id() == id || (b.level > n && c.cert_box(*b).is_some_and(&near)));
    for b in boxes {
        match witness_safe(c, p, b) {
            Ok(true) => {}
            Ok(false) => return Some(format!("witness_safety: {b}")),
            Err(e) => return Some(format!("witness_safety: {e}")),
        }
    }
    None
}

/// Unit-step paths through the gap sites strictly between `r/4` and `r`
/// from `center`, one per 4-connected component, largest first.
fn gap_paths(setup: &RegionSetup, center: &Point, r: &Q) -> Vec<Vec<Site>> {
    let (lo2, hi2) = (r * r / int(16), r * r);
    let (cx, cy, flo, fhi) = (to_f64(&center.x), to_f64(&center.y), to_f64(&lo2), to_f64(&hi2));
    let inside: BTreeSet<Site> = setup
        .gap_sites
        .iter()
        .filter(|s| {
            let d = (s.x as f64 - cx).powi(2) + (s.y as f64 - cy).powi(2);
            let slack = 1e-6 * (1.0 + fhi);
            if d < flo - slack || d > fhi + slack {
                return false;
            }
            let d = site_point(s).dist2(center);
            lo2 < d && d < hi2
        })
        .copied()
        .collect();
    let mut seen: BTreeSet<Site> = BTreeSet::new();
    let mut comps: Vec<Vec<Site>> = Vec::new();
    for &s in &inside {
        if seen.contains(&s) {
            continue;
        }
        let comp: Vec<Site> = bfs(&inside, s).0.into_keys().collect();
        seen.extend(comp.iter().copied());
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.iter().min().cmp(&b.iter().min())));
    comps
        .into_iter()
        .map(|comp| {
            let set: BTreeSet<Site> = comp.into_iter().collect();
            let start = *set.iter().next().expect("nonempty component");
            let a = bfs(&set, start).1;
            let (parents, b) = bfs(&set, a);
            let mut path = vec![b];
            while let Some(&Some(prev)) = parents.get(path.last().expect("nonempty")) {
                path.push(prev);
            }
            path
        })
        .collect()
}

/// Breadth-first parents from `start` within `set`, and the last site
/// reached.
fn bfs(set: &BTreeSet<Site>, start: Site) -> (HashMap<Site, Option<Site>>, Site) {
    let mut parents = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(s) = queue.pop_front() {
        last = s;
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let t = Site::new(s.x + dx, s.y + dy);
            if set.contains(&t) && !parents.contains_key(&t) {
                parents.insert(t, Some(s));
                queue.push_back(t);
            }
        }
    }
    (parents, last)
}

/// Drops the interior vertices where a unit-step path goes straight on.
fn corners(path: &[Site]) -> Vec<Point> {
    let mut out = Vec::new();
    for (i, s) in path.iter().enumerate() {
        let straight = i > 0
            && i + 1 < path.len()
            && (s.x - path[i - 1].x, s.y - path[i - 1].y) == (path[i + 1].x - s.x, path[i + 1].y - s.y);
        if !straight {
            out.push(site_point(s));
        }
    }
    out
}

/// The grid of a density scan: step `R/4` from the window's lower-left
/// corner, clamped to its upper edges, row-major.
fn density_grid(win: &Window, step: &Q) -> Vec<Point> {
    let axis = |lo: &Q, hi: &Q| {
        let mut v = vec![lo.clone()];
        while v.last().expect("nonempty") < hi {
            let next = (v.last().expect("nonempty") + step).min(hi.clone());
            v.push(next);
        }
        v
    };
    let (xs, ys) = (axis(&win.min.x, &win.max.x), axis(&win.min.y, &win.max.y));
    ys.iter().flat_map(|y| xs.iter().map(move |x| Point::new(x.clone(), y.clone()))).collect()
}

/// A lattice point just past the point `q` of the ray from `u` towards
/// `v` with `d(e, q) = rho`, for `d(u, e) < rho`.
fn shifted_center(u: &Point, v: &Point, e: &Point, rho: &Q) -> Point {
    let f = |p: &Point| (to_f64(&p.x), to_f64(&p.y));
    let ((ux, uy), (vx, vy), (ex, ey)) = (f(u), f(v), f(e));
    let mut d = (vx - ux, vy - uy);
    if d.0.hypot(d.1) == 0.0 {
        d = (ux - ex, uy - ey);
    }
    if d.0.hypot(d.1) == 0.0 {
        d = (1.0, 0.0);
    }
    let len = d.0.hypot(d.1);
    let (dx, dy) = (d.0 / len, d.1 / len);
    let (ax, ay) = (ux - ex, uy - ey);
    let b = ax * dx + ay * dy;
    let rf = to_f64(rho);
    let t = -b + (b * b - (ax * ax + ay * ay) + rf * rf).max(0.0).sqrt();
    let mut q = ((ux + t * dx).round() as i64, (uy + t * dy).round() as i64);
    let sign = |v: f64| {
        if v > 1e-9 {
            1
        } else if v < -1e-9 {
            -1
        } else {
            0
        }
    };
    let step = match (sign(dx), sign(dy)) {
        (0, 0) => (1, 0),
        s => s,
    };
    let rho2 = rho * rho;
    while Point::new(int(q.0), int(q.1)).dist2(e) < rho2 {
        q = (q.0 + step.0, q.1 + step.1);
    }
    Point::new(int(q.0), int(q.1))
}

impl<'a> Run<'a> {
    fn side(&self, s: Side) -> (&'a Configuration, &'a Certificate) {
        match s {
            Side::X => (self.x, self.cx),
            Side::Y => (self.y, self.cy),
        }
    }

    /// Frames whose centers lie within the density radius of the window.
    fn in_scope(&self, n: usize, center: &Point) -> bool {
        let reach = &self.p.density_factor * self.p.r(n);
        let w = self.window;
        &w.min.x - &reach <= center.x
            && center.x <= &w.max.x + &reach
            && &w.min.y - &reach <= center.y
            && center.y <= &w.max.y + &reach
    }

    fn frames_of(&self, side: Side, n: usize) -> Vec<FrameId> {
        let cert = self.side(side).1;
        (0..cert.levels.get(n - 1).map_or(0, Vec::len))
            .map(|index| FrameId { level: n, index })
            .filter(|&id| self.in_scope(n, &cert.frame(id).expect("listed").center))
            .collect()
    }

    fn levels(&self) -> usize {
        self.p.levels.len()
    }

    fn steps(&mut self) -> Result<(), GlueError> {
        let n0 = self.setup.n0;
        let low = 1..n0.min(self.levels() + 1);
        for n in low.clone() {
            let r = self.p.r(n);
            let far2 = (&r * frac(2, 3)) * (&r * frac(2, 3));
            for side in [Side::X, Side::Y] {
                for id in self.frames_of(side, n) {
                    let u = &self.side(side).1.frame(id).expect("listed").center;
                    if self.setup.outside_dist2(side, u) > far2 {
                        self.admit_relocated(Step::A, side, id)?;
                    }
                }
            }
        }
        for n in n0..=self.levels() {
            for id in self.frames_of(Side::X, n) {
                self.admit_relocated(Step::B, Side::X, id)?;
            }
        }
        for n in low.clone() {
            let r = self.p.r(n);
            let (lo2, hi2) = ((&r / int(4)) * (&r / int(4)), (&r * frac(2, 3)) * (&r * frac(2, 3)));
            for side in [Side::X, Side::Y] {
                for id in self.frames_of(side, n) {
                    let u = self.side(side).1.frame(id).expect("listed").center.clone();
                    let d2 = self.setup.outside_dist2(side, &u);
                    if lo2 <= d2 && d2 <= hi2 {
                        self.st.used.insert((side, id));
                        self.rebuild(Step::C, side, id, &u)?;
                    }
                }
            }
        }
        for n in low {
            self.step_d(n)?;
        }
        Ok(())
    }

    fn write_all(&mut self, writes: &[(Site, usize, Coin)]) -> Result<(), GlueError> {
        for &(site, component, coin) in writes {
            self.st.z.assign(site, component, coin)?;
            self.st.log.push(LogEntry::Write { site, component, coin });
        }
        Ok(())
    }

    fn admit(&mut self, step: Step, side: Side, source: FrameId, frame: FrameId) -> Result<(), GlueError> {
        if let Some(detail) = admission_failure(&self.st.c, self.p, frame) {
            return Err(GlueError::Admission { step, frame, detail });
        }
        self.st.log.push(LogEntry::Admit { step, source: side, source_frame: source, frame });
        self.st.used.insert((side, source));
        Ok(())
    }

    /// Admits an input frame with its boxes, moving each witness whose safe
    /// path meets the gap and replaying the coin it carried.
    fn admit_relocated(&mut self, step: Step, side: Side, id: FrameId) -> Result<(), GlueError> {
        let (cfg, cert) = self.side(side);
        let src = cert.frame(id).ok_or(CertError::NoSuchFrame(id))?;
        let pls = placements(cert, self.p, id)?;
        let mut game = cbc(cfg, cert, self.p, id)?;
        let mut frame = src.clone();
        let mut writes = Vec::new();
        let mut moved = Vec::new();
        for (i, pl) in pls.iter().enumerate() {
            let b = &src.boxes[i];
            let coin = cfg.value(pl.anchor, pl.component).ok_or(CertError::UndefinedComponent(pl.box_id))?;
            match relocation_target(self.setup, cert, self.p, pl.box_id)? {
                None => match self.setup.side_of(pl.anchor) {
                    Some(s) if s == side => {}
                    Some(s) => {
                        let held = self.st.z.value(pl.anchor, pl.component);
                        if held != Some(coin) {
                            return Err(GlueError::Conflict {
                                side: s,
                                site_desc: format!("({}, {})", pl.anchor.x, pl.anchor.y),
                                component: pl.component,
                                held,
                                needed: coin,
                            });
                        }
                    }
                    None => writes.push((pl.anchor, pl.component, coin)),
                },
                Some(q) => {
                    let w = Witness::at(q.clone());
                    if !self.setup.is_gap_site(&w.anchor) {
                        return Err(GlueError::AnchorOutsideGap(pl.box_id));
                    }
                    let sigma = b.section_of_local(&BoxFrame::of(b, self.p).local(&q));
                    let bucket = bucket_index(self.p, id.level, w.anchor, b.orientation, sigma);
                    let forced = forced_coin(&game, pl.bucket, coin, bucket);
                    let tie_choice = forced.is_none().then_some(Coin::H);
                    let mv = Move { source: pl.bucket, removed: coin, destination: bucket, tie_choice };
                    game = apply_move(&game, &mv, Rules::default())?;
                    writes.push((w.anchor, self.p.component(b.orientation, sigma), forced.unwrap_or(Coin::H)));
                    moved.push((i, b.witness.as_ref().expect("placed").point.clone(), q));
                    frame.boxes[i].witness = Some(w);
                }
            }
        }
        let new_id = self.st.c.push_frame(frame);
        for (index, from, to) in moved {
            self.st.log.push(LogEntry::Relocate { frame: new_id, index, from, to });
        }
        self.write_all(&writes)?;
        self.admit(step, side, id, new_id)
    }

    /// Builds a frame at `center` from scratch and admits it, or logs why
    /// it could not be built.
    fn rebuild(&mut self, step: Step, side: Side, source: FrameId, center: &Point) -> Result<(), GlueError> {
        match self.fresh_frame(source.level, center) {
            Ok((id, writes)) => {
                self.write_all(&writes)?;
                self.admit(step, side, source, id)
            }
            Err(reason) => {
                self.st.log.push(LogEntry::Skip { step, source: side, source_frame: source, reason });
                Ok(())
            }
        }
    }

    /// Pushes a fresh `n`-frame at `center`: boxes crossed by a gap path,
    /// witnesses on that path, coins split per bucket. On failure nothing
    /// is left behind and the reason is returned.
    fn fresh_frame(&mut self, n: usize, center: &Point) -> Result<Built, String> {
        let p = self.p;
        let lp = p.level(n);
        let count = lp.n_boxes.get().ok_or("box count too large")? as usize;
        let r = lp.r();
        let min2 = (&r / int(10)) * (&r / int(10));
        let mut reasons = Vec::new();
        for path in gap_paths(self.setup, center, &r).into_iter().take(8) {
            let (a, b) = (site_point(&path[0]), site_point(path.last().expect("nonempty")));
            if a.dist2(&b) < min2 {
                reasons.push(format!("gap path of {} sites is shorter than r/10", path.len()));
                break;
            }
            let poly = corners(&path);
            match self.frame_on_path(n, center, &path, &poly, count) {
                Ok(done) => return Ok(done),
                Err(e) => reasons.push(e),
            }
        }
        if reasons.is_empty() {
            reasons.push("no gap sites in the annulus".into());
        }
        Err(reasons.join("; "))
    }

    fn frame_on_path(
        &mut self,
        n: usize,
        center: &Point,
        path: &[Site],
        poly: &[Point],
        count: usize,
    ) -> Result<Built, String> {
        let p = self.p;
        let mut rects = find_radial_rects(p, n, center, poly, count + 1).map_err(|e| e.to_string())?;
        let higher: Vec<Point> = self
            .st
            .c
            .witnesses()
            .into_iter()
            .filter(|(id, _, _)| id.level > n)
            .map(|(_, _, w)| w.point.clone())
            .collect();
        let bad: Vec<usize> = (0..rects.len())
            .filter(|&i| {
                let b = &rects[i];
                let bf = BoxFrame::of(b, p);
                higher.iter().any(|w| {
                    let l = bf.local(w);
                    (1..=b.sections).any(|s| b.section_rect(s).scaled(&int(20)).contains(&l))
                })
            })
            .collect();
        match bad.as_slice() {
            [] => {
                rects.truncate(count);
            }
            [i] => {
                rects.remove(*i);
            }
            _ => return Err(format!("{} rectangles meet higher-level witnesses", bad.len())),
        }
        let frame =
            Frame { level: n, center: center.clone(), r: p.r(n), orientation: rects[0].orientation, boxes: rects };
        let id = self.st.c.push_frame(frame);
        let undo = |st: &mut GlueState| {
            st.c.levels[n - 1].pop();
        };
        for i in 0..count {
            let bid = BoxId { level: n, frame: id.index, index: i };
            let b = self.st.c.cert_box(bid).expect("pushed").clone();
            let bf = BoxFrame::of(&b, p);
            let fam = match obstacle_family(&self.st.c, p, bid) {
                Ok(f) => f,
                Err(e) => {
                    undo(&mut self.st);
                    return Err(e.to_string());
                }
            };
            let safe = SafeSet::new(&fam.rects, &fam.dims);
            let mut sites: Vec<(Q, Q, Site)> = path
                .iter()
                .filter_map(|s| {
                    let l = bf.local(&site_point(s));
                    let comp = p.component(b.orientation, b.section_of_local(&l));
                    let free = self.st.z.assigned(*s, comp).is_none();
                    (free && b.local_rect().contains(&l)).then(|| (l.y.abs(), l.x.clone(), *s))
                })
                .collect();
            sites.sort();
            let pick =
                sites.into_iter().take(200).map(|(_, _, s)| s).find(|s| safe.contains(&bf.local(&site_point(s))));
            let Some(s) = pick else {
                undo(&mut self.st);
                return Err(format!("no safe gap site in {bid}"));
            };
            self.st.c.levels[n - 1][id.index].boxes[i].witness = Some(Witness::at_site(s));
        }
        let pls: Vec<Placement> = match placements(&self.st.c, p, id) {
            Ok(pls) => pls,
            Err(e) => {
                undo(&mut self.st);
                return Err(e.to_string());
            }
        };
        let coins = split_coins(&pls);
        let state = GameState::from_coins(
            p.bucket_count(n),
            &pls.iter().zip(&coins).map(|(pl, &c)| (pl.bucket, c)).collect::<Vec<_>>(),
        );
        let verdict = self.oracle.solve(&state);
        if !verdict.is_unorientable() {
            undo(&mut self.st);
            return Err(format!("split coins give a {} state", verdict.label()));
        }
        let writes = pls.iter().zip(coins).map(|(pl, c)| (pl.anchor, pl.component, c)).collect();
        Ok((id, writes))
    }

    /// Shifts unused input frames towards every grid point the admitted
    /// `n`-frames leave uncovered.
    fn step_d(&mut self, n: usize) -> Result<(), GlueError> {
        let p = self.p;
        let r = p.r(n);
        let radius = &p.density_factor * &r;
        let step = &radius / int(4);
        let reach2 = (&radius - &step) * (&radius - &step);
        let quarter2 = (&r / int(4)) * (&r / int(4));
        let half2 = (&r / int(2)) * (&r / int(2));
        let rho = &r * frac(3, 4);
        for v in density_grid(self.window, &step) {
            if self.st.c.levels[n - 1].iter().any(|f| f.center.dist2(&v) <= reach2) {
                continue;
            }
            let lattice = v.x.is_integer() && v.y.is_integer();
            let side = match (lattice, v.x.to_integer().to_i64(), v.y.to_integer().to_i64()) {
                (true, Some(a), Some(b)) if self.setup.in_y(Site::new(a, b)) => Side::Y,
                _ => Side::X,
            };
            let cert = self.side(side).1;
            let donor = (0..cert.levels.get(n - 1).map_or(0, Vec::len))
                .map(|index| FrameId { level: n, index })
                .filter(|id| !self.st.used.contains(&(side, *id)))
                .map(|id| (cert.frame(id).expect("listed").center.dist2(&v), id))
                .filter(|(d, _)| d <= &(&radius * &radius))
                .min();
            let Some((_, donor)) = donor else {
                return Err(GlueError::NoDonor { level: n, x: fmt_q(&v.x), y: fmt_q(&v.y) });
            };
            self.st.used.insert((side, donor));
            let u = cert.frame(donor).expect("listed").center.clone();
            let e = self.setup.nearest_gap_point(&u);
            if e.dist2(&u) > quarter2 {
                let reason = "no gap point within r/4 of the center".to_string();
                self.st.log.push(LogEntry::Skip { step: Step::D, source: side, source_frame: donor, reason });
                continue;
            }
            let moved = shifted_center(&u, &v, &e, &rho);
            if moved.dist2(&u) < half2 {
                return Err(GlueError::Shift { side, frame: donor, detail: "moved less than r/2".into() });
            }
            if let Some(j) = self.st.c.levels[n - 1].iter().position(|f| f.center.dist2(&moved) <= half2) {
                return Err(GlueError::Shift { side, frame: donor, detail: format!("r/2-close to frame {n}:{j}") });
            }
            self.st.log.push(LogEntry::Shift {
                source: side,
                source_frame: donor,
                from: u,
                to: moved.clone(),
                gap_point: e,
            });
            self.rebuild(Step::D, side, donor, &moved)?;
        }
        Ok(())
    }
}
