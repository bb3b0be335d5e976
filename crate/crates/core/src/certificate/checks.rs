use super::model::{BoxFrame, BoxId, CertBox, Certificate, Frame, FrameId, Window};
use super::profile::Profile;
use super::CertError;
use crate::geometry::{check_rect_hypotheses, HypothesisReport, LevelDims, Point, RectSpec, SafeSet};
use crate::rational::{frac, int, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Obstacles of one box, in its local coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstacleFamily {
    pub rects: Vec<RectSpec>,
    /// Level `k < n`: section dimensions; level `n`: the two side strips.
    pub dims: Vec<LevelDims>,
    pub hypotheses: HypothesisReport,
}

impl ObstacleFamily {
    pub fn sparse(&self) -> bool {
        self.hypotheses.sparse.iter().all(|&b| b)
    }
}

/// The two thin strips along the box's long sides plus every same-index
/// section of a lower-level, same-orientation box whose 2-dilate meets the
/// corresponding section of `id`.
pub fn obstacle_family(c: &Certificate, p: &Profile, id: BoxId) -> Result<ObstacleFamily, CertError> {
    let b = c.cert_box(id).ok_or(CertError::NoSuchBox(id))?;
    let frame = BoxFrame::of(b, p);
    let k_sec = b.sections;
    let mut rects = Vec::new();
    let mut dims = Vec::new();
    for k in 1..id.level {
        let lk = p.level(k);
        let sw = &lk.w / int(k_sec as i64);
        dims.push(LevelDims::new(sw.clone(), lk.h.clone()));
        for f in c.levels.get(k - 1).into_iter().flatten() {
            for rb in f.boxes.iter().filter(|rb| rb.orientation == b.orientation) {
                let shift = frame.local(&rb.center);
                for i in 1..=k_sec.min(rb.sections) {
                    let s = rb.section_rect(i).shifted(&shift);
                    if s.scaled(&int(2)).meets(&b.section_rect(i)) {
                        let sc = s.center();
                        rects.push(RectSpec::new(k, sc.x, sc.y, sw.clone(), lk.h.clone()));
                    }
                }
            }
        }
    }
    let strip = &b.h / int(100);
    let off = &b.h * frac(1, 2) + &strip * frac(1, 2);
    dims.push(LevelDims::new(b.w.clone(), strip.clone()));
    for y in [off.clone(), -off] {
        rects.push(RectSpec::new(id.level, Q::zero(), y, b.w.clone(), strip.clone()));
    }
    let hypotheses = check_rect_hypotheses(&rects, &dims);
    Ok(ObstacleFamily { rects, dims, hypotheses })
}

/// Whether a box's witness is safe for its obstacle family.
pub fn witness_safe(c: &Certificate, p: &Profile, id: BoxId) -> Result<bool, CertError> {
    let b = c.cert_box(id).ok_or(CertError::NoSuchBox(id))?;
    let w = b.witness.as_ref().ok_or(CertError::MissingWitness(id))?;
    let fam = obstacle_family(c, p, id)?;
    Ok(SafeSet::new(&fam.rects, &fam.dims).contains(&BoxFrame::of(b, p).local(&w.point)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityResult {
    pub level: usize,
    pub ok: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub radius: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub grid_step: Q,
    pub frames: usize,
    /// A grid point with no frame center within `radius - grid_step`.
    pub first_gap: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub density: Vec<DensityResult>,
}

impl ValidationReport {
    /// All invariants hold. Density is reported separately.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn dense(&self) -> bool {
        self.density.iter().all(|d| d.ok)
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Collector {
    checks: Vec<CheckResult>,
}

impl Collector {
    fn record(&mut self, name: &str, first: Option<String>) {
        self.checks.push(CheckResult { name: name.to_string(), ok: first.is_none(), counterexample: first });
    }
}

fn first<T>(items: impl IntoIterator<Item = T>, bad: impl Fn(&T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(|t| bad(&t))
}

type Located<'a> = (FrameId, &'a Frame);

fn frames(c: &Certificate) -> Vec<Located<'_>> {
    c.frame_ids().into_iter().map(|id| (id, c.frame(id).expect("listed frame"))).collect()
}

fn boxes(c: &Certificate) -> Vec<(BoxId, &Frame, &CertBox)> {
    c.box_ids()
        .into_iter()
        .map(|id| (id, c.frame(id.frame_id()).expect("frame"), c.cert_box(id).expect("box")))
        .collect()
}

/// Squared distance from `c` to the ray leaving `(x0, y)` in direction `+x`.
fn ray_dist2(c: &Point, x0: &Q, y: &Q) -> Q {
    let dy = &c.y - y;
    let dx = if c.x >= *x0 { Q::zero() } else { x0 - &c.x };
    &dx * &dx + &dy * &dy
}

/// Why a box fails to be almost radial in its frame, if it does.
pub fn almost_radial_failure(p: &Profile, f: &Frame, b: &CertBox) -> Option<String> {
    let r2 = &f.r * &f.r;
    let d2: Vec<Q> = b.corners(p).iter().map(|q| q.dist2(&f.center)).collect();
    let far = d2.iter().max().expect("corners");
    if *far > r2 {
        return Some("corner outside the frame disk".into());
    }
    if *far != r2 {
        return Some("box does not touch the frame circle".into());
    }
    if b.w > f.r {
        return Some("long side exceeds the radius".into());
    }
    let cl = BoxFrame::of(b, p).local(&f.center);
    let x0 = -(&b.w * frac(1, 2));
    let lim = &f.r / int(100);
    for y in [&b.h * frac(1, 2), -(&b.h * frac(1, 2))] {
        if ray_dist2(&cl, &x0, &y) > &lim * &lim {
            return Some("long-side ray misses the center band".into());
        }
    }
    None
}

/// Names of the checks, in report order.
pub const CHECKS: [&str; 12] = [
    "frame_params",
    "center_separation",
    "box_count",
    "box_dims",
    "box_separation",
    "almost_radial",
    "shared_orientation",
    "section_geometry",
    "witness_in_box",
    "anchor_bound",
    "witness_safety",
    "orientation_range",
];

pub fn validate_certificate(c: &Certificate, p: &Profile, window: Option<&Window>) -> ValidationReport {
    let fs = frames(c);
    let bs = boxes(c);
    let mut col = Collector { checks: Vec::new() };
    let bad_orientation = first(&bs, |(id, f, b)| {
        (f.orientation >= p.k_dir || b.orientation >= p.k_dir).then(|| format!("{id}: orientation out of range"))
    });
    if let Some(why) = bad_orientation {
        for name in CHECKS {
            col.record(name, Some(why.clone()));
        }
        return ValidationReport { checks: col.checks, density: Vec::new() };
    }

    col.record(
        "frame_params",
        if c.levels.len() > p.levels.len() {
            Some(format!("{} levels, profile has {}", c.levels.len(), p.levels.len()))
        } else {
            first(&fs, |(id, f)| {
                (f.level != id.level || f.r != p.r(id.level) || f.orientation >= p.k_dir)
                    .then(|| format!("{id}: level, radius or orientation disagrees with the profile"))
            })
        },
    );
    let in_profile = c.levels.len() <= p.levels.len();

    let mut sep = None;
    'outer: for (i, (ia, fa)) in fs.iter().enumerate() {
        for (ib, fb) in &fs[i + 1..] {
            if ia.level == ib.level {
                let min = &p.separation_factor * &fa.r;
                if fa.center.dist2(&fb.center) < &min * &min {
                    sep = Some(format!("{ia} and {ib}"));
                    break 'outer;
                }
            }
        }
    }
    col.record("center_separation", sep);

    col.record(
        "box_count",
        first(&fs, |(id, f)| {
            let want = if in_profile { p.level(id.level).n_boxes.get() } else { None };
            (Some(f.boxes.len() as u64) != want).then(|| format!("{id} has {} boxes", f.boxes.len()))
        }),
    );
    col.record(
        "box_dims",
        first(&bs, |(id, _, b)| {
            let ok = in_profile && {
                let lp = p.level(id.level);
                b.w == lp.w && b.h == lp.h && b.sections == p.k_sec
            };
            (!ok).then(|| format!("{id}"))
        }),
    );

    let mut box_sep = None;
    'frames: for (id, f) in &fs {
        for i in 0..f.boxes.len() {
            for j in i + 1..f.boxes.len() {
                let h100 = &f.boxes[i].h * int(100);
                if f.boxes[i].section_dist2(0, &f.boxes[j], 0, p) < &h100 * &h100 {
                    box_sep = Some(format!("{id}: boxes {i} and {j}"));
                    break 'frames;
                }
            }
        }
    }
    col.record("box_separation", box_sep);

    col.record(
        "almost_radial",
        first(&bs, |(id, f, b)| almost_radial_failure(p, f, b).map(|why| format!("{id}: {why}"))),
    );
    col.record(
        "shared_orientation",
        first(&bs, |(id, f, b)| (b.orientation != f.orientation).then(|| format!("{id}"))),
    );
    col.record(
        "section_geometry",
        first(&bs, |(id, f, b)| {
            if b.sections == 0 {
                return Some(format!("{id}: no sections"));
            }
            let frame = BoxFrame::of(b, p);
            let d: Vec<Q> =
                (1..=b.sections).map(|i| frame.world(&b.section_rect(i).center()).dist2(&f.center)).collect();
            d.windows(2).any(|w| w[0] >= w[1]).then(|| format!("{id}: sections not ordered outward"))
        }),
    );
    col.record(
        "witness_in_box",
        first(&bs, |(id, _, b)| match &b.witness {
            None => Some(format!("{id}: no witness")),
            Some(w) => (!b.contains(p, &w.point)).then(|| format!("{id}: witness outside")),
        }),
    );
    col.record(
        "anchor_bound",
        first(&bs, |(id, _, b)| {
            let w = b.witness.as_ref()?;
            (w.point.dist_inf(&super::model::site_point(&w.anchor)) > frac(1, 2)).then(|| format!("{id}"))
        }),
    );
    col.record(
        "witness_safety",
        if in_profile {
            first(&bs, |(id, _, b)| {
                b.witness.as_ref()?;
                match witness_safe(c, p, *id) {
                    Ok(true) => None,
                    Ok(false) => Some(format!("{id}: witness in the obstacle hull")),
                    Err(e) => Some(format!("{id}: {e}")),
                }
            })
        } else {
            Some("levels beyond the profile".into())
        },
    );

    col.record("orientation_range", None);

    let density = match window {
        Some(win) if in_profile => (1..=c.levels.len()).map(|n| density_over(c, p, n, win)).collect(),
        _ => Vec::new(),
    };
    ValidationReport { checks: col.checks, density }
}

/// Whether every disk of radius `density_factor · r_n` centered in the
/// window holds an `n`-frame center.
///
/// Grid points at spacing `δ = R/4` cover the window within `δ`, so a
/// center within `R - δ` of every grid point suffices.
pub fn density_over(c: &Certificate, p: &Profile, n: usize, win: &Window) -> DensityResult {
    let radius = &p.density_factor * p.r(n);
    let step = &radius / int(4);
    let reach = &radius - &step;
    let reach2 = &reach * &reach;
    let centers: Vec<&Point> = c.levels.get(n - 1).into_iter().flatten().map(|f| &f.center).collect();
    let mut first_gap = None;
    let mut y = win.min.y.clone();
    'rows: loop {
        let mut x = win.min.x.clone();
        loop {
            let g = Point::new(x.clone(), y.clone());
            if !centers.iter().any(|c| c.dist2(&g) <= reach2) {
                first_gap = Some(g);
                break 'rows;
            }
            if x >= win.max.x {
                break;
            }
            x = (&x + &step).min(win.max.x.clone());
        }
        if y >= win.max.y {
            break;
        }
        y = (&y + &step).min(win.max.y.clone());
    }
    DensityResult { level: n, ok: first_gap.is_none(), radius, grid_step: step, frames: centers.len(), first_gap }
}

/// Outcome of the separation consequences of a valid certificate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Same-level frames at least `r_n/2` apart: equal-orientation,
    /// equal-index sections more than `r_n/4` apart.
    pub same_level_sections: Option<String>,
    /// Witnesses at different levels with equal direction and section are
    /// at least the smaller level's `h` apart.
    pub cross_level_witnesses: Option<String>,
    /// Distinct witnesses differ in direction or section, or are at least
    /// `h_1` apart.
    pub witness_classes: Option<String>,
    pub section_pairs: usize,
    pub witness_pairs: usize,
}

impl SeparationReport {
    pub fn ok(&self) -> bool {
        self.same_level_sections.is_none() && self.cross_level_witnesses.is_none() && self.witness_classes.is_none()
    }
}

pub fn separation_report(c: &Certificate, p: &Profile) -> SeparationReport {
    let mut rep = SeparationReport::default();
    let fs = frames(c);
    'sections: for (i, (ia, fa)) in fs.iter().enumerate() {
        for (ib, fb) in &fs[i + 1..] {
            if ia.level != ib.level {
                continue;
            }
            let r = &fa.r;
            let d2 = fa.center.dist2(&fb.center);
            let half = r * frac(1, 2);
            let far = r * frac(9, 4);
            if d2 < &half * &half || d2 > &far * &far {
                continue;
            }
            let quarter2 = (r * frac(1, 4)) * (r * frac(1, 4));
            for ba in &fa.boxes {
                for bb in fb.boxes.iter().filter(|bb| bb.orientation == ba.orientation) {
                    for s in 1..=ba.sections.min(bb.sections) {
                        rep.section_pairs += 1;
                        if ba.section_dist2(s, bb, s, p) <= quarter2 {
                            rep.same_level_sections = Some(format!("{ia} and {ib}, section {s}"));
                            break 'sections;
                        }
                    }
                }
            }
        }
    }
    let ws: Vec<(BoxId, usize, usize, &Point)> = c
        .witnesses()
        .into_iter()
        .map(|(id, b, w)| (id, b.orientation, b.section_of_local(&BoxFrame::of(b, p).local(&w.point)), &w.point))
        .collect();
    let h1 = p.levels.first().map(|l| l.h.clone()).unwrap_or_else(Q::zero);
    for (i, (ia, ta, sa, pa)) in ws.iter().enumerate() {
        for (ib, tb, sb, pb) in &ws[i + 1..] {
            rep.witness_pairs += 1;
            if ta != tb || sa != sb {
                continue;
            }
            let d2 = pa.dist2(pb);
            if ia.level != ib.level && rep.cross_level_witnesses.is_none() {
                let h = &p.level(ia.level.min(ib.level)).h;
                if d2 < h * h {
                    rep.cross_level_witnesses = Some(format!("{ia} and {ib}"));
                }
            }
            if d2 < &h1 * &h1 && rep.witness_classes.is_none() {
                rep.witness_classes = Some(format!("{ia} and {ib}"));
            }
        }
    }
    rep
}
