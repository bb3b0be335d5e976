//! Glue instances and an outside check of their results.

use aperiodic::certificate::*;
use aperiodic::gluing::{glue, GlueOutcome, LogEntry};
use aperiodic::patterns::Site;
use aperiodic::rational::{int, round_int};
use num_traits::ToPrimitive;
use std::collections::{BTreeSet, HashSet, VecDeque};

pub const BUDGET: usize = 100_000;

pub struct Instance {
    pub name: String,
    pub p: Profile,
    pub win: Window,
    pub cx: Certificate,
    pub x: Configuration,
    pub cy: Certificate,
    pub y: Configuration,
    pub region: Vec<Site>,
    pub budget: usize,
}

impl Instance {
    pub fn run(&self) -> GlueOutcome {
        glue(&self.x, &self.cx, &self.y, &self.cy, &self.region, &self.p, &self.win, self.budget)
            .unwrap_or_else(|e| panic!("{}: {}", self.name, e.error))
    }
}

/// Two directions, one section, four boxes: `r = 50000`.
pub fn glue_k2() -> Profile {
    Profile::new("glue-k2", vec![LevelParams::new(int(45_000), int(2), 4)], 2, 1)
}

/// Every explicit coin turned over; unorientability survives the swap.
pub fn flipped(x: &Configuration) -> Configuration {
    let mut out = Configuration::new(x.components(), x.fill);
    for (a, b, comp, coin) in x.assignments() {
        out.assign(Site::new(a, b), comp, coin.flip()).expect("fresh");
    }
    out
}

fn shape(name: &str) -> Vec<(i64, i64)> {
    match name {
        "dot" => vec![(0, 0)],
        "domino" => vec![(0, 0), (1, 0)],
        "block" => vec![(0, 0), (1, 0), (0, 1), (1, 1)],
        "plus" => vec![(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)],
        "ell" => vec![(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)],
        "bar" => (-10..10).map(|i| (i, 0)).collect(),
        "pole" => (-10..10).map(|j| (0, j)).collect(),
        "slab" => (0..5).flat_map(|i| (0..4).map(move |j| (i, j))).collect(),
        "stair" => (0..6).flat_map(|i| [(i, i), (i + 1, i)]).collect(),
        _ => panic!("unknown shape {name}"),
    }
}

fn placed(name: &str, at: (i64, i64)) -> Vec<Site> {
    shape(name).into_iter().map(|(a, b)| Site::new(a + at.0, b + at.1)).collect()
}

/// Small one-level instances: regions of at most twenty sites on and off
/// the witnesses of a dense `desk1` certificate, glued to the same input,
/// to its flip, or to an input certified from a shifted window.
pub fn desk1_instances() -> Vec<Instance> {
    let p = Profile::desk1();
    let win = Window::square(int(30_000));
    let cx = build_dense_certificate(&p, &win).expect("dense build");
    let x = choose_compatible_config(&cx, &p, BUDGET).expect("compatible");
    let shifted = Window::new(int(-25_000), int(-30_000), int(35_000), int(30_000));
    let cs = build_dense_certificate(&p, &shifted).expect("dense build");
    let xs = choose_compatible_config(&cs, &p, BUDGET).expect("compatible");
    let cases: [(&str, (i64, i64), u8); 12] = [
        ("dot", (0, 0), 0),
        ("domino", (0, 0), 1),
        ("block", (-1, -1), 1),
        ("plus", (0, -205), 1),
        ("ell", (-2, -207), 2),
        ("bar", (0, 0), 1),
        ("pole", (0, -200), 2),
        ("slab", (-2, -2), 0),
        ("stair", (-3, -3), 1),
        ("plus", (12_345, 6_789), 1),
        ("block", (29_000, -29_000), 2),
        ("bar", (-5_000, -205), 1),
    ];
    cases
        .iter()
        .map(|&(s, at, partner)| {
            let (cy, y) = match partner {
                0 => (cx.clone(), x.clone()),
                1 => (cx.clone(), flipped(&x)),
                _ => (cs.clone(), flipped(&xs)),
            };
            Instance {
                name: format!("desk1 {s} at {at:?} partner {partner}"),
                p: p.clone(),
                win: win.clone(),
                cx: cx.clone(),
                x: x.clone(),
                cy,
                y,
                region: placed(s, at),
                budget: BUDGET,
            }
        })
        .collect()
}

/// A vertical line of 5201 sites `dx` to the right of the central frame
/// of a dense `glue-k2` certificate; `n_0 = 2`, so every step runs at
/// level 1.
pub fn line_instance(dx: i64, win: Window) -> Instance {
    let p = glue_k2();
    let cx = build_dense_certificate(&p, &win).expect("dense build");
    let x = choose_compatible_config(&cx, &p, BUDGET).expect("compatible");
    let center = cx.levels[0].iter().map(|f| &f.center).min_by_key(|c| c.norm2()).expect("frames").clone();
    let (ux, uy) = (round_int(&center.x).to_i64().unwrap(), round_int(&center.y).to_i64().unwrap());
    let region = (-2600..=2600).map(|k| Site::new(ux + dx, uy + k)).collect();
    Instance {
        name: format!("glue-k2 line at +{dx}"),
        p,
        win,
        cx: cx.clone(),
        y: flipped(&x),
        x,
        cy: cx,
        region,
        budget: BUDGET,
    }
}

/// `E_x` recomputed by flood fill: sites more than 3 from the region,
/// connected to the far boundary of a generous box; outside the box,
/// everything.
pub fn outer_sites(region: &[Site]) -> impl Fn(Site) -> bool {
    let set: BTreeSet<Site> = region.iter().copied().collect();
    let (x0, x1) = (region.iter().map(|s| s.x).min().unwrap() - 8, region.iter().map(|s| s.x).max().unwrap() + 8);
    let (y0, y1) = (region.iter().map(|s| s.y).min().unwrap() - 8, region.iter().map(|s| s.y).max().unwrap() + 8);
    let far = |s: Site| set.iter().all(|t| (s.x - t.x).pow(2) + (s.y - t.y).pow(2) > 9);
    let inside = move |s: Site| s.x >= x0 && s.x <= x1 && s.y >= y0 && s.y <= y1;
    let mut seen: HashSet<Site> = HashSet::new();
    let mut queue = VecDeque::from([Site::new(x0, y0)]);
    seen.insert(Site::new(x0, y0));
    while let Some(s) = queue.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let t = Site::new(s.x + dx, s.y + dy);
            if inside(t) && far(t) && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    move |s: Site| !inside(s) || seen.contains(&s)
}

/// The claims of a glue run, rechecked from `z`, `C` and the inputs only.
pub fn outside_check(inst: &Instance, out: &GlueOutcome) -> Result<(), String> {
    let in_x = outer_sites(&inst.region);
    let in_y: BTreeSet<Site> = inst.region.iter().copied().collect();
    let sites: BTreeSet<Site> =
        out.z.assigned_sites().chain(inst.x.assigned_sites()).chain(inst.y.assigned_sites()).copied().collect();
    for s in sites {
        for comp in 0..inst.p.components() {
            let z = out.z.value(s, comp);
            if in_x(s) && z != inst.x.value(s, comp) {
                return Err(format!("z differs from x at {s:?}/{comp}"));
            }
            if in_y.contains(&s) && z != inst.y.value(s, comp) {
                return Err(format!("z differs from y at {s:?}/{comp}"));
            }
        }
    }
    let v = validate_certificate(&out.c, &inst.p, Some(&inst.win));
    if !v.ok() || !v.dense() {
        return Err(format!("validation: {:?} {:?}", v.failed(), v.density));
    }
    let rep = compatible(&out.z, &out.c, &inst.p, inst.budget).map_err(|e| e.to_string())?;
    if let Some(f) = rep.frames.iter().find(|f| !f.result.is_unorientable()) {
        return Err(format!("{} is {}", f.frame, f.result.label()));
    }
    if out.z.audit().1 != 0 {
        return Err("refused writes".into());
    }
    for e in &out.log {
        if let LogEntry::Write { site, .. } = e {
            if in_x(*site) || in_y.contains(site) {
                return Err(format!("write inside a zone at {site:?}"));
            }
        }
    }
    Ok(())
}
