//! Scenes for hulls, safe paths, certificates and glue runs.

use crate::svg::SvgScene;
use aperiodic::certificate::{Certificate, Profile, Window};
use aperiodic::geometry::{Convex, DiamondSpec, Hull, Point, SafePath};
use aperiodic::gluing::{LogEntry, RegionSetup};
use aperiodic::rational::int;

fn window_corners(w: &Window) -> Vec<Point> {
    vec![
        w.min.clone(),
        Point::new(w.max.x.clone(), w.min.y.clone()),
        w.max.clone(),
        Point::new(w.min.x.clone(), w.max.y.clone()),
    ]
}

/// Hull elements filled, input diamonds outlined.
pub fn hull_scene(hull: &Hull, diamonds: &[DiamondSpec]) -> SvgScene {
    let mut s = SvgScene::new("hull");
    for e in &hull.elements {
        s.region("hull", e.region.polygon());
    }
    for d in diamonds {
        s.outline("diamond", d.vertices());
    }
    s
}

pub fn path_scene(hull: &Hull, diamonds: &[DiamondSpec], p: &Point, path: &SafePath) -> SvgScene {
    let mut s = hull_scene(hull, diamonds);
    s.title = "safe path".into();
    s.polyline("path", path.points.clone());
    s.point("query", p.clone());
    s
}

/// Frames as circles, boxes and their sections outlined, witnesses as dots.
pub fn certificate_scene(c: &Certificate, p: &Profile, window: Option<&Window>) -> SvgScene {
    let mut s = SvgScene::new("certificate");
    add_certificate(&mut s, c, p);
    if let Some(w) = window {
        s.outline("window", window_corners(w));
    }
    s
}

fn add_certificate(s: &mut SvgScene, c: &Certificate, p: &Profile) {
    for frame in c.levels.iter().flatten() {
        s.circle("frame", frame.center.clone(), frame.r.clone());
        for b in &frame.boxes {
            for i in 1..b.sections {
                s.outline("section", b.section_corners(p, i));
            }
            s.outline("box", b.corners(p));
            if let Some(w) = &b.witness {
                s.point("witness", w.point.clone());
            }
        }
    }
}

/// `E_y` cells, the gap, the merged certificate and every relocation.
pub fn glue_scene(setup: &RegionSetup, c: &Certificate, p: &Profile, log: &[LogEntry], window: &Window) -> SvgScene {
    let mut s = SvgScene::new("glue");
    let half = aperiodic::rational::frac(1, 2);
    for site in &setup.e_y {
        let (x, y) = (int(site.x), int(site.y));
        s.region(
            "ey",
            vec![
                Point::new(&x - &half, &y - &half),
                Point::new(&x + &half, &y - &half),
                Point::new(&x + &half, &y + &half),
                Point::new(&x - &half, &y + &half),
            ],
        );
    }
    for piece in setup.gap.pieces() {
        s.region("gap", piece.corners());
    }
    s.outline("window", window_corners(window));
    add_certificate(&mut s, c, p);
    for e in log {
        if let LogEntry::Relocate { from, to, .. } = e {
            s.polyline("relocation", vec![from.clone(), to.clone()]);
        }
        if let LogEntry::Shift { from, to, .. } = e {
            s.polyline("relocation", vec![from.clone(), to.clone()]);
        }
    }
    s
}
