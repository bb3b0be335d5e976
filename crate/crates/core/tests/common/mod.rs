//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use aperiodic::geometry::{
    check_hypotheses, check_rect_hypotheses, convex_intersect, diamond_of_rect, Convex, DiamondSpec, LevelDims, Point,
    RectSpec,
};
use aperiodic::rational::{frac, int, Q};
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Diamond dimensions meeting the growth and slope conditions.
pub fn diamond_dims(levels: usize) -> Vec<LevelDims> {
    [(40, 4), (20_000, 100), (5_000_000, 2_000)]
        .iter()
        .take(levels)
        .map(|&(w, h)| LevelDims::new(int(w), int(h)))
        .collect()
}

/// Rectangle dimensions whose `◇(2R)` diamonds have [`diamond_dims`].
pub fn rect_dims(levels: usize) -> Vec<LevelDims> {
    diamond_dims(levels).iter().map(|d| LevelDims::new(&d.w / int(4), &d.h / int(4))).collect()
}

fn rand_q(rng: &mut ChaCha8Rng, lo: &Q, hi: &Q) -> Q {
    let t = frac(rng.gen_range(0..=1000), 1000);
    lo + (hi - lo) * t
}

/// A random point near the boundary of a diamond with the given center and
/// dims, at vertical offset up to `spread`.
fn near_boundary(rng: &mut ChaCha8Rng, c: &Point, w: &Q, h: &Q, spread: &Q) -> Point {
    let t = rand_q(rng, &int(-1), &int(1));
    let x = &c.x + &t * w / int(2);
    let top = (int(1) - t.clone().abs()) * h / int(2);
    let sign = if rng.gen_bool(0.5) { int(1) } else { int(-1) };
    let off = rand_q(rng, &-spread.clone(), spread);
    Point::new(x, &c.y + sign * top + off)
}

fn sparse_with<T: Convex>(cand: &T, others: &[T], c: &Q) -> bool {
    let cv = cand.vertices();
    let cs = cand.scaled(c).vertices();
    others.iter().all(|o| !convex_intersect(&cv, &o.scaled(c).vertices()) && !convex_intersect(&cs, &o.vertices()))
}

/// Centers per level: top-level ones scattered, lower-level ones mostly
/// near the boundary of an already placed larger shape so merges happen.
#[allow(clippy::too_many_arguments)]
fn place<T: Convex + Clone>(
    rng: &mut ChaCha8Rng,
    levels: usize,
    max_total: usize,
    dims: &[LevelDims],
    make: impl Fn(usize, Point) -> T,
    level_of: impl Fn(&T) -> usize,
    outline: impl Fn(&T) -> (Q, Q),
    sparsity: &Q,
) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for n in (1..=levels).rev() {
        let d = &dims[n - 1];
        let want = if n == levels { rng.gen_range(1..=3) } else { rng.gen_range(2..=10) };
        let mut placed = 0;
        for _ in 0..want * 20 {
            if placed == want || out.len() >= max_total {
                break;
            }
            let higher: Vec<&T> = out.iter().filter(|s| level_of(s) > n).collect();
            let c = if !higher.is_empty() && rng.gen_bool(0.75) {
                let s = higher[rng.gen_range(0..higher.len())];
                let (w, h) = outline(s);
                near_boundary(rng, s.center(), &w, &h, &(&d.h * int(2)))
            } else {
                let span_w = &d.w * int(60);
                let span_h = &d.h * int(60);
                Point::new(rand_q(rng, &-span_w.clone(), &span_w), rand_q(rng, &-span_h.clone(), &span_h))
            };
            let cand = make(n, c);
            let same: Vec<T> = out.iter().filter(|s| level_of(s) == n).cloned().collect();
            if sparse_with(&cand, &same, sparsity) {
                out.push(cand);
                placed += 1;
            }
        }
    }
    out
}

/// Random diamond family (up to 3 levels, at most 30 diamonds) meeting the
/// hull hypotheses.
pub fn diamond_family(rng: &mut ChaCha8Rng) -> (Vec<DiamondSpec>, Vec<LevelDims>) {
    let levels = rng.gen_range(1..=3);
    let dims = diamond_dims(levels);
    let fam = place(
        rng,
        levels,
        30,
        &dims,
        |n, c| DiamondSpec::new(n, c.x, c.y, dims[n - 1].w.clone(), dims[n - 1].h.clone()),
        |d| d.level,
        |d| (d.w.clone(), d.h.clone()),
        &int(20),
    );
    assert!(check_hypotheses(&fam, &dims).ok());
    (fam, dims)
}

/// Random rectangle family meeting the safe-set hypotheses.
pub fn rect_family(rng: &mut ChaCha8Rng) -> (Vec<RectSpec>, Vec<LevelDims>) {
    let levels = rng.gen_range(1..=3);
    let dims = rect_dims(levels);
    let fam = place(
        rng,
        levels,
        30,
        &dims,
        |n, c| RectSpec::new(n, c.x, c.y, dims[n - 1].w.clone(), dims[n - 1].h.clone()),
        |r| r.level,
        |r| {
            let d = diamond_of_rect(&r.scaled(&int(2)));
            (d.w, d.h)
        },
        &int(80),
    );
    assert!(check_rect_hypotheses(&fam, &dims).ok());
    (fam, dims)
}

/// Sample points around each shape: inside, on the boundary scale, and out
/// to `reach` times its size.
pub fn sample_points<T: Convex>(
    rng: &mut ChaCha8Rng,
    shapes: &[T],
    dims_of: impl Fn(&T) -> (Q, Q),
    per: usize,
    reach: i64,
) -> Vec<Point> {
    let mut pts = Vec::new();
    for s in shapes {
        let (w, h) = dims_of(s);
        for _ in 0..per {
            let k = int(rng.gen_range(1..=reach));
            let dx = rand_q(rng, &(-&w * &k / int(2)), &(&w * &k / int(2)));
            let dy = rand_q(rng, &(-&h * &k / int(2)), &(&h * &k / int(2)));
            pts.push(Point::new(&s.center().x + dx, &s.center().y + dy));
        }
    }
    pts
}

use aperiodic::geometry::{
    build_hull, build_hull_in_order, check_hull, longest_covered_run, segments_intersect, vertical_probe_escapes, Hull,
    SafePath, SafeSet,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;

/// Path avoids the hull: no path segment meets a boundary edge and no path
/// vertex lies in a region. Slopes at most `alpha`, passes through `p`.
pub fn path_ok(hull: &Hull, alpha: &Q, p: &Point, path: &SafePath) -> Result<(), String> {
    let pts = &path.points;
    if !pts.iter().any(|q| q == p)
        && !pts.windows(2).any(|w| {
            w[0].x <= p.x && p.x <= w[1].x && aperiodic::geometry::orient(&w[0], &w[1], p) == std::cmp::Ordering::Equal
        })
    {
        return Err(format!("path misses {p:?}"));
    }
    for w in pts.windows(2) {
        if w[1].x <= w[0].x {
            return Err("path is not a graph".into());
        }
        let s = ((&w[1].y - &w[0].y) / (&w[1].x - &w[0].x)).abs();
        if &s > alpha {
            return Err(format!("slope {s} exceeds {alpha}"));
        }
    }
    for e in &hull.elements {
        if pts.iter().any(|q| e.region.contains(q)) {
            return Err("path vertex in hull".into());
        }
        for (a, b) in e.region.edges() {
            if pts.windows(2).any(|w| segments_intersect(&w[0], &w[1], &a, &b)) {
                return Err("path meets hull boundary".into());
            }
        }
    }
    Ok(())
}

/// Hull properties and order independence on random diamond families.
pub fn hull_battery(seed: u64, families: usize, perms: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut merges = 0;
    for f in 0..families {
        let (fam, dims) = diamond_family(&mut rng);
        let hull = build_hull(&fam, &dims);
        let report = check_hull(&hull, &dims);
        if !report.ok() {
            return Err(format!("family {f}: {report:?}"));
        }
        merges += hull.merges.len();
        let canon = hull.canonical();
        for _ in 0..perms {
            let mut order: Vec<usize> = (0..fam.len()).collect();
            order.shuffle(&mut rng);
            if build_hull_in_order(&fam, &dims, &order).canonical() != canon {
                return Err(format!("family {f}: hull depends on processing order"));
            }
        }
    }
    Ok(merges)
}

/// Sandwich inclusions, safe paths and vertical probes on random rectangle
/// families. Returns the number of safe points that received a path.
pub fn safe_battery(seed: u64, families: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut paths = 0;
    for f in 0..families {
        let (rects, dims) = rect_family(&mut rng);
        let set = SafeSet::new(&rects, &dims);
        let alpha = dims[0].alpha();
        let pts = sample_points(&mut rng, &rects, |r| (r.w.clone(), r.h.clone()), 6, 24);
        let mut pathed = 0;
        for p in &pts {
            let in20 = rects.iter().any(|r| r.scaled(&int(20)).contains(p));
            let in2 = rects.iter().any(|r| r.scaled(&int(2)).contains(p));
            let safe = set.contains(p);
            if !in20 && !safe {
                return Err(format!("family {f}: {p:?} outside every 20R but unsafe"));
            }
            if safe && in2 {
                return Err(format!("family {f}: {p:?} safe but inside some 2R"));
            }
            if safe && pathed < 4 {
                let extent = &dims.last().expect("levels").w * int(2);
                let path = set.path(p, &extent).map_err(|e| format!("family {f}: {e} at {p:?}"))?;
                path_ok(&set.hull, &alpha, p, &path).map_err(|e| format!("family {f}: {e}"))?;
                pathed += 1;
            }
        }
        paths += pathed;
        let probe = &dims.last().expect("levels").h * int(8);
        for e in &set.hull.elements {
            let b = e.region.bbox();
            for i in 0..=8 {
                let x = &b.min.x + b.width() * frac(i, 8);
                if longest_covered_run(&set.hull, &x) >= probe {
                    return Err(format!("family {f}: covered run at x={x} reaches 8h_N"));
                }
                for j in 0..=8 {
                    let y0 = &b.min.y - &probe + (b.height() + &probe) * frac(j, 8);
                    if !vertical_probe_escapes(&set.hull, &x, &y0, &probe) {
                        return Err(format!("family {f}: probe at ({x}, {y0}) fully covered"));
                    }
                }
            }
        }
    }
    Ok(paths)
}

/// Safe points stay safe when every obstacle whose `k`-dilate misses the
/// point is moved or dropped (keeping the hypotheses and keeping the point
/// outside the moved obstacle's `k`-dilate). Returns points checked.
pub fn locality_battery(seed: u64, points: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut guard = 0;
    while checked < points {
        guard += 1;
        if guard > points * 50 {
            return Err(format!("only {checked} safe points found"));
        }
        let diamonds = rng.gen_bool(0.5);
        if diamonds {
            let (fam, dims) = diamond_family(&mut rng);
            let hull = build_hull(&fam, &dims);
            let k = int(10);
            for p in sample_points(&mut rng, &fam, |d| (d.w.clone(), d.h.clone()), 2, 12) {
                if hull.contains(&p) {
                    continue;
                }
                let moved = perturb(
                    &mut rng,
                    &fam,
                    &p,
                    &k,
                    |d| d.level,
                    &int(20),
                    |d, c| DiamondSpec::new(d.level, c.x, c.y, d.w.clone(), d.h.clone()),
                );
                if !check_hypotheses(&moved, &dims).ok() {
                    continue;
                }
                if build_hull(&moved, &dims).contains(&p) {
                    return Err(format!("diamond locality broken at {p:?}"));
                }
                checked += 1;
            }
        } else {
            let (rects, dims) = rect_family(&mut rng);
            let set = SafeSet::new(&rects, &dims);
            let k = int(40);
            for p in sample_points(&mut rng, &rects, |r| (r.w.clone(), r.h.clone()), 2, 48) {
                if !set.contains(&p) {
                    continue;
                }
                let moved = perturb(
                    &mut rng,
                    &rects,
                    &p,
                    &k,
                    |r| r.level,
                    &int(40),
                    |r, c| RectSpec::new(r.level, c.x, c.y, r.w.clone(), r.h.clone()),
                );
                if !check_rect_hypotheses_at(&moved, &dims, 40) {
                    continue;
                }
                if !SafeSet::new(&moved, &dims).contains(&p) {
                    return Err(format!("rect locality broken at {p:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn check_rect_hypotheses_at(rects: &[RectSpec], dims: &[LevelDims], c: i64) -> bool {
    let r = check_rect_hypotheses(rects, dims);
    let sparse = (1..=dims.len()).all(|n| {
        let fam: Vec<RectSpec> = rects.iter().filter(|r| r.level == n).cloned().collect();
        aperiodic::geometry::is_sparse(&fam, &int(c))
    });
    r.dims_match && sparse && r.growth.iter().all(|&b| b) && r.slopes.iter().all(|&b| b)
}

fn perturb<T: Convex + Clone>(
    rng: &mut ChaCha8Rng,
    fam: &[T],
    p: &Point,
    k: &Q,
    level_of: impl Fn(&T) -> usize,
    sparsity: &Q,
    rebuild: impl Fn(&T, Point) -> T,
) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for s in fam {
        if s.scaled(k).contains(p) {
            out.push(s.clone());
            continue;
        }
        match rng.gen_range(0..3) {
            0 => continue,
            1 => out.push(s.clone()),
            _ => {
                let b = extent_of(s);
                let mut done = false;
                for _ in 0..10 {
                    let c = Point::new(
                        &s.center().x + rand_q(rng, &-b.0.clone(), &b.0),
                        &s.center().y + rand_q(rng, &-b.1.clone(), &b.1),
                    );
                    let cand = rebuild(s, c);
                    let same: Vec<T> = out.iter().filter(|o| level_of(o) == level_of(&cand)).cloned().collect();
                    if !cand.scaled(k).contains(p) && sparse_with(&cand, &same, sparsity) {
                        out.push(cand);
                        done = true;
                        break;
                    }
                }
                if !done {
                    out.push(s.clone());
                }
            }
        }
    }
    out
}

/// Width and height of the shape's vertex box.
fn extent_of<T: Convex>(s: &T) -> (Q, Q) {
    let b = aperiodic::geometry::BBox::of(&s.vertices()).expect("vertices");
    (b.width(), b.height())
}

pub mod certs;
pub mod glue;
