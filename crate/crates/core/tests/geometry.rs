//! Jigsaw algebra, adjoining, hulls, sparsity and safe paths.

mod common;

use aperiodic::geometry::*;
use aperiodic::rational::{frac, int, Q};
use proptest::prelude::*;

fn q(v: i64) -> Q {
    int(v)
}

fn pl(pts: &[(i64, i64)]) -> PlFn {
    PlFn::new(pts.iter().map(|&(x, y)| (q(x), q(y))).collect()).unwrap()
}

fn diamond(level: usize, cx: i64, cy: i64, w: i64, h: i64) -> DiamondSpec {
    DiamondSpec::new(level, q(cx), q(cy), q(w), q(h))
}

#[test]
fn triangle_jigsaws() {
    assert_eq!(PlFn::tri(&q(0), &q(1), &q(1)).unwrap(), pl(&[(-1, 0), (0, 1), (1, 0)]));
    assert_eq!(PlFn::tri(&q(5), &q(0), &q(3)).unwrap().points(), &[(q(5), q(0))]);
    let t = PlFn::tri(&q(2), &q(3), &frac(1, 2)).unwrap();
    assert_eq!((t.lo().clone(), t.hi().clone(), t.eval(&q(2))), (q(-4), q(8), q(3)));
    assert_eq!(PlFn::tri(&q(0), &q(1), &q(-1)), Err(GeometryError::NonPositiveSlope));
}

#[test]
fn max_identities() {
    let f = PlFn::tri(&q(0), &q(1), &q(1)).unwrap();
    assert_eq!(f.max(&f), f);
    let g = PlFn::tri(&q(0), &q(2), &q(1)).unwrap();
    assert_eq!(f.max(&g), g);
}

#[test]
fn adjoin_examples() {
    let d = diamond(1, 0, 0, 8, 2);
    let g = DoubleJigsaw::from_diamond(&d);
    assert_eq!(g.adjoin(&d), g);
    // a diamond sitting above the equator grows only the upper jigsaw
    let up = diamond(1, 3, 1, 8, 2);
    let a = g.adjoin(&up);
    assert_eq!(a.lower, g.lower.extended(a.lo(), a.hi()));
    assert!(a.upper.eval(&q(3)) == q(2));
    for v in up.vertices().iter().chain(&d.vertices()) {
        assert!(a.contains(v));
    }
    let (e0, e1) = g.equator();
    let (a0, a1) = a.equator();
    assert!(a0.x <= e0.x && a1.x >= e1.x && a0.y == e0.y);
    // flat diamonds change nothing
    assert_eq!(g.adjoin(&diamond(1, 2, 5, 8, 0)), g);
}

#[test]
fn south_pole_reflects_across_equator() {
    let g = DoubleJigsaw::from_diamond(&diamond(1, 0, 10, 8, 2));
    let below = diamond(1, 4, 9, 8, 2);
    let a = g.adjoin(&below);
    // south pole at (4, 8), two below the equator: triangle peak 2 at x = 4
    assert_eq!(a.lower.eval(&q(4)), q(2));
    for v in below.vertices() {
        assert!(a.contains(&v));
    }
}

#[test]
fn hull_examples() {
    let dims = vec![LevelDims::new(q(40), q(4))];
    let one = vec![diamond(1, 0, 0, 40, 4)];
    let h = build_hull(&one, &dims);
    assert_eq!(h.elements.len(), 1);
    assert_eq!(h.elements[0].region, DoubleJigsaw::from_diamond(&one[0]));

    let far = vec![diamond(1, 0, 0, 40, 4), diamond(1, 0, 100, 40, 4)];
    assert_eq!(build_hull(&far, &dims).elements.len(), 2);

    let near = vec![diamond(1, 0, 0, 40, 4), diamond(1, 10, 5, 40, 4)];
    let h = build_hull(&near, &dims);
    assert_eq!(h.elements.len(), 1);
    assert_eq!(h.elements[0].region, DoubleJigsaw::from_diamond(&near[0]).adjoin(&near[1]));
    let m = &h.merges[0];
    assert!(m.changed.width() < q(200) && m.changed.height() < q(20));
}

#[test]
fn distance_examples() {
    let g = DoubleJigsaw::from_diamond(&diamond(1, 0, 0, 40, 4));
    assert_eq!(diamond_region_dist2(&diamond(1, 0, 0, 40, 4), &g), q(0));
    // vertical gap between south pole (0, 7) and north pole (0, 2)
    assert_eq!(diamond_region_dist2(&diamond(1, 0, 9, 40, 4), &g), q(25));
    assert_eq!(point_region_dist2(&Point::new(q(0), q(5)), &g), q(9));
}

#[test]
fn rect_diamonds() {
    let r = RectSpec::new(1, q(0), q(0), q(1), q(1));
    let d = diamond_of_rect(&r);
    assert_eq!((d.w.clone(), d.h.clone()), (q(2), q(2)));
    assert!(r.vertices().iter().all(|v| d.contains(v)));
    let d2 = diamond_of_rect(&r.scaled(&q(2)));
    assert_eq!((d2.w, d2.h), (q(4), q(4)));
    let s = scale_about_center(&RectSpec::new(1, q(1), q(1), q(3), q(2)), &q(2));
    assert_eq!((s.center, s.w, s.h), (Point::new(q(1), q(1)), q(6), q(4)));
    assert_eq!(scale_about_center(&r, &q(1)), r);
}

#[test]
fn sparsity_examples() {
    let a = RectSpec::new(1, q(0), q(0), q(1), q(1));
    assert!(is_sparse(std::slice::from_ref(&a), &q(80)));
    assert!(is_sparse(&[a.clone(), RectSpec::new(1, q(1000), q(0), q(1), q(1))], &q(80)));
    assert!(!is_sparse(&[a.clone(), RectSpec::new(1, q(10), q(0), q(1), q(1))], &q(80)));
    // touching closed sets are not sparse
    assert!(!is_sparse(&[a, RectSpec::new(1, q(1), q(0), q(1), q(1))], &q(1)));
}

#[test]
fn hypothesis_examples() {
    let dims = vec![LevelDims::new(q(40), q(4))];
    assert!(check_hypotheses(&[diamond(1, 0, 0, 40, 4)], &dims).ok());
    let flat = vec![LevelDims::new(q(40), q(4)), LevelDims::new(q(20000), q(4))];
    let r = check_hypotheses(&[], &flat);
    assert_eq!(r.growth, vec![true, false]);
    let slopes = vec![LevelDims::new(q(40), q(4)), LevelDims::new(q(8000), q(41))];
    assert_eq!(check_hypotheses(&[], &slopes).slopes, vec![true, true]);
    let fast = vec![LevelDims::new(q(40), q(4)), LevelDims::new(q(1000), q(41))];
    assert_eq!(check_hypotheses(&[], &fast).slopes, vec![true, false]);
}

#[test]
fn safe_examples() {
    let empty = SafeSet::new(&[], &[]);
    let p = Point::new(q(3), q(-7));
    assert!(empty.contains(&p));
    let path = empty.path(&p, &q(10)).unwrap();
    assert_eq!(path.points, vec![Point::new(q(-7), q(-7)), Point::new(q(13), q(-7))]);

    let dims = common::rect_dims(1);
    let r = RectSpec::new(1, q(0), q(0), dims[0].w.clone(), dims[0].h.clone());
    let set = SafeSet::new(std::slice::from_ref(&r), &dims);
    assert!(!set.contains(&r.center));
    assert!(set.contains(&Point::new(q(0), q(11))));
    assert!(matches!(set.path(&r.center, &q(5)), Err(GeometryError::UnsafePoint)));

    // obstacle below the line of travel: straight path
    let p = Point::new(q(0), q(40));
    let path = set.path(&p, &q(100)).unwrap();
    assert_eq!(path.points.len(), 2);
    assert!(path.points.iter().all(|v| v.y == q(40)));

    // start just above the obstacle: the path bends over it
    let p = Point::new(q(0), frac(21, 10));
    let path = set.path(&p, &q(100)).unwrap();
    common::path_ok(&set.hull, &dims[0].alpha(), &p, &path).unwrap();
    assert!(verify_path(&set.hull, &set.diamond_dims, &p, &path));
}

#[test]
fn hull_battery_small() {
    let merges = common::hull_battery(7, 25, 3).unwrap();
    assert!(merges > 0, "generator should produce merges");
}

#[test]
fn safe_battery_small() {
    assert!(common::safe_battery(11, 10).unwrap() > 0);
}

#[test]
fn locality_battery_small() {
    common::locality_battery(13, 20).unwrap();
}

fn small_q() -> impl Strategy<Value = Q> {
    (-40i64..40, 1i64..5).prop_map(|(n, d)| frac(n, d))
}

fn jigsaw() -> impl Strategy<Value = PlFn> {
    (small_q(), prop::collection::vec((1i64..6, 0i64..12), 1..6)).prop_map(|(x0, steps)| {
        let mut x = x0;
        let mut pts = vec![(x.clone(), q(0))];
        for (dx, y) in steps {
            x += q(dx);
            pts.push((x.clone(), q(y)));
        }
        x += q(1);
        pts.push((x, q(0)));
        PlFn::new(pts).unwrap()
    })
}

proptest! {
    #[test]
    fn max_is_pointwise(f in jigsaw(), g in jigsaw(), xs in prop::collection::vec(small_q(), 1..10)) {
        let m = f.max(&g);
        let n = f.min(&g);
        for x in &xs {
            prop_assert_eq!(m.eval(x), f.eval(x).max(g.eval(x)));
            prop_assert_eq!(n.eval(x), f.eval(x).min(g.eval(x)));
        }
    }

    /// `f <= max(f, Δ_{p,β}) <= f + Δ_{(x0, y0 - f(x0)), β - α}` when `f`
    /// has slope at most `α`.
    #[test]
    fn adjoining_effect_bound(f in jigsaw(), x0 in small_q(), lift in 0i64..10, xs in prop::collection::vec(small_q(), 1..12)) {
        let alpha = f.max_abs_slope().unwrap();
        let beta = &alpha + int(1);
        let y0 = f.eval(&x0) + q(lift);
        let g = f.max(&PlFn::tri(&x0, &y0, &beta).unwrap());
        let bump_h = &y0 - f.eval(&x0);
        for x in &xs {
            let bound = f.eval(x) + tri_value(&x0, &bump_h, &(&beta - &alpha), x);
            prop_assert!(f.eval(x) <= g.eval(x));
            prop_assert!(g.eval(x) <= bound, "x={} g={} bound={}", x, g.eval(x), bound);
        }
    }

    #[test]
    fn adjoin_contains_both(cx in -20i64..20, cy in -6i64..6, w in 1i64..20, h in 0i64..6, t in prop::collection::vec((0i64..=10, 0i64..=10), 1..8)) {
        let g = DoubleJigsaw::from_diamond(&diamond(1, 0, 0, 16, 4));
        let d = diamond(1, cx, cy, w, h);
        let a = g.adjoin(&d);
        // convex combinations of diamond vertices
        let dv = d.vertices();
        let gv = g.polygon();
        for (s, u) in &t {
            let (s, u) = (frac(*s, 10), frac(*u, 10));
            let mix = |v: &[Point]| {
                let p = v[0].scale(&(int(1) - &s)).add(&v[1].scale(&s));
                let r = v[2].scale(&(int(1) - &s)).add(&v[3].scale(&s));
                p.scale(&(int(1) - &u)).add(&r.scale(&u))
            };
            prop_assert!(h == 0 || a.contains(&mix(&dv)));
            for v in &gv {
                prop_assert!(a.contains(v));
            }
        }
        let (e0, e1) = g.equator();
        prop_assert!(a.contains(&e0) && a.contains(&e1));
    }

    #[test]
    fn sparsity_symmetric(ax in -50i64..50, ay in -50i64..50, c in 1i64..30) {
        let a = RectSpec::new(1, q(0), q(0), q(2), q(1));
        let b = RectSpec::new(1, q(ax), q(ay), q(2), q(1));
        prop_assert_eq!(is_sparse(&[a.clone(), b.clone()], &q(c)), is_sparse(&[b, a], &q(c)));
    }
}
