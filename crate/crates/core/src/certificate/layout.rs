use super::checks::obstacle_family;
use super::model::{site_point, BoxFrame, BoxId, CertBox, Certificate, Frame, LocalRect, Window, Witness};
use super::profile::{Profile, STACK_SPACING};
use super::CertError;
use crate::geometry::{Hull, Point, SafeSet};
use crate::patterns::Site;
use crate::rational::{ceil_int, floor_int, frac, from_f64_approx, int, to_f64, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Some `m ∈ (0, 1)` with `2m/(1+m²) ∈ [lo, hi]`, preferring small
/// denominators: floating-point guesses are tried first, then bisection.
fn slope_for_sine(lo: &Q, hi: &Q) -> Option<Q> {
    if lo > hi || *lo <= Q::zero() || *hi >= Q::one() {
        return None;
    }
    let sine = |m: &Q| (m * int(2)) / (Q::one() + m * m);
    let mid = (to_f64(lo) + to_f64(hi)) / 2.0;
    let guess = (mid.asin() / 2.0).tan();
    let mut den = 10i64;
    while den <= 1_000_000_000_000 {
        let m = from_f64_approx(guess, den);
        let s = sine(&m);
        if m > Q::zero() && &s >= lo && &s <= hi {
            return Some(m);
        }
        den *= 10;
    }
    let (mut a, mut b) = (Q::zero(), Q::one());
    for _ in 0..200 {
        let m = (&a + &b) * frac(1, 2);
        let s = sine(&m);
        if &s < lo {
            a = m;
        } else if &s > hi {
            b = m;
        } else {
            return Some(m);
        }
    }
    None
}

/// An almost-radial box in a frame: long axis along direction
/// `orientation`, pointing at the center, with perpendicular offset within
/// `h/4` outward of `offset` and its outer corner exactly on the circle.
pub fn radial_box(
    p: &Profile,
    level: usize,
    center: &Point,
    orientation: usize,
    offset: &Q,
) -> Result<CertBox, CertError> {
    let lp = p.level(level);
    let (w, h, r) = (&lp.w, &lp.h, lp.r());
    let reach = offset.abs() + h * frac(1, 2);
    let m = slope_for_sine(&(&reach / &r), &((&reach + h * frac(1, 4)) / &r))
        .ok_or_else(|| CertError::Layout { level, detail: format!("offset {offset} does not fit the frame") })?;
    let m2 = &m * &m;
    let den = Q::one() + &m2;
    let cos = (Q::one() - &m2) / &den;
    let sin = (&m * int(2)) / &den;
    if &r * &cos < *w {
        return Err(CertError::Layout { level, detail: "box reaches past the frame center".into() });
    }
    let sign = if offset.is_negative() { int(-1) } else { int(1) };
    let along = -(&r * &cos - w * frac(1, 2));
    let across = sign * (&r * &sin - h * frac(1, 2));
    let frame = BoxFrame::new(center.clone(), p.directions[orientation].clone());
    Ok(CertBox {
        center: frame.world(&Point::new(along, across)),
        orientation,
        w: w.clone(),
        h: h.clone(),
        sections: p.k_sec,
        witness: None,
    })
}

/// Perpendicular offsets of `count` boxes stacked symmetrically.
pub fn stack_offsets(h: &Q, count: u64) -> Vec<Q> {
    let mid = frac(count as i64 - 1, 2);
    (0..count).map(|j| (int(j as i64) - &mid) * int(STACK_SPACING) * h).collect()
}

/// A frame with the standard stack of `N_n` boxes and no witnesses yet.
pub fn layout_frame(p: &Profile, level: usize, center: Point, orientation: usize) -> Result<Frame, CertError> {
    let lp = p.level(level);
    let count = lp.n_boxes.get().ok_or(CertError::NotExecutable)?;
    let boxes = stack_offsets(&lp.h, count)
        .iter()
        .map(|o| radial_box(p, level, &center, orientation, o))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Frame { level, center, r: lp.r(), orientation, boxes })
}

/// Places a witness for box `id` on an integer site congruent to `residue`
/// modulo the level, inside section 1 and safe for the box's obstacles.
///
/// Abscissas of the section are probed outward from the one nearest
/// `prefer`; at each, the free vertical gap of the obstacle hull nearest the
/// box axis is targeted and sites around the target are tested in order of
/// distance.
pub fn place_witness(
    c: &Certificate,
    p: &Profile,
    id: BoxId,
    residue: Site,
    prefer: &Point,
) -> Result<Witness, CertError> {
    const STEPS: i64 = 20_000;
    let b = c.cert_box(id).ok_or(CertError::NoSuchBox(id))?;
    let fam = obstacle_family(c, p, id)?;
    let safe = SafeSet::new(&fam.rects, &fam.dims);
    let frame = BoxFrame::of(b, p);
    let sec = b.section_rect(1);
    let x_star = frame.local(prefer).x.max(sec.x0.clone()).min(sec.x1.clone());
    let n = id.level as i64;
    let margin = int(2 * (n + 1));
    let len = floor_int(&sec.width()).to_i64().unwrap_or(i64::MAX).min(STEPS);
    for k in 0..=len {
        for dx in if k == 0 { vec![0] } else { vec![k, -k] } {
            let x = &x_star + int(dx);
            if !(sec.x0 <= x && x <= sec.x1) {
                continue;
            }
            for y in free_heights(&safe.hull, &x, &sec.y0, &sec.y1, &margin).into_iter().take(3) {
                let target = frame.world(&Point::new(x.clone(), y));
                for s in congruent_sites_near(&target, residue, n) {
                    let l = frame.local(&site_point(&s));
                    if sec.contains(&l) && safe.contains(&l) {
                        return Ok(Witness::at_site(s));
                    }
                }
            }
        }
    }
    Err(CertError::WitnessPlacement(id))
}

/// Heights in `[lo, hi]` off the hull sections over `x`, one per free gap,
/// nearest 0 first. Each keeps up to `margin` from the gap ends.
fn free_heights(hull: &Hull, x: &Q, lo: &Q, hi: &Q, margin: &Q) -> Vec<Q> {
    let mut covered: Vec<(Q, Q)> = hull.elements.iter().filter_map(|e| e.region.section(x)).collect();
    covered.push((lo.clone() - int(1), lo.clone()));
    covered.push((hi.clone(), hi.clone() + int(1)));
    covered.sort();
    let mut merged: Vec<(Q, Q)> = Vec::new();
    for (a, b) in covered {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.clone().max(b),
            _ => merged.push((a, b)),
        }
    }
    let two = int(2);
    let mut out: Vec<Q> = merged
        .windows(2)
        .filter(|w| w[0].1 < w[1].0)
        .map(|w| {
            let m = margin.clone().min((&w[1].0 - &w[0].1) / &two);
            Q::zero().max(&w[0].1 + &m).min(&w[1].0 - &m)
        })
        .collect();
    out.sort_by_key(|a| a.abs());
    out
}

/// Sites `≡ residue (mod n)` within sup-distance `n` of `q`, nearest first.
fn congruent_sites_near(q: &Point, residue: Site, n: i64) -> Vec<Site> {
    let base = |v: &Q| floor_int(v).to_i64().expect("coordinates fit i64");
    let (bx, by) = (base(&q.x), base(&q.y));
    let mut out = Vec::new();
    for x in bx - n..=bx + n + 1 {
        for y in by - n..=by + n + 1 {
            if (x - residue.x).rem_euclid(n) == 0 && (y - residue.y).rem_euclid(n) == 0 {
                out.push(Site::new(x, y));
            }
        }
    }
    out.sort_by_key(|s| (site_point(s).dist2(q), *s));
    out
}

/// Frames on a lattice of spacing `density_factor · r_n` per level, offset
/// so that the middle box of one frame crosses the window center, with one
/// witness per box on a site `≡ (0, 0) (mod n)` in section 1.
pub fn build_dense_certificate(p: &Profile, window: &Window) -> Result<Certificate, CertError> {
    if !p.check().ok() {
        return Err(CertError::Profile(p.name.clone()));
    }
    let mut c = Certificate::with_levels(p.levels.len());
    let wc = window.center();
    for n in 1..=p.levels.len() {
        let spacing = &p.density_factor * p.r(n);
        let count = p.level(n).n_boxes.get().ok_or(CertError::NotExecutable)?;
        let mid = &stack_offsets(&p.level(n).h, count)[(count / 2) as usize];
        let probe = radial_box(p, n, &Point::new(Q::zero(), Q::zero()), 0, mid)?;
        let c0 = wc.sub(&probe.center);
        let range = |lo: &Q, hi: &Q, o: &Q| {
            let a = floor_int(&((lo - o) / &spacing)).to_i64().expect("lattice index");
            let b = ceil_int(&((hi - o) / &spacing)).to_i64().expect("lattice index");
            a..=b
        };
        for j in range(&window.min.y, &window.max.y, &c0.y) {
            for i in range(&window.min.x, &window.max.x, &c0.x) {
                let center = c0.add(&Point::new(&spacing * int(i), &spacing * int(j)));
                let orientation = (i + j).rem_euclid(p.k_dir as i64) as usize;
                c.push_frame(layout_frame(p, n, center, orientation)?);
            }
        }
    }
    fill_witnesses(&mut c, p, &wc)?;
    Ok(c)
}

/// Places every missing witness, lower levels first.
pub fn fill_witnesses(c: &mut Certificate, p: &Profile, prefer: &Point) -> Result<(), CertError> {
    for id in c.box_ids() {
        if c.cert_box(id).is_some_and(|b| b.witness.is_none()) {
            let w = place_witness(c, p, id, Site::new(0, 0), prefer)?;
            c.levels[id.level - 1][id.frame].boxes[id.index].witness = Some(w);
        }
    }
    Ok(())
}

/// Clips the segment `a→b` to a closed rectangle; returns the parameter
/// interval inside it.
pub fn clip_segment(a: &Point, b: &Point, r: &LocalRect) -> Option<(Q, Q)> {
    let (mut t0, mut t1) = (Q::zero(), Q::one());
    let d = b.sub(a);
    for (dp, lo, hi, start) in [(&d.x, &r.x0, &r.x1, &a.x), (&d.y, &r.y0, &r.y1, &a.y)] {
        if dp.is_zero() {
            if start < lo || start > hi {
                return None;
            }
            continue;
        }
        let (ta, tb) = ((lo - start) / dp, (hi - start) / dp);
        let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Whether some connected piece of the polyline inside `r` meets both of
/// its horizontal edges.
pub fn crosses_long_edges(poly: &[Point], r: &LocalRect) -> bool {
    let mut bottom = false;
    let mut top = false;
    let mut open = false;
    for i in 0..poly.len().saturating_sub(1) {
        let (a, b) = (&poly[i], &poly[i + 1]);
        let Some((t0, t1)) = clip_segment(a, b, r) else {
            (bottom, top, open) = (false, false, false);
            continue;
        };
        if !(open && t0.is_zero()) {
            (bottom, top) = (false, false);
        }
        for t in [&t0, &t1] {
            let y = &a.y + (&b.y - &a.y) * t;
            bottom |= y == r.y0;
            top |= y == r.y1;
        }
        if bottom && top {
            return true;
        }
        open = t1.is_one();
    }
    false
}

/// `count` almost-radial boxes of one frame, each crossed by the polyline
/// from one long side to the other and pairwise more than `100h` apart.
///
/// Directions are tried in order; for each, offsets across the frame's
/// central band are scanned in steps of `h/2` and accepted greedily.
pub fn find_radial_rects(
    p: &Profile,
    level: usize,
    center: &Point,
    poly: &[Point],
    count: usize,
) -> Result<Vec<CertBox>, CertError> {
    let lp = p.level(level);
    let (h, r) = (&lp.h, lp.r());
    let band = &r / int(100) - h * frac(3, 4);
    let gap2 = (h * int(100)) * (h * int(100));
    let mut best = 0;
    for theta in 0..p.k_dir {
        let frame = BoxFrame::new(center.clone(), p.directions[theta].clone());
        let proj: Vec<Q> = poly.iter().map(|q| frame.local(q).y).collect();
        let (Some(pmin), Some(pmax)) = (proj.iter().min(), proj.iter().max()) else {
            break;
        };
        let lo = (pmin + h * frac(1, 2)).max(-band.clone());
        let hi = (pmax - h * frac(1, 2)).min(band.clone());
        let mut chosen: Vec<CertBox> = Vec::new();
        let mut t = lo;
        while t <= hi && chosen.len() < count {
            if let Ok(b) = radial_box(p, level, center, theta, &t) {
                let bf = BoxFrame::of(&b, p);
                let local: Vec<Point> = poly.iter().map(|q| bf.local(q)).collect();
                let apart = chosen.iter().all(|o| b.section_dist2(0, o, 0, p) > gap2);
                if apart && crosses_long_edges(&local, &b.local_rect()) {
                    chosen.push(b);
                }
            }
            t += h * frac(1, 2);
        }
        if chosen.len() >= count {
            return Ok(chosen);
        }
        best = best.max(chosen.len());
    }
    Err(CertError::TooFewSlots { wanted: count, best })
}
