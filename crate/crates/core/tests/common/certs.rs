//! Certificate generators and batteries.

use aperiodic::certificate::*;
use aperiodic::geometry::Point;
use aperiodic::rational::{frac, int, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Four sections per box, two boxes per frame, on the level sizes of the
/// desk profiles.
pub fn sec4_profile(levels: usize, k_dir: usize) -> Profile {
    let all = [LevelParams::new(int(9900), int(2), 2), LevelParams::new(int(9_000_000_000), int(100_000), 2)];
    Profile::new(&format!("sec4-{levels}-{k_dir}"), all[..levels].to_vec(), k_dir, 4)
}

fn rand_q(rng: &mut ChaCha8Rng, lo: &Q, hi: &Q) -> Q {
    lo + (hi - lo) * frac(rng.gen_range(0..=1000), 1000)
}

/// A frame with no witnesses yet.
pub fn bare_frame(p: &Profile, level: usize, x: Q, y: Q, orientation: usize) -> Frame {
    layout_frame(p, level, Point::new(x, y), orientation).expect("frame fits")
}

/// Random same-level `r_n/2`-separated frames, top level first; lower-level
/// frames mostly sit in the first section of a higher box, usually with its
/// orientation, so obstacle families are populated.
pub fn random_certificate(rng: &mut ChaCha8Rng, p: &Profile) -> Certificate {
    let levels = p.levels.len();
    let mut c = Certificate::with_levels(levels);
    for n in (1..=levels).rev() {
        let r = p.r(n);
        let half2 = (&r / int(2)) * (&r / int(2));
        let want = rng.gen_range(2..=5);
        let mut placed = 0;
        for _ in 0..want * 30 {
            if placed == want {
                break;
            }
            let higher: Vec<&CertBox> = c.levels[n..].iter().flatten().flat_map(|f| &f.boxes).collect();
            let (center, orientation) = if !higher.is_empty() && rng.gen_bool(0.7) {
                let b = higher[rng.gen_range(0..higher.len())];
                let s = b.section_rect(1);
                let l = Point::new(rand_q(rng, &s.x0, &s.x1), rand_q(rng, &s.y0, &s.y1));
                let o = if rng.gen_bool(0.8) { b.orientation } else { rng.gen_range(0..p.k_dir) };
                (BoxFrame::of(b, p).world(&l), o)
            } else {
                let span = &r * int(2);
                (
                    Point::new(rand_q(rng, &-span.clone(), &span), rand_q(rng, &-span.clone(), &span)),
                    rng.gen_range(0..p.k_dir),
                )
            };
            if c.levels[n - 1].iter().any(|f| f.center.dist2(&center) < half2) {
                continue;
            }
            c.push_frame(layout_frame(p, n, center, orientation).expect("frame fits"));
            placed += 1;
        }
    }
    let prefer = Point::new(rand_q(rng, &int(-20_000), &int(20_000)), rand_q(rng, &int(-20_000), &int(20_000)));
    fill_witnesses(&mut c, p, &prefer).expect("witnesses fit");
    c
}

/// Random certificates on the four-section profiles: each must validate and
/// satisfy every separation consequence. Returns section and witness pairs
/// compared.
pub fn separation_battery(seed: u64, count: usize) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles = [sec4_profile(1, 1), sec4_profile(2, 1), sec4_profile(1, 2), sec4_profile(2, 2)];
    let (mut sections, mut witnesses) = (0, 0);
    for i in 0..count {
        let p = &profiles[i % profiles.len()];
        let c = random_certificate(&mut rng, p);
        let v = validate_certificate(&c, p, None);
        if !v.ok() {
            return Err(format!("certificate {i} ({}): {:?}", p.name, v.failed()));
        }
        let s = separation_report(&c, p);
        if !s.ok() {
            return Err(format!("certificate {i} ({}): {s:?}", p.name));
        }
        sections += s.section_pairs;
        witnesses += s.witness_pairs;
    }
    Ok((sections, witnesses))
}
