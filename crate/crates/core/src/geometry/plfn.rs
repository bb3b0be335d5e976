use super::GeometryError;
use crate::rational::{int, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// A piecewise-linear function on a closed interval, read as 0 off it.
///
/// Breakpoints have nondecreasing `x`; two consecutive breakpoints may share an
/// `x`, which encodes a jump (the closed region then takes the larger value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlFn {
    #[serde(with = "crate::rational::serde_pairs")]
    pts: Vec<(Q, Q)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Max,
    Min,
}

impl PlFn {
    pub fn new(pts: Vec<(Q, Q)>) -> Result<Self, GeometryError> {
        if pts.is_empty() {
            return Err(GeometryError::EmptyFunction);
        }
        for w in pts.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(GeometryError::NotMonotone);
            }
        }
        for w in pts.windows(3) {
            if w[0].0 == w[2].0 {
                return Err(GeometryError::NotMonotone);
            }
        }
        Ok(PlFn { pts })
    }

    pub fn constant(lo: Q, hi: Q, v: Q) -> Self {
        if lo == hi {
            return PlFn { pts: vec![(lo, v)] };
        }
        PlFn { pts: vec![(lo, v.clone()), (hi, v)] }
    }

    /// `max(0, y0 - alpha |x - x0|)` on its support.
    pub fn tri(x0: &Q, y0: &Q, alpha: &Q) -> Result<Self, GeometryError> {
        if !alpha.is_positive() {
            return Err(GeometryError::NonPositiveSlope);
        }
        if y0.is_negative() {
            return Err(GeometryError::NegativeHeight);
        }
        if y0.is_zero() {
            return Ok(PlFn { pts: vec![(x0.clone(), Q::zero())] });
        }
        let r = y0 / alpha;
        Ok(PlFn { pts: vec![(x0 - &r, Q::zero()), (x0.clone(), y0.clone()), (x0 + &r, Q::zero())] })
    }

    pub fn points(&self) -> &[(Q, Q)] {
        &self.pts
    }

    pub fn lo(&self) -> &Q {
        &self.pts[0].0
    }

    pub fn hi(&self) -> &Q {
        &self.pts[self.pts.len() - 1].0
    }

    fn interp(a: &(Q, Q), b: &(Q, Q), x: &Q) -> Q {
        &a.1 + (&b.1 - &a.1) * (x - &a.0) / (&b.0 - &a.0)
    }

    /// Index of the first breakpoint with `px >= x`.
    fn lower_bound(&self, x: &Q) -> usize {
        self.pts.partition_point(|p| &p.0 < x)
    }

    /// Left and right limits at `x`, with 0 outside the domain.
    pub fn limits(&self, x: &Q) -> (Q, Q) {
        let n = self.pts.len();
        let i = self.lower_bound(x);
        let mut j = i;
        while j < n && &self.pts[j].0 == x {
            j += 1;
        }
        let left = if i == 0 {
            Q::zero()
        } else if i < j {
            self.pts[i].1.clone()
        } else if i < n {
            Self::interp(&self.pts[i - 1], &self.pts[i], x)
        } else {
            Q::zero()
        };
        let right = if j == n {
            Q::zero()
        } else if i < j {
            self.pts[j - 1].1.clone()
        } else if i > 0 {
            Self::interp(&self.pts[i - 1], &self.pts[i], x)
        } else {
            Q::zero()
        };
        (left, right)
    }

    /// The value at `x` (the larger side at a jump), `None` off the domain.
    pub fn value_at(&self, x: &Q) -> Option<Q> {
        if x < self.lo() || x > self.hi() {
            return None;
        }
        let i = self.lower_bound(x);
        let mut best: Option<Q> = None;
        let mut j = i;
        while j < self.pts.len() && &self.pts[j].0 == x {
            let y = &self.pts[j].1;
            if best.as_ref().is_none_or(|b| y > b) {
                best = Some(y.clone());
            }
            j += 1;
        }
        Some(best.unwrap_or_else(|| Self::interp(&self.pts[i - 1], &self.pts[i], x)))
    }

    /// Value at `x`, 0 off the domain.
    pub fn eval(&self, x: &Q) -> Q {
        self.value_at(x).unwrap_or_else(Q::zero)
    }

    fn combine(&self, other: &PlFn, op: Op) -> PlFn {
        let pick = |a: Q, b: Q| match op {
            Op::Max => a.max(b),
            Op::Min => a.min(b),
        };
        let lo = self.lo().min(other.lo()).clone();
        let hi = self.hi().max(other.hi()).clone();
        if lo == hi {
            return PlFn { pts: vec![(lo.clone(), pick(self.eval(&lo), other.eval(&lo)))] };
        }
        let mut xs: Vec<Q> = self.pts.iter().chain(&other.pts).map(|p| p.0.clone()).collect();
        xs.sort();
        xs.dedup();
        let lims: Vec<_> = xs.iter().map(|x| (self.limits(x), other.limits(x))).collect();
        let mut out: Vec<(Q, Q)> = Vec::new();
        for (k, x) in xs.iter().enumerate() {
            let ((fl, fr), (gl, gr)) = &lims[k];
            if k > 0 {
                // crossing strictly inside (xs[k-1], x)
                let ((_, pfr), (_, pgr)) = &lims[k - 1];
                let da = pfr - pgr;
                let db = fl - gl;
                if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                    let a = &xs[k - 1];
                    let t = &da / (&da - &db);
                    let xc = a + (x - a) * &t;
                    let yc = pfr + (fl - pfr) * &t;
                    out.push((xc, yc));
                }
            }
            if x > &lo {
                out.push((x.clone(), pick(fl.clone(), gl.clone())));
            }
            if x < &hi {
                let v = pick(fr.clone(), gr.clone());
                if !(x > &lo && out.last().is_some_and(|p| p.1 == v)) {
                    out.push((x.clone(), v));
                }
            }
        }
        PlFn { pts: simplify(out) }
    }

    /// Pointwise maximum on the union of domains.
    pub fn max(&self, other: &PlFn) -> PlFn {
        self.combine(other, Op::Max)
    }

    /// Pointwise minimum on the union of domains.
    pub fn min(&self, other: &PlFn) -> PlFn {
        self.combine(other, Op::Min)
    }

    /// The same function padded with zeros out to `[lo, hi]`.
    pub fn extended(&self, lo: &Q, hi: &Q) -> PlFn {
        let mut pts = Vec::new();
        if lo < self.lo() {
            pts.push((lo.clone(), Q::zero()));
            pts.push((self.lo().clone(), Q::zero()));
        }
        pts.extend(self.pts.iter().cloned());
        if hi > self.hi() {
            pts.push((self.hi().clone(), Q::zero()));
            pts.push((hi.clone(), Q::zero()));
        }
        PlFn { pts: simplify(pts) }
    }

    /// Restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restricted(&self, lo: &Q, hi: &Q) -> PlFn {
        let mut pts = vec![(lo.clone(), self.limits(lo).1)];
        pts.extend(self.pts.iter().filter(|p| &p.0 > lo && &p.0 < hi).cloned());
        pts.push((hi.clone(), self.limits(hi).0));
        if lo == hi {
            pts.truncate(1);
            pts[0].1 = self.eval(lo);
        }
        PlFn { pts: simplify(pts) }
    }

    pub fn map_y(&self, f: impl Fn(&Q) -> Q) -> PlFn {
        PlFn { pts: self.pts.iter().map(|(x, y)| (x.clone(), f(y))).collect() }
    }

    /// Largest absolute slope; `None` if the function has a jump.
    pub fn max_abs_slope(&self) -> Option<Q> {
        let mut best = Q::zero();
        for w in self.pts.windows(2) {
            if w[0].0 == w[1].0 {
                if w[0].1 != w[1].1 {
                    return None;
                }
                continue;
            }
            let s = ((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).abs();
            if s > best {
                best = s;
            }
        }
        Some(best)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pts.iter().all(|p| !p.1.is_negative())
    }

    /// Largest value over the domain.
    pub fn peak(&self) -> Q {
        self.pts.iter().map(|p| p.1.clone()).max().expect("nonempty")
    }

    /// Whether `self > other` at every point of `[lo, hi]`, both read with
    /// their larger side at jumps (so `other`'s closed region is avoided).
    pub fn strictly_above(&self, other: &PlFn, lo: &Q, hi: &Q) -> bool {
        self.probe_xs(other, lo, hi).iter().all(|x| {
            let g = other.value_at(x).unwrap_or(Q::zero());
            self.sides(x).iter().all(|f| f > &g)
        })
    }

    /// Whether `self < -other` on `[lo, hi]`, i.e. strictly below the region
    /// hanging under the axis with depth `other`, offset by `shift`.
    pub fn strictly_below_neg(&self, other: &PlFn, shift: &Q, lo: &Q, hi: &Q) -> bool {
        self.probe_xs(other, lo, hi).iter().all(|x| {
            let g = shift - other.value_at(x).unwrap_or(Q::zero());
            self.sides(x).iter().all(|f| f < &g)
        })
    }

    /// Values at `x`: the point value plus the one-sided limits from inside
    /// the domain.
    fn sides(&self, x: &Q) -> Vec<Q> {
        let mut out: Vec<Q> = self.value_at(x).into_iter().collect();
        let (l, r) = self.limits(x);
        if x > self.lo() && x <= self.hi() {
            out.push(l);
        }
        if x >= self.lo() && x < self.hi() {
            out.push(r);
        }
        out
    }

    fn probe_xs(&self, other: &PlFn, lo: &Q, hi: &Q) -> Vec<Q> {
        let mut xs: Vec<Q> =
            self.pts.iter().chain(&other.pts).map(|p| p.0.clone()).filter(|x| x >= lo && x <= hi).collect();
        xs.push(lo.clone());
        xs.push(hi.clone());
        xs.sort();
        xs.dedup();
        xs
    }
}

/// Drops repeated points and interior points on a straight run.
fn simplify(pts: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last() == Some(&p) {
            continue;
        }
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            let collinear = a.0 < b.0 && b.0 < p.0 && (&b.1 - &a.1) * (&p.0 - &b.0) == (&p.1 - &b.1) * (&b.0 - &a.0);
            if collinear {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// The triangle `max(0, y0 - alpha |x - x0|)` evaluated at `x`.
pub fn tri_value(x0: &Q, y0: &Q, alpha: &Q, x: &Q) -> Q {
    let v = y0 - alpha * (x - x0).abs();
    if v.is_negative() {
        int(0)
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn f(pts: &[(i64, i64)]) -> PlFn {
        PlFn::new(pts.iter().map(|&(x, y)| (int(x), int(y))).collect()).unwrap()
    }

    #[test]
    fn tri_examples() {
        assert_eq!(PlFn::tri(&int(0), &int(1), &int(1)).unwrap(), f(&[(-1, 0), (0, 1), (1, 0)]));
        assert_eq!(PlFn::tri(&int(5), &int(0), &int(3)).unwrap().points(), &[(int(5), int(0))]);
        let t = PlFn::tri(&int(2), &int(3), &frac(1, 2)).unwrap();
        assert_eq!((t.lo(), t.hi()), (&int(-4), &int(8)));
        assert!(PlFn::tri(&int(0), &int(1), &int(0)).is_err());
    }

    #[test]
    fn max_of_crossing_triangles() {
        let a = f(&[(0, 0), (2, 2), (4, 0)]);
        let b = f(&[(2, 0), (4, 2), (6, 0)]);
        let m = a.max(&b);
        assert_eq!(m, f(&[(0, 0), (2, 2), (3, 1), (4, 2), (6, 0)]));
        assert_eq!(a.min(&b).eval(&int(3)), int(1));
    }

    #[test]
    fn disjoint_supports_and_jumps() {
        let a = f(&[(0, 1), (1, 1)]);
        let b = f(&[(3, 0), (4, 2), (5, 0)]);
        let m = a.max(&b);
        assert_eq!(m.eval(&int(2)), int(0));
        assert_eq!(m.eval(&int(1)), int(1));
        assert_eq!(m.limits(&int(1)), (int(1), int(0)));
        assert_eq!(m.max_abs_slope(), None);
    }
}
