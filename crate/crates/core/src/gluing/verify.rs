use super::regions::RegionSetup;
use super::steps::LogEntry;
use super::Side;
use crate::certificate::{
    compatible, validate_certificate, Certificate, Configuration, Profile, ValidationReport, Window,
};
use crate::patterns::Site;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Post-run checks of a glue, each recomputed from `z`, `C` and the
/// inputs rather than taken from the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueReport {
    pub n0: usize,
    /// First site and component where `z` and `x` differ on `E_x`.
    pub restriction_x: Option<String>,
    pub restriction_y: Option<String>,
    pub validation: ValidationReport,
    /// Frames whose state under `z` is not unorientable, with the verdict.
    pub incompatible: Vec<String>,
    pub compat_error: Option<String>,
    pub frames: usize,
    pub writes: u64,
    pub rejected: u64,
    /// Relocated witnesses found outside the gap.
    pub stray_relocations: Vec<String>,
    /// A same-level pair from different inputs at most `r/2` apart.
    pub cross_separation: Option<String>,
    pub skipped: usize,
}

impl GlueReport {
    pub fn ok(&self) -> bool {
        self.restriction_x.is_none()
            && self.restriction_y.is_none()
            && self.validation.ok()
            && self.validation.dense()
            && self.incompatible.is_empty()
            && self.compat_error.is_none()
            && self.rejected == 0
            && self.stray_relocations.is_empty()
            && self.cross_separation.is_none()
    }

    /// One line per failed property.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.restriction_x.iter().map(|s| format!("restriction to E_x: {s}")));
        out.extend(self.restriction_y.iter().map(|s| format!("restriction to E_y: {s}")));
        for ch in self.validation.failed() {
            out.push(format!("{}: {}", ch.name, ch.counterexample.clone().unwrap_or_default()));
        }
        for d in self.validation.density.iter().filter(|d| !d.ok) {
            out.push(format!("density at level {}", d.level));
        }
        out.extend(self.incompatible.iter().map(|s| format!("compatibility: {s}")));
        out.extend(self.compat_error.iter().map(|s| format!("compatibility: {s}")));
        if self.rejected > 0 {
            out.push(format!("{} refused second writes", self.rejected));
        }
        out.extend(self.stray_relocations.iter().map(|s| format!("relocation outside the gap: {s}")));
        out.extend(self.cross_separation.iter().map(|s| format!("cross separation: {s}")));
        out
    }
}

fn restriction(z: &Configuration, src: &Configuration, within: impl Fn(Site) -> bool) -> Option<String> {
    if z.fill != src.fill {
        return Some(format!("fills differ: {:?} and {:?}", z.fill, src.fill));
    }
    let sites: BTreeSet<Site> =
        z.assigned_sites().chain(src.assigned_sites()).copied().filter(|&s| within(s)).collect();
    for s in sites {
        for comp in 0..z.components().max(src.components()) {
            let (a, b) = (z.value(s, comp), src.value(s, comp));
            if a != b {
                return Some(format!("({}, {}) component {comp}: {a:?} against {b:?}", s.x, s.y));
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
pub fn verify_glue(
    x: &Configuration,
    y: &Configuration,
    setup: &RegionSetup,
    z: &Configuration,
    c: &Certificate,
    log: &[LogEntry],
    p: &Profile,
    window: &Window,
    budget: usize,
) -> GlueReport {
    let restriction_x = restriction(z, x, |s| setup.in_x(s));
    let restriction_y = restriction(z, y, |s| setup.in_y(s));
    let validation = validate_certificate(c, p, Some(window));
    let (incompatible, compat_error) = match compatible(z, c, p, budget) {
        Ok(rep) => (
            rep.frames
                .iter()
                .filter(|v| !v.result.is_unorientable())
                .map(|v| format!("{}: {}", v.frame, v.result.label()))
                .collect(),
            None,
        ),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let (writes, rejected) = z.audit();

    let stray_relocations = log
        .iter()
        .filter_map(|e| match e {
            LogEntry::Relocate { frame, index, to, .. } if !setup.in_gap(to) => Some(format!("{frame} box {index}")),
            _ => None,
        })
        .collect();

    let origin: BTreeMap<_, Side> = log
        .iter()
        .filter_map(|e| match e {
            LogEntry::Admit { source, frame, .. } => Some((*frame, *source)),
            _ => None,
        })
        .collect();
    let mut cross_separation = None;
    'outer: for (n, frames) in c.levels.iter().enumerate() {
        let sep = p.r(n + 1) * &p.separation_factor;
        for (i, a) in frames.iter().enumerate() {
            for (j, b) in frames.iter().enumerate().skip(i + 1) {
                let ids = (
                    crate::certificate::FrameId { level: n + 1, index: i },
                    crate::certificate::FrameId { level: n + 1, index: j },
                );
                let differ = origin.get(&ids.0).zip(origin.get(&ids.1)).is_some_and(|(s, t)| s != t);
                if differ && a.center.dist2(&b.center) <= &sep * &sep {
                    cross_separation = Some(format!("{} and {}", ids.0, ids.1));
                    break 'outer;
                }
            }
        }
    }
    let skipped = log.iter().filter(|e| matches!(e, LogEntry::Skip { .. })).count();
    GlueReport {
        n0: setup.n0,
        restriction_x,
        restriction_y,
        validation,
        incompatible,
        compat_error,
        frames: c.frame_count(),
        writes,
        rejected,
        stray_relocations,
        cross_separation,
        skipped,
    }
}
