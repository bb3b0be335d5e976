//! Gluing two certified configurations along a finite region: `z` copies
//! `x` away from `E_y` and `y` on it, and a merged certificate is built by
//! keeping, relocating, rebuilding or shifting frames of both inputs.

mod regions;
mod steps;
mod verify;

pub use regions::{make_regions, RegionSetup, Zone};
pub use steps::{glue, relocation_target, GlueFailure, GlueOutcome, GlueState, LogEntry, Step};
pub use verify::{verify_glue, GlueReport};

use crate::certificate::{BoxId, CertError, FrameId};
use crate::game::MoveError;
use crate::geometry::GeometryError;
use crate::patterns::Site;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which input a frame or site comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::X => "x",
            Side::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlueError {
    #[error("the region is empty")]
    EmptyRegion,
    #[error("region site ({}, {}) lies outside the window", .0.x, .0.y)]
    OutsideWindow(Site),
    #[error("region is not 4-connected: ({}, {}) is cut off", .0.x, .0.y)]
    NotConnected(Site),
    #[error("region has a hole at ({}, {})", .0.x, .0.y)]
    HasHole(Site),
    #[error("zones only {0} apart (squared)")]
    Separation(i64),
    #[error("the gap between the zones is empty")]
    EmptyGap,
    #[error("x fills with {x:?} but y with {y:?}")]
    FillMismatch { x: Option<crate::game::Coin>, y: Option<crate::game::Coin> },
    #[error("input {side} is not compatible with its certificate at {frame}: {verdict}")]
    Incompatible { side: Side, frame: FrameId, verdict: String },
    #[error("certificate {side} has more levels than the profile")]
    TooManyLevels { side: Side },
    #[error("safe path of {box_id}: {source}")]
    Path { box_id: BoxId, source: GeometryError },
    #[error("relocated witness of {0} has its anchor outside the gap")]
    AnchorOutsideGap(BoxId),
    #[error("{site_desc} component {component}: {side} holds {held:?}, frame needs {needed:?}")]
    Conflict {
        side: Side,
        site_desc: String,
        component: usize,
        held: Option<crate::game::Coin>,
        needed: crate::game::Coin,
    },
    #[error("coin replay: {0}")]
    Move(#[from] MoveError),
    #[error("admitting {frame} (step {step:?}): {detail}")]
    Admission { step: Step, frame: FrameId, detail: String },
    #[error("no donor frame at level {level} within reach of ({x}, {y})")]
    NoDonor { level: usize, x: String, y: String },
    #[error("shifted center of {side} {frame} is only {detail}")]
    Shift { side: Side, frame: FrameId, detail: String },
    #[error(transparent)]
    Cert(#[from] CertError),
}
