//! Witness certificates: frames of almost-radial boxes, each holding one
//! safe witness, plus the configurations whose coin-and-bucket states over
//! every frame are unorientable.

mod checks;
mod compat;
mod layout;
mod model;
mod profile;

pub use checks::{
    almost_radial_failure, density_over, obstacle_family, separation_report, validate_certificate, witness_safe,
    CheckResult, DensityResult, ObstacleFamily, SeparationReport, ValidationReport, CHECKS,
};
pub use compat::{
    anchor_collision, aperiodicity_extract, bucket_index, cbc, choose_compatible_config, compatible, layer_restriction,
    placements, split_coins, CompatReport, Configuration, FrameVerdict, Oracle, Placement,
};
pub use layout::{
    build_dense_certificate, clip_segment, crosses_long_edges, fill_witnesses, find_radial_rects, layout_frame,
    place_witness, radial_box, stack_offsets,
};
pub use model::{
    anchor_of, polygon_dist2, site_pair, site_point, BoxFrame, BoxId, CertBox, Certificate, Frame, FrameId, LocalRect,
    Window, Witness,
};
pub use profile::{
    direction_set, stack_reach, unit_from_slope, BoxCount, LevelParams, Profile, ProfileReport, STACK_SPACING,
};

use crate::game::Coin;
use crate::patterns::Site;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("{0} is not in the certificate")]
    NoSuchBox(BoxId),
    #[error("{0} is not in the certificate")]
    NoSuchFrame(FrameId),
    #[error("{0} has no witness")]
    MissingWitness(BoxId),
    #[error("profile {0} fails its growth or layout conditions")]
    Profile(String),
    #[error("profile box counts are too large to lay out")]
    NotExecutable,
    #[error("level {level}: {detail}")]
    Layout { level: usize, detail: String },
    #[error("no safe site found in section 1 of {0}")]
    WitnessPlacement(BoxId),
    #[error("component undefined at the anchor of {0}")]
    UndefinedComponent(BoxId),
    #[error("component index {0} out of range")]
    NoSuchComponent(usize),
    #[error("component {component} at ({}, {}) already holds {old}, refusing {new}", site.x, site.y)]
    DoubleAssignment { site: Site, component: usize, old: Coin, new: Coin },
    #[error("{0} and {1} share a component and an anchor")]
    AnchorCollision(BoxId, BoxId),
    #[error("target state of {frame} is {verdict}")]
    TargetNotUnorientable { frame: FrameId, verdict: String },
    #[error("no level-{0} frame has a bucket with both orientations")]
    NoMixedBucket(usize),
    #[error("wanted {wanted} radial rectangles, at most {best} fit")]
    TooFewSlots { wanted: usize, best: usize },
}
