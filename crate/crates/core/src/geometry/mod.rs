//! Exact planar geometry for sparse obstacle families: piecewise-linear
//! jigsaws, double jigsaws, diamond hulls, and safe points and paths.

mod hull;
mod plfn;
mod safe;
mod shapes;

pub use hull::{
    build_hull, build_hull_in_order, check_hull, diamond_region_dist2, longest_covered_run, point_region_dist2,
    polygon_edges, regions_dist2, regions_meet, vertical_probe_escapes, DoubleJigsaw, Hull, HullElement, HullReport,
    LevelDims, Merge, RegionKey,
};
pub use plfn::{tri_value, PlFn};
pub use safe::{check_hypotheses, check_rect_hypotheses, hull_path, verify_path, HypothesisReport, SafePath, SafeSet};
pub use shapes::{
    closest_on_segment, convex_intersect, diamond_of_rect, first_dense_pair, is_sparse, orient, point_segment_dist2,
    scale_about_center, segment_dist2, segments_intersect, BBox, Convex, DiamondSpec, Point, RectSpec,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("slope must be positive")]
    NonPositiveSlope,
    #[error("peak height must be nonnegative")]
    NegativeHeight,
    #[error("breakpoints must have nondecreasing x with at most two per abscissa")]
    NotMonotone,
    #[error("a function needs at least one breakpoint")]
    EmptyFunction,
    #[error("point lies in the hull")]
    UnsafePoint,
    #[error("no verified path after {halvings} clearance halvings")]
    PathNotFound { halvings: u32 },
}

/// A leveled family file: per-level dimensions plus diamonds and/or
/// rectangles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub dims: Vec<LevelDims>,
    #[serde(default)]
    pub diamonds: Vec<DiamondSpec>,
    #[serde(default)]
    pub rects: Vec<RectSpec>,
}
