//! Convex domains in a chart given by membership oracles, and the geometric
//! tests built on one-dimensional bisection: boundary hits along lines,
//! tangent cones, the search for rank-one lines, clipped Hausdorff distances,
//! boundary adjacency and the determinant test for extreme points.

mod body;
mod descriptor;
mod extreme;
mod hausdorff;
mod hits;
mod rproper;
pub mod sample;
mod tangent;

pub use body::{BodyKind, ConvexBody};
pub use descriptor::{DomainDescriptor, Functional, Rows};
pub use extreme::{
    adjacent_partner, boundary_adjacent, extreme_point_test, z_hypersurface_contains, z_hypersurface_contains_plane, ExtremeBudget, ExtremeVerdict,
};
pub use hausdorff::{hausdorff_distance_clipped, hausdorff_distance_clipped_from};
pub(crate) use hits::exit_parameter;
pub use hits::{boundary_hits, certify_boundary, delta_along, line_hits, on_boundary, SegmentHit, RAY_HORIZON};
pub use rproper::{is_r_proper, line_inside, RProperStatus, RProperVerdict, SearchBudget, SearchStats};
pub use tangent::tangent_cone;
