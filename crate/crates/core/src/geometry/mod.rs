//! Discrete geometry of rotationally symmetric hypersurfaces given by a profile curve
//! in the `(z, r)` half-plane.

mod curvature;
pub mod embedding;
pub mod fixtures;
pub mod io;
mod mu;
mod profile;
pub mod pseudocone;
mod reparam;
pub mod stencil;

use thiserror::Error;

pub(crate) use curvature::field_derivatives;
pub use curvature::{curvatures, PointGeometry};
pub use mu::{inscribed_radii, mu_two_point};
pub use profile::{unit_ball_volume, Closure, ProfileCurve, ProfilePoint, MIN_POINTS};
pub use pseudocone::{cone_containment, pseudo_cone_radial_curvature, Containment, PseudoCone};
pub use reparam::{reparametrize, resample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    #[error("profile intersects itself between segments {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("cone apex lies outside the enclosed region")]
    ApexOutside,
    #[error("malformed profile file: {0}")]
    Parse(String),
}
