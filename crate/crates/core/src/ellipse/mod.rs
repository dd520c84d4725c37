//! Direct least-squares ellipse fitting and ellipse rasterization.

mod conic;
mod fit;
mod rasterize;

use thiserror::Error;

pub use conic::{conic_to_geometry, geometry_to_conic, ConicParams, EllipseGeometry};
pub use fit::{fit_ellipse, FitReport};
pub use rasterize::rasterize_ellipse;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no eigenvector satisfies the ellipse constraint")]
    NoEllipseSolution,
    #[error("conic is not a real ellipse")]
    NotAnEllipse,
}
