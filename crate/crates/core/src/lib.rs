//! Pupil-shape regularity scoring for detecting GAN-generated faces.
//!
//! Real pupils are close to ellipses; pupils in GAN-generated faces often
//! have irregular boundaries. For each eye the pipeline
//!
//! 1. keeps the largest 8-connected component of the pupil mask and fills
//!    its holes ([`raster`]),
//! 2. fits an ellipse to the outer boundary by direct constrained least
//!    squares ([`ellipse`]),
//! 3. rasterizes the fit and compares it to the mask with Boundary IoU
//!    ([`biou`]),
//!
//! then averages the two eyes into a face score ([`pipeline`]). The
//! [`eval`] module computes ROC/AUC, histograms and band-width sweeps over a
//! labeled manifest, and generates a seeded synthetic corpus.

pub mod biou;
pub mod ellipse;
pub mod eval;
pub mod io;
pub mod pipeline;
pub mod raster;

pub use biou::{biou, iou, BiouError, BiouScore};
pub use ellipse::{
    conic_to_geometry, fit_ellipse, geometry_to_conic, rasterize_ellipse, ConicParams,
    EllipseGeometry, FitError, FitReport,
};
pub use eval::{roc, EvalError, Label, LabeledScore, RocCurve, SynthSpec};
pub use pipeline::{
    fit_mask, score_face, score_pupil, Eye, EyeInput, FaceScore, PipelineConfig, PupilScore,
    PupilStatus, Segmenter, Verdict,
};
pub use raster::{BinaryMask, Contour, GrayImage, RasterError};
