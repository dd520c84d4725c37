//! Per-eye and per-face scoring.
//!
//! The expensive stages (segmentation, boundary extraction, ellipse fit,
//! rasterization) run once in [`prepare_pupil`]; the band width `d` only
//! enters in [`PreparedPupil::score`], so a sweep over `d` reuses the
//! prepared masks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biou::{biou, iou, BiouScore, DEFAULT_D};
use crate::ellipse::{fit_ellipse, rasterize_ellipse, FitError, FitReport};
use crate::raster::{
    boundary_edge_points, fill_holes, largest_component, outer_boundary, segment_pupil_classical,
    BinaryMask, ClassicalConfig, GrayImage,
};

pub const DEFAULT_THRESHOLD: f64 = 0.85;
pub const DEFAULT_MIN_PUPIL_AREA: usize = 25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("d must be at least 1")]
    InvalidD,
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segmenter {
    /// Inputs are pupil masks produced elsewhere.
    ExternalMask,
    /// Inputs are grayscale eye crops run through the dark-blob segmenter.
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub d: u32,
    pub threshold: f64,
    pub segmenter: Segmenter,
    pub min_pupil_area: usize,
    /// Leave the face undecidable unless both pupils were measured.
    pub require_both_eyes: bool,
    pub classical: ClassicalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            d: DEFAULT_D,
            threshold: DEFAULT_THRESHOLD,
            segmenter: Segmenter::ExternalMask,
            min_pupil_area: DEFAULT_MIN_PUPIL_AREA,
            require_both_eyes: false,
            classical: ClassicalConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return Err(ConfigError::InvalidD);
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ConfigError::InvalidThreshold(self.threshold));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eye {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EyeInput {
    Mask(BinaryMask),
    Crop(GrayImage),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PupilStatus {
    Ok,
    SegmentationFailed,
    FitFailed,
    /// No input was supplied for this eye.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilScore {
    pub eye: Eye,
    pub status: PupilStatus,
    pub biou: Option<BiouScore>,
    pub fit: Option<FitReport>,
    /// Reason for a failed status.
    pub detail: Option<String>,
}

impl PupilScore {
    pub fn ok(eye: Eye, biou: BiouScore, fit: FitReport) -> Self {
        Self {
            eye,
            status: PupilStatus::Ok,
            biou: Some(biou),
            fit: Some(fit),
            detail: None,
        }
    }

    pub fn failed(eye: Eye, status: PupilStatus, detail: impl Into<String>) -> Self {
        debug_assert_ne!(status, PupilStatus::Ok);
        Self {
            eye,
            status,
            biou: None,
            fit: None,
            detail: Some(detail.into()),
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.biou.map(|b| b.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Real,
    GanSuspect,
    Undecidable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceScore {
    pub face_id: String,
    pub left: PupilScore,
    pub right: PupilScore,
    pub aggregate: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
struct Measured {
    predicted: BinaryMask,
    fitted: BinaryMask,
    fit: FitReport,
}

/// A pupil carried through every stage that does not depend on `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPupil {
    eye: Eye,
    outcome: Result<Measured, (PupilStatus, String)>,
}

impl PreparedPupil {
    pub fn missing(eye: Eye) -> Self {
        Self {
            eye,
            outcome: Err((PupilStatus::Missing, "no input for this eye".into())),
        }
    }

    /// A pupil whose input could not be loaded.
    pub fn unreadable(eye: Eye, detail: impl Into<String>) -> Self {
        Self {
            eye,
            outcome: Err((PupilStatus::SegmentationFailed, detail.into())),
        }
    }

    pub fn eye(&self) -> Eye {
        self.eye
    }

    /// Predicted mask `P` after component selection and hole filling.
    pub fn predicted(&self) -> Option<&BinaryMask> {
        self.outcome.as_ref().ok().map(|m| &m.predicted)
    }

    /// Rasterized fitted ellipse `F`.
    pub fn fitted(&self) -> Option<&BinaryMask> {
        self.outcome.as_ref().ok().map(|m| &m.fitted)
    }

    pub fn score(&self, d: u32) -> PupilScore {
        match &self.outcome {
            Ok(m) => match biou(&m.fitted, &m.predicted, d) {
                Ok(b) => PupilScore::ok(self.eye, b, m.fit.clone()),
                Err(e) => PupilScore::failed(self.eye, PupilStatus::FitFailed, e.to_string()),
            },
            Err((status, detail)) => PupilScore::failed(self.eye, *status, detail.clone()),
        }
    }

    /// Plain IoU between the fitted and predicted masks.
    pub fn iou(&self) -> Option<f64> {
        let m = self.outcome.as_ref().ok()?;
        iou(&m.fitted, &m.predicted).ok()
    }
}

pub fn prepare_pupil(eye: Eye, input: Option<&EyeInput>, config: &PipelineConfig) -> PreparedPupil {
    let Some(input) = input else {
        return PreparedPupil::missing(eye);
    };
    PreparedPupil {
        eye,
        outcome: measure(input, config),
    }
}

fn measure(input: &EyeInput, config: &PipelineConfig) -> Result<Measured, (PupilStatus, String)> {
    let seg_failed = |e: &dyn std::fmt::Display| (PupilStatus::SegmentationFailed, e.to_string());

    let mask = match (input, config.segmenter) {
        (EyeInput::Mask(m), _) => m.clone(),
        (EyeInput::Crop(img), Segmenter::Classical) => {
            let classical = ClassicalConfig {
                min_area: config.min_pupil_area,
                ..config.classical
            };
            segment_pupil_classical(img, &classical).map_err(|e| seg_failed(&e))?
        }
        (EyeInput::Crop(img), Segmenter::ExternalMask) => BinaryMask::from_vec(
            img.width(),
            img.height(),
            img.as_slice().iter().map(|&v| v >= 128).collect(),
        )
        .map_err(|e| seg_failed(&e))?,
    };

    let predicted = fill_holes(&largest_component(&mask).map_err(|e| seg_failed(&e))?);
    let area = predicted.count();
    if area < config.min_pupil_area {
        return Err((
            PupilStatus::SegmentationFailed,
            format!("pupil area {area} below minimum {}", config.min_pupil_area),
        ));
    }

    let fit_failed = |e: &dyn std::fmt::Display| (PupilStatus::FitFailed, e.to_string());
    let fit = fit_filled(&predicted).map_err(|e| fit_failed(&e))?;
    let fitted = rasterize_ellipse(&fit.geometry, predicted.width(), predicted.height())
        .map_err(|e| fit_failed(&e))?;
    Ok(Measured {
        predicted,
        fitted,
        fit,
    })
}

/// Fits an ellipse to the outer boundary of the mask's largest component.
///
/// Fewer than 5 boundary pixels is [`FitError::DegenerateInput`] even
/// though such a blob has more than 5 edge midpoints.
pub fn fit_mask(mask: &BinaryMask) -> Result<FitReport, FitError> {
    let component = largest_component(mask)
        .map_err(|_| FitError::DegenerateInput("mask has no foreground pixels".into()))?;
    fit_filled(&fill_holes(&component))
}

fn fit_filled(filled: &BinaryMask) -> Result<FitReport, FitError> {
    let contour = outer_boundary(filled)
        .map_err(|_| FitError::DegenerateInput("mask has no foreground pixels".into()))?;
    if contour.len() < 5 {
        return Err(FitError::DegenerateInput(format!(
            "boundary has {} pixels, need at least 5",
            contour.len()
        )));
    }
    let points =
        boundary_edge_points(filled).map_err(|e| FitError::DegenerateInput(e.to_string()))?;
    fit_ellipse(&points)
}

pub fn score_pupil(eye: Eye, input: Option<&EyeInput>, config: &PipelineConfig) -> PupilScore {
    prepare_pupil(eye, input, config).score(config.d)
}

/// Combines two pupil scores into a face-level aggregate and verdict.
pub fn aggregate_face(
    face_id: impl Into<String>,
    left: PupilScore,
    right: PupilScore,
    config: &PipelineConfig,
) -> FaceScore {
    let aggregate = match (left.value(), right.value()) {
        (Some(l), Some(r)) => Some((l + r) / 2.0),
        (Some(v), None) | (None, Some(v)) if !config.require_both_eyes => Some(v),
        _ => None,
    };
    let verdict = match aggregate {
        None => Verdict::Undecidable,
        Some(a) if a >= config.threshold => Verdict::Real,
        Some(_) => Verdict::GanSuspect,
    };
    FaceScore {
        face_id: face_id.into(),
        left,
        right,
        aggregate,
        verdict,
    }
}

pub fn score_face(
    face_id: impl Into<String>,
    left: Option<&EyeInput>,
    right: Option<&EyeInput>,
    config: &PipelineConfig,
) -> FaceScore {
    PreparedFace::new(face_id, left, right, config).score(config)
}

/// Both pupils of a face, prepared for scoring at any `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedFace {
    pub face_id: String,
    pub left: PreparedPupil,
    pub right: PreparedPupil,
}

impl PreparedFace {
    pub fn new(
        face_id: impl Into<String>,
        left: Option<&EyeInput>,
        right: Option<&EyeInput>,
        config: &PipelineConfig,
    ) -> Self {
        Self {
            face_id: face_id.into(),
            left: prepare_pupil(Eye::Left, left, config),
            right: prepare_pupil(Eye::Right, right, config),
        }
    }

    /// Face score using `config.d`.
    pub fn score(&self, config: &PipelineConfig) -> FaceScore {
        self.score_at(config.d, config)
    }

    pub fn score_at(&self, d: u32, config: &PipelineConfig) -> FaceScore {
        aggregate_face(
            self.face_id.clone(),
            self.left.score(d),
            self.right.score(d),
            config,
        )
    }

    /// Aggregate plain IoU, following the same eye-selection rules.
    pub fn iou_aggregate(&self, config: &PipelineConfig) -> Option<f64> {
        match (self.left.iou(), self.right.iou()) {
            (Some(l), Some(r)) => Some((l + r) / 2.0),
            (Some(v), None) | (None, Some(v)) if !config.require_both_eyes => Some(v),
            _ => None,
        }
    }
}
