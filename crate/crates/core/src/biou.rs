//! Boundary IoU between a fitted-ellipse mask and a predicted pupil mask.
//!
//! ```text
//! BIoU(F, P) = |(F_d ∩ F) ∩ (P_d ∩ P)| / |(F_d ∩ F) ∪ (P_d ∩ P)|
//! ```
//!
//! `F_d` and `P_d` are the pixels within Euclidean distance `d` of each
//! mask's outer boundary contour.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{boundary_band, BinaryMask, RasterError};

pub const DEFAULT_D: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiouError {
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("both masks are empty; the score is undefined")]
    BothEmpty,
    #[error("band distance must be at least 1, got {0}")]
    InvalidDistance(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiouScore {
    pub value: f64,
    pub d: u32,
    pub intersection_px: u64,
    pub union_px: u64,
}

fn check_dims(f: &BinaryMask, p: &BinaryMask) -> Result<(), BiouError> {
    if f.same_dims(p) {
        Ok(())
    } else {
        Err(BiouError::DimensionMismatch(
            f.width(),
            f.height(),
            p.width(),
            p.height(),
        ))
    }
}

/// `mask ∩ band(mask, d)`; an empty mask restricts to nothing.
fn band_restricted(mask: &BinaryMask, d: u32) -> Result<Vec<bool>, BiouError> {
    match boundary_band(mask, d) {
        Ok(band) => Ok(mask
            .as_slice()
            .iter()
            .zip(band.band.as_slice())
            .map(|(&m, &b)| m && b)
            .collect()),
        Err(RasterError::EmptyMask) => Ok(vec![false; mask.as_slice().len()]),
        Err(RasterError::InvalidDistance(d)) => Err(BiouError::InvalidDistance(d)),
        Err(e) => unreachable!("boundary band on a valid mask: {e}"),
    }
}

fn ratio(a: &[bool], b: &[bool]) -> (u64, u64) {
    a.iter().zip(b).fold((0, 0), |(i, u), (&x, &y)| {
        (i + u64::from(x && y), u + u64::from(x || y))
    })
}

pub fn biou(f: &BinaryMask, p: &BinaryMask, d: u32) -> Result<BiouScore, BiouError> {
    check_dims(f, p)?;
    if d == 0 {
        return Err(BiouError::InvalidDistance(d));
    }
    let fb = band_restricted(f, d)?;
    let pb = band_restricted(p, d)?;
    let (intersection_px, union_px) = ratio(&fb, &pb);
    if union_px == 0 {
        return Err(BiouError::BothEmpty);
    }
    Ok(BiouScore {
        value: intersection_px as f64 / union_px as f64,
        d,
        intersection_px,
        union_px,
    })
}

/// Plain IoU over all pixels.
pub fn iou(f: &BinaryMask, p: &BinaryMask) -> Result<f64, BiouError> {
    check_dims(f, p)?;
    let (i, u) = ratio(f.as_slice(), p.as_slice());
    if u == 0 {
        return Err(BiouError::BothEmpty);
    }
    Ok(i as f64 / u as f64)
}

/// Smallest `d` whose band covers every pixel of a `width` x `height` raster.
pub fn saturating_d(width: usize, height: usize) -> u32 {
    let diag = ((width * width + height * height) as f64).sqrt();
    diag.ceil() as u32
}
