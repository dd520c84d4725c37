//! Classical dark-blob pupil segmenter for grayscale eye crops.

use serde::{Deserialize, Serialize};

use super::{close3x3, fill_holes, largest_component, open3x3, BinaryMask, GrayImage, RasterError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassicalConfig {
    /// Fraction of darkest pixels admitted by the intensity threshold.
    pub dark_fraction: f64,
    /// Minimum pupil area in pixels.
    pub min_area: usize,
    /// Reject components covering at least this fraction of the crop border.
    pub max_border_fraction: f64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            dark_fraction: 0.08,
            min_area: 25,
            max_border_fraction: 0.5,
        }
    }
}

/// Highest intensity level `t` such that pixels `<= t` make up at most
/// `fraction` of the image. Falls back to the darkest level present when that
/// level alone exceeds the budget.
fn dark_threshold(eye: &GrayImage, fraction: f64) -> u8 {
    let mut hist = [0usize; 256];
    for &v in eye.as_slice() {
        hist[v as usize] += 1;
    }
    let budget = (fraction * eye.as_slice().len() as f64).floor() as usize;
    let darkest = hist.iter().position(|&c| c > 0).unwrap_or(0) as u8;
    let mut cumulative = 0;
    let mut threshold = None;
    for (level, &c) in hist.iter().enumerate() {
        cumulative += c;
        if cumulative == 0 {
            continue;
        }
        if cumulative > budget {
            break;
        }
        threshold = Some(level as u8);
    }
    threshold.unwrap_or(darkest)
}

fn border_fraction(mask: &BinaryMask) -> f64 {
    let (w, h) = (mask.width(), mask.height());
    let mut total = 0usize;
    let mut hit = 0usize;
    for y in 0..h {
        for x in 0..w {
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                total += 1;
                hit += usize::from(mask.get(x, y));
            }
        }
    }
    hit as f64 / total as f64
}

/// Threshold at the dark percentile, open then close with a 3x3 square, keep
/// the largest component and fill its holes.
pub fn segment_pupil_classical(
    eye: &GrayImage,
    config: &ClassicalConfig,
) -> Result<BinaryMask, RasterError> {
    let t = dark_threshold(eye, config.dark_fraction);
    let raw = BinaryMask::from_vec(
        eye.width(),
        eye.height(),
        eye.as_slice().iter().map(|&v| v <= t).collect(),
    )?;
    let cleaned = close3x3(&open3x3(&raw));
    let blob = largest_component(&cleaned).map_err(|_| {
        RasterError::SegmentationFailed("no dark region survived morphology".into())
    })?;
    let pupil = fill_holes(&blob);

    let area = pupil.count();
    if area < config.min_area {
        return Err(RasterError::SegmentationFailed(format!(
            "component area {area} below minimum {}",
            config.min_area
        )));
    }
    let touching = border_fraction(&pupil);
    if touching >= config.max_border_fraction {
        return Err(RasterError::SegmentationFailed(format!(
            "component covers {:.0}% of the crop border",
            touching * 100.0
        )));
    }
    Ok(pupil)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse_crop(w: usize, h: usize, dark: u8, bright: u8) -> (GrayImage, BinaryMask) {
        let inside = |x: usize, y: usize| {
            let u = (x as f64 + 0.5 - 30.0) / 11.0;
            let v = (y as f64 + 0.5 - 22.0) / 8.0;
            u * u + v * v < 1.0
        };
        let img =
            GrayImage::from_fn(w, h, |x, y| if inside(x, y) { dark } else { bright }).unwrap();
        let truth = BinaryMask::from_fn(w, h, inside).unwrap();
        (img, truth)
    }

    #[test]
    fn threshold_picks_gap_between_levels() {
        let (img, _) = ellipse_crop(60, 44, 10, 200);
        let t = dark_threshold(&img, 0.08);
        assert!((10..200).contains(&t));
    }

    #[test]
    fn threshold_falls_back_to_darkest_level() {
        let img = GrayImage::from_vec(4, 4, vec![7; 16]).unwrap();
        assert_eq!(dark_threshold(&img, 0.08), 7);
    }

    #[test]
    fn perfect_contrast_recovers_ellipse() {
        let (img, truth) = ellipse_crop(60, 44, 10, 200);
        let got = segment_pupil_classical(&img, &ClassicalConfig::default()).unwrap();
        let grown = crate::raster::dilate3x3(&truth);
        let shrunk = crate::raster::erode3x3(&truth);
        for (x, y) in got.foreground() {
            assert!(grown.get(x, y));
        }
        for (x, y) in shrunk.foreground() {
            assert!(got.get(x, y));
        }
    }

    #[test]
    fn uniform_crop_fails() {
        let img = GrayImage::from_vec(40, 30, vec![128; 1200]).unwrap();
        assert!(matches!(
            segment_pupil_classical(&img, &ClassicalConfig::default()),
            Err(RasterError::SegmentationFailed(_))
        ));
    }

    #[test]
    fn tiny_blob_fails_min_area() {
        let img = GrayImage::from_fn(40, 40, |x, y| {
            if (18..21).contains(&x) && (18..21).contains(&y) {
                0
            } else {
                220
            }
        })
        .unwrap();
        let err = segment_pupil_classical(&img, &ClassicalConfig::default()).unwrap_err();
        assert!(matches!(err, RasterError::SegmentationFailed(_)));
    }
}
