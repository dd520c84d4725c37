//! Binary morphology with a 3x3 square structuring element.
//!
//! Pixels outside the raster are ignored: erosion only requires the in-bounds
//! part of the neighborhood to be foreground.

use super::BinaryMask;

fn neighborhood(mask: &BinaryMask, want: bool) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            let hit = (y.saturating_sub(1)..=(y + 1).min(h - 1)).any(|ny| {
                (x.saturating_sub(1)..=(x + 1).min(w - 1)).any(|nx| mask.get(nx, ny) == want)
            });
            out.set(x, y, if want { hit } else { !hit });
        }
    }
    out
}

pub fn dilate3x3(mask: &BinaryMask) -> BinaryMask {
    neighborhood(mask, true)
}

pub fn erode3x3(mask: &BinaryMask) -> BinaryMask {
    neighborhood(mask, false)
}

pub fn open3x3(mask: &BinaryMask) -> BinaryMask {
    dilate3x3(&erode3x3(mask))
}

pub fn close3x3(mask: &BinaryMask) -> BinaryMask {
    erode3x3(&dilate3x3(mask))
}
