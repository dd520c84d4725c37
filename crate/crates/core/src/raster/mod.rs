//! Binary rasters, connected components, outer boundaries and boundary bands.
//!
//! Foreground components use 8-connectivity. Background regions (holes) use
//! 4-connectivity, the complementary pairing that keeps "inside" and
//! "outside" well defined on a square grid.

mod distance;
mod morphology;
mod segment;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distance::{boundary_band, squared_distance_transform, BoundaryBand};
pub use morphology::{close3x3, dilate3x3, erode3x3, open3x3};
pub use segment::{segment_pupil_classical, ClassicalConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error("invalid raster dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("data length {got} does not match {width}x{height}")]
    DataLength {
        width: usize,
        height: usize,
        got: usize,
    },
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("band distance must be at least 1, got {0}")]
    InvalidDistance(u32),
    #[error("segmentation failed: {0}")]
    SegmentationFailed(String),
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimensions { width, height });
    }
    if width.checked_mul(height) != Some(len) {
        return Err(RasterError::DataLength {
            width,
            height,
            got: len,
        });
    }
    Ok(())
}

/// Row-major binary raster. `true` is foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Result<Self, RasterError> {
        check_dims(width, height, width.saturating_mul(height))?;
        Ok(Self {
            width,
            height,
            data: vec![false; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self, RasterError> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a mask by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, RasterError> {
        let mut mask = Self::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                mask.data[y * width + x] = f(x, y);
            }
        }
        Ok(mask)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Foreground pixel coordinates `(x, y)` in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(move |(i, _)| (i % w, i / w))
    }

    #[inline]
    fn on_border(&self, x: usize, y: usize) -> bool {
        x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height
    }
}

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, RasterError> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }
}

/// Outer-boundary pixels of a mask component, as integer `(x, y)` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<(usize, usize)>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Continuous pixel centers `(x + 0.5, y + 0.5)`.
    pub fn centers(&self) -> Vec<[f64; 2]> {
        self.points
            .iter()
            .map(|&(x, y)| [x as f64 + 0.5, y as f64 + 0.5])
            .collect()
    }
}

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

const NEIGHBORS_4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

#[inline]
fn offset(
    x: usize,
    y: usize,
    (dx, dy): (isize, isize),
    width: usize,
    height: usize,
) -> Option<(usize, usize)> {
    let nx = x.checked_add_signed(dx)?;
    let ny = y.checked_add_signed(dy)?;
    (nx < width && ny < height).then_some((nx, ny))
}

/// Keeps only the 8-connected foreground component with the most pixels.
///
/// Components are discovered in row-major order, so the first one found has
/// the smallest top-left-most pixel; on equal size the earlier one wins.
pub fn largest_component(mask: &BinaryMask) -> Result<BinaryMask, RasterError> {
    let (w, h) = (mask.width, mask.height);
    let mut labels = vec![0u32; w * h];
    let mut queue = VecDeque::new();
    let mut best: Option<(u32, usize)> = None;
    let mut next = 0u32;

    for start in 0..w * h {
        if !mask.data[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % w, i / w);
            for &n in &NEIGHBORS_8 {
                if let Some((nx, ny)) = offset(x, y, n, w, h) {
                    let j = ny * w + nx;
                    if mask.data[j] && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((next, size));
        }
    }

    let (keep, _) = best.ok_or(RasterError::EmptyMask)?;
    Ok(BinaryMask {
        width: w,
        height: h,
        data: labels.into_iter().map(|l| l == keep).collect(),
    })
}

/// Converts background regions that are not 4-connected to the raster border
/// into foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width, mask.height);
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if mask.on_border(x, y) && !mask.data[i] {
                outside[i] = true;
                queue.push_back(i);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        for &n in &NEIGHBORS_4 {
            if let Some((nx, ny)) = offset(x, y, n, w, h) {
                let j = ny * w + nx;
                if !mask.data[j] && !outside[j] {
                    outside[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }

    BinaryMask {
        width: w,
        height: h,
        data: outside.into_iter().map(|o| !o).collect(),
    }
}

/// Foreground pixels of the hole-filled mask that touch background through
/// any of their 8 neighbors, or lie on the raster border. Row-major order.
pub fn outer_boundary(mask: &BinaryMask) -> Result<Contour, RasterError> {
    if mask.is_empty() {
        return Err(RasterError::EmptyMask);
    }
    let filled = fill_holes(mask);
    let (w, h) = (filled.width, filled.height);
    let points = filled
        .foreground()
        .filter(|&(x, y)| {
            filled.on_border(x, y)
                || NEIGHBORS_8
                    .iter()
                    .any(|&n| offset(x, y, n, w, h).is_some_and(|(nx, ny)| !filled.get(nx, ny)))
        })
        .collect();
    Ok(Contour { points })
}

/// Midpoints of the pixel edges separating the hole-filled mask from the
/// outside (background pixels or the raster frame), in continuous
/// coordinates where pixel `(x, y)` covers `[x, x+1] x [y, y+1]`.
///
/// These lie on the boundary of the union of foreground squares, so an
/// ellipse fitted to them is not pulled inward the way one fitted to
/// boundary pixel centers is.
pub fn boundary_edge_points(mask: &BinaryMask) -> Result<Vec<[f64; 2]>, RasterError> {
    let contour = outer_boundary(mask)?;
    let filled = fill_holes(mask);
    let (w, h) = (filled.width, filled.height);
    let mut points = Vec::with_capacity(contour.len() * 2);
    for &(x, y) in &contour.points {
        let (fx, fy) = (x as f64, y as f64);
        let edges = [
            ((0, -1), [fx + 0.5, fy]),
            ((-1, 0), [fx, fy + 0.5]),
            ((1, 0), [fx + 1.0, fy + 0.5]),
            ((0, 1), [fx + 0.5, fy + 1.0]),
        ];
        for (n, point) in edges {
            let exposed = offset(x, y, n, w, h).is_none_or(|(nx, ny)| !filled.get(nx, ny));
            if exposed {
                points.push(point);
            }
        }
    }
    Ok(points)
}
