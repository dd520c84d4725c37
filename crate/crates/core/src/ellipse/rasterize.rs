use super::EllipseGeometry;
use crate::raster::{BinaryMask, RasterError};

/// Foreground where the pixel center `(x + 0.5, y + 0.5)` lies strictly
/// inside the ellipse, i.e. has the same sign of `F` as the ellipse center.
pub fn rasterize_ellipse(
    geometry: &EllipseGeometry,
    width: usize,
    height: usize,
) -> Result<BinaryMask, RasterError> {
    let mut mask = BinaryMask::new(width, height)?;
    let [qa, qb, qc] = geometry.quadratic_form();
    let [cx, cy] = geometry.center;

    // axis-aligned half extents of the ellipse
    let (s, c) = geometry.rotation.sin_cos();
    let (a, b) = (geometry.semi_major, geometry.semi_minor);
    let hx = ((a * c).powi(2) + (b * s).powi(2)).sqrt();
    let hy = ((a * s).powi(2) + (b * c).powi(2)).sqrt();

    let Some((x0, x1)) = pixel_span(cx - hx, cx + hx, width) else {
        return Ok(mask);
    };
    let Some((y0, y1)) = pixel_span(cy - hy, cy + hy, height) else {
        return Ok(mask);
    };
    for y in y0..=y1 {
        let v = y as f64 + 0.5 - cy;
        for x in x0..=x1 {
            let u = x as f64 + 0.5 - cx;
            if qa * u * u + qb * u * v + qc * v * v < 1.0 {
                mask.set(x, y, true);
            }
        }
    }
    Ok(mask)
}

/// Inclusive pixel index range whose centers may fall in `[lo, hi]`, padded
/// by one pixel and clipped to `[0, len)`.
fn pixel_span(lo: f64, hi: f64, len: usize) -> Option<(usize, usize)> {
    let first = (lo - 1.5).floor().max(0.0);
    let last = (hi + 0.5).ceil().min(len as f64 - 1.0);
    (first <= last && first.is_finite() && last.is_finite())
        .then_some((first as usize, last as usize))
}
