//! Exact Euclidean distance transform and boundary bands.

use super::{outer_boundary, BinaryMask, RasterError};

/// Pixels within Euclidean distance `d` of a mask's outer boundary contour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryBand {
    pub d: u32,
    pub band: BinaryMask,
}

/// Squared Euclidean distance from every pixel to the nearest seed pixel,
/// row-major. Pixels are `f64::INFINITY` when there are no seeds.
///
/// Two-pass lower-envelope algorithm of Felzenszwalb and Huttenlocher. All
/// finite outputs are sums of two squared integers, so they are exact.
pub fn squared_distance_transform(seeds: &BinaryMask) -> Vec<f64> {
    let (w, h) = (seeds.width(), seeds.height());
    let mut grid: Vec<f64> = seeds
        .as_slice()
        .iter()
        .map(|&s| if s { 0.0 } else { f64::INFINITY })
        .collect();

    let n = w.max(h);
    let mut scratch = Envelope::with_capacity(n);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];

    for x in 0..w {
        for y in 0..h {
            line[y] = grid[y * w + x];
        }
        scratch.transform(&line[..h], &mut out[..h]);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        line[..w].copy_from_slice(row);
        scratch.transform(&line[..w], &mut out[..w]);
        row.copy_from_slice(&out[..w]);
    }
    grid
}

struct Envelope {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            vertices: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    /// 1-D squared distance transform of a sampled function `f`.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.vertices.clear();
        self.bounds.clear();

        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            loop {
                let Some(&v) = self.vertices.last() else {
                    self.vertices.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let s = intersection(f, v, q);
                if s <= *self.bounds.last().unwrap() {
                    self.vertices.pop();
                    self.bounds.pop();
                } else {
                    self.vertices.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }

        if self.vertices.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }

        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while k + 1 < self.vertices.len() && self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let v = self.vertices[k];
            let dq = q as f64 - v as f64;
            *o = dq * dq + f[v];
        }
    }
}

#[inline]
fn intersection(f: &[f64], v: usize, q: usize) -> f64 {
    let (qf, vf) = (q as f64, v as f64);
    ((f[q] + qf * qf) - (f[v] + vf * vf)) / (2.0 * (qf - vf))
}

/// Band of all pixels whose Euclidean distance to the mask's outer boundary
/// contour is at most `d`.
pub fn boundary_band(mask: &BinaryMask, d: u32) -> Result<BoundaryBand, RasterError> {
    if d == 0 {
        return Err(RasterError::InvalidDistance(d));
    }
    let contour = outer_boundary(mask)?;
    let mut seeds = BinaryMask::new(mask.width(), mask.height())?;
    for &(x, y) in &contour.points {
        seeds.set(x, y, true);
    }
    let limit = f64::from(d) * f64::from(d);
    let dist = squared_distance_transform(&seeds);
    let band = BinaryMask::from_vec(
        mask.width(),
        mask.height(),
        dist.into_iter().map(|d2| d2 <= limit).collect(),
    )?;
    Ok(BoundaryBand { d, band })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_sq(seeds: &BinaryMask) -> Vec<f64> {
        let pts: Vec<_> = seeds.foreground().collect();
        let mut out = Vec::new();
        for y in 0..seeds.height() {
            for x in 0..seeds.width() {
                let best = pts
                    .iter()
                    .map(|&(sx, sy)| {
                        let dx = sx as f64 - x as f64;
                        let dy = sy as f64 - y as f64;
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                out.push(best);
            }
        }
        out
    }

    #[test]
    fn edt_matches_brute_force_on_scattered_seeds() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for trial in 0..40 {
            let (w, h) = (3 + trial % 17, 2 + (trial * 7) % 19);
            let seeds = BinaryMask::from_fn(w, h, |_, _| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state.is_multiple_of(11)
            })
            .unwrap();
            assert_eq!(squared_distance_transform(&seeds), brute_sq(&seeds));
        }
    }

    #[test]
    fn edt_without_seeds_is_infinite() {
        let seeds = BinaryMask::new(4, 3).unwrap();
        assert!(squared_distance_transform(&seeds)
            .iter()
            .all(|d| d.is_infinite()));
    }

    #[test]
    fn huge_d_covers_raster() {
        let mut m = BinaryMask::new(9, 7).unwrap();
        m.set(4, 3, true);
        let band = boundary_band(&m, 12).unwrap();
        assert_eq!(band.band.count(), 63);
    }

    #[test]
    fn d1_on_disc_is_contour_plus_4_neighbors() {
        let m = BinaryMask::from_fn(15, 15, |x, y| {
            let dx = x as f64 - 7.0;
            let dy = y as f64 - 7.0;
            dx * dx + dy * dy <= 20.0
        })
        .unwrap();
        let contour = outer_boundary(&m).unwrap();
        let mut expected = BinaryMask::new(15, 15).unwrap();
        for &(x, y) in &contour.points {
            expected.set(x, y, true);
            for (dx, dy) in [(0i64, -1i64), (-1, 0), (1, 0), (0, 1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if (0..15).contains(&nx) && (0..15).contains(&ny) {
                    expected.set(nx as usize, ny as usize, true);
                }
            }
        }
        assert_eq!(boundary_band(&m, 1).unwrap().band, expected);
    }

    #[test]
    fn zero_distance_rejected() {
        let m = BinaryMask::from_vec(2, 2, vec![true; 4]).unwrap();
        assert_eq!(boundary_band(&m, 0), Err(RasterError::InvalidDistance(0)));
    }

    #[test]
    fn empty_mask_rejected() {
        let m = BinaryMask::new(2, 2).unwrap();
        assert_eq!(boundary_band(&m, 2), Err(RasterError::EmptyMask));
    }
}
