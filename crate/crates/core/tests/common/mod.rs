//! Brute-force reference implementations shared by the integration tests.
//! Each one is written for clarity over speed and shares no code with the
//! library.

#![allow(dead_code)]

use pupilcheck::BinaryMask;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mask_from_rows(rows: &[&str]) -> BinaryMask {
    let h = rows.len();
    let w = rows[0].len();
    BinaryMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#').unwrap()
}

/// Pixels whose center lies within `r` of `(cx, cy)`.
pub fn disc(w: usize, h: usize, cx: f64, cy: f64, r: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        dx * dx + dy * dy <= r * r
    })
    .unwrap()
}

pub fn union(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(a.width(), a.height(), |x, y| a.get(x, y) || b.get(x, y)).unwrap()
}

pub fn minus(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(a.width(), a.height(), |x, y| a.get(x, y) && !b.get(x, y)).unwrap()
}

/// Union of four overlapping discs in a 30×30 raster.
pub fn blob30() -> BinaryMask {
    let parts = [
        (9.0, 10.0, 6.0),
        (18.0, 14.0, 7.0),
        (13.0, 21.0, 4.5),
        (22.0, 23.0, 3.5),
    ];
    parts
        .iter()
        .map(|&(cx, cy, r)| disc(30, 30, cx, cy, r))
        .reduce(|a, b| union(&a, &b))
        .unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density)).unwrap()
}

/// A random union of discs, a more blob-like mask than i.i.d. pixels.
pub fn random_blobs(rng: &mut ChaCha8Rng, w: usize, h: usize, n: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h).unwrap();
    for _ in 0..n {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = rng.random_range(0.5..(w.min(h) as f64 / 3.0).max(1.0));
        m = union(&m, &disc(w, h, cx, cy, r));
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// 8-connected components by union-find, each as a list of pixels in
/// row-major order; components ordered by their first pixel.
pub fn components_8(mask: &BinaryMask) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut parent: Vec<usize> = (0..w * h).collect();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for (dx, dy) in [(1i64, 0i64), (-1, 1), (0, 1), (1, 1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if mask.get(nx, ny) {
                    let a = find(&mut parent, y * w + x);
                    let b = find(&mut parent, ny * w + nx);
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let root = find(&mut parent, y * w + x);
            match groups.iter_mut().find(|(r, _)| *r == root) {
                Some((_, g)) => g.push((x, y)),
                None => groups.push((root, vec![(x, y)])),
            }
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Background reachable from the raster border through 4-adjacent
/// background pixels, by recursive-style depth-first search.
pub fn exterior(mask: &BinaryMask) -> Vec<bool> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !mask.get(x, y) {
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        if seen[y * w + x] || mask.get(x, y) {
            continue;
        }
        seen[y * w + x] = true;
        if x > 0 {
            stack.push((x - 1, y));
        }
        if y > 0 {
            stack.push((x, y - 1));
        }
        if x + 1 < w {
            stack.push((x + 1, y));
        }
        if y + 1 < h {
            stack.push((x, y + 1));
        }
    }
    seen
}

pub fn filled(mask: &BinaryMask) -> BinaryMask {
    let ext = exterior(mask);
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        !ext[y * mask.width() + x]
    })
    .unwrap()
}

/// Foreground pixels of the hole-filled mask touching the outside through
/// any of their 8 neighbors, or lying on the raster border.
pub fn contour(mask: &BinaryMask) -> Vec<(usize, usize)> {
    let f = filled(mask);
    let (w, h) = (f.width() as i64, f.height() as i64);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !f.get(x as usize, y as usize) {
                continue;
            }
            let mut edge = false;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h || !f.get(nx as usize, ny as usize) {
                        edge = true;
                    }
                }
            }
            if edge {
                out.push((x as usize, y as usize));
            }
        }
    }
    out
}

/// Pixels within Euclidean distance `d` of some contour pixel, by checking
/// every (pixel, contour pixel) pair.
pub fn band(mask: &BinaryMask, d: u32) -> BinaryMask {
    let c = contour(mask);
    let d2 = i64::from(d) * i64::from(d);
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        c.iter().any(|&(cx, cy)| {
            let (dx, dy) = (x as i64 - cx as i64, y as i64 - cy as i64);
            dx * dx + dy * dy <= d2
        })
    })
    .unwrap()
}

/// `(|A ∩ B|, |A ∪ B|)` with `A = F_d ∩ F` and `B = P_d ∩ P`.
pub fn biou_counts(f: &BinaryMask, p: &BinaryMask, d: u32) -> (u64, u64) {
    let fb = band(f, d);
    let pb = band(p, d);
    let (mut inter, mut uni) = (0, 0);
    for y in 0..f.height() {
        for x in 0..f.width() {
            let a = fb.get(x, y) && f.get(x, y);
            let b = pb.get(x, y) && p.get(x, y);
            inter += u64::from(a && b);
            uni += u64::from(a || b);
        }
    }
    (inter, uni)
}
