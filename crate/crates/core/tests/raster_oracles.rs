mod common;

use common::*;
use pupilcheck::raster::{
    boundary_band, fill_holes, largest_component, outer_boundary, segment_pupil_classical,
    squared_distance_transform, ClassicalConfig,
};
use pupilcheck::{iou, BinaryMask, GrayImage};
use rand::Rng;

const THREE_BLOBS: [&str; 20] = [
    "....................",
    "...##...............",
    "...###.......###....",
    "....##......#..##...",
    ".............#.###..",
    "..............##....",
    "....................",
    "....................",
    "....................",
    ".#..................",
    ".##.................",
    "..###...............",
    "...#.#..............",
    "....#.###...........",
    "....................",
    "....................",
    "....................",
    "....................",
    "....................",
    "....................",
];

#[test]
fn three_blobs_keeps_first_of_tied_largest() {
    let mask = mask_from_rows(&THREE_BLOBS);
    let comps = components_8(&mask);
    let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    assert_eq!(sizes, [7, 12, 12]);
    assert_eq!(comps[1][0], (13, 2));

    let kept = largest_component(&mask).unwrap();
    assert_eq!(kept.count(), 12);
    let kept_px: Vec<(usize, usize)> = kept.foreground().collect();
    assert_eq!(kept_px, comps[1]);
}

#[test]
fn largest_component_matches_union_find_on_random_masks() {
    let mut r = rng(11);
    for case in 0..300 {
        let w = r.random_range(1..24);
        let h = r.random_range(1..24);
        let density = r.random_range(0.05..0.6);
        let mask = random_mask(&mut r, w, h, density);
        let comps = components_8(&mask);
        match largest_component(&mask) {
            Err(_) => assert!(comps.is_empty(), "case {case}"),
            Ok(kept) => {
                let best = comps.iter().map(Vec::len).max().unwrap();
                let first_best = comps.iter().find(|c| c.len() == best).unwrap();
                let kept_px: Vec<(usize, usize)> = kept.foreground().collect();
                assert_eq!(&kept_px, first_best, "case {case}");
            }
        }
    }
}

#[test]
fn disc_contour_matches_neighbor_scan() {
    let d = disc(21, 21, 10.5, 10.5, 5.5);
    assert_eq!(d.count(), 97);
    let c = outer_boundary(&d).unwrap();
    let mut got = c.points.clone();
    got.sort_by_key(|&(x, y)| (y, x));
    assert_eq!(got, contour(&d));
    assert_eq!(c.len(), 40);
}

#[test]
fn contour_matches_scan_on_random_components() {
    let mut r = rng(12);
    for _ in 0..200 {
        let (w, h) = (r.random_range(2..28), r.random_range(2..28));
        let blobs = random_blobs(&mut r, w, h, 3);
        let Ok(comp) = largest_component(&blobs) else {
            continue;
        };
        let mut got = outer_boundary(&comp).unwrap().points;
        got.sort_by_key(|&(x, y)| (y, x));
        assert_eq!(got, contour(&comp));
    }
}

#[test]
fn punched_blob_fills_back() {
    let blob = blob30();
    assert_eq!(blob.count(), 328);
    let mut holed = blob.clone();
    for (x, y) in [(17, 14), (18, 14), (17, 15), (9, 10)] {
        holed.set(x, y, false);
    }
    assert_eq!(holed.count(), 324);
    let f = fill_holes(&holed);
    assert_eq!(f, filled(&holed));
    assert_eq!(f, blob);
}

#[test]
fn fill_holes_matches_border_flood_on_random_masks() {
    let mut r = rng(13);
    for _ in 0..300 {
        let (w, h) = (r.random_range(1..26), r.random_range(1..26));
        let density = r.random_range(0.2..0.8);
        let m = random_mask(&mut r, w, h, density);
        assert_eq!(fill_holes(&m), filled(&m));
    }
}

#[test]
fn blob_band_d4_matches_exhaustive_distances() {
    let blob = blob30();
    assert_eq!(contour(&blob).len(), 104);
    let b = boundary_band(&blob, 4).unwrap();
    assert_eq!(b.band, band(&blob, 4));
    assert_eq!(b.band.count(), 641);
}

#[test]
fn band_matches_exhaustive_on_random_masks() {
    let mut r = rng(14);
    for _ in 0..150 {
        let (w, h) = (r.random_range(1..24), r.random_range(1..24));
        let m = random_blobs(&mut r, w, h, 2);
        if m.is_empty() {
            continue;
        }
        for d in [1, 2, 3, 5, 8] {
            assert_eq!(boundary_band(&m, d).unwrap().band, band(&m, d));
        }
    }
}

#[test]
fn distance_transform_matches_brute_force() {
    let mut r = rng(15);
    for _ in 0..100 {
        let (w, h) = (r.random_range(1..20), r.random_range(1..20));
        let seeds = random_mask(&mut r, w, h, 0.05);
        let got = squared_distance_transform(&seeds);
        let pts: Vec<(usize, usize)> = seeds.foreground().collect();
        for y in 0..h {
            for x in 0..w {
                let want = pts
                    .iter()
                    .map(|&(sx, sy)| {
                        let (dx, dy) = (x as f64 - sx as f64, y as f64 - sy as f64);
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(got[y * w + x], want);
            }
        }
    }
}

#[test]
fn salt_noise_crop_recovers_ellipse() {
    let truth = BinaryMask::from_fn(64, 64, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - 30.0, y as f64 + 0.5 - 34.0);
        let (u, v) = (dx * 0.94 + dy * 0.34, -dx * 0.34 + dy * 0.94);
        (u / 11.0).powi(2) + (v / 8.0).powi(2) < 1.0
    })
    .unwrap();
    let mut r = rng(16);
    let crop = GrayImage::from_fn(64, 64, |x, y| {
        let base = if truth.get(x, y) { 10 } else { 200 };
        match r.random_range(0..100) {
            0..4 => 0,
            4..8 => 255,
            _ => base,
        }
    })
    .unwrap();
    let cfg = ClassicalConfig {
        dark_fraction: 0.12,
        ..ClassicalConfig::default()
    };
    let seg = segment_pupil_classical(&crop, &cfg).unwrap();
    let score = iou(&seg, &truth).unwrap();
    assert!(score >= 0.9, "iou {score}");
}
