//! Fixtures shared by the criterion benches.

use pupilcheck::ellipse::{rasterize_ellipse, EllipseGeometry};
use pupilcheck::eval::{rasterize_perturbed, Harmonic};
use pupilcheck::BinaryMask;

pub const SIZE: usize = 128;

pub fn clean_pupil() -> BinaryMask {
    let g = EllipseGeometry::new([63.7, 64.2], 30.0, 22.0, 0.45).expect("valid geometry");
    rasterize_ellipse(&g, SIZE, SIZE).expect("valid raster")
}

pub fn irregular_pupil() -> BinaryMask {
    let g = EllipseGeometry::new([63.7, 64.2], 30.0, 22.0, 0.45).expect("valid geometry");
    let h = [
        Harmonic {
            amplitude: 2.5,
            frequency: 5,
            phase: 0.3,
        },
        Harmonic {
            amplitude: 1.5,
            frequency: 7,
            phase: 2.0,
        },
    ];
    rasterize_perturbed(&g, &h, SIZE, SIZE).expect("valid raster")
}

/// `n` points on an ellipse with a deterministic sub-pixel wobble.
pub fn ring_points(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            let wobble = 0.3 * (17.0 * t).sin();
            [
                64.0 + (30.0 + wobble) * t.cos(),
                64.0 + (20.0 + wobble) * t.sin(),
            ]
        })
        .collect()
}
