//! Seeded synthetic pupil-mask corpus.
//!
//! `real` faces are clean rasterized ellipses. `gan` faces use the same
//! geometry distribution with a radial boundary perturbation
//! `r(φ) += Σₖ aₖ sin(kφ + φₖ)`, where `φ` is the angle in the ellipse frame.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{write_manifest, Manifest, ManifestEntry, ManifestLabel};
use super::{EvalError, Label};
use crate::ellipse::{rasterize_ellipse, EllipseGeometry};
use crate::io::{encode_mask_pgm, IoError};
use crate::raster::BinaryMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    /// Faces per class; every face has a left and a right pupil mask.
    pub n_per_class: usize,
    /// Raster `[width, height]` in pixels.
    pub raster: [usize; 2],
    /// Semi-axis range in pixels.
    pub regular_axes_range: [f64; 2],
    pub perturb_amplitude_range: [f64; 2],
    /// Integer angular frequencies, inclusive.
    pub perturb_frequency_range: [u32; 2],
    /// Number of sinusoidal terms per perturbed boundary.
    pub perturb_terms: usize,
    /// Probability of flipping each pixel on either side of the boundary,
    /// applied to both classes alike. Models segmentation jitter.
    pub boundary_flip_prob: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_per_class: 200,
            raster: [128, 128],
            regular_axes_range: [15.0, 35.0],
            perturb_amplitude_range: [1.5, 3.0],
            perturb_frequency_range: [3, 8],
            perturb_terms: 2,
            boundary_flip_prob: 0.0,
            seed: 1,
        }
    }
}

impl SynthSpec {
    fn max_extent(&self) -> f64 {
        self.regular_axes_range[1] + self.perturb_terms as f64 * self.perturb_amplitude_range[1]
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: &str| Err(EvalError::InvalidSpec(m.to_string()));
        let [w, h] = self.raster;
        let [alo, ahi] = self.regular_axes_range;
        let [plo, phi] = self.perturb_amplitude_range;
        let [flo, fhi] = self.perturb_frequency_range;
        if self.n_per_class == 0 {
            return bad("n_per_class must be positive");
        }
        if w < 8 || h < 8 {
            return bad("raster must be at least 8x8");
        }
        if !(alo > 0.0 && alo <= ahi && ahi.is_finite()) {
            return bad("regular_axes_range must satisfy 0 < lo <= hi");
        }
        if !(plo >= 0.0 && plo <= phi && phi.is_finite()) {
            return bad("perturb_amplitude_range must satisfy 0 <= lo <= hi");
        }
        if !(flo >= 1 && flo <= fhi) {
            return bad("perturb_frequency_range must satisfy 1 <= lo <= hi");
        }
        if !(0.0..=1.0).contains(&self.boundary_flip_prob) {
            return bad("boundary_flip_prob must lie in [0, 1]");
        }
        if self.perturb_terms == 0 {
            return bad("perturb_terms must be positive");
        }
        if plo > 0.0 && self.perturb_terms as f64 * phi >= alo {
            return bad("perturbation can exceed the smallest semi-axis");
        }
        if 2.0 * (self.max_extent() + 1.0) > w.min(h) as f64 {
            return bad("largest shape does not fit in the raster");
        }
        Ok(())
    }
}

/// One term of the radial perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFace {
    pub face_id: String,
    pub label: Label,
    pub left: BinaryMask,
    pub right: BinaryMask,
}

/// Rasterizes an ellipse whose radius in direction `φ` (ellipse frame) is
/// displaced by `Σ aₖ sin(kφ + φₖ)`. Pixel centers are sampled at
/// `(x + 0.5, y + 0.5)`. Without harmonics this is exactly
/// [`rasterize_ellipse`].
pub fn rasterize_perturbed(
    geometry: &EllipseGeometry,
    harmonics: &[Harmonic],
    width: usize,
    height: usize,
) -> Result<BinaryMask, crate::raster::RasterError> {
    if harmonics.is_empty() {
        return rasterize_ellipse(geometry, width, height);
    }
    let (a, b) = (geometry.semi_major, geometry.semi_minor);
    let [cx, cy] = geometry.center;
    let (sr, cr) = geometry.rotation.sin_cos();
    let reach = a + harmonics.iter().map(|h| h.amplitude.abs()).sum::<f64>() + 1.0;
    let x0 = (cx - reach).floor().max(0.0) as usize;
    let y0 = (cy - reach).floor().max(0.0) as usize;
    let x1 = ((cx + reach).ceil().max(0.0) as usize).min(width - 1);
    let y1 = ((cy + reach).ceil().max(0.0) as usize).min(height - 1);

    BinaryMask::from_fn(width, height, |x, y| {
        if x < x0 || x > x1 || y < y0 || y > y1 {
            return false;
        }
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        let u = cr * dx + sr * dy;
        let v = -sr * dx + cr * dy;
        let phi = v.atan2(u);
        let (sp, cp) = phi.sin_cos();
        let r_ellipse = a * b / ((b * cp).powi(2) + (a * sp).powi(2)).sqrt();
        let delta: f64 = harmonics
            .iter()
            .map(|h| h.amplitude * (f64::from(h.frequency) * phi + h.phase).sin())
            .sum();
        (u * u + v * v).sqrt() < r_ellipse + delta
    })
}

fn sample_range(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn sample_eye(rng: &mut ChaCha8Rng, spec: &SynthSpec, label: Label) -> BinaryMask {
    let [w, h] = spec.raster;
    let p = sample_range(rng, spec.regular_axes_range);
    let q = sample_range(rng, spec.regular_axes_range);
    let rotation = rng.random_range(0.0..PI);
    let margin = spec.max_extent() + 1.0;
    let cx = sample_range(rng, [margin, w as f64 - margin]);
    let cy = sample_range(rng, [margin, h as f64 - margin]);
    let geometry =
        EllipseGeometry::new([cx, cy], p, q, rotation).expect("validated spec gives positive axes");

    let harmonics: Vec<Harmonic> = match label {
        Label::Real => Vec::new(),
        Label::Gan => (0..spec.perturb_terms)
            .map(|_| {
                let [flo, fhi] = spec.perturb_frequency_range;
                Harmonic {
                    amplitude: sample_range(rng, spec.perturb_amplitude_range),
                    frequency: rng.random_range(flo..=fhi),
                    phase: rng.random_range(0.0..2.0 * PI),
                }
            })
            .collect(),
    };
    let mask = rasterize_perturbed(&geometry, &harmonics, w, h).expect("validated raster size");
    if spec.boundary_flip_prob > 0.0 {
        jitter_boundary(&mask, spec.boundary_flip_prob, rng)
    } else {
        mask
    }
}

/// Flips pixels that have a 4-neighbor of the opposite value, each with
/// probability `p`, visiting them in row-major order.
fn jitter_boundary(mask: &BinaryMask, p: f64, rng: &mut ChaCha8Rng) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            let v = mask.get(x, y);
            let edge = (x > 0 && mask.get(x - 1, y) != v)
                || (x + 1 < w && mask.get(x + 1, y) != v)
                || (y > 0 && mask.get(x, y - 1) != v)
                || (y + 1 < h && mask.get(x, y + 1) != v);
            if edge && rng.random_bool(p) {
                out.set(x, y, !v);
            }
        }
    }
    out
}

fn face_id(label: Label, idx: usize) -> String {
    match label {
        Label::Real => format!("real_{idx:04}"),
        Label::Gan => format!("gan_{idx:04}"),
    }
}

/// Generates the corpus in memory: all real faces, then all gan faces.
///
/// Each face draws from its own ChaCha stream keyed by class and index, so a
/// face does not depend on how many faces precede it.
pub fn synth_faces(spec: &SynthSpec) -> Result<Vec<SynthFace>, EvalError> {
    spec.validate()?;
    let mut faces = Vec::with_capacity(2 * spec.n_per_class);
    for (class, label) in [Label::Real, Label::Gan].into_iter().enumerate() {
        for idx in 0..spec.n_per_class {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(((class as u64) << 32) | idx as u64);
            let left = sample_eye(&mut rng, spec, label);
            let right = sample_eye(&mut rng, spec, label);
            faces.push(SynthFace {
                face_id: face_id(label, idx),
                label,
                left,
                right,
            });
        }
    }
    Ok(faces)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), EvalError> {
    std::fs::write(path, bytes).map_err(|source| {
        EvalError::Io(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// Writes `masks/*.pgm`, `manifest.csv` and `synth_spec.json` under `outdir`.
pub fn generate_synth_corpus(spec: &SynthSpec, outdir: &Path) -> Result<Manifest, EvalError> {
    let faces = synth_faces(spec)?;
    let masks = outdir.join("masks");
    std::fs::create_dir_all(&masks).map_err(|source| {
        EvalError::Io(IoError::Io {
            path: masks.clone(),
            source,
        })
    })?;

    let mut entries = Vec::with_capacity(faces.len());
    for face in &faces {
        let left = format!("masks/{}_left.pgm", face.face_id);
        let right = format!("masks/{}_right.pgm", face.face_id);
        write(&outdir.join(&left), &encode_mask_pgm(&face.left))?;
        write(&outdir.join(&right), &encode_mask_pgm(&face.right))?;
        entries.push(ManifestEntry {
            face_id: face.face_id.clone(),
            label: match face.label {
                Label::Real => ManifestLabel::Real,
                Label::Gan => ManifestLabel::Gan,
            },
            left_path: Some(left.into()),
            right_path: Some(right.into()),
        });
    }

    write_manifest(&outdir.join("manifest.csv"), &entries)?;
    let mut spec_json = serde_json::to_vec_pretty(spec).expect("spec serializes");
    spec_json.push(b'\n');
    write(&outdir.join("synth_spec.json"), &spec_json)?;
    Ok(Manifest {
        base_dir: outdir.to_path_buf(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthSpec {
        SynthSpec {
            n_per_class: 3,
            raster: [96, 96],
            regular_axes_range: [12.0, 25.0],
            ..SynthSpec::default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            synth_faces(&small()).unwrap(),
            synth_faces(&small()).unwrap()
        );
        let other = SynthSpec {
            seed: 99,
            ..small()
        };
        assert_ne!(synth_faces(&small()).unwrap(), synth_faces(&other).unwrap());
    }

    #[test]
    fn prefix_stable_under_larger_n() {
        let few = synth_faces(&small()).unwrap();
        let more = synth_faces(&SynthSpec {
            n_per_class: 5,
            ..small()
        })
        .unwrap();
        assert_eq!(few[0], more[0]);
        assert_eq!(few[3].face_id, "gan_0000");
        assert_eq!(few[3], more[5]);
    }

    #[test]
    fn zero_amplitude_matches_real_rasterization() {
        let g = EllipseGeometry::new([40.2, 38.9], 20.0, 13.0, 0.7).unwrap();
        let h = [Harmonic {
            amplitude: 0.0,
            frequency: 5,
            phase: 1.0,
        }];
        assert_eq!(
            rasterize_perturbed(&g, &h, 80, 80).unwrap(),
            rasterize_ellipse(&g, 80, 80).unwrap()
        );
    }

    #[test]
    fn jitter_only_touches_boundary() {
        let spec = SynthSpec {
            boundary_flip_prob: 0.5,
            ..small()
        };
        let clean = synth_faces(&small()).unwrap();
        let noisy = synth_faces(&spec).unwrap();
        for (c, n) in clean
            .iter()
            .zip(&noisy)
            .filter(|(c, _)| c.label == Label::Real)
        {
            let grown = crate::raster::dilate3x3(&c.left);
            let shrunk = crate::raster::erode3x3(&c.left);
            assert_ne!(c.left, n.left);
            assert!(n.left.foreground().all(|(x, y)| grown.get(x, y)));
            assert!(shrunk.foreground().all(|(x, y)| n.left.get(x, y)));
        }
    }

    #[test]
    fn shapes_stay_inside_raster() {
        for face in synth_faces(&small()).unwrap() {
            for m in [&face.left, &face.right] {
                assert!(m.count() > 300);
                let (w, h) = (m.width(), m.height());
                assert!(m
                    .foreground()
                    .all(|(x, y)| x > 0 && y > 0 && x + 1 < w && y + 1 < h));
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let cases = [
            SynthSpec {
                n_per_class: 0,
                ..SynthSpec::default()
            },
            SynthSpec {
                raster: [64, 64],
                ..SynthSpec::default()
            },
            SynthSpec {
                regular_axes_range: [20.0, 10.0],
                ..SynthSpec::default()
            },
            SynthSpec {
                perturb_frequency_range: [0, 3],
                ..SynthSpec::default()
            },
            SynthSpec {
                perturb_amplitude_range: [-1.0, 3.0],
                ..SynthSpec::default()
            },
            SynthSpec {
                boundary_flip_prob: 1.5,
                ..SynthSpec::default()
            },
        ];
        for spec in cases {
            assert!(
                matches!(spec.validate(), Err(EvalError::InvalidSpec(_))),
                "{spec:?}"
            );
        }
        assert!(SynthSpec::default().validate().is_ok());
    }

    #[test]
    fn spec_json_defaults_fill_in() {
        let s: SynthSpec = serde_json::from_str(r#"{"seed": 5, "n_per_class": 10}"#).unwrap();
        assert_eq!(s.seed, 5);
        assert_eq!(s.raster, [128, 128]);
        assert!(serde_json::from_str::<SynthSpec>(r#"{"bogus": 1}"#).is_err());
    }
}
