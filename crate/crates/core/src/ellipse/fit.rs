//! Direct constrained least-squares conic fit.
//!
//! Minimizes `Σ F(uᵢ; θ)²` subject to `4ac - b² = 1`. With the design matrix
//! split into its quadratic columns `D1 = [x², xy, y²]` and linear columns
//! `D2 = [x, y, 1]`, the scatter blocks `S1 = D1ᵀD1`, `S2 = D1ᵀD2`,
//! `S3 = D2ᵀD2` reduce the 6x6 generalized eigenproblem to
//!
//! ```text
//! C1⁻¹ (S1 - S2 S3⁻¹ S2ᵀ) a1 = λ a1,    a2 = -S3⁻¹ S2ᵀ a1
//! ```
//!
//! where `C1` encodes the constraint on `a1 = [a, b, c]`. Exactly one
//! eigenvector satisfies `a1ᵀ C1 a1 > 0`; that one is the ellipse.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::conic::{conic_to_geometry, ConicParams, EllipseGeometry};
use super::FitError;

const COLLINEAR_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FitRecord", try_from = "FitRecord")]
pub struct FitReport {
    pub conic: ConicParams,
    pub geometry: EllipseGeometry,
    /// Root-mean-square algebraic distance of the input points, in the
    /// `4ac - b² = 1` gauge.
    pub rms_algebraic_distance: f64,
    pub n_points: usize,
}

/// Flat wire form of [`FitReport`].
#[derive(Serialize, Deserialize)]
struct FitRecord {
    conic: [f64; 6],
    center: [f64; 2],
    semi_major: f64,
    semi_minor: f64,
    rotation_rad: f64,
    rms: f64,
    n_points: usize,
}

impl From<FitReport> for FitRecord {
    fn from(r: FitReport) -> Self {
        Self {
            conic: r.conic.theta(),
            center: r.geometry.center,
            semi_major: r.geometry.semi_major,
            semi_minor: r.geometry.semi_minor,
            rotation_rad: r.geometry.rotation,
            rms: r.rms_algebraic_distance,
            n_points: r.n_points,
        }
    }
}

impl TryFrom<FitRecord> for FitReport {
    type Error = FitError;

    fn try_from(r: FitRecord) -> Result<Self, Self::Error> {
        Ok(Self {
            conic: ConicParams::new(r.conic)?,
            geometry: EllipseGeometry {
                center: r.center,
                semi_major: r.semi_major,
                semi_minor: r.semi_minor,
                rotation: r.rotation_rad,
            },
            rms_algebraic_distance: r.rms,
            n_points: r.n_points,
        })
    }
}

/// Fits an ellipse to at least five distinct, non-collinear points.
///
/// Points are sorted internally, so the result does not depend on input
/// order. Coordinates are centered on their mean and scaled to unit RMS
/// radius before the scatter matrix is formed.
pub fn fit_ellipse(points: &[[f64; 2]]) -> Result<FitReport, FitError> {
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(FitError::DegenerateInput("non-finite coordinate".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));

    let mut distinct = pts.clone();
    distinct.dedup();
    if distinct.len() < 5 {
        return Err(FitError::DegenerateInput(format!(
            "need at least 5 distinct points, got {}",
            distinct.len()
        )));
    }

    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let centered: Vec<[f64; 2]> = pts.iter().map(|p| [p[0] - mx, p[1] - my]).collect();

    check_collinear(&centered)?;

    let rms = (centered
        .iter()
        .map(|p| p[0] * p[0] + p[1] * p[1])
        .sum::<f64>()
        / n)
        .sqrt();
    let s = 1.0 / rms;

    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for p in &centered {
        let (x, y) = (p[0] * s, p[1] * s);
        let quad = Vector3::new(x * x, x * y, y * y);
        let lin = Vector3::new(x, y, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }

    let s3_inv = s3
        .try_inverse()
        .ok_or_else(|| FitError::DegenerateInput("singular linear scatter block".into()))?;
    let elim = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * elim;
    // C1⁻¹ for C1 = [[0, 0, 2], [0, -1, 0], [2, 0, 0]]
    let c1_inv = Matrix3::new(0.0, 0.0, 0.5, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0);
    let system = c1_inv * reduced;

    let a1 = ellipse_eigenvector(&system)?;
    let a2 = elim * a1;
    let normalized = [a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]];

    let conic = ConicParams::new(denormalize(normalized, mx, my, s))
        .map_err(|_| FitError::NoEllipseSolution)?;
    debug_assert!(conic.discriminant() < 0.0);
    let geometry = conic_to_geometry(&conic).map_err(|_| FitError::NoEllipseSolution)?;

    let ssd: f64 = pts.iter().map(|p| conic.evaluate(p[0], p[1]).powi(2)).sum();

    Ok(FitReport {
        conic,
        geometry,
        rms_algebraic_distance: (ssd / n).sqrt(),
        n_points: pts.len(),
    })
}

/// Smallest-to-largest singular value ratio of the centered coordinates,
/// measured along and across the principal direction.
fn check_collinear(centered: &[[f64; 2]]) -> Result<(), FitError> {
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in centered {
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
        syy += p[1] * p[1];
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (sn, cs) = phi.sin_cos();
    let (mut along, mut across) = (0.0, 0.0);
    for p in centered {
        along += (cs * p[0] + sn * p[1]).powi(2);
        across += (-sn * p[0] + cs * p[1]).powi(2);
    }
    let (hi, lo) = (along.max(across).sqrt(), along.min(across).sqrt());
    if hi == 0.0 || lo < COLLINEAR_RATIO * hi {
        return Err(FitError::DegenerateInput("points are collinear".into()));
    }
    Ok(())
}

/// Picks the real eigenvector of `system` with a positive constraint value
/// `4ac - b²`, normalized so that the constraint equals one.
fn ellipse_eigenvector(system: &Matrix3<f64>) -> Result<Vector3<f64>, FitError> {
    let scale = system.abs().max().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in system.complex_eigenvalues().iter() {
        if lambda.im.abs() > 1e-9 * scale {
            continue;
        }
        let shifted = system - Matrix3::identity() * lambda.re;
        let Some(v) = null_vector(&shifted) else {
            continue;
        };
        let constraint = 4.0 * v[0] * v[2] - v[1] * v[1];
        if constraint > 0.0 && best.is_none_or(|(c, _)| constraint > c) {
            best = Some((constraint, v));
        }
    }
    let (constraint, v) = best.ok_or(FitError::NoEllipseSolution)?;
    Ok(v / constraint.sqrt())
}

/// Unit vector spanning the (numerical) null space of a rank-deficient 3x3
/// matrix: the right singular vector of the smallest singular value.
fn null_vector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let v: Vector3<f64> = v_t.row(idx).transpose();
    v.iter().all(|x| x.is_finite()).then_some(v)
}

/// Maps a conic fitted in coordinates `x' = s (x - mx)` back to raw
/// coordinates.
fn denormalize(t: [f64; 6], mx: f64, my: f64, s: f64) -> [f64; 6] {
    let [a, b, c, d, e, f] = t;
    let s2 = s * s;
    let (qa, qb, qc) = (a * s2, b * s2, c * s2);
    let (ld, le) = (d * s, e * s);
    // substitute x' = s x - s mx into each monomial
    [
        qa,
        qb,
        qc,
        -2.0 * qa * mx - qb * my + ld,
        -qb * mx - 2.0 * qc * my + le,
        qa * mx * mx + qb * mx * my + qc * my * my - ld * mx - le * my + f,
    ]
}
