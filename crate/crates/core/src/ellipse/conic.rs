use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FitError;

/// Conic `a x² + b xy + c y² + d x + e y + f = 0` describing a real ellipse.
///
/// Stored in the gauge `4ac - b² = 1` with `a > 0`, which fixes both the
/// scale and the sign of the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct ConicParams([f64; 6]);

impl ConicParams {
    /// Normalizes an arbitrary coefficient vector into the ellipse gauge.
    pub fn new(theta: [f64; 6]) -> Result<Self, FitError> {
        let [a, b, c, ..] = theta;
        let k = 4.0 * a * c - b * b;
        if k.is_nan() || k <= 0.0 || theta.iter().any(|v| !v.is_finite()) {
            return Err(FitError::NotAnEllipse);
        }
        let scale = k.sqrt().copysign(a);
        Ok(Self(theta.map(|v| v / scale)))
    }

    pub fn theta(&self) -> [f64; 6] {
        self.0
    }

    /// Algebraic distance `F(u; θ)` of a point.
    #[inline]
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let [a, b, c, d, e, f] = self.0;
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }

    /// `b² - 4ac`; negative for every stored conic.
    pub fn discriminant(&self) -> f64 {
        let [a, b, c, ..] = self.0;
        b * b - 4.0 * a * c
    }
}

impl TryFrom<[f64; 6]> for ConicParams {
    type Error = FitError;

    fn try_from(theta: [f64; 6]) -> Result<Self, Self::Error> {
        Self::new(theta)
    }
}

impl From<ConicParams> for [f64; 6] {
    fn from(c: ConicParams) -> Self {
        c.0
    }
}

/// Geometric ellipse: center, semi-axes and major-axis angle in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseGeometry {
    pub center: [f64; 2],
    pub semi_major: f64,
    pub semi_minor: f64,
    pub rotation: f64,
}

impl EllipseGeometry {
    /// Canonicalizes axis order and angle range. Axes must be positive.
    pub fn new(center: [f64; 2], axis_a: f64, axis_b: f64, angle: f64) -> Result<Self, FitError> {
        if !(axis_a > 0.0 && axis_b > 0.0)
            || !angle.is_finite()
            || !axis_a.is_finite()
            || !axis_b.is_finite()
        {
            return Err(FitError::NotAnEllipse);
        }
        let (semi_major, semi_minor, angle) = if axis_a >= axis_b {
            (axis_a, axis_b, angle)
        } else {
            (axis_b, axis_a, angle + PI / 2.0)
        };
        Ok(Self {
            center,
            semi_major,
            semi_minor,
            rotation: wrap_angle(angle),
        })
    }

    /// Coefficients `(A, B, C)` of the quadratic form for which the ellipse is
    /// `A u² + B uv + C v² = 1`, with `(u, v)` relative to the center.
    pub fn quadratic_form(&self) -> [f64; 3] {
        let (s, c) = self.rotation.sin_cos();
        let ia = 1.0 / (self.semi_major * self.semi_major);
        let ib = 1.0 / (self.semi_minor * self.semi_minor);
        [
            c * c * ia + s * s * ib,
            2.0 * s * c * (ia - ib),
            s * s * ia + c * c * ib,
        ]
    }

    pub fn area(&self) -> f64 {
        PI * self.semi_major * self.semi_minor
    }
}

fn wrap_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    // rem_euclid can round up to exactly π
    if r >= PI {
        0.0
    } else {
        r
    }
}

pub fn geometry_to_conic(g: &EllipseGeometry) -> ConicParams {
    let [qa, qb, qc] = g.quadratic_form();
    let [cx, cy] = g.center;
    let theta = [
        qa,
        qb,
        qc,
        -2.0 * qa * cx - qb * cy,
        -qb * cx - 2.0 * qc * cy,
        qa * cx * cx + qb * cx * cy + qc * cy * cy - 1.0,
    ];
    ConicParams::new(theta).expect("positive axes always give a real ellipse")
}

/// Center from the zero of the conic gradient; axes and angle from the
/// eigen-decomposition of the quadratic-form matrix.
pub fn conic_to_geometry(conic: &ConicParams) -> Result<EllipseGeometry, FitError> {
    let [a, b, c, d, e, f] = conic.theta();
    let k = 4.0 * a * c - b * b;
    if k.is_nan() || k <= 0.0 {
        return Err(FitError::NotAnEllipse);
    }
    let cx = (b * e - 2.0 * c * d) / k;
    let cy = (b * d - 2.0 * a * e) / k;
    let f0 = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f;

    // eigenvalues of [[a, b/2], [b/2, c]]; a > 0 in the gauge so both positive
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + 0.25 * b * b).sqrt();
    let big = mean + radius;
    // product of the eigenvalues is k/4, which avoids cancellation
    let small = 0.25 * k / big;

    if f0.is_nan() || f0 >= 0.0 {
        return Err(FitError::NotAnEllipse);
    }
    let semi_major = (-f0 / small).sqrt();
    let semi_minor = (-f0 / big).sqrt();
    // eigenvector of the larger eigenvalue points along the minor axis
    let minor_angle = 0.5 * b.atan2(a - c);
    EllipseGeometry::new([cx, cy], semi_major, semi_minor, minor_angle + PI / 2.0)
}
