//! Rigid-body and angular primitives shared by every other module.
//!
//! Rotations are stored as orthonormal 3×3 matrices and move between the
//! group and its tangent space through [`so3_exp`] / [`so3_log`] (Rodrigues
//! formula and its inverse). All math is `f64`; file readers widen at the
//! boundary.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::math;

/// Small-angle cutoff below which Taylor expansions replace the closed-form
/// Rodrigues coefficients (below f64 curvature noise).
const SMALL_ANGLE: f64 = 1e-8;

/// Strict orthonormality tolerance for [`RotationMatrix`]: `‖RᵀR − I‖_max`
/// and `|det R − 1|` must both stay under this.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// An input coordinate was NaN or infinite.
    NonFinite,
    /// A matrix failed the rotation invariants; carries the observed
    /// max deviation of `RᵀR` from identity or of `det R` from one.
    NotOrthonormal { deviation: f64 },
    /// Azimuth is undefined because the point lies on the sensor axis
    /// (x = y = 0).
    DegenerateAzimuth,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonFinite => write!(f, "non-finite input"),
            GeometryError::NotOrthonormal { deviation } => {
                write!(f, "matrix is not orthonormal (deviation {deviation:e})")
            }
            GeometryError::DegenerateAzimuth => {
                write!(f, "azimuth undefined for x = y = 0")
            }
        }
    }
}

/// A point or vector in 3-space, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Sensor returns are "valid" iff they differ from the origin; zero points
/// are the common sentinel for missing returns.
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// A return is valid iff it is not the all-zero sentinel.
    #[inline]
    pub fn is_valid_return(self) -> bool {
        self != Vec3::ZERO
    }

    #[inline]
    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    #[inline]
    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul_mat(&self, rhs: &Mat3) -> Mat3 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Mat3(out)
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

/// Skew-symmetric (hat) matrix of `v`.
#[rustfmt::skip]
fn hat(v: Vec3) -> Mat3 {
    Mat3([
        [ 0.0, -v.z,  v.y],
        [ v.z,  0.0, -v.x],
        [-v.y,  v.x,  0.0],
    ])
}

/// `hat(v)²`, written out so the result is exactly symmetric.
#[rustfmt::skip]
fn hat_squared(v: Vec3) -> Mat3 {
    let xx = v.x * v.x;
    let yy = v.y * v.y;
    let zz = v.z * v.z;
    let xy = v.x * v.y;
    let xz = v.x * v.z;
    let yz = v.y * v.z;
    Mat3([
        [-yy - zz,  xy,       xz     ],
        [ xy,      -xx - zz,  yz     ],
        [ xz,       yz,      -xx - yy],
    ])
}

/// An orthonormal, determinant-one 3×3 matrix.
///
/// Construction validates the invariants; every subsequent operation
/// preserves them, so consumers never re-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix(Mat3::IDENTITY);

    /// Accept `m` only if it already satisfies the strict invariants
    /// (`‖RᵀR − I‖_max < 1e-9`, `det = 1 ± 1e-9`).
    pub fn try_new(m: Mat3) -> Result<Self, GeometryError> {
        Self::check(&m, ORTHONORMAL_TOL)?;
        Ok(RotationMatrix(m))
    }

    /// Accept a matrix that deviates from orthonormality by at most `tol`
    /// (e.g. a pose parsed from 32-bit text) and re-orthonormalize it via
    /// Gram-Schmidt so the strict invariants hold afterwards.
    pub fn orthonormalized(m: Mat3, tol: f64) -> Result<Self, GeometryError> {
        Self::check(&m, tol)?;
        let r0 = Vec3::new(m.0[0][0], m.0[0][1], m.0[0][2]).normalized();
        let r1_raw = Vec3::new(m.0[1][0], m.0[1][1], m.0[1][2]);
        let r2 = r0.cross(r1_raw).normalized();
        let r1 = r2.cross(r0);
        let fixed = Mat3([[r0.x, r0.y, r0.z], [r1.x, r1.y, r1.z], [r2.x, r2.y, r2.z]]);
        Self::check(&fixed, ORTHONORMAL_TOL)?;
        Ok(RotationMatrix(fixed))
    }

    fn check(m: &Mat3, tol: f64) -> Result<(), GeometryError> {
        if !m.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let gram = m.transpose().mul_mat(m);
        let deviation = gram.max_abs_diff(&Mat3::IDENTITY).max((m.det() - 1.0).abs());
        if deviation >= tol {
            return Err(GeometryError::NotOrthonormal { deviation });
        }
        Ok(())
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Inverse rotation (the transpose).
    #[inline]
    pub fn inverse(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    #[inline]
    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.0.mul_vec(v)
    }

    /// Apply the inverse rotation without materializing the transpose.
    #[inline]
    pub fn apply_inverse(&self, v: Vec3) -> Vec3 {
        let m = &self.0 .0;
        Vec3::new(
            m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
        )
    }

    /// `self · other`.
    #[inline]
    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0.mul_mat(&other.0))
    }
}

/// Axis-angle rotation: direction is the axis, magnitude the angle in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector(Vec3);

impl RotationVector {
    pub const ZERO: RotationVector = RotationVector(Vec3::ZERO);

    pub fn new(v: Vec3) -> Result<Self, GeometryError> {
        if !v.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(RotationVector(v))
    }

    #[inline]
    pub fn vector(&self) -> Vec3 {
        self.0
    }

    /// Rotation angle in radians.
    #[inline]
    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    /// Equivalent vector with angle wrapped into `[0, π]` (axis flips when
    /// the reduced angle would be negative).
    pub fn canonicalized(&self) -> RotationVector {
        let theta = self.angle();
        if theta <= core::f64::consts::PI || theta == 0.0 {
            return *self;
        }
        let two_pi = 2.0 * core::f64::consts::PI;
        // Reduce into (-π, π], then fold the sign into the axis.
        let reduced = theta - two_pi * math::floor((theta + core::f64::consts::PI) / two_pi);
        RotationVector(self.0 * (reduced / theta))
    }
}

/// Rigid transform on SE(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        rotation: RotationMatrix::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: RotationMatrix, translation: Vec3) -> Result<Self, GeometryError> {
        if !translation.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Pose { rotation, translation })
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.apply(other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        Pose {
            rotation: self.rotation.inverse(),
            translation: self.rotation.apply_inverse(-self.translation),
        }
    }

    #[inline]
    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }
}

/// Exponential map R³ → SO(3) (Rodrigues formula).
///
/// `R = I + a·hat(φ) + b·hat(φ)²` with `a = sin θ/θ`, `b = (1−cos θ)/θ²`;
/// both coefficients switch to their second-order Taylor expansions below
/// the small-angle cutoff. `so3_exp(0)` is exactly the identity.
pub fn so3_exp(phi: &RotationVector) -> RotationMatrix {
    exp_unchecked(phi.vector())
}

/// Rodrigues formula on a raw vector; the result is orthonormal by
/// construction so no validation round trip is paid.
pub(crate) fn exp_unchecked(v: Vec3) -> RotationMatrix {
    let theta2 = v.norm_squared();
    let (a, b) = if theta2 < SMALL_ANGLE * SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = math::sqrt(theta2);
        (math::sin(theta) / theta, (1.0 - math::cos(theta)) / theta2)
    };
    let k = hat(v);
    let k2 = hat_squared(v);
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            *cell = id + a * k.0[i][j] + b * k2.0[i][j];
        }
    }
    RotationMatrix(Mat3(out))
}

/// Logarithm map SO(3) → R³, inverse of [`so3_exp`] for angles below π.
///
/// The angle comes from `atan2` of the skew-part norm against the trace;
/// the axis comes from the skew part, switching to the symmetric-part
/// branch near π where the skew part loses precision.
pub fn so3_log(r: &RotationMatrix) -> RotationVector {
    let m = &r.matrix().0;
    // vee(R − Rᵀ) = 2 sin θ · axis
    let vee = Vec3::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]);
    let sin_theta = 0.5 * vee.norm();
    let cos_theta = (0.5 * (r.matrix().trace() - 1.0)).clamp(-1.0, 1.0);
    let theta = math::atan2(sin_theta, cos_theta);

    if theta < SMALL_ANGLE {
        // θ/(2 sin θ) → 1/2 as θ → 0.
        return RotationVector(vee * 0.5);
    }
    if cos_theta > -0.9 {
        return RotationVector(vee * (theta / (2.0 * sin_theta)));
    }

    // Near π the skew part vanishes; recover the axis from the symmetric
    // part instead: (R + Rᵀ)/2 = I + (1 − cos θ)(aaᵀ − I).
    let k = 1.0 / (1.0 - cos_theta);
    let diag = [
        1.0 + (m[0][0] - 1.0) * k,
        1.0 + (m[1][1] - 1.0) * k,
        1.0 + (m[2][2] - 1.0) * k,
    ];
    let i = if diag[0] >= diag[1] && diag[0] >= diag[2] {
        0
    } else if diag[1] >= diag[2] {
        1
    } else {
        2
    };
    let mut axis = [0.0f64; 3];
    axis[i] = math::sqrt(diag[i].max(0.0));
    for j in 0..3 {
        if j != i {
            // (aaᵀ)_ij = S_ij · k for off-diagonal entries.
            axis[j] = 0.5 * (m[i][j] + m[j][i]) * k / axis[i];
        }
    }
    let mut axis = Vec3::new(axis[0], axis[1], axis[2]).normalized();
    // Pick the sign consistent with the (tiny but directional) skew part;
    // at exactly π both signs are equivalent.
    if vee.dot(axis) < 0.0 {
        axis = -axis;
    }
    RotationVector(axis * theta)
}

/// Horizontal angle of `p` in degrees, full circle `[0, 360)`.
///
/// Negative two-argument arctangent results are shifted by +360 so the
/// codomain starts at the +x axis and grows counterclockwise.
pub fn azimuth_deg(p: Point3) -> Result<f64, GeometryError> {
    if !p.x.is_finite() || !p.y.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    if p.x == 0.0 && p.y == 0.0 {
        return Err(GeometryError::DegenerateAzimuth);
    }
    let mut deg = math::atan2(p.y, p.x).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    // atan2 values a hair below zero can round to exactly 360 after the
    // shift; wrap them so the contract `[0, 360)` holds.
    if deg >= 360.0 {
        deg = 0.0;
    }
    Ok(deg)
}
