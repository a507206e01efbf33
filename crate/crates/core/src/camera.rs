//! Pinhole camera model and rigid-body pose algebra.
//!
//! Coordinates follow a right-handed, y-down, z-forward camera frame.
//! Translations and depths are in millimeters throughout the crate.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// A 3D point in millimeters.
pub type Point3 = nalgebra::Point3<f64>;

/// Orthonormality tolerance for poses built in code.
pub const POSE_TOLERANCE: f64 = 1e-9;
/// Parsed rotations deviating more than this are rejected; between the two
/// tolerances they are projected onto the nearest rotation.
pub const PARSED_POSE_TOLERANCE: f64 = 1e-6;

/// Continuous pixel coordinate. Integer values address pixel centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord {
    pub u: f64,
    pub v: f64,
}

impl PixelCoord {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// Pinhole intrinsics without skew.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        if !(fx.is_finite() && fx > 0.0 && fy.is_finite() && fy > 0.0) {
            return Err(Error::InvalidIntrinsics(format!(
                "focal lengths must be finite and positive, got fx={fx} fy={fy}"
            )));
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidIntrinsics(format!(
                "principal point must be finite, got cx={cx} cy={cy}"
            )));
        }
        Ok(Self { fx, fy, cx, cy })
    }

    /// Builds intrinsics from a full 3x3 camera matrix, rejecting skew and
    /// a malformed last row.
    pub fn from_matrix(k: &Matrix3<f64>) -> Result<Self> {
        if k[(0, 1)] != 0.0 {
            return Err(Error::InvalidIntrinsics(format!(
                "skew is unsupported (k01 = {})",
                k[(0, 1)]
            )));
        }
        if k[(1, 0)] != 0.0 || k[(2, 0)] != 0.0 || k[(2, 1)] != 0.0 || k[(2, 2)] != 1.0 {
            return Err(Error::InvalidIntrinsics(
                "camera matrix must have the form [fx 0 cx; 0 fy cy; 0 0 1]".into(),
            ));
        }
        Self::new(k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)])
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }
    pub fn fy(&self) -> f64 {
        self.fy
    }
    pub fn cx(&self) -> f64 {
        self.cx
    }
    pub fn cy(&self) -> f64 {
        self.cy
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    /// Intrinsics of a sub-window whose top-left corner is at `(dx, dy)`.
    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self {
            cx: self.cx - dx,
            cy: self.cy - dy,
            ..*self
        }
    }

    /// Lifts a pixel to the 3D point at the given depth along its ray.
    /// The returned point has `z == depth` exactly.
    pub fn backproject(&self, p: PixelCoord, depth: f64) -> Result<Point3> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::InvalidDepth(depth));
        }
        Ok(self.backproject_unchecked(p, depth))
    }

    #[inline]
    pub(crate) fn backproject_unchecked(&self, p: PixelCoord, depth: f64) -> Point3 {
        Point3::new(
            (p.u - self.cx) * depth / self.fx,
            (p.v - self.cy) * depth / self.fy,
            depth,
        )
    }

    pub fn project(&self, p: &Point3) -> Result<PixelCoord> {
        if !(p.z > 0.0) || !p.x.is_finite() || !p.y.is_finite() || !p.z.is_finite() {
            return Err(Error::BehindCamera(p.z));
        }
        Ok(self.project_unchecked(p))
    }

    #[inline]
    pub(crate) fn project_unchecked(&self, p: &Point3) -> PixelCoord {
        PixelCoord {
            u: self.fx * p.x / p.z + self.cx,
            v: self.fy * p.y / p.z + self.cy,
        }
    }
}

/// Rigid transform `x -> R x + t` with `t` in millimeters.
///
/// Used both as a point map between camera frames and as a camera pose in
/// a world frame (camera-to-world), depending on context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r - Matrix3::identity();
    let det = (r.determinant() - 1.0).abs();
    gram.abs().max().max(det)
}

/// Projects a 3x3 matrix onto SO(3) in the Frobenius sense.
fn nearest_rotation(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    Some(u * d * v_t)
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Validates `rotation` at [`POSE_TOLERANCE`].
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        if rotation.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPose("non-finite entry".into()));
        }
        let err = orthonormality_error(&rotation);
        if err > POSE_TOLERANCE {
            return Err(Error::InvalidPose(format!(
                "rotation is not orthonormal (deviation {err:e})"
            )));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    /// Accepts a rotation read from text. Deviations up to
    /// [`PARSED_POSE_TOLERANCE`] are repaired; the flag reports whether
    /// repair happened.
    pub fn from_parsed(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<(Self, bool)> {
        if rotation.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPose("non-finite entry".into()));
        }
        let err = orthonormality_error(&rotation);
        if err <= POSE_TOLERANCE {
            return Ok((
                Self {
                    rotation,
                    translation,
                },
                false,
            ));
        }
        if err > PARSED_POSE_TOLERANCE {
            return Err(Error::InvalidPose(format!(
                "rotation deviates from SO(3) by {err:e} (limit {PARSED_POSE_TOLERANCE:e})"
            )));
        }
        let rotation = nearest_rotation(&rotation)
            .ok_or_else(|| Error::InvalidPose("SVD failed during re-orthonormalization".into()))?;
        Ok((
            Self {
                rotation,
                translation,
            },
            true,
        ))
    }

    /// Rotation of `angle` radians about `axis` (right-handed), then translation.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64, translation: Vector3<f64>) -> Result<Self> {
        let axis = nalgebra::Unit::try_new(axis, 1e-12)
            .ok_or_else(|| Error::InvalidPose("rotation axis has zero length".into()))?;
        let rotation = *nalgebra::Rotation3::from_axis_angle(&axis, angle).matrix();
        Self::new(rotation, translation)
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn transform_point(&self, p: &Point3) -> Point3 {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Row-major `[R | t]`, the layout of one pose-file line.
    pub fn to_row_major(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)], r[(0, 1)], r[(0, 2)], t.x,
            r[(1, 0)], r[(1, 1)], r[(1, 2)], t.y,
            r[(2, 0)], r[(2, 1)], r[(2, 2)], t.z,
        ]
    }

    /// Largest elementwise difference of rotations and translations.
    pub fn max_abs_diff(&self, other: &Pose) -> (f64, f64) {
        (
            (self.rotation - other.rotation).abs().max(),
            (self.translation - other.translation).abs().max(),
        )
    }
}

/// Applies `pose` to every row of an n×3 latent point set.
pub fn transform_latent(latent: &[[f64; 3]], pose: &Pose) -> Vec<[f64; 3]> {
    latent
        .iter()
        .map(|row| {
            let p = pose.transform_point(&Point3::new(row[0], row[1], row[2]));
            [p.x, p.y, p.z]
        })
        .collect()
}
