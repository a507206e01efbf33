//! Analytic RGB-D scenes with exact depth.
//!
//! Scenes are made of checker-textured planes and spheres, rendered by
//! casting one ray through each pixel center. Depth is the camera-frame `z`
//! of the nearest hit, so it is exact up to floating-point rounding.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{Intrinsics, Pose};
use crate::dataset::{relative_pose, Frame, FramePair};
use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image};

fn default_colors() -> [[f64; 3]; 2] {
    [[0.15, 0.2, 0.3], [0.9, 0.8, 0.6]]
}

/// One textured surface. Positions and lengths are in millimeters (world frame).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Primitive {
    Plane {
        point: [f64; 3],
        normal: [f64; 3],
        /// Checker square side.
        period: f64,
        #[serde(default = "default_colors")]
        colors: [[f64; 3]; 2],
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
        /// Side of the solid checker cells.
        period: f64,
        #[serde(default = "default_colors")]
        colors: [[f64; 3]; 2],
    },
}

impl Primitive {
    pub fn plane(point: [f64; 3], normal: [f64; 3], period: f64) -> Self {
        Primitive::Plane {
            point,
            normal,
            period,
            colors: default_colors(),
        }
    }

    pub fn sphere(center: [f64; 3], radius: f64, period: f64) -> Self {
        Primitive::Sphere {
            center,
            radius,
            period,
            colors: default_colors(),
        }
    }

    fn validate(&self) -> Result<()> {
        let (period, colors) = match self {
            Primitive::Plane {
                normal,
                period,
                colors,
                ..
            } => {
                if Vector3::from(*normal).norm() == 0.0 {
                    return Err(Error::InvalidValue("plane normal must be nonzero".into()));
                }
                (*period, colors)
            }
            Primitive::Sphere {
                radius,
                period,
                colors,
                ..
            } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidValue(format!("sphere radius {radius} must be > 0")));
                }
                (*period, colors)
            }
        };
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidValue(format!("checker period {period} must be > 0")));
        }
        if colors.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidValue("checker colors must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Ray parameter of the nearest hit in front of the origin.
    fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        match self {
            Primitive::Plane { point, normal, .. } => {
                let n = Vector3::from(*normal);
                let denom = n.dot(dir);
                if denom == 0.0 {
                    return None;
                }
                let s = n.dot(&(Vector3::from(*point) - origin)) / denom;
                (s > 0.0).then_some(s)
            }
            Primitive::Sphere { center, radius, .. } => {
                let oc = origin - Vector3::from(*center);
                let a = dir.dot(dir);
                let b = 2.0 * dir.dot(&oc);
                let c = oc.dot(&oc) - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let near = (-b - sq) / (2.0 * a);
                let far = (-b + sq) / (2.0 * a);
                if near > 0.0 {
                    Some(near)
                } else if far > 0.0 {
                    Some(far)
                } else {
                    None
                }
            }
        }
    }

    fn color_at(&self, q: &Vector3<f64>) -> [f64; 3] {
        let (parity, colors) = match self {
            Primitive::Plane {
                point,
                normal,
                period,
                colors,
            } => {
                let (e1, e2) = plane_basis(&Vector3::from(*normal));
                let rel = q - Vector3::from(*point);
                let a = (rel.dot(&e1) / period).floor() as i64;
                let b = (rel.dot(&e2) / period).floor() as i64;
                ((a + b).rem_euclid(2), colors)
            }
            Primitive::Sphere {
                center,
                period,
                colors,
                ..
            } => {
                let rel = (q - Vector3::from(*center)) / *period;
                let s = rel.x.floor() as i64 + rel.y.floor() as i64 + rel.z.floor() as i64;
                (s.rem_euclid(2), colors)
            }
        };
        colors[parity as usize]
    }
}

/// Orthonormal in-plane axes for a plane normal.
fn plane_basis(normal: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let n = normal.normalize();
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e2 = n.cross(&helper).normalize();
    let e1 = e2.cross(&n);
    (e1, e2)
}

/// A set of primitives; the nearest hit along each ray wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticScene {
    pub objects: Vec<Primitive>,
}

impl AnalyticScene {
    pub fn new(objects: Vec<Primitive>) -> Result<Self> {
        let scene = Self { objects };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        self.objects.iter().try_for_each(Primitive::validate)
    }

    /// Nearest hit for a ray whose direction has unit camera-frame z, so the
    /// returned parameter is the camera depth.
    fn trace(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<(f64, [f64; 3])> {
        let mut best: Option<(f64, &Primitive)> = None;
        for obj in &self.objects {
            if let Some(s) = obj.intersect(origin, dir) {
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, obj));
                }
            }
        }
        best.map(|(s, obj)| (s, obj.color_at(&(origin + dir * s))))
    }
}

/// Renders color and depth seen by a camera with camera-to-world `pose`.
/// Pixels whose ray misses every object get depth 0 and color 0.
pub fn render(
    scene: &AnalyticScene,
    pose: &Pose,
    k: &Intrinsics,
    width: usize,
    height: usize,
) -> (Image, DepthMap) {
    let origin = *pose.translation();
    let rot = *pose.rotation();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..height)
        .into_par_iter()
        .map(|y| {
            let mut color = Vec::with_capacity(width * 3);
            let mut depth = Vec::with_capacity(width);
            for x in 0..width {
                let ray_cam = Vector3::new(
                    (x as f64 - k.cx()) / k.fx(),
                    (y as f64 - k.cy()) / k.fy(),
                    1.0,
                );
                let dir = rot * ray_cam;
                match scene.trace(&origin, &dir) {
                    Some((d, c)) => {
                        depth.push(d);
                        color.extend_from_slice(&c);
                    }
                    None => {
                        depth.push(0.0);
                        color.extend_from_slice(&[0.0; 3]);
                    }
                }
            }
            (color, depth)
        })
        .collect();
    let mut color = Vec::with_capacity(width * height * 3);
    let mut depth = Vec::with_capacity(width * height);
    for (c, d) in rows {
        color.extend(c);
        depth.extend(d);
    }
    (
        Image::from_raw_unchecked(width, height, 3, color),
        DepthMap::from_raw_unchecked(width, height, depth),
    )
}

/// Renders both views and packages them as a pair with ground truth.
pub fn make_pair(
    scene: &AnalyticScene,
    pose_src: &Pose,
    pose_tgt: &Pose,
    k: &Intrinsics,
    width: usize,
    height: usize,
) -> FramePair {
    let (src_img, src_depth) = render(scene, pose_src, k, width, height);
    let (tgt_img, tgt_depth) = render(scene, pose_tgt, k, width, height);
    FramePair {
        scene_id: "synthetic".into(),
        src: Frame {
            index: 0,
            image: src_img,
            depth: Some(src_depth),
            pose: *pose_src,
        },
        tgt: Frame {
            index: 1,
            image: tgt_img,
            depth: Some(tgt_depth),
            pose: *pose_tgt,
        },
        relative_pose: relative_pose(pose_src, pose_tgt),
        frame_distance: 1,
        intrinsics: *k,
    }
}

/// Rotation about the camera y axis (yaw) in degrees, then translation.
pub fn yaw_pose(yaw_deg: f64, translation: [f64; 3]) -> Pose {
    Pose::from_axis_angle(Vector3::y(), yaw_deg.to_radians(), Vector3::from(translation))
        .expect("y axis is a valid rotation axis")
}

/// Circular camera path around a pivot: at yaw `a` the camera sits at
/// `center - radius·(sin a, 0, cos a)`, looking at the pivot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub center: [f64; 3],
    pub radius: f64,
}

/// Camera path: frame `i` sits at `start + i·step` (plus seeded jitter)
/// with yaw `start_yaw + i·yaw_step`. With an `orbit`, the orbit position
/// for that yaw is added to the position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub frames: usize,
    #[serde(default)]
    pub start: [f64; 3],
    #[serde(default)]
    pub start_yaw_deg: f64,
    #[serde(default)]
    pub step: [f64; 3],
    #[serde(default)]
    pub yaw_step_deg: f64,
    /// Uniform position noise amplitude per axis, millimeters.
    #[serde(default)]
    pub jitter_mm: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub orbit: Option<Orbit>,
}

impl Trajectory {
    pub fn poses(&self) -> Vec<Pose> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.frames)
            .map(|i| {
                let f = i as f64;
                let yaw = self.start_yaw_deg + f * self.yaw_step_deg;
                let base = match self.orbit {
                    Some(o) => {
                        let a = yaw.to_radians();
                        [
                            o.center[0] - o.radius * a.sin(),
                            o.center[1],
                            o.center[2] - o.radius * a.cos(),
                        ]
                    }
                    None => [0.0; 3],
                };
                let mut t = [0.0; 3];
                for a in 0..3 {
                    t[a] = base[a] + self.start[a] + f * self.step[a];
                    if self.jitter_mm > 0.0 {
                        t[a] += rng.random_range(-self.jitter_mm..=self.jitter_mm);
                    }
                }
                yaw_pose(yaw, t)
            })
            .collect()
    }
}

/// Camera intrinsics as written in a scene description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicsSpec {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// Full synthetic sequence description (TOML).
///
/// ```toml
/// width = 128
/// height = 128
///
/// [intrinsics]
/// fx = 120.0
/// fy = 120.0
/// cx = 63.5
/// cy = 63.5
///
/// [trajectory]
/// frames = 20
/// step = [20.0, 0.0, 0.0]
///
/// [[objects]]
/// kind = "plane"
/// point = [0.0, 0.0, 2000.0]
/// normal = [0.0, 0.0, -1.0]
/// period = 150.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub width: usize,
    pub height: usize,
    pub intrinsics: IntrinsicsSpec,
    pub trajectory: Trajectory,
    pub objects: Vec<Primitive>,
}

impl SynthConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SynthConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("width and height must be positive".into()));
        }
        if let Some(o) = self.trajectory.orbit {
            if !(o.radius >= 0.0 && o.radius.is_finite()) {
                return Err(Error::Config(format!("orbit radius {} must be >= 0", o.radius)));
            }
        }
        if self.trajectory.frames == 0 {
            return Err(Error::Config("trajectory needs at least one frame".into()));
        }
        self.intrinsics()?;
        self.scene().map(|_| ())
    }

    pub fn intrinsics(&self) -> Result<Intrinsics> {
        let s = self.intrinsics;
        Intrinsics::new(s.fx, s.fy, s.cx, s.cy)
    }

    pub fn scene(&self) -> Result<AnalyticScene> {
        AnalyticScene::new(self.objects.clone())
    }

    /// Renders every frame of the trajectory.
    pub fn render_frames(&self) -> Result<Vec<(Image, DepthMap, Pose)>> {
        let scene = self.scene()?;
        let k = self.intrinsics()?;
        Ok(self
            .trajectory
            .poses()
            .into_iter()
            .map(|pose| {
                let (img, depth) = render(&scene, &pose, &k, self.width, self.height);
                (img, depth, pose)
            })
            .collect())
    }
}
