//! Frame-pair datasets on disk.
//!
//! Two layouts are understood, selected by [`Profile`]:
//!
//! ```text
//! PIV3CAMS-style                 KITTI-odometry-style
//! <scene>/                       <sequence>/
//!   calib.txt   K: fx fy cx cy     calib.txt   K: line, or P2:/P0: 3x4 rows
//!   pose.txt    12 values/line     poses.txt   12 values/line, meters
//!   rgb/000000.png                 image_2/000000.png
//!   depth/000000.png  (mm)         depth/000000.png  (1/256 m)
//! ```
//!
//! Poses are camera-to-world transforms in a right-handed, y-down, z-forward
//! frame. Image and depth files are matched by sorted file name.

mod formats;

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image};

pub use formats::{
    format_calibration, format_pose_line, load_calibration, load_color_image, load_depth_png,
    load_mask_png, load_pose_file, load_pose_file_report, parse_calibration, parse_poses,
    save_color_image, save_depth_png, save_mask_png, save_pose_file, Calibration, ParsedPoses,
};

/// Crop side used for all frames by default.
pub const DEFAULT_CROP: usize = 256;
/// Maximum frame distance between paired frames by default.
pub const DEFAULT_MAX_DISTANCE: usize = 3;

/// Dataset conventions: directory layout and units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Piv3cams,
    Kitti,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Piv3cams => "piv3cams",
            Profile::Kitti => "kitti",
        }
    }

    /// Millimeters represented by one raw depth-PNG unit.
    pub fn depth_mm_per_unit(&self) -> f64 {
        match self {
            Profile::Piv3cams => 1.0,
            Profile::Kitti => 1000.0 / 256.0,
        }
    }

    /// Millimeters represented by one pose-file translation unit.
    pub fn pose_mm_per_unit(&self) -> f64 {
        match self {
            Profile::Piv3cams => 1.0,
            Profile::Kitti => 1000.0,
        }
    }

    pub fn image_dir(&self) -> &'static str {
        match self {
            Profile::Piv3cams => "rgb",
            Profile::Kitti => "image_2",
        }
    }

    pub fn depth_dir(&self) -> &'static str {
        "depth"
    }

    pub fn pose_file(&self) -> &'static str {
        match self {
            Profile::Piv3cams => "pose.txt",
            Profile::Kitti => "poses.txt",
        }
    }

    pub fn calib_file(&self) -> &'static str {
        "calib.txt"
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "piv3cams" => Ok(Profile::Piv3cams),
            "kitti" => Ok(Profile::Kitti),
            other => Err(Error::InvalidValue(format!(
                "unknown dataset profile {other:?} (expected piv3cams or kitti)"
            ))),
        }
    }
}

/// Grids that can be cut to a sub-window.
pub trait Crop: Sized {
    fn dims(&self) -> (usize, usize);
    fn crop_window(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self>;
}

impl Crop for Image {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }
    fn crop_window(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        self.crop(x0, y0, w, h)
    }
}

impl Crop for DepthMap {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }
    fn crop_window(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        self.crop(x0, y0, w, h)
    }
}

/// Top-left corner of a centered `side x side` window.
pub fn center_crop_offset(width: usize, height: usize, side: usize) -> Result<(usize, usize)> {
    if width < side || height < side {
        return Err(Error::shape(format!(
            "cannot center-crop {width}x{height} to {side}x{side}"
        )));
    }
    Ok(((width - side) / 2, (height - side) / 2))
}

/// Center-crops a grid and shifts the principal point by the crop offset.
pub fn center_crop<T: Crop>(grid: &T, side: usize, k: &Intrinsics) -> Result<(T, Intrinsics)> {
    let (w, h) = grid.dims();
    let (x0, y0) = center_crop_offset(w, h, side)?;
    Ok((
        grid.crop_window(x0, y0, side, side)?,
        k.shifted(x0 as f64, y0 as f64),
    ))
}

/// One frame's on-disk record.
#[derive(Debug, Clone)]
pub struct FrameRecord {
    pub image_path: PathBuf,
    pub depth_path: Option<PathBuf>,
    /// Camera-to-world pose in millimeters.
    pub pose: Pose,
}

/// A loaded frame.
#[derive(Debug, Clone)]
pub struct Frame {
    pub index: usize,
    pub image: Image,
    pub depth: Option<DepthMap>,
    pub pose: Pose,
}

/// Source and target frames with their relative motion.
#[derive(Debug, Clone)]
pub struct FramePair {
    pub scene_id: String,
    pub src: Frame,
    pub tgt: Frame,
    /// `invert(pose_src) ∘ pose_tgt`: the target camera expressed in the
    /// source camera frame. As a point map it takes target-camera
    /// coordinates to source-camera coordinates.
    pub relative_pose: Pose,
    /// `tgt.index - src.index`; negative when the target precedes the source.
    pub frame_distance: i64,
    pub intrinsics: Intrinsics,
}

impl FramePair {
    /// Point map from target to source camera coordinates.
    pub fn tgt_to_src(&self) -> Pose {
        self.relative_pose
    }

    /// Point map from source to target camera coordinates.
    pub fn src_to_tgt(&self) -> Pose {
        self.relative_pose.inverse()
    }

    /// Stable identifier used for output file names.
    pub fn stem(&self) -> String {
        format!("{}_{:06}_{:06}", self.scene_id, self.src.index, self.tgt.index)
    }
}

/// `invert(pose_src) ∘ pose_tgt`.
pub fn relative_pose(pose_src: &Pose, pose_tgt: &Pose) -> Pose {
    pose_src.inverse().compose(pose_tgt)
}

/// Validated listing of one scene directory.
#[derive(Debug, Clone)]
pub struct SceneIndex {
    pub id: String,
    pub root: PathBuf,
    pub profile: Profile,
    pub intrinsics: Intrinsics,
    pub frames: Vec<FrameRecord>,
    /// Non-fatal findings (repaired poses, unknown calibration keys, ...).
    pub warnings: Vec<String>,
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        if matches!(ext.as_deref(), Some("png" | "jpg" | "jpeg")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

impl SceneIndex {
    /// Reads calibration and poses and lists image/depth files. Depth files
    /// are optional as a directory, but when present their count must match.
    pub fn open(root: impl AsRef<Path>, profile: Profile) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let id = root
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("scene")
            .to_string();
        let mut warnings = Vec::new();

        let calib = load_calibration(root.join(profile.calib_file()), profile)?;
        for key in &calib.ignored_keys {
            warnings.push(format!("calib: ignored key {key:?}"));
        }
        let parsed = load_pose_file_report(root.join(profile.pose_file()), profile)?;
        for i in &parsed.repaired {
            warnings.push(format!("pose {i}: rotation re-orthonormalized"));
        }

        let images = list_images(&root.join(profile.image_dir()))?;
        let depth_dir = root.join(profile.depth_dir());
        let depths = if depth_dir.is_dir() {
            Some(list_images(&depth_dir)?)
        } else {
            warnings.push("no depth directory".into());
            None
        };

        if images.len() != parsed.poses.len() {
            return Err(Error::Scene(format!(
                "{}: {} images but {} poses",
                root.display(),
                images.len(),
                parsed.poses.len()
            )));
        }
        if let Some(d) = &depths {
            if d.len() != images.len() {
                return Err(Error::Scene(format!(
                    "{}: {} images but {} depth maps",
                    root.display(),
                    images.len(),
                    d.len()
                )));
            }
        }

        let frames = images
            .into_iter()
            .enumerate()
            .map(|(i, image_path)| FrameRecord {
                image_path,
                depth_path: depths.as_ref().map(|d| d[i].clone()),
                pose: parsed.poses[i],
            })
            .collect();

        Ok(Self {
            id,
            root,
            profile,
            intrinsics: calib.intrinsics,
            frames,
            warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    fn record(&self, index: usize) -> Result<&FrameRecord> {
        self.frames
            .get(index)
            .ok_or_else(|| Error::Scene(format!("frame {index} out of range (scene has {})", self.len())))
    }

    /// Intrinsics after an optional center crop of a `width x height` frame.
    pub fn intrinsics_for(&self, width: usize, height: usize, crop: Option<usize>) -> Result<Intrinsics> {
        match crop {
            Some(side) => {
                let (x0, y0) = center_crop_offset(width, height, side)?;
                Ok(self.intrinsics.shifted(x0 as f64, y0 as f64))
            }
            None => Ok(self.intrinsics),
        }
    }

    /// Loads one color image, optionally center-cropped, with matching intrinsics.
    pub fn load_image(&self, index: usize, crop: Option<usize>) -> Result<(Image, Intrinsics)> {
        let image = load_color_image(&self.record(index)?.image_path)?;
        match crop {
            Some(side) => center_crop(&image, side, &self.intrinsics),
            None => Ok((image, self.intrinsics)),
        }
    }

    /// Loads one depth map (if the scene has depth), optionally center-cropped.
    pub fn load_depth(&self, index: usize, crop: Option<usize>) -> Result<Option<DepthMap>> {
        let Some(path) = &self.record(index)?.depth_path else {
            return Ok(None);
        };
        let depth = load_depth_png(path, self.profile)?;
        Ok(Some(match crop {
            Some(side) => center_crop(&depth, side, &self.intrinsics)?.0,
            None => depth,
        }))
    }

    /// Loads one frame, optionally center-cropped, and the matching intrinsics.
    pub fn load_frame(&self, index: usize, crop: Option<usize>) -> Result<(Frame, Intrinsics)> {
        let (image, k) = self.load_image(index, crop)?;
        let depth = self.load_depth(index, crop)?;
        if let Some(d) = &depth {
            if d.width() != image.width() || d.height() != image.height() {
                return Err(Error::shape(format!(
                    "frame {index}: image {}x{} vs depth {}x{}",
                    image.width(),
                    image.height(),
                    d.width(),
                    d.height()
                )));
            }
        }
        Ok((
            Frame {
                index,
                image,
                depth,
                pose: self.frames[index].pose,
            },
            k,
        ))
    }

    /// Loads two frames as a pair.
    pub fn pair(&self, src: usize, tgt: usize, crop: Option<usize>) -> Result<FramePair> {
        if src == tgt {
            return Err(Error::Scene(format!("pair ({src}, {tgt}) has zero frame distance")));
        }
        let (src_frame, k) = self.load_frame(src, crop)?;
        let (tgt_frame, _) = self.load_frame(tgt, crop)?;
        Ok(FramePair {
            scene_id: self.id.clone(),
            relative_pose: relative_pose(&src_frame.pose, &tgt_frame.pose),
            frame_distance: tgt as i64 - src as i64,
            src: src_frame,
            tgt: tgt_frame,
            intrinsics: k,
        })
    }
}

/// Draws `(src, tgt)` index pairs. The signed distance is uniform over
/// `{-max..-1, 1..max}` and the source index is then uniform over the
/// positions where the target stays inside the sequence.
pub fn sample_pair_indices(
    n_frames: usize,
    max_distance: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    if max_distance == 0 {
        return Err(Error::InvalidValue("max_distance must be >= 1".into()));
    }
    if n_frames <= max_distance {
        return Err(Error::Scene(format!(
            "scene has {n_frames} frames, needs more than max_distance = {max_distance}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = max_distance as i64;
    let n = n_frames as i64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.random_range(0..2 * m);
        let d = if k < m { k - m } else { k - m + 1 };
        let (lo, hi) = if d > 0 { (0, n - d) } else { (-d, n) };
        let src = rng.random_range(lo..hi);
        out.push((src as usize, (src + d) as usize));
    }
    Ok(out)
}

/// Samples and loads frame pairs from a scene; deterministic in `seed`.
pub fn sample_pairs(
    scene: &SceneIndex,
    max_distance: usize,
    count: usize,
    seed: u64,
    crop: Option<usize>,
) -> Result<Vec<FramePair>> {
    sample_pair_indices(scene.len(), max_distance, count, seed)?
        .into_iter()
        .map(|(s, t)| scene.pair(s, t, crop))
        .collect()
}

/// Writes frames in the profile's layout. `frames` holds image, depth and
/// camera-to-world pose per frame.
pub fn write_scene(
    root: impl AsRef<Path>,
    profile: Profile,
    k: &Intrinsics,
    frames: &[(Image, DepthMap, Pose)],
) -> Result<()> {
    let root = root.as_ref();
    let img_dir = root.join(profile.image_dir());
    let depth_dir = root.join(profile.depth_dir());
    for dir in [&img_dir, &depth_dir] {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let calib_path = root.join(profile.calib_file());
    fs::write(&calib_path, format_calibration(k)).map_err(|e| Error::io(&calib_path, e))?;
    for (i, (img, depth, _)) in frames.iter().enumerate() {
        save_color_image(img, img_dir.join(format!("{i:06}.png")))?;
        save_depth_png(depth, depth_dir.join(format!("{i:06}.png")), profile)?;
    }
    let poses: Vec<Pose> = frames.iter().map(|f| f.2).collect();
    save_pose_file(&poses, root.join(profile.pose_file()), profile)
}
