//! On-disk formats: 16-bit depth PNGs, 8-bit color and mask PNGs, pose text
//! files and calibration text files.

use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use nalgebra::{Matrix3, Vector3};

use super::Profile;
use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image, Mask};

fn image_err(path: &Path, source: image::ImageError) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads a single-channel 16-bit PNG. Raw values are multiplied by the
/// profile's millimeters-per-unit; 0 stays 0 (missing).
pub fn load_depth_png(path: impl AsRef<Path>, profile: Profile) -> Result<DepthMap> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| image_err(path, e))?;
    let DynamicImage::ImageLuma16(buf) = img else {
        return Err(format_err(
            path,
            format!("depth must be 16-bit single-channel, found {:?}", img.color()),
        ));
    };
    let scale = profile.depth_mm_per_unit();
    let (w, h) = buf.dimensions();
    let data = buf.into_raw().into_iter().map(|v| v as f64 * scale).collect();
    DepthMap::new(w as usize, h as usize, data)
}

/// Writes depth as a 16-bit PNG in the profile's units, rounding to the
/// nearest unit. Depths beyond the 16-bit range are an error.
pub fn save_depth_png(depth: &DepthMap, path: impl AsRef<Path>, profile: Profile) -> Result<()> {
    let path = path.as_ref();
    let scale = profile.depth_mm_per_unit();
    let mut raw = Vec::with_capacity(depth.data().len());
    for d in depth.data() {
        let units = (d / scale).round();
        if units > u16::MAX as f64 {
            return Err(Error::InvalidValue(format!(
                "{}: depth {d} mm exceeds the 16-bit range of profile {}",
                path.display(),
                profile.name()
            )));
        }
        raw.push(units as u16);
    }
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(depth.width() as u32, depth.height() as u32, raw)
            .expect("buffer length matches dimensions");
    buf.save(path).map_err(|e| image_err(path, e))
}

/// Reads an 8-bit color or grayscale PNG/JPEG as a 3-channel image in `[0, 1]`.
pub fn load_color_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| image_err(path, e))?;
    let rgb = match img {
        DynamicImage::ImageRgb8(b) => b,
        DynamicImage::ImageRgba8(_) | DynamicImage::ImageLuma8(_) | DynamicImage::ImageLumaA8(_) => {
            img.to_rgb8()
        }
        other => {
            return Err(format_err(
                path,
                format!("color images must be 8-bit, found {:?}", other.color()),
            ))
        }
    };
    let (w, h) = rgb.dimensions();
    let data = rgb.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
    Image::new(w as usize, h as usize, 3, data)
}

/// Writes an image as 8-bit PNG (gray for 1 channel, RGB for 3).
pub fn save_color_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = img.data().iter().map(|v| to_u8(*v)).collect();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let res = if img.channels() == 1 {
        ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw)
            .expect("buffer length matches dimensions")
            .save(path)
    } else {
        ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw)
            .expect("buffer length matches dimensions")
            .save(path)
    };
    res.map_err(|e| image_err(path, e))
}

/// Writes a mask as 8-bit grayscale (weight 1 is 255).
pub fn save_mask_png(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = mask.data().iter().map(|v| to_u8(*v)).collect();
    ImageBuffer::<Luma<u8>, _>::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("buffer length matches dimensions")
        .save(path)
        .map_err(|e| image_err(path, e))
}

/// Reads an 8-bit grayscale mask; values are divided by 255.
pub fn load_mask_png(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| image_err(path, e))?;
    let DynamicImage::ImageLuma8(buf) = img else {
        return Err(format_err(
            path,
            format!("masks must be 8-bit grayscale, found {:?}", img.color()),
        ));
    };
    let (w, h) = buf.dimensions();
    let data = buf.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
    Mask::new(w as usize, h as usize, data)
}

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Poses parsed from a pose file.
#[derive(Debug, Clone)]
pub struct ParsedPoses {
    pub poses: Vec<Pose>,
    /// Zero-based indices of poses whose rotation was re-orthonormalized.
    pub repaired: Vec<usize>,
}

/// Parses one pose per non-empty line: 12 whitespace-separated numbers, the
/// row-major `[R | t]` matrix. Lines starting with `#` are comments.
/// Translations are converted to millimeters per the profile.
pub fn parse_poses(text: &str, profile: Profile, path: &Path) -> Result<ParsedPoses> {
    let mut poses = Vec::new();
    let mut repaired = Vec::new();
    let to_mm = profile.pose_mm_per_unit();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason,
        };
        let values = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|e| parse_err(format!("{tok:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != 12 {
            return Err(parse_err(format!("expected 12 values, found {}", values.len())));
        }
        let r = Matrix3::new(
            values[0], values[1], values[2], values[4], values[5], values[6], values[8], values[9],
            values[10],
        );
        let t = Vector3::new(values[3], values[7], values[11]) * to_mm;
        let (pose, fixed) = Pose::from_parsed(r, t).map_err(|e| parse_err(e.to_string()))?;
        if fixed {
            repaired.push(poses.len());
        }
        poses.push(pose);
    }
    Ok(ParsedPoses { poses, repaired })
}

pub fn load_pose_file(path: impl AsRef<Path>, profile: Profile) -> Result<Vec<Pose>> {
    Ok(load_pose_file_report(path, profile)?.poses)
}

pub fn load_pose_file_report(path: impl AsRef<Path>, profile: Profile) -> Result<ParsedPoses> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_poses(&text, profile, path)
}

/// One pose-file line in the profile's units. Uses shortest round-trip
/// float formatting.
pub fn format_pose_line(pose: &Pose, profile: Profile) -> String {
    let mut v = pose.to_row_major();
    let to_mm = profile.pose_mm_per_unit();
    for i in [3, 7, 11] {
        v[i] /= to_mm;
    }
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

pub fn save_pose_file(poses: &[Pose], path: impl AsRef<Path>, profile: Profile) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for p in poses {
        text.push_str(&format_pose_line(p, profile));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parsed calibration plus keys that were present but not understood.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub intrinsics: Intrinsics,
    pub ignored_keys: Vec<String>,
}

/// Parses `KEY: values` lines. `K: fx fy cx cy` is authoritative; with the
/// KITTI profile a 3x4 `P2:` (or `P0:`) projection matrix is accepted when
/// no `K:` line exists.
pub fn parse_calibration(text: &str, profile: Profile, path: &Path) -> Result<Calibration> {
    let mut k_line = None;
    let mut projections: Vec<(String, Vec<f64>, usize)> = Vec::new();
    let mut ignored_keys = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason,
        };
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err("expected `KEY: values`".into()))?;
        let key = key.trim();
        let parse_values = || {
            rest.split_whitespace()
                .map(|tok| tok.parse::<f64>().map_err(|e| parse_err(format!("{tok:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
        };
        match key {
            "K" => {
                let v = parse_values()?;
                if v.len() != 4 {
                    return Err(parse_err(format!("K needs 4 values (fx fy cx cy), found {}", v.len())));
                }
                if k_line.is_some() {
                    return Err(parse_err("duplicate K line".into()));
                }
                k_line = Some((v, lineno + 1));
            }
            "P0" | "P1" | "P2" | "P3" if profile == Profile::Kitti => {
                projections.push((key.to_string(), parse_values()?, lineno + 1));
            }
            other => ignored_keys.push(other.to_string()),
        }
    }

    let intrinsics = if let Some((v, line)) = k_line {
        Intrinsics::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: e.to_string(),
        })?
    } else {
        let pick = ["P2", "P0"]
            .iter()
            .find_map(|want| projections.iter().find(|(k, _, _)| k == want));
        let Some((_, p, line)) = pick else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                reason: "no `K:` line found".into(),
            });
        };
        if p.len() != 12 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                reason: format!("projection matrix needs 12 values, found {}", p.len()),
            });
        }
        let k = Matrix3::new(p[0], p[1], p[2], p[4], p[5], p[6], p[8], p[9], p[10]);
        Intrinsics::from_matrix(&k).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            reason: e.to_string(),
        })?
    };
    Ok(Calibration {
        intrinsics,
        ignored_keys,
    })
}

pub fn load_calibration(path: impl AsRef<Path>, profile: Profile) -> Result<Calibration> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_calibration(&text, profile, path)
}

pub fn format_calibration(k: &Intrinsics) -> String {
    format!("K: {:?} {:?} {:?} {:?}\n", k.fx(), k.fy(), k.cx(), k.cy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("test.txt")
    }

    #[test]
    fn identity_pose_line() {
        let parsed = parse_poses("1 0 0 0 0 1 0 0 0 0 1 0\n", Profile::Piv3cams, &p()).unwrap();
        assert_eq!(parsed.poses, vec![Pose::identity()]);
        assert!(parsed.repaired.is_empty());
    }

    #[test]
    fn translation_units_per_profile() {
        let line = "1 0 0 1.5 0 1 0 -2 0 0 1 0.25\n";
        let piv = parse_poses(line, Profile::Piv3cams, &p()).unwrap().poses[0];
        assert_eq!(piv.translation(), &Vector3::new(1.5, -2.0, 0.25));
        assert_eq!(piv.rotation(), &Matrix3::identity());
        let kitti = parse_poses(line, Profile::Kitti, &p()).unwrap().poses[0];
        assert_eq!(kitti.translation(), &Vector3::new(1500.0, -2000.0, 250.0));
    }

    #[test]
    fn malformed_pose_lines() {
        let err = parse_poses("1 0 0 0 0 1 0 0 0 0 1\n", Profile::Piv3cams, &p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_poses("# c\n\n1 0 0 0 0 1 0 0 0 0 1 x\n", Profile::Piv3cams, &p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_poses("2 0 0 0 0 1 0 0 0 0 1 0\n", Profile::Piv3cams, &p()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn kitti_style_precision_is_repaired() {
        // 7 significant digits, as printed in KITTI ground-truth poses
        let line = "9.999978e-01 5.272628e-04 -2.066935e-03 -4.690294e-02 -5.296506e-04 9.999992e-01 -1.154865e-03 -2.839928e-02 2.066324e-03 1.155958e-03 9.999971e-01 8.586941e-01";
        let parsed = parse_poses(line, Profile::Kitti, &p()).unwrap();
        assert_eq!(parsed.repaired, vec![0]);
    }

    #[test]
    fn calibration_k_line() {
        let c = parse_calibration("K: 500 510 320.5 240\nsize: 640 480\n", Profile::Piv3cams, &p()).unwrap();
        assert_eq!(c.intrinsics, Intrinsics::new(500.0, 510.0, 320.5, 240.0).unwrap());
        assert_eq!(c.ignored_keys, vec!["size".to_string()]);
        assert!(parse_calibration("K: 500 510 320\n", Profile::Piv3cams, &p()).is_err());
        assert!(parse_calibration("foo\n", Profile::Piv3cams, &p()).is_err());
        assert!(parse_calibration("", Profile::Piv3cams, &p()).is_err());
    }

    #[test]
    fn calibration_kitti_projection() {
        let text = "P0: 718.856 0 607.1928 0 0 718.856 185.2157 0 0 0 1 0\n\
                    P2: 718.856 0 607.1928 45.38225 0 718.856 185.2157 -0.1130887 0 0 1 0.003779761\n";
        let c = parse_calibration(text, Profile::Kitti, &p()).unwrap();
        assert_eq!(c.intrinsics, Intrinsics::new(718.856, 718.856, 607.1928, 185.2157).unwrap());
        assert!(c.ignored_keys.is_empty());
        let skew = "P2: 718.856 1.0 607.1928 0 0 718.856 185.2157 0 0 0 1 0\n";
        assert!(parse_calibration(skew, Profile::Kitti, &p()).is_err());
        // projection lines are not understood by the PIV3CAMS profile
        assert!(parse_calibration(text, Profile::Piv3cams, &p()).is_err());
    }
}
