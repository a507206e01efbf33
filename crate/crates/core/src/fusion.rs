//! Pixelwise fusion of the warped (depth-branch) image with a pixel-branch
//! image.
//!
//! The predicted-mask rule weights the pixel branch by the mask, while the
//! visibility rule weights the warped image by the mask. Both polarities are
//! kept as-is. Masks are single-channel and broadcast over color channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Image, Mask};

/// Selects one of the fusion rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionRule {
    /// `(1 - m) · warped + m · pixel`
    PredictedMask,
    /// `(warped + pixel) / 2`
    Average,
    /// `vis · warped + (1 - vis) · pixel`
    Visibility,
}

impl FusionRule {
    pub fn name(&self) -> &'static str {
        match self {
            FusionRule::PredictedMask => "predicted-mask",
            FusionRule::Average => "average",
            FusionRule::Visibility => "visibility",
        }
    }

    /// Applies the rule. `mask` is required by the mask-based rules and
    /// ignored by [`FusionRule::Average`].
    pub fn apply(&self, warped: &Image, pixel: &Image, mask: Option<&Mask>) -> Result<Image> {
        let need_mask = || {
            mask.ok_or_else(|| Error::InvalidValue(format!("fusion rule {} needs a mask", self.name())))
        };
        match self {
            FusionRule::PredictedMask => fuse_predicted_mask(warped, pixel, need_mask()?),
            FusionRule::Average => fuse_average(warped, pixel),
            FusionRule::Visibility => fuse_visibility(warped, pixel, need_mask()?),
        }
    }
}

impl std::str::FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicted-mask" => Ok(FusionRule::PredictedMask),
            "average" => Ok(FusionRule::Average),
            "visibility" => Ok(FusionRule::Visibility),
            other => Err(Error::InvalidValue(format!(
                "unknown fusion rule {other:?} (expected predicted-mask, average or visibility)"
            ))),
        }
    }
}

pub fn fuse_predicted_mask(warped: &Image, pixel: &Image, mask: &Mask) -> Result<Image> {
    blend(warped, pixel, mask, |m| 1.0 - m)
}

pub fn fuse_average(warped: &Image, pixel: &Image) -> Result<Image> {
    warped.check_same_shape(pixel, "fuse_average")?;
    let data = warped
        .data()
        .iter()
        .zip(pixel.data())
        .map(|(w, p)| bounded(0.5 * w + 0.5 * p, *w, *p))
        .collect();
    Ok(Image::from_raw_unchecked(
        warped.width(),
        warped.height(),
        warped.channels(),
        data,
    ))
}

pub fn fuse_visibility(warped: &Image, pixel: &Image, vis: &Mask) -> Result<Image> {
    blend(warped, pixel, vis, |m| m)
}

fn blend(
    warped: &Image,
    pixel: &Image,
    mask: &Mask,
    warped_weight: impl Fn(f64) -> f64,
) -> Result<Image> {
    warped.check_same_shape(pixel, "fusion")?;
    if mask.width() != warped.width() || mask.height() != warped.height() {
        return Err(Error::shape(format!(
            "fusion: mask {}x{} vs images {}x{}",
            mask.width(),
            mask.height(),
            warped.width(),
            warped.height()
        )));
    }
    let c = warped.channels();
    let data = warped
        .data()
        .iter()
        .zip(pixel.data())
        .enumerate()
        .map(|(i, (w, p))| {
            let a = warped_weight(mask.data()[i / c]);
            bounded(a * w + (1.0 - a) * p, *w, *p)
        })
        .collect();
    Ok(Image::from_raw_unchecked(warped.width(), warped.height(), c, data))
}

/// Keeps rounding from leaving the segment between the two inputs.
#[inline]
fn bounded(v: f64, a: f64, b: f64) -> f64 {
    v.clamp(a.min(b), a.max(b))
}
