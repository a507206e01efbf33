//! Depth-based view warping.
//!
//! Inverse warping fills every target pixel by lifting it with the target
//! depth, moving it into the source camera and bilinearly sampling the source
//! image there. Forward warping splats every source pixel into the target
//! grid with a z-buffer, which yields a sparse target depth and the
//! visibility mask.

mod morphology;
mod sample;

use rayon::prelude::*;

use crate::camera::{Intrinsics, PixelCoord, Pose};
use crate::error::{Error, Result};
use crate::raster::{DepthMap, Image, Mask, VisibilityMask};

pub use morphology::{densify_mask, dilate, erode, DEFAULT_DENSIFY_RADIUS};
pub use sample::{bilinear_gradient, bilinear_sample, bilinear_sample_into, footprint_intersects};

/// Output of [`inverse_warp`].
#[derive(Debug, Clone)]
pub struct InverseWarp {
    pub image: Image,
    /// 1 where the target depth was valid, the point landed in front of the
    /// source camera and its footprint overlapped the source image.
    pub mask: Mask,
}

/// Output of [`forward_warp_depth`].
#[derive(Debug, Clone)]
pub struct ForwardWarp {
    /// Sparse target depth, 0 where nothing landed.
    pub depth: DepthMap,
    pub visibility: VisibilityMask,
}

/// Output of [`warp_from_source_depth`].
#[derive(Debug, Clone)]
pub struct SourceDepthWarp {
    pub image: Image,
    pub depth: DepthMap,
    pub visibility: VisibilityMask,
}

/// Warps `src` into the target view using the target's own depth.
///
/// `tgt_to_src` maps points from target camera coordinates to source camera
/// coordinates.
pub fn inverse_warp(
    src: &Image,
    tgt_depth: &DepthMap,
    tgt_to_src: &Pose,
    k: &Intrinsics,
) -> Result<InverseWarp> {
    if src.width() != tgt_depth.width() || src.height() != tgt_depth.height() {
        return Err(Error::shape(format!(
            "inverse_warp: source image {}x{} vs target depth {}x{}",
            src.width(),
            src.height(),
            tgt_depth.width(),
            tgt_depth.height()
        )));
    }
    let (w, h, c) = (src.width(), src.height(), src.channels());
    let mut out = vec![0.0; w * h * c];
    let mut mask = vec![0.0; w * h];

    out.par_chunks_mut(w * c.max(1))
        .zip(mask.par_chunks_mut(w.max(1)))
        .enumerate()
        .for_each(|(y, (row, mrow))| {
            for x in 0..w {
                let d = tgt_depth.get(x, y);
                if d <= 0.0 {
                    continue;
                }
                let p = k.backproject_unchecked(PixelCoord::new(x as f64, y as f64), d);
                let q = tgt_to_src.transform_point(&p);
                if !(q.z > 0.0) {
                    continue;
                }
                let at = k.project_unchecked(&q);
                if bilinear_sample_into(src, at, &mut row[x * c..(x + 1) * c]) {
                    mrow[x] = 1.0;
                }
            }
        });

    Ok(InverseWarp {
        image: Image::from_raw_unchecked(w, h, c, clamp_unit(out)),
        mask: Mask::from_raw_unchecked(w, h, mask),
    })
}

/// Splats valid source depths into the target view.
///
/// Each source pixel lands on the nearest integer target pixel. Collisions
/// keep the smallest depth; equal depths keep the earlier pixel in row-major
/// order. `src_to_tgt` maps source camera coordinates to target camera
/// coordinates.
pub fn forward_warp_depth(src_depth: &DepthMap, src_to_tgt: &Pose, k: &Intrinsics) -> ForwardWarp {
    let (w, h) = (src_depth.width(), src_depth.height());
    let mut depth = vec![0.0; w * h];
    let mut visibility = vec![0.0; w * h];

    for y in 0..h {
        for x in 0..w {
            let d = src_depth.get(x, y);
            if d <= 0.0 {
                continue;
            }
            let Some(idx) = splat_target(x, y, d, src_to_tgt, k, w, h) else {
                continue;
            };
            let (i, z) = idx;
            if visibility[i] == 0.0 || z < depth[i] {
                depth[i] = z;
                visibility[i] = 1.0;
            }
        }
    }

    ForwardWarp {
        depth: DepthMap::from_raw_unchecked(w, h, depth),
        visibility: Mask::from_raw_unchecked(w, h, visibility),
    }
}

/// Target index and depth of one splatted source pixel.
#[inline]
fn splat_target(
    x: usize,
    y: usize,
    d: f64,
    src_to_tgt: &Pose,
    k: &Intrinsics,
    w: usize,
    h: usize,
) -> Option<(usize, f64)> {
    let p = k.backproject_unchecked(PixelCoord::new(x as f64, y as f64), d);
    let q = src_to_tgt.transform_point(&p);
    if !(q.z > 0.0) {
        return None;
    }
    let at = k.project_unchecked(&q);
    let (tx, ty) = (at.u.round(), at.v.round());
    if !(tx >= 0.0 && ty >= 0.0 && tx < w as f64 && ty < h as f64) {
        return None;
    }
    Some((ty as usize * w + tx as usize, q.z))
}

/// Source-depth path: forward-warp the source depth, then inverse-warp the
/// source image through the resulting sparse target depth.
pub fn warp_from_source_depth(
    src: &Image,
    src_depth: &DepthMap,
    src_to_tgt: &Pose,
    k: &Intrinsics,
) -> Result<SourceDepthWarp> {
    if src.width() != src_depth.width() || src.height() != src_depth.height() {
        return Err(Error::shape(format!(
            "warp_from_source_depth: source image {}x{} vs source depth {}x{}",
            src.width(),
            src.height(),
            src_depth.width(),
            src_depth.height()
        )));
    }
    let fwd = forward_warp_depth(src_depth, src_to_tgt, k);
    let inv = inverse_warp(src, &fwd.depth, &src_to_tgt.inverse(), k)?;
    Ok(SourceDepthWarp {
        image: inv.image,
        depth: fwd.depth,
        visibility: fwd.visibility,
    })
}

// Convex combinations of [0,1] values can overshoot by an ulp.
fn clamp_unit(mut v: Vec<f64>) -> Vec<f64> {
    for x in &mut v {
        *x = x.clamp(0.0, 1.0);
    }
    v
}
