//! Geometric core of depth-based novel view synthesis.
//!
//! The crate covers the deterministic parts of an RGB-D view-synthesis
//! pipeline:
//!
//! - [`camera`]: pinhole intrinsics, rigid poses, projection and
//!   back-projection, latent point-set transforms.
//! - [`warping`]: bilinear sampling, inverse warping through a target depth
//!   map, forward warping with a z-buffer, visibility masks and their
//!   morphological densification.
//! - [`fusion`]: the pixelwise rules that merge a warped image with a
//!   pixel-branch prediction.
//! - [`metrics`]: L1 and SSIM, plus the loss formulas over supplied values.
//! - [`dataset`]: PIV3CAMS-style and KITTI-style scene layouts, 16-bit depth
//!   PNGs, pose and calibration files, center cropping and pair sampling.
//! - [`synthetic`]: analytic checker-textured scenes with exact depth.
//! - [`pipeline`]: batch warping, evaluation, dataset synthesis and mask
//!   densification, as used by the `viewsynth` binary.
//!
//! Depths and translations are in millimeters; images are `[0, 1]` floats.
//! See the `examples/` directory for one runnable program per capability.

pub mod camera;
pub mod dataset;
pub mod error;
pub mod fusion;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod synthetic;
pub mod warping;

pub use camera::{transform_latent, Intrinsics, PixelCoord, Point3, Pose};
pub use error::{Error, Result};
pub use fusion::{fuse_average, fuse_predicted_mask, fuse_visibility, FusionRule};
pub use metrics::{l1_error, ssim, SsimParams};
pub use raster::{DepthMap, Image, Mask, VisibilityMask};
pub use warping::{
    bilinear_sample, densify_mask, forward_warp_depth, inverse_warp, warp_from_source_depth,
};
