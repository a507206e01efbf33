//! Binary morphology on visibility masks.
//!
//! Square structuring elements are separable, so each operator is a row pass
//! followed by a column pass with a sliding count. Dilation treats pixels
//! outside the grid as unset and erosion treats them as set, which keeps
//! closing extensive at the borders.

use crate::raster::Mask;

/// Default half-width of the closing element (3x3).
pub const DEFAULT_DENSIFY_RADIUS: usize = 1;

/// Morphological closing (dilation then erosion) with a `(2r+1)x(2r+1)`
/// square. Pixels with nonzero weight count as set; the result is binary.
pub fn densify_mask(mask: &Mask, radius: usize) -> Mask {
    let (w, h) = (mask.width(), mask.height());
    let bits: Vec<bool> = mask.data().iter().map(|v| *v > 0.0).collect();
    let closed = erode(&dilate(&bits, w, h, radius), w, h, radius);
    Mask::from_raw_unchecked(
        w,
        h,
        closed.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect(),
    )
}

pub fn dilate(bits: &[bool], width: usize, height: usize, radius: usize) -> Vec<bool> {
    let rows = sweep(bits, width, height, radius, Axis::Row, |set, _| set > 0);
    sweep(&rows, width, height, radius, Axis::Column, |set, _| set > 0)
}

pub fn erode(bits: &[bool], width: usize, height: usize, radius: usize) -> Vec<bool> {
    let rows = sweep(bits, width, height, radius, Axis::Row, |set, n| set == n);
    sweep(&rows, width, height, radius, Axis::Column, |set, n| set == n)
}

#[derive(Clone, Copy)]
enum Axis {
    Row,
    Column,
}

/// Slides a `2r+1` window along one axis; `keep(set, in_bounds)` decides the
/// output from the number of set pixels and the number of in-bounds pixels.
fn sweep(
    bits: &[bool],
    width: usize,
    height: usize,
    radius: usize,
    axis: Axis,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<bool> {
    let mut out = vec![false; bits.len()];
    let (lines, len) = match axis {
        Axis::Row => (height, width),
        Axis::Column => (width, height),
    };
    let index = |line: usize, pos: usize| match axis {
        Axis::Row => line * width + pos,
        Axis::Column => pos * width + line,
    };
    for line in 0..lines {
        let mut set = 0usize;
        // window [lo, hi) over in-bounds positions
        let (mut lo, mut hi) = (0usize, 0usize);
        for pos in 0..len {
            let want_lo = pos.saturating_sub(radius);
            let want_hi = (pos + radius + 1).min(len);
            while hi < want_hi {
                set += bits[index(line, hi)] as usize;
                hi += 1;
            }
            while lo < want_lo {
                set -= bits[index(line, lo)] as usize;
                lo += 1;
            }
            out[index(line, pos)] = keep(set, hi - lo);
        }
    }
    out
}
