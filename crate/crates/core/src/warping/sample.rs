//! Bilinear resampling with a zero border.
//!
//! The sampled value is `Σ I(xs, ys) · max(0, 1 - |xs - u|) · max(0, 1 - |ys - v|)`
//! over all integer pixel positions; only the four neighbors of `(u, v)` carry
//! nonzero weight. Pixels outside the image contribute nothing.

use crate::camera::PixelCoord;
use crate::raster::Image;

/// True when the open 2x2 footprint around `at` overlaps the image grid.
#[inline]
pub fn footprint_intersects(width: usize, height: usize, at: PixelCoord) -> bool {
    at.u > -1.0 && at.u < width as f64 && at.v > -1.0 && at.v < height as f64
}

/// Writes the bilinear sample of every channel into `out` and returns whether
/// the footprint touched the image. `out` is zeroed when it did not.
pub fn bilinear_sample_into(img: &Image, at: PixelCoord, out: &mut [f64]) -> bool {
    let channels = img.channels();
    debug_assert_eq!(out.len(), channels);
    out.fill(0.0);
    if !footprint_intersects(img.width(), img.height(), at) {
        return false;
    }
    let x0 = at.u.floor();
    let y0 = at.v.floor();
    let ax = at.u - x0;
    let ay = at.v - y0;
    let (x0, y0) = (x0 as isize, y0 as isize);
    let (w, h) = (img.width() as isize, img.height() as isize);
    let data = img.data();

    for (dy, wy) in [(0, 1.0 - ay), (1, ay)] {
        let ys = y0 + dy;
        if ys < 0 || ys >= h || wy == 0.0 {
            continue;
        }
        for (dx, wx) in [(0, 1.0 - ax), (1, ax)] {
            let xs = x0 + dx;
            if xs < 0 || xs >= w || wx == 0.0 {
                continue;
            }
            let weight = wx * wy;
            let base = (ys as usize * img.width() + xs as usize) * channels;
            for (o, v) in out.iter_mut().zip(&data[base..base + channels]) {
                *o += weight * v;
            }
        }
    }
    true
}

/// Bilinear sample of every channel; zeros outside the image.
pub fn bilinear_sample(img: &Image, at: PixelCoord) -> Vec<f64> {
    let mut out = vec![0.0; img.channels()];
    bilinear_sample_into(img, at, &mut out);
    out
}

/// Analytic partial derivatives `(∂/∂u, ∂/∂v)` of [`bilinear_sample`] per
/// channel. At integer coordinates, where the sampler has a kink, the
/// one-sided derivative from the right is returned.
pub fn bilinear_gradient(img: &Image, at: PixelCoord) -> (Vec<f64>, Vec<f64>) {
    let channels = img.channels();
    let mut du = vec![0.0; channels];
    let mut dv = vec![0.0; channels];
    if !footprint_intersects(img.width(), img.height(), at) {
        return (du, dv);
    }
    let x0 = at.u.floor();
    let y0 = at.v.floor();
    let ax = at.u - x0;
    let ay = at.v - y0;
    let (x0, y0) = (x0 as isize, y0 as isize);
    let (w, h) = (img.width() as isize, img.height() as isize);

    let fetch = |x: isize, y: isize, c: usize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            img.get(x as usize, y as usize, c)
        }
    };

    for c in 0..channels {
        let i00 = fetch(x0, y0, c);
        let i10 = fetch(x0 + 1, y0, c);
        let i01 = fetch(x0, y0 + 1, c);
        let i11 = fetch(x0 + 1, y0 + 1, c);
        du[c] = (1.0 - ay) * (i10 - i00) + ay * (i11 - i01);
        dv[c] = (1.0 - ax) * (i01 - i00) + ax * (i11 - i10);
    }
    (du, dv)
}
