//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use viewsynth::metrics::{SsimParams, SsimWeighting};
use viewsynth::{Image, Intrinsics};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize, c: usize) -> Image {
    let data = (0..w * h * c).map(|_| rng.random::<f64>()).collect();
    Image::new(w, h, c, data).unwrap()
}

/// Sum over every pixel of the tent-weighted intensity, no shortcuts.
pub fn bilinear_oracle(img: &Image, u: f64, v: f64, c: usize) -> f64 {
    let mut acc = 0.0;
    for ys in 0..img.height() {
        for xs in 0..img.width() {
            let wx = (1.0 - (xs as f64 - u).abs()).max(0.0);
            let wy = (1.0 - (ys as f64 - v).abs()).max(0.0);
            acc += img.get(xs, ys, c) * wx * wy;
        }
    }
    acc
}

/// `K · [X Y Z]ᵀ / Z` by explicit matrix product.
pub fn project_oracle(k: &Intrinsics, p: [f64; 3]) -> (f64, f64) {
    let m = k.matrix();
    let h = [
        m[(0, 0)] * p[0] + m[(0, 1)] * p[1] + m[(0, 2)] * p[2],
        m[(1, 0)] * p[0] + m[(1, 1)] * p[1] + m[(1, 2)] * p[2],
        m[(2, 0)] * p[0] + m[(2, 1)] * p[1] + m[(2, 2)] * p[2],
    ];
    (h[0] / h[2], h[1] / h[2])
}

pub fn l1_oracle(x: &Image, y: &Image) -> f64 {
    let mut s = 0.0;
    for yy in 0..x.height() {
        for xx in 0..x.width() {
            for c in 0..x.channels() {
                s += (x.get(xx, yy, c) - y.get(xx, yy, c)).abs();
            }
        }
    }
    s / (x.width() * x.height() * x.channels()) as f64
}

/// 2D window weights built directly from the weighting definition.
fn window_weights(params: &SsimParams) -> Vec<Vec<f64>> {
    let n = params.window;
    let mut w = vec![vec![0.0; n]; n];
    let center = (n / 2) as f64;
    for (i, row) in w.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = match params.weighting {
                SsimWeighting::Uniform => 1.0,
                SsimWeighting::Gaussian { sigma } => {
                    let r2 = (i as f64 - center).powi(2) + (j as f64 - center).powi(2);
                    (-r2 / (2.0 * sigma * sigma)).exp()
                }
            };
        }
    }
    let total: f64 = w.iter().flatten().sum();
    w.iter_mut().flatten().for_each(|v| *v /= total);
    w
}

/// Per-window SSIM with moments accumulated in a fresh loop for every window.
pub fn ssim_oracle(x: &Image, y: &Image, params: &SsimParams) -> f64 {
    let n = params.window;
    let wts = window_weights(params);
    let mut per_channel = 0.0;
    for c in 0..x.channels() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for y0 in 0..=x.height() - n {
            for x0 in 0..=x.width() - n {
                let (mut mx, mut my) = (0.0, 0.0);
                for j in 0..n {
                    for i in 0..n {
                        mx += wts[j][i] * x.get(x0 + i, y0 + j, c);
                        my += wts[j][i] * y.get(x0 + i, y0 + j, c);
                    }
                }
                let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
                for j in 0..n {
                    for i in 0..n {
                        let dx = x.get(x0 + i, y0 + j, c) - mx;
                        let dy = y.get(x0 + i, y0 + j, c) - my;
                        vx += wts[j][i] * dx * dx;
                        vy += wts[j][i] * dy * dy;
                        cov += wts[j][i] * dx * dy;
                    }
                }
                sum += ((2.0 * mx * my + params.c1) * (2.0 * cov + params.c2))
                    / ((mx * mx + my * my + params.c1) * (vx + vy + params.c2));
                count += 1;
            }
        }
        per_channel += sum / count as f64;
    }
    per_channel / x.channels() as f64
}

/// SHA-256 of every file under `root`, keyed by relative path.
pub fn tree_hashes(root: &Path) -> BTreeMap<String, String> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let digest = Sha256::digest(fs::read(&p).unwrap());
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                out.insert(p.strip_prefix(root).unwrap().display().to_string(), hex);
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
