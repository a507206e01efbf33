//! Image metrics (mean absolute error, SSIM) and the training-loss formulas
//! evaluated over externally supplied values.
//!
//! All image metrics assume values normalized to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Image, Mask};

/// Mean absolute difference over all pixels and channels.
pub fn l1_error(x: &Image, y: &Image) -> Result<f64> {
    x.check_same_shape(y, "l1_error")?;
    if x.data().is_empty() {
        return Err(Error::shape("l1_error: empty images"));
    }
    let sum: f64 = x.data().iter().zip(y.data()).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / x.data().len() as f64)
}

/// Mean absolute difference restricted to pixels where `mask > 0`.
pub fn l1_error_masked(x: &Image, y: &Image, mask: &Mask) -> Result<f64> {
    x.check_same_shape(y, "l1_error_masked")?;
    if mask.width() != x.width() || mask.height() != x.height() {
        return Err(Error::shape(format!(
            "l1_error_masked: mask {}x{} vs images {}x{}",
            mask.width(),
            mask.height(),
            x.width(),
            x.height()
        )));
    }
    let c = x.channels();
    let mut sum = 0.0;
    let mut n = 0usize;
    for (i, m) in mask.data().iter().enumerate() {
        if *m > 0.0 {
            let a = &x.data()[i * c..(i + 1) * c];
            let b = &y.data()[i * c..(i + 1) * c];
            sum += a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum::<f64>();
            n += c;
        }
    }
    if n == 0 {
        return Err(Error::InvalidValue("l1_error_masked: mask selects no pixels".into()));
    }
    Ok(sum / n as f64)
}

/// Window weighting for SSIM statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SsimWeighting {
    Uniform,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsimParams {
    pub window: usize,
    pub c1: f64,
    pub c2: f64,
    pub weighting: SsimWeighting,
}

impl Default for SsimParams {
    /// 11x11 uniform window, `c1 = 0.01²`, `c2 = 0.03²`.
    fn default() -> Self {
        Self {
            window: 11,
            c1: 0.01 * 0.01,
            c2: 0.03 * 0.03,
            weighting: SsimWeighting::Uniform,
        }
    }
}

impl SsimParams {
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            weighting: SsimWeighting::Gaussian { sigma },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::InvalidValue(format!(
                "SSIM window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return Err(Error::InvalidValue("SSIM constants must be positive".into()));
        }
        if let SsimWeighting::Gaussian { sigma } = self.weighting {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidValue(format!("gaussian sigma {sigma} must be positive")));
            }
        }
        Ok(())
    }

    /// Normalized 1D kernel; the 2D window is its outer product.
    fn kernel(&self) -> Vec<f64> {
        let n = self.window;
        match self.weighting {
            SsimWeighting::Uniform => vec![1.0 / n as f64; n],
            SsimWeighting::Gaussian { sigma } => {
                let center = (n / 2) as f64;
                let raw: Vec<f64> = (0..n)
                    .map(|i| (-((i as f64 - center).powi(2)) / (2.0 * sigma * sigma)).exp())
                    .collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / total).collect()
            }
        }
    }
}

/// Mean SSIM over all fully contained windows (stride 1, no padding),
/// averaged over channels.
pub fn ssim(x: &Image, y: &Image, params: &SsimParams) -> Result<f64> {
    x.check_same_shape(y, "ssim")?;
    params.validate()?;
    if x.width() < params.window || x.height() < params.window {
        return Err(Error::ImageTooSmall {
            width: x.width(),
            height: x.height(),
            window: params.window,
        });
    }
    let channels = x.channels();
    let total: f64 = (0..channels)
        .map(|c| ssim_channel(x, y, c, params))
        .sum();
    Ok(total / channels as f64)
}

fn ssim_channel(x: &Image, y: &Image, c: usize, params: &SsimParams) -> f64 {
    let (w, h) = (x.width(), x.height());
    let kernel = params.kernel();
    let n = kernel.len();
    let (ow, oh) = (w - n + 1, h - n + 1);

    let xs: Vec<f64> = x.data().iter().skip(c).step_by(x.channels()).copied().collect();
    let ys: Vec<f64> = y.data().iter().skip(c).step_by(y.channels()).copied().collect();
    let xx: Vec<f64> = xs.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = ys.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| a * b).collect();

    let filter = |src: &[f64]| -> Vec<f64> {
        let mut rows = vec![0.0; ow * h];
        for r in 0..h {
            let line = &src[r * w..(r + 1) * w];
            for i in 0..ow {
                rows[r * ow + i] = kernel.iter().zip(&line[i..i + n]).map(|(k, v)| k * v).sum();
            }
        }
        let mut out = vec![0.0; ow * oh];
        for j in 0..oh {
            for i in 0..ow {
                out[j * ow + i] = kernel
                    .iter()
                    .enumerate()
                    .map(|(t, k)| k * rows[(j + t) * ow + i])
                    .sum();
            }
        }
        out
    };

    let mu_x = filter(&xs);
    let mu_y = filter(&ys);
    let e_xx = filter(&xx);
    let e_yy = filter(&yy);
    let e_xy = filter(&xy);

    let (c1, c2) = (params.c1, params.c2);
    let mut sum = 0.0;
    for i in 0..ow * oh {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = e_xx[i] - mx * mx;
        let vy = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        sum += ssim_window(mx, my, vx, vy, cov, c1, c2);
    }
    sum / (ow * oh) as f64
}

/// SSIM of one window from its moments.
#[inline]
pub fn ssim_window(mu_x: f64, mu_y: f64, var_x: f64, var_y: f64, cov: f64, c1: f64, c2: f64) -> f64 {
    ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
        / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2))
}

/// Sum of the L1 errors of the fused, warped and pixel-branch predictions.
pub fn recon_loss(pred: &Image, warped: &Image, pixel: &Image, tgt: &Image) -> Result<f64> {
    Ok(l1_error(pred, tgt)? + l1_error(warped, tgt)? + l1_error(pixel, tgt)?)
}

/// Least-squares generator loss for one discriminator score.
pub fn lsgan_loss(score: f64) -> f64 {
    (1.0 - score).powi(2)
}

/// Euclidean distance between two feature vectors.
pub fn perceptual_loss(f_tgt: &[f64], f_pixel: &[f64]) -> Result<f64> {
    if f_tgt.len() != f_pixel.len() {
        return Err(Error::shape(format!(
            "perceptual_loss: feature lengths {} vs {}",
            f_tgt.len(),
            f_pixel.len()
        )));
    }
    Ok(f_tgt
        .iter()
        .zip(f_pixel)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_l1: f64,
    pub lambda_gan: f64,
    pub lambda_vgg: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_l1: 10.0,
            lambda_gan: 2.0,
            lambda_vgg: 0.5,
        }
    }
}

impl LossWeights {
    pub fn new(lambda_l1: f64, lambda_gan: f64, lambda_vgg: f64) -> Result<Self> {
        for (name, v) in [("l1", lambda_l1), ("gan", lambda_gan), ("vgg", lambda_vgg)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidValue(format!("loss weight {name} = {v} must be >= 0")));
            }
        }
        Ok(Self {
            lambda_l1,
            lambda_gan,
            lambda_vgg,
        })
    }
}

pub fn total_loss(recon: f64, lsgan: f64, vgg: f64, w: &LossWeights) -> f64 {
    w.lambda_l1 * recon + w.lambda_gan * lsgan + w.lambda_vgg * vgg
}
