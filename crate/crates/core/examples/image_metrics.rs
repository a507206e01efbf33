//! L1 and SSIM between a textured image and noisy or shifted copies.
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use viewsynth::{l1_error, ssim, Image, SsimParams};

fn main() -> viewsynth::Result<()> {
    let base = Image::from_fn(64, 64, 3, |x, y, c| {
        0.5 + 0.3 * ((x as f64 * 0.25 + c as f64).sin() * (y as f64 * 0.2).cos())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let uniform = SsimParams::default();
    let gaussian = SsimParams::gaussian(1.5);

    for level in [0.0, 0.05, 0.1, 0.2] {
        let noisy = Image::from_fn(64, 64, 3, |x, y, c| {
            (base.get(x, y, c) + level * rng.random_range(-1.0..1.0)).clamp(0.0, 1.0)
        });
        println!(
            "noise {level:4.2}: L1 {:.4}  SSIM {:.4}  SSIM(gaussian) {:.4}",
            l1_error(&base, &noisy)?,
            ssim(&base, &noisy, &uniform)?,
            ssim(&base, &noisy, &gaussian)?
        );
    }
    let shifted = Image::from_fn(64, 64, 3, |x, y, c| base.get((x + 2).min(63), y, c));
    println!("shift 2px:  L1 {:.4}  SSIM {:.4}", l1_error(&base, &shifted)?, ssim(&base, &shifted, &uniform)?);
    Ok(())
}
