//! The three pixelwise fusion rules on a small example.
use viewsynth::{FusionRule, Image, Mask};

fn main() -> viewsynth::Result<()> {
    let warped = Image::filled(4, 1, 1, 0.8);
    let pixel = Image::filled(4, 1, 1, 0.2);
    let mask = Mask::new(4, 1, vec![0.0, 0.25, 0.75, 1.0])?;

    for rule in [FusionRule::PredictedMask, FusionRule::Visibility, FusionRule::Average] {
        let m = if rule == FusionRule::Average { None } else { Some(&mask) };
        let out = rule.apply(&warped, &pixel, m)?;
        println!("{rule:?}: {:?}", out.data());
    }
    Ok(())
}
