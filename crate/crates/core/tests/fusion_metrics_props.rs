mod common;

use proptest::prelude::*;
use rand::Rng;
use viewsynth::metrics::{
    lsgan_loss, perceptual_loss, recon_loss, total_loss, LossWeights, SsimParams,
};
use viewsynth::{fuse_average, fuse_predicted_mask, fuse_visibility, l1_error, ssim, FusionRule, Image, Mask};

use common::*;

fn triple(w: usize, h: usize, c: usize) -> impl Strategy<Value = (Image, Image, Mask)> {
    let img = move || {
        prop::collection::vec(0.0..=1.0f64, w * h * c).prop_map(move |d| Image::new(w, h, c, d).unwrap())
    };
    let mask = prop::collection::vec(0.0..=1.0f64, w * h).prop_map(move |d| Mask::new(w, h, d).unwrap());
    (img(), img(), mask)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fusion_matches_elementwise_oracles((w, p, m) in triple(4, 4, 3)) {
        let by_mask = fuse_predicted_mask(&w, &p, &m).unwrap();
        let avg = fuse_average(&w, &p).unwrap();
        let by_vis = fuse_visibility(&w, &p, &m).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                let mv = m.get(x, y);
                for c in 0..3 {
                    let (a, b) = (w.get(x, y, c), p.get(x, y, c));
                    prop_assert!((by_mask.get(x, y, c) - ((1.0 - mv) * a + mv * b)).abs() <= 1e-12);
                    prop_assert!((avg.get(x, y, c) - (0.5 * a + 0.5 * b)).abs() <= 1e-12);
                    prop_assert!((by_vis.get(x, y, c) - (mv * a + (1.0 - mv) * b)).abs() <= 1e-12);
                    for out in [&by_mask, &avg, &by_vis] {
                        let v = out.get(x, y, c);
                        prop_assert!(a.min(b) <= v && v <= a.max(b));
                    }
                }
            }
        }
    }

    #[test]
    fn fusion_polarity_duality((w, p, m) in triple(6, 5, 3)) {
        prop_assert_eq!(
            fuse_predicted_mask(&w, &p, &m).unwrap(),
            fuse_visibility(&w, &p, &m.complement()).unwrap()
        );
        prop_assert_eq!(
            fuse_average(&w, &p).unwrap(),
            fuse_predicted_mask(&w, &p, &Mask::filled(6, 5, 0.5)).unwrap()
        );
    }

    #[test]
    fn l1_is_a_metric((x, y, _) in triple(8, 8, 3), z in prop::collection::vec(0.0..=1.0f64, 192)) {
        let z = Image::new(8, 8, 3, z).unwrap();
        let dxy = l1_error(&x, &y).unwrap();
        prop_assert!((dxy - l1_oracle(&x, &y)).abs() <= 1e-12);
        prop_assert_eq!(dxy, l1_error(&y, &x).unwrap());
        prop_assert_eq!(l1_error(&x, &x).unwrap(), 0.0);
        prop_assert!(x == y || dxy > 0.0);
        prop_assert!(dxy <= l1_error(&x, &z).unwrap() + l1_error(&z, &y).unwrap() + 1e-12);
    }
}

#[test]
fn fusion_rule_dispatch() {
    let mut r = rng(30);
    let w = random_image(&mut r, 5, 5, 3);
    let p = random_image(&mut r, 5, 5, 3);
    let m = Mask::filled(5, 5, 0.25);
    assert_eq!(FusionRule::PredictedMask.apply(&w, &p, Some(&m)).unwrap(), fuse_predicted_mask(&w, &p, &m).unwrap());
    assert_eq!(FusionRule::Visibility.apply(&w, &p, Some(&m)).unwrap(), fuse_visibility(&w, &p, &m).unwrap());
    assert_eq!(FusionRule::Average.apply(&w, &p, None).unwrap(), fuse_average(&w, &p).unwrap());
    assert!(FusionRule::Visibility.apply(&w, &p, None).is_err());
}

#[test]
fn ssim_matches_window_oracle() {
    let mut r = rng(31);
    let params = [
        SsimParams::default(),
        SsimParams::gaussian(1.5),
        SsimParams {
            window: 7,
            ..SsimParams::default()
        },
    ];
    for p in &params {
        for _ in 0..5 {
            let x = random_image(&mut r, 16, 16, 3);
            let y = random_image(&mut r, 16, 16, 3);
            let got = ssim(&x, &y, p).unwrap();
            let want = ssim_oracle(&x, &y, p);
            assert!((got - want).abs() <= 1e-9, "{p:?}: {got} vs {want}");
        }
    }
}

#[test]
fn ssim_symmetry_and_channels() {
    let mut r = rng(32);
    let p = SsimParams::default();
    for _ in 0..20 {
        let x = random_image(&mut r, 20, 14, 3);
        let y = random_image(&mut r, 20, 14, 3);
        let xy = ssim(&x, &y, &p).unwrap();
        assert!((xy - ssim(&y, &x, &p).unwrap()).abs() <= 1e-12);
        assert!((-1.0..=1.0).contains(&xy));
        let per_channel: f64 = (0..3)
            .map(|c| ssim(&x.channel(c), &y.channel(c), &p).unwrap())
            .sum::<f64>()
            / 3.0;
        assert!((xy - per_channel).abs() <= 1e-12);
    }
}

#[test]
fn ssim_constant_images() {
    let a = Image::filled(12, 12, 1, 0.5);
    assert!((ssim(&a, &a, &SsimParams::default()).unwrap() - 1.0).abs() <= 1e-12);
    assert!(ssim(&Image::filled(10, 12, 1, 0.5), &Image::filled(10, 12, 1, 0.5), &SsimParams::default()).is_err());
}

#[test]
fn ssim_drops_with_noise() {
    let mut r = rng(33);
    let base = Image::from_fn(48, 48, 3, |x, y, c| {
        0.5 + 0.3 * ((x as f64 * 0.3 + c as f64).sin() * (y as f64 * 0.2).cos())
    });
    let noise: Vec<f64> = (0..48 * 48 * 3).map(|_| r.random_range(-1.0..1.0)).collect();
    let p = SsimParams::default();
    let mut last = f64::INFINITY;
    for level in [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3] {
        let noisy = Image::from_fn(48, 48, 3, |x, y, c| base.get(x, y, c) + level * noise[(y * 48 + x) * 3 + c]);
        let s = ssim(&base, &noisy, &p).unwrap();
        assert!(s < last || level == 0.0, "level {level}: {s} >= {last}");
        last = s;
    }
}

#[test]
fn loss_formulas() {
    let mut r = rng(34);
    let tgt = random_image(&mut r, 8, 8, 3);
    let (pred, warped, pixel) = (
        random_image(&mut r, 8, 8, 3),
        random_image(&mut r, 8, 8, 3),
        random_image(&mut r, 8, 8, 3),
    );
    let want = l1_oracle(&pred, &tgt) + l1_oracle(&warped, &tgt) + l1_oracle(&pixel, &tgt);
    assert!((recon_loss(&pred, &warped, &pixel, &tgt).unwrap() - want).abs() <= 1e-12);
    let lifted = Image::from_fn(8, 8, 3, |x, y, c| 0.1 + 0.8 * tgt.get(x, y, c));
    let offset = Image::from_fn(8, 8, 3, |x, y, c| lifted.get(x, y, c) + 0.1);
    assert!((recon_loss(&lifted, &offset, &lifted, &lifted).unwrap() - 0.1).abs() <= 1e-12);

    assert_eq!(lsgan_loss(1.0), 0.0);
    assert_eq!(lsgan_loss(0.0), 1.0);
    assert_eq!(lsgan_loss(0.25), 0.5625);

    assert_eq!(perceptual_loss(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
    let a: Vec<f64> = (0..64).map(|_| r.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..64).map(|_| r.random_range(-1.0..1.0)).collect();
    let norm = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    assert!((perceptual_loss(&a, &b).unwrap() - norm).abs() <= 1e-12);
    assert!(perceptual_loss(&a, &b[..3]).is_err());

    let w = LossWeights::default();
    assert_eq!(total_loss(1.0, 1.0, 1.0, &w), 12.5);
    assert_eq!(total_loss(0.0, 0.0, 0.0, &w), 0.0);
    for _ in 0..100 {
        let (l1, g, v) = (r.random::<f64>(), r.random::<f64>(), r.random::<f64>());
        let w = LossWeights::new(r.random(), r.random(), r.random()).unwrap();
        let want = w.lambda_l1 * l1 + w.lambda_gan * g + w.lambda_vgg * v;
        assert!((total_loss(l1, g, v, &w) - want).abs() <= 1e-12);
    }
}
