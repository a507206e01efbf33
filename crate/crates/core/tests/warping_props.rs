mod common;

use nalgebra::Vector3;
use proptest::prelude::*;
use rand::Rng;
use viewsynth::camera::PixelCoord;
use viewsynth::dataset::relative_pose;
use viewsynth::metrics::l1_error_masked;
use viewsynth::synthetic::{render, yaw_pose, AnalyticScene, Primitive};
use viewsynth::warping::{bilinear_gradient, bilinear_sample};
use viewsynth::{
    densify_mask, forward_warp_depth, inverse_warp, warp_from_source_depth, DepthMap, Image,
    Intrinsics, Mask, Pose,
};

use common::*;

fn image(w: usize, h: usize, c: usize) -> impl Strategy<Value = Image> {
    prop::collection::vec(0.0..=1.0f64, w * h * c).prop_map(move |d| Image::new(w, h, c, d).unwrap())
}

fn mask(max: usize) -> impl Strategy<Value = Mask> {
    (1..max, 1..max).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.6), w * h)
            .prop_map(move |b| Mask::from_bools(w, h, &b).unwrap())
    })
}

/// Closing with the outside treated as unset for dilation and set for
/// erosion, evaluated pixel by pixel.
fn closing_oracle(m: &Mask, r: usize) -> Vec<bool> {
    let (w, h) = (m.width() as isize, m.height() as isize);
    let r = r as isize;
    let at = |x: isize, y: isize| m.get(x as usize, y as usize) > 0.0;
    let mut dil = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut any = false;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (xx, yy) = (x + dx, y + dy);
                    if xx >= 0 && yy >= 0 && xx < w && yy < h && at(xx, yy) {
                        any = true;
                    }
                }
            }
            dil[(y * w + x) as usize] = any;
        }
    }
    let mut out = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut all = true;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (xx, yy) = (x + dx, y + dy);
                    if xx >= 0 && yy >= 0 && xx < w && yy < h && !dil[(yy * w + xx) as usize] {
                        all = false;
                    }
                }
            }
            out[(y * w + x) as usize] = all;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bilinear_matches_double_loop(img in image(8, 8, 3), u in -1.5..8.5f64, v in -1.5..8.5f64) {
        let got = bilinear_sample(&img, PixelCoord::new(u, v));
        for (c, g) in got.iter().enumerate() {
            prop_assert!((g - bilinear_oracle(&img, u, v, c)).abs() <= 1e-12);
        }
    }

    #[test]
    fn bilinear_is_lipschitz(
        img in image(8, 6, 3),
        u in -1.2..8.2f64,
        v in -1.2..6.2f64,
        du in -1.0..1.0f64,
        dv in -1.0..1.0f64,
        eps in 1e-6..0.5f64,
    ) {
        let a = bilinear_sample(&img, PixelCoord::new(u, v));
        let b = bilinear_sample(&img, PixelCoord::new(u + eps * du, v + eps * dv));
        let max_i = img.data().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let change: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        prop_assert!(change <= 2.0 * eps * 3.0 * max_i + 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences(img in image(9, 7, 3), u in -0.9..8.9f64, v in -0.9..6.9f64) {
        let h = 1e-4;
        prop_assume!((u - u.round()).abs() > 2.0 * h && (v - v.round()).abs() > 2.0 * h);
        let (gu, gv) = bilinear_gradient(&img, PixelCoord::new(u, v));
        for c in 0..3 {
            let fu = (bilinear_sample(&img, PixelCoord::new(u + h, v))[c]
                - bilinear_sample(&img, PixelCoord::new(u - h, v))[c]) / (2.0 * h);
            let fv = (bilinear_sample(&img, PixelCoord::new(u, v + h))[c]
                - bilinear_sample(&img, PixelCoord::new(u, v - h))[c]) / (2.0 * h);
            prop_assert!((gu[c] - fu).abs() <= 1e-5 && (gv[c] - fv).abs() <= 1e-5);
        }
    }

    #[test]
    fn closing_matches_oracle(m in mask(20), r in 0usize..4) {
        let got = densify_mask(&m, r);
        let want = closing_oracle(&m, r);
        let got_bits: Vec<bool> = got.data().iter().map(|v| *v > 0.0).collect();
        prop_assert_eq!(got_bits, want);
        prop_assert!(got.is_binary());
    }

    #[test]
    fn closing_is_extensive_and_idempotent(m in mask(24), r in 0usize..4) {
        let once = densify_mask(&m, r);
        for (a, b) in m.data().iter().zip(once.data()) {
            prop_assert!(b >= a);
        }
        prop_assert_eq!(densify_mask(&once, r), once);
    }
}

#[test]
fn closing_radius_two_oracle_on_random_masks() {
    let mut r = rng(21);
    for _ in 0..50 {
        let (w, h) = (r.random_range(5..30), r.random_range(5..30));
        let bits: Vec<bool> = (0..w * h).map(|_| r.random_bool(0.7)).collect();
        let m = Mask::from_bools(w, h, &bits).unwrap();
        let got: Vec<bool> = densify_mask(&m, 2).data().iter().map(|v| *v > 0.0).collect();
        assert_eq!(got, closing_oracle(&m, 2));
    }
}

#[test]
fn bilinear_midpoint() {
    let img = Image::new(2, 1, 1, vec![0.2, 0.6]).unwrap();
    let v = bilinear_sample(&img, PixelCoord::new(0.5, 0.0))[0];
    assert!((v - 0.4).abs() < 1e-15);
    assert_eq!(bilinear_sample(&img, PixelCoord::new(-1.0, 0.0)), vec![0.0]);
    assert_eq!(bilinear_sample(&img, PixelCoord::new(5.0, 0.3)), vec![0.0]);
}

/// Splats every source pixel with its own arithmetic and records the nearest
/// depth landing on each target pixel.
fn splat_oracle(depth: &DepthMap, t: &Pose, k: &Intrinsics) -> Vec<Option<f64>> {
    let (w, h) = (depth.width(), depth.height());
    let mut best: Vec<Option<f64>> = vec![None; w * h];
    let r = t.rotation();
    let tr = t.translation();
    for y in 0..h {
        for x in 0..w {
            let d = depth.get(x, y);
            if d <= 0.0 {
                continue;
            }
            let p = Vector3::new((x as f64 - k.cx()) * d / k.fx(), (y as f64 - k.cy()) * d / k.fy(), d);
            let q = r * p + tr;
            if q.z <= 0.0 {
                continue;
            }
            let u = (k.fx() * q.x / q.z + k.cx()).round();
            let v = (k.fy() * q.y / q.z + k.cy()).round();
            if u < 0.0 || v < 0.0 || u >= w as f64 || v >= h as f64 {
                continue;
            }
            let i = v as usize * w + u as usize;
            if best[i].is_none_or(|b| q.z < b) {
                best[i] = Some(q.z);
            }
        }
    }
    best
}

#[test]
fn visibility_is_sound_against_splat_oracle() {
    let mut r = rng(22);
    for _ in 0..40 {
        let (w, h) = (r.random_range(4..14), r.random_range(4..14));
        let data: Vec<f64> = (0..w * h)
            .map(|_| if r.random_bool(0.15) { 0.0 } else { r.random_range(200.0..3000.0) })
            .collect();
        let depth = DepthMap::new(w, h, data).unwrap();
        let k = Intrinsics::new(r.random_range(5.0..20.0), r.random_range(5.0..20.0), w as f64 / 2.0, h as f64 / 2.0)
            .unwrap();
        let t = Pose::from_axis_angle(
            Vector3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), 1.0),
            r.random_range(-0.3..0.3),
            Vector3::new(r.random_range(-300.0..300.0), r.random_range(-300.0..300.0), r.random_range(-300.0..300.0)),
        )
        .unwrap();
        let fwd = forward_warp_depth(&depth, &t, &k);
        let oracle = splat_oracle(&depth, &t, &k);
        for i in 0..w * h {
            let (x, y) = (i % w, i / w);
            match oracle[i] {
                Some(z) => {
                    assert_eq!(fwd.visibility.get(x, y), 1.0);
                    assert!((fwd.depth.get(x, y) - z).abs() <= 1e-9 * z);
                }
                None => {
                    assert_eq!(fwd.visibility.get(x, y), 0.0);
                    assert_eq!(fwd.depth.get(x, y), 0.0);
                }
            }
        }
    }
}

fn plane_and_sphere() -> AnalyticScene {
    AnalyticScene::new(vec![
        Primitive::plane([0.0, 0.0, 3000.0], [0.0, 0.0, -1.0], 300.0),
        Primitive::sphere([150.0, -50.0, 1800.0], 350.0, 150.0),
    ])
    .unwrap()
}

/// Lateral, rotating and receding motions. When the target moves closer the
/// sparse intermediate has holes that bilinear taps of the return warp pick
/// up, so approaching motion is not covered by the 0.05 bound.
#[test]
fn forward_then_back_reproduces_source() {
    let k = Intrinsics::new(100.0, 100.0, 47.5, 39.5).unwrap();
    let scene = plane_and_sphere();
    for (yaw, t) in [
        (0.0, [60.0, 0.0, 0.0]),
        (0.0, [25.0, -35.0, 0.0]),
        (2.0, [-40.0, 20.0, -40.0]),
        (-3.0, [30.0, 0.0, -60.0]),
        (0.0, [0.0, 0.0, -100.0]),
    ] {
        let pose_src = Pose::identity();
        let pose_tgt = yaw_pose(yaw, t);
        let (src, src_depth) = render(&scene, &pose_src, &k, 96, 80);
        let to_tgt = relative_pose(&pose_src, &pose_tgt).inverse();
        let there = warp_from_source_depth(&src, &src_depth, &to_tgt, &k).unwrap();
        let back = warp_from_source_depth(&there.image, &there.depth, &to_tgt.inverse(), &k).unwrap();
        let err = l1_error_masked(&back.image, &src, &back.visibility).unwrap();
        assert!(err <= 0.05, "yaw {yaw}: round-trip error {err}");
    }
}

#[test]
fn forward_depth_matches_analytic_plane_depth() {
    let k = Intrinsics::new(128.0, 128.0, 63.5, 63.5).unwrap();
    let scene = AnalyticScene::new(vec![Primitive::plane([0.0, 0.0, 2000.0], [0.0, 0.0, -1.0], 300.0)]).unwrap();
    let pose_src = Pose::identity();
    let pose_tgt = yaw_pose(2.0, [80.0, -30.0, 50.0]);
    let (_, src_depth) = render(&scene, &pose_src, &k, 128, 128);
    let (_, tgt_depth) = render(&scene, &pose_tgt, &k, 128, 128);
    let fwd = forward_warp_depth(&src_depth, &relative_pose(&pose_src, &pose_tgt).inverse(), &k);
    let (mut close, mut total) = (0, 0);
    for y in 0..128 {
        for x in 0..128 {
            if fwd.visibility.get(x, y) > 0.0 {
                total += 1;
                if (fwd.depth.get(x, y) - tgt_depth.get(x, y)).abs() <= 1.0 {
                    close += 1;
                }
            }
        }
    }
    assert!(total > 10_000);
    assert!(close as f64 >= 0.95 * total as f64, "{close}/{total} within 1 mm");
}

#[test]
fn inverse_warp_matches_rendered_target() {
    let k = Intrinsics::new(100.0, 100.0, 47.5, 39.5).unwrap();
    let scene = AnalyticScene::new(vec![Primitive::plane([0.0, 0.0, 2500.0], [0.2, 0.0, -1.0], 600.0)]).unwrap();
    let pose_src = Pose::identity();
    let pose_tgt = yaw_pose(-3.0, [100.0, 0.0, 100.0]);
    let (src, _) = render(&scene, &pose_src, &k, 96, 80);
    let (tgt, tgt_depth) = render(&scene, &pose_tgt, &k, 96, 80);
    let inv = inverse_warp(&src, &tgt_depth, &relative_pose(&pose_src, &pose_tgt), &k).unwrap();
    // Keep target pixels whose source sample has all four taps inside.
    let interior = Mask::new(
        96,
        80,
        (0..96 * 80)
            .map(|i| {
                let (x, y) = (i % 96, i / 96);
                let p = k.backproject(PixelCoord::new(x as f64, y as f64), tgt_depth.get(x, y)).unwrap();
                let q = k.project(&relative_pose(&pose_src, &pose_tgt).transform_point(&p)).unwrap();
                let inside = q.u >= 0.0 && q.v >= 0.0 && q.u <= 95.0 && q.v <= 79.0;
                if inside && inv.mask.get(x, y) > 0.0 { 1.0 } else { 0.0 }
            })
            .collect(),
    )
    .unwrap();
    let err = l1_error_masked(&inv.image, &tgt, &interior).unwrap();
    assert!(err <= 0.02, "{err}");
}
