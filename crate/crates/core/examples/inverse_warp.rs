//! Renders a checkered scene from two poses and warps the source view into
//! the target using the target depth.
use viewsynth::metrics::l1_error_masked;
use viewsynth::synthetic::{make_pair, yaw_pose, AnalyticScene, Primitive};
use viewsynth::{inverse_warp, l1_error, Intrinsics};

fn main() -> viewsynth::Result<()> {
    let scene = AnalyticScene::new(vec![
        Primitive::plane([0.0, 0.0, 2500.0], [0.0, 0.0, -1.0], 300.0),
        Primitive::sphere([200.0, 100.0, 1600.0], 300.0, 120.0),
    ])?;
    let k = Intrinsics::new(128.0, 128.0, 63.5, 63.5)?;
    let pair = make_pair(&scene, &yaw_pose(0.0, [0.0; 3]), &yaw_pose(-3.0, [120.0, 0.0, 0.0]), &k, 128, 128);

    let tgt_depth = pair.tgt.depth.as_ref().expect("rendered depth");
    let warp = inverse_warp(&pair.src.image, tgt_depth, &pair.tgt_to_src(), &k)?;
    println!("valid pixels: {} / {}", warp.mask.count_set(), 128 * 128);
    println!("L1 full image:   {:.4}", l1_error(&warp.image, &pair.tgt.image)?);
    println!("L1 valid pixels: {:.4}", l1_error_masked(&warp.image, &pair.tgt.image, &warp.mask)?);
    Ok(())
}
