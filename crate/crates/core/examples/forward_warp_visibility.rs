//! Splats the source depth into the target view and reports how much of the
//! target is covered, before and after densification.
use viewsynth::synthetic::{make_pair, yaw_pose, AnalyticScene, Primitive};
use viewsynth::{densify_mask, forward_warp_depth, warp_from_source_depth, Intrinsics};

fn main() -> viewsynth::Result<()> {
    let scene = AnalyticScene::new(vec![
        Primitive::plane([0.0, 0.0, 3000.0], [0.0, 0.0, -1.0], 300.0),
        Primitive::sphere([0.0, 0.0, 1500.0], 400.0, 150.0),
    ])?;
    let k = Intrinsics::new(100.0, 100.0, 47.5, 47.5)?;
    let pair = make_pair(&scene, &yaw_pose(0.0, [0.0; 3]), &yaw_pose(4.0, [-150.0, 0.0, 100.0]), &k, 96, 96);
    let src_depth = pair.src.depth.as_ref().expect("rendered depth");

    let fwd = forward_warp_depth(src_depth, &pair.src_to_tgt(), &k);
    let dense = densify_mask(&fwd.visibility, 1);
    let total = 96 * 96;
    println!("sparse visibility: {} / {total}", fwd.visibility.count_set());
    println!("dense visibility:  {} / {total}", dense.count_set());

    let tgt_depth = pair.tgt.depth.as_ref().expect("rendered depth");
    let mut within = 0;
    for y in 0..96 {
        for x in 0..96 {
            let d = fwd.depth.get(x, y);
            if d > 0.0 && (d - tgt_depth.get(x, y)).abs() <= 1.0 {
                within += 1;
            }
        }
    }
    println!("splatted depths within 1 mm of truth: {within} / {}", fwd.depth.valid_count());

    let out = warp_from_source_depth(&pair.src.image, src_depth, &pair.src_to_tgt(), &k)?;
    println!("source-depth warp covers {} pixels", out.depth.valid_count());
    Ok(())
}
