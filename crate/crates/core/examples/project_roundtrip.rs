//! Back-projects pixels at known depths, moves them through a relative pose
//! and projects them again.
use viewsynth::dataset::relative_pose;
use viewsynth::synthetic::yaw_pose;
use viewsynth::{Intrinsics, PixelCoord};

fn main() -> viewsynth::Result<()> {
    let k = Intrinsics::new(120.0, 120.0, 63.5, 63.5)?;
    let pose_src = yaw_pose(0.0, [0.0, 0.0, 0.0]);
    let pose_tgt = yaw_pose(5.0, [80.0, 0.0, 30.0]);
    let tgt_to_src = relative_pose(&pose_src, &pose_tgt);

    for (u, v, depth) in [(10.0, 20.0, 1500.0), (63.5, 63.5, 2000.0), (100.0, 90.0, 3200.0)] {
        let p = k.backproject(PixelCoord::new(u, v), depth)?;
        let back = k.project(&p)?;
        let in_src = k.project(&tgt_to_src.transform_point(&p))?;
        println!(
            "tgt ({u:6.1}, {v:6.1}) @ {depth:6.0} mm -> roundtrip ({:.6}, {:.6}) -> src ({:.2}, {:.2})",
            back.u, back.v, in_src.u, in_src.v
        );
    }
    Ok(())
}
