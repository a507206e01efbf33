//! Runs the batch warp over a scene described by a run config and lists the
//! manifest.
//!
//! `cargo run --example batch_warp -- <run.toml>`
use viewsynth::pipeline::{run_warp, RunConfig};

fn main() -> viewsynth::Result<()> {
    let path = std::env::args().nth(1).expect("usage: batch_warp <run.toml>");
    let mut cfg = RunConfig::from_toml_file(&path)?;
    cfg.apply_env_override();
    let report = run_warp(&cfg)?;
    for r in &report.rows {
        println!("{} {:?}->{:?} d={:?} {} {}", r.scene, r.src, r.tgt, r.frame_distance, r.status, r.warped);
    }
    println!("manifest: {}", report.manifest.display());
    Ok(())
}
