//! Writes a synthetic RGB-D sequence to disk and reads it back.
//!
//! `cargo run --example synth_dataset -- [scene.toml] [out_dir]`
use std::path::PathBuf;

use viewsynth::dataset::{Profile, SceneIndex};
use viewsynth::pipeline::run_synth;
use viewsynth::synthetic::SynthConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/orbit.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("viewsynth_orbit"));

    let text = std::fs::read_to_string(&config)?;
    let cfg = SynthConfig::from_toml_str(&text)?;
    run_synth(&cfg, &out, Profile::Piv3cams)?;

    let scene = SceneIndex::open(&out, Profile::Piv3cams)?;
    println!("wrote {} frames to {}", scene.len(), out.display());
    let pair = scene.pair(0, 1, None)?;
    let t = pair.relative_pose.translation();
    println!("relative pose 0->1: translation ({:.1}, {:.1}, {:.1}) mm", t.x, t.y, t.z);
    let depth = pair.tgt.depth.expect("synthetic frames carry depth");
    println!("frame 1 depth at center: {} mm", depth.get(depth.width() / 2, depth.height() / 2));
    Ok(())
}
