use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use viewsynth::dataset::Profile;
use viewsynth::fusion::FusionRule;
use viewsynth::metrics::SsimWeighting;
use viewsynth::pipeline::{
    run_densify, run_evaluate, run_synth, run_warp, DepthSource, MaskDensity, PixelBranch,
    RunConfig,
};
use viewsynth::synthetic::SynthConfig;

#[derive(Parser)]
#[command(name = "viewsynth", version, about = "Depth-based view warping, fusion and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warp source frames into target views; write images, depth and masks.
    Warp(RunArgs),
    /// Fuse, score and tabulate frame pairs against ground truth.
    Evaluate(RunArgs),
    /// Render a synthetic RGB-D sequence from a scene file.
    Synth {
        /// Scene description (TOML).
        scene: PathBuf,
        /// Output scene directory.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "piv3cams")]
        profile: Profile,
    },
    /// Close holes in a mask PNG or a directory of mask PNGs.
    Densify {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = viewsynth::warping::DEFAULT_DENSIFY_RADIUS)]
        radius: usize,
    },
}

/// Every flag overrides the matching field of `--config` (or the default).
#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Scene directories (replace the configured list).
    scenes: Vec<PathBuf>,
    #[arg(long)]
    profile: Option<Profile>,
    /// Output root; VIEWSYNTH_OUTPUT_ROOT takes precedence.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = parse_depth_source)]
    depth_source: Option<DepthSource>,
    #[arg(long)]
    fusion: Option<FusionRule>,
    #[arg(long, value_parser = parse_mask_density)]
    mask: Option<MaskDensity>,
    #[arg(long)]
    densify_radius: Option<usize>,
    /// Center-crop side; 0 disables cropping.
    #[arg(long)]
    crop: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_distance: Option<usize>,
    /// Random pairs per scene; 0 enumerates every pair.
    #[arg(long)]
    pairs_per_scene: Option<usize>,
    #[arg(long)]
    ssim_window: Option<usize>,
    #[arg(long)]
    ssim_c1: Option<f64>,
    #[arg(long)]
    ssim_c2: Option<f64>,
    /// Gaussian SSIM weighting with this sigma; 0 selects uniform.
    #[arg(long)]
    ssim_sigma: Option<f64>,
    /// Constant pixel-branch value.
    #[arg(long, conflicts_with_all = ["pixel_dir", "pixel_blur"])]
    pixel_constant: Option<f64>,
    /// Directory of pixel-branch predictions `<stem>.png`.
    #[arg(long, conflicts_with = "pixel_blur")]
    pixel_dir: Option<PathBuf>,
    /// Use the box-blurred target with this radius as pixel branch.
    #[arg(long)]
    pixel_blur: Option<usize>,
    #[arg(long)]
    predicted_masks: Option<PathBuf>,
}

fn parse_depth_source(s: &str) -> Result<DepthSource, String> {
    match s.to_ascii_lowercase().as_str() {
        "target" | "tgt" => Ok(DepthSource::Target),
        "source" | "src" => Ok(DepthSource::Source),
        _ => Err(format!("unknown depth source {s:?} (target, source)")),
    }
}

fn parse_mask_density(s: &str) -> Result<MaskDensity, String> {
    match s.to_ascii_lowercase().as_str() {
        "sparse" => Ok(MaskDensity::Sparse),
        "dense" => Ok(MaskDensity::Dense),
        _ => Err(format!("unknown mask density {s:?} (sparse, dense)")),
    }
}

impl RunArgs {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_toml_file(p)?,
            None => RunConfig::default(),
        };
        if !self.scenes.is_empty() {
            cfg.scenes = self.scenes;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(profile, output, depth_source, fusion, mask, densify_radius, seed, max_distance);
        if let Some(c) = self.crop {
            cfg.crop = (c > 0).then_some(c);
        }
        if let Some(n) = self.pairs_per_scene {
            cfg.pairs_per_scene = (n > 0).then_some(n);
        }
        if let Some(w) = self.ssim_window {
            cfg.ssim.window = w;
        }
        if let Some(c) = self.ssim_c1 {
            cfg.ssim.c1 = c;
        }
        if let Some(c) = self.ssim_c2 {
            cfg.ssim.c2 = c;
        }
        if let Some(s) = self.ssim_sigma {
            cfg.ssim.weighting = if s > 0.0 {
                SsimWeighting::Gaussian { sigma: s }
            } else {
                SsimWeighting::Uniform
            };
        }
        if let Some(value) = self.pixel_constant {
            cfg.pixel_branch = PixelBranch::Constant { value };
        }
        if let Some(path) = self.pixel_dir {
            cfg.pixel_branch = PixelBranch::Directory { path };
        }
        if let Some(radius) = self.pixel_blur {
            cfg.pixel_branch = PixelBranch::BlurredTarget { radius };
        }
        if self.predicted_masks.is_some() {
            cfg.predicted_masks = self.predicted_masks;
        }
        cfg.apply_env_override();
        Ok(cfg)
    }
}

fn pair_label(scene: &str, src: Option<usize>, tgt: Option<usize>) -> String {
    match (src, tgt) {
        (Some(s), Some(t)) => format!("{scene} {s}->{t}"),
        _ => scene.to_string(),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Warp(args) => {
            let cfg = args.into_config()?;
            let report = run_warp(&cfg)?;
            let failed = report.failures();
            println!(
                "warped {} pairs, manifest {}",
                report.rows.len() - failed.len(),
                report.manifest.display()
            );
            if !failed.is_empty() {
                for r in &failed {
                    eprintln!("failed: {}: {}", pair_label(&r.scene, r.src, r.tgt), r.message);
                }
                bail!("{} pair(s) failed", failed.len());
            }
        }
        Command::Evaluate(args) => {
            let cfg = args.into_config()?;
            let report = run_evaluate(&cfg)?;
            for r in report.skipped() {
                eprintln!("skipped: {}: {}", pair_label(&r.scene, r.src, r.tgt), r.message);
            }
            for s in &report.summary {
                println!("{:<12} {:.6} ({} pairs)", s.metric, s.mean, s.count);
            }
            println!("tables in {}", report.dir.display());
            let failed = report.failures();
            if !failed.is_empty() {
                for r in &failed {
                    eprintln!("failed: {}: {}", pair_label(&r.scene, r.src, r.tgt), r.message);
                }
                bail!("{} pair(s) failed", failed.len());
            }
        }
        Command::Synth {
            scene,
            output,
            profile,
        } => {
            let text = std::fs::read_to_string(&scene)
                .with_context(|| format!("reading {}", scene.display()))?;
            let cfg = SynthConfig::from_toml_str(&text)?;
            let index = run_synth(&cfg, &output, profile)?;
            for w in &index.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {} frames to {}", index.len(), output.display());
        }
        Command::Densify {
            input,
            output,
            radius,
        } => {
            let written = run_densify(&input, &output, radius)?;
            println!("densified {} mask(s)", written.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
