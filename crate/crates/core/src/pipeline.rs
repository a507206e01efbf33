//! Batch operations behind the `viewsynth` binary: warp frame pairs, evaluate
//! predictions, synthesize datasets and densify masks.
//!
//! Pairs are processed in parallel; every report lists rows in input order
//! (scenes in configuration order, pairs in sampling order), so artifacts are
//! byte-identical across runs with the same configuration.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::Intrinsics;
use crate::dataset::{
    load_color_image, load_mask_png, relative_pose, sample_pair_indices, save_color_image,
    save_depth_png, save_mask_png, Profile, SceneIndex, DEFAULT_CROP, DEFAULT_MAX_DISTANCE,
};
use crate::error::{Error, Result};
use crate::fusion::FusionRule;
use crate::metrics::{l1_error, l1_error_masked, ssim, SsimParams};
use crate::raster::{DepthMap, Image, Mask};
use crate::synthetic::SynthConfig;
use crate::warping::{densify_mask, forward_warp_depth, inverse_warp, warp_from_source_depth};

/// Environment variable that replaces the configured output root.
pub const OUTPUT_ROOT_ENV: &str = "VIEWSYNTH_OUTPUT_ROOT";

/// Upper bound accepted for the closing radius.
pub const MAX_DENSIFY_RADIUS: usize = 64;

/// Depth used to warp the source image into the target view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthSource {
    /// Ground-truth target depth, inverse warping only.
    Target,
    /// Source depth forward-warped into the target, then inverse warping.
    Source,
}

/// Which visibility mask feeds the mask-based fusion rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskDensity {
    Sparse,
    Dense,
}

/// Stand-in for the pixel-branch prediction fused with the warped image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PixelBranch {
    /// Constant gray image.
    Constant { value: f64 },
    /// External predictions stored as `<dir>/<pair stem>.png`.
    Directory { path: PathBuf },
    /// Box-blurred ground-truth target; an oracle for experiments only.
    BlurredTarget { radius: usize },
}

impl Default for PixelBranch {
    fn default() -> Self {
        PixelBranch::Constant { value: 0.5 }
    }
}

/// All settings of a batch run. Loadable from TOML; every field is optional
/// in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: Profile,
    /// Scene directories, processed in order.
    pub scenes: Vec<PathBuf>,
    pub output: PathBuf,
    pub depth_source: DepthSource,
    pub fusion: FusionRule,
    pub mask: MaskDensity,
    pub densify_radius: usize,
    /// Center-crop side; `None` keeps full frames.
    pub crop: Option<usize>,
    pub seed: u64,
    pub max_distance: usize,
    /// Random pairs drawn per scene; `None` enumerates every pair within
    /// `max_distance`.
    pub pairs_per_scene: Option<usize>,
    pub ssim: SsimParams,
    pub pixel_branch: PixelBranch,
    /// Predicted masks `<dir>/<pair stem>.png` for the predicted-mask rule.
    pub predicted_masks: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Piv3cams,
            scenes: Vec::new(),
            output: PathBuf::from("out"),
            depth_source: DepthSource::Target,
            fusion: FusionRule::Visibility,
            mask: MaskDensity::Dense,
            densify_radius: crate::warping::DEFAULT_DENSIFY_RADIUS,
            crop: Some(DEFAULT_CROP),
            seed: 0,
            max_distance: DEFAULT_MAX_DISTANCE,
            pairs_per_scene: None,
            ssim: SsimParams::default(),
            pixel_branch: PixelBranch::default(),
            predicted_masks: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Replaces `output` with `$VIEWSYNTH_OUTPUT_ROOT` when it is set.
    pub fn apply_env_override(&mut self) {
        if let Some(root) = std::env::var_os(OUTPUT_ROOT_ENV) {
            if !root.is_empty() {
                self.output = PathBuf::from(root);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenes.is_empty() {
            return Err(Error::Config("no scenes given".into()));
        }
        for s in &self.scenes {
            if !s.is_dir() {
                return Err(Error::Config(format!("scene {} is not a directory", s.display())));
            }
        }
        if self.max_distance == 0 {
            return Err(Error::Config("max_distance must be >= 1".into()));
        }
        if self.densify_radius > MAX_DENSIFY_RADIUS {
            return Err(Error::Config(format!(
                "densify_radius {} exceeds {MAX_DENSIFY_RADIUS}",
                self.densify_radius
            )));
        }
        if self.crop == Some(0) {
            return Err(Error::Config("crop must be positive (omit it to disable cropping)".into()));
        }
        if self.pairs_per_scene == Some(0) {
            return Err(Error::Config("pairs_per_scene must be positive".into()));
        }
        self.ssim.validate()?;
        match &self.pixel_branch {
            PixelBranch::Constant { value } if !(0.0..=1.0).contains(value) => {
                return Err(Error::Config(format!("pixel-branch constant {value} outside [0, 1]")));
            }
            PixelBranch::Directory { path } if !path.is_dir() => {
                return Err(Error::Config(format!(
                    "pixel-branch directory {} does not exist",
                    path.display()
                )));
            }
            _ => {}
        }
        if self.fusion == FusionRule::PredictedMask {
            match &self.predicted_masks {
                Some(p) if p.is_dir() => {}
                Some(p) => {
                    return Err(Error::Config(format!(
                        "predicted-mask directory {} does not exist",
                        p.display()
                    )))
                }
                None => {
                    return Err(Error::Config(
                        "fusion rule predicted-mask needs predicted_masks".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// One unit of work: a pair of frame indices in a scene.
#[derive(Debug, Clone, Copy)]
struct PairJob<'a> {
    scene: &'a SceneIndex,
    src: usize,
    tgt: usize,
}

impl PairJob<'_> {
    fn stem(&self) -> String {
        format!("{}_{:06}_{:06}", self.scene.id, self.src, self.tgt)
    }

    fn distance(&self) -> i64 {
        self.tgt as i64 - self.src as i64
    }
}

/// Every `(src, tgt)` with `1 <= |tgt - src| <= max_distance`, by source then
/// signed distance.
pub fn exhaustive_pairs(n_frames: usize, max_distance: usize) -> Vec<(usize, usize)> {
    let m = max_distance as i64;
    let mut out = Vec::new();
    for src in 0..n_frames as i64 {
        for d in (-m..=m).filter(|d| *d != 0) {
            let tgt = src + d;
            if tgt >= 0 && tgt < n_frames as i64 {
                out.push((src as usize, tgt as usize));
            }
        }
    }
    out
}

fn pair_indices(scene: &SceneIndex, cfg: &RunConfig) -> Result<Vec<(usize, usize)>> {
    match cfg.pairs_per_scene {
        Some(count) => sample_pair_indices(scene.len(), cfg.max_distance, count, cfg.seed),
        None => {
            if scene.len() <= cfg.max_distance {
                return Err(Error::Scene(format!(
                    "{} has {} frames, needs more than max_distance = {}",
                    scene.id,
                    scene.len(),
                    cfg.max_distance
                )));
            }
            Ok(exhaustive_pairs(scene.len(), cfg.max_distance))
        }
    }
}

/// Geometric products of one pair.
#[derive(Debug, Clone)]
pub struct PairProducts {
    pub warped: Image,
    /// Pixels where the warped image holds a valid sample.
    pub warp_mask: Mask,
    /// Forward-warped (sparse) source depth in the target view.
    pub depth: DepthMap,
    pub vis_sparse: Mask,
    pub vis_dense: Mask,
    pub intrinsics: Intrinsics,
}

fn compute_products(job: &PairJob, cfg: &RunConfig) -> Result<PairProducts> {
    let scene = job.scene;
    let (src_img, k) = scene.load_image(job.src, cfg.crop)?;
    let src_depth = scene
        .load_depth(job.src, cfg.crop)?
        .ok_or_else(|| Error::Scene(format!("frame {} has no depth", job.src)))?;
    let rel = relative_pose(&scene.frames[job.src].pose, &scene.frames[job.tgt].pose);
    let (tgt_to_src, src_to_tgt) = (rel, rel.inverse());

    let (warped, warp_mask, fwd) = match cfg.depth_source {
        DepthSource::Target => {
            let tgt_depth = scene
                .load_depth(job.tgt, cfg.crop)?
                .ok_or_else(|| Error::Scene(format!("frame {} has no depth", job.tgt)))?;
            let inv = inverse_warp(&src_img, &tgt_depth, &tgt_to_src, &k)?;
            let fwd = forward_warp_depth(&src_depth, &src_to_tgt, &k);
            (inv.image, inv.mask, fwd)
        }
        DepthSource::Source => {
            let out = warp_from_source_depth(&src_img, &src_depth, &src_to_tgt, &k)?;
            let valid = out.depth.validity();
            let fwd = crate::warping::ForwardWarp {
                depth: out.depth,
                visibility: out.visibility,
            };
            (out.image, valid, fwd)
        }
    };
    let vis_dense = densify_mask(&fwd.visibility, cfg.densify_radius);
    Ok(PairProducts {
        warped,
        warp_mask,
        depth: fwd.depth,
        vis_sparse: fwd.visibility,
        vis_dense,
        intrinsics: k,
    })
}

fn open_scenes(cfg: &RunConfig) -> Vec<std::result::Result<SceneIndex, (PathBuf, Error)>> {
    cfg.scenes
        .iter()
        .map(|p| SceneIndex::open(p, cfg.profile).map_err(|e| (p.clone(), e)))
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

// ---------------------------------------------------------------- warp

/// One manifest line of [`run_warp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpRow {
    pub scene: String,
    pub src: Option<usize>,
    pub tgt: Option<usize>,
    pub frame_distance: Option<i64>,
    pub status: String,
    pub warped: String,
    pub depth: String,
    pub vis_sparse: String,
    pub vis_dense: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct WarpReport {
    pub rows: Vec<WarpRow>,
    pub manifest: PathBuf,
}

impl WarpReport {
    pub fn failures(&self) -> Vec<&WarpRow> {
        self.rows.iter().filter(|r| r.status != "ok").collect()
    }
}

/// Writes `<stem>_warped.png`, `<stem>_depth.png` (profile depth units),
/// `<stem>_vis_sparse.png` and `<stem>_vis_dense.png` for every pair into
/// `<output>/warp/`, plus `manifest.csv`. Failed pairs get an error row and
/// the run continues.
pub fn run_warp(cfg: &RunConfig) -> Result<WarpReport> {
    cfg.validate()?;
    let out_dir = cfg.output.join("warp");
    ensure_dir(&out_dir)?;
    let scenes = open_scenes(cfg);

    let mut rows = Vec::new();
    for scene in &scenes {
        let scene = match scene {
            Ok(s) => s,
            Err((path, e)) => {
                rows.push(scene_error_row(path, e));
                continue;
            }
        };
        let indices = match pair_indices(scene, cfg) {
            Ok(i) => i,
            Err(e) => {
                rows.push(scene_error_row(&scene.root, &e));
                continue;
            }
        };
        let jobs: Vec<PairJob> = indices
            .into_iter()
            .map(|(src, tgt)| PairJob { scene, src, tgt })
            .collect();
        let scene_rows: Vec<WarpRow> = jobs
            .par_iter()
            .map(|job| warp_one(job, cfg, &out_dir))
            .collect();
        rows.extend(scene_rows);
    }

    let manifest = out_dir.join("manifest.csv");
    let mut wtr = csv::Writer::from_path(&manifest)?;
    for r in &rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io(&manifest, e))?;
    Ok(WarpReport { rows, manifest })
}

fn scene_error_row(path: &Path, e: &Error) -> WarpRow {
    WarpRow {
        scene: path.display().to_string(),
        src: None,
        tgt: None,
        frame_distance: None,
        status: "error".into(),
        warped: String::new(),
        depth: String::new(),
        vis_sparse: String::new(),
        vis_dense: String::new(),
        message: e.to_string(),
    }
}

fn warp_one(job: &PairJob, cfg: &RunConfig, out_dir: &Path) -> WarpRow {
    let stem = job.stem();
    let names = [
        format!("{stem}_warped.png"),
        format!("{stem}_depth.png"),
        format!("{stem}_vis_sparse.png"),
        format!("{stem}_vis_dense.png"),
    ];
    let result = compute_products(job, cfg).and_then(|p| {
        save_color_image(&p.warped, out_dir.join(&names[0]))?;
        save_depth_png(&p.depth, out_dir.join(&names[1]), job.scene.profile)?;
        save_mask_png(&p.vis_sparse, out_dir.join(&names[2]))?;
        save_mask_png(&p.vis_dense, out_dir.join(&names[3]))
    });
    let mut row = WarpRow {
        scene: job.scene.id.clone(),
        src: Some(job.src),
        tgt: Some(job.tgt),
        frame_distance: Some(job.distance()),
        status: "ok".into(),
        warped: String::new(),
        depth: String::new(),
        vis_sparse: String::new(),
        vis_dense: String::new(),
        message: String::new(),
    };
    match result {
        Ok(()) => {
            let [a, b, c, d] = names;
            row.warped = a;
            row.depth = b;
            row.vis_sparse = c;
            row.vis_dense = d;
        }
        Err(e) => {
            row.status = "error".into();
            row.message = e.to_string();
        }
    }
    row
}

// ---------------------------------------------------------------- evaluate

/// Per-pair metrics. Metric columns are empty for skipped or failed pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub scene: String,
    pub src: Option<usize>,
    pub tgt: Option<usize>,
    pub frame_distance: Option<i64>,
    /// `ok`, `skipped` (no ground truth) or `error`.
    pub status: String,
    pub l1_warped: Option<f64>,
    pub ssim_warped: Option<f64>,
    pub l1_pred: Option<f64>,
    pub ssim_pred: Option<f64>,
    /// Warped-image L1 over pixels of the selected visibility mask.
    pub l1_visible: Option<f64>,
    pub vis_sparse_pixels: Option<usize>,
    pub vis_dense_pixels: Option<usize>,
    pub message: String,
}

impl MetricRow {
    fn empty(scene: String, job: Option<&PairJob>, status: &str, message: String) -> Self {
        Self {
            scene,
            src: job.map(|j| j.src),
            tgt: job.map(|j| j.tgt),
            frame_distance: job.map(|j| j.distance()),
            status: status.into(),
            l1_warped: None,
            ssim_warped: None,
            l1_pred: None,
            ssim_pred: None,
            l1_visible: None,
            vis_sparse_pixels: None,
            vis_dense_pixels: None,
            message,
        }
    }
}

/// Mean of one metric column over `ok` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub metric: String,
    pub mean: f64,
    pub count: usize,
}

/// Mean errors per signed frame distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub frame_distance: i64,
    pub pairs: usize,
    pub mean_l1_warped: f64,
    pub mean_l1_pred: f64,
    pub mean_ssim_pred: f64,
}

#[derive(Debug, Clone)]
pub struct EvaluateReport {
    pub rows: Vec<MetricRow>,
    pub summary: Vec<SummaryRow>,
    pub curve: Vec<CurveRow>,
    pub dir: PathBuf,
}

impl EvaluateReport {
    pub fn failures(&self) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.status == "error").collect()
    }

    pub fn skipped(&self) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.status == "skipped").collect()
    }
}

fn pixel_branch_image(cfg: &RunConfig, job: &PairJob, tgt: &Image) -> Result<Image> {
    match &cfg.pixel_branch {
        PixelBranch::Constant { value } => {
            Ok(Image::filled(tgt.width(), tgt.height(), tgt.channels(), *value))
        }
        PixelBranch::BlurredTarget { radius } => Ok(tgt.box_blur(*radius)),
        PixelBranch::Directory { path } => {
            let img = load_color_image(path.join(format!("{}.png", job.stem())))?;
            tgt.check_same_shape(&img, "pixel-branch image")?;
            Ok(img)
        }
    }
}

/// Fuses and scores one pair against its ground-truth target.
fn evaluate_one(job: &PairJob, cfg: &RunConfig) -> MetricRow {
    let scene_id = job.scene.id.clone();
    let tgt = match job.scene.load_image(job.tgt, cfg.crop) {
        Ok((img, _)) => img,
        Err(e) => {
            return MetricRow::empty(scene_id, Some(job), "skipped", format!("no ground truth: {e}"))
        }
    };
    let scored = (|| -> Result<MetricRow> {
        let p = compute_products(job, cfg)?;
        let pixel = pixel_branch_image(cfg, job, &tgt)?;
        let vis = match cfg.mask {
            MaskDensity::Sparse => &p.vis_sparse,
            MaskDensity::Dense => &p.vis_dense,
        };
        let pred = match cfg.fusion {
            FusionRule::Average => cfg.fusion.apply(&p.warped, &pixel, None)?,
            FusionRule::Visibility => cfg.fusion.apply(&p.warped, &pixel, Some(vis))?,
            FusionRule::PredictedMask => {
                let dir = cfg.predicted_masks.as_ref().expect("validated");
                let m = load_mask_png(dir.join(format!("{}.png", job.stem())))?;
                cfg.fusion.apply(&p.warped, &pixel, Some(&m))?
            }
        };
        let l1_visible = if vis.count_set() > 0 {
            Some(l1_error_masked(&p.warped, &tgt, vis)?)
        } else {
            None
        };
        Ok(MetricRow {
            l1_warped: Some(l1_error(&p.warped, &tgt)?),
            ssim_warped: Some(ssim(&p.warped, &tgt, &cfg.ssim)?),
            l1_pred: Some(l1_error(&pred, &tgt)?),
            ssim_pred: Some(ssim(&pred, &tgt, &cfg.ssim)?),
            l1_visible,
            vis_sparse_pixels: Some(p.vis_sparse.count_set()),
            vis_dense_pixels: Some(p.vis_dense.count_set()),
            ..MetricRow::empty(scene_id.clone(), Some(job), "ok", String::new())
        })
    })();
    scored.unwrap_or_else(|e| MetricRow::empty(scene_id, Some(job), "error", e.to_string()))
}

fn mean_of(rows: &[&MetricRow], f: impl Fn(&MetricRow) -> Option<f64>) -> (f64, usize) {
    let vals: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
    if vals.is_empty() {
        (f64::NAN, 0)
    } else {
        (vals.iter().sum::<f64>() / vals.len() as f64, vals.len())
    }
}

/// Scores every pair and writes `metrics.csv`, `summary.csv` and
/// `distance_curve.csv` into `<output>/evaluate/`.
pub fn run_evaluate(cfg: &RunConfig) -> Result<EvaluateReport> {
    cfg.validate()?;
    let dir = cfg.output.join("evaluate");
    ensure_dir(&dir)?;
    let scenes = open_scenes(cfg);

    let mut rows = Vec::new();
    for scene in &scenes {
        let scene = match scene {
            Ok(s) => s,
            Err((path, e)) => {
                rows.push(MetricRow::empty(path.display().to_string(), None, "error", e.to_string()));
                continue;
            }
        };
        let indices = match pair_indices(scene, cfg) {
            Ok(i) => i,
            Err(e) => {
                rows.push(MetricRow::empty(scene.id.clone(), None, "error", e.to_string()));
                continue;
            }
        };
        let jobs: Vec<PairJob> = indices
            .into_iter()
            .map(|(src, tgt)| PairJob { scene, src, tgt })
            .collect();
        let scene_rows: Vec<MetricRow> = jobs.par_iter().map(|j| evaluate_one(j, cfg)).collect();
        rows.extend(scene_rows);
    }

    let ok: Vec<&MetricRow> = rows.iter().filter(|r| r.status == "ok").collect();
    type Getter = fn(&MetricRow) -> Option<f64>;
    let columns: [(&str, Getter); 5] = [
        ("l1_warped", |r| r.l1_warped),
        ("ssim_warped", |r| r.ssim_warped),
        ("l1_pred", |r| r.l1_pred),
        ("ssim_pred", |r| r.ssim_pred),
        ("l1_visible", |r| r.l1_visible),
    ];
    let summary: Vec<SummaryRow> = columns
        .iter()
        .map(|(name, f)| {
            let (mean, count) = mean_of(&ok, f);
            SummaryRow {
                metric: name.to_string(),
                mean,
                count,
            }
        })
        .collect();

    let mut distances: Vec<i64> = ok.iter().filter_map(|r| r.frame_distance).collect();
    distances.sort_unstable();
    distances.dedup();
    let curve: Vec<CurveRow> = distances
        .into_iter()
        .map(|d| {
            let sel: Vec<&MetricRow> = ok.iter().copied().filter(|r| r.frame_distance == Some(d)).collect();
            CurveRow {
                frame_distance: d,
                pairs: sel.len(),
                mean_l1_warped: mean_of(&sel, |r| r.l1_warped).0,
                mean_l1_pred: mean_of(&sel, |r| r.l1_pred).0,
                mean_ssim_pred: mean_of(&sel, |r| r.ssim_pred).0,
            }
        })
        .collect();

    write_csv(&dir.join("metrics.csv"), &rows)?;
    write_csv(&dir.join("summary.csv"), &summary)?;
    write_csv(&dir.join("distance_curve.csv"), &curve)?;
    Ok(EvaluateReport {
        rows,
        summary,
        curve,
        dir,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- synth

/// Renders a synthetic sequence into `output` using the profile's layout,
/// then re-opens it as a [`SceneIndex`] to check that it loads.
pub fn run_synth(cfg: &SynthConfig, output: &Path, profile: Profile) -> Result<SceneIndex> {
    cfg.validate()?;
    ensure_dir(output)?;
    let frames = cfg.render_frames()?;
    crate::dataset::write_scene(output, profile, &cfg.intrinsics()?, &frames)?;
    SceneIndex::open(output, profile)
}

// ---------------------------------------------------------------- densify

/// Closes one mask PNG, or every `.png` in a directory. Returns the written
/// paths in sorted input order.
pub fn run_densify(input: &Path, output: &Path, radius: usize) -> Result<Vec<PathBuf>> {
    if radius > MAX_DENSIFY_RADIUS {
        return Err(Error::Config(format!("radius {radius} exceeds {MAX_DENSIFY_RADIUS}")));
    }
    let pairs: Vec<(PathBuf, PathBuf)> = if input.is_dir() {
        ensure_dir(output)?;
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .map_err(|e| Error::io(input, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| {
                let name = p.file_name().expect("listed file has a name").to_owned();
                (p, output.join(name))
            })
            .collect()
    } else {
        if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
            ensure_dir(parent)?;
        }
        vec![(input.to_path_buf(), output.to_path_buf())]
    };
    pairs
        .into_iter()
        .map(|(src, dst)| {
            let mask = load_mask_png(&src)?;
            save_mask_png(&densify_mask(&mask, radius), &dst)?;
            Ok(dst)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_pairs_cover_all_distances() {
        let pairs = exhaustive_pairs(5, 2);
        assert_eq!(pairs.len(), 14);
        assert!(pairs.iter().all(|(s, t)| s != t && s.abs_diff(*t) <= 2));
        assert_eq!(pairs[0], (0, 1));
    }

    #[test]
    fn config_from_toml() {
        let cfg = RunConfig::from_toml_str(
            r#"
            profile = "kitti"
            scenes = ["a", "b"]
            output = "results"
            depth_source = "source"
            fusion = "average"
            mask = "sparse"
            densify_radius = 2
            crop = 128
            seed = 9
            max_distance = 2
            pairs_per_scene = 10
            pixel_branch = { kind = "blurred-target", radius = 3 }
            [ssim]
            window = 7
            weighting = { kind = "gaussian", sigma = 1.5 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.profile, Profile::Kitti);
        assert_eq!(cfg.depth_source, DepthSource::Source);
        assert_eq!(cfg.fusion, FusionRule::Average);
        assert_eq!(cfg.ssim.window, 7);
        assert_eq!(cfg.ssim.c1, 1e-4);
        assert_eq!(cfg.pixel_branch, PixelBranch::BlurredTarget { radius: 3 });
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_err()); // no scenes
        cfg.scenes = vec![std::env::temp_dir()];
        assert!(cfg.validate().is_ok());
        cfg.densify_radius = 1000;
        assert!(cfg.validate().is_err());
        cfg.densify_radius = 1;
        cfg.fusion = FusionRule::PredictedMask;
        assert!(cfg.validate().is_err());
    }
}
