//! Ingestion of interaction logs into step-level keyframe videos and
//! extraction of feature grids from those keyframes.
//!
//! A trajectory is an instruction plus one representative screenshot per
//! interaction step, ordered in time. Timestamps are step indices in
//! seconds: the video renders at 1 FPS, and judgment intervals are expressed
//! in those seconds. Feature extraction is pluggable; the default extractor
//! is the per-patch mean RGB, which is deterministic and dependency-free.
//! Real encoder features enter through the same [`FeatureExtractor`] seam.

use std::io::Cursor;
use std::path::Path;

use base64::Engine;
use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Interval;
use crate::grid::FeatureGrid;

/// Where a trajectory was recorded.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Platform {
    UbuntuAgent,
    UbuntuHuman,
    MacWin,
    Android,
    Other,
}

impl Platform {
    /// Canonical row order for reports.
    pub const ALL: [Platform; 5] = [
        Platform::UbuntuAgent,
        Platform::UbuntuHuman,
        Platform::MacWin,
        Platform::Android,
        Platform::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Platform::UbuntuAgent => "ubuntu-agent",
            Platform::UbuntuHuman => "ubuntu-human",
            Platform::MacWin => "mac-win",
            Platform::Android => "android",
            Platform::Other => "other",
        }
    }
}

/// A keyframe image, either a file path (relative to the manifest) or
/// embedded bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Keyframe {
    Path(String),
    Bytes {
        #[serde(
            rename = "bytes",
            serialize_with = "ser_base64",
            deserialize_with = "de_base64"
        )]
        data: Vec<u8>,
    },
}

fn ser_base64<S: serde::Serializer>(data: &Vec<u8>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(data))
}

fn de_base64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<u8>, D::Error> {
    let text = String::deserialize(d)?;
    base64::engine::general_purpose::STANDARD
        .decode(text)
        .map_err(serde::de::Error::custom)
}

impl Keyframe {
    /// Decodes the image, resolving paths against `base`.
    pub fn decode(&self, base: &Path) -> Result<RgbImage> {
        let img = match self {
            Keyframe::Path(p) => image::open(base.join(p)).map_err(|e| {
                Error::Ingestion(format!("cannot decode keyframe {p}: {e}"))
            })?,
            Keyframe::Bytes { data } => image::load_from_memory(data).map_err(|e| {
                Error::Ingestion(format!("cannot decode embedded keyframe: {e}"))
            })?,
        };
        Ok(img.to_rgb8())
    }
}

/// One interaction step: the screenshot captured after the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub image: Keyframe,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    /// Seconds from trajectory start; step `k` sits at `k` seconds (1 FPS).
    pub t: f64,
}

/// Success judgment, optionally with the interval where the first error
/// shows, in 1 FPS seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentLabel {
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_interval: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub justification: Option<String>,
}

/// Instruction plus ordered step keyframes plus optional judgment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub instruction: String,
    pub platform: Platform,
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<JudgmentLabel>,
}

impl TrajectoryRecord {
    /// Video duration in seconds at 1 FPS.
    pub fn duration(&self) -> f64 {
        self.steps.len() as f64
    }

    /// Structural invariants: at least one step, strictly increasing step
    /// indices, label interval within the video.
    pub fn validate_structure(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Ingestion(
                "trajectory has no steps".to_string(),
            ));
        }
        for pair in self.steps.windows(2) {
            if pair[1].index <= pair[0].index {
                return Err(Error::Ingestion(format!(
                    "step indices must be strictly increasing, got {} then {}",
                    pair[0].index, pair[1].index
                )));
            }
        }
        if let Some(label) = &self.label {
            if let Some(interval) = &label.error_interval {
                if interval.end() > self.duration() {
                    return Err(Error::Ingestion(format!(
                        "error interval ends at {} but the video lasts {} seconds",
                        interval.end(),
                        self.duration()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full validation: structure plus decodability of every keyframe.
    pub fn validate(&self, base: &Path) -> Result<()> {
        self.validate_structure()?;
        for step in &self.steps {
            step.image.decode(base).map_err(|e| {
                Error::Ingestion(format!("step {}: {e}", step.index))
            })?;
        }
        Ok(())
    }
}

/// A not-yet-normalized step coming out of a recorder or dataset converter.
#[derive(Debug, Clone, Default)]
pub struct RawStep {
    pub screenshot: Option<Keyframe>,
    pub action: Option<String>,
}

/// Normalizes raw steps into a keyframe video: one keyframe per step, in
/// order, with step `k` stamped at `k` seconds. Nothing is dropped here;
/// frame budgets are applied by [`uniform_sample`].
pub fn build_keyframe_video(
    instruction: impl Into<String>,
    platform: Platform,
    raw_steps: Vec<RawStep>,
) -> Result<TrajectoryRecord> {
    if raw_steps.is_empty() {
        return Err(Error::Ingestion("trajectory has no steps".to_string()));
    }
    let mut steps = Vec::with_capacity(raw_steps.len());
    for (k, raw) in raw_steps.into_iter().enumerate() {
        let image = raw.screenshot.ok_or_else(|| {
            Error::Ingestion(format!("step {k} is missing its screenshot"))
        })?;
        steps.push(StepRecord {
            index: k,
            image,
            action: raw.action,
            t: k as f64,
        });
    }
    Ok(TrajectoryRecord {
        instruction: instruction.into(),
        platform,
        steps,
        label: None,
    })
}

/// Uniformly samples a trajectory down to at most `max_frames` steps.
///
/// For `L > max_frames` the kept indices are
/// `round(k * (L-1) / (max_frames-1))` for `k = 0 .. max_frames-1`, which
/// always includes the first and last frame and is strictly increasing.
/// Original timestamps and step indices are preserved. Sampling an already
/// short record is the identity, so the operation is idempotent.
pub fn uniform_sample(record: &TrajectoryRecord, max_frames: usize) -> Result<TrajectoryRecord> {
    if max_frames < 2 {
        return Err(Error::invalid_input("max_frames must be at least 2"));
    }
    let len = record.steps.len();
    if len <= max_frames {
        return Ok(record.clone());
    }
    let steps = (0..max_frames)
        .map(|k| {
            let idx = (k as f64 * (len - 1) as f64 / (max_frames - 1) as f64).round() as usize;
            record.steps[idx].clone()
        })
        .collect();
    Ok(TrajectoryRecord {
        instruction: record.instruction.clone(),
        platform: record.platform,
        steps,
        label: record.label.clone(),
    })
}

/// Rectangular block of RGB pixels handed to a [`FeatureExtractor`].
#[derive(Debug, Clone)]
pub struct Patch {
    pub width: usize,
    pub height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Patch {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// Maps a patch of pixels to a feature vector.
pub trait FeatureExtractor {
    fn dim(&self) -> usize;
    fn extract(&self, patch: &Patch) -> Vec<f64>;
}

/// Default extractor: per-channel mean scaled to `[0, 1]`, `D = 3`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanRgb;

impl FeatureExtractor for MeanRgb {
    fn dim(&self) -> usize {
        3
    }

    fn extract(&self, patch: &Patch) -> Vec<f64> {
        let mut sums = [0.0f64; 3];
        for px in patch.pixels() {
            for c in 0..3 {
                sums[c] += px[c] as f64;
            }
        }
        let count = (patch.width * patch.height) as f64 * 255.0;
        sums.iter().map(|s| s / count).collect()
    }
}

fn patch_at(img: &RgbImage, top: usize, left: usize, patch_size: usize) -> Patch {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut pixels = Vec::with_capacity(patch_size * patch_size);
    for y in 0..patch_size {
        for x in 0..patch_size {
            // Edge replication for patches that overhang the image.
            let sy = (top + y).min(h - 1);
            let sx = (left + x).min(w - 1);
            pixels.push(img.get_pixel(sx as u32, sy as u32).0);
        }
    }
    Patch {
        width: patch_size,
        height: patch_size,
        pixels,
    }
}

fn extract_frame(
    img: &RgbImage,
    extractor: &dyn FeatureExtractor,
    patch_size: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    let grid_h = (img.height() as usize).div_ceil(patch_size);
    let grid_w = (img.width() as usize).div_ceil(patch_size);
    for i in 0..grid_h {
        for j in 0..grid_w {
            let patch = patch_at(img, i * patch_size, j * patch_size, patch_size);
            let feature = extractor.extract(&patch);
            if feature.len() != extractor.dim() {
                return Err(Error::invalid_input(format!(
                    "extractor returned {} values, declared dim {}",
                    feature.len(),
                    extractor.dim()
                )));
            }
            out.extend(feature);
        }
    }
    Ok(())
}

/// Extracts a feature grid from a trajectory's keyframes.
///
/// All keyframes must share one resolution. Resolutions that do not divide
/// by `patch_size` are padded to the next multiple by replicating edge
/// pixels, so UI content at the borders is never cropped away.
pub fn extract_grid(
    record: &TrajectoryRecord,
    extractor: &dyn FeatureExtractor,
    patch_size: usize,
    base: &Path,
) -> Result<FeatureGrid> {
    if patch_size == 0 {
        return Err(Error::invalid_input("patch_size must be nonzero"));
    }
    if record.steps.is_empty() {
        return Err(Error::Ingestion("trajectory has no steps".to_string()));
    }
    let mut data = Vec::new();
    let mut resolution: Option<(u32, u32)> = None;
    for step in &record.steps {
        let img = step
            .image
            .decode(base)
            .map_err(|e| Error::Ingestion(format!("step {}: {e}", step.index)))?;
        match resolution {
            None => resolution = Some((img.width(), img.height())),
            Some(res) if res != (img.width(), img.height()) => {
                return Err(Error::invalid_input(format!(
                    "mixed keyframe resolutions: {}x{} vs {}x{}",
                    res.0,
                    res.1,
                    img.width(),
                    img.height()
                )));
            }
            _ => {}
        }
        extract_frame(&img, extractor, patch_size, &mut data)?;
    }
    let (w, h) = resolution.unwrap();
    FeatureGrid::new(
        record.steps.len(),
        (h as usize).div_ceil(patch_size),
        (w as usize).div_ceil(patch_size),
        extractor.dim(),
        data,
    )
}

/// Re-encodes every keyframe at 1280x720, embedding the resized images as
/// PNG bytes. Reproduces a fixed-resolution rendering setup; ingestion
/// itself accepts any resolution.
pub fn resize_to_720p(record: &TrajectoryRecord, base: &Path) -> Result<TrajectoryRecord> {
    let mut out = record.clone();
    for step in out.steps.iter_mut() {
        let img = step.image.decode(base)?;
        let resized = image::imageops::resize(&img, 1280, 720, image::imageops::FilterType::Triangle);
        let mut bytes = Vec::new();
        resized
            .write_to(&mut Cursor::new(&mut bytes), image::ImageFormat::Png)
            .map_err(Error::Image)?;
        step.image = Keyframe::Bytes { data: bytes };
    }
    Ok(out)
}

/// Parses a trajectory manifest: a JSON array of records, or a single
/// record object.
pub fn parse_manifest(text: &str) -> Result<Vec<TrajectoryRecord>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let records = if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    };
    Ok(records)
}

pub fn load_manifest(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    parse_manifest(&std::fs::read_to_string(path)?)
}

/// Canonical manifest serialization; parsing and re-serializing a manifest
/// produced here is byte-identical.
pub fn manifest_to_string(records: &[TrajectoryRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn save_manifest(path: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    std::fs::write(path, manifest_to_string(records)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_bytes(img: &RgbImage) -> Vec<u8> {
        let mut bytes = Vec::new();
        img.write_to(&mut Cursor::new(&mut bytes), image::ImageFormat::Png)
            .unwrap();
        bytes
    }

    fn solid(width: u32, height: u32, rgb: [u8; 3]) -> Keyframe {
        let img = RgbImage::from_pixel(width, height, image::Rgb(rgb));
        Keyframe::Bytes {
            data: png_bytes(&img),
        }
    }

    fn raw_steps(n: usize) -> Vec<RawStep> {
        (0..n)
            .map(|k| RawStep {
                screenshot: Some(solid(8, 8, [k as u8, 0, 0])),
                action: None,
            })
            .collect()
    }

    #[test]
    fn build_assigns_one_fps_timestamps() {
        let rec = build_keyframe_video("do things", Platform::Other, raw_steps(3)).unwrap();
        assert_eq!(rec.steps.len(), 3);
        let ts: Vec<f64> = rec.steps.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 1.0, 2.0]);
        assert_eq!(rec.steps[2].index, 2);
    }

    #[test]
    fn build_rejects_empty_and_missing_screenshot() {
        assert!(build_keyframe_video("x", Platform::Other, vec![]).is_err());
        let mut steps = raw_steps(3);
        steps[1].screenshot = None;
        let err = build_keyframe_video("x", Platform::Other, steps).unwrap_err();
        assert!(err.to_string().contains("step 1"));
    }

    #[test]
    fn build_preserves_long_trajectories() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(150)).unwrap();
        assert_eq!(rec.steps.len(), 150);
    }

    #[test]
    fn sample_identity_when_short() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(5)).unwrap();
        let sampled = uniform_sample(&rec, 100).unwrap();
        assert_eq!(sampled, rec);
    }

    #[test]
    fn sample_five_to_three() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(5)).unwrap();
        let sampled = uniform_sample(&rec, 3).unwrap();
        let indices: Vec<usize> = sampled.steps.iter().map(|s| s.index).collect();
        assert_eq!(indices, vec![0, 2, 4]);
        // Original timestamps preserved.
        let ts: Vec<f64> = sampled.steps.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn sample_199_to_100() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(199)).unwrap();
        let sampled = uniform_sample(&rec, 100).unwrap();
        assert_eq!(sampled.steps.len(), 100);
        let indices: Vec<usize> = sampled.steps.iter().map(|s| s.index).collect();
        assert_eq!(indices[0], 0);
        assert_eq!(*indices.last().unwrap(), 198);
        assert!(indices.windows(2).all(|p| p[0] < p[1]));
        // Matches the sampling formula directly.
        for (k, idx) in indices.iter().enumerate() {
            let expected = (k as f64 * 198.0 / 99.0).round() as usize;
            assert_eq!(*idx, expected);
        }
    }

    #[test]
    fn sample_idempotent() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(37)).unwrap();
        let once = uniform_sample(&rec, 10).unwrap();
        let twice = uniform_sample(&once, 10).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn sample_rejects_tiny_budget() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(3)).unwrap();
        assert!(uniform_sample(&rec, 1).is_err());
    }

    #[test]
    fn extract_solid_red() {
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![StepRecord {
                index: 0,
                image: solid(32, 32, [255, 0, 0]),
                action: None,
                t: 0.0,
            }],
            label: None,
        };
        let grid = extract_grid(&rec, &MeanRgb, 16, Path::new(".")).unwrap();
        assert_eq!(
            (grid.frames(), grid.grid_height(), grid.grid_width(), grid.dim()),
            (1, 2, 2, 3)
        );
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(grid.feature(0, i, j), &[1.0, 0.0, 0.0]);
            }
        }
    }

    #[test]
    fn extract_half_black_half_white() {
        let mut img = RgbImage::new(32, 32);
        for y in 0..32 {
            for x in 0..32 {
                let v = if x < 16 { 0 } else { 255 };
                img.put_pixel(x, y, image::Rgb([v, v, v]));
            }
        }
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![StepRecord {
                index: 0,
                image: Keyframe::Bytes {
                    data: png_bytes(&img),
                },
                action: None,
                t: 0.0,
            }],
            label: None,
        };
        let grid = extract_grid(&rec, &MeanRgb, 16, Path::new(".")).unwrap();
        assert_eq!(grid.feature(0, 0, 0), &[0.0, 0.0, 0.0]);
        assert_eq!(grid.feature(0, 0, 1), &[1.0, 1.0, 1.0]);
        assert_eq!(grid.feature(0, 1, 0), &[0.0, 0.0, 0.0]);
        assert_eq!(grid.feature(0, 1, 1), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn extract_matches_pixel_mean_oracle() {
        // Pseudo-random image, compared against direct pixel averaging.
        let mut img = RgbImage::new(24, 16);
        let mut state = 12345u32;
        for y in 0..16 {
            for x in 0..24 {
                state = state.wrapping_mul(1664525).wrapping_add(1013904223);
                let b = state.to_le_bytes();
                img.put_pixel(x, y, image::Rgb([b[0], b[1], b[2]]));
            }
        }
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![StepRecord {
                index: 0,
                image: Keyframe::Bytes {
                    data: png_bytes(&img),
                },
                action: None,
                t: 0.0,
            }],
            label: None,
        };
        let grid = extract_grid(&rec, &MeanRgb, 8, Path::new(".")).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let mut sums = [0.0f64; 3];
                for y in 0..8 {
                    for x in 0..8 {
                        let px = img.get_pixel((j * 8 + x) as u32, (i * 8 + y) as u32).0;
                        for c in 0..3 {
                            sums[c] += px[c] as f64;
                        }
                    }
                }
                let feature = grid.feature(0, i, j);
                for c in 0..3 {
                    assert!((feature[c] - sums[c] / (64.0 * 255.0)).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn extract_pads_with_edge_replication() {
        // 20x16 image, patch 16: right patch column is pixels 16..31 with
        // x clamped to 19; make column 19 white and the rest black.
        let mut img = RgbImage::new(20, 16);
        for y in 0..16 {
            img.put_pixel(19, y, image::Rgb([255, 255, 255]));
        }
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![StepRecord {
                index: 0,
                image: Keyframe::Bytes {
                    data: png_bytes(&img),
                },
                action: None,
                t: 0.0,
            }],
            label: None,
        };
        let grid = extract_grid(&rec, &MeanRgb, 16, Path::new(".")).unwrap();
        assert_eq!((grid.grid_height(), grid.grid_width()), (1, 2));
        // Right patch: real columns 16..19 (one white) + 12 replicated
        // copies of white column 19, so 13 white columns of 16.
        let expected = 13.0 / 16.0;
        let got = grid.feature(0, 0, 1);
        assert!((got[0] - expected).abs() <= 1e-9, "got {got:?}");
    }

    #[test]
    fn extract_rejects_mixed_resolutions() {
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![
                StepRecord {
                    index: 0,
                    image: solid(16, 16, [0, 0, 0]),
                    action: None,
                    t: 0.0,
                },
                StepRecord {
                    index: 1,
                    image: solid(32, 16, [0, 0, 0]),
                    action: None,
                    t: 1.0,
                },
            ],
            label: None,
        };
        assert!(matches!(
            extract_grid(&rec, &MeanRgb, 16, Path::new(".")),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn extract_rejects_undecodable() {
        let rec = TrajectoryRecord {
            instruction: "x".into(),
            platform: Platform::Other,
            steps: vec![StepRecord {
                index: 0,
                image: Keyframe::Bytes {
                    data: vec![1, 2, 3],
                },
                action: None,
                t: 0.0,
            }],
            label: None,
        };
        assert!(matches!(
            extract_grid(&rec, &MeanRgb, 16, Path::new(".")),
            Err(Error::Ingestion(_))
        ));
    }

    #[test]
    fn per_frame_extraction_equals_slice() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(4)).unwrap();
        let full = extract_grid(&rec, &MeanRgb, 4, Path::new(".")).unwrap();
        for t in 0..4 {
            let single = TrajectoryRecord {
                instruction: rec.instruction.clone(),
                platform: rec.platform,
                steps: vec![rec.steps[t].clone()],
                label: None,
            };
            let one = extract_grid(&single, &MeanRgb, 4, Path::new(".")).unwrap();
            assert_eq!(one.frame(0).data(), full.frame(t).data());
        }
    }

    #[test]
    fn manifest_round_trip_is_byte_identical() {
        let mut rec = build_keyframe_video("open the editor", Platform::UbuntuHuman, raw_steps(2))
            .unwrap();
        rec.label = Some(JudgmentLabel {
            success: false,
            error_interval: Some(Interval::new(1.0, 2.0).unwrap()),
            justification: Some("wrong file opened".into()),
        });
        let records = vec![rec];
        let text = manifest_to_string(&records).unwrap();
        let parsed = parse_manifest(&text).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(manifest_to_string(&parsed).unwrap(), text);
    }

    #[test]
    fn manifest_accepts_single_object() {
        let rec = build_keyframe_video("x", Platform::Android, raw_steps(1)).unwrap();
        let text = serde_json::to_string(&rec).unwrap();
        let parsed = parse_manifest(&text).unwrap();
        assert_eq!(parsed.len(), 1);
    }

    #[test]
    fn validate_checks_interval_and_indices() {
        let mut rec = build_keyframe_video("x", Platform::Other, raw_steps(3)).unwrap();
        rec.label = Some(JudgmentLabel {
            success: false,
            error_interval: Some(Interval::new(2.0, 5.0).unwrap()),
            justification: None,
        });
        assert!(rec.validate_structure().is_err());

        let mut rec = build_keyframe_video("x", Platform::Other, raw_steps(3)).unwrap();
        rec.steps[2].index = 1;
        assert!(rec.validate_structure().is_err());
    }

    #[test]
    fn resize_to_720p_produces_fixed_resolution() {
        let rec = build_keyframe_video("x", Platform::Other, raw_steps(2)).unwrap();
        let resized = resize_to_720p(&rec, Path::new(".")).unwrap();
        for step in &resized.steps {
            let img = step.image.decode(Path::new(".")).unwrap();
            assert_eq!((img.width(), img.height()), (1280, 720));
        }
    }
}
