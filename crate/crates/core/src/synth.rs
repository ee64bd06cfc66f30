//! Deterministic synthetic GUI-like videos for tests and benchmarks.
//!
//! Scenes stand in for screen recordings: a static background (wallpaper),
//! static chrome regions (toolbars, sidebars), and small dynamic regions
//! whose features change frame to frame (cursor, dialogs, edits). Features
//! are injected directly at grid level so tests control token values
//! exactly; an optional renderer produces RGB frames for exercising the
//! image extraction path end to end.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FeatureGrid;

/// Rectangle in grid coordinates, `[top, top+height) x [left, left+width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.top && i < self.top + self.height && j >= self.left && j < self.left + self.width
    }

    fn fits(&self, grid_height: usize, grid_width: usize) -> bool {
        self.height >= 1
            && self.width >= 1
            && self.top + self.height <= grid_height
            && self.left + self.width <= grid_width
    }
}

/// Region that holds one feature on every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticRegion {
    pub rect: Rect,
    pub feature: Vec<f64>,
}

/// How a dynamic region evolves over frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Frame `t` takes `features[t % features.len()]`.
    Cycle { features: Vec<Vec<f64>> },
    /// A fresh feature per frame, drawn uniformly from `[low, high)` using
    /// the scene seed.
    Random { low: f64, high: f64 },
}

/// Region whose feature follows a per-frame schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicRegion {
    pub rect: Rect,
    pub schedule: Schedule,
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub grid_height: usize,
    pub grid_width: usize,
    pub dim: usize,
    pub frames: usize,
    pub background: Vec<f64>,
    #[serde(default)]
    pub static_regions: Vec<StaticRegion>,
    #[serde(default)]
    pub dynamic_regions: Vec<DynamicRegion>,
    pub seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid_input("scene needs at least one frame"));
        }
        if self.grid_height == 0 || self.grid_width == 0 || self.dim == 0 {
            return Err(Error::invalid_input("scene grid shape must be nonzero"));
        }
        if self.background.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "scene background feature",
                left: self.background.len(),
                right: self.dim,
            });
        }
        for (k, region) in self.static_regions.iter().enumerate() {
            if !region.rect.fits(self.grid_height, self.grid_width) {
                return Err(Error::invalid_input(format!(
                    "static region {k} out of bounds"
                )));
            }
            if region.feature.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    context: "static region feature",
                    left: region.feature.len(),
                    right: self.dim,
                });
            }
        }
        for (k, region) in self.dynamic_regions.iter().enumerate() {
            if !region.rect.fits(self.grid_height, self.grid_width) {
                return Err(Error::invalid_input(format!(
                    "dynamic region {k} out of bounds"
                )));
            }
            if let Schedule::Cycle { features } = &region.schedule {
                if features.is_empty() {
                    return Err(Error::invalid_input(format!(
                        "dynamic region {k} has an empty cycle"
                    )));
                }
                if features.iter().any(|f| f.len() != self.dim) {
                    return Err(Error::DimensionMismatch {
                        context: "dynamic region feature",
                        left: features.iter().map(|f| f.len()).find(|l| *l != self.dim).unwrap(),
                        right: self.dim,
                    });
                }
            }
        }
        Ok(())
    }

    /// Fraction of grid locations untouched by any dynamic region.
    pub fn static_fraction(&self) -> f64 {
        let total = self.grid_height * self.grid_width;
        let dynamic = (0..self.grid_height)
            .flat_map(|i| (0..self.grid_width).map(move |j| (i, j)))
            .filter(|&(i, j)| self.dynamic_regions.iter().any(|r| r.rect.contains(i, j)))
            .count();
        (total - dynamic) as f64 / total as f64
    }

    /// Wallpaper-plus-moving-block scene: a static background with one block
    /// that cycles through `path` positions, carrying a feature orthogonal to
    /// the background. Background fraction stays high, so both pruning passes
    /// have something to remove.
    pub fn moving_block(
        grid_height: usize,
        grid_width: usize,
        frames: usize,
        seed: u64,
    ) -> SceneSpec {
        let dim = 3;
        let background = vec![0.2, 0.2, 0.2];
        // The block walks a short diagonal path; each visited cell becomes a
        // dynamic region cycling between "occupied" and "background".
        let path: Vec<(usize, usize)> = (0..4)
            .map(|k| (k % grid_height.saturating_sub(2).max(1), k % grid_width.saturating_sub(2).max(1)))
            .collect();
        let occupied = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let mut dynamic_regions = Vec::new();
        for (step, &(top, left)) in path.iter().enumerate() {
            let mut features = Vec::with_capacity(path.len());
            for t in 0..path.len() {
                if t == step {
                    features.push(occupied[step % 2].clone());
                } else {
                    features.push(background.clone());
                }
            }
            dynamic_regions.push(DynamicRegion {
                rect: Rect {
                    top,
                    left,
                    height: 2.min(grid_height),
                    width: 2.min(grid_width),
                },
                schedule: Schedule::Cycle { features },
            });
        }
        SceneSpec {
            grid_height,
            grid_width,
            dim,
            frames,
            background,
            static_regions: Vec::new(),
            dynamic_regions,
            seed,
        }
    }
}

/// Feature of a dynamic region on frame `t`. `Random` schedules draw from a
/// stream seeded by `(scene seed, region index)`, so regions are independent
/// and runs reproducible.
fn schedule_feature(spec: &SceneSpec, region_idx: usize, t: usize) -> Vec<f64> {
    match &spec.dynamic_regions[region_idx].schedule {
        Schedule::Cycle { features } => features[t % features.len()].clone(),
        Schedule::Random { low, high } => {
            let mut rng = StdRng::seed_from_u64(
                spec.seed ^ (region_idx as u64).wrapping_mul(0x9e3779b97f4a7c15),
            );
            let mut feature = vec![0.0; spec.dim];
            // Advance to frame t deterministically.
            for _ in 0..=t {
                for slot in feature.iter_mut() {
                    *slot = rng.random_range(*low..*high);
                }
            }
            feature
        }
    }
}

/// Materializes a scene into a feature grid. Later regions paint over
/// earlier ones; dynamic regions paint over static ones.
pub fn generate(spec: &SceneSpec) -> Result<FeatureGrid> {
    spec.validate()?;
    let (h, w, d) = (spec.grid_height, spec.grid_width, spec.dim);
    let mut grid = FeatureGrid::new(
        spec.frames,
        h,
        w,
        d,
        vec![0.0; spec.frames * h * w * d],
    )?;
    for t in 0..spec.frames {
        let dynamic_features: Vec<Vec<f64>> = (0..spec.dynamic_regions.len())
            .map(|k| schedule_feature(spec, k, t))
            .collect();
        for i in 0..h {
            for j in 0..w {
                let mut value = &spec.background;
                for region in &spec.static_regions {
                    if region.rect.contains(i, j) {
                        value = &region.feature;
                    }
                }
                for (k, region) in spec.dynamic_regions.iter().enumerate() {
                    if region.rect.contains(i, j) {
                        value = &dynamic_features[k];
                    }
                }
                grid.feature_mut(t, i, j).copy_from_slice(value);
            }
        }
    }
    Ok(grid)
}

/// Renders a scene to RGB frames, one pixel block of `patch_size^2` per grid
/// cell. Requires `dim == 3`; features are clamped to `[0, 1]` and scaled to
/// `u8`. Feeding these frames through patch-mean extraction at the same
/// patch size recovers the grid up to `u8` quantization.
pub fn render_frames(spec: &SceneSpec, patch_size: usize) -> Result<Vec<image::RgbImage>> {
    spec.validate()?;
    if spec.dim != 3 {
        return Err(Error::invalid_input(format!(
            "rendering needs dim 3 (RGB), got {}",
            spec.dim
        )));
    }
    if patch_size == 0 {
        return Err(Error::invalid_input("patch_size must be nonzero"));
    }
    let grid = generate(spec)?;
    let width = (spec.grid_width * patch_size) as u32;
    let height = (spec.grid_height * patch_size) as u32;
    let mut frames = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let mut img = image::RgbImage::new(width, height);
        for i in 0..spec.grid_height {
            for j in 0..spec.grid_width {
                let f = grid.feature(t, i, j);
                let px = image::Rgb([
                    (f[0].clamp(0.0, 1.0) * 255.0).round() as u8,
                    (f[1].clamp(0.0, 1.0) * 255.0).round() as u8,
                    (f[2].clamp(0.0, 1.0) * 255.0).round() as u8,
                ]);
                for di in 0..patch_size {
                    for dj in 0..patch_size {
                        img.put_pixel(
                            (j * patch_size + dj) as u32,
                            (i * patch_size + di) as u32,
                            px,
                        );
                    }
                }
            }
        }
        frames.push(img);
    }
    Ok(frames)
}
