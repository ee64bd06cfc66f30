//! Spatial token pruning.
//!
//! Each frame is treated as a 4-connected patch graph: two neighboring
//! patches are joined when the Euclidean distance between their features is
//! strictly below `tau_s`. Connected components come from union-find, and any
//! component whose size strictly exceeds `tau_large` is pruned wholesale.
//! Large feature-homogeneous regions (wallpaper, empty panels, window
//! chrome) form exactly such components, while small UI elements survive.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::{l2_distance, FeatureGrid, FrameView};
use crate::mask::SpatialMask;

/// Thresholds for spatial pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StpConfig {
    /// Edge threshold: neighbors closer than this are merged.
    pub tau_s: f64,
    /// Components strictly larger than this are pruned.
    pub tau_large: usize,
}

impl StpConfig {
    pub const DEFAULT_TAU_S: f64 = 0.3;
    pub const DEFAULT_TAU_LARGE: usize = 40;

    pub fn new(tau_s: f64, tau_large: usize) -> Result<Self> {
        if !tau_s.is_finite() {
            return Err(Error::invalid_config("tau_s must be finite"));
        }
        if tau_large < 1 {
            return Err(Error::invalid_config("tau_large must be at least 1"));
        }
        Ok(Self { tau_s, tau_large })
    }
}

impl Default for StpConfig {
    fn default() -> Self {
        Self {
            tau_s: Self::DEFAULT_TAU_S,
            tau_large: Self::DEFAULT_TAU_LARGE,
        }
    }
}

/// Distances between 4-neighbors within one frame.
///
/// `horizontal` has shape `H' x (W'-1)`: entry `(i, j)` is the distance
/// between patches `(i, j)` and `(i, j+1)`. `vertical` has shape
/// `(H'-1) x W'`: entry `(i, j)` is the distance between `(i, j)` and
/// `(i+1, j)`. Degenerate axes yield empty arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborDistances {
    height: usize,
    width: usize,
    horizontal: Vec<f64>,
    vertical: Vec<f64>,
}

impl NeighborDistances {
    pub fn horizontal(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.height && j + 1 < self.width);
        self.horizontal[i * (self.width - 1) + j]
    }

    pub fn vertical(&self, i: usize, j: usize) -> f64 {
        assert!(i + 1 < self.height && j < self.width);
        self.vertical[i * self.width + j]
    }

    pub fn horizontal_slice(&self) -> &[f64] {
        &self.horizontal
    }

    pub fn vertical_slice(&self) -> &[f64] {
        &self.vertical
    }
}

/// Computes the horizontal and vertical neighbor distances of one frame.
pub fn neighbor_distances(frame: &FrameView<'_>) -> NeighborDistances {
    let (h, w) = (frame.height(), frame.width());
    let mut horizontal = Vec::with_capacity(h * w.saturating_sub(1));
    let mut vertical = Vec::with_capacity(h.saturating_sub(1) * w);
    for i in 0..h {
        for j in 0..w - 1 {
            // Same dim by construction, unwrap is safe.
            horizontal.push(l2_distance(frame.feature(i, j), frame.feature(i, j + 1)).unwrap());
        }
    }
    for i in 0..h - 1 {
        for j in 0..w {
            vertical.push(l2_distance(frame.feature(i, j), frame.feature(i + 1, j)).unwrap());
        }
    }
    NeighborDistances {
        height: h,
        width: w,
        horizontal,
        vertical,
    }
}

/// Partition of one frame's patches into connected components.
///
/// Labels are canonical: every patch carries the smallest flattened index of
/// its component, so the partition is deterministic regardless of union
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    height: usize,
    width: usize,
    labels: Vec<usize>,
    sizes: HashMap<usize, usize>,
}

impl ComponentLabeling {
    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[i * self.width + j]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Size of the component with the given canonical label.
    pub fn size_of(&self, label: usize) -> usize {
        self.sizes.get(&label).copied().unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &HashMap<usize, usize> {
        &self.sizes
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            // Path halving.
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Connected components of one frame under the `tau_s` edge rule.
///
/// An edge exists between 4-neighbors whose feature distance is strictly
/// below `tau_s`; a pair at exactly `tau_s` is not connected.
pub fn build_components(frame: &FrameView<'_>, tau_s: f64) -> Result<ComponentLabeling> {
    if !tau_s.is_finite() {
        return Err(Error::invalid_config("tau_s must be finite"));
    }
    let (h, w) = (frame.height(), frame.width());
    let n = h * w;
    let dists = neighbor_distances(frame);
    let mut uf = UnionFind::new(n);
    for i in 0..h {
        for j in 0..w - 1 {
            if dists.horizontal(i, j) < tau_s {
                uf.union(i * w + j, i * w + j + 1);
            }
        }
    }
    for i in 0..h - 1 {
        for j in 0..w {
            if dists.vertical(i, j) < tau_s {
                uf.union(i * w + j, (i + 1) * w + j);
            }
        }
    }

    // Canonicalize: label of a component is its smallest member index.
    let mut min_member = vec![usize::MAX; n];
    for idx in 0..n {
        let root = uf.find(idx);
        if idx < min_member[root] {
            min_member[root] = idx;
        }
    }
    let mut labels = vec![0usize; n];
    let mut sizes = HashMap::new();
    for (idx, slot) in labels.iter_mut().enumerate() {
        let label = min_member[uf.find(idx)];
        *slot = label;
        *sizes.entry(label).or_insert(0) += 1;
    }
    Ok(ComponentLabeling {
        height: h,
        width: w,
        labels,
        sizes,
    })
}

/// Spatial keep mask for every frame of a grid.
///
/// A patch is pruned exactly when its component size strictly exceeds
/// `tau_large`; a component of exactly `tau_large` patches survives. Frames
/// are independent.
pub fn spatial_mask(grid: &FeatureGrid, cfg: &StpConfig) -> Result<SpatialMask> {
    StpConfig::new(cfg.tau_s, cfg.tau_large)?;
    let (t_count, h, w) = (grid.frames(), grid.grid_height(), grid.grid_width());
    let mut bits = Vec::with_capacity(t_count * h * w);
    for t in 0..t_count {
        let labeling = build_components(&grid.frame(t), cfg.tau_s)?;
        for idx in 0..h * w {
            let label = labeling.labels[idx];
            bits.push(labeling.size_of(label) <= cfg.tau_large);
        }
    }
    SpatialMask::from_bits(t_count, h, w, bits)
}
