//! Shared fixtures for the pruning benchmarks.

use vidtok_core::grid::FeatureGrid;
use vidtok_core::synth::{generate, SceneSpec};

/// Synthetic desk-scale scene: a 720p-like patch grid with a static
/// background and one small animated block.
pub fn scene_grid(grid_height: usize, grid_width: usize, frames: usize) -> FeatureGrid {
    generate(&SceneSpec::moving_block(grid_height, grid_width, frames, 0xBE7C))
        .expect("bench scene is valid")
}
