//! Pruning pipeline: combine spatial and temporal masks, optionally fold
//! adjacent frames, drop pruned tokens, and re-pack the survivors into a
//! contiguous sequence with provenance.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FeatureGrid;
use crate::mask::{CombinedMask, SpatialMask, TemporalMask};
use crate::stp::{spatial_mask, StpConfig};
use crate::ttp::{temporal_mask, TtpConfig};

/// Which pruning passes ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    StpOnly,
    TtpOnly,
    Both,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::StpOnly => write!(f, "stp"),
            Variant::TtpOnly => write!(f, "ttp"),
            Variant::Both => write!(f, "both"),
        }
    }
}

/// Surviving tokens in `(t, i)` order plus where each one came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedTokenSequence {
    dim: usize,
    data: Vec<f64>,
    provenance: Vec<(usize, usize)>,
}

impl PrunedTokenSequence {
    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn token(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    /// `(frame, token index)` pairs, strictly increasing lexicographically.
    pub fn provenance(&self) -> &[(usize, usize)] {
        &self.provenance
    }

    /// Scatters the kept tokens back onto a zero grid of the given shape.
    /// Together with the mask this reconstructs the masked grid exactly.
    pub fn scatter_back(
        &self,
        frames: usize,
        grid_height: usize,
        grid_width: usize,
    ) -> Result<FeatureGrid> {
        let n = grid_height * grid_width;
        let mut data = vec![0.0; frames * n * self.dim];
        for (k, &(t, i)) in self.provenance.iter().enumerate() {
            if t >= frames || i >= n {
                return Err(Error::invalid_input(format!(
                    "provenance ({t}, {i}) outside {frames}x{n} grid"
                )));
            }
            let off = (t * n + i) * self.dim;
            data[off..off + self.dim].copy_from_slice(self.token(k));
        }
        FeatureGrid::new(frames, grid_height, grid_width, self.dim, data)
    }

    /// Writes the packed format: little-endian `{count, dim}` header, then
    /// `count` provenance pairs of `u32`s, then the tokens as 32-bit floats.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.len() as u32).to_le_bytes())?;
        out.write_all(&(self.dim as u32).to_le_bytes())?;
        for &(t, i) in &self.provenance {
            out.write_all(&(t as u32).to_le_bytes())?;
            out.write_all(&(i as u32).to_le_bytes())?;
        }
        for v in &self.data {
            out.write_all(&(*v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut word = [0u8; 4];
        input.read_exact(&mut word)?;
        let count = u32::from_le_bytes(word) as usize;
        input.read_exact(&mut word)?;
        let dim = u32::from_le_bytes(word) as usize;
        let mut provenance = Vec::with_capacity(count);
        for _ in 0..count {
            input.read_exact(&mut word)?;
            let t = u32::from_le_bytes(word) as usize;
            input.read_exact(&mut word)?;
            let i = u32::from_le_bytes(word) as usize;
            provenance.push((t, i));
        }
        let mut data = Vec::with_capacity(count * dim);
        for _ in 0..count * dim {
            input.read_exact(&mut word)?;
            data.push(f32::from_le_bytes(word) as f64);
        }
        Ok(Self {
            dim,
            data,
            provenance,
        })
    }

    pub fn write_binary_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    pub fn read_binary_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

/// Threshold settings a report was produced under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportThresholds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_large: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_t: Option<f64>,
}

/// Per-run pruning statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningReport {
    pub variant: Variant,
    pub merge_adjacent: bool,
    pub frames: usize,
    pub tokens_per_frame: usize,
    pub total_tokens: usize,
    pub kept_tokens: usize,
    pub per_frame_kept: Vec<usize>,
    /// Fraction of tokens kept, `kept / total`, in `[0, 1]`.
    pub reduction_ratio: f64,
    pub thresholds: ReportThresholds,
}

/// Elementwise AND of a spatial and a temporal mask.
///
/// The spatial grid is flattened row-major, so spatial bit `(t, i, j)` meets
/// temporal bit `(t, i * W' + j)`.
pub fn combine(spatial: &SpatialMask, temporal: &TemporalMask) -> Result<CombinedMask> {
    if spatial.frames() != temporal.frames() {
        return Err(Error::DimensionMismatch {
            context: "combine frame counts",
            left: spatial.frames(),
            right: temporal.frames(),
        });
    }
    if spatial.tokens_per_frame() != temporal.tokens_per_frame() {
        return Err(Error::DimensionMismatch {
            context: "combine tokens per frame",
            left: spatial.tokens_per_frame(),
            right: temporal.tokens_per_frame(),
        });
    }
    let frames = spatial.frames();
    let n = spatial.tokens_per_frame();
    let mut bits = Vec::with_capacity(frames * n);
    for t in 0..frames {
        for token in 0..n {
            bits.push(spatial.keep_token(t, token) && temporal.keep(t, token));
        }
    }
    Ok(CombinedMask::from_bits(frames, n, bits))
}

/// Folds pairs of adjacent frames of a spatial mask into one frame each.
///
/// A merged token is kept only when it is kept in both source frames;
/// equivalently it is pruned when pruned in either. With odd `T` the last
/// frame passes through unmerged.
pub fn merge_adjacent_frame_masks(spatial: &SpatialMask) -> SpatialMask {
    let (t_in, h, w) = (spatial.frames(), spatial.height(), spatial.width());
    let t_out = t_in.div_ceil(2);
    let mut merged = SpatialMask::all_keep(t_out, h, w);
    for k in 0..t_out {
        let a = 2 * k;
        let b = 2 * k + 1;
        for i in 0..h {
            for j in 0..w {
                let keep = if b < t_in {
                    spatial.keep(a, i, j) && spatial.keep(b, i, j)
                } else {
                    spatial.keep(a, i, j)
                };
                merged.set(k, i, j, keep);
            }
        }
    }
    merged
}

/// Folds pairs of adjacent frames of a grid into one frame each by averaging
/// features per location. This is the token view the temporal pass and the
/// packer operate on when adjacent-frame merging is enabled. With odd `T`
/// the last frame passes through unchanged.
pub fn merge_adjacent_frames(grid: &FeatureGrid) -> FeatureGrid {
    let (t_in, h, w, d) = (
        grid.frames(),
        grid.grid_height(),
        grid.grid_width(),
        grid.dim(),
    );
    let t_out = t_in.div_ceil(2);
    let n = h * w;
    let mut data = Vec::with_capacity(t_out * n * d);
    for k in 0..t_out {
        let a = 2 * k;
        let b = 2 * k + 1;
        for token in 0..n {
            let ta = grid.token(a, token);
            if b < t_in {
                let tb = grid.token(b, token);
                data.extend(ta.iter().zip(tb.iter()).map(|(x, y)| (x + y) / 2.0));
            } else {
                data.extend_from_slice(ta);
            }
        }
    }
    FeatureGrid::new(t_out, h, w, d, data).expect("merged grid shape is valid")
}

/// Drops pruned tokens and re-packs the survivors in `(t, i)` order.
pub fn pack(grid: &FeatureGrid, mask: &CombinedMask) -> Result<PrunedTokenSequence> {
    if grid.frames() != mask.frames() || grid.tokens_per_frame() != mask.tokens_per_frame() {
        return Err(Error::DimensionMismatch {
            context: "pack grid vs mask tokens",
            left: grid.frames() * grid.tokens_per_frame(),
            right: mask.frames() * mask.tokens_per_frame(),
        });
    }
    let n = grid.tokens_per_frame();
    let mut data = Vec::new();
    let mut provenance = Vec::new();
    for t in 0..grid.frames() {
        for i in 0..n {
            if mask.keep(t, i) {
                data.extend_from_slice(grid.token(t, i));
                provenance.push((t, i));
            }
        }
    }
    Ok(PrunedTokenSequence {
        dim: grid.dim(),
        data,
        provenance,
    })
}

/// Runs the requested pruning passes over a grid and packs the survivors.
///
/// A missing pass contributes an all-ones mask, so single-variant ablations
/// run through the same code path. With `merge_adjacent` the spatial mask is
/// computed on the original frames and then folded, while the temporal pass
/// and the packer operate on the merged token view.
pub fn prune_pipeline(
    grid: &FeatureGrid,
    stp_cfg: Option<&StpConfig>,
    ttp_cfg: Option<&TtpConfig>,
    merge_adjacent: bool,
) -> Result<(PrunedTokenSequence, PruningReport)> {
    let variant = match (stp_cfg, ttp_cfg) {
        (Some(_), Some(_)) => Variant::Both,
        (Some(_), None) => Variant::StpOnly,
        (None, Some(_)) => Variant::TtpOnly,
        (None, None) => {
            return Err(Error::invalid_input(
                "at least one of the spatial and temporal configs is required",
            ))
        }
    };

    let merged_storage;
    let token_grid = if merge_adjacent {
        merged_storage = merge_adjacent_frames(grid);
        &merged_storage
    } else {
        grid
    };

    let spatial = match stp_cfg {
        Some(cfg) => {
            let m = spatial_mask(grid, cfg)?;
            if merge_adjacent {
                merge_adjacent_frame_masks(&m)
            } else {
                m
            }
        }
        None => SpatialMask::all_keep(
            token_grid.frames(),
            token_grid.grid_height(),
            token_grid.grid_width(),
        ),
    };
    let temporal = match ttp_cfg {
        Some(cfg) => temporal_mask(token_grid, cfg)?,
        None => TemporalMask::all_keep(token_grid.frames(), token_grid.tokens_per_frame()),
    };

    let mask = combine(&spatial, &temporal)?;
    let packed = pack(token_grid, &mask)?;

    let total = token_grid.total_tokens();
    let kept = mask.keep_count();
    let report = PruningReport {
        variant,
        merge_adjacent,
        frames: token_grid.frames(),
        tokens_per_frame: token_grid.tokens_per_frame(),
        total_tokens: total,
        kept_tokens: kept,
        per_frame_kept: (0..token_grid.frames())
            .map(|t| mask.frame_keep_count(t))
            .collect(),
        reduction_ratio: kept as f64 / total as f64,
        thresholds: ReportThresholds {
            tau_s: stp_cfg.map(|c| c.tau_s),
            tau_large: stp_cfg.map(|c| c.tau_large),
            tau_t: ttp_cfg.map(|c| c.tau_t),
        },
    };
    Ok((packed, report))
}
