//! Patch-feature grids for keyframe videos and the numeric primitives the
//! pruning passes are built on.
//!
//! A [`FeatureGrid`] holds one feature vector per spatial patch per frame,
//! laid out `(t, i, j, d)` row-major. Tokens are addressed either by grid
//! coordinates `(i, j)` or by the flattened per-frame index `i * W' + j`.
//! All distances and similarities are computed in `f64`: the temporal
//! threshold sits close to the cosine ceiling and single precision flips
//! keep/prune decisions there.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GRID_MAGIC: &[u8; 4] = b"EVGR";
const GRID_VERSION: u32 = 1;

/// Dense `T x H' x W' x D` patch-feature tensor for a keyframe video.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    frames: usize,
    grid_height: usize,
    grid_width: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureGrid {
    /// Builds a grid from raw data in `(t, i, j, d)` row-major order.
    ///
    /// Rejects empty shapes, a data length that does not equal
    /// `T * H' * W' * D`, and non-finite values.
    pub fn new(
        frames: usize,
        grid_height: usize,
        grid_width: usize,
        dim: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        if frames == 0 || grid_height == 0 || grid_width == 0 || dim == 0 {
            return Err(Error::invalid_input(format!(
                "grid shape must be nonzero, got {frames}x{grid_height}x{grid_width}x{dim}"
            )));
        }
        let expected = frames * grid_height * grid_width * dim;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "grid data length",
                left: data.len(),
                right: expected,
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid_input("grid data contains NaN or Inf"));
        }
        Ok(Self {
            frames,
            grid_height,
            grid_width,
            dim,
            data,
        })
    }

    /// Grid filled with a single value, mostly for tests and padding.
    pub fn filled(
        frames: usize,
        grid_height: usize,
        grid_width: usize,
        dim: usize,
        value: f64,
    ) -> Result<Self> {
        let len = frames * grid_height * grid_width * dim;
        Self::new(frames, grid_height, grid_width, dim, vec![value; len])
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn grid_height(&self) -> usize {
        self.grid_height
    }

    pub fn grid_width(&self) -> usize {
        self.grid_width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Tokens per frame, `H' * W'`.
    pub fn tokens_per_frame(&self) -> usize {
        self.grid_height * self.grid_width
    }

    /// Total token count, `T * H' * W'`.
    pub fn total_tokens(&self) -> usize {
        self.frames * self.tokens_per_frame()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, t: usize, i: usize, j: usize) -> usize {
        ((t * self.grid_height + i) * self.grid_width + j) * self.dim
    }

    /// Feature vector of patch `(i, j)` in frame `t`. Panics out of range.
    pub fn feature(&self, t: usize, i: usize, j: usize) -> &[f64] {
        assert!(t < self.frames && i < self.grid_height && j < self.grid_width);
        let off = self.offset(t, i, j);
        &self.data[off..off + self.dim]
    }

    /// Mutable feature vector of patch `(i, j)` in frame `t`.
    pub fn feature_mut(&mut self, t: usize, i: usize, j: usize) -> &mut [f64] {
        assert!(t < self.frames && i < self.grid_height && j < self.grid_width);
        let off = self.offset(t, i, j);
        let dim = self.dim;
        &mut self.data[off..off + dim]
    }

    /// Token `idx` of frame `t`, where `idx = i * W' + j`.
    pub fn token(&self, t: usize, idx: usize) -> &[f64] {
        assert!(t < self.frames && idx < self.tokens_per_frame());
        let off = (t * self.tokens_per_frame() + idx) * self.dim;
        &self.data[off..off + self.dim]
    }

    /// Borrowed view of a single frame.
    pub fn frame(&self, t: usize) -> FrameView<'_> {
        assert!(t < self.frames, "frame index {t} out of range");
        let per_frame = self.tokens_per_frame() * self.dim;
        FrameView {
            height: self.grid_height,
            width: self.grid_width,
            dim: self.dim,
            data: &self.data[t * per_frame..(t + 1) * per_frame],
        }
    }

    /// Writes the binary grid format: little-endian header
    /// `{magic "EVGR", version, T, H', W', D}` followed by the features as
    /// 32-bit floats.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(GRID_MAGIC)?;
        for v in [
            GRID_VERSION,
            self.frames as u32,
            self.grid_height as u32,
            self.grid_width as u32,
            self.dim as u32,
        ] {
            out.write_all(&v.to_le_bytes())?;
        }
        for v in &self.data {
            out.write_all(&(*v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary grid format written by [`FeatureGrid::write_binary`].
    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != GRID_MAGIC {
            return Err(Error::Format(format!(
                "bad grid magic {magic:?}, expected {GRID_MAGIC:?}"
            )));
        }
        let mut word = [0u8; 4];
        let mut header = [0u32; 5];
        for slot in header.iter_mut() {
            input.read_exact(&mut word)?;
            *slot = u32::from_le_bytes(word);
        }
        let [version, frames, height, width, dim] = header;
        if version != GRID_VERSION {
            return Err(Error::Format(format!(
                "unsupported grid version {version}"
            )));
        }
        let count = frames as usize * height as usize * width as usize * dim as usize;
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            input.read_exact(&mut word)?;
            data.push(f32::from_le_bytes(word) as f64);
        }
        // A well-formed file ends exactly after the payload.
        let mut trailing = [0u8; 1];
        if input.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after grid payload".into()));
        }
        FeatureGrid::new(
            frames as usize,
            height as usize,
            width as usize,
            dim as usize,
            data,
        )
    }

    pub fn write_binary_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    pub fn read_binary_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(file))
    }

    /// Writes the debuggable manifest variant: a JSON header next to a raw
    /// little-endian `f32` payload file referenced by relative path.
    pub fn write_manifest(&self, manifest_path: &Path, data_file: &str) -> Result<()> {
        let manifest = GridManifest {
            magic: "EVGR".to_string(),
            version: GRID_VERSION,
            frames: self.frames,
            grid_height: self.grid_height,
            grid_width: self.grid_width,
            dim: self.dim,
            data: data_file.to_string(),
        };
        let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        let mut raw = Vec::with_capacity(self.data.len() * 4);
        for v in &self.data {
            raw.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        std::fs::write(dir.join(data_file), raw)?;
        std::fs::write(manifest_path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    /// Reads the manifest variant written by [`FeatureGrid::write_manifest`].
    pub fn read_manifest(manifest_path: &Path) -> Result<Self> {
        let manifest: GridManifest =
            serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?;
        if manifest.magic != "EVGR" {
            return Err(Error::Format(format!("bad manifest magic {}", manifest.magic)));
        }
        if manifest.version != GRID_VERSION {
            return Err(Error::Format(format!(
                "unsupported grid version {}",
                manifest.version
            )));
        }
        let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        let raw = std::fs::read(dir.join(&manifest.data))?;
        let expected =
            manifest.frames * manifest.grid_height * manifest.grid_width * manifest.dim * 4;
        if raw.len() != expected {
            return Err(Error::Format(format!(
                "raw payload is {} bytes, expected {expected}",
                raw.len()
            )));
        }
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        FeatureGrid::new(
            manifest.frames,
            manifest.grid_height,
            manifest.grid_width,
            manifest.dim,
            data,
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GridManifest {
    magic: String,
    version: u32,
    frames: usize,
    grid_height: usize,
    grid_width: usize,
    dim: usize,
    /// Path of the raw f32 payload, relative to the manifest file.
    data: String,
}

/// Borrowed single-frame view of a [`FeatureGrid`].
#[derive(Debug, Clone, Copy)]
pub struct FrameView<'a> {
    height: usize,
    width: usize,
    dim: usize,
    data: &'a [f64],
}

impl<'a> FrameView<'a> {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &'a [f64] {
        self.data
    }

    /// Feature vector of patch `(i, j)`. Panics out of range.
    pub fn feature(&self, i: usize, j: usize) -> &'a [f64] {
        assert!(i < self.height && j < self.width);
        let off = (i * self.width + j) * self.dim;
        &self.data[off..off + self.dim]
    }
}

/// Euclidean distance between two equal-length feature vectors.
pub fn l2_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "l2_distance vectors",
            left: a.len(),
            right: b.len(),
        });
    }
    let sum: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}

/// Cosine similarity between two equal-length feature vectors, clamped to
/// `[-1, 1]`.
///
/// Zero-vector convention: two zero vectors are identical content and report
/// `1.0`; a zero vector against a nonzero one is changed content and reports
/// `0.0`. This keeps blank regions prunable and appearing/disappearing
/// content kept.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "cosine_similarity vectors",
            left: a.len(),
            right: b.len(),
        });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 && nb == 0.0 {
        return Ok(1.0);
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Row-major flattening `(i, j) -> i * width + j`.
///
/// Only the column bound is checkable here; the row bound belongs to the
/// grid that owns the coordinates.
pub fn flatten_index(i: usize, j: usize, width: usize) -> Result<usize> {
    if width == 0 || j >= width {
        return Err(Error::invalid_input(format!(
            "column {j} out of range for width {width}"
        )));
    }
    Ok(i * width + j)
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(token: usize, width: usize) -> Result<(usize, usize)> {
    if width == 0 {
        return Err(Error::invalid_input("width must be nonzero"));
    }
    Ok((token / width, token % width))
}
