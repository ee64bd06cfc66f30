//! Keep/prune masks over token grids.
//!
//! Bit semantics everywhere: 1 = keep, 0 = prune. A [`SpatialMask`] addresses
//! patches by `(t, i, j)`, a [`TemporalMask`] and [`CombinedMask`] address
//! tokens by `(t, flattened index)`.
//!
//! On disk a mask is a little-endian `{T, rows, cols}` header of `u32`s
//! followed by bit-packed rows, each row padded to a byte boundary,
//! least-significant bit first. Spatial masks store `T * H'` rows of `W'`
//! bits; token masks store `T` rows of `N` bits.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Per-frame `H' x W'` keep mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialMask {
    frames: usize,
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl SpatialMask {
    pub fn all_keep(frames: usize, height: usize, width: usize) -> Self {
        Self {
            frames,
            height,
            width,
            bits: vec![true; frames * height * width],
        }
    }

    pub(crate) fn from_bits(
        frames: usize,
        height: usize,
        width: usize,
        bits: Vec<bool>,
    ) -> Result<Self> {
        if bits.len() != frames * height * width {
            return Err(Error::DimensionMismatch {
                context: "spatial mask bits",
                left: bits.len(),
                right: frames * height * width,
            });
        }
        Ok(Self {
            frames,
            height,
            width,
            bits,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn tokens_per_frame(&self) -> usize {
        self.height * self.width
    }

    pub fn keep(&self, t: usize, i: usize, j: usize) -> bool {
        self.bits[(t * self.height + i) * self.width + j]
    }

    pub fn set(&mut self, t: usize, i: usize, j: usize, keep: bool) {
        self.bits[(t * self.height + i) * self.width + j] = keep;
    }

    /// Keep bit addressed by flattened token index.
    pub fn keep_token(&self, t: usize, token: usize) -> bool {
        self.bits[t * self.tokens_per_frame() + token]
    }

    pub fn keep_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn frame_keep_count(&self, t: usize) -> usize {
        let n = self.tokens_per_frame();
        self.bits[t * n..(t + 1) * n].iter().filter(|b| **b).count()
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        write_mask(out, self.frames, self.frames * self.height, self.width, &self.bits)
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let (frames, rows, cols, bits) = read_mask(input)?;
        if frames == 0 || rows % frames != 0 {
            return Err(Error::Format(format!(
                "spatial mask rows {rows} not divisible by frames {frames}"
            )));
        }
        Self::from_bits(frames, rows / frames, cols, bits)
    }

    /// One frame rendered as a binary PGM (P5), white = keep, black = prune.
    pub fn frame_to_pgm(&self, t: usize) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for i in 0..self.height {
            for j in 0..self.width {
                out.push(if self.keep(t, i, j) { 255 } else { 0 });
            }
        }
        out
    }

    /// One frame rendered as a grayscale PNG, white = keep, black = prune.
    pub fn frame_to_png(&self, t: usize, path: &Path) -> Result<()> {
        let mut img = image::GrayImage::new(self.width as u32, self.height as u32);
        for i in 0..self.height {
            for j in 0..self.width {
                let v = if self.keep(t, i, j) { 255 } else { 0 };
                img.put_pixel(j as u32, i as u32, image::Luma([v]));
            }
        }
        img.save(path)?;
        Ok(())
    }
}

/// Per-token `T x N` keep mask produced by temporal pruning. Frame 0 is
/// always all ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalMask {
    frames: usize,
    tokens_per_frame: usize,
    bits: Vec<bool>,
}

impl TemporalMask {
    pub fn all_keep(frames: usize, tokens_per_frame: usize) -> Self {
        Self {
            frames,
            tokens_per_frame,
            bits: vec![true; frames * tokens_per_frame],
        }
    }

    pub(crate) fn from_bits(
        frames: usize,
        tokens_per_frame: usize,
        bits: Vec<bool>,
    ) -> Result<Self> {
        if bits.len() != frames * tokens_per_frame {
            return Err(Error::DimensionMismatch {
                context: "temporal mask bits",
                left: bits.len(),
                right: frames * tokens_per_frame,
            });
        }
        if !bits[..tokens_per_frame.min(bits.len())].iter().all(|b| *b) {
            return Err(Error::invalid_input("temporal mask frame 0 must be all ones"));
        }
        Ok(Self {
            frames,
            tokens_per_frame,
            bits,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn tokens_per_frame(&self) -> usize {
        self.tokens_per_frame
    }

    pub fn keep(&self, t: usize, token: usize) -> bool {
        self.bits[t * self.tokens_per_frame + token]
    }

    /// Panics when clearing a frame-0 bit; the first frame is always kept.
    pub fn set(&mut self, t: usize, token: usize, keep: bool) {
        assert!(t > 0 || keep, "temporal mask frame 0 bits are always kept");
        self.bits[t * self.tokens_per_frame + token] = keep;
    }

    pub fn keep_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn frame_keep_count(&self, t: usize) -> usize {
        let n = self.tokens_per_frame;
        self.bits[t * n..(t + 1) * n].iter().filter(|b| **b).count()
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        write_mask(out, self.frames, self.frames, self.tokens_per_frame, &self.bits)
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let (frames, rows, cols, bits) = read_mask(input)?;
        if rows != frames {
            return Err(Error::Format(format!(
                "token mask rows {rows} must equal frames {frames}"
            )));
        }
        Self::from_bits(frames, cols, bits)
    }
}

/// Elementwise AND of a spatial and a temporal mask, token-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedMask {
    frames: usize,
    tokens_per_frame: usize,
    bits: Vec<bool>,
}

impl CombinedMask {
    pub(crate) fn from_bits(frames: usize, tokens_per_frame: usize, bits: Vec<bool>) -> Self {
        debug_assert_eq!(bits.len(), frames * tokens_per_frame);
        Self {
            frames,
            tokens_per_frame,
            bits,
        }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn tokens_per_frame(&self) -> usize {
        self.tokens_per_frame
    }

    pub fn keep(&self, t: usize, token: usize) -> bool {
        self.bits[t * self.tokens_per_frame + token]
    }

    pub fn keep_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn frame_keep_count(&self, t: usize) -> usize {
        let n = self.tokens_per_frame;
        self.bits[t * n..(t + 1) * n].iter().filter(|b| **b).count()
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        write_mask(out, self.frames, self.frames, self.tokens_per_frame, &self.bits)
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let (frames, rows, cols, bits) = read_mask(input)?;
        if rows != frames {
            return Err(Error::Format(format!(
                "token mask rows {rows} must equal frames {frames}"
            )));
        }
        Ok(Self::from_bits(frames, cols, bits))
    }

    /// One frame rendered as a grayscale PNG, reshaped to the grid the
    /// tokens were flattened from. White = keep, black = prune.
    pub fn frame_to_png(
        &self,
        t: usize,
        grid_height: usize,
        grid_width: usize,
        path: &Path,
    ) -> Result<()> {
        if grid_height * grid_width != self.tokens_per_frame {
            return Err(Error::DimensionMismatch {
                context: "combined mask viz grid",
                left: grid_height * grid_width,
                right: self.tokens_per_frame,
            });
        }
        let mut img = image::GrayImage::new(grid_width as u32, grid_height as u32);
        for i in 0..grid_height {
            for j in 0..grid_width {
                let v = if self.keep(t, i * grid_width + j) { 255 } else { 0 };
                img.put_pixel(j as u32, i as u32, image::Luma([v]));
            }
        }
        img.save(path)?;
        Ok(())
    }
}

fn write_mask<W: Write>(
    mut out: W,
    frames: usize,
    rows: usize,
    cols: usize,
    bits: &[bool],
) -> Result<()> {
    for v in [frames as u32, rows as u32, cols as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    let row_bytes = cols.div_ceil(8);
    let mut packed = vec![0u8; row_bytes];
    for r in 0..rows {
        packed.iter_mut().for_each(|b| *b = 0);
        for c in 0..cols {
            if bits[r * cols + c] {
                packed[c / 8] |= 1 << (c % 8);
            }
        }
        out.write_all(&packed)?;
    }
    Ok(())
}

fn read_mask<R: Read>(mut input: R) -> Result<(usize, usize, usize, Vec<bool>)> {
    let mut word = [0u8; 4];
    let mut header = [0u32; 3];
    for slot in header.iter_mut() {
        input.read_exact(&mut word)?;
        *slot = u32::from_le_bytes(word);
    }
    let [frames, rows, cols] = header.map(|v| v as usize);
    let row_bytes = cols.div_ceil(8);
    let mut bits = Vec::with_capacity(rows * cols);
    let mut packed = vec![0u8; row_bytes];
    for _ in 0..rows {
        input.read_exact(&mut packed)?;
        for c in 0..cols {
            bits.push(packed[c / 8] & (1 << (c % 8)) != 0);
        }
    }
    Ok((frames, rows, cols, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spatial_round_trip() {
        let mut m = SpatialMask::all_keep(2, 3, 5);
        m.set(0, 1, 4, false);
        m.set(1, 2, 0, false);
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(SpatialMask::read_binary(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn temporal_round_trip_and_frame0_invariant() {
        let mut m = TemporalMask::all_keep(3, 7);
        m.set(1, 3, false);
        m.set(2, 6, false);
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(TemporalMask::read_binary(buf.as_slice()).unwrap(), m);

        let bad = vec![false; 6];
        assert!(TemporalMask::from_bits(2, 3, bad).is_err());
    }

    #[test]
    fn pgm_header_and_pixels() {
        let mut m = SpatialMask::all_keep(1, 2, 2);
        m.set(0, 1, 0, false);
        let pgm = m.frame_to_pgm(0);
        assert!(pgm.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&pgm[pgm.len() - 4..], &[255, 255, 0, 255]);
    }

    #[test]
    fn counts() {
        let mut m = SpatialMask::all_keep(2, 2, 2);
        m.set(0, 0, 0, false);
        assert_eq!(m.keep_count(), 7);
        assert_eq!(m.frame_keep_count(0), 3);
        assert_eq!(m.frame_keep_count(1), 4);
    }

    #[test]
    fn png_export_is_white_keep_black_prune() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = SpatialMask::all_keep(1, 2, 3);
        m.set(0, 1, 2, false);
        let path = dir.path().join("mask.png");
        m.frame_to_png(0, &path).unwrap();
        let img = image::open(&path).unwrap().to_luma8();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.get_pixel(2, 1).0, [0]);
        assert_eq!(img.get_pixel(0, 0).0, [255]);

        let combined = CombinedMask::from_bits(1, 6, vec![true, false, true, true, true, true]);
        let path = dir.path().join("combined.png");
        combined.frame_to_png(0, 2, 3, &path).unwrap();
        let img = image::open(&path).unwrap().to_luma8();
        assert_eq!(img.get_pixel(1, 0).0, [0]);
        assert!(combined.frame_to_png(0, 4, 4, &path).is_err());
    }
}
