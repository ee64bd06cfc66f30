//! Temporal token pruning.
//!
//! Every spatial location tracks a reference token, initialized from frame 0
//! (always kept). A later token is pruned when its cosine similarity to the
//! reference strictly exceeds `tau_t`; otherwise it is kept and becomes the
//! new reference. Each location is therefore compared against its most
//! recent distinct state, not against frame 0 forever, which keeps gradual
//! drifts visible while dropping static background.

use crate::error::{Error, Result};
use crate::grid::{cosine_similarity, FeatureGrid};
use crate::mask::TemporalMask;

/// Threshold for temporal pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtpConfig {
    /// Similarity above which a token counts as a repeat of its reference.
    /// A tie at exactly `tau_t` keeps the token.
    pub tau_t: f64,
}

impl TtpConfig {
    pub const DEFAULT_TAU_T: f64 = 0.9999;

    pub fn new(tau_t: f64) -> Result<Self> {
        if !tau_t.is_finite() {
            return Err(Error::invalid_config("tau_t must be finite"));
        }
        Ok(Self { tau_t })
    }
}

impl Default for TtpConfig {
    fn default() -> Self {
        Self {
            tau_t: Self::DEFAULT_TAU_T,
        }
    }
}

/// Temporal keep mask over a `T x N x D` token tensor.
///
/// Locations are independent; within a location frames are processed in
/// order because the reference is stateful.
pub fn temporal_mask(grid: &FeatureGrid, cfg: &TtpConfig) -> Result<TemporalMask> {
    TtpConfig::new(cfg.tau_t)?;
    let frames = grid.frames();
    let n = grid.tokens_per_frame();
    let mut mask = TemporalMask::all_keep(frames, n);
    for loc in 0..n {
        let mut reference = grid.token(0, loc);
        for t in 1..frames {
            let token = grid.token(t, loc);
            // Same dim by construction.
            let sim = cosine_similarity(reference, token).unwrap();
            if sim > cfg.tau_t {
                mask.set(t, loc, false);
            } else {
                reference = token;
            }
        }
    }
    Ok(mask)
}
