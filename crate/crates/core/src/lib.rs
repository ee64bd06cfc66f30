//! Preparation, pruning, and scoring of GUI execution videos.
//!
//! A computer-use trajectory is summarized as one keyframe per interaction
//! step at 1 FPS. Keyframes become patch-feature grids through a pluggable
//! extractor; two complementary passes then drop redundant tokens:
//!
//! * spatial pruning ([`stp`]) removes large feature-homogeneous connected
//!   components within each frame (backgrounds, empty panels),
//! * temporal pruning ([`ttp`]) removes tokens that stay nearly identical to
//!   their most recent distinct state across frames.
//!
//! The survivors are packed into a compact sequence with provenance
//! ([`pruner`]). Around that core sit trajectory ingestion ([`trajectory`]),
//! judgment scoring ([`eval`]), hard-negative synthesis by instruction
//! translation ([`negsynth`]), and a deterministic scene generator for tests
//! and benchmarks ([`synth`]).

pub mod error;
pub mod eval;
pub mod grid;
pub mod mask;
pub mod negsynth;
pub mod pruner;
pub mod stp;
pub mod synth;
pub mod trajectory;
pub mod ttp;

pub use error::{Error, Result};
pub use eval::{BinaryMetrics, EvalRecord, EvalReport, Interval};
pub use grid::{cosine_similarity, flatten_index, l2_distance, unflatten_index, FeatureGrid};
pub use mask::{CombinedMask, SpatialMask, TemporalMask};
pub use pruner::{prune_pipeline, PrunedTokenSequence, PruningReport, Variant};
pub use stp::{spatial_mask, StpConfig};
pub use synth::SceneSpec;
pub use trajectory::{JudgmentLabel, Platform, StepRecord, TrajectoryRecord};
pub use ttp::{temporal_mask, TtpConfig};
