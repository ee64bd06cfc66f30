//! `vidtok bench`: kept-token counts and runtimes per pruning variant
//! across frame counts on the synthetic static-background suite. Counts are
//! deterministic per seed; wall-clock numbers are informational.

use std::path::Path;
use std::time::Instant;

use serde_json::json;
use vidtok_core::pruner::{prune_pipeline, Variant};
use vidtok_core::synth::{generate, SceneSpec};

use crate::config::RunConfig;
use crate::CliError;

struct BenchRow {
    frames: usize,
    variant: Variant,
    total_tokens: usize,
    kept_tokens: usize,
    reduction_ratio: f64,
    elapsed_ms: f64,
    packed_bytes: usize,
}

pub fn run(
    frames: &[usize],
    out: &Path,
    grid_height: usize,
    grid_width: usize,
    cfg: &RunConfig,
) -> Result<(), CliError> {
    if frames.is_empty() {
        return Err(CliError::input("no frame counts given; try --frames 5,10,20,50"));
    }
    if frames.contains(&0) {
        return Err(CliError::input("frame counts must be nonzero"));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::processing(format!("cannot create {}: {e}", out.display())))?;

    let variants = [Variant::StpOnly, Variant::TtpOnly, Variant::Both];
    let mut rows = Vec::new();
    for &frame_count in frames {
        let spec = SceneSpec::moving_block(grid_height, grid_width, frame_count, cfg.seed);
        let grid = generate(&spec).map_err(CliError::from_processing)?;
        for variant in variants {
            let run_cfg = RunConfig {
                variant,
                ..cfg.clone()
            };
            let start = Instant::now();
            let (packed, report) = prune_pipeline(
                &grid,
                run_cfg.stp().as_ref(),
                run_cfg.ttp().as_ref(),
                cfg.merge_adjacent,
            )
            .map_err(CliError::from_processing)?;
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            // Size of the packed sequence on the wire: header, provenance
            // pairs, f32 payload.
            let packed_bytes = 8 + packed.len() * 8 + packed.len() * packed.dim() * 4;
            rows.push(BenchRow {
                frames: frame_count,
                variant,
                total_tokens: report.total_tokens,
                kept_tokens: report.kept_tokens,
                reduction_ratio: report.reduction_ratio,
                elapsed_ms,
                packed_bytes,
            });
        }
    }

    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            json!({
                "frames": r.frames,
                "variant": r.variant,
                "total_tokens": r.total_tokens,
                "kept_tokens": r.kept_tokens,
                "reduction_ratio": r.reduction_ratio,
                "elapsed_ms": r.elapsed_ms,
                "packed_bytes": r.packed_bytes,
            })
        })
        .collect();
    let json_path = out.join("bench.json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&json_rows).map_err(|e| CliError::processing(e.to_string()))?,
    )
    .map_err(|e| CliError::processing(e.to_string()))?;

    let mut csv = String::from(
        "frames,variant,total_tokens,kept_tokens,reduction_ratio,elapsed_ms,packed_bytes\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.frames, r.variant, r.total_tokens, r.kept_tokens, r.reduction_ratio, r.elapsed_ms,
            r.packed_bytes
        ));
    }
    let csv_path = out.join("bench.csv");
    std::fs::write(&csv_path, csv).map_err(|e| CliError::processing(e.to_string()))?;

    for r in &rows {
        println!(
            "frames {:>4}  {:<4}  kept {:>7}/{:<7}  ratio {:.4}  {:>9.3} ms  {:>9} bytes",
            r.frames,
            r.variant.to_string(),
            r.kept_tokens,
            r.total_tokens,
            r.reduction_ratio,
            r.elapsed_ms,
            r.packed_bytes
        );
    }
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}
