//! `vidtok prune`: batch pruning of grid files or trajectory keyframes.
//!
//! Each input item yields `<stem>.packed.bin` and `<stem>.report.json` in
//! the output directory, plus optional per-frame mask images.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vidtok_core::grid::FeatureGrid;
use vidtok_core::mask::CombinedMask;
use vidtok_core::pruner::prune_pipeline;
use vidtok_core::trajectory::{extract_grid, load_manifest, resize_to_720p, uniform_sample, MeanRgb};

use crate::config::RunConfig;
use crate::CliError;

struct WorkItem {
    name: String,
    grid: FeatureGrid,
}

fn load_items(
    input: &Path,
    cfg: &RunConfig,
    resize_720p: bool,
) -> Result<Vec<WorkItem>, CliError> {
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("");
    if input.is_dir() {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(input)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("evgr"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(CliError::input(format!(
                "{} holds no .evgr grid files",
                input.display()
            )));
        }
        return paths
            .iter()
            .map(|p| {
                Ok(WorkItem {
                    name: stem(p),
                    grid: FeatureGrid::read_binary_file(p).map_err(CliError::from_input)?,
                })
            })
            .collect();
    }
    match ext {
        "evgr" => Ok(vec![WorkItem {
            name: stem(input),
            grid: FeatureGrid::read_binary_file(input).map_err(CliError::from_input)?,
        }]),
        "json" => {
            let records = load_manifest(input).map_err(CliError::from_input)?;
            let base = input.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
            records
                .iter()
                .enumerate()
                .map(|(idx, record)| {
                    let sampled =
                        uniform_sample(record, cfg.max_frames).map_err(CliError::from_input)?;
                    let sampled = if resize_720p {
                        resize_to_720p(&sampled, &base).map_err(CliError::from_input)?
                    } else {
                        sampled
                    };
                    let grid = extract_grid(&sampled, &MeanRgb, cfg.patch_size, &base)
                        .map_err(CliError::from_input)?;
                    Ok(WorkItem {
                        name: format!("trajectory-{idx:03}"),
                        grid,
                    })
                })
                .collect()
        }
        _ => Err(CliError::input(format!(
            "{}: expected a .evgr grid, a directory of grids, or a .json manifest",
            input.display()
        ))),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "item".to_string())
}

fn write_mask_frames(
    mask: &CombinedMask,
    grid_height: usize,
    grid_width: usize,
    out: &Path,
    name: &str,
) -> Result<(), CliError> {
    for t in 0..mask.frames() {
        let path = out.join(format!("{name}.mask.f{t:03}.png"));
        mask.frame_to_png(t, grid_height, grid_width, &path)
            .map_err(CliError::from_processing)?;
    }
    Ok(())
}

pub fn run(
    input: &Path,
    out: &Path,
    cfg: &RunConfig,
    viz_masks: bool,
    resize_720p: bool,
) -> Result<(), CliError> {
    let items = load_items(input, cfg, resize_720p)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::processing(format!("cannot create {}: {e}", out.display())))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::processing(e.to_string()))?;

    let stp = cfg.stp();
    let ttp = cfg.ttp();
    let results: Vec<Result<String, CliError>> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                let (packed, report) = prune_pipeline(
                    &item.grid,
                    stp.as_ref(),
                    ttp.as_ref(),
                    cfg.merge_adjacent,
                )
                .map_err(CliError::from_processing)?;
                packed
                    .write_binary_file(&out.join(format!("{}.packed.bin", item.name)))
                    .map_err(CliError::from_processing)?;
                let report_json = serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::processing(e.to_string()))?;
                std::fs::write(out.join(format!("{}.report.json", item.name)), report_json)
                    .map_err(|e| CliError::processing(e.to_string()))?;
                if viz_masks {
                    // Recompute the combined mask for visualization; the
                    // pipeline is deterministic, so this matches the report.
                    let merged;
                    let grid = if cfg.merge_adjacent {
                        merged = vidtok_core::pruner::merge_adjacent_frames(&item.grid);
                        &merged
                    } else {
                        &item.grid
                    };
                    let spatial = match &stp {
                        Some(c) => {
                            let m = vidtok_core::stp::spatial_mask(&item.grid, c)
                                .map_err(CliError::from_processing)?;
                            if cfg.merge_adjacent {
                                vidtok_core::pruner::merge_adjacent_frame_masks(&m)
                            } else {
                                m
                            }
                        }
                        None => vidtok_core::mask::SpatialMask::all_keep(
                            grid.frames(),
                            grid.grid_height(),
                            grid.grid_width(),
                        ),
                    };
                    let temporal = match &ttp {
                        Some(c) => vidtok_core::ttp::temporal_mask(grid, c)
                            .map_err(CliError::from_processing)?,
                        None => vidtok_core::mask::TemporalMask::all_keep(
                            grid.frames(),
                            grid.tokens_per_frame(),
                        ),
                    };
                    let combined = vidtok_core::pruner::combine(&spatial, &temporal)
                        .map_err(CliError::from_processing)?;
                    write_mask_frames(
                        &combined,
                        grid.grid_height(),
                        grid.grid_width(),
                        out,
                        &item.name,
                    )?;
                }
                Ok(format!(
                    "{}: kept {}/{} tokens (ratio {:.4}, variant {})",
                    item.name,
                    report.kept_tokens,
                    report.total_tokens,
                    report.reduction_ratio,
                    report.variant
                ))
            })
            .collect()
    });

    for result in results {
        println!("{}", result?);
    }
    Ok(())
}
