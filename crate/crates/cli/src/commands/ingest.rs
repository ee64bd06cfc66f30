//! `vidtok ingest`: validate a trajectory manifest and write the normalized
//! store.
//!
//! Keyframe paths in the store are rebased to be relative to the store's
//! own directory, so the store works no matter where it is written.

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use vidtok_core::trajectory::{load_manifest, save_manifest, Keyframe, TrajectoryRecord};

use crate::CliError;

/// Lexical relative path from `from_dir` to `target`; both must be absolute.
fn relative_path(from_dir: &Path, target: &Path) -> PathBuf {
    let from: Vec<Component> = from_dir.components().collect();
    let to: Vec<Component> = target.components().collect();
    let common = from
        .iter()
        .zip(to.iter())
        .take_while(|(a, b)| a == b)
        .count();
    let mut rel = PathBuf::new();
    for _ in common..from.len() {
        rel.push("..");
    }
    for component in &to[common..] {
        rel.push(component);
    }
    rel
}

fn rebase_records(
    records: &[TrajectoryRecord],
    manifest_dir: &Path,
    out_dir: &Path,
) -> Result<Vec<TrajectoryRecord>, CliError> {
    let out_dir = std::fs::canonicalize(out_dir)
        .map_err(|e| CliError::processing(format!("cannot resolve {}: {e}", out_dir.display())))?;
    let mut rebased = records.to_vec();
    for record in rebased.iter_mut() {
        for step in record.steps.iter_mut() {
            if let Keyframe::Path(p) = &step.image {
                // The image was just validated, so it resolves.
                let absolute = std::fs::canonicalize(manifest_dir.join(p)).map_err(|e| {
                    CliError::processing(format!("cannot resolve keyframe {p}: {e}"))
                })?;
                let relative = relative_path(&out_dir, &absolute);
                step.image = Keyframe::Path(relative.to_string_lossy().into_owned());
            }
        }
    }
    Ok(rebased)
}

pub fn run(manifest: &Path, out: &Path) -> Result<(), CliError> {
    let records = load_manifest(manifest).map_err(CliError::from_input)?;
    if records.is_empty() {
        return Err(CliError::input("manifest holds no trajectories"));
    }
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    for (idx, record) in records.iter().enumerate() {
        record.validate(base).map_err(|e| {
            CliError::input(format!("record {idx} (\"{}\"): {e}", record.instruction))
        })?;
    }

    let out_dir = match out.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::processing(format!("cannot create {}: {e}", out_dir.display())))?;
    let rebased = rebase_records(&records, base, &out_dir)?;
    save_manifest(out, &rebased).map_err(CliError::from_processing)?;

    let steps: usize = records.iter().map(|r| r.steps.len()).sum();
    let mut platforms: BTreeMap<&'static str, usize> = BTreeMap::new();
    for record in &records {
        *platforms.entry(record.platform.as_str()).or_insert(0) += 1;
    }
    let breakdown = platforms
        .iter()
        .map(|(name, count)| format!("{name}: {count}"))
        .collect::<Vec<_>>()
        .join(", ");
    println!("{} trajectories, {steps} steps ({breakdown})", records.len());
    println!("store written to {}", out.display());
    Ok(())
}
