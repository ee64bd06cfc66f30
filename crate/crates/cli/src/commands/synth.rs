//! `vidtok synth`: materialize a scene description into a grid file, and
//! optionally render its frames plus a trajectory manifest for exercising
//! the image extraction path.

use std::path::Path;

use vidtok_core::synth::{generate, render_frames, SceneSpec};
use vidtok_core::trajectory::{Keyframe, Platform, StepRecord, TrajectoryRecord};

use crate::config::RunConfig;
use crate::CliError;

pub fn run(
    scene: &Path,
    out: &Path,
    render: Option<&Path>,
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(scene)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", scene.display())))?;
    let spec: SceneSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", scene.display())))?;
    let grid = generate(&spec).map_err(CliError::from_input)?;
    grid.write_binary_file(out).map_err(CliError::from_processing)?;
    println!(
        "grid written to {} ({} frames, {}x{} patches, dim {})",
        out.display(),
        grid.frames(),
        grid.grid_height(),
        grid.grid_width(),
        grid.dim()
    );

    if let Some(render_dir) = render {
        std::fs::create_dir_all(render_dir)
            .map_err(|e| CliError::processing(format!("cannot create {}: {e}", render_dir.display())))?;
        let frames = render_frames(&spec, cfg.patch_size).map_err(CliError::from_input)?;
        let mut steps = Vec::with_capacity(frames.len());
        for (t, frame) in frames.iter().enumerate() {
            let name = format!("frame{t:03}.png");
            frame
                .save(render_dir.join(&name))
                .map_err(|e| CliError::processing(e.to_string()))?;
            steps.push(StepRecord {
                index: t,
                image: Keyframe::Path(name),
                action: None,
                t: t as f64,
            });
        }
        let record = TrajectoryRecord {
            instruction: "synthetic scene".to_string(),
            platform: Platform::Other,
            steps,
            label: None,
        };
        vidtok_core::trajectory::save_manifest(&render_dir.join("manifest.json"), &[record])
            .map_err(CliError::from_processing)?;
        println!(
            "rendered {} frames and a manifest to {}",
            frames.len(),
            render_dir.display()
        );
    }
    Ok(())
}
