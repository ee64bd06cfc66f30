//! `vidtok eval`: score a JSON-lines predictions file.

use std::io::BufReader;
use std::path::Path;

use vidtok_core::eval::{aggregate, read_jsonl, render_table};

use crate::CliError;

pub fn run(predictions: &Path, out: &Path) -> Result<(), CliError> {
    let file = std::fs::File::open(predictions)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", predictions.display())))?;
    let records = read_jsonl(BufReader::new(file)).map_err(CliError::from_input)?;
    let report = aggregate(&records).map_err(CliError::from_input)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::processing(e.to_string()))?;
    std::fs::write(out, json)
        .map_err(|e| CliError::processing(format!("cannot write {}: {e}", out.display())))?;
    print!("{}", render_table(&report));
    println!("report written to {}", out.display());
    Ok(())
}
