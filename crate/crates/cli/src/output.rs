//! Output plumbing: CSV with a '#'-prefixed config-echo header, a JSON
//! sidecar carrying the summary and wall clock, and the number formats the
//! whole artifact chain standardizes on (12-significant-digit floats,
//! `num/den` rationals).
//!
//! The CSV is the byte-stable artifact: identical configs produce identical
//! bytes at any worker count. The JSON sidecar embeds the wall clock and is
//! therefore allowed to differ between reruns.

use crate::config::Resolver;
use crate::error::CliError;
use num_rational::Ratio;
use std::fs;
use std::path::PathBuf;

/// 12 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

/// Exact rational as `num/den` (reduced).
pub fn fmt_ratio(r: &Ratio<u128>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A CSV table plus the JSON summary of one command run.
#[derive(Debug)]
pub struct RunOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
}

impl RunOutput {
    pub fn new(columns: Vec<&'static str>) -> RunOutput {
        RunOutput { columns, rows: Vec::new(), summary: serde_json::Value::Null }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    fn render_csv(&self, resolver: &Resolver) -> String {
        let mut out = String::new();
        for (key, value) in resolver.echo_entries() {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes the CSV (file or stdout) and, when writing to a file, the JSON
/// sidecar next to it. Returns a one-line description for stderr.
pub fn emit(
    resolver: &Resolver,
    output: &RunOutput,
    wall_clock_seconds: f64,
) -> Result<String, CliError> {
    let out_path = resolver.opt_str("out").map(PathBuf::from);
    let csv = output.render_csv(resolver);
    let config: serde_json::Map<String, serde_json::Value> = resolver
        .echo_entries()
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::String(v)))
        .collect();
    let sidecar_value = serde_json::json!({
        "command": resolver.command(),
        "config": config,
        "summary": output.summary,
        "rows": output.rows.len(),
        "wall_clock_seconds": wall_clock_seconds,
    });
    match out_path {
        Some(path) => {
            let mut sidecar = path.with_extension("json");
            if sidecar == path {
                sidecar = path.with_extension("summary.json");
            }
            fs::write(&path, &csv).map_err(|e| {
                CliError::resource(format!("cannot write {}: {e}", path.display()))
            })?;
            let pretty = serde_json::to_string_pretty(&sidecar_value)
                .expect("summary serializes")
                + "\n";
            fs::write(&sidecar, pretty).map_err(|e| {
                CliError::resource(format!("cannot write {}: {e}", sidecar.display()))
            })?;
            Ok(format!(
                "{}: {} rows -> {} (+ {})",
                resolver.command(),
                output.rows.len(),
                path.display(),
                sidecar.display()
            ))
        }
        None => {
            print!("{csv}");
            Ok(format!(
                "{}: {} rows, summary: {}",
                resolver.command(),
                output.rows.len(),
                serde_json::to_string(&output.summary).expect("summary serializes")
            ))
        }
    }
}
