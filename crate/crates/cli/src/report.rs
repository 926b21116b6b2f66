use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::error::{write_file, Result};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, report: &T) -> Result<()> {
    write_file(dir.join(name), to_json(report).as_bytes())
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Milliseconds since `start`, when timing was requested.
pub fn elapsed_ms(start: Instant, enabled: bool) -> Option<u64> {
    enabled.then(|| start.elapsed().as_millis() as u64)
}
