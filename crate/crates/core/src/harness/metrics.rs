//! Error metric, CSV schema and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::reference::ReferenceField;

pub const SCHEMA_LINE: &str = "schema=1";
pub const COLUMNS: [&str; 8] = [
    "t",
    "rel_l2_error",
    "residual_norm",
    "retained_rank",
    "sigma_max",
    "sigma_min_retained",
    "momentum_norm",
    "wall_time_ms",
];

/// `‖approx − truth‖₂ / ‖truth‖₂` with uniform weights over grid points and
/// components.
pub fn relative_l2(approx: &ReferenceField, truth: &ReferenceField) -> Result<f64> {
    if approx.sizes != truth.sizes || approx.components != truth.components || approx.domain != truth.domain {
        return Err(Error::input(format!(
            "grids differ: {:?}x{} vs {:?}x{}",
            approx.sizes, approx.components, truth.sizes, truth.components
        )));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in approx.values.iter().zip(&truth.values) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    if den == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub t: f64,
    pub rel_l2_error: f64,
    pub residual_norm: f64,
    pub retained_rank: usize,
    pub sigma_max: f64,
    pub sigma_min_retained: f64,
    pub momentum_norm: f64,
    pub wall_time_ms: f64,
}

impl MetricsRow {
    fn write_csv(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.t,
            self.rel_l2_error,
            self.residual_norm,
            self.retained_rank,
            self.sigma_max,
            self.sigma_min_retained,
            self.momentum_norm,
            self.wall_time_ms
        );
    }
}

/// Render rows with the versioned header.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_LINE);
    out.push('\n');
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for row in rows {
        row.write_csv(&mut out);
    }
    out
}

/// Parse a file written by [`metrics_csv`].
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SCHEMA_LINE) {
        return Err(Error::input("missing or unsupported schema line"));
    }
    if lines.next() != Some(COLUMNS.join(",").as_str()) {
        return Err(Error::input("unexpected metrics columns"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != COLUMNS.len() {
                return Err(Error::input(format!("row {i}: expected {} fields", COLUMNS.len())));
            }
            let num = |k: usize| {
                fields[k]
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("row {i}: bad number {:?}", fields[k])))
            };
            Ok(MetricsRow {
                t: num(0)?,
                rel_l2_error: num(1)?,
                residual_norm: num(2)?,
                retained_rank: fields[3]
                    .parse()
                    .map_err(|_| Error::input(format!("row {i}: bad rank {:?}", fields[3])))?,
                sigma_max: num(4)?,
                sigma_min_retained: num(5)?,
                momentum_norm: num(6)?,
                wall_time_ms: num(7)?,
            })
        })
        .collect()
}

/// Parameter vector as text, one value per line, round-trip exact.
pub fn theta_text(theta: &[f64]) -> String {
    let mut out = String::with_capacity(theta.len() * 24);
    for v in theta {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

pub fn parse_theta_text(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|s| s.parse::<f64>().map_err(|_| Error::input(format!("bad parameter value {s:?}"))))
        .collect()
}

/// Write `contents` to a temporary sibling and rename it into place, so the
/// destination never holds a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", file_name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}
