//! Dataset CSV and stats sidecar file formats.
//!
//! Dataset files carry `#` comment lines (seed, config digest, calibration
//! record), then the fixed header
//! `state,trial,sample_idx,time_s,ch1,ch2,ch3,ch4,ch5,label`, then one row
//! per line. Missing cells are empty. Numbers are written with Rust's
//! shortest round-trip formatting so regeneration is byte-identical.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::{
    ImputeStats, NormStats, SampleRow, SampleTable, FEATURE_COUNT, FEATURE_NAMES,
};

pub const DATASET_HEADER: &str = "state,trial,sample_idx,time_s,ch1,ch2,ch3,ch4,ch5,label";
pub const STATS_MAGIC: &str = "shm-cnn-stats v1";

fn fmt_cell(cell: Option<f64>) -> String {
    match cell {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

/// Serialize a table. `comments` become leading `# `-prefixed lines.
pub fn dataset_to_string(table: &SampleTable, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{DATASET_HEADER}");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.state,
            row.trial,
            row.sample_idx,
            fmt_cell(row.features[5]),
            fmt_cell(row.features[0]),
            fmt_cell(row.features[1]),
            fmt_cell(row.features[2]),
            fmt_cell(row.features[3]),
            fmt_cell(row.features[4]),
            row.label,
        );
    }
    out
}

pub fn write_dataset_csv(table: &SampleTable, comments: &[String], path: &Path) -> Result<()> {
    std::fs::write(path, dataset_to_string(table, comments)).map_err(|e| Error::io(path, e))
}

fn parse_cell(s: &str, line_no: usize, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Data(format!("line {line_no}: bad value `{s}` in column {col}")))?;
    Ok(Some(v))
}

fn parse_int<T: std::str::FromStr>(s: &str, line_no: usize, col: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Data(format!("line {line_no}: bad value `{s}` in column {col}")))
}

/// Read and validate a dataset CSV.
pub fn read_dataset_csv(path: &Path) -> Result<SampleTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let table = parse_dataset(BufReader::new(file))
        .map_err(|e| prefix_path(e, path))?;
    table.validate().map_err(|e| prefix_path(e, path))?;
    Ok(table)
}

fn prefix_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn parse_dataset<R: Read>(reader: BufReader<R>) -> Result<SampleTable> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Data(format!("line {line_no}: {e}")))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header_seen {
            if line != DATASET_HEADER {
                return Err(Error::Data(format!(
                    "line {line_no}: expected header `{DATASET_HEADER}`, got `{line}`"
                )));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Data(format!(
                "line {line_no}: expected 10 fields, got {}",
                fields.len()
            )));
        }
        let features = [
            parse_cell(fields[4], line_no, "ch1")?,
            parse_cell(fields[5], line_no, "ch2")?,
            parse_cell(fields[6], line_no, "ch3")?,
            parse_cell(fields[7], line_no, "ch4")?,
            parse_cell(fields[8], line_no, "ch5")?,
            parse_cell(fields[3], line_no, "time_s")?,
        ];
        rows.push(SampleRow {
            state: parse_int(fields[0], line_no, "state")?,
            trial: parse_int(fields[1], line_no, "trial")?,
            sample_idx: parse_int(fields[2], line_no, "sample_idx")?,
            features,
            label: parse_int(fields[9], line_no, "label")?,
        });
    }
    if !header_seen {
        return Err(Error::Data("no header line found".into()));
    }
    Ok(SampleTable::new(rows))
}

/// Lenient reader for prediction input: any CSV whose header names include
/// the six feature columns. Other columns (state, trial, label, ...) are
/// ignored. Returns rows with placeholder provenance and labels.
pub fn read_feature_rows_csv(path: &Path) -> Result<SampleTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_feature_rows(BufReader::new(file)).map_err(|e| prefix_path(e, path))
}

fn parse_feature_rows<R: Read>(reader: BufReader<R>) -> Result<SampleTable> {
    let mut rows = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut feature_pos = [usize::MAX; FEATURE_COUNT];
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Data(format!("line {line_no}: {e}")))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        match &columns {
            None => {
                let names: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
                for (j, feature) in FEATURE_NAMES.iter().enumerate() {
                    feature_pos[j] = names
                        .iter()
                        .position(|n| n == feature)
                        .ok_or_else(|| {
                            Error::Data(format!("input is missing required column `{feature}`"))
                        })?;
                }
                columns = Some(names);
            }
            Some(names) => {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != names.len() {
                    return Err(Error::Data(format!(
                        "line {line_no}: expected {} fields, got {}",
                        names.len(),
                        fields.len()
                    )));
                }
                let mut features = [None; FEATURE_COUNT];
                for j in 0..FEATURE_COUNT {
                    features[j] = parse_cell(fields[feature_pos[j]], line_no, FEATURE_NAMES[j])?;
                }
                rows.push(SampleRow {
                    state: 0,
                    trial: 0,
                    sample_idx: (rows.len()) as u32,
                    features,
                    label: 0,
                });
            }
        }
    }
    // An entirely empty file yields an empty table; a header alone does too.
    Ok(SampleTable::new(rows))
}

/// Stats sidecar: imputation means plus normalization min/max, versioned.
pub fn stats_to_string(impute: &ImputeStats, norm: &NormStats, comments: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{STATS_MAGIC}");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for j in 0..FEATURE_COUNT {
        let _ = writeln!(
            out,
            "feature {} mean {} min {} max {}",
            FEATURE_NAMES[j], impute.means[j], norm.min[j], norm.max[j]
        );
    }
    out
}

pub fn write_stats(
    impute: &ImputeStats,
    norm: &NormStats,
    comments: &[String],
    path: &Path,
) -> Result<()> {
    std::fs::write(path, stats_to_string(impute, norm, comments)).map_err(|e| Error::io(path, e))
}

pub fn read_stats(path: &Path) -> Result<(ImputeStats, NormStats)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stats(&text).map_err(|e| prefix_path(e, path))
}

fn parse_stats(text: &str) -> Result<(ImputeStats, NormStats)> {
    let mut lines = text.lines();
    let version = lines
        .next()
        .ok_or_else(|| Error::Data("empty stats file".into()))?;
    if version != STATS_MAGIC {
        return Err(Error::Data(format!(
            "unknown stats version `{version}`, expected `{STATS_MAGIC}`"
        )));
    }
    let mut means = [f64::NAN; FEATURE_COUNT];
    let mut min = [f64::NAN; FEATURE_COUNT];
    let mut max = [f64::NAN; FEATURE_COUNT];
    let mut seen = [false; FEATURE_COUNT];
    for line in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 8 || tokens[0] != "feature" {
            return Err(Error::Data(format!("malformed stats line `{line}`")));
        }
        let j = FEATURE_NAMES
            .iter()
            .position(|n| *n == tokens[1])
            .ok_or_else(|| Error::Data(format!("unknown feature `{}`", tokens[1])))?;
        if tokens[2] != "mean" || tokens[4] != "min" || tokens[6] != "max" {
            return Err(Error::Data(format!("malformed stats line `{line}`")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Data(format!("bad number `{s}` in stats line")))
        };
        means[j] = parse(tokens[3])?;
        min[j] = parse(tokens[5])?;
        max[j] = parse(tokens[7])?;
        seen[j] = true;
    }
    if let Some(j) = seen.iter().position(|s| !s) {
        return Err(Error::Data(format!(
            "stats file missing feature `{}`",
            FEATURE_NAMES[j]
        )));
    }
    for j in 0..FEATURE_COUNT {
        if min[j] > max[j] {
            return Err(Error::Data(format!(
                "feature `{}` has min > max",
                FEATURE_NAMES[j]
            )));
        }
    }
    Ok((ImputeStats { means }, NormStats { min, max }))
}
