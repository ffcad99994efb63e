//! Data-file ingestion: newline-delimited decimals, or a CSV column.

use anyhow::{bail, Context, Result};
use exptest::Sample;
use std::path::Path;

/// Read observations from `path`. Without `column`, the file is one decimal
/// per line with blank lines ignored. With `column` (1-based), each line is
/// split on commas and the chosen field is parsed; a non-numeric first row
/// is treated as a header and skipped.
pub fn read_sample(path: &Path, column: Option<usize>) -> Result<Sample> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut values = Vec::new();
    let mut value_lines = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_display = lineno + 1;
        let field = match column {
            None => {
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                trimmed.to_string()
            }
            Some(col) => {
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if col == 0 || col > fields.len() {
                    bail!(
                        "line {line_display}: column {col} out of range (row has {} fields)",
                        fields.len()
                    );
                }
                fields[col - 1].trim().to_string()
            }
        };
        match field.parse::<f64>() {
            Ok(v) => {
                values.push(v);
                value_lines.push(line_display);
            }
            Err(_) if column.is_some() && values.is_empty() && lineno == 0 => {
                // header row
                continue;
            }
            Err(_) => bail!("line {line_display}: cannot parse {field:?} as a number"),
        }
    }
    if values.is_empty() {
        bail!("{}: no observations found", path.display());
    }
    Sample::new(values).map_err(|err| match err {
        exptest::Error::NegativeValue { index, value } => anyhow::anyhow!(
            "line {}: negative observation {value}",
            value_lines[index]
        ),
        exptest::Error::NonFiniteValue { index } => {
            anyhow::anyhow!("line {}: non-finite observation", value_lines[index])
        }
        other => anyhow::anyhow!(other),
    })
}
