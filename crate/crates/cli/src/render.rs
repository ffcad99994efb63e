//! Output rendering: aligned text, CSV and JSON.

use anyhow::Result;
use exptest::tables::TableReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub fn table_text(report: &TableReport) {
    println!("# {}", report.name);
    let width = report
        .cells
        .iter()
        .map(|c| c.label.len())
        .max()
        .unwrap_or(8)
        .max(8);
    println!(
        "{:width$}  {:>10}  {:>10}  {:>10}",
        "cell", "reference", "computed", "delta"
    );
    for cell in &report.cells {
        println!(
            "{:width$}  {:>10.4}  {:>10.4}  {:>+10.4}",
            cell.label,
            cell.reference,
            cell.computed,
            cell.delta()
        );
    }
    println!(
        "{:width$}  {:>10}  {:>10}  {:>10.4}",
        "max |delta|", "", "", report.max_abs_delta()
    );
}

pub fn table_csv(report: &TableReport) {
    if pivoted_csv(report) {
        return;
    }
    println!("table,cell,reference,computed,delta");
    for cell in &report.cells {
        println!(
            "{},{},{},{},{}",
            report.name,
            cell.label,
            cell.reference,
            cell.computed,
            cell.delta()
        );
    }
}

/// Emit reports whose cells carry an `alpha=` suffix in the reference-table
/// layout: one row per case, one column pair per alpha level.
fn pivoted_csv(report: &TableReport) -> bool {
    let mut rows: Vec<(String, Vec<(String, f64, f64)>)> = Vec::new();
    let mut alphas: Vec<String> = Vec::new();
    for cell in &report.cells {
        let Some((row_key, alpha)) = cell.label.rsplit_once(" alpha=") else {
            return false;
        };
        if !alphas.iter().any(|a| a == alpha) {
            alphas.push(alpha.to_string());
        }
        match rows.last_mut() {
            Some((key, cols)) if key == row_key => {
                cols.push((alpha.to_string(), cell.computed, cell.reference))
            }
            _ => rows.push((
                row_key.to_string(),
                vec![(alpha.to_string(), cell.computed, cell.reference)],
            )),
        }
    }
    if rows.is_empty() || rows.iter().any(|(_, cols)| cols.len() != alphas.len()) {
        return false;
    }
    print!("table,case");
    for a in &alphas {
        print!(",computed alpha={a},reference alpha={a}");
    }
    println!();
    for (key, cols) in &rows {
        print!("{},{key}", report.name);
        for (_, computed, reference) in cols {
            print!(",{computed},{reference}");
        }
        println!();
    }
    true
}

pub fn tables(format: Format, reports: &[&TableReport]) -> Result<()> {
    match format {
        Format::Json => print_json(&reports)?,
        Format::Text => {
            for (i, report) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                table_text(report);
            }
        }
        Format::Csv => {
            for report in reports {
                table_csv(report);
            }
        }
    }
    Ok(())
}
