use std::io::Write;

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::sweep::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const COLUMNS: [&str; 14] = [
    "f_L",
    "f_R",
    "qdot_L",
    "qdot_R",
    "wdot_L",
    "wdot_R",
    "wdot_total",
    "F",
    "pi_ss",
    "J",
    "regime",
    "nullspace_dim",
    "residual",
    "error",
];

/// 17 significant digits, round-trips every f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(w: impl Write, param: &str, rows: &[Row]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<&str> = std::iter::once(param).chain(COLUMNS).collect();
    out.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let fields = [
            num(r.value),
            num(r.f_l),
            num(r.f_r),
            num(r.qdot_l),
            num(r.qdot_r),
            num(r.wdot_l),
            num(r.wdot_r),
            num(r.wdot_total),
            num(r.f_energy),
            num(r.pi_ss),
            num(r.j),
            r.regime.clone(),
            r.nullspace_dim.map(|d| d.to_string()).unwrap_or_default(),
            num(r.residual),
            r.error.clone().unwrap_or_default(),
        ];
        out.write_record(&fields).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    row: &'a Row,
    parameter: &'a str,
}

/// JSON array of row objects; NaN becomes null.
pub fn write_json(mut w: impl Write, param: &str, rows: &[Row]) -> CliResult<()> {
    let rows: Vec<_> = rows
        .iter()
        .map(|row| JsonRow {
            row,
            parameter: param,
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

pub fn write_rows(w: impl Write, format: Format, param: &str, rows: &[Row]) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(w, param, rows),
        Format::Json => write_json(w, param, rows),
    }
}

pub fn write_report<T: Serialize>(mut w: impl Write, report: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
