//! CSV tables: comma separated, header row of attribute names, UTF-8.

use std::io::{Read, Write};
use std::path::Path;

use reid_core::reident::{MaskedTable, Table, Value};

use crate::error::CliError;

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_table(file, path)
}

pub fn parse_table<R: Read>(reader: R, origin: &Path) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(origin, &e))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(origin, &e))?;
        rows.push(record.iter().map(|cell| Value::parse(cell.trim())).collect());
    }
    Table::new(headers, rows).map_err(|e| CliError::parse(origin, e))
}

fn csv_error(origin: &Path, e: &csv::Error) -> CliError {
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => {
            let line = pos.as_ref().map_or(0, |p| p.line());
            format!("line {line}: expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { pos, err } => {
            let line = pos.as_ref().map_or(0, |p| p.line());
            format!("line {line}, column {}: invalid UTF-8", err.field() + 1)
        }
        _ => e.to_string(),
    };
    CliError::parse(origin, message)
}

pub fn write_masked<W: Write>(masked: &MaskedTable, writer: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(masked.attributes())?;
    for row in masked.rows() {
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn masked_to_string(masked: &MaskedTable) -> String {
    let mut buf = Vec::new();
    write_masked(masked, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("labels are UTF-8")
}
