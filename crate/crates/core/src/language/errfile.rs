//! `.err` files: one `LINE COL CODE` record per line, sorted ascending by
//! (line, col, code) with duplicates removed.

use std::path::Path;

use super::ast::ErrorRecord;
use crate::error::{Error, Result};

pub fn normalize(mut records: Vec<ErrorRecord>) -> Vec<ErrorRecord> {
    records.sort();
    records.dedup();
    records
}

pub fn err_file_bytes(records: &[ErrorRecord]) -> Vec<u8> {
    let mut out = String::new();
    for r in normalize(records.to_vec()) {
        out.push_str(&format!("{} {} {}\n", r.line, r.col, r.code));
    }
    out.into_bytes()
}

pub fn write_err_file(records: &[ErrorRecord], path: &Path) -> Result<()> {
    std::fs::write(path, err_file_bytes(records)).map_err(|e| Error::io(path, e))
}

pub fn read_err_file(path: &Path) -> Result<Vec<ErrorRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let parse3 = (|| {
            let l: u32 = parts.next()?.parse().ok()?;
            let c: u32 = parts.next()?.parse().ok()?;
            let code: u32 = parts.next()?.parse().ok()?;
            if parts.next().is_some() || l == 0 || c == 0 || code == 0 {
                return None;
            }
            Some(ErrorRecord::new(l, c, code))
        })();
        match parse3 {
            Some(r) => records.push(r),
            None => {
                return Err(Error::MalformedErrFile { file: path.to_path_buf(), line: i + 1 })
            }
        }
    }
    Ok(records)
}
