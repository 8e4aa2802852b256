use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::Failure;

/// Schema version written in the CSV header comment.
pub const SCHEMA_VERSION: u32 = 1;

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// RFC-4180 CSV preceded by `# cdpp <command> v<N>`.
pub fn write_csv<W: Write>(mut w: W, command: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    writeln!(w, "# cdpp {command} v{SCHEMA_VERSION}").map_err(io_err)?;
    let mut c = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
    c.write_record(header).map_err(csv_err)?;
    for r in rows {
        c.write_record(r).map_err(csv_err)?;
    }
    c.flush().map_err(io_err)
}

pub fn write_ndjson<W: Write, T: Serialize>(mut w: W, items: &[T]) -> Result<(), Failure> {
    for it in items {
        serde_json::to_writer(&mut w, it).map_err(|e| Failure::Io(e.to_string()))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn io_err(e: io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

/// f64 in shortest round-trip decimal; empty for None.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
