//! Table emission: comma-separated with a header row and LF endings, or
//! JSON (an array of objects, or a single object).

use crate::error::{io_err, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Like [`write_csv`] but writes just the header when `rows` is empty.
pub fn write_csv_with_header<W: Write, T: Serialize>(w: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).has_headers(false).from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p).map_err(io_err(p))?))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}
