//! Tabular output. Everything is rendered into memory first and only then
//! written, so a failing command never leaves a partial file behind.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use volcur_core::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }
}

/// A header plus rows of already formatted fields.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    /// A table without header line, e.g. a matrix.
    pub fn headerless() -> Self {
        Table::default()
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(format.delimiter())
            .flexible(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        if !self.header.is_empty() {
            w.write_record(&self.header).map_err(csv_error)?;
        }
        for row in &self.rows {
            w.write_record(row).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `bytes` to `path` atomically (temporary file in the same
/// directory, then rename), or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        }
    }
    Ok(())
}
