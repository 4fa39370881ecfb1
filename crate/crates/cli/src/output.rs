//! Self-describing CSV artifacts.
//!
//! Every file starts with `#` lines carrying the tool version, the resolved
//! configuration as JSON and the seed, followed by an ordinary CSV table.
//! Floats are written as shortest round-trip decimals.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use crate::config::ExperimentConfig;

pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn create(config: &ExperimentConfig, columns: &[&str]) -> io::Result<Self> {
        let mut out: Box<dyn Write> = match &config.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        writeln!(out, "# sinf {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# config: {}", serde_json::to_string(config).map_err(io::Error::other)?)?;
        writeln!(out, "# seed: {}", config.seed())?;
        let mut writer = csv::WriterBuilder::new().from_writer(out);
        writer.write_record(columns)?;
        Ok(Table { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(io::Error::other)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
