//! Plain tables rendered as CSV or markdown, preceded by a provenance line.

use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Rendered as the first line: `# effsel <version> key=value ...`.
    pub provenance: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn num(v: f64) -> String {
    format!("{v:.4}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), num)
}

impl Report {
    pub fn new(provenance: String, header: &[&str]) -> Self {
        Report {
            provenance,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Md => self.write_md(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record([&self.provenance])?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    fn write_md<W: Write>(&self, mut out: W) -> io::Result<()> {
        let cell = |s: &str| s.replace('|', "\\|");
        writeln!(out, "{}", self.provenance)?;
        writeln!(out)?;
        writeln!(out, "| {} |", self.header.iter().map(|h| cell(h)).collect::<Vec<_>>().join(" | "))?;
        writeln!(out, "|{}", "---|".repeat(self.header.len()))?;
        for r in &self.rows {
            writeln!(out, "| {} |", r.iter().map(|c| cell(c)).collect::<Vec<_>>().join(" | "))?;
        }
        Ok(())
    }
}
