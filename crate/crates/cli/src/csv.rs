//! Comma-separated output with LF line endings and no footer. Numbers use
//! the shortest decimal form that parses back to the same `f64`.

use std::io::{self, Write};

/// Shortest round-trip form, independent of locale.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row(&mut self, fields: &[f64]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        let line: Vec<String> = fields.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    /// Row whose first field is an integer index.
    pub fn indexed_row(&mut self, index: usize, fields: &[f64]) -> io::Result<()> {
        debug_assert_eq!(fields.len() + 1, self.columns);
        let mut line = index.to_string();
        for &v in fields {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        writeln!(self.out, "{line}")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
