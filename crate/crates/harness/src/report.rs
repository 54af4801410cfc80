//! CSV tables with comment and footer rows.

use std::io::Write;

use depthcore::io::fmt_real;

use crate::error::Result;

/// Reals with 17 significant digits; infinities as `inf`.
pub fn fmt_value(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        fmt_real(x)
    }
}

/// Rows appear in insertion order; comment lines follow the row they were
/// added after; footers come last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    header: Vec<String>,
    lines: Vec<Line>,
    footers: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
enum Line {
    Row(Vec<String>),
    Comment(String),
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            lines: Vec::new(),
            footers: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.lines.push(Line::Row(row));
    }

    pub fn comment(&mut self, line: String) {
        self.lines.push(Line::Comment(line));
    }

    pub fn footer(&mut self, row: Vec<String>) {
        self.footers.push(row);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[String]> {
        self.lines.iter().filter_map(|l| match l {
            Line::Row(r) => Some(r.as_slice()),
            Line::Comment(_) => None,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for line in &self.lines {
            match line {
                Line::Row(r) => writeln!(w, "{}", r.join(","))?,
                Line::Comment(c) => writeln!(w, "{c}")?,
            }
        }
        for f in &self.footers {
            writeln!(w, "{}", f.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}
