//! Rendering of command results as JSON, CSV, aligned text, or text with
//! superscript exponents.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
    /// Like `table`, with polynomial exponents as superscripts.
    PaperPoly,
}

#[derive(Debug, Clone, Copy)]
pub struct Precision {
    /// Significant digits for general floating output.
    pub sig: usize,
    /// Decimal places for crossover columns of the reference tables.
    pub decimals: usize,
}

impl Precision {
    pub fn new(over: Option<usize>) -> Precision {
        Precision {
            sig: over.unwrap_or(6),
            decimals: over.unwrap_or(4),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
    /// Fixed number of decimals.
    Fixed(f64),
    Poly(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self, fmt: Format, p: Precision) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(x) => sig_digits(*x, p.sig),
            Cell::Fixed(x) => format!("{:.*}", p.decimals, x),
            Cell::Poly(s) if fmt == Format::PaperPoly => superscripts(s),
            Cell::Poly(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Bool(b)
    }
}

/// `x` rounded to `sig` significant digits, trailing zeros dropped.
pub fn sig_digits(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().expect("valid float");
        trim(format!("{:.*}", decimals, rounded))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
    } else {
        s.push_str(".0");
    }
    s
}

/// `16+30x+210x^2` -> `16+30x+210x²`.
pub fn superscripts(s: &str) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '^' && chars.peek().is_some_and(char::is_ascii_digit) {
            while let Some(d) = chars.peek().and_then(|d| d.to_digit(10)) {
                out.push(SUP[d as usize]);
                chars.next();
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// A command result: rows for the text formats, a value for JSON.
pub struct Output {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub json: Value,
    /// Printed alone in table formats when present.
    pub scalar: Option<Cell>,
    /// Table formats print rows without a header line.
    pub bare: bool,
    /// Table formats print this when there are no rows.
    pub empty_text: Option<&'static str>,
}

impl Output {
    pub fn new(headers: Vec<&'static str>, json: Value) -> Output {
        Output {
            headers,
            rows: Vec::new(),
            json,
            scalar: None,
            bare: false,
            empty_text: None,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn render(&self, fmt: Format, p: Precision, w: &mut dyn Write) -> Result<()> {
        match fmt {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.json)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(&self.headers)?;
                for r in &self.rows {
                    out.write_record(r.iter().map(|c| c.render(fmt, p)))?;
                }
                out.flush()?;
            }
            Format::Table | Format::PaperPoly => self.render_table(fmt, p, w)?,
        }
        Ok(())
    }

    fn render_table(&self, fmt: Format, p: Precision, w: &mut dyn Write) -> Result<()> {
        if let Some(s) = &self.scalar {
            writeln!(w, "{}", s.render(fmt, p))?;
            return Ok(());
        }
        if self.rows.is_empty() {
            if let Some(t) = self.empty_text {
                writeln!(w, "{t}")?;
            }
            return Ok(());
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.render(fmt, p)).collect())
            .collect();
        if self.bare {
            for r in &cells {
                writeln!(w, "{}", r.join("  "))?;
            }
            return Ok(());
        }
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &cells {
            for (wd, c) in width.iter_mut().zip(r) {
                *wd = (*wd).max(c.chars().count());
            }
        }
        let line = |r: Vec<&str>| -> String {
            let last = r.len() - 1;
            r.iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == last {
                        c.to_string()
                    } else {
                        format!("{c}{}", " ".repeat(width[i] - c.chars().count()))
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(w, "{}", line(self.headers.clone()))?;
        for r in &cells {
            writeln!(w, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }
}
