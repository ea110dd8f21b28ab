use std::io::{self, Write};

use clap::ValueEnum;
use sporadic_core::report::{render_params, render_value};
use sporadic_core::CheckRecord;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    /// Aligned columns for reading.
    #[default]
    Table,
    /// One JSON object per line.
    Json,
}

/// Collects records and tracks the overall verdict. JSON lines go out as
/// soon as they arrive; the table is printed at the end so columns line up.
pub struct Emitter {
    mode: OutputMode,
    rows: Vec<[String; 5]>,
    first_failure: Option<CheckRecord>,
    count: usize,
}

impl Emitter {
    pub fn new(mode: OutputMode) -> Self {
        Self { mode, rows: Vec::new(), first_failure: None, count: 0 }
    }

    pub fn emit(&mut self, rec: CheckRecord) {
        self.count += 1;
        match self.mode {
            OutputMode::Json => {
                let mut out = io::stdout().lock();
                let _ = writeln!(out, "{}", rec.to_json_line());
                let _ = out.flush();
            }
            OutputMode::Table => self.rows.push([
                rec.verdict.to_string(),
                rec.check.clone(),
                render_params(&rec.params),
                render_value(&rec.observed),
                render_value(&rec.required),
            ]),
        }
        if !rec.passed() && self.first_failure.is_none() {
            self.first_failure = Some(rec);
        }
    }

    pub fn extend(&mut self, recs: impl IntoIterator<Item = CheckRecord>) {
        for rec in recs {
            self.emit(rec);
        }
    }

    /// Prints any buffered table and returns the process exit status.
    pub fn finish(self) -> i32 {
        if self.mode == OutputMode::Table && !self.rows.is_empty() {
            let header = ["verdict", "check", "params", "observed", "required"].map(String::from);
            let mut widths = [0usize; 5];
            for row in std::iter::once(&header).chain(&self.rows) {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let mut out = io::stdout().lock();
            for row in std::iter::once(&header).chain(&self.rows) {
                let line: Vec<String> = row
                    .iter()
                    .zip(widths)
                    .map(|(cell, w)| format!("{cell:<w$}"))
                    .collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
        }
        match self.first_failure {
            Some(rec) => {
                eprintln!("failed: {}", rec.to_json_line());
                1
            }
            None => {
                if self.count == 0 {
                    eprintln!("no checks were run");
                }
                0
            }
        }
    }
}
