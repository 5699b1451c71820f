//! Per-step diagnostics as CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const HEADER: &str = "step,time,kinetic,dirichlet_n,dirichlet_m,total,visc_dissip,dir_dissip,budget_residual,max_norm_err_n,max_norm_err_m,max_dot_nm,max_local_energy,concentration_fired";

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Record {
    pub step: u64,
    pub time: f64,
    pub kinetic: f64,
    pub dirichlet_n: f64,
    pub dirichlet_m: f64,
    pub total: f64,
    pub visc_dissip: f64,
    pub dir_dissip: f64,
    pub budget_residual: f64,
    pub max_norm_err_n: f64,
    pub max_norm_err_m: f64,
    pub max_dot_nm: f64,
    pub max_local_energy: f64,
    pub concentration_fired: bool,
}

impl Record {
    fn floats(&self) -> [f64; 12] {
        [
            self.time,
            self.kinetic,
            self.dirichlet_n,
            self.dirichlet_m,
            self.total,
            self.visc_dissip,
            self.dir_dissip,
            self.budget_residual,
            self.max_norm_err_n,
            self.max_norm_err_m,
            self.max_dot_nm,
            self.max_local_energy,
        ]
    }
}

/// CSV text: the header, then one line per record with floats in
/// 17-significant-digit scientific notation.
pub fn format_timeseries(records: &[Record]) -> String {
    let mut s = String::with_capacity(64 + records.len() * 300);
    s.push_str(HEADER);
    s.push('\n');
    for r in records {
        let _ = write!(s, "{}", r.step);
        for v in r.floats() {
            let _ = write!(s, ",{v:.16e}");
        }
        let _ = writeln!(s, ",{}", u8::from(r.concentration_fired));
    }
    s
}

pub fn write_timeseries(records: &[Record], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Validation {
            field: "records".into(),
            msg: "no records to write".into(),
        });
    }
    std::fs::write(path, format_timeseries(records))?;
    Ok(())
}

pub fn parse_timeseries(text: &str) -> Result<Vec<Record>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    }
    lines
        .map(|(i, l)| {
            let line = i + 1;
            let bad = |msg: &str| Error::Parse { line, msg: msg.into() };
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 14 {
                return Err(bad("expected 14 columns"));
            }
            let f = |j: usize| cols[j].parse::<f64>().map_err(|_| bad("bad float"));
            Ok(Record {
                step: cols[0].parse().map_err(|_| bad("bad step"))?,
                time: f(1)?,
                kinetic: f(2)?,
                dirichlet_n: f(3)?,
                dirichlet_m: f(4)?,
                total: f(5)?,
                visc_dissip: f(6)?,
                dir_dissip: f(7)?,
                budget_residual: f(8)?,
                max_norm_err_n: f(9)?,
                max_norm_err_m: f(10)?,
                max_dot_nm: f(11)?,
                max_local_energy: f(12)?,
                concentration_fired: match cols[13] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("fired must be 0 or 1")),
                },
            })
        })
        .collect()
}
