//! The campaign statistics CSV.

use std::io::{self, BufRead, Write};

use thiserror::Error;

pub const STATS_HEADER: &str =
    "elapsed_ms,total_runs,valid_runs,diverse_valid_runs,num_branches,num_traces,b0,b1,b2,n_s,u_s,n_v,u_v";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsRow {
    pub elapsed_ms: u64,
    pub total_runs: u64,
    pub valid_runs: u64,
    pub diverse_valid_runs: u64,
    pub num_branches: u64,
    pub num_traces: u64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub n_s: u64,
    pub u_s: u64,
    pub n_v: u64,
    pub u_v: u64,
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("stats header mismatch: expected `{STATS_HEADER}`, found `{0}`")]
    Header(String),
    #[error("stats file is empty")]
    Empty,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl StatsRow {
    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{},{},{},{}",
            self.elapsed_ms,
            self.total_runs,
            self.valid_runs,
            self.diverse_valid_runs,
            self.num_branches,
            self.num_traces,
            self.b0,
            self.b1,
            self.b2,
            self.n_s,
            self.u_s,
            self.n_v,
            self.u_v
        )
    }

    fn parse(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(format!("expected 13 columns, found {}", fields.len()));
        }
        let int = |i: usize| fields[i].parse::<u64>().map_err(|e| format!("column {}: {e}", i + 1));
        let real = |i: usize| fields[i].parse::<f64>().map_err(|e| format!("column {}: {e}", i + 1));
        Ok(Self {
            elapsed_ms: int(0)?,
            total_runs: int(1)?,
            valid_runs: int(2)?,
            diverse_valid_runs: int(3)?,
            num_branches: int(4)?,
            num_traces: int(5)?,
            b0: real(6)?,
            b1: real(7)?,
            b2: real(8)?,
            n_s: int(9)?,
            u_s: int(10)?,
            n_v: int(11)?,
            u_v: int(12)?,
        })
    }
}

pub fn write_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "{STATS_HEADER}")
}

pub fn read_stats<R: BufRead>(input: R) -> Result<Vec<StatsRow>, StatsError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(StatsError::Empty)??;
    if header.trim_end() != STATS_HEADER {
        return Err(StatsError::Header(header));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(StatsRow::parse(line.trim_end()).map_err(|reason| StatsError::Row { line: i + 2, reason })?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> StatsRow {
        StatsRow {
            elapsed_ms: 1500,
            total_runs: 1000,
            valid_runs: 400,
            diverse_valid_runs: 120,
            num_branches: 37,
            num_traces: 300,
            b0: 37.0,
            b1: 21.123456789,
            b2: 14.5,
            n_s: 500,
            u_s: 90,
            n_v: 499,
            u_v: 200,
        }
    }

    #[test]
    fn row_format() {
        let mut out = Vec::new();
        write_header(&mut out).unwrap();
        row().write_to(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "1500,1000,400,120,37,300,37.000000,21.123457,14.500000,500,90,499,200"
        );
        let back = read_stats(text.as_bytes()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].b1, 21.123457);
        assert_eq!(back[0].u_v, 200);
    }

    #[test]
    fn header_mismatch() {
        assert!(matches!(read_stats("a,b\n1,2\n".as_bytes()), Err(StatsError::Header(_))));
        assert!(matches!(read_stats("".as_bytes()), Err(StatsError::Empty)));
        let bad_row = format!("{STATS_HEADER}\n1,2,3\n");
        assert!(matches!(read_stats(bad_row.as_bytes()), Err(StatsError::Row { line: 2, .. })));
    }
}
