use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{BranchId, ExecutionRecord, TraceId, ValidityResult};

/// One line of the trace log: `run_index \t result \t trace_id(hex) \t b1,b2,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLogLine {
    pub run_index: u64,
    pub result: ValidityResult,
    pub trace_id: TraceId,
    pub branches: Vec<BranchId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed trace-log line: {0}")]
pub struct TraceLogError(pub String);

impl TraceLogLine {
    pub fn from_record(run_index: u64, record: &ExecutionRecord) -> Self {
        Self {
            run_index,
            result: record.result,
            trace_id: record.trace_id,
            branches: record.covered.clone(),
        }
    }
}

impl fmt::Display for TraceLogLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t", self.run_index, self.result, self.trace_id)?;
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for TraceLogLine {
    type Err = TraceLogError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let err = |what: &str| TraceLogError(what.to_string());
        let mut fields = line.split('\t');
        let (Some(idx), Some(result), Some(trace), Some(branches), None) =
            (fields.next(), fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err("expected 4 tab-separated fields"));
        };
        let run_index = idx.parse().map_err(|_| err("bad run index"))?;
        let result = result.parse().map_err(|e: String| err(&e))?;
        if trace.is_empty() || trace.len() > 16 {
            return Err(err("bad trace id"));
        }
        let trace_id = TraceId(u64::from_str_radix(trace, 16).map_err(|_| err("bad trace id"))?);
        let branches = if branches.is_empty() {
            Vec::new()
        } else {
            branches
                .split(',')
                .map(|b| b.parse().map(BranchId).map_err(|_| err("bad branch id")))
                .collect::<Result<_, _>>()?
        };
        Ok(Self {
            run_index,
            result,
            trace_id,
            branches,
        })
    }
}
