//! Executes a system under test and records branch coverage.
//!
//! Coverage comes from explicit [`probe`] calls compiled into each SUT. A run
//! owns a worker-local counter table; the trace identity is an AFL-style
//! digest of `(branch, hit-count bucket)` pairs, so inputs whose hit counts
//! land in the same buckets share a trace.

mod bst;
mod expr;
mod trace_log;
mod xml;

use std::cell::RefCell;
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::str::FromStr;

use thiserror::Error;
use xxhash_rust::xxh3::Xxh3;

pub use bst::BstChecker;
pub use expr::{ExprEval, ExprFault};
pub use trace_log::{TraceLogError, TraceLogLine};
pub use xml::XmlValidator;

use crate::generators::GeneratorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchId(pub u32);

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidityResult {
    Valid,
    Invalid,
    Failure,
}

impl ValidityResult {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidityResult::Valid => "valid",
            ValidityResult::Invalid => "invalid",
            ValidityResult::Failure => "failure",
        }
    }
}

impl fmt::Display for ValidityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValidityResult {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "valid" => Ok(ValidityResult::Valid),
            "invalid" => Ok(ValidityResult::Invalid),
            "failure" => Ok(ValidityResult::Failure),
            other => Err(format!("unknown result `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceId(pub u64);

impl fmt::Display for TraceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionRecord {
    pub result: ValidityResult,
    /// Ascending, deduplicated.
    pub covered: Vec<BranchId>,
    pub trace_id: TraceId,
    /// Fault site for `Failure` results.
    pub failure_site: Option<String>,
}

/// A fault raised by a SUT, identified by the site that raised it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub site: String,
}

impl Fault {
    pub fn at(site: impl Into<String>) -> Self {
        Self { site: site.into() }
    }
}

/// Outcome of a SUT run that did not fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

pub trait Sut {
    fn name(&self) -> &str;

    fn execute(&self, input: &[u8]) -> Result<Verdict, Fault>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("probe({0}) called outside of a run")]
    ProbeOutsideRun(BranchId),
}

/// AFL hit-count bucket: 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+ map to 1..=8.
pub fn hit_bucket(count: u32) -> u8 {
    match count {
        0 => 0,
        1 => 1,
        2 => 2,
        3 => 3,
        4..=7 => 4,
        8..=15 => 5,
        16..=31 => 6,
        32..=127 => 7,
        _ => 8,
    }
}

#[derive(Debug, Default)]
struct CounterTable {
    hits: Vec<u32>,
    touched: Vec<u32>,
}

impl CounterTable {
    fn hit(&mut self, id: u32) {
        let idx = id as usize;
        if idx >= self.hits.len() {
            self.hits.resize(idx + 1, 0);
        }
        if self.hits[idx] == 0 {
            self.touched.push(id);
        }
        self.hits[idx] = self.hits[idx].saturating_add(1);
    }

    fn finish(mut self) -> (Vec<BranchId>, TraceId) {
        self.touched.sort_unstable();
        let mut hasher = Xxh3::new();
        for &id in &self.touched {
            hasher.update(&id.to_le_bytes());
            hasher.update(&[hit_bucket(self.hits[id as usize])]);
        }
        let covered = self.touched.into_iter().map(BranchId).collect();
        (covered, TraceId(hasher.digest()))
    }
}

thread_local! {
    static RUN: RefCell<Option<CounterTable>> = const { RefCell::new(None) };
}

/// Records one hit of `branch` in the current run.
pub fn probe(branch: BranchId) -> Result<(), HarnessError> {
    RUN.with(|run| match run.borrow_mut().as_mut() {
        Some(table) => {
            table.hit(branch.0);
            Ok(())
        }
        None => Err(HarnessError::ProbeOutsideRun(branch)),
    })
}

/// Probe shorthand for SUT code, which only ever runs inside [`run`].
#[inline]
pub(crate) fn hit(id: u32) {
    let _ = probe(BranchId(id));
}

/// Runs `body` with a fresh counter table and returns its value together with
/// the coverage it produced. Nested calls get their own table.
pub fn with_coverage<T>(body: impl FnOnce() -> T) -> (T, Vec<BranchId>, TraceId) {
    let outer = RUN.with(|run| run.borrow_mut().replace(CounterTable::default()));
    let value = body();
    let table = RUN.with(|run| std::mem::replace(&mut *run.borrow_mut(), outer));
    let (covered, trace_id) = table.unwrap_or_default().finish();
    (value, covered, trace_id)
}

/// Executes `sut` on `input`. Faults, including panics, become `Failure`
/// records carrying whatever coverage accumulated before the fault.
pub fn run<S: Sut + ?Sized>(sut: &S, input: &[u8]) -> ExecutionRecord {
    let (outcome, covered, trace_id) =
        with_coverage(|| panic::catch_unwind(AssertUnwindSafe(|| sut.execute(input))));
    let (result, failure_site) = match outcome {
        Ok(Ok(Verdict::Valid)) => (ValidityResult::Valid, None),
        Ok(Ok(Verdict::Invalid)) => (ValidityResult::Invalid, None),
        Ok(Err(fault)) => (ValidityResult::Failure, Some(fault.site)),
        Err(_) => (ValidityResult::Failure, Some("panic".to_string())),
    };
    ExecutionRecord {
        result,
        covered,
        trace_id,
        failure_site,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SutKind {
    Bst,
    Xml,
    Expr,
}

impl SutKind {
    pub const ALL: [SutKind; 3] = [SutKind::Bst, SutKind::Xml, SutKind::Expr];

    pub fn name(self) -> &'static str {
        match self {
            SutKind::Bst => "bst_checker",
            SutKind::Xml => "xml_validator",
            SutKind::Expr => "expr_eval",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SutKind::Bst => "bst",
            SutKind::Xml => "xml",
            SutKind::Expr => "expr",
        }
    }

    /// The generator whose output this SUT parses.
    pub fn generator(self) -> GeneratorKind {
        match self {
            SutKind::Bst => GeneratorKind::Tree,
            SutKind::Xml => GeneratorKind::Xml,
            SutKind::Expr => GeneratorKind::Expr,
        }
    }

    pub fn build(self) -> BundledSut {
        match self {
            SutKind::Bst => BundledSut::Bst(BstChecker),
            SutKind::Xml => BundledSut::Xml(XmlValidator),
            SutKind::Expr => BundledSut::Expr(ExprEval::default()),
        }
    }
}

impl fmt::Display for SutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SutKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SutKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.short_name() == s)
            .ok_or_else(|| format!("unknown SUT `{s}` (expected bst, xml or expr)"))
    }
}

#[derive(Debug, Clone)]
pub enum BundledSut {
    Bst(BstChecker),
    Xml(XmlValidator),
    Expr(ExprEval),
}

impl Sut for BundledSut {
    fn name(&self) -> &str {
        match self {
            BundledSut::Bst(s) => s.name(),
            BundledSut::Xml(s) => s.name(),
            BundledSut::Expr(s) => s.name(),
        }
    }

    fn execute(&self, input: &[u8]) -> Result<Verdict, Fault> {
        match self {
            BundledSut::Bst(s) => s.execute(input),
            BundledSut::Xml(s) => s.execute(input),
            BundledSut::Expr(s) => s.execute(input),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Scripted(Vec<u32>);

    impl Sut for Scripted {
        fn name(&self) -> &str {
            "scripted"
        }

        fn execute(&self, _input: &[u8]) -> Result<Verdict, Fault> {
            for &b in &self.0 {
                hit(b);
            }
            Ok(Verdict::Valid)
        }
    }

    fn record(events: &[u32]) -> ExecutionRecord {
        run(&Scripted(events.to_vec()), b"")
    }

    fn oracle_trace(events: &[u32]) -> u64 {
        // bucket-then-hash, computed independently of CounterTable
        let mut counts = std::collections::BTreeMap::new();
        for &e in events {
            *counts.entry(e).or_insert(0u32) += 1;
        }
        let mut bytes = Vec::new();
        for (id, c) in counts {
            let bucket = [0u32, 1, 2, 3, 4, 8, 16, 32, 128]
                .iter()
                .rposition(|&lo| c >= lo)
                .unwrap() as u8;
            bytes.extend_from_slice(&id.to_le_bytes());
            bytes.push(bucket);
        }
        xxhash_rust::xxh3::xxh3_64(&bytes)
    }

    #[test]
    fn covered_is_hit_set() {
        let r = record(&[1, 2, 2, 3]);
        assert_eq!(r.covered, vec![BranchId(1), BranchId(2), BranchId(3)]);
        assert_eq!(r.result, ValidityResult::Valid);
    }

    #[test]
    fn hit_counts_bucketed() {
        assert_ne!(record(&[1, 2, 2, 3]).trace_id, record(&[1, 2, 3]).trace_id);
        assert_eq!(record(&[1, 2, 2, 2, 2, 3]).trace_id, record(&[1, 2, 2, 2, 2, 2, 2, 2, 3]).trace_id);
        for events in [&[1, 2, 2, 3][..], &[5; 200], &[9, 1, 9, 1, 9, 40], &[]] {
            assert_eq!(record(events).trace_id.0, oracle_trace(events));
        }
    }

    #[test]
    fn event_order_is_irrelevant() {
        assert_eq!(record(&[3, 1, 2]).trace_id, record(&[1, 2, 3]).trace_id);
    }

    #[test]
    fn buckets() {
        let expect = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (7, 4), (8, 5), (15, 5), (16, 6), (31, 6), (32, 7), (127, 7), (128, 8), (u32::MAX, 8)];
        for (count, bucket) in expect {
            assert_eq!(hit_bucket(count), bucket, "count {count}");
        }
    }

    #[test]
    fn probe_outside_run_errors() {
        assert_eq!(probe(BranchId(4)), Err(HarnessError::ProbeOutsideRun(BranchId(4))));
    }

    #[test]
    fn faults_keep_partial_coverage_and_reset() {
        struct Faulty;
        impl Sut for Faulty {
            fn name(&self) -> &str {
                "faulty"
            }
            fn execute(&self, _: &[u8]) -> Result<Verdict, Fault> {
                hit(7);
                Err(Fault::at("boom"))
            }
        }
        let r = run(&Faulty, b"");
        assert_eq!(r.result, ValidityResult::Failure);
        assert_eq!(r.failure_site.as_deref(), Some("boom"));
        assert_eq!(r.covered, vec![BranchId(7)]);
        // the next run starts from a clean table
        assert_eq!(record(&[1]).covered, vec![BranchId(1)]);
    }

    #[test]
    fn panics_are_failures() {
        struct Panicky;
        impl Sut for Panicky {
            fn name(&self) -> &str {
                "panicky"
            }
            fn execute(&self, _: &[u8]) -> Result<Verdict, Fault> {
                hit(2);
                panic!("sut bug");
            }
        }
        let hook = panic::take_hook();
        panic::set_hook(Box::new(|_| {}));
        let r = run(&Panicky, b"");
        panic::set_hook(hook);
        assert_eq!(r.result, ValidityResult::Failure);
        assert_eq!(r.failure_site.as_deref(), Some("panic"));
        assert_eq!(r.covered, vec![BranchId(2)]);
        assert!(probe(BranchId(1)).is_err());
    }

    #[test]
    fn nested_runs_are_isolated() {
        let (inner, outer_cov, _) = with_coverage(|| {
            hit(1);
            let inner = record(&[9]);
            hit(2);
            inner
        });
        assert_eq!(inner.covered, vec![BranchId(9)]);
        assert_eq!(outer_cov, vec![BranchId(1), BranchId(2)]);
    }

    #[test]
    fn sut_names_parse() {
        for k in SutKind::ALL {
            assert_eq!(k.name().parse::<SutKind>().unwrap(), k);
            assert_eq!(k.short_name().parse::<SutKind>().unwrap(), k);
        }
        assert!("ant".parse::<SutKind>().is_err());
    }
}
