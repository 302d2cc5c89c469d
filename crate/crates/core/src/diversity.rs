//! Hill numbers and behavioral diversity over branch abundances.
//!
//! A branch's abundance is the number of distinct traces that executed it.
//! `B(q)` is the Hill number of order `q` of the relative abundances: `B(0)`
//! is the number of covered branches, `B(1)` the exponential of the Shannon
//! entropy, `B(2)` the inverse Simpson concentration.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::harness::{BranchId, TraceLogLine, ValidityResult};
use crate::stats::StatsRow;

/// Orders within this distance of 1 use the Shannon closed form.
pub const SHANNON_WINDOW: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DiversityError {
    #[error("abundance vector is empty")]
    EmptyAbundance,
    #[error("abundance at index {0} is not positive")]
    NonPositiveCount(usize),
    #[error("order q must be a non-negative number, got {0}")]
    InvalidOrder(f64),
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Hill number of order `q` over positive abundance counts.
pub fn hill_number(counts: &[u64], q: f64) -> Result<f64, DiversityError> {
    if counts.is_empty() {
        return Err(DiversityError::EmptyAbundance);
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(DiversityError::NonPositiveCount(i));
    }
    if !q.is_finite() || q < 0.0 {
        return Err(DiversityError::InvalidOrder(q));
    }
    let total = counts.iter().map(|&c| c as f64).sum::<f64>();
    let rel = counts.iter().map(|&c| c as f64 / total);

    if (q - 1.0).abs() <= SHANNON_WINDOW {
        let entropy = -compensated_sum(rel.map(|p| p * p.ln()));
        return Ok(entropy.exp());
    }
    if (q - 1.0).abs() < 0.5 {
        // Near q = 1, sum p^q is 1 + small; carry the small part explicitly:
        // sum p^q - 1 = sum p * (p^(q-1) - 1).
        let excess = compensated_sum(rel.map(|p| p * ((q - 1.0) * p.ln()).exp_m1()));
        return Ok((excess.ln_1p() / (1.0 - q)).exp());
    }
    let power_sum = compensated_sum(rel.map(|p| p.powf(q)));
    Ok(power_sum.powf(1.0 / (1.0 - q)))
}

/// Per-branch counts of distinct traces, indexed densely by branch id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbundanceVector {
    counts: Vec<u64>,
    richness: usize,
    total: u64,
}

impl AbundanceVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Credits one distinct trace to every branch it covered.
    pub fn add_trace(&mut self, covered: &[BranchId]) {
        for b in covered {
            let idx = b.0 as usize;
            if idx >= self.counts.len() {
                self.counts.resize(idx + 1, 0);
            }
            if self.counts[idx] == 0 {
                self.richness += 1;
            }
            self.counts[idx] += 1;
            self.total += 1;
        }
    }

    pub fn get(&self, branch: BranchId) -> u64 {
        self.counts.get(branch.0 as usize).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (BranchId, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (BranchId(i as u32), c))
    }

    /// The positive counts, in branch-id order.
    pub fn counts(&self) -> Vec<u64> {
        self.entries().map(|(_, c)| c).collect()
    }

    pub fn richness(&self) -> usize {
        self.richness
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.richness == 0
    }
}

pub fn behavioral_diversity(av: &AbundanceVector, q: f64) -> Result<f64, DiversityError> {
    hill_number(&av.counts(), q)
}

/// Builds abundances from a trace log, counting each trace id once (first
/// occurrence wins). Failure lines never contribute, matching the campaign's
/// own abundance bookkeeping. Blank lines are skipped.
pub fn abundance_from_trace_log<R: BufRead>(log: R, valid_only: bool) -> Result<AbundanceVector, DiversityError> {
    let mut seen = HashSet::new();
    let mut av = AbundanceVector::new();
    for (i, line) in log.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TraceLogLine = line.parse().map_err(|e: crate::harness::TraceLogError| DiversityError::MalformedLine {
            line: i + 1,
            reason: e.0,
        })?;
        if parsed.result == ValidityResult::Failure || (valid_only && parsed.result != ValidityResult::Valid) {
            continue;
        }
        if seen.insert(parsed.trace_id) {
            av.add_trace(&parsed.branches);
        }
    }
    Ok(av)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityProfile {
    pub elapsed_ms: u64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl DiversityProfile {
    /// `(B(0), B(1), B(2))` of `av`; all zero before anything is covered.
    pub fn of(av: &AbundanceVector, elapsed_ms: u64) -> Self {
        if av.is_empty() {
            return Self {
                elapsed_ms,
                b0: 0.0,
                b1: 0.0,
                b2: 0.0,
            };
        }
        let counts = av.counts();
        let d = |q| hill_number(&counts, q).expect("non-empty positive counts");
        Self {
            elapsed_ms,
            b0: av.richness() as f64,
            b1: d(1.0),
            b2: d(2.0),
        }
    }
}

pub fn profile_series<'a>(rows: impl IntoIterator<Item = &'a StatsRow>) -> Vec<DiversityProfile> {
    rows.into_iter()
        .map(|r| DiversityProfile {
            elapsed_ms: r.elapsed_ms,
            b0: r.b0,
            b1: r.b1,
            b2: r.b2,
        })
        .collect()
}

pub const DIVERSITY_CSV_HEADER: &str = "elapsed_ms,b0,b1,b2";

pub fn write_diversity_csv<W: Write>(out: &mut W, profiles: &[DiversityProfile]) -> io::Result<()> {
    writeln!(out, "{DIVERSITY_CSV_HEADER}")?;
    for p in profiles {
        writeln!(out, "{},{:.6},{:.6},{:.6}", p.elapsed_ms, p.b0, p.b1, p.b2)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn equal_abundances_give_richness() {
        for q in [0.0, 0.5, 1.0, 1.0 + 1e-12, 1.3, 2.0, 7.5] {
            assert!(close(hill_number(&[1, 1, 1, 1], q).unwrap(), 4.0, 1e-12), "q = {q}");
        }
    }

    #[test]
    fn two_species_values() {
        // 1 / (0.75^2 + 0.25^2)
        assert!(close(hill_number(&[3, 1], 2.0).unwrap(), 1.6, 1e-12));
        // exp(-(0.75 ln 0.75 + 0.25 ln 0.25))
        let shannon = (-(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln())).exp();
        assert!(close(hill_number(&[3, 1], 1.0).unwrap(), shannon, 1e-14));
        assert!(close(shannon, 1.754765, 1e-6));
        assert_eq!(hill_number(&[3, 1], 0.0).unwrap(), 2.0);
    }

    #[test]
    fn inverse_simpson_of_skewed_vector() {
        // p = counts / 25, (sum p^2)^-1 = 625 / 205
        let d = hill_number(&[10, 10, 1, 1, 1, 1, 1], 2.0).unwrap();
        assert!(close(d, 625.0 / 205.0, 1e-12));
        assert!(close(d, 3.04878, 1e-5));
    }

    #[test]
    fn errors() {
        assert!(matches!(hill_number(&[], 1.0), Err(DiversityError::EmptyAbundance)));
        assert!(matches!(hill_number(&[2, 0, 1], 1.0), Err(DiversityError::NonPositiveCount(1))));
        assert!(matches!(hill_number(&[2], -1.0), Err(DiversityError::InvalidOrder(_))));
        assert!(matches!(hill_number(&[2], f64::NAN), Err(DiversityError::InvalidOrder(_))));
        assert!(matches!(
            behavioral_diversity(&AbundanceVector::new(), 0.0),
            Err(DiversityError::EmptyAbundance)
        ));
    }

    #[test]
    fn shannon_window_is_continuous() {
        let counts = [5, 1, 9, 2, 2, 40, 1];
        let at_one = hill_number(&counts, 1.0).unwrap();
        for dq in [1e-10, 1e-8, 1e-6, 1e-4] {
            for q in [1.0 - dq, 1.0 + dq] {
                let diff = (hill_number(&counts, q).unwrap() - at_one).abs();
                assert!(diff <= 5.0 * dq + 1e-12, "q = {q}: {diff}");
            }
        }
    }

    #[test]
    fn abundance_counts_distinct_traces() {
        let mut av = AbundanceVector::new();
        av.add_trace(&[BranchId(1), BranchId(2)]);
        av.add_trace(&[BranchId(2), BranchId(3)]);
        assert_eq!(av.counts(), vec![1, 2, 1]);
        assert_eq!(av.get(BranchId(2)), 2);
        assert_eq!(av.get(BranchId(99)), 0);
        assert_eq!(av.richness(), 3);
        assert_eq!(av.total(), 4);
        let b0 = behavioral_diversity(&av, 0.0).unwrap();
        assert_eq!(b0, 3.0);
    }

    #[test]
    fn trace_log_dedup_and_filter() {
        let log = "0\tvalid\taa\t1,2\n1\tvalid\taa\t1,2\n2\tinvalid\tbb\t2,3\n\n";
        let av = abundance_from_trace_log(log.as_bytes(), false).unwrap();
        assert_eq!(av.entries().collect::<Vec<_>>(), vec![(BranchId(1), 1), (BranchId(2), 2), (BranchId(3), 1)]);
        let valid = abundance_from_trace_log(log.as_bytes(), true).unwrap();
        assert_eq!(valid.counts(), vec![1, 1]);
    }

    #[test]
    fn trace_log_reports_line_number() {
        let log = "0\tvalid\taa\t1\n1\tvalid\tbb\t2\ngarbage\n";
        match abundance_from_trace_log(log.as_bytes(), false) {
            Err(DiversityError::MalformedLine { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_of_even_feed() {
        let mut av = AbundanceVector::new();
        for b in 0..6 {
            av.add_trace(&[BranchId(b)]);
        }
        let p = DiversityProfile::of(&av, 5);
        assert_eq!(p.b0, 6.0);
        assert!(close(p.b1, 6.0, 1e-12) && close(p.b2, 6.0, 1e-12));
        let empty = DiversityProfile::of(&AbundanceVector::new(), 0);
        assert_eq!((empty.b0, empty.b1, empty.b2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn diversity_csv_format() {
        let mut out = Vec::new();
        write_diversity_csv(
            &mut out,
            &[DiversityProfile {
                elapsed_ms: 10,
                b0: 3.0,
                b1: 2.5,
                b2: 2.0,
            }],
        )
        .unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "elapsed_ms,b0,b1,b2\n10,3.000000,2.500000,2.000000\n");
    }
}
