//! Structure-changing and structure-preserving mutations plus the adaptive,
//! ε-greedy choice between them.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use thiserror::Error;

use crate::choice_source::{ChoiceKind, ParameterSequence, SplitParameterSequence};

pub const DEFAULT_EPSILON: f64 = 0.2;
pub const DEFAULT_MAX_MUTATION_SITES: u32 = 16;
/// Longest span touched by a single overwrite, insert or delete.
pub const MAX_SPAN: usize = 8;
const SITE_COUNT_P: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    Structural,
    Value,
}

impl MutationKind {
    pub fn choice_kind(self) -> ChoiceKind {
        match self {
            MutationKind::Structural => ChoiceKind::Structural,
            MutationKind::Value => ChoiceKind::Value,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random_bool(0.5) {
            MutationKind::Structural
        } else {
            MutationKind::Value
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.choice_kind().fmt(f)
    }
}

/// Per-kind counts of generated inputs (`n`) and of those that produced a
/// previously unseen trace (`u`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationScoreboard {
    pub n_s: u64,
    pub u_s: u64,
    pub n_v: u64,
    pub u_v: u64,
}

impl MutationScoreboard {
    pub fn record_outcome(&mut self, kind: MutationKind, unique_trace: bool) {
        let (n, u) = match kind {
            MutationKind::Structural => (&mut self.n_s, &mut self.u_s),
            MutationKind::Value => (&mut self.n_v, &mut self.u_v),
        };
        *n += 1;
        *u += unique_trace as u64;
    }

    /// `(R_s, R_v)` with `R_x = U_x / N_x`, and `R_x = 0` when `N_x = 0`.
    pub fn calculate_scores(&self) -> (f64, f64) {
        let ratio = |u: u64, n: u64| if n == 0 { 0.0 } else { u as f64 / n as f64 };
        (ratio(self.u_s, self.n_s), ratio(self.u_v, self.n_v))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MutationConfigError {
    #[error("epsilon must be within [0, 1], got {0}")]
    Epsilon(f64),
    #[error("max_mutation_sites must be at least 1")]
    MaxSites,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationConfig {
    pub epsilon: f64,
    pub max_mutation_sites: u32,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_mutation_sites: DEFAULT_MAX_MUTATION_SITES,
        }
    }
}

impl MutationConfig {
    pub fn new(epsilon: f64, max_mutation_sites: u32) -> Result<Self, MutationConfigError> {
        let cfg = Self {
            epsilon,
            max_mutation_sites,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), MutationConfigError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(MutationConfigError::Epsilon(self.epsilon));
        }
        if self.max_mutation_sites == 0 {
            return Err(MutationConfigError::MaxSites);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Overwrite,
    Insert,
    Delete,
}

fn site_count<R: Rng + ?Sized>(rng: &mut R, max_sites: u32) -> u32 {
    let extra = Geometric::new(SITE_COUNT_P).expect("valid p").sample(rng);
    (1 + extra.min(u32::MAX as u64 - 1) as u32).min(max_sites.max(1))
}

fn random_span<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(1..=MAX_SPAN)
}

fn apply<R: Rng + ?Sized>(bytes: &mut Vec<u8>, op: Op, rng: &mut R) {
    let len = bytes.len();
    match op {
        Op::Overwrite if len > 0 => {
            let at = rng.random_range(0..len);
            let span = random_span(rng).min(len - at);
            rng.fill(&mut bytes[at..at + span]);
        }
        Op::Insert => {
            let at = rng.random_range(0..=len);
            let mut fresh = vec![0u8; random_span(rng)];
            rng.fill(fresh.as_mut_slice());
            bytes.splice(at..at, fresh);
        }
        Op::Delete if len > 0 => {
            let at = rng.random_range(0..len);
            let span = random_span(rng).min(len - at);
            bytes.drain(at..at + span);
        }
        _ => {}
    }
}

fn havoc<R: Rng + ?Sized>(seq: &ParameterSequence, rng: &mut R, max_sites: u32, ops: &[Op]) -> ParameterSequence {
    let mut bytes = seq.bytes().to_vec();
    for _ in 0..site_count(rng, max_sites) {
        let op = ops[rng.random_range(0..ops.len())];
        apply(&mut bytes, op, rng);
    }
    if seq.is_empty() && bytes.is_empty() {
        bytes.push(rng.random());
    }
    ParameterSequence::new(bytes)
}

/// Applies a geometric number (mean 4, capped at `max_sites`) of span
/// overwrites, inserts and deletes, each span 1 to 8 octets.
pub fn mutate_sequence<R: Rng + ?Sized>(seq: &ParameterSequence, rng: &mut R, max_sites: u32) -> ParameterSequence {
    havoc(seq, rng, max_sites, &[Op::Overwrite, Op::Insert, Op::Delete])
}

/// Like [`mutate_sequence`] but overwrite-only, so the length and the
/// alignment of every choice in the sequence are kept.
pub fn mutate_sequence_overwrite<R: Rng + ?Sized>(
    seq: &ParameterSequence,
    rng: &mut R,
    max_sites: u32,
) -> ParameterSequence {
    havoc(seq, rng, max_sites, &[Op::Overwrite])
}

pub fn mutate_structural<R: Rng + ?Sized>(
    input: &SplitParameterSequence,
    rng: &mut R,
    config: &MutationConfig,
) -> SplitParameterSequence {
    SplitParameterSequence {
        structural: mutate_sequence(&input.structural, rng, config.max_mutation_sites),
        value: ParameterSequence::new(input.value.bytes().to_vec()),
    }
}

pub fn mutate_value<R: Rng + ?Sized>(
    input: &SplitParameterSequence,
    rng: &mut R,
    config: &MutationConfig,
) -> SplitParameterSequence {
    SplitParameterSequence {
        structural: ParameterSequence::new(input.structural.bytes().to_vec()),
        value: mutate_sequence_overwrite(&input.value, rng, config.max_mutation_sites),
    }
}

pub fn mutate_kind<R: Rng + ?Sized>(
    input: &SplitParameterSequence,
    kind: MutationKind,
    rng: &mut R,
    config: &MutationConfig,
) -> SplitParameterSequence {
    match kind {
        MutationKind::Structural => mutate_structural(input, rng, config),
        MutationKind::Value => mutate_value(input, rng, config),
    }
}

/// The adaptive decision: explore with probability ε, otherwise take the
/// kind with the strictly higher score, falling back to a coin flip on ties.
pub fn select_kind<R: Rng + ?Sized>(scoreboard: &MutationScoreboard, epsilon: f64, rng: &mut R) -> MutationKind {
    if rng.random::<f64>() < epsilon {
        return MutationKind::random(rng);
    }
    let (r_s, r_v) = scoreboard.calculate_scores();
    if r_s > r_v {
        MutationKind::Structural
    } else if r_v > r_s {
        MutationKind::Value
    } else {
        MutationKind::random(rng)
    }
}

pub fn mutate_adaptive<R: Rng + ?Sized>(
    input: &SplitParameterSequence,
    scoreboard: &MutationScoreboard,
    config: &MutationConfig,
    rng: &mut R,
) -> (SplitParameterSequence, MutationKind) {
    let kind = select_kind(scoreboard, config.epsilon, rng);
    (mutate_kind(input, kind, rng, config), kind)
}
