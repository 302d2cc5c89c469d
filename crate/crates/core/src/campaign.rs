//! The fuzzing main loop: queue cycling, child budgeting, save heuristics,
//! failure collection, and the zest-like and quickcheck-like baselines.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::choice_source::{ChoiceError, ChoiceSource, SplitParameterSequence, StructuralSignature};
use crate::corpus::{self, CorpusError, FAILURES_DIR, QUEUE_DIR};
use crate::diversity::{profile_series, write_diversity_csv, AbundanceVector, DiversityProfile};
use crate::generators::{generate, BundledGenerator, GenError, GeneratedInput, Generator, GeneratorKind};
use crate::harness::{run, BranchId, BundledSut, ExecutionRecord, Sut, SutKind, TraceId, TraceLogLine, ValidityResult};
use crate::mutation::{mutate_adaptive, mutate_kind, MutationConfig, MutationKind, MutationScoreboard};
use crate::stats::{self, StatsRow};

/// Octets in each sequence of the random initial queue entry.
pub const SEED_PARAM_LEN: usize = 16;
pub const BASE_CHILDREN: f64 = 50.0;
pub const MIN_CHILDREN: u32 = 10;
pub const MAX_CHILDREN: u32 = 100;
pub const DEFAULT_STATS_INTERVAL: u64 = 1000;

pub const STATS_FILE: &str = "stats.csv";
pub const DIVERSITY_FILE: &str = "diversity.csv";
pub const TRACE_LOG_FILE: &str = "trace.log";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Adaptive split mutation; saves valid inputs with new coverage and an
    /// unseen structural signature.
    BedivStructure,
    /// Adaptive split mutation; saves valid inputs with new coverage.
    BedivSimple,
    /// Uniformly random mutation kind; saves any non-failing input with new
    /// coverage.
    Zest,
    /// Fresh random inputs from the generator, no queue and no feedback.
    Quickcheck,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::BedivStructure, Mode::BedivSimple, Mode::Zest, Mode::Quickcheck];

    pub fn name(self) -> &'static str {
        match self {
            Mode::BedivStructure => "bediv-structure",
            Mode::BedivSimple => "bediv-simple",
            Mode::Zest => "zest",
            Mode::Quickcheck => "quickcheck",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            format!("unknown mode `{s}` (expected bediv-structure, bediv-simple, zest or quickcheck)")
        })
    }
}

/// How long a campaign runs. In run-count mode the campaign clock is logical:
/// one run advances `elapsed_ms` by one, which keeps every output
/// reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Runs(u64),
    Time(Duration),
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub mode: Mode,
    pub budget: Budget,
    pub seed: u64,
    pub generator: GeneratorKind,
    pub max_depth: Option<u32>,
    pub sut: SutKind,
    pub mutation: MutationConfig,
    /// Campaign-clock units between stats rows.
    pub stats_interval: u64,
    pub out_dir: Option<PathBuf>,
    pub trace_log: bool,
    /// Directory of parameter files that replaces the random initial entry.
    pub seed_corpus: Option<PathBuf>,
    /// Count only valid traces in the branch abundances.
    pub valid_only_abundance: bool,
}

impl CampaignConfig {
    pub fn new(mode: Mode, sut: SutKind, budget: Budget, seed: u64) -> Self {
        Self {
            mode,
            budget,
            seed,
            generator: sut.generator(),
            max_depth: None,
            sut,
            mutation: MutationConfig::default(),
            stats_interval: DEFAULT_STATS_INTERVAL,
            out_dir: None,
            trace_log: false,
            seed_corpus: None,
            valid_only_abundance: false,
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        match self.budget {
            Budget::Runs(0) => return Err(CampaignError::Config("run budget must be positive".into())),
            Budget::Time(d) if d.is_zero() => {
                return Err(CampaignError::Config("time budget must be positive".into()))
            }
            _ => {}
        }
        if self.stats_interval == 0 {
            return Err(CampaignError::Config("stats interval must be positive".into()));
        }
        self.mutation.validate().map_err(|e| CampaignError::Config(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("generator error: {0}")]
    Generator(#[from] GenError),
    #[error("generation failed: {0}")]
    Generation(#[from] ChoiceError),
    #[error("corpus error: {error}")]
    Corpus {
        error: CorpusError,
        /// The state reached before the failure, when the loop had started.
        partial: Option<Box<CampaignReport>>,
    },
}

impl From<CorpusError> for CampaignError {
    fn from(error: CorpusError) -> Self {
        CampaignError::Corpus { error, partial: None }
    }
}

/// One generated and executed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub input: GeneratedInput,
    pub record: ExecutionRecord,
}

/// Turns parameters into an executed input. `extension_seed` seeds the
/// record-extend randomness used once the parameters run out.
pub trait Executor {
    fn execute(&mut self, params: SplitParameterSequence, extension_seed: u64) -> Result<Execution, CampaignError>;
}

/// Generator plus SUT pair.
#[derive(Debug, Clone)]
pub struct GeneratorExecutor<G, S> {
    pub generator: G,
    pub sut: S,
}

impl GeneratorExecutor<BundledGenerator, BundledSut> {
    pub fn bundled(generator: GeneratorKind, max_depth: Option<u32>, sut: SutKind) -> Result<Self, GenError> {
        Ok(Self {
            generator: generator.build(max_depth)?,
            sut: sut.build(),
        })
    }
}

impl<G: Generator, S: Sut> Executor for GeneratorExecutor<G, S> {
    fn execute(&mut self, params: SplitParameterSequence, extension_seed: u64) -> Result<Execution, CampaignError> {
        let mut source = ChoiceSource::recording(params, extension_seed);
        let input = generate(&self.generator, &mut source)?;
        let record = run(&self.sut, &input.concrete);
        Ok(Execution { input, record })
    }
}

/// What happened in one run, as seen by an [`Observer`].
#[derive(Debug)]
pub struct RunEvent<'a> {
    /// 1-based run number.
    pub run: u64,
    /// `None` for initial entries and quickcheck runs.
    pub kind: Option<MutationKind>,
    pub execution: &'a Execution,
    pub new_branches: usize,
    pub unique_trace: bool,
    pub saved: bool,
}

pub trait Observer {
    /// Called after every run; `Break` ends the campaign early.
    fn on_run(&mut self, event: &RunEvent<'_>, state: &CampaignState) -> ControlFlow<()>;
}

impl Observer for () {
    fn on_run(&mut self, _: &RunEvent<'_>, _: &CampaignState) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

impl<F: FnMut(&RunEvent<'_>, &CampaignState) -> ControlFlow<()>> Observer for F {
    fn on_run(&mut self, event: &RunEvent<'_>, state: &CampaignState) -> ControlFlow<()> {
        self(event, state)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueEntry {
    pub params: SplitParameterSequence,
    /// Branches this entry added to the total coverage when it was saved.
    pub novelty: usize,
    /// `None` until the entry has been executed.
    pub result: Option<ValidityResult>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureEntry {
    pub params: SplitParameterSequence,
    pub site: String,
    pub run: u64,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignState {
    pub queue: Vec<QueueEntry>,
    pub failures: Vec<FailureEntry>,
    pub coverage: HashSet<BranchId>,
    pub traces: HashSet<TraceId>,
    pub structures: HashSet<StructuralSignature>,
    pub abundance: AbundanceVector,
    pub scoreboard: MutationScoreboard,
    pub total_runs: u64,
    pub valid_runs: u64,
    pub diverse_valid_runs: u64,
    pub elapsed_ms: u64,
    pub valid_only_abundance: bool,
}

impl CampaignState {
    pub fn new(valid_only_abundance: bool) -> Self {
        Self {
            valid_only_abundance,
            ..Self::default()
        }
    }

    pub fn new_branch_count(&self, covered: &[BranchId]) -> usize {
        covered.iter().filter(|b| !self.coverage.contains(b)).count()
    }

    pub fn profile(&self) -> DiversityProfile {
        DiversityProfile::of(&self.abundance, self.elapsed_ms)
    }

    pub fn stats_row(&self) -> StatsRow {
        let p = self.profile();
        let sb = self.scoreboard;
        StatsRow {
            elapsed_ms: self.elapsed_ms,
            total_runs: self.total_runs,
            valid_runs: self.valid_runs,
            diverse_valid_runs: self.diverse_valid_runs,
            num_branches: self.coverage.len() as u64,
            num_traces: self.traces.len() as u64,
            b0: p.b0,
            b1: p.b1,
            b2: p.b2,
            n_s: sb.n_s,
            u_s: sb.u_s,
            n_v: sb.n_v,
            u_v: sb.u_v,
        }
    }
}

/// Children to derive from `parent` per queue cycle:
/// `50 * (1 + novelty / max(1, mean novelty))`, clamped to `[10, 100]`.
pub fn num_children(parent: &QueueEntry, state: &CampaignState) -> u32 {
    let mean = if state.queue.is_empty() {
        0.0
    } else {
        state.queue.iter().map(|e| e.novelty as f64).sum::<f64>() / state.queue.len() as f64
    };
    let fraction = 1.0 + parent.novelty as f64 / mean.max(1.0);
    ((BASE_CHILDREN * fraction).round() as u32).clamp(MIN_CHILDREN, MAX_CHILDREN)
}

/// The per-mode save heuristic, evaluated against the state before the run
/// is accounted.
pub fn should_save(record: &ExecutionRecord, signature: StructuralSignature, state: &CampaignState, mode: Mode) -> bool {
    let new_coverage = state.new_branch_count(&record.covered) > 0;
    let valid = record.result == ValidityResult::Valid;
    match mode {
        Mode::BedivStructure => valid && new_coverage && !state.structures.contains(&signature),
        Mode::BedivSimple => valid && new_coverage,
        Mode::Zest => record.result != ValidityResult::Failure && new_coverage,
        Mode::Quickcheck => false,
    }
}

/// Result of [`update_coverage_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageUpdate {
    pub new_branches: usize,
    pub unique_trace: bool,
}

/// Merges a non-failing run into the campaign bookkeeping: total coverage,
/// unique traces, branch abundances, the scoreboard and the validity counters.
pub fn update_coverage_stats(
    record: &ExecutionRecord,
    kind: Option<MutationKind>,
    state: &mut CampaignState,
) -> CoverageUpdate {
    let new_branches = state.new_branch_count(&record.covered);
    state.coverage.extend(record.covered.iter().copied());
    let unique_trace = state.traces.insert(record.trace_id);
    let valid = record.result == ValidityResult::Valid;
    if unique_trace && (valid || !state.valid_only_abundance) {
        state.abundance.add_trace(&record.covered);
    }
    if let Some(kind) = kind {
        state.scoreboard.record_outcome(kind, unique_trace);
    }
    if valid {
        state.valid_runs += 1;
        if unique_trace {
            state.diverse_valid_runs += 1;
        }
    }
    CoverageUpdate {
        new_branches,
        unique_trace,
    }
}

fn random_params<R: Rng + ?Sized>(rng: &mut R) -> SplitParameterSequence {
    let mut s = vec![0u8; SEED_PARAM_LEN];
    let mut v = vec![0u8; SEED_PARAM_LEN];
    rng.fill(&mut s[..]);
    rng.fill(&mut v[..]);
    SplitParameterSequence::new(s, v)
}

/// Puts the random initial entry into an empty queue.
pub fn seed_queue<R: Rng + ?Sized>(state: &mut CampaignState, rng: &mut R) {
    debug_assert!(state.queue.is_empty());
    state.queue.push(QueueEntry {
        params: random_params(rng),
        novelty: 0,
        result: None,
    });
}

/// A distinct failure site and how often it was hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureSite {
    pub site: String,
    pub first_run: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub mode: Mode,
    pub total_runs: u64,
    pub valid_runs: u64,
    pub diverse_valid_runs: u64,
    pub num_branches: usize,
    pub num_traces: usize,
    pub queue_len: usize,
    pub structures: usize,
    pub failures: usize,
    pub failure_sites: Vec<FailureSite>,
    pub scoreboard: MutationScoreboard,
    pub series: Vec<StatsRow>,
    pub final_profile: DiversityProfile,
    pub out_dir: Option<PathBuf>,
}

/// `key,value` lines; failure sites as `failure_site,<site>,<first run>,<count>`.
impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode,{}", self.mode)?;
        writeln!(f, "total_runs,{}", self.total_runs)?;
        writeln!(f, "valid_runs,{}", self.valid_runs)?;
        writeln!(f, "diverse_valid_runs,{}", self.diverse_valid_runs)?;
        writeln!(f, "num_branches,{}", self.num_branches)?;
        writeln!(f, "num_traces,{}", self.num_traces)?;
        writeln!(f, "queue,{}", self.queue_len)?;
        writeln!(f, "structures,{}", self.structures)?;
        writeln!(f, "failures,{}", self.failures)?;
        for s in &self.failure_sites {
            writeln!(f, "failure_site,{},{},{}", s.site, s.first_run, s.count)?;
        }
        writeln!(f, "b0,{:.6}", self.final_profile.b0)?;
        writeln!(f, "b1,{:.6}", self.final_profile.b1)?;
        writeln!(f, "b2,{:.6}", self.final_profile.b2)?;
        if let Some(dir) = &self.out_dir {
            writeln!(f, "out,{}", dir.display())?;
        }
        Ok(())
    }
}

struct Output {
    root: PathBuf,
    stats: BufWriter<File>,
    trace: Option<BufWriter<File>>,
}

impl Output {
    fn create(root: &Path, trace_log: bool) -> Result<Self, CorpusError> {
        for sub in [QUEUE_DIR, FAILURES_DIR] {
            let d = root.join(sub);
            fs::create_dir_all(&d).map_err(|e| CorpusError::io(&d, e))?;
        }
        let open = |name: &str| -> Result<BufWriter<File>, CorpusError> {
            let p = root.join(name);
            File::create(&p).map(BufWriter::new).map_err(|e| CorpusError::io(&p, e))
        };
        let mut stats_out = open(STATS_FILE)?;
        stats::write_header(&mut stats_out).map_err(|e| CorpusError::io(&root.join(STATS_FILE), e))?;
        let trace = if trace_log { Some(open(TRACE_LOG_FILE)?) } else { None };
        Ok(Self {
            root: root.to_path_buf(),
            stats: stats_out,
            trace,
        })
    }

    fn io(&self, name: &str, e: io::Error) -> CorpusError {
        CorpusError::io(&self.root.join(name), e)
    }
}

struct Campaign<'a> {
    config: &'a CampaignConfig,
    state: CampaignState,
    rng: ChaCha8Rng,
    executor: &'a mut dyn Executor,
    observer: &'a mut dyn Observer,
    output: Option<Output>,
    /// Wall-clock start; only time budgets read the clock.
    start: Option<Instant>,
    next_stats: u64,
    series: Vec<StatsRow>,
    sites: Vec<FailureSite>,
    site_index: HashMap<String, usize>,
    saved_entries: u64,
}

enum Step {
    Continue,
    Stop,
}

impl Campaign<'_> {
    fn exhausted(&self) -> bool {
        match self.config.budget {
            Budget::Runs(n) => self.state.total_runs >= n,
            Budget::Time(d) => self.wall_elapsed() >= d,
        }
    }

    fn tick(&mut self) {
        self.state.elapsed_ms = match self.config.budget {
            Budget::Runs(_) => self.state.total_runs,
            Budget::Time(_) => self.wall_elapsed().as_millis() as u64,
        };
    }

    fn wall_elapsed(&self) -> Duration {
        self.start.map_or(Duration::ZERO, |s| s.elapsed())
    }

    fn emit_row(&mut self) -> Result<(), CorpusError> {
        let row = self.state.stats_row();
        if let Some(out) = &mut self.output {
            row.write_to(&mut out.stats)
                .and_then(|_| out.stats.flush())
                .map_err(|e| out.io(STATS_FILE, e))?;
        }
        self.series.push(row);
        Ok(())
    }

    fn persist_queue_entry(&mut self, idx: usize, concrete: &[u8]) -> Result<(), CorpusError> {
        let Some(out) = &self.output else { return Ok(()) };
        let entry = &self.state.queue[idx];
        let result = entry.result.unwrap_or(ValidityResult::Invalid);
        corpus::write_entry(
            &out.root.join(QUEUE_DIR),
            &corpus::entry_stem(self.saved_entries, result),
            &entry.params,
            concrete,
        )?;
        self.saved_entries += 1;
        Ok(())
    }

    fn record_failure(&mut self, exec: &Execution) -> Result<(), CorpusError> {
        let site = exec.record.failure_site.clone().unwrap_or_else(|| "unknown".into());
        let run = self.state.total_runs;
        self.state.failures.push(FailureEntry {
            params: exec.input.source_snapshot.clone(),
            site: site.clone(),
            run,
        });
        if let Some(&i) = self.site_index.get(&site) {
            self.sites[i].count += 1;
            return Ok(());
        }
        self.site_index.insert(site.clone(), self.sites.len());
        self.sites.push(FailureSite {
            site,
            first_run: run,
            count: 1,
        });
        if let Some(out) = &self.output {
            let id = self.sites.len() as u64 - 1;
            corpus::write_entry(
                &out.root.join(FAILURES_DIR),
                &corpus::entry_stem(id, ValidityResult::Failure),
                &exec.input.source_snapshot,
                &exec.input.concrete,
            )?;
        }
        Ok(())
    }

    /// Executes one input and accounts for it. With `queue_slot` set, the
    /// executed parameters replace that (initial) queue entry instead of
    /// going through the save heuristic.
    fn execute(
        &mut self,
        params: SplitParameterSequence,
        kind: Option<MutationKind>,
        queue_slot: Option<usize>,
    ) -> Result<Step, CampaignError> {
        let extension_seed = self.rng.random();
        let exec = self.executor.execute(params, extension_seed)?;
        self.state.total_runs += 1;

        let mut update = CoverageUpdate {
            new_branches: 0,
            unique_trace: false,
        };
        let mut saved = false;
        if exec.record.result == ValidityResult::Failure {
            if let Some(kind) = kind {
                self.state.scoreboard.record_outcome(kind, false);
            }
            self.record_failure(&exec)?;
        } else {
            let save = queue_slot.is_none() && should_save(&exec.record, exec.input.signature, &self.state, self.config.mode);
            update = update_coverage_stats(&exec.record, kind, &mut self.state);
            if let Some(out) = &mut self.output {
                if let Some(trace) = &mut out.trace {
                    let line = TraceLogLine::from_record(self.state.total_runs - 1, &exec.record);
                    writeln!(trace, "{line}").map_err(|e| CorpusError::io(&out.root.join(TRACE_LOG_FILE), e))?;
                }
            }
            if save {
                if matches!(self.config.mode, Mode::BedivStructure | Mode::BedivSimple) {
                    self.state.structures.insert(exec.input.signature);
                }
                self.state.queue.push(QueueEntry {
                    params: exec.input.source_snapshot.clone(),
                    novelty: update.new_branches,
                    result: Some(exec.record.result),
                });
                self.persist_queue_entry(self.state.queue.len() - 1, &exec.input.concrete)?;
                saved = true;
            }
        }
        if let Some(slot) = queue_slot {
            let entry = &mut self.state.queue[slot];
            entry.params = exec.input.source_snapshot.clone();
            entry.novelty = update.new_branches;
            entry.result = Some(exec.record.result);
            self.persist_queue_entry(slot, &exec.input.concrete)?;
        }

        self.tick();
        if self.state.elapsed_ms >= self.next_stats {
            self.emit_row()?;
            let interval = self.config.stats_interval;
            self.next_stats = (self.state.elapsed_ms / interval + 1) * interval;
        }
        let event = RunEvent {
            run: self.state.total_runs,
            kind,
            execution: &exec,
            new_branches: update.new_branches,
            unique_trace: update.unique_trace,
            saved,
        };
        Ok(match self.observer.on_run(&event, &self.state) {
            ControlFlow::Continue(()) => Step::Continue,
            ControlFlow::Break(()) => Step::Stop,
        })
    }

    fn initial_entries(&mut self) -> Result<(), CampaignError> {
        match &self.config.seed_corpus {
            Some(dir) => {
                for path in corpus::list_params_files(dir)? {
                    self.state.queue.push(QueueEntry {
                        params: corpus::read_entry(&path)?,
                        novelty: 0,
                        result: None,
                    });
                }
                if self.state.queue.is_empty() {
                    return Err(CampaignError::Config(format!(
                        "seed corpus {} holds no parameter files",
                        dir.display()
                    )));
                }
            }
            None => seed_queue(&mut self.state, &mut self.rng),
        }
        Ok(())
    }

    fn fuzz(&mut self) -> Result<(), CampaignError> {
        if self.config.mode == Mode::Quickcheck {
            loop {
                if let Step::Stop = self.execute(SplitParameterSequence::default(), None, None)? {
                    return Ok(());
                }
                if self.exhausted() {
                    return Ok(());
                }
            }
        }

        self.initial_entries()?;
        for slot in 0..self.state.queue.len() {
            let params = self.state.queue[slot].params.clone();
            if let Step::Stop = self.execute(params, None, Some(slot))? {
                return Ok(());
            }
        }

        let mut idx = 0;
        loop {
            let children = num_children(&self.state.queue[idx], &self.state);
            for _ in 0..children {
                if self.exhausted() {
                    return Ok(());
                }
                let parent = &self.state.queue[idx].params;
                let (child, kind) = if self.config.mode == Mode::Zest {
                    let kind = MutationKind::random(&mut self.rng);
                    (mutate_kind(parent, kind, &mut self.rng, &self.config.mutation), kind)
                } else {
                    mutate_adaptive(parent, &self.state.scoreboard, &self.config.mutation, &mut self.rng)
                };
                if let Step::Stop = self.execute(child, Some(kind), None)? {
                    return Ok(());
                }
            }
            idx = (idx + 1) % self.state.queue.len();
        }
    }

    fn finish(&mut self) -> Result<(), CorpusError> {
        self.tick();
        if self.series.last().is_none_or(|r| r.total_runs != self.state.total_runs) {
            self.emit_row()?;
        }
        if let Some(out) = &mut self.output {
            if let Some(trace) = &mut out.trace {
                trace.flush().map_err(|e| CorpusError::io(&out.root.join(TRACE_LOG_FILE), e))?;
            }
            let path = out.root.join(DIVERSITY_FILE);
            let mut file = File::create(&path).map(BufWriter::new).map_err(|e| CorpusError::io(&path, e))?;
            write_diversity_csv(&mut file, &profile_series(&self.series))
                .and_then(|_| file.flush())
                .map_err(|e| CorpusError::io(&path, e))?;
        }
        Ok(())
    }

    fn report(&self) -> CampaignReport {
        CampaignReport {
            mode: self.config.mode,
            total_runs: self.state.total_runs,
            valid_runs: self.state.valid_runs,
            diverse_valid_runs: self.state.diverse_valid_runs,
            num_branches: self.state.coverage.len(),
            num_traces: self.state.traces.len(),
            queue_len: self.state.queue.len(),
            structures: self.state.structures.len(),
            failures: self.state.failures.len(),
            failure_sites: self.sites.clone(),
            scoreboard: self.state.scoreboard,
            series: self.series.clone(),
            final_profile: self.state.profile(),
            out_dir: self.output.as_ref().map(|o| o.root.clone()),
        }
    }
}

/// Runs a campaign on the configured bundled generator and SUT.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport, CampaignError> {
    run_campaign_with_observer(config, &mut ()).map(|(report, _)| report)
}

/// Like [`run_campaign`], with an observer, also handing back the final state.
pub fn run_campaign_with_observer(
    config: &CampaignConfig,
    observer: &mut dyn Observer,
) -> Result<(CampaignReport, CampaignState), CampaignError> {
    let mut executor = GeneratorExecutor::bundled(config.generator, config.max_depth, config.sut)?;
    run_campaign_on(config, &mut executor, observer)
}

/// Runs a campaign on any executor; the generator and SUT fields of `config`
/// are ignored.
pub fn run_campaign_on(
    config: &CampaignConfig,
    executor: &mut dyn Executor,
    observer: &mut dyn Observer,
) -> Result<(CampaignReport, CampaignState), CampaignError> {
    config.validate()?;
    let output = match &config.out_dir {
        Some(dir) => Some(Output::create(dir, config.trace_log)?),
        None => None,
    };
    let mut campaign = Campaign {
        config,
        state: CampaignState::new(config.valid_only_abundance),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        executor,
        observer,
        output,
        start: matches!(config.budget, Budget::Time(_)).then(Instant::now),
        next_stats: config.stats_interval,
        series: Vec::new(),
        sites: Vec::new(),
        site_index: HashMap::new(),
        saved_entries: 0,
    };
    let outcome = campaign.fuzz().and_then(|()| campaign.finish().map_err(CampaignError::from));
    match outcome {
        Ok(()) => Ok((campaign.report(), campaign.state)),
        Err(CampaignError::Corpus { error, .. }) => Err(CampaignError::Corpus {
            error,
            partial: Some(Box::new(campaign.report())),
        }),
        Err(e) => Err(e),
    }
}
