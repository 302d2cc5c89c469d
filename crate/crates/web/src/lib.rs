//! WebAssembly bindings for the browser demo in `www/`. Every export takes
//! plain strings and numbers and returns a JSON document, or an error message
//! that the JavaScript side receives as a thrown string.

use bediv_core::campaign::{run_campaign, Budget, CampaignConfig, Mode};
use bediv_core::choice_source::{ChoiceSource, SplitParameterSequence};
use bediv_core::diversity::hill_number;
use bediv_core::generators::{generate, regenerate, GeneratedInput, GeneratorKind};
use bediv_core::harness::SutKind;
use bediv_core::mutation::{mutate_kind, MutationConfig, MutationKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest run budget a browser campaign may ask for.
pub const MAX_DEMO_RUNS: u32 = 200_000;
/// Largest number of points on a Hill profile curve.
pub const MAX_PROFILE_STEPS: u32 = 2_000;

/// Parses counts separated by commas or whitespace.
fn parse_counts(text: &str) -> Result<Vec<u64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("`{t}` is not a non-negative integer")))
        .collect()
}

/// `D(q)` of `counts` sampled at `steps + 1` evenly spaced orders in
/// `[0, q_max]`.
#[wasm_bindgen]
pub fn hill_profile(counts: &str, q_max: f64, steps: u32) -> Result<String, String> {
    let counts = parse_counts(counts)?;
    if !(q_max.is_finite() && q_max > 0.0) {
        return Err("the largest order must be a positive number".into());
    }
    if steps == 0 || steps > MAX_PROFILE_STEPS {
        return Err(format!("steps must be between 1 and {MAX_PROFILE_STEPS}"));
    }
    let points = (0..=steps)
        .map(|i| {
            let q = q_max * f64::from(i) / f64::from(steps);
            hill_number(&counts, q).map(|d| json!([q, d]))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let total: u64 = counts.iter().sum();
    Ok(json!({
        "richness": counts.iter().filter(|&&c| c > 0).count(),
        "total": total,
        "points": points,
    })
    .to_string())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn describe(input: &GeneratedInput) -> Value {
    let params = &input.source_snapshot;
    json!({
        "text": input.text(),
        "structural": hex(params.structural.bytes()),
        "value": hex(params.value.bytes()),
        "signature": format!("{:032x}", input.signature.0),
    })
}

/// Generates a parent from `seed`, derives one child with a structural or
/// value mutation seeded by `mutation_seed`, and shows both with their
/// parameter sequences.
#[wasm_bindgen]
pub fn mutate_input(generator: &str, seed: u32, kind: &str, mutation_seed: u32) -> Result<String, String> {
    let generator: GeneratorKind = generator.parse()?;
    let kind = match kind {
        "structural" => MutationKind::Structural,
        "value" => MutationKind::Value,
        other => return Err(format!("unknown mutation kind `{other}` (expected structural or value)")),
    };
    let generator = generator.build(None).map_err(|e| e.to_string())?;
    let mut source = ChoiceSource::recording(SplitParameterSequence::default(), u64::from(seed));
    let parent = generate(&generator, &mut source).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(mutation_seed));
    let child_params = mutate_kind(&parent.source_snapshot, kind, &mut rng, &MutationConfig::default());
    let child = match regenerate(&generator, &child_params) {
        Ok(child) => child,
        // A structural child may ask for more octets than it carries; fill
        // the rest the way a campaign does.
        Err(_) => generate(&generator, &mut ChoiceSource::recording(child_params, u64::from(mutation_seed)))
            .map_err(|e| e.to_string())?,
    };
    Ok(json!({
        "parent": describe(&parent),
        "child": describe(&child),
        "same_structure": parent.signature == child.signature,
    })
    .to_string())
}

/// Runs a campaign of `runs` executions and returns its statistics series.
#[wasm_bindgen]
pub fn mini_campaign(mode: &str, sut: &str, runs: u32, seed: u32, interval: u32) -> Result<String, String> {
    let mode: Mode = mode.parse()?;
    let sut: SutKind = sut.parse()?;
    if runs == 0 || runs > MAX_DEMO_RUNS {
        return Err(format!("runs must be between 1 and {MAX_DEMO_RUNS}"));
    }
    let mut config = CampaignConfig::new(mode, sut, Budget::Runs(u64::from(runs)), u64::from(seed));
    config.stats_interval = u64::from(interval);
    let report = run_campaign(&config).map_err(|e| e.to_string())?;
    let series: Vec<Value> = report
        .series
        .iter()
        .map(|r| {
            json!({
                "runs": r.total_runs,
                "valid": r.valid_runs,
                "branches": r.num_branches,
                "traces": r.num_traces,
                "b0": r.b0,
                "b1": r.b1,
                "b2": r.b2,
            })
        })
        .collect();
    let sites: Vec<Value> = report
        .failure_sites
        .iter()
        .map(|s| json!({ "site": s.site, "first_run": s.first_run, "count": s.count }))
        .collect();
    Ok(json!({
        "mode": report.mode.name(),
        "total_runs": report.total_runs,
        "valid_runs": report.valid_runs,
        "queue": report.queue_len,
        "structures": report.structures,
        "failure_sites": sites,
        "series": series,
    })
    .to_string())
}
