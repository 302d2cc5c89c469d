use std::fs::File;
use std::io::BufReader;
use std::process::ExitCode;

use bediv_core::campaign::{run_campaign, CampaignConfig, CampaignError};
use bediv_core::corpus;
use bediv_core::diversity::{abundance_from_trace_log, behavioral_diversity};
use bediv_core::generators::regenerate;
use bediv_core::harness::run;
use bediv_core::mutation::MutationConfig;
use bediv_core::stats::read_stats;

use crate::{CompareArgs, DiversityArgs, FuzzArgs, ReplayArgs};

pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Fixed six decimals with trailing zeros removed: `4`, `1.6`, `1.754765`.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

pub fn fuzz(args: &FuzzArgs) -> Result<ExitCode, String> {
    let mutation = MutationConfig::new(args.epsilon, args.max_mutation_sites).map_err(|e| e.to_string())?;
    let mut config = CampaignConfig::new(args.mode, args.sut, args.budget(), args.seed);
    config.generator = args.generator.unwrap_or(args.sut.generator());
    config.max_depth = args.max_depth;
    config.mutation = mutation;
    config.stats_interval = args.stats_interval;
    config.out_dir = Some(args.out.clone());
    config.trace_log = args.trace_log;
    config.seed_corpus = args.seed_corpus.clone();
    config.valid_only_abundance = args.valid_only;
    match run_campaign(&config) {
        Ok(report) => {
            print!("seed,{}\n{report}", args.seed);
            Ok(ExitCode::SUCCESS)
        }
        Err(CampaignError::Corpus {
            error,
            partial: Some(report),
        }) => {
            print!("seed,{}\n{report}", args.seed);
            Err(format!("campaign aborted: {error}"))
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Prints `path,recorded,observed,site` per parameter file. A file whose
/// name records no result is reported with `-` and never counts as a
/// mismatch.
pub fn replay(args: &ReplayArgs) -> Result<ExitCode, String> {
    let generator = args
        .generator
        .unwrap_or(args.sut.generator())
        .build(args.max_depth)
        .map_err(|e| e.to_string())?;
    let sut = args.sut.build();
    let files = corpus::list_params_files(&args.input).map_err(|e| e.to_string())?;
    let mut mismatches = 0;
    for path in files {
        let params = corpus::read_entry(&path).map_err(|e| e.to_string())?;
        let input = regenerate(&generator, &params).map_err(|e| format!("{}: {e}", path.display()))?;
        let record = run(&sut, &input.concrete);
        let recorded = corpus::recorded_result(&path);
        if recorded.is_some_and(|r| r != record.result) {
            mismatches += 1;
        }
        println!(
            "{},{},{},{}",
            path.display(),
            recorded.map_or("-", |r| r.as_str()),
            record.result,
            record.failure_site.as_deref().unwrap_or("")
        );
    }
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{mismatches} file(s) did not reproduce their recorded result");
        ExitCode::from(EXIT_MISMATCH)
    })
}

pub fn diversity(args: &DiversityArgs) -> Result<ExitCode, String> {
    let file = File::open(&args.log).map_err(|e| format!("{}: {e}", args.log.display()))?;
    let av = abundance_from_trace_log(BufReader::new(file), args.valid_only)
        .map_err(|e| format!("{}: {e}", args.log.display()))?;
    let values = args
        .q
        .iter()
        .map(|&q| behavioral_diversity(&av, q).map(format_number))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    println!("{}", values.join(","));
    Ok(ExitCode::SUCCESS)
}

pub fn compare(args: &CompareArgs) -> Result<ExitCode, String> {
    let last = |path: &std::path::Path| {
        let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let rows = read_stats(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
        rows.last().copied().ok_or_else(|| format!("{}: no data rows", path.display()))
    };
    let a = last(&args.a)?;
    let b = last(&args.b)?;
    println!("metric,a,b,delta");
    for (name, x, y) in [
        ("b0", a.b0, b.b0),
        ("b1", a.b1, b.b1),
        ("b2", a.b2, b.b2),
        ("diverse_valid_runs", a.diverse_valid_runs as f64, b.diverse_valid_runs as f64),
    ] {
        println!("{name},{},{},{}", format_number(x), format_number(y), format_number(y - x));
    }
    Ok(ExitCode::SUCCESS)
}
