//! `gradmod`: exact invariants of maximal Cohen-Macaulay modules presented
//! by square polynomial matrices over a prime field.
//!
//! Subcommands:
//! * `analyze <file>` - full invariant report for one presentation;
//! * `verify [--corpus DIR]` - run the bundled example corpus against its
//!   expected values;
//! * `search --mu R --nvars V --samples N` - randomized audit of the
//!   classification tables.
//!
//! Exit codes: 0 success, 1 usage/input error (or a failed verification),
//! 2 inconclusive (window exhausted), 3 certification failure, 4 internal
//! identity violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gradmod::{corpus, input, output, search, verify};
use gradmod_core::{analyze, AnalyzeOptions, Error, InvariantReport};

use input::InputFile;

#[derive(Parser)]
#[command(
    name = "gradmod",
    version,
    about = "invariants of MCM modules over hypersurface rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one presentation file and print the invariant report.
    Analyze(AnalyzeArgs),
    /// Check the example corpus against its expected values.
    Verify(VerifyArgs),
    /// Sample random presentations and audit the classification tables.
    Search(SearchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input file (see README for the format).
    file: PathBuf,
    /// RNG seed for the superficial-element search.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Starting truncation degree D (defaults to max(3*maxdeg+6, 12)).
    #[arg(long)]
    trunc_degree: Option<usize>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory of .gm files; defaults to the bundled corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// RNG seed used for every example.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    /// Number of generators of the sampled presentations.
    #[arg(long)]
    mu: usize,
    /// Number of variables (dim M + 1).
    #[arg(long)]
    nvars: usize,
    /// Largest entry degree of sampled matrices.
    #[arg(long, default_value_t = 3)]
    max_entry_degree: usize,
    /// Number of samples surviving the filter.
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only samples with red(M) <= K.
    #[arg(long)]
    filter_red: Option<usize>,
    /// Field modulus.
    #[arg(long, default_value_t = gradmod_core::DEFAULT_PRIME)]
    p: u64,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Emit the aggregated table as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Search(args) => cmd_search(&args),
    };
    ExitCode::from(code)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Structural(_) | Error::Truncation(_) => 1,
        Error::Inconclusive(_) => 2,
        Error::Certification(_) => 3,
        Error::Identity(_) => 4,
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return 1;
        }
    };
    let parsed = match InputFile::parse(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let built = match parsed.build() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let opts = AnalyzeOptions {
        seed: args.seed,
        trunc_degree: args.trunc_degree,
        annihilator: built.annihilator.clone(),
        ..Default::default()
    };
    match analyze(&built.presentation, &opts) {
        Ok(report) => {
            if args.json {
                println!("{}", render_json(&parsed, &report));
            } else {
                print!("{}", output::render_report(&report, &parsed.vars));
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn render_json(parsed: &InputFile, report: &InvariantReport) -> String {
    let input = serde_json::json!({
        "name": parsed.name,
        "p": parsed.p,
        "vars": parsed.vars,
        "matrix": parsed.matrix,
        "annihilator": parsed.annihilator,
        "normalized": parsed.render(),
    });
    let value = serde_json::json!({
        "input": input,
        "report": report,
    });
    serde_json::to_string_pretty(&value).expect("report serializes")
}

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let entries: Vec<(String, String)> = match &args.corpus {
        None => corpus::BUNDLED
            .iter()
            .map(|(n, t)| (n.to_string(), t.to_string()))
            .collect(),
        Some(dir) => {
            let mut files = Vec::new();
            let listing = match std::fs::read_dir(dir) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: cannot read corpus dir {}: {e}", dir.display());
                    return 1;
                }
            };
            for entry in listing.flatten() {
                let path = entry.path();
                if path.extension().is_some_and(|x| x == "gm") {
                    match std::fs::read_to_string(&path) {
                        Ok(text) => files.push((
                            path.file_stem().unwrap().to_string_lossy().to_string(),
                            text,
                        )),
                        Err(e) => {
                            eprintln!("error: cannot read {}: {e}", path.display());
                            return 1;
                        }
                    }
                }
            }
            files.sort();
            if files.is_empty() {
                eprintln!("error: no .gm files in {}", dir.display());
                return 1;
            }
            files
        }
    };
    let mut rows = Vec::new();
    for (name, text) in &entries {
        rows.push(verify::verify_one(name, text, args.seed));
    }
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(8).max(8);
    let exp_width = rows
        .iter()
        .map(|r| r.expected.len())
        .max()
        .unwrap_or(8)
        .max(8);
    let got_width = rows.iter().map(|r| r.got.len()).max().unwrap_or(8).max(8);
    println!(
        "{:<width$}  {:<exp_width$}  {:<got_width$}  result",
        "example", "expected", "computed"
    );
    let mut failures = 0;
    for row in &rows {
        if !row.passed {
            failures += 1;
        }
        println!(
            "{:<width$}  {:<exp_width$}  {:<got_width$}  {}",
            row.name,
            row.expected,
            row.got,
            if row.passed { "pass" } else { "FAIL" }
        );
    }
    println!(
        "{} / {} examples match the published values",
        rows.len() - failures,
        rows.len()
    );
    if failures > 0 {
        1
    } else {
        0
    }
}

fn cmd_search(args: &SearchArgs) -> u8 {
    if gradmod_core::Field::new(args.p).is_err() {
        eprintln!("error: modulus {} is not a usable prime", args.p);
        return 1;
    }
    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let cfg = search::SearchConfig {
        mu: args.mu,
        nvars: args.nvars,
        max_entry_degree: args.max_entry_degree,
        samples: args.samples,
        seed: args.seed,
        filter_red: args.filter_red,
        p: args.p,
        jobs,
    };
    if cfg.mu == 0 || cfg.nvars == 0 {
        eprintln!("error: --mu and --nvars must be positive");
        return 1;
    }
    let outcome = search::run(&cfg);
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome).expect("outcome serializes")
        );
    } else {
        print!("{}", search::render(&outcome));
    }
    0
}
