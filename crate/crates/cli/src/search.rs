//! Randomized search: sample presentations, analyze, filter, and bin by
//! invariants, flagging anything that contradicts a published table.
//!
//! Sampling is deterministic in the seed: sample `k` derives its own RNG
//! stream and analysis seed, so worker count never changes the outcome.
//! `samples` counts presentations surviving the reduction-number filter;
//! drawing stops after `50 * samples` attempts either way.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use gradmod_core::poly::ExponentVector;
use gradmod_core::{analyze, AnalyzeOptions, Error, Field, MultiPolynomial, Presentation};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub mu: usize,
    pub nvars: usize,
    pub max_entry_degree: usize,
    pub samples: usize,
    pub seed: u64,
    pub filter_red: Option<usize>,
    pub p: u64,
    pub jobs: usize,
}

/// One aggregated bin: all samples sharing the printed invariants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BinKey {
    pub mu: usize,
    pub i_m: usize,
    pub e: i64,
    pub a: Vec<usize>,
    pub depth: String,
    pub h: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contradiction {
    pub stratum: String,
    pub depth: usize,
    pub h: String,
    pub input: String,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct SearchOutcome {
    pub accepted: usize,
    pub attempted: usize,
    pub rejected_filter: usize,
    pub degenerate: usize,
    pub inconclusive: usize,
    pub certification_failures: usize,
    /// Accepted samples outside every stratum in scope.
    pub unclassified: usize,
    pub identity_failures: Vec<String>,
    /// Failed headline property checks (depth bounds, shape theorems).
    pub headline_failures: Vec<String>,
    pub bins: BTreeMap<String, usize>,
    pub bin_keys: Vec<(BinKey, usize)>,
    pub contradictions: Vec<Contradiction>,
}

enum SampleResult {
    Accepted {
        key: Box<BinKey>,
        contradiction: Option<Contradiction>,
        unclassified: bool,
        headline_failures: Vec<String>,
    },
    RejectedFilter,
    Degenerate,
    Inconclusive,
    Certification,
    Identity(String),
}

fn random_entry(
    rng: &mut ChaCha12Rng,
    field: &Field,
    nvars: usize,
    order: usize,
    maxdeg: usize,
) -> MultiPolynomial {
    let nterms = 1 + rng.gen_range(0..2);
    let mut terms = Vec::new();
    for t in 0..nterms {
        let deg = if t == 0 {
            order
        } else {
            rng.gen_range(order..=maxdeg.max(order))
        };
        let mut exps = vec![0u16; nvars];
        for _ in 0..deg {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        let coeff = 1 + rng.gen_range(0..field.modulus() - 1);
        terms.push((ExponentVector(exps), coeff));
    }
    MultiPolynomial::from_terms(nvars, field, terms)
}

/// Draws one random presentation. Two styles alternate: dense-ish generic
/// matrices, and sparse coupled-triangular ones in the mold of the worked
/// examples, which populate the depth-deficient strata. Diagonal entries
/// are always nonzero so most draws have a nonzero determinant.
fn sample_presentation(
    rng: &mut ChaCha12Rng,
    cfg: &SearchConfig,
    field: Field,
) -> Option<Presentation> {
    let maxdeg = cfg.max_entry_degree;
    let mut rows: Vec<Vec<MultiPolynomial>> =
        vec![vec![MultiPolynomial::zero(cfg.nvars); cfg.mu]; cfg.mu];
    if rng.gen_bool(0.5) {
        // Generic style.
        let base_order = 1 + rng.gen_range(0..maxdeg.min(2));
        let zero_prob = [0.0, 0.35, 0.6][rng.gen_range(0..3)];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                if i != j && rng.gen_bool(zero_prob) {
                    continue;
                }
                let order = rng.gen_range(base_order..=maxdeg.max(base_order));
                *entry = random_entry(rng, &field, cfg.nvars, order, maxdeg);
            }
        }
    } else {
        // Coupled near-triangular style: powers of one variable on the
        // diagonal, a few low-order couplings below it.
        let var = rng.gen_range(0..cfg.nvars);
        for (i, row) in rows.iter_mut().enumerate() {
            let power = 1 + rng.gen_range(0..maxdeg);
            let mut exps = vec![0u16; cfg.nvars];
            exps[var] = power as u16;
            let coeff = 1 + rng.gen_range(0..field.modulus() - 1);
            row[i] =
                MultiPolynomial::from_terms(cfg.nvars, &field, [(ExponentVector(exps), coeff)]);
        }
        let couplings = 1 + rng.gen_range(0..cfg.mu);
        for _ in 0..couplings {
            let i = rng.gen_range(0..cfg.mu);
            let j = rng.gen_range(0..cfg.mu);
            if i == j {
                continue;
            }
            let order = 1 + rng.gen_range(0..maxdeg.min(2));
            rows[i][j] = random_entry(rng, &field, cfg.nvars, order, maxdeg);
        }
    }
    Presentation::new(field, rows).ok()
}

fn run_sample(index: u64, cfg: &SearchConfig) -> SampleResult {
    let field = Field::new(cfg.p).expect("validated before the run");
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed ^ (index.wrapping_mul(0x9e3779b97f4a7c15)));
    let Some(pres) = sample_presentation(&mut rng, cfg, field) else {
        return SampleResult::Degenerate;
    };
    let opts = AnalyzeOptions {
        seed: rng.gen(),
        ..Default::default()
    };
    match analyze(&pres, &opts) {
        Ok(report) => {
            if let Some(k) = cfg.filter_red {
                if report.red > k {
                    return SampleResult::RejectedFilter;
                }
            }
            let depth = if report.cm {
                "CM".to_string()
            } else {
                format!("d-{}", report.dim - report.depth_g)
            };
            let key = BinKey {
                mu: report.mu,
                i_m: report.i_m,
                e: report.e,
                a: report.a.clone(),
                depth,
                h: report.h.text.clone(),
            };
            let contradiction = if report.verdict.matches == Some(false) {
                Some(Contradiction {
                    stratum: report.verdict.stratum.clone(),
                    depth: report.depth_g,
                    h: report.h.text.clone(),
                    input: render_presentation(&pres),
                })
            } else {
                None
            };
            let headline_failures = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {} on {}", c.name, c.detail, render_presentation(&pres)))
                .collect();
            SampleResult::Accepted {
                key: Box::new(key),
                contradiction,
                unclassified: report.verdict.matches.is_none(),
                headline_failures,
            }
        }
        Err(Error::Inconclusive(_)) => SampleResult::Inconclusive,
        Err(Error::Certification(_)) => SampleResult::Certification,
        Err(e) => SampleResult::Identity(format!("{e}: {}", render_presentation(&pres))),
    }
}

fn render_presentation(pres: &Presentation) -> String {
    let names: Vec<String> = (0..pres.nvars()).map(|i| format!("x{}", i + 1)).collect();
    let rows: Vec<String> = pres
        .entries()
        .iter()
        .map(|row| {
            format!(
                "[{}]",
                row.iter()
                    .map(|e| e.render(&names))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    format!(
        "vars = {}; matrix = [{}]",
        names.join(", "),
        rows.join(", ")
    )
}

pub fn run(cfg: &SearchConfig) -> SearchOutcome {
    let mut outcome = SearchOutcome::default();
    let mut bins: BTreeMap<BinKey, usize> = BTreeMap::new();
    if cfg.samples == 0 {
        return outcome;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .expect("worker pool");
    let max_attempts = cfg.samples.saturating_mul(50) as u64;
    let chunk = (cfg.jobs.max(1) * 4) as u64;
    let mut next_index = 0u64;
    while outcome.accepted < cfg.samples && next_index < max_attempts {
        let hi = (next_index + chunk).min(max_attempts);
        let results: Vec<(u64, SampleResult)> = pool.install(|| {
            (next_index..hi)
                .into_par_iter()
                .map(|i| (i, run_sample(i, cfg)))
                .collect()
        });
        next_index = hi;
        for (_, r) in results {
            if outcome.accepted >= cfg.samples {
                break;
            }
            outcome.attempted += 1;
            match r {
                SampleResult::Accepted {
                    key,
                    contradiction,
                    unclassified,
                    headline_failures,
                } => {
                    outcome.accepted += 1;
                    *bins.entry(*key).or_insert(0) += 1;
                    if let Some(c) = contradiction {
                        outcome.contradictions.push(c);
                    }
                    if unclassified {
                        outcome.unclassified += 1;
                    }
                    outcome.headline_failures.extend(headline_failures);
                }
                SampleResult::RejectedFilter => outcome.rejected_filter += 1,
                SampleResult::Degenerate => outcome.degenerate += 1,
                SampleResult::Inconclusive => outcome.inconclusive += 1,
                SampleResult::Certification => outcome.certification_failures += 1,
                SampleResult::Identity(msg) => outcome.identity_failures.push(msg),
            }
        }
    }
    for (k, v) in &bins {
        outcome.bins.insert(
            format!(
                "mu={} i={} e={} a=({}) depth={} h={}",
                k.mu,
                k.i_m,
                k.e,
                k.a.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                k.depth,
                k.h
            ),
            *v,
        );
    }
    outcome.bin_keys = bins.into_iter().collect();
    outcome
}

pub fn render(outcome: &SearchOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "accepted {} of {} attempts ({} filtered out, {} degenerate, {} inconclusive, {} certification failures)\n",
        outcome.accepted,
        outcome.attempted,
        outcome.rejected_filter,
        outcome.degenerate,
        outcome.inconclusive,
        outcome.certification_failures,
    ));
    out.push_str(&format!("{:>6}  bin\n", "count"));
    for (key, count) in outcome.bins.iter() {
        out.push_str(&format!("{count:>6}  {key}\n"));
    }
    if outcome.identity_failures.is_empty() && outcome.contradictions.is_empty() {
        out.push_str("no contradictions observed\n");
    }
    for c in &outcome.contradictions {
        out.push_str(&format!(
            "CONTRADICTION in {}: depth {}, h = {}\n  {}\n",
            c.stratum, c.depth, c.h, c.input
        ));
    }
    for msg in &outcome.identity_failures {
        out.push_str(&format!("IDENTITY FAILURE: {msg}\n"));
    }
    out
}
