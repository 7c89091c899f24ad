//! The executable form of the classification theorems: given a completed
//! set of invariants, find the stratum the module lives in, list the
//! admissible (depth, h-polynomial) pairs, and compare.
//!
//! A module outside every stratum is "unclassified" - a first-class outcome
//! so that randomized search can accumulate data beyond the published
//! tables. A classified module that lands outside its table is a
//! contradiction and is flagged, never silently accepted.

use serde::Serialize;

use crate::invariants::HPolynomial;

/// How an admissible pair pins the depth: Cohen-Macaulay or exactly
/// `dim - k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DepthSpec {
    Cm,
    BelowCm(usize),
}

impl DepthSpec {
    pub fn matches(self, depth: usize, dim: usize) -> bool {
        match self {
            DepthSpec::Cm => depth == dim,
            DepthSpec::BelowCm(k) => dim >= k && depth == dim - k,
        }
    }

    pub fn render(self) -> String {
        match self {
            DepthSpec::Cm => "CM".to_string(),
            DepthSpec::BelowCm(k) => format!("d-{k}"),
        }
    }
}

/// One admissible (depth, h) pair of a stratum table.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectedPair {
    pub depth: DepthSpec,
    pub h_coeffs: Vec<i64>,
    pub h_text: String,
}

fn pair(depth: DepthSpec, coeffs: &[i64]) -> ExpectedPair {
    let h = HPolynomial::new(coeffs.to_vec(), 0);
    ExpectedPair {
        depth,
        h_text: h.render(),
        h_coeffs: h.coeffs,
    }
}

/// The verdict for one module: the stratum, the admissible pairs, and
/// whether the computed (depth, h) pair is among them. `matches = None`
/// means the module is outside every stratum in scope.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub stratum: String,
    pub expected: Vec<ExpectedPair>,
    pub actual_depth: usize,
    pub actual_h: String,
    pub matches: Option<bool>,
}

/// Everything classification needs from a finished analysis.
#[derive(Debug, Clone)]
pub struct ClassifyInput<'a> {
    pub mu: usize,
    pub dim: usize,
    pub i_m: usize,
    pub det_order: usize,
    pub e: i64,
    pub red: usize,
    pub a: &'a [usize],
    pub depth: usize,
    pub h: &'a HPolynomial,
    /// e(A) = order of a verified annihilator of M, when one is known.
    pub ring_mult: Option<usize>,
}

use DepthSpec::{BelowCm, Cm};

/// Classification table for μ = 2 with red <= 2, keyed by the splitting type.
fn mu2_table(a: &[usize]) -> Option<Vec<ExpectedPair>> {
    let key: (usize, usize) = (a[0], a[1]);
    let rows: Vec<ExpectedPair> = match key {
        (1, 1) => vec![pair(Cm, &[2])],
        (1, 2) => vec![pair(Cm, &[2, 1]), pair(BelowCm(1), &[2, 0, 1])],
        (1, 3) => vec![pair(Cm, &[2, 1, 1])],
        (2, 2) => vec![pair(Cm, &[2, 2])],
        (2, 3) => vec![pair(Cm, &[2, 2, 1])],
        (3, 3) => vec![pair(Cm, &[2, 2, 2])],
        _ => return None,
    };
    Some(rows)
}

/// Classification table for μ = 3 with red <= 2.
fn mu3_table(a: &[usize]) -> Option<Vec<ExpectedPair>> {
    let key: (usize, usize, usize) = (a[0], a[1], a[2]);
    let rows: Vec<ExpectedPair> = match key {
        (1, 1, 1) => vec![pair(Cm, &[3])],
        (1, 1, 2) => vec![pair(Cm, &[3, 1]), pair(BelowCm(1), &[3, 0, 1])],
        (1, 1, 3) => vec![pair(Cm, &[3, 1, 1])],
        (1, 2, 2) => vec![
            pair(Cm, &[3, 2]),
            pair(BelowCm(1), &[3, 1, 1]),
            pair(BelowCm(2), &[3, 0, 3, -1]),
        ],
        (1, 2, 3) => vec![pair(Cm, &[3, 2, 1]), pair(BelowCm(1), &[3, 1, 2])],
        (2, 2, 2) => vec![pair(Cm, &[3, 3])],
        (1, 3, 3) => vec![pair(Cm, &[3, 2, 2]), pair(BelowCm(1), &[3, 1, 3])],
        (2, 2, 3) => vec![pair(Cm, &[3, 3, 1])],
        (2, 3, 3) => vec![pair(Cm, &[3, 3, 2])],
        (3, 3, 3) => vec![pair(Cm, &[3, 3, 3])],
        _ => return None,
    };
    Some(rows)
}

/// The five-case list for μ = 4 over a ring with e(A) = 3, keyed by the
/// multiplicity. The depth d-2 entry for e = 7 follows the proof
/// (4 + z + 3z^2 - z^3); the d-3 entry is 3 + 4z + (1-z)^4 expanded.
fn mu4_e3_table(e: i64) -> Option<Vec<ExpectedPair>> {
    let rows: Vec<ExpectedPair> = match e {
        4 => vec![pair(Cm, &[4])],
        5 => vec![pair(Cm, &[4, 1]), pair(BelowCm(1), &[4, 0, 1])],
        6 => vec![
            pair(Cm, &[4, 2]),
            pair(BelowCm(1), &[4, 1, 1]),
            pair(BelowCm(1), &[4, 0, 2]),
            pair(BelowCm(2), &[4, 0, 3, -1]),
        ],
        7 => vec![
            pair(Cm, &[4, 3]),
            pair(BelowCm(1), &[4, 2, 1]),
            pair(BelowCm(2), &[4, 1, 3, -1]),
            pair(BelowCm(3), &[4, 0, 6, -4, 1]),
        ],
        8 => vec![pair(Cm, &[4, 4])],
        _ => return None,
    };
    Some(rows)
}

/// det(φ) of order μ+1 with red <= 2: Cohen-Macaulay with h = r + z, or
/// depth d-1 with h = r + z^2.
fn det_order_table(r: usize) -> Vec<ExpectedPair> {
    vec![
        pair(Cm, &[r as i64, 1]),
        pair(BelowCm(1), &[r as i64, 0, 1]),
    ]
}

/// `e = μ·i`: always Cohen-Macaulay with h = μ(1 + z + ... + z^{i-1}).
fn e_mui_table(mu: usize, i_m: usize) -> Vec<ExpectedPair> {
    vec![pair(Cm, &vec![mu as i64; i_m])]
}

/// Shape of the `e = μ·i + 1` stratum: `μ(1+...+z^{i-1}) + z^s` for a
/// single `s >= i`; returns `s` if the polynomial has that shape.
pub fn mui_plus_one_shape(h: &HPolynomial, mu: usize, i_m: usize) -> Option<usize> {
    let mut extra = None;
    for (j, &c) in h.coeffs.iter().enumerate() {
        let base = if j < i_m { mu as i64 } else { 0 };
        match c - base {
            0 => {}
            1 if extra.is_none() && j >= i_m => extra = Some(j),
            _ => return None,
        }
    }
    extra
}

/// Primary classification: picks the most specific stratum and compares.
pub fn classify(input: &ClassifyInput) -> Verdict {
    let actual_depth = input.depth;
    let actual_h = input.h.render();
    let found: Option<(String, Vec<ExpectedPair>)> = if input.mu == 2 && input.red <= 2 {
        mu2_table(input.a).map(|rows| {
            (
                format!("mu=2, red<=2, a=({},{})", input.a[0], input.a[1]),
                rows,
            )
        })
    } else if input.mu == 3 && input.red <= 2 {
        mu3_table(input.a).map(|rows| {
            (
                format!(
                    "mu=3, red<=2, a=({},{},{})",
                    input.a[0], input.a[1], input.a[2]
                ),
                rows,
            )
        })
    } else if input.mu == 4 && input.ring_mult == Some(3) {
        mu4_e3_table(input.e).map(|rows| (format!("mu=4, e(A)=3, e={}", input.e), rows))
    } else if input.det_order == input.mu + 1 && input.red <= 2 {
        Some((
            format!("v(det)=mu+1, red<=2, mu={}", input.mu),
            det_order_table(input.mu),
        ))
    } else if input.e == (input.mu * input.i_m) as i64 {
        Some((
            format!("e=mu*i, mu={}, i={}", input.mu, input.i_m),
            e_mui_table(input.mu, input.i_m),
        ))
    } else if input.e == (input.mu * input.i_m + 1) as i64 {
        // Admissible pairs have a parameter s >= i; the table lists the
        // Cohen-Macaulay shape, and matching accepts any single higher s
        // with depth exactly d-1.
        let mut rows = vec![{
            let mut coeffs = vec![input.mu as i64; input.i_m];
            coeffs.push(1);
            pair(Cm, &coeffs)
        }];
        let matches = match mui_plus_one_shape(input.h, input.mu, input.i_m) {
            Some(s) if s == input.i_m => DepthSpec::Cm.matches(actual_depth, input.dim),
            Some(_) => DepthSpec::BelowCm(1).matches(actual_depth, input.dim),
            None => false,
        };
        if let Some(s) = mui_plus_one_shape(input.h, input.mu, input.i_m) {
            if s > input.i_m {
                let mut coeffs = vec![input.mu as i64; input.i_m];
                coeffs.resize(s, 0);
                coeffs.push(1);
                rows.push(pair(BelowCm(1), &coeffs));
            }
        }
        return Verdict {
            stratum: format!("e=mu*i+1, mu={}, i={}", input.mu, input.i_m),
            expected: rows,
            actual_depth,
            actual_h,
            matches: Some(matches),
        };
    } else {
        None
    };
    match found {
        Some((stratum, expected)) => {
            let matches = expected
                .iter()
                .any(|p| p.depth.matches(actual_depth, input.dim) && p.h_coeffs == input.h.coeffs);
            Verdict {
                stratum,
                expected,
                actual_depth,
                actual_h,
                matches: Some(matches),
            }
        }
        None => Verdict {
            stratum: "unclassified".to_string(),
            expected: Vec::new(),
            actual_depth,
            actual_h,
            matches: None,
        },
    }
}

/// The Hilbert-series constraint on `G(M)` modulo the initial forms of a
/// maximal reduction: `μ + αz + βz²` is admissible iff `β <= α <= μ`.
pub fn series_constraint_ok(mu: usize, alpha: usize, beta: usize) -> bool {
    beta <= alpha && alpha <= mu
}

/// One named consistency check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// The headline depth bounds and shape theorems, each checked whenever its
/// hypothesis holds. These are property checks: failures are flagged in the
/// verdict data, and the acceptance suite asserts none occur.
pub fn headline_checks(input: &ClassifyInput) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let ge = |bound: i64| input.depth as i64 >= bound;
    if input.mu == 2 && input.red <= 2 {
        out.push(CheckRecord::new(
            "depth_bound_mu2",
            ge(input.dim as i64 - 1),
            format!("depth {} >= d-1 = {}", input.depth, input.dim as i64 - 1),
        ));
    }
    if input.mu == 3 && input.red <= 2 {
        out.push(CheckRecord::new(
            "depth_bound_mu3",
            ge(input.dim as i64 - 2),
            format!("depth {} >= d-2 = {}", input.depth, input.dim as i64 - 2),
        ));
    }
    if input.mu == 4 && input.ring_mult == Some(3) {
        out.push(CheckRecord::new(
            "depth_bound_mu4_eA3",
            ge(input.dim as i64 - 3),
            format!("depth {} >= d-3 = {}", input.depth, input.dim as i64 - 3),
        ));
    }
    if input.det_order == input.mu + 1 && input.red <= 2 {
        let r = input.mu as i64;
        let ok = ge(input.dim as i64 - 1)
            && (input.h.coeffs == vec![r, 1] || input.h.coeffs == vec![r, 0, 1]);
        out.push(CheckRecord::new(
            "det_order_stratum",
            ok,
            format!("h = {} with depth {}", input.h.render(), input.depth),
        ));
    }
    if input.e == (input.mu * input.i_m) as i64 {
        let ok = input.depth == input.dim && input.h.coeffs == vec![input.mu as i64; input.i_m];
        out.push(CheckRecord::new(
            "e_eq_mu_i",
            ok,
            "e = mu*i forces CM with h = mu(1+...+z^{i-1})".to_string(),
        ));
    }
    if input.e == (input.mu * input.i_m + 1) as i64 {
        let shape = mui_plus_one_shape(input.h, input.mu, input.i_m);
        let ok = match shape {
            Some(s) => {
                let cm = input.depth == input.dim;
                ge(input.dim as i64 - 1) && (cm == (s == input.i_m))
            }
            None => false,
        };
        out.push(CheckRecord::new(
            "e_eq_mu_i_plus_one",
            ok,
            format!(
                "h = {} must be mu(1+...+z^{{i-1}}) + z^s with CM iff s = i",
                input.h.render()
            ),
        ));
    }
    out
}
