//! End-to-end analysis of one presentation: build the certified tower, run
//! every filtration computation and identity check, determine the depth of
//! `G(M)`, and classify the outcome.
//!
//! The truncation window grows (doubling, capped) whenever any stabilization
//! is inconclusive; identity violations abort hard. Everything here is
//! deterministic in the seed.

use crate::depth::{self, DepthCertificate};
use crate::error::{Error, Result};
use crate::filtration::{self, BPolynomial, RatliffRushData};
use crate::invariants::{self, binomial};
use crate::poly::{MultiPolynomial, PolyOrder};
use crate::report::{
    AnnihilatorReport, BPolyReport, CertificationReport, InvariantReport, PolyReport, WindowReport,
};
use crate::superficial;
use crate::trunc::{Presentation, TruncationWindow};
use crate::verdicts::{self, CheckRecord, ClassifyInput};

/// Knobs for one analysis run.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub seed: u64,
    /// Explicit starting truncation degree; `None` uses the default.
    pub trunc_degree: Option<usize>,
    /// Retry budget per superficial-search level.
    pub retries: usize,
    /// A known annihilator of `M`; its order is used as e(A).
    pub annihilator: Option<MultiPolynomial>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 1,
            trunc_degree: None,
            retries: superficial::DEFAULT_RETRIES,
            annihilator: None,
        }
    }
}

/// Analyzes a presentation, growing the window on inconclusive
/// stabilizations until the cap.
pub fn analyze(pres: &Presentation, opts: &AnalyzeOptions) -> Result<InvariantReport> {
    let mut window = match opts.trunc_degree {
        Some(d) => TruncationWindow::for_degree(pres, d)?,
        None => TruncationWindow::default_for(pres)?,
    };
    loop {
        match attempt(pres, window, opts) {
            Err(Error::Inconclusive(msg)) => match window.grown(pres) {
                Some(w) => window = w,
                None => {
                    return Err(Error::inconclusive(format!(
                        "window exhausted at trunc degree {}: {msg}",
                        window.trunc_degree
                    )))
                }
            },
            other => return other,
        }
    }
}

fn attempt(
    pres: &Presentation,
    window: TruncationWindow,
    opts: &AnalyzeOptions,
) -> Result<InvariantReport> {
    let dim = pres.dim();
    let (mu, i_m, det_order, _) = invariants::basic_invariants(pres);
    let tower = superficial::build_tower(pres, window.trunc_degree, opts.seed, opts.retries)?;
    let mut checks: Vec<CheckRecord> = Vec::new();

    // Annihilator: verify through the whole window before using its order.
    let annihilator = match &opts.annihilator {
        Some(f) => {
            let order = match f.order() {
                PolyOrder::Finite(o) if o >= 1 => o,
                _ => {
                    return Err(Error::structural(
                        "annihilator must be a nonzero polynomial of positive order",
                    ))
                }
            };
            if !tower.level(0).window.annihilates(f) {
                return Err(Error::structural(
                    "claimed annihilator does not annihilate M through the window",
                ));
            }
            Some(AnnihilatorReport {
                order,
                verified_to_window: true,
            })
        }
        None => None,
    };
    let ring_mult = annihilator.as_ref().map(|a| a.order);

    // Per-level filtration data: Singh + b-polynomials on the way down,
    // Ratliff-Rush on every level of positive dimension.
    let mut b_polys: Vec<BPolynomial> = Vec::new();
    let mut rr_data: Vec<RatliffRushData> = Vec::new();
    for t in 0..dim {
        let level = tower.level(t);
        let next = tower.level(t + 1);
        let form = level.form.as_ref().expect("descending level has a form");
        let b = filtration::singh_check(&level.window, &level.h, &next.h, form)?;
        b_polys.push(b);
    }
    for (t, b) in b_polys.iter().enumerate() {
        let level = tower.level(t);
        let form = level.form.as_ref().expect("descending level has a form");
        let rr_filtration = filtration::ratliff_rush_filtration(&level.window, form, b)?;
        rr_data.push(filtration::r_and_tilde(
            &level.window,
            &level.h,
            &rr_filtration,
        )?);
        // (m̃^{n+1}M : x) = m̃^n M for the certified form.
        let nmax = (rr_filtration.n0 + 1).min(level.window.safe_degree() - 2);
        if let Some(bad) =
            filtration::colon_identity_check(&level.window, form, &rr_filtration, nmax)?
        {
            return Err(Error::identity(format!(
                "(m̃^(n+1)M : x) = m̃^n M fails at level {t}, n = {bad}"
            )));
        }
    }
    checks.push(CheckRecord::new(
        "singh_equality",
        true,
        format!("verified coefficientwise at {} tower steps", dim),
    ));
    if dim > 0 {
        checks.push(CheckRecord::new(
            "ratliff_rush_decomposition",
            true,
            format!("h = h̃ + (1-z)^(r+1)·r verified at {} levels", dim),
        ));
        checks.push(CheckRecord::new(
            "ratliff_rush_colon_identity",
            true,
            "(m̃^(n+1)M : x) = m̃^n M on the window".to_string(),
        ));
    }

    // Depth with cross-certification.
    let r_zero: Vec<bool> = rr_data.iter().map(|r| r.r_is_zero()).collect();
    let cert: DepthCertificate = depth::depth_g(&tower, &b_polys, &r_zero)?;
    let cm = cert.cm(dim);
    checks.push(CheckRecord::new(
        "depth_cross_certified",
        true,
        format!(
            "h-agreement, zero-b prefix and r_M(z) tests all give depth {}",
            cert.depth
        ),
    ));

    // Reduction data at the top level.
    let top = tower.level(0);
    let forms_top = tower.forms_in_level_coords(0);
    let red = top.window.reduction_number(&forms_top)?;
    let vv_max = red + 1;
    let vv = top.window.vv_lengths(&forms_top, vv_max)?;
    let delta: usize = vv.iter().sum();

    // Splitting type from the dimension-zero Hilbert function.
    let a = invariants::splitting_type(&tower)?;
    let h = top.h.clone();
    let e = h.multiplicity();
    if a.sum() as i64 != e {
        return Err(Error::identity(format!(
            "splitting type {a} does not sum to the multiplicity {e}"
        )));
    }
    checks.push(CheckRecord::new(
        "splitting_sums_to_e",
        true,
        format!("{a} sums to e = {e}"),
    ));

    // e >= μ·i, with the equality stratum flagged.
    let equality = invariants::check_e_bound(e, mu, i_m)?;
    checks.push(CheckRecord::new(
        "e_bound",
        true,
        if equality {
            format!("e = μ·i(M) = {e}: G(M) must be Cohen-Macaulay")
        } else {
            format!("e = {e} >= μ·i(M) = {}", mu * i_m)
        },
    ));

    // Free-module prefix: below i(M) the Hilbert function is that of Q^μ.
    for n in 0..i_m.min(top.window.safe_degree() + 1) {
        let expected = mu as i64 * binomial(n + dim, dim);
        let got = top.window.hilbert_value(n)? as i64;
        if got != expected {
            return Err(Error::identity(format!(
                "H({n}) = {got} differs from the free-module value {expected} below i(M)"
            )));
        }
    }

    // Dimension-one shape: h_j >= 0, with the first i(M) coefficients = μ.
    for (t, level) in tower.levels.iter().enumerate() {
        if level.pres.dim() != 1 {
            continue;
        }
        if level.h.coeffs.iter().any(|&c| c < 0) {
            return Err(Error::identity(format!(
                "negative h-coefficient at dimension-one level {t}"
            )));
        }
        for j in 0..i_m {
            if level.h.coeff(j) != mu as i64 {
                return Err(Error::identity(format!(
                    "dimension-one h-coefficient {j} differs from μ below i(M)"
                )));
            }
        }
    }

    // e(A) = 3 forces red <= 2.
    if ring_mult == Some(3) && red > 2 {
        return Err(Error::identity(format!(
            "red(M) = {red} > 2 although e(A) = 3"
        )));
    }

    // The alternating five-term length identity at every dimension-two level.
    for t in 0..dim {
        let level = tower.level(t);
        if level.pres.dim() != 2 {
            continue;
        }
        let forms = tower.forms_in_level_coords(t);
        let x = forms[0].clone();
        let next = tower.level(t + 1);
        let next_form = next.form.clone().expect("dimension-one level has a form");
        let nmax = (red + 2).min(level.window.safe_degree().saturating_sub(2));
        for n in 1..=nmax {
            let l1 = level.window.colon_quotient_len(&forms, n)?;
            let l2 = level
                .window
                .colon_quotient_len(std::slice::from_ref(&x), n)?;
            let l3 = level
                .window
                .colon_quotient_len(std::slice::from_ref(&x), n + 1)?;
            let l4 = level.window.power_mod_j_len(&forms, n)?;
            let l5 = next
                .window
                .power_mod_j_len(std::slice::from_ref(&next_form), n)?;
            if l1 as i64 - l2 as i64 + l3 as i64 - l4 as i64 + l5 as i64 != 0 {
                return Err(Error::identity(format!(
                    "five-term alternating length identity fails at level {t}, n = {n}: \
                     {l1} - {l2} + {l3} - {l4} + {l5} != 0"
                )));
            }
        }
        checks.push(CheckRecord::new(
            "alternating_length_identity",
            true,
            format!("level {t}, n = 1..{nmax}"),
        ));
    }

    // Three-term splice at every level of positive dimension:
    // ℓ(m²M:x/mM) + ℓ(m²N/J̄mN) = ℓ(m²M/JmM).
    for t in 0..dim {
        let level = tower.level(t);
        let forms = tower.forms_in_level_coords(t);
        let x = forms[0].clone();
        let lhs1 = level
            .window
            .colon_quotient_len(std::slice::from_ref(&x), 2)?;
        let total = level.window.power_mod_j_len(&forms, 1)?;
        let next = tower.level(t + 1);
        let next_forms = tower.forms_in_level_coords(t + 1);
        // At dimension one the residual ideal is zero and the third term is
        // plain ℓ(m²N); the empty generator list computes exactly that.
        let lhs2 = next.window.power_mod_j_len(&next_forms, 1)?;
        if lhs1 + lhs2 != total {
            return Err(Error::identity(format!(
                "colon splice ℓ(m²M:x/mM) + ℓ(m²N/J̄mN) = ℓ(m²M/JmM) fails at level {t}: \
                 {lhs1} + {lhs2} != {total}"
            )));
        }
    }
    if dim > 0 {
        checks.push(CheckRecord::new(
            "colon_splice_identity",
            true,
            "verified at every level of positive dimension".to_string(),
        ));
    }

    // Hilbert series of G(M) modulo the initial forms of J, for red <= 2:
    // μ + αz + βz² with β <= α <= μ.
    if red <= 2 && dim > 0 {
        let alpha = top.window.graded_piece_mod_j(&forms_top, 1)?;
        let beta = top.window.graded_piece_mod_j(&forms_top, 2)?;
        if !verdicts::series_constraint_ok(mu, alpha, beta) {
            return Err(Error::identity(format!(
                "series constraint fails: ({mu}, {alpha}, {beta}) violates β <= α <= μ"
            )));
        }
        checks.push(CheckRecord::new(
            "series_constraint",
            true,
            format!("series {mu} + {alpha}z + {beta}z² with β <= α <= μ"),
        ));
    }

    // Classification.
    let classify_input = ClassifyInput {
        mu,
        dim,
        i_m,
        det_order,
        e,
        red,
        a: &a.0,
        depth: cert.depth,
        h: &h,
        ring_mult,
    };
    let verdict = verdicts::classify(&classify_input);
    checks.extend(verdicts::headline_checks(&classify_input));

    let e_list = h.hilbert_coefficients(dim);
    let report = InvariantReport {
        p: pres.field().modulus(),
        mu,
        i_m,
        det_order,
        dim,
        e,
        e_list,
        h: PolyReport::from_h(&h),
        red,
        a: a.0.clone(),
        depth_g: cert.depth,
        cm,
        regular_prefix: cert.regular_prefix,
        h_tower: cert.h_tower.iter().map(PolyReport::from_h).collect(),
        b_polys: b_polys
            .iter()
            .enumerate()
            .map(|(level, b)| BPolyReport {
                level,
                coeffs: b.coeffs.clone(),
            })
            .collect(),
        r_poly: rr_data
            .first()
            .map(|r| PolyReport::from_counts(&r.r_coeffs)),
        h_tilde: rr_data.first().map(|r| PolyReport::from_h(&r.h_tilde)),
        vv,
        delta,
        verdict,
        checks,
        certification: CertificationReport {
            seed: opts.seed,
            forms: tower.certificates.clone(),
        },
        window: WindowReport {
            trunc_degree: window.trunc_degree,
            safe_degree: window.safe_degree,
        },
        annihilator,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::parse_polynomial;

    fn pres(vars: &[&str], rows: &[&[&str]]) -> Presentation {
        let field = Field::default_prime();
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let entries = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_polynomial(&field, &names, s).unwrap())
                    .collect()
            })
            .collect();
        Presentation::new(field, entries).unwrap()
    }

    #[test]
    fn analyze_case_1_4() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.depth_g, 0);
        assert_eq!(r.h.coeffs, vec![2, 0, 1]);
        assert_eq!(r.r_poly.as_ref().unwrap().coeffs, vec![1]);
        assert_eq!(r.h_tilde.as_ref().unwrap().coeffs, vec![1, 2]);
        assert_eq!(r.a, vec![1, 2]);
        assert_eq!(r.red, 2);
        assert_eq!(r.verdict.matches, Some(true));
    }

    #[test]
    fn analyze_case_1_3() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.depth_g, 1);
        assert!(r.cm);
        assert_eq!(r.h.coeffs, vec![2, 1]);
        assert_eq!(r.red, 1);
        assert_eq!(r.verdict.matches, Some(true));
    }

    #[test]
    fn analyze_dvr_case() {
        let p = pres(&["x", "y"], &[&["x"]]);
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.mu, 1);
        assert_eq!(r.e, 1);
        assert_eq!(r.depth_g, 1);
        assert!(r.cm);
        assert_eq!(r.h.coeffs, vec![1]);
    }

    #[test]
    fn analyze_dim_zero() {
        let p = pres(&["y"], &[&["y^2", "0"], &["0", "y^3"]]);
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.dim, 0);
        assert_eq!(r.depth_g, 0);
        assert!(r.cm);
        assert_eq!(r.a, vec![2, 3]);
        assert_eq!(r.h.coeffs, vec![2, 2, 1]);
    }

    #[test]
    fn analyze_ulrich_module() {
        // diag(y, y, y): e = μ = 3, an Ulrich module; mM = JM so red = 0.
        let p = pres(
            &["x", "y"],
            &[&["y", "0", "0"], &["0", "y", "0"], &["0", "0", "y"]],
        );
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.a, vec![1, 1, 1]);
        assert_eq!(r.red, 0);
        assert_eq!(r.e, 3);
        assert!(r.cm);
        assert_eq!(r.h.coeffs, vec![3]);
        assert!(r.vv.iter().all(|&v| v == 0));
        assert_eq!(r.verdict.matches, Some(true));
    }

    #[test]
    fn analyze_e_equals_mu_i_stratum() {
        // diag(y^2, y^2): e = 4 = μ·i, the equality stratum, always CM.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["0", "y^2"]]);
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.e, 4);
        assert_eq!(r.i_m, 2);
        assert!(r.cm);
        assert_eq!(r.h.coeffs, vec![2, 2]);
        assert!(r
            .checks
            .iter()
            .any(|c| c.name == "e_bound" && c.detail.contains("must be Cohen-Macaulay")));
        assert!(r.checks.iter().any(|c| c.name == "e_eq_mu_i" && c.passed));
    }

    #[test]
    fn certification_failure_over_tiny_field() {
        // Over F_3 every linear form divides det(φ) here, so no candidate
        // can preserve the determinant order and the search must fail.
        let field = Field::new(3).unwrap();
        let names = vec!["x".to_string(), "y".to_string()];
        let e00 = parse_polynomial(&field, &names, "x*y").unwrap();
        let e11 = parse_polynomial(&field, &names, "(x + y)*(x + 2*y)").unwrap();
        let zero = crate::poly::MultiPolynomial::zero(2);
        let p = Presentation::new(field, vec![vec![e00, zero.clone()], vec![zero, e11]]).unwrap();
        let err = analyze(&p, &AnalyzeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Certification(_)), "{err}");
    }

    #[test]
    fn seeds_agree_on_invariants() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let r1 = analyze(
            &p,
            &AnalyzeOptions {
                seed: 11,
                ..Default::default()
            },
        )
        .unwrap();
        let r2 = analyze(
            &p,
            &AnalyzeOptions {
                seed: 2026,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r1.invariant_key(), r2.invariant_key());
    }
}
