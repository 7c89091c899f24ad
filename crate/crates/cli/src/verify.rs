//! Data-driven verification of corpus files against their expected blocks.

use gradmod_core::superficial::{certify_phi_superficial, CertOutcome};
use gradmod_core::{analyze, filtration, invariants, AnalyzeOptions};

use crate::input::{ExpectedDepth, InputFile};

/// One row of the verification table.
pub struct VerifyRow {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

pub fn verify_one(name: &str, text: &str, seed: u64) -> VerifyRow {
    let failure = |expected: String, got: String| VerifyRow {
        name: name.to_string(),
        expected,
        got,
        passed: false,
    };
    let parsed = match InputFile::parse(text) {
        Ok(p) => p,
        Err(e) => return failure("-".into(), format!("parse error: {e}")),
    };
    let built = match parsed.build() {
        Ok(b) => b,
        Err(e) => return failure("-".into(), format!("input error: {e}")),
    };
    let mut expected_parts = Vec::new();
    if let Some(d) = &parsed.expected_depth {
        expected_parts.push(format!("depth {d}"));
    }
    if let Some(h) = &parsed.expected_h {
        expected_parts.push(format!("h = {}", crate::input::render_z_poly(h)));
    }
    if parsed.expected_regular_form.is_some() {
        expected_parts.push("regular form".into());
    }
    let expected = if expected_parts.is_empty() {
        "(analysis only)".into()
    } else {
        expected_parts.join(", ")
    };
    let opts = AnalyzeOptions {
        seed,
        annihilator: built.annihilator.clone(),
        ..Default::default()
    };
    let report = match analyze(&built.presentation, &opts) {
        Ok(r) => r,
        Err(e) => return failure(expected, format!("analysis error: {e}")),
    };
    let mut passed = true;
    match parsed.expected_depth {
        Some(ExpectedDepth::Cm) => passed &= report.cm,
        Some(ExpectedDepth::Depth(d)) => passed &= report.depth_g == d,
        None => {}
    }
    if let Some(h) = &parsed.expected_h {
        passed &= &report.h.coeffs == h;
    }
    // A named form must certify as φ-superficial with identically zero
    // b-polynomial: that is exactly G(M)-regularity of its initial form.
    let mut regular_note = String::new();
    if let Some(form) = &built.regular_form {
        let h_top = invariants::HPolynomial::new(report.h.coeffs.clone(), report.dim);
        let win = gradmod_core::ModuleWindow::build(
            &built.presentation,
            gradmod_core::TruncationWindow::for_degree(
                &built.presentation,
                report.window.trunc_degree,
            )
            .expect("window was valid during analysis"),
        )
        .expect("window rebuild");
        match certify_phi_superficial(
            &built.presentation,
            &h_top,
            form,
            report.window.trunc_degree,
        ) {
            Ok(CertOutcome::Pass(step)) => {
                match filtration::singh_check(&win, &h_top, &step.h, form) {
                    Ok(b) if b.is_zero() => regular_note = ", regular form ok".into(),
                    Ok(_) => {
                        passed = false;
                        regular_note = ", named form NOT regular".into();
                    }
                    Err(e) => {
                        passed = false;
                        regular_note = format!(", regular-form check failed: {e}");
                    }
                }
            }
            Ok(CertOutcome::Fail(f)) => {
                passed = false;
                regular_note = format!(", named form not superficial: {f}");
            }
            Err(e) => {
                passed = false;
                regular_note = format!(", regular-form check failed: {e}");
            }
        }
    }
    let got = format!(
        "depth {}{}, h = {}{}",
        report.depth_g,
        if report.cm { " (CM)" } else { "" },
        report.h.text,
        regular_note
    );
    VerifyRow {
        name: name.to_string(),
        expected,
        got,
        passed,
    }
}
