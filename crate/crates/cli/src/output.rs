//! Human-readable rendering of an invariant report.

use gradmod_core::InvariantReport;

pub fn render_report(report: &InvariantReport, vars: &[String]) -> String {
    let mut out = String::new();
    let line = |out: &mut String, k: &str, v: String| {
        out.push_str(&format!("  {k:<18} {v}\n"));
    };
    out.push_str(&format!(
        "module over F_{}[{}], window D = {} (certified to degree {})\n",
        report.p,
        vars.join(", "),
        report.window.trunc_degree,
        report.window.safe_degree
    ));
    line(&mut out, "mu", report.mu.to_string());
    line(&mut out, "i(M)", report.i_m.to_string());
    line(&mut out, "v(det)", report.det_order.to_string());
    line(&mut out, "dim", report.dim.to_string());
    line(&mut out, "e", report.e.to_string());
    line(
        &mut out,
        "e_0..e_dim",
        format!(
            "({})",
            report
                .e_list
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    line(&mut out, "h(z)", report.h.text.clone());
    line(&mut out, "red", report.red.to_string());
    line(
        &mut out,
        "a-tuple",
        format!(
            "({})",
            report
                .a
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    if let Some(r) = &report.r_poly {
        line(&mut out, "r(z)", r.text.clone());
    }
    if let Some(ht) = &report.h_tilde {
        line(&mut out, "h~(z)", ht.text.clone());
    }
    for b in &report.b_polys {
        line(
            &mut out,
            &format!("b(z) level {}", b.level),
            format!("{:?}", b.coeffs),
        );
    }
    line(
        &mut out,
        "h tower",
        report
            .h_tower
            .iter()
            .map(|h| h.text.clone())
            .collect::<Vec<_>>()
            .join("  |  "),
    );
    line(
        &mut out,
        "vv lengths",
        format!("{:?} (delta = {})", report.vv, report.delta),
    );
    line(
        &mut out,
        "depth G(M)",
        format!(
            "{}{}",
            report.depth_g,
            if report.cm { "  (Cohen-Macaulay)" } else { "" }
        ),
    );
    if let Some(f) = &report.annihilator {
        line(
            &mut out,
            "annihilator",
            format!(
                "order {} ({})",
                f.order,
                if f.verified_to_window {
                    "verified on window"
                } else {
                    "unverified"
                }
            ),
        );
    }
    out.push_str(&format!("  verdict: {}\n", report.verdict.stratum));
    if !report.verdict.expected.is_empty() {
        out.push_str("    admissible (depth, h):\n");
        for pair in &report.verdict.expected {
            out.push_str(&format!(
                "      ({}, {})\n",
                pair.depth.render(),
                pair.h_text
            ));
        }
    }
    match report.verdict.matches {
        Some(true) => out.push_str("    matches: yes\n"),
        Some(false) => out.push_str("    matches: NO - outside the published table\n"),
        None => out.push_str("    matches: not applicable (unclassified)\n"),
    }
    out.push_str("  checks:\n");
    for c in &report.checks {
        out.push_str(&format!(
            "    [{}] {}: {}\n",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    out.push_str(&format!(
        "  certification: seed {}, {} forms accepted\n",
        report.certification.seed,
        report.certification.forms.len()
    ));
    out
}
