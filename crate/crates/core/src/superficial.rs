//! Construction and certification of φ-superficial sequences, and the
//! quotient tower `M = M_0 → M_1 → ... → M_d` they induce.
//!
//! A candidate linear form is certified by three operational checks:
//! every entry order of φ survives the quotient, the determinant order
//! survives, and the Hilbert coefficients `e_0 .. e_{dim-1}` are preserved.
//! Candidates are random with uniform coordinates; over a large prime field
//! a rejection is rare, so a run of 25 failures at one level is reported as
//! a certification failure rather than retried forever.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::invariants::{h_polynomial, HPolynomial};
use crate::poly::{LinearChange, MultiPolynomial, PolyOrder};
use crate::trunc::{ModuleWindow, Presentation, TruncationWindow};

/// Default retry budget per tower level.
pub const DEFAULT_RETRIES: usize = 25;

/// Why a candidate form failed certification. A failure is a value: the
/// caller re-randomizes.
#[derive(Debug, Clone, Serialize)]
pub enum CertFailure {
    /// The quotient presentation degenerated (typically det = 0).
    QuotientDegenerate { reason: String },
    /// Some entry order changed under the quotient.
    EntryOrder {
        row: usize,
        col: usize,
        before: String,
        after: String,
    },
    /// The determinant order changed under the quotient.
    DetOrder { before: String, after: String },
    /// Some Hilbert coefficient in the preserved prefix changed.
    HilbertCoefficient {
        index: usize,
        before: i64,
        after: i64,
    },
}

impl std::fmt::Display for CertFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertFailure::QuotientDegenerate { reason } => {
                write!(f, "quotient degenerates: {reason}")
            }
            CertFailure::EntryOrder {
                row,
                col,
                before,
                after,
            } => write!(f, "entry ({row},{col}) order changed {before} -> {after}"),
            CertFailure::DetOrder { before, after } => {
                write!(f, "det order changed {before} -> {after}")
            }
            CertFailure::HilbertCoefficient {
                index,
                before,
                after,
            } => {
                write!(f, "e_{index} changed {before} -> {after}")
            }
        }
    }
}

/// A certified quotient step.
pub struct CertifiedStep {
    pub form: MultiPolynomial,
    pub quotient: Presentation,
    /// New variable `i` of the quotient is old variable `lift_map[i]`.
    pub lift_map: Vec<usize>,
    pub window: ModuleWindow,
    pub h: HPolynomial,
}

/// Per-level record of the checks an accepted form passed.
#[derive(Debug, Clone, Serialize)]
pub struct FormCertificate {
    pub level: usize,
    pub attempts: usize,
    pub form: String,
    pub entry_orders_preserved: bool,
    pub det_order_preserved: bool,
    pub e_prefix_preserved: bool,
}

/// One level of the quotient tower: the presentation, its window, its
/// certified h-polynomial, and the superficial form used to descend.
pub struct TowerLevel {
    pub pres: Presentation,
    pub window: ModuleWindow,
    pub h: HPolynomial,
    /// The form (in this level's variables) quotiented out to reach the next
    /// level; `None` at dimension zero.
    pub form: Option<MultiPolynomial>,
    /// Variable renaming for the next level; `None` at dimension zero.
    pub lift_map: Option<Vec<usize>>,
}

/// A certified maximal φ-superficial sequence together with the whole tower
/// of quotient presentations `P_0, ..., P_d`.
pub struct SuperficialSequence {
    pub seed: u64,
    pub levels: Vec<TowerLevel>,
    pub certificates: Vec<FormCertificate>,
}

impl SuperficialSequence {
    pub fn dim(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, t: usize) -> &TowerLevel {
        &self.levels[t]
    }

    /// The forms `x_{t+1}, ..., x_d` generating the residual reduction ideal
    /// of `M_t`, all expressed in the coordinates of level `t`.
    pub fn forms_in_level_coords(&self, t: usize) -> Vec<MultiPolynomial> {
        let mut out = Vec::new();
        for u in t..self.dim() {
            let mut form = self.levels[u]
                .form
                .clone()
                .expect("levels above dimension zero carry a form");
            // Lift from level u coordinates down to level t coordinates.
            for v in (t..u).rev() {
                let map = self.levels[v]
                    .lift_map
                    .as_ref()
                    .expect("levels above dimension zero carry a lift map");
                form = form.lift_vars(self.levels[v].pres.nvars(), map);
            }
            out.push(form);
        }
        out
    }

    /// h-polynomials down the tower.
    pub fn h_tower(&self) -> Vec<&HPolynomial> {
        self.levels.iter().map(|l| &l.h).collect()
    }
}

/// Quotients a presentation by a linear form: an invertible change of
/// coordinates sends the form to the last variable, which is then set to
/// zero and dropped. Returns the new presentation and the variable renaming
/// (new variable `i` = old variable `map[i]`).
pub fn quotient_once(
    pres: &Presentation,
    x: &MultiPolynomial,
) -> Result<(Presentation, Vec<usize>)> {
    if x.order() != PolyOrder::Finite(1) || x.degree() != Some(1) {
        return Err(Error::structural("superficial candidate must be linear"));
    }
    let field = *pres.field();
    let nvars = pres.nvars();
    let mut coeffs = vec![0u64; nvars];
    for (e, c) in x.terms() {
        let var = e.0.iter().position(|&d| d == 1).unwrap();
        coeffs[var] = c;
    }
    let pivot = coeffs
        .iter()
        .rposition(|&c| c != 0)
        .expect("a linear form has a nonzero coefficient");
    let kept: Vec<usize> = (0..nvars).filter(|&t| t != pivot).collect();
    // Substitution: x_t -> y_{pos(t)} for kept variables, and
    // x_pivot -> (y_last - Σ c_{kept[i]} y_i) / c_pivot, so that the form
    // becomes exactly y_last.
    let inv = field.inv(coeffs[pivot]);
    let mut matrix = vec![vec![0 as FieldScalar; nvars]; nvars];
    for (i, &t) in kept.iter().enumerate() {
        matrix[t][i] = 1;
    }
    matrix[pivot][nvars - 1] = inv;
    for (i, &t) in kept.iter().enumerate() {
        matrix[pivot][i] = field.neg(field.mul(inv, coeffs[t]));
    }
    let change = LinearChange::new(&field, matrix)?;
    let mut rows = Vec::with_capacity(pres.size());
    for i in 0..pres.size() {
        let mut row = Vec::with_capacity(pres.size());
        for j in 0..pres.size() {
            let moved = pres.entry(i, j).apply_change(&field, &change)?;
            row.push(moved.eliminate_last()?);
        }
        rows.push(row);
    }
    let quotient = Presentation::new(field, rows)?;
    Ok((quotient, kept))
}

/// Outcome of certifying one candidate form.
pub enum CertOutcome {
    Pass(Box<CertifiedStep>),
    Fail(CertFailure),
}

/// Runs the three φ-superficiality checks for `x` against `pres`, building
/// the quotient and its window along the way. Window exhaustion propagates
/// as an error (the caller grows the window); a failed check is a value.
pub fn certify_phi_superficial(
    pres: &Presentation,
    h: &HPolynomial,
    x: &MultiPolynomial,
    trunc_degree: usize,
) -> Result<CertOutcome> {
    let (quotient, lift_map) = match quotient_once(pres, x) {
        Ok(q) => q,
        Err(Error::Structural(reason)) => {
            return Ok(CertOutcome::Fail(CertFailure::QuotientDegenerate {
                reason,
            }))
        }
        Err(e) => return Err(e),
    };
    for i in 0..pres.size() {
        for j in 0..pres.size() {
            let before = pres.entry(i, j).order();
            let after = quotient.entry(i, j).order();
            if before != after {
                return Ok(CertOutcome::Fail(CertFailure::EntryOrder {
                    row: i,
                    col: j,
                    before: before.to_string(),
                    after: after.to_string(),
                }));
            }
        }
    }
    if pres.det().order() != quotient.det().order() {
        return Ok(CertOutcome::Fail(CertFailure::DetOrder {
            before: pres.det().order().to_string(),
            after: quotient.det().order().to_string(),
        }));
    }
    let window = ModuleWindow::build(
        &quotient,
        TruncationWindow::for_degree(&quotient, trunc_degree)?,
    )?;
    let hq = h_polynomial(&window)?;
    // e_i(M) = e_i(M/xM) for i = 0 .. dim M - 1: the operational stand-in
    // for the raw superficiality definition.
    for i in 0..pres.dim() {
        let before = h.hilbert_coefficient(i);
        let after = hq.hilbert_coefficient(i);
        if before != after {
            return Ok(CertOutcome::Fail(CertFailure::HilbertCoefficient {
                index: i,
                before,
                after,
            }));
        }
    }
    Ok(CertOutcome::Pass(Box::new(CertifiedStep {
        form: x.clone(),
        quotient,
        lift_map,
        window,
        h: hq,
    })))
}

/// Builds the full certified tower, deterministic in the seed.
pub fn build_tower(
    pres: &Presentation,
    trunc_degree: usize,
    seed: u64,
    retries: usize,
) -> Result<SuperficialSequence> {
    let field = *pres.field();
    let window = ModuleWindow::build(pres, TruncationWindow::for_degree(pres, trunc_degree)?)?;
    let h = h_polynomial(&window)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut levels = vec![TowerLevel {
        pres: pres.clone(),
        window,
        h,
        form: None,
        lift_map: None,
    }];
    let mut certificates = Vec::new();
    for t in 0..pres.dim() {
        let nvars = levels[t].pres.nvars();
        let mut accepted = None;
        let mut failures: Vec<String> = Vec::new();
        for attempt in 1..=retries {
            let coeffs: Vec<FieldScalar> = (0..nvars)
                .map(|_| rng.gen_range(0..field.modulus()))
                .collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let x = MultiPolynomial::linear_form(&field, &coeffs);
            match certify_phi_superficial(&levels[t].pres, &levels[t].h, &x, trunc_degree)? {
                CertOutcome::Pass(step) => {
                    certificates.push(FormCertificate {
                        level: t,
                        attempts: attempt,
                        form: format!("{coeffs:?}"),
                        entry_orders_preserved: true,
                        det_order_preserved: true,
                        e_prefix_preserved: true,
                    });
                    accepted = Some(step);
                    break;
                }
                CertOutcome::Fail(reason) => failures.push(reason.to_string()),
            }
        }
        let Some(step) = accepted else {
            return Err(Error::certification(format!(
                "no φ-superficial form found at tower level {t} after {retries} attempts: {}",
                failures.join("; ")
            )));
        };
        let CertifiedStep {
            form,
            quotient,
            lift_map,
            window,
            h,
        } = *step;
        levels[t].form = Some(form);
        levels[t].lift_map = Some(lift_map);
        levels.push(TowerLevel {
            pres: quotient,
            window,
            h,
            form: None,
            lift_map: None,
        });
    }
    let tower = SuperficialSequence {
        seed,
        levels,
        certificates,
    };
    tower.assert_invariants()?;
    Ok(tower)
}

impl SuperficialSequence {
    /// μ, i(M), det order and e are constant down a certified tower, and the
    /// dimension drops by exactly one per level.
    fn assert_invariants(&self) -> Result<()> {
        let top = &self.levels[0];
        for (t, level) in self.levels.iter().enumerate() {
            if level.pres.dim() != top.pres.dim() - t {
                return Err(Error::identity("tower dimension drop is not one per level"));
            }
            if level.pres.size() != top.pres.size()
                || level.pres.min_order() != top.pres.min_order()
                || level.pres.det_order() != top.pres.det_order()
            {
                return Err(Error::identity(format!(
                    "tower level {t} does not preserve (μ, i(M), v(det))"
                )));
            }
            if level.h.multiplicity() != top.h.multiplicity() {
                return Err(Error::identity(format!(
                    "tower level {t} does not preserve the multiplicity"
                )));
            }
        }
        Ok(())
    }
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

    fn form(nvars: usize, text: &str, vars: &[&str]) -> MultiPolynomial {
        let field = Field::default_prime();
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let p = parse_polynomial(&field, &names, text).unwrap();
        assert_eq!(p.nvars(), nvars);
        p
    }

    #[test]
    fn quotient_by_last_variable_is_plain_elimination() {
        let p = pres(&["x", "y"], &[&["x"]]);
        let x = form(2, "y", &["x", "y"]);
        let (q, map) = quotient_once(&p, &x).unwrap();
        assert_eq!(map, vec![0]);
        assert_eq!(q.nvars(), 1);
        assert_eq!(q.entry(0, 0).order(), PolyOrder::Finite(1));
    }

    #[test]
    fn quotient_preserves_order_for_generic_form() {
        let p = pres(&["x", "y"], &[&["x"]]);
        let x = form(2, "x + y", &["x", "y"]);
        let (q, _) = quotient_once(&p, &x).unwrap();
        assert_eq!(q.entry(0, 0).order(), PolyOrder::Finite(1));
    }

    #[test]
    fn quotient_composes_like_a_two_step_tower() {
        let p = pres(
            &["x", "y", "z"],
            &[&["x", "y", "0"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]],
        );
        let x1 = form(3, "z + 2*x", &["x", "y", "z"]);
        let (q1, _) = quotient_once(&p, &x1).unwrap();
        let x2 = form(2, "y + 3*x", &["x", "y"]);
        let (q2, _) = quotient_once(&q1, &x2).unwrap();
        assert_eq!(q2.nvars(), 1);
        assert_eq!(q2.dim(), 0);
        assert_eq!(q2.det_order(), p.det_order());
    }

    #[test]
    fn certify_diag_case_passes_on_x() {
        // φ = diag(y^2, y^2): x is absent from the entries, so orders and the
        // det order survive, and e_0 is preserved.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["0", "y^2"]]);
        let w = ModuleWindow::build(&p, TruncationWindow::default_for(&p).unwrap()).unwrap();
        let h = h_polynomial(&w).unwrap();
        let x = form(2, "x", &["x", "y"]);
        match certify_phi_superficial(&p, &h, &x, w.window().trunc_degree).unwrap() {
            CertOutcome::Pass(step) => {
                assert_eq!(step.quotient.det_order(), 4);
                assert_eq!(step.h.multiplicity(), 4);
            }
            CertOutcome::Fail(f) => panic!("expected pass, got {f}"),
        }
    }

    #[test]
    fn certify_rejects_y_for_case_1_4() {
        // y divides det = y^3: the quotient degenerates (det order jumps to
        // infinity), so y is not φ-superficial.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = ModuleWindow::build(&p, TruncationWindow::default_for(&p).unwrap()).unwrap();
        let h = h_polynomial(&w).unwrap();
        let y = form(2, "y", &["x", "y"]);
        match certify_phi_superficial(&p, &h, &y, w.window().trunc_degree).unwrap() {
            CertOutcome::Fail(_) => {}
            CertOutcome::Pass(_) => panic!("y must fail certification"),
        }
    }

    #[test]
    fn certify_generic_form_for_case_1_4() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = ModuleWindow::build(&p, TruncationWindow::default_for(&p).unwrap()).unwrap();
        let h = h_polynomial(&w).unwrap();
        let x = form(2, "x + 17*y", &["x", "y"]);
        match certify_phi_superficial(&p, &h, &x, w.window().trunc_degree).unwrap() {
            CertOutcome::Pass(step) => {
                assert_eq!(step.h.multiplicity(), 3);
                assert_eq!(step.h.coeffs, vec![2, 1]);
            }
            CertOutcome::Fail(f) => panic!("expected pass, got {f}"),
        }
    }

    #[test]
    fn tower_for_dvr_case() {
        // φ = [x] over two variables: M_1 is the residue field, h = 1.
        let p = pres(&["x", "y"], &[&["x"]]);
        let d = TruncationWindow::default_for(&p).unwrap().trunc_degree;
        let tower = build_tower(&p, d, 7, DEFAULT_RETRIES).unwrap();
        assert_eq!(tower.levels.len(), 2);
        assert_eq!(tower.levels[1].h.coeffs, vec![1]);
    }

    #[test]
    fn tower_splitting_for_case_1_3() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
        let d = TruncationWindow::default_for(&p).unwrap().trunc_degree;
        let tower = build_tower(&p, d, 42, DEFAULT_RETRIES).unwrap();
        let bottom = &tower.levels[1];
        assert_eq!(bottom.pres.dim(), 0);
        // H(M_1) = (2, 1, 0, ...): splitting type (1, 2).
        assert_eq!(bottom.window.hilbert_value(0).unwrap(), 2);
        assert_eq!(bottom.window.hilbert_value(1).unwrap(), 1);
        assert_eq!(bottom.window.hilbert_value(2).unwrap(), 0);
    }

    #[test]
    fn three_variable_tower_keeps_h_at_first_quotient() {
        // z* is G(M)-regular here, so the first quotient leaves h unchanged.
        let p = pres(
            &["x", "y", "z"],
            &[&["x", "y", "0"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]],
        );
        let d = TruncationWindow::default_for(&p).unwrap().trunc_degree;
        let tower = build_tower(&p, d, 3, DEFAULT_RETRIES).unwrap();
        assert_eq!(tower.levels[0].h.coeffs, tower.levels[1].h.coeffs);
        assert_ne!(tower.levels[1].h.coeffs, tower.levels[2].h.coeffs);
    }
}
