//! The machine-readable record of one analyzed module.

use serde::Serialize;

use crate::invariants::HPolynomial;
use crate::superficial::FormCertificate;
use crate::verdicts::{CheckRecord, Verdict};

/// A polynomial with both machine and display forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyReport {
    pub coeffs: Vec<i64>,
    pub text: String,
}

impl PolyReport {
    pub fn from_h(h: &HPolynomial) -> Self {
        PolyReport {
            coeffs: h.coeffs.clone(),
            text: h.render(),
        }
    }

    pub fn from_counts(coeffs: &[usize]) -> Self {
        let h = HPolynomial::new(coeffs.iter().map(|&c| c as i64).collect(), 0);
        PolyReport {
            text: h.render(),
            coeffs: h.coeffs,
        }
    }
}

/// b-polynomial of the superficial form used at one tower level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BPolyReport {
    pub level: usize,
    pub coeffs: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub trunc_degree: usize,
    pub safe_degree: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub seed: u64,
    pub forms: Vec<FormCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilatorReport {
    pub order: usize,
    /// Membership of f·e_j in im φ, checked through the full window.
    pub verified_to_window: bool,
}

/// The full record emitted for one presentation.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub p: u64,
    pub mu: usize,
    pub i_m: usize,
    pub det_order: usize,
    pub dim: usize,
    pub e: i64,
    /// e_0 .. e_dim.
    pub e_list: Vec<i64>,
    pub h: PolyReport,
    pub red: usize,
    pub a: Vec<usize>,
    pub depth_g: usize,
    pub cm: bool,
    pub regular_prefix: usize,
    pub h_tower: Vec<PolyReport>,
    pub b_polys: Vec<BPolyReport>,
    pub r_poly: Option<PolyReport>,
    pub h_tilde: Option<PolyReport>,
    /// Valabrega-Valla lengths at the top level and their sum δ.
    pub vv: Vec<usize>,
    pub delta: usize,
    pub verdict: Verdict,
    pub checks: Vec<CheckRecord>,
    pub certification: CertificationReport,
    pub window: WindowReport,
    pub annihilator: Option<AnnihilatorReport>,
}

#[derive(Serialize)]
struct InvariantKey<'a> {
    mu: usize,
    i_m: usize,
    det_order: usize,
    dim: usize,
    e: i64,
    e_list: &'a [i64],
    h: &'a PolyReport,
    red: usize,
    a: &'a [usize],
    depth_g: usize,
    cm: bool,
    regular_prefix: usize,
    h_tower: &'a [PolyReport],
    b_polys: &'a [BPolyReport],
    r_poly: &'a Option<PolyReport>,
    h_tilde: &'a Option<PolyReport>,
    vv: &'a [usize],
    matches: Option<bool>,
    stratum: &'a str,
}

impl InvariantReport {
    /// The seed-independent content: everything except the certification
    /// block (whose forms obviously depend on the seed).
    pub fn invariant_key(&self) -> String {
        serde_json::to_string(&InvariantKey {
            mu: self.mu,
            i_m: self.i_m,
            det_order: self.det_order,
            dim: self.dim,
            e: self.e,
            e_list: &self.e_list,
            h: &self.h,
            red: self.red,
            a: &self.a,
            depth_g: self.depth_g,
            cm: self.cm,
            regular_prefix: self.regular_prefix,
            h_tower: &self.h_tower,
            b_polys: &self.b_polys,
            r_poly: &self.r_poly,
            h_tilde: &self.h_tilde,
            vv: &self.vv,
            matches: self.verdict.matches,
            stratum: &self.verdict.stratum,
        })
        .expect("report serializes")
    }
}
