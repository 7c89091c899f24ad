//! Numerical invariants extracted from Hilbert data: the h-polynomial and
//! its coefficients `e_i`, the basic presentation invariants, and the
//! splitting type of the dimension-zero reduction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::trunc::{ModuleWindow, Presentation};

/// Numerator `h_M(z)` of the Hilbert series `H_M(z) = h_M(z)/(1-z)^dim`.
///
/// Coefficients are integers (negative ones occur from dimension two on) and
/// the top coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HPolynomial {
    pub coeffs: Vec<i64>,
    pub dim: usize,
}

impl HPolynomial {
    pub fn new(mut coeffs: Vec<i64>, dim: usize) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        HPolynomial { coeffs, dim }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Multiplicity `e(M) = h(1)`.
    pub fn multiplicity(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// `e_i(M) = h^{(i)}(1) / i! = Σ_j C(j, i) h_j`.
    pub fn hilbert_coefficient(&self, i: usize) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| binomial(j, i) * c)
            .sum()
    }

    /// `e_0 .. e_upto`.
    pub fn hilbert_coefficients(&self, upto: usize) -> Vec<i64> {
        (0..=upto).map(|i| self.hilbert_coefficient(i)).collect()
    }

    /// Renders as `2 + z^2`.
    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            let body = match (i, mag) {
                (0, m) => format!("{m}"),
                (1, 1) => "z".to_string(),
                (1, m) => format!("{m}*z"),
                (_, 1) => format!("z^{i}"),
                (_, m) => format!("{m}*z^{i}"),
            };
            if parts.is_empty() {
                parts.push(if c < 0 { format!("-{body}") } else { body });
            } else if c < 0 {
                parts.push(format!("- {body}"));
            } else {
                parts.push(format!("+ {body}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// Formal product with `(1-z)^k`.
    pub fn mul_one_minus_z_pow(&self, k: usize) -> Vec<i64> {
        let mut out = self.coeffs.clone();
        for _ in 0..k {
            out = mul_one_minus_z(&out);
        }
        out
    }
}

fn mul_one_minus_z(coeffs: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; coeffs.len() + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        out[i] += c;
        out[i + 1] -= c;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Extracts the h-polynomial from Hilbert values on the certified window.
///
/// The numerator `(1-z)^dim · H(z)` must end with at least `dim + 2`
/// consecutive zero coefficients inside the window; otherwise the window was
/// too small and the caller grows it.
pub fn h_polynomial_from_values(values: &[usize], dim: usize) -> Result<HPolynomial> {
    let n = values.len();
    let mut numerator = vec![0i64; n];
    for i in 0..n {
        for k in 0..=dim.min(i) {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            numerator[i] += sign * binomial(dim, k) * values[i - k] as i64;
        }
    }
    let last_nonzero = numerator.iter().rposition(|&c| c != 0);
    let s = match last_nonzero {
        Some(s) => s,
        None => {
            return Err(Error::identity(
                "Hilbert function is identically zero for a nonzero module",
            ))
        }
    };
    if n - 1 - s < dim + 2 {
        return Err(Error::inconclusive(format!(
            "h-polynomial numerator not stabilized: needs {} trailing zeros, window shows {}",
            dim + 2,
            n - 1 - s
        )));
    }
    numerator.truncate(s + 1);
    Ok(HPolynomial::new(numerator, dim))
}

/// The h-polynomial of the module behind an already-built window.
pub fn h_polynomial(win: &ModuleWindow) -> Result<HPolynomial> {
    h_polynomial_from_values(win.hilbert_values(), win.presentation().dim())
}

/// Basic presentation invariants `(μ, i(M), v(det φ), dim)`.
pub fn basic_invariants(pres: &Presentation) -> (usize, usize, usize, usize) {
    (pres.size(), pres.min_order(), pres.det_order(), pres.dim())
}

/// Splitting type of the dimension-zero reduction `M_d ≅ ⊕ Q'/(y^{a_i})`:
/// the non-decreasing tuple recovered from `#{i : a_i > n} = H(M_d, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingType(pub Vec<usize>);

impl SplittingType {
    /// Conjugates the dimension-zero Hilbert function.
    pub fn from_hilbert(values: &[usize]) -> Result<Self> {
        let mu = values[0];
        for w in values.windows(2) {
            if w[1] > w[0] {
                return Err(Error::identity(
                    "dimension-zero Hilbert function must be non-increasing",
                ));
            }
        }
        let mut a = Vec::with_capacity(mu);
        for slot in 1..=mu {
            // a_{mu + 1 - slot} (descending) = #{n : H(n) >= slot}.
            a.push(values.iter().filter(|&&h| h >= slot).count());
        }
        a.reverse();
        Ok(SplittingType(a))
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Splitting type of the module behind a certified tower: read off the
/// Hilbert function of the dimension-zero level.
pub fn splitting_type(tower: &crate::superficial::SuperficialSequence) -> Result<SplittingType> {
    let bottom = tower.level(tower.dim());
    SplittingType::from_hilbert(bottom.window.hilbert_values())
}

/// `e(M) >= μ(M)·i(M)`; returns whether equality holds (the stratum where
/// `G(M)` must be Cohen-Macaulay). A strict violation is impossible and
/// signals a bug.
pub fn check_e_bound(e: i64, mu: usize, i_m: usize) -> Result<bool> {
    let bound = (mu * i_m) as i64;
    if e < bound {
        return Err(Error::identity(format!(
            "e(M) = {e} < μ·i(M) = {bound}: violates the multiplicity bound"
        )));
    }
    Ok(e == bound)
}
