//! Depth of the associated graded module via Sally descent.
//!
//! Along a certified tower, `depth G(M) >= c+1` iff the h-polynomials agree
//! at step `c`. The depth is therefore the length of the leading run of
//! agreements. Two independent recomputations - the run of identically-zero
//! b-polynomials and the per-level `r_M(z) = 0` tests - must agree exactly,
//! and the agreement run itself must be a prefix (a Sally-descent
//! consistency condition); any discrepancy is a hard error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::BPolynomial;
use crate::invariants::HPolynomial;
use crate::superficial::SuperficialSequence;

/// The certified depth of `G(M)` with its supporting evidence.
#[derive(Debug, Clone, Serialize)]
pub struct DepthCertificate {
    pub depth: usize,
    /// h-polynomials `h(M_0), ..., h(M_d)`.
    pub h_tower: Vec<HPolynomial>,
    /// Largest `c` with `h(M_c) = h(M_{c+1})`, or -1.
    pub agreement_index: i64,
    /// Length of the leading run of forms with identically zero
    /// b-polynomial; each such form is `G`-regular at its level.
    pub regular_prefix: usize,
    /// Per level `t < dim`: whether `r_{M_t}(z) = 0`.
    pub r_zero_levels: Vec<bool>,
}

impl DepthCertificate {
    pub fn cm(&self, dim: usize) -> bool {
        cm_flag(self.depth, dim)
    }
}

/// `G(M)` is Cohen-Macaulay iff depth equals dimension (every
/// finite-length module counts as Cohen-Macaulay at dimension zero).
pub fn cm_flag(depth: usize, dim: usize) -> bool {
    depth == dim
}

/// Depth from the h-comparison along the tower. The b-polynomial and
/// `r_M(z)` evidence is supplied by the caller (it is computed per level by
/// the filtration layer) and cross-checked here.
pub fn depth_g(
    tower: &SuperficialSequence,
    b_polys: &[BPolynomial],
    r_zero_levels: &[bool],
) -> Result<DepthCertificate> {
    let dim = tower.dim();
    let hs = tower.h_tower();
    // Numerator comparison: the dims differ by one along the tower, what
    // must agree are the coefficient lists.
    let agreements: Vec<bool> = (0..dim).map(|c| hs[c].coeffs == hs[c + 1].coeffs).collect();
    let depth = agreements.iter().take_while(|&&a| a).count();
    // Sally-descent nestedness: agreement at c forces agreement below c, so
    // the agreement run must be exactly a prefix.
    if agreements[depth.min(agreements.len())..].iter().any(|&a| a) {
        return Err(Error::identity(
            "h-agreement along the tower is not a prefix: certification failed silently",
        ));
    }
    let agreement_index = depth as i64 - 1;
    let regular_prefix = b_polys.iter().take_while(|b| b.is_zero()).count();
    let cert = DepthCertificate {
        depth,
        h_tower: hs.into_iter().cloned().collect(),
        agreement_index,
        regular_prefix,
        r_zero_levels: r_zero_levels.to_vec(),
    };
    cross_certify(&cert, dim)?;
    Ok(cert)
}

/// Asserts the three depth routes agree: h-agreement, the regular prefix of
/// b ≡ 0 forms, and the first level with `r_M(z) != 0`.
pub fn cross_certify(cert: &DepthCertificate, dim: usize) -> Result<()> {
    if cert.depth > dim {
        return Err(Error::identity("depth exceeds dimension"));
    }
    if cert.regular_prefix != cert.depth {
        return Err(Error::identity(format!(
            "depth {} disagrees with the regular prefix {} of zero b-polynomials",
            cert.depth, cert.regular_prefix
        )));
    }
    // r_{M_t} = 0 iff depth G(M_t) > 0 iff t < depth.
    for (t, &zero) in cert.r_zero_levels.iter().enumerate() {
        let expected = t < cert.depth;
        if zero != expected {
            return Err(Error::identity(format!(
                "r-polynomial test at level {t} contradicts depth {}",
                cert.depth
            )));
        }
    }
    Ok(())
}
