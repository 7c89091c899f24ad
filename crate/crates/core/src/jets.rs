//! Coordinates for the truncated free module `F / n^{D+1} F`.
//!
//! A basis vector is a pair (monomial, free-module component). Monomials are
//! enumerated degree by degree, lexicographically inside each degree, and
//! coordinates are monomial-major. Degree slices are therefore contiguous
//! index ranges, which is what makes graded lengths pivot counts in ranges.

use std::collections::HashMap;

use crate::field::FieldScalar;
use crate::poly::{ExponentVector, MultiPolynomial};

/// Basis bookkeeping for jets of degree at most `max_deg` with `ncomp`
/// free-module components.
#[derive(Debug)]
pub struct JetBasis {
    nvars: usize,
    ncomp: usize,
    max_deg: usize,
    /// Exponent vectors of all monomials, degree-major then lex.
    monos: Vec<ExponentVector>,
    /// First monomial id of each degree; one extra entry at the end.
    mono_offset: Vec<usize>,
    mono_id: HashMap<ExponentVector, usize>,
    /// `mono_mul_var[m][v]` = id of `x_v * monomial m`, if still in range.
    mono_mul_var: Vec<Vec<Option<usize>>>,
}

/// Sparse jet vector: sorted (coordinate, value) pairs with nonzero values.
pub type JetVec = Vec<(usize, FieldScalar)>;

impl JetBasis {
    pub fn new(nvars: usize, ncomp: usize, max_deg: usize) -> Self {
        let mut monos = Vec::new();
        let mut mono_offset = vec![0usize];
        for deg in 0..=max_deg {
            let mut slice = Vec::new();
            enumerate_degree(
                nvars,
                deg,
                &mut vec![0u16; nvars],
                0,
                deg as u16,
                &mut slice,
            );
            slice.sort();
            monos.extend(slice);
            mono_offset.push(monos.len());
        }
        let mono_id: HashMap<_, _> = monos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mono_mul_var = monos
            .iter()
            .map(|e| {
                (0..nvars)
                    .map(|v| {
                        let mut ne = e.clone();
                        ne.0[v] += 1;
                        mono_id.get(&ne).copied()
                    })
                    .collect()
            })
            .collect();
        JetBasis {
            nvars,
            ncomp,
            max_deg,
            monos,
            mono_offset,
            mono_id,
            mono_mul_var,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn ncoords(&self) -> usize {
        self.monos.len() * self.ncomp
    }

    #[inline]
    pub fn coord(&self, mono: usize, comp: usize) -> usize {
        mono * self.ncomp + comp
    }

    #[inline]
    pub fn coord_mono(&self, coord: usize) -> usize {
        coord / self.ncomp
    }

    #[inline]
    pub fn coord_comp(&self, coord: usize) -> usize {
        coord % self.ncomp
    }

    pub fn mono_exponents(&self, mono: usize) -> &ExponentVector {
        &self.monos[mono]
    }

    pub fn mono_degree(&self, mono: usize) -> usize {
        self.monos[mono].total_degree()
    }

    pub fn coord_degree(&self, coord: usize) -> usize {
        self.mono_degree(self.coord_mono(coord))
    }

    pub fn mono_lookup(&self, e: &ExponentVector) -> Option<usize> {
        self.mono_id.get(e).copied()
    }

    /// Monomial ids of exactly the given degree.
    pub fn monos_of_degree(&self, deg: usize) -> std::ops::Range<usize> {
        self.mono_offset[deg]..self.mono_offset[deg + 1]
    }

    /// Coordinate range covering all degrees in `lo..=hi`.
    pub fn coords_of_degrees(&self, lo: usize, hi: usize) -> std::ops::Range<usize> {
        self.mono_offset[lo] * self.ncomp..self.mono_offset[hi + 1] * self.ncomp
    }

    pub fn dim_degree(&self, deg: usize) -> usize {
        (self.mono_offset[deg + 1] - self.mono_offset[deg]) * self.ncomp
    }

    /// Dimension of the full jet space up to degree `deg`.
    pub fn dim_up_to(&self, deg: usize) -> usize {
        self.mono_offset[deg + 1] * self.ncomp
    }

    #[inline]
    pub fn mul_var(&self, mono: usize, var: usize) -> Option<usize> {
        self.mono_mul_var[mono][var]
    }

    pub fn mul_mono(&self, mono: usize, by: &ExponentVector) -> Option<usize> {
        let e = self.monos[mono].mul(by);
        if e.total_degree() > self.max_deg {
            None
        } else {
            self.mono_lookup(&e)
        }
    }

    /// The jet of `poly * e_comp`, truncated to `max_deg`.
    pub fn poly_jet(&self, poly: &MultiPolynomial, comp: usize) -> JetVec {
        let mut v: JetVec = poly
            .terms()
            .filter(|(e, _)| e.total_degree() <= self.max_deg)
            .map(|(e, c)| (self.coord(self.mono_id[e], comp), c))
            .collect();
        v.sort_unstable_by_key(|&(c, _)| c);
        v
    }

    /// The jet of `m * poly * e_comp` for a monomial multiplier.
    pub fn shifted_poly_jet(
        &self,
        m: &ExponentVector,
        poly: &MultiPolynomial,
        comp: usize,
    ) -> JetVec {
        let mut v: JetVec = poly
            .terms()
            .filter_map(|(e, c)| {
                let prod = e.mul(m);
                if prod.total_degree() > self.max_deg {
                    None
                } else {
                    Some((self.coord(self.mono_id[&prod], comp), c))
                }
            })
            .collect();
        v.sort_unstable_by_key(|&(c, _)| c);
        v
    }

    /// Multiplies a jet vector by a variable, dropping overflowing terms.
    pub fn jet_mul_var(&self, v: &JetVec, var: usize) -> JetVec {
        let mut out: JetVec = v
            .iter()
            .filter_map(|&(coord, c)| {
                self.mul_var(self.coord_mono(coord), var)
                    .map(|m| (self.coord(m, self.coord_comp(coord)), c))
            })
            .collect();
        out.sort_unstable_by_key(|&(c, _)| c);
        out
    }
}

fn enumerate_degree(
    nvars: usize,
    _deg: usize,
    current: &mut Vec<u16>,
    var: usize,
    remaining: u16,
    out: &mut Vec<ExponentVector>,
) {
    if var == nvars - 1 {
        current[var] = remaining;
        out.push(ExponentVector(current.clone()));
        current[var] = 0;
        return;
    }
    for e in 0..=remaining {
        current[var] = e;
        enumerate_degree(nvars, _deg, current, var + 1, remaining - e, out);
        current[var] = 0;
    }
}
