//! The truncated model of `M = coker φ`.
//!
//! Everything is subspace calculus inside `F / n^{D+1} F`: the image of φ,
//! the powers `n^a F`, and their colons. Lengths of quotients of submodules
//! of `M` come out as rank differences. Two ingredients keep this exact and
//! fast:
//!
//! * a degree-leveled elimination of the image generators (the monomial
//!   multiples of the columns of φ), which yields the pivot staircase of
//!   `im φ` against the degree-then-lex coordinate order, one degree slice at
//!   a time. A Hilbert value is then `dim F_n` minus the pivot count of the
//!   slice;
//! * a normal-form table mapping every pivot coordinate to its canonical
//!   representative on non-pivot coordinates. Membership, colon kernels and
//!   quotient ranks all reduce to cheap table lookups plus small dense
//!   eliminations in residual coordinates.
//!
//! Quantities with no a-priori degree bound (`ℓ(M/JM)` and friends) are
//! computed with a growing cutoff; two equal consecutive values certify the
//! answer by Nakayama. Everything reported upstream is restricted to the
//! certified `safe_degree` window.

use crate::error::{Error, Result};
use crate::field::{Field, FieldScalar};
use crate::jets::{JetBasis, JetVec};
use crate::linalg::{self, EchelonSpan, VectorOverField};
use crate::poly::{determinant, MultiPolynomial, PolyOrder};

/// A square polynomial presentation matrix with positive entry orders and a
/// nonzero determinant; defines `M = coker φ` with `dim M = nvars - 1` and
/// `μ(M) = size`.
#[derive(Debug, Clone)]
pub struct Presentation {
    field: Field,
    nvars: usize,
    size: usize,
    entries: Vec<Vec<MultiPolynomial>>,
    det: MultiPolynomial,
    col_orders: Vec<usize>,
}

impl Presentation {
    /// Validates and builds a presentation from a row-major entry matrix.
    pub fn new(field: Field, entries: Vec<Vec<MultiPolynomial>>) -> Result<Self> {
        let size = entries.len();
        if size == 0 {
            return Err(Error::structural("empty presentation matrix"));
        }
        if entries.iter().any(|row| row.len() != size) {
            return Err(Error::structural("presentation matrix must be square"));
        }
        let nvars = entries[0][0].nvars();
        if nvars == 0 {
            return Err(Error::structural(
                "presentation needs at least one variable",
            ));
        }
        for row in &entries {
            for e in row {
                if e.nvars() != nvars {
                    return Err(Error::structural("mixed variable counts in matrix"));
                }
                if e.constant_term() != 0 {
                    return Err(Error::structural(
                        "presentation not minimal: entry with a unit term",
                    ));
                }
            }
        }
        let det = determinant(&field, &entries)?;
        if det.is_zero() {
            return Err(Error::structural(
                "det(phi) = 0: cokernel is not maximal Cohen-Macaulay",
            ));
        }
        let col_orders = (0..size)
            .map(|j| {
                (0..size)
                    .filter_map(|i| entries[i][j].order().finite())
                    .min()
                    .expect("nonzero determinant forces a nonzero entry per column")
            })
            .collect();
        Ok(Presentation {
            field,
            nvars,
            size,
            entries,
            det,
            col_orders,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// μ(M), the minimal number of generators.
    pub fn size(&self) -> usize {
        self.size
    }

    /// dim M = nvars - 1.
    pub fn dim(&self) -> usize {
        self.nvars - 1
    }

    pub fn entry(&self, row: usize, col: usize) -> &MultiPolynomial {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<MultiPolynomial>] {
        &self.entries
    }

    pub fn det(&self) -> &MultiPolynomial {
        &self.det
    }

    /// v(det φ).
    pub fn det_order(&self) -> usize {
        self.det.order().finite().expect("det is nonzero")
    }

    /// i(M): least entry order.
    pub fn min_order(&self) -> usize {
        *self.col_orders.iter().min().unwrap()
    }

    pub fn col_order(&self, j: usize) -> usize {
        self.col_orders[j]
    }

    /// Largest total degree appearing in any entry.
    pub fn max_entry_degree(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter_map(|e| e.degree())
            .max()
            .expect("nonzero determinant forces a nonzero entry")
    }
}

/// Degree window of a truncated computation. `trunc_degree` is the jet
/// truncation `D`; every reported quantity is restricted to degrees at most
/// `safe_degree = D - max(1, maxdeg φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationWindow {
    pub trunc_degree: usize,
    pub safe_degree: usize,
}

/// Hard cap for window growth; beyond this we report inconclusive.
pub const MAX_TRUNC_DEGREE: usize = 40;

impl TruncationWindow {
    pub fn for_degree(pres: &Presentation, trunc_degree: usize) -> Result<Self> {
        let margin = pres.max_entry_degree().max(1);
        if trunc_degree < margin + 4 {
            return Err(Error::structural(format!(
                "truncation degree {trunc_degree} too small for entries of degree {}",
                pres.max_entry_degree()
            )));
        }
        if trunc_degree > MAX_TRUNC_DEGREE + 2 {
            return Err(Error::structural(format!(
                "truncation degree {trunc_degree} beyond the cap {MAX_TRUNC_DEGREE}"
            )));
        }
        Ok(TruncationWindow {
            trunc_degree,
            safe_degree: trunc_degree - margin,
        })
    }

    /// Default window: `max(3·maxdeg(φ) + 6, 12)`, capped.
    pub fn default_for(pres: &Presentation) -> Result<Self> {
        let d = (3 * pres.max_entry_degree() + 6).clamp(12, MAX_TRUNC_DEGREE);
        Self::for_degree(pres, d)
    }

    /// Doubles the window, capped at [`MAX_TRUNC_DEGREE`]; `None` at the cap.
    pub fn grown(&self, pres: &Presentation) -> Option<Self> {
        if self.trunc_degree >= MAX_TRUNC_DEGREE {
            return None;
        }
        let d = (self.trunc_degree * 2).min(MAX_TRUNC_DEGREE);
        Some(Self::for_degree(pres, d).expect("grown window is larger"))
    }
}

/// A subspace of the truncated module presented co-truncated: it contains
/// `im φ` and all of `n^cutoff F`, so it is determined by the echelon span of
/// its residuals on non-pivot coordinates of degree below `cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoSpan {
    pub cutoff: usize,
    pub res: EchelonSpan,
}

/// One pivot of the leveled elimination: `row[lead] = 1`, supported on
/// degrees >= the pivot's own degree, with no other same-slice pivot
/// coordinate (slices are kept mutually reduced).
struct PivotRow {
    lead: usize,
    row: JetVec,
}

/// The filtration cache for one presentation and window; immutable once
/// built, safe for concurrent readers.
pub struct ModuleWindow {
    pres: Presentation,
    window: TruncationWindow,
    jets: JetBasis,
    /// Normal forms: `None` marks a non-pivot coordinate (its own normal
    /// form); a pivot coordinate maps to its representative on non-pivot
    /// coordinates of degree >= its own.
    nf: Vec<Option<Vec<(u32, u32)>>>,
    /// Rank of each non-pivot coordinate among all non-pivot coordinates;
    /// coordinate order makes ranks degree-contiguous.
    nonpivot_rank: Vec<usize>,
    /// H(n) for n = 0..=D.
    hilbert: Vec<usize>,
    /// HS(n) = ℓ(M/m^{n+1}M) = Σ_{k<=n} H(k).
    hs: Vec<usize>,
}

impl ModuleWindow {
    // Indexed loops here follow the degree bookkeeping; iterators would
    // obscure which slice is being eliminated.
    #[allow(clippy::needless_range_loop)]
    pub fn build(pres: &Presentation, window: TruncationWindow) -> Result<Self> {
        let d = window.trunc_degree;
        let jets = JetBasis::new(pres.nvars(), pres.size(), d);
        let field = *pres.field();
        let p = field.modulus();
        let ncoords = jets.ncoords();

        let mut scratch = vec![0u64; ncoords];
        let mut levels: Vec<Vec<PivotRow>> = (0..=d).map(|_| Vec::new()).collect();
        let mut carry: Vec<JetVec> = Vec::new();

        for s in 1..=d {
            let mut working = std::mem::take(&mut carry);
            // Fresh generators entering at level s: m · column_j with
            // deg m + order(column_j) = s. Their order is exactly s.
            for j in 0..pres.size() {
                let o = pres.col_order(j);
                if o > s {
                    continue;
                }
                for m in jets.monos_of_degree(s - o) {
                    let me = jets.mono_exponents(m).clone();
                    let mut gen: JetVec = Vec::new();
                    for i in 0..pres.size() {
                        let e = pres.entry(i, j);
                        if !e.is_zero() {
                            gen.extend(jets.shifted_poly_jet(&me, e, i));
                        }
                    }
                    gen.sort_unstable_by_key(|&(c, _)| c);
                    working.push(gen);
                }
            }
            let slice = jets.coords_of_degrees(s, s);
            let tail_start = slice.start;
            for row in working {
                for &(c, v) in &row {
                    scratch[c] += v;
                }
                for pv in &levels[s] {
                    let c = scratch[pv.lead] % p;
                    if c != 0 {
                        let mult = p - c;
                        for &(idx, val) in &pv.row {
                            scratch[idx] += mult * val;
                        }
                    }
                }
                let lead = slice.clone().find(|&c| !scratch[c].is_multiple_of(p));
                match lead {
                    Some(lead) => {
                        let inv = field.inv(scratch[lead] % p);
                        let mut nrow: JetVec = Vec::new();
                        for c in tail_start..ncoords {
                            let v = scratch[c] % p;
                            if v != 0 {
                                nrow.push((c, field.mul(v, inv)));
                            }
                        }
                        // Keep slice-s pivots mutually reduced so queries can
                        // apply them in any order.
                        for pv in levels[s].iter_mut() {
                            if let Ok(at) = pv.row.binary_search_by_key(&lead, |&(c, _)| c) {
                                let c = pv.row[at].1;
                                pv.row = sparse_sub(&field, &pv.row, &nrow, c);
                            }
                        }
                        levels[s].push(PivotRow { lead, row: nrow });
                    }
                    None => {
                        let mut rest: JetVec = Vec::new();
                        for c in slice.end..ncoords {
                            let v = scratch[c] % p;
                            if v != 0 {
                                rest.push((c, v));
                            }
                        }
                        if !rest.is_empty() {
                            carry.push(rest);
                        }
                    }
                }
                for x in scratch[tail_start..].iter_mut() {
                    *x = 0;
                }
            }
        }

        let mut is_pivot = vec![false; ncoords];
        for lvl in &levels {
            for pv in lvl {
                is_pivot[pv.lead] = true;
            }
        }
        let mut hilbert = Vec::with_capacity(d + 1);
        let mut hs = Vec::with_capacity(d + 1);
        let mut acc = 0usize;
        for n in 0..=d {
            let h = jets.dim_degree(n) - levels[n].len();
            acc += h;
            hilbert.push(h);
            hs.push(acc);
        }
        let mut nonpivot_rank = vec![usize::MAX; ncoords];
        let mut nonpivot_coord = Vec::new();
        for c in 0..ncoords {
            if !is_pivot[c] {
                nonpivot_rank[c] = nonpivot_coord.len();
                nonpivot_coord.push(c);
            }
        }
        let rank = nonpivot_coord.len();

        // Normal forms, highest degree first: a pivot's tail references only
        // same-slice non-pivots and strictly higher degrees.
        let mut nf: Vec<Option<Vec<(u32, u32)>>> = vec![None; ncoords];
        let mut acc_dense = vec![0u64; rank];
        for s in (1..=d).rev() {
            for pv in &levels[s] {
                let mut touched: Vec<usize> = Vec::new();
                for &(c, v) in &pv.row {
                    if c == pv.lead {
                        continue;
                    }
                    let neg = p - v;
                    match &nf[c] {
                        None => {
                            let r = nonpivot_rank[c];
                            if acc_dense[r] == 0 {
                                touched.push(r);
                            }
                            acc_dense[r] += neg;
                        }
                        Some(sub) => {
                            for &(c2, v2) in sub {
                                let r = nonpivot_rank[c2 as usize];
                                if acc_dense[r] == 0 {
                                    touched.push(r);
                                }
                                acc_dense[r] += neg * v2 as u64;
                            }
                        }
                    }
                }
                touched.sort_unstable();
                let mut out = Vec::with_capacity(touched.len());
                for &r in &touched {
                    let v = acc_dense[r] % p;
                    acc_dense[r] = 0;
                    if v != 0 {
                        out.push((nonpivot_coord[r] as u32, v as u32));
                    }
                }
                nf[pv.lead] = Some(out);
            }
        }

        Ok(ModuleWindow {
            pres: pres.clone(),
            window,
            jets,
            nf,
            nonpivot_rank,
            hilbert,
            hs,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn jets(&self) -> &JetBasis {
        &self.jets
    }

    pub fn field(&self) -> &Field {
        self.pres.field()
    }

    pub fn safe_degree(&self) -> usize {
        self.window.safe_degree
    }

    fn check_window(&self, n: usize, what: &str) -> Result<()> {
        if n > self.window.safe_degree {
            return Err(Error::truncation(format!(
                "{what} at degree {n} exceeds certified window {}",
                self.window.safe_degree
            )));
        }
        Ok(())
    }

    /// `H(n) = ℓ(m^n M / m^{n+1} M)`.
    pub fn hilbert_value(&self, n: usize) -> Result<usize> {
        self.check_window(n, "Hilbert value")?;
        Ok(self.hilbert[n])
    }

    /// `HS(n) = ℓ(M / m^{n+1} M)`.
    pub fn hilbert_samuel(&self, n: usize) -> Result<usize> {
        self.check_window(n, "Hilbert-Samuel value")?;
        Ok(self.hs[n])
    }

    /// All certified Hilbert values `H(0..=safe_degree)`.
    pub fn hilbert_values(&self) -> &[usize] {
        &self.hilbert[..=self.window.safe_degree]
    }

    fn hs_at(&self, n: isize) -> usize {
        if n < 0 {
            0
        } else {
            self.hs[n as usize]
        }
    }

    /// Residual (normal form) of a jet vector on non-pivot coordinates of
    /// degree <= `bound`, as a dense vector indexed by non-pivot rank.
    pub fn residual(&self, v: &JetVec, bound: usize) -> VectorOverField {
        let p = self.field().modulus();
        let len = self.hs_at(bound as isize);
        let mut acc = vec![0u64; len];
        for &(c, val) in v {
            if self.jets.coord_degree(c) > bound {
                continue;
            }
            match &self.nf[c] {
                None => acc[self.nonpivot_rank[c]] += val,
                Some(sub) => {
                    for &(c2, v2) in sub {
                        let r = self.nonpivot_rank[c2 as usize];
                        if r < len {
                            acc[r] += val * v2 as u64;
                        }
                    }
                }
            }
        }
        for x in acc.iter_mut() {
            *x %= p;
        }
        acc
    }

    /// True iff the jet vector lies in `n^a F + im φ` modulo the truncation.
    pub fn member_power_plus_image(&self, v: &JetVec, a: usize) -> bool {
        if a == 0 {
            return true;
        }
        self.residual(v, a - 1).iter().all(|&x| x == 0)
    }

    /// Window-certified check that `g` annihilates `M`: `g·e_j ∈ im φ`
    /// modulo `n^{D+1}F` for every generator.
    pub fn annihilates(&self, g: &MultiPolynomial) -> bool {
        (0..self.pres.size()).all(|j| {
            let jet = self.jets.poly_jet(g, j);
            self.residual(&jet, self.window.trunc_degree)
                .iter()
                .all(|&x| x == 0)
        })
    }

    /// Echelon span of residuals of the given jets at degree `bound`.
    pub fn res_span(&self, gens: impl IntoIterator<Item = JetVec>, bound: usize) -> EchelonSpan {
        let len = self.hs_at(bound as isize);
        let mut out = EchelonSpan::empty(*self.field(), len);
        for g in gens {
            out.insert(self.residual(&g, bound));
        }
        out
    }

    /// The co-truncated view of `n^a F + im φ`.
    pub fn power_co_span(&self, a: usize) -> CoSpan {
        CoSpan {
            cutoff: a,
            res: EchelonSpan::empty(*self.field(), self.hs_at(a as isize - 1)),
        }
    }

    /// Jets of `x_l · (monomial, component)` for every form, all monomials
    /// with degree in `lo..=hi`, all components.
    fn form_multiple_gens(&self, forms: &[MultiPolynomial], lo: usize, hi: usize) -> Vec<JetVec> {
        let mut out = Vec::new();
        let hi = hi.min(self.window.trunc_degree);
        for form in forms {
            for deg in lo..=hi {
                for m in self.jets.monos_of_degree(deg) {
                    let me = self.jets.mono_exponents(m).clone();
                    for comp in 0..self.pres.size() {
                        out.push(self.jets.shifted_poly_jet(&me, form, comp));
                    }
                }
            }
        }
        out
    }

    /// `ℓ(m^{n+1}M / J m^n M)` for `J` generated by the given linear forms,
    /// certified by cutoff stabilization.
    pub fn power_mod_j_len(&self, forms: &[MultiPolynomial], n: usize) -> Result<usize> {
        self.check_window(n + 1, "submodule length")?;
        let mut prev: Option<usize> = None;
        let mut cutoff = n + 2;
        loop {
            if cutoff - 1 > self.window.safe_degree {
                return Err(Error::inconclusive(format!(
                    "ℓ(m^{}M/Jm^{}M) did not stabilize inside the window",
                    n + 1,
                    n
                )));
            }
            let gens = self.form_multiple_gens(forms, n, cutoff - 2);
            let rank = self.res_span(gens, cutoff - 1).rank();
            let len = self.hs[cutoff - 1] - self.hs[n] - rank;
            if prev == Some(len) {
                return Ok(len);
            }
            prev = Some(len);
            cutoff += 1;
        }
    }

    /// `ℓ(M / JM)`, certified by cutoff stabilization.
    pub fn module_mod_j_len(&self, forms: &[MultiPolynomial]) -> Result<usize> {
        let mut prev: Option<usize> = None;
        let mut cutoff = 2;
        loop {
            if cutoff - 1 > self.window.safe_degree {
                return Err(Error::inconclusive(
                    "ℓ(M/JM) did not stabilize inside the window",
                ));
            }
            let gens = self.form_multiple_gens(forms, 0, cutoff - 2);
            let rank = self.res_span(gens, cutoff - 1).rank();
            let len = self.hs[cutoff - 1] - rank;
            if prev == Some(len) {
                return Ok(len);
            }
            prev = Some(len);
            cutoff += 1;
        }
    }

    /// `ℓ(M / (m^{n+1}M + JM))`; exact at cutoff `n+1`, no stabilization.
    pub fn module_mod_j_and_power_len(&self, forms: &[MultiPolynomial], n: usize) -> Result<usize> {
        self.check_window(n, "length")?;
        let gens = if n == 0 {
            Vec::new()
        } else {
            self.form_multiple_gens(forms, 0, n - 1)
        };
        let rank = self.res_span(gens, n).rank();
        Ok(self.hs[n] - rank)
    }

    /// The sequence `ℓ(m^{n+1}M / J m^n M)` for `n = 0..=lmax`.
    pub fn submodule_lengths(&self, forms: &[MultiPolynomial], lmax: usize) -> Result<Vec<usize>> {
        (0..=lmax).map(|n| self.power_mod_j_len(forms, n)).collect()
    }

    /// red(M): least `n` with `m^{n+1}M = J m^n M`.
    pub fn reduction_number(&self, forms: &[MultiPolynomial]) -> Result<usize> {
        for n in 0..=self.window.safe_degree {
            if n + 1 > self.window.safe_degree {
                break;
            }
            if self.power_mod_j_len(forms, n)? == 0 {
                return Ok(n);
            }
        }
        Err(Error::inconclusive(
            "reduction number not reached inside the window",
        ))
    }

    /// Valabrega-Valla lengths `ℓ((m^{n+1}M ∩ JM) / J m^n M)` for
    /// `n = 0..=nmax`, via the exact decomposition
    /// `vv_n = ℓ(m^{n+1}M/Jm^nM) - ℓ(M/JM) + ℓ(M/(m^{n+1}M + JM))`.
    pub fn vv_lengths(&self, forms: &[MultiPolynomial], nmax: usize) -> Result<Vec<usize>> {
        let mod_j = self.module_mod_j_len(forms)?;
        (0..=nmax)
            .map(|n| {
                let rho = self.power_mod_j_len(forms, n)?;
                let upper = self.module_mod_j_and_power_len(forms, n)?;
                Ok(rho + upper - mod_j)
            })
            .collect()
    }

    /// `ℓ(m^k M / (m^{k+1}M + J m^{k-1} M))`: the degree-`k` piece of
    /// `G(M)` modulo the initial forms of `J`. Exact at cutoff `k+1`.
    pub fn graded_piece_mod_j(&self, forms: &[MultiPolynomial], k: usize) -> Result<usize> {
        self.check_window(k, "graded piece")?;
        if k == 0 {
            return Ok(self.pres.size());
        }
        let gens = self.form_multiple_gens(forms, k - 1, k - 1);
        let rank = self.res_span(gens, k).rank();
        Ok(self.hilbert[k] - rank)
    }

    /// Colon space `{v ∈ F_{<=domain_deg} : g·v ∈ target for all g}` as a
    /// canonical echelon span over the jet coordinates up to `domain_deg`.
    pub fn colon_space(
        &self,
        multipliers: &[MultiPolynomial],
        target: &CoSpan,
        domain_deg: usize,
    ) -> EchelonSpan {
        let field = *self.field();
        let ncols = self.jets.dim_up_to(domain_deg);
        let bound = target.cutoff - 1;
        let mut condition_cols: Vec<VectorOverField> = Vec::with_capacity(ncols);
        for coord in 0..ncols {
            let mono = self.jets.coord_mono(coord);
            let comp = self.jets.coord_comp(coord);
            let me = self.jets.mono_exponents(mono).clone();
            let mut col = Vec::new();
            for g in multipliers {
                let image = self.jets.shifted_poly_jet(&me, g, comp);
                let mut res = self.residual(&image, bound);
                target.res.reduce_in_place(&mut res);
                col.extend(res);
            }
            condition_cols.push(col);
        }
        let nconds = condition_cols.first().map_or(0, |c| c.len());
        let rows = (0..nconds).map(|i| {
            condition_cols
                .iter()
                .map(|c| c[i])
                .collect::<VectorOverField>()
        });
        let kernel = linalg::nullspace(field, ncols, rows);
        linalg::span(field, ncols, kernel)
    }

    /// `b_n(x, M) = ℓ((m^{n+1}M : x) / m^n M)` for a linear form `x`.
    pub fn colon_length(&self, x: &MultiPolynomial, n: usize) -> Result<usize> {
        if x.order() != PolyOrder::Finite(1) {
            return Err(Error::structural("colon form must have order 1"));
        }
        self.check_window(n + 1, "colon length")?;
        if n == 0 {
            // (mM : x) ⊆ M, so the quotient by m^0 M = M is trivially zero.
            return Ok(0);
        }
        self.colon_quotient_len(std::slice::from_ref(x), n + 1)
    }

    /// `ℓ((m^a M : (xs)) / m^{a-1} M)` for linear forms `xs`.
    pub fn colon_quotient_len(&self, xs: &[MultiPolynomial], a: usize) -> Result<usize> {
        self.check_window(a, "colon length")?;
        if a < 2 {
            return Ok(0);
        }
        let target = self.power_co_span(a);
        let kernel = self.colon_space(xs, &target, a - 2);
        let ambient = self.jets.dim_up_to(a - 2);
        Ok(kernel.rank() - (ambient - self.hs[a - 2]))
    }

    /// One term `(m^{n+i}M : m^i)` of the Ratliff-Rush union, as a canonical
    /// echelon span over jet coordinates `< n`.
    pub fn power_colon_term(&self, n: usize, i: usize) -> EchelonSpan {
        assert!(n >= 1, "Ratliff-Rush filtration starts at n = 1");
        if i == 0 {
            let one = MultiPolynomial::constant(self.pres.nvars(), 1);
            return self.colon_space(&[one], &self.power_co_span(n), n - 1);
        }
        let monos: Vec<MultiPolynomial> = self
            .jets
            .monos_of_degree(i)
            .map(|m| {
                MultiPolynomial::from_terms(
                    self.pres.nvars(),
                    self.field(),
                    [(self.jets.mono_exponents(m).clone(), 1)],
                )
            })
            .collect();
        self.colon_space(&monos, &self.power_co_span(n + i), n - 1)
    }

    /// Length of a colon span against `m^n M`: the rank in excess of
    /// `π_{<n}(n^n F + im φ)`.
    pub fn span_len_over_power(&self, space: &EchelonSpan, n: usize) -> usize {
        let ambient = self.jets.dim_up_to(n - 1);
        space.rank() - (ambient - self.hs[n - 1])
    }

    /// Builds the co-truncated view of a colon space (echelon over jet
    /// coordinates `< cutoff`).
    pub fn co_span_of(&self, cutoff: usize, space: &EchelonSpan) -> CoSpan {
        let jet_rows = space.rows().iter().map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(c, &v)| (c, v))
                .collect::<JetVec>()
        });
        CoSpan {
            cutoff,
            res: self.res_span(jet_rows, cutoff - 1),
        }
    }
}

fn sparse_sub(field: &Field, a: &JetVec, b: &JetVec, coeff: FieldScalar) -> JetVec {
    // a - coeff * b, both sorted by coordinate.
    let mut out = JetVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = field.sub(va, field.mul(coeff, vb));
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(_), Some(&(cb, vb))) => {
                let v = field.neg(field.mul(coeff, vb));
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (None, Some(&(cb, vb))) => {
                let v = field.neg(field.mul(coeff, vb));
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => break,
        }
    }
    out
}

/// Dense one-shot truncation of `im φ` at degree `d`: the echelon span of
/// all monomial multiples of the columns, over the full jet coordinates.
/// This is the slow, obviously-correct route; the leveled elimination above
/// must agree with it and the test suite checks that it does.
pub fn image_span(pres: &Presentation, d: usize) -> Result<EchelonSpan> {
    if d < pres.max_entry_degree() {
        return Err(Error::truncation(format!(
            "truncation degree {d} below max entry degree {}",
            pres.max_entry_degree()
        )));
    }
    let jets = JetBasis::new(pres.nvars(), pres.size(), d);
    let mut vectors = Vec::new();
    for j in 0..pres.size() {
        let o = pres.col_order(j);
        for deg in 0..=(d - o) {
            for m in jets.monos_of_degree(deg) {
                let me = jets.mono_exponents(m).clone();
                let mut v = vec![0u64; jets.ncoords()];
                for i in 0..pres.size() {
                    for (c, val) in jets.shifted_poly_jet(&me, pres.entry(i, j), i) {
                        v[c] = pres.field().add(v[c], val);
                    }
                }
                vectors.push(v);
            }
        }
    }
    Ok(linalg::span(*pres.field(), jets.ncoords(), vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn window(p: &Presentation) -> ModuleWindow {
        ModuleWindow::build(p, TruncationWindow::default_for(p).unwrap()).unwrap()
    }

    #[test]
    fn rejects_unit_entries_and_zero_det() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        let unit = parse_polynomial(&field, &names, "1 + x").unwrap();
        let x = parse_polynomial(&field, &names, "x").unwrap();
        let y = parse_polynomial(&field, &names, "y").unwrap();
        assert!(Presentation::new(
            field,
            vec![vec![unit.clone(), x.clone()], vec![x.clone(), y.clone()]]
        )
        .is_err());
        // [[x, y], [x, y]] has det 0.
        assert!(Presentation::new(field, vec![vec![x.clone(), y.clone()], vec![x, y]]).is_err());
    }

    #[test]
    fn principal_column_image_span() {
        // φ = [x] over two variables, D = 2: span{x, x^2, xy}, 3-dimensional.
        let p = pres(&["x", "y"], &[&["x"]]);
        let s = image_span(&p, 2).unwrap();
        assert_eq!(s.rank(), 3);
    }

    #[test]
    fn diagonal_order_bound() {
        // Every multiple of a y^a column has degree >= a: nothing below a.
        let p = pres(&["x", "y"], &[&["y^3"]]);
        let s = image_span(&p, 4).unwrap();
        let jets = JetBasis::new(2, 1, 4);
        assert_eq!(s.pivots_in(0..jets.coords_of_degrees(0, 2).end), 0);
    }

    #[test]
    fn image_span_rank_case_1_4() {
        // Frozen from the dense oracle: the truncation of im φ at degree 4
        // has rank 17, consistent with ℓ(M/n^5 M) = 2+2+3+3+3 = 13 in a
        // 30-dimensional ambient space.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let s = image_span(&p, 4).unwrap();
        assert_eq!(s.rank(), 17);
        let jets = JetBasis::new(2, 2, 4);
        assert_eq!(jets.ncoords() - s.rank(), 13);
    }

    #[test]
    fn hilbert_values_match_paper_cases() {
        // Case (1)(3): H = 2, 3, 3.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
        let w = window(&p);
        assert_eq!(w.hilbert_value(0).unwrap(), 2);
        assert_eq!(w.hilbert_value(1).unwrap(), 3);
        assert_eq!(w.hilbert_value(2).unwrap(), 3);
        // Case (1)(4): H = 2, 2, 3 because x·e2 = y^2·e1.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        assert_eq!(w.hilbert_value(0).unwrap(), 2);
        assert_eq!(w.hilbert_value(1).unwrap(), 2);
        assert_eq!(w.hilbert_value(2).unwrap(), 3);
        assert_eq!(w.hilbert_value(3).unwrap(), 3);
    }

    #[test]
    fn hilbert_zero_is_mu() {
        for rows in [
            vec![vec!["y^2", "0"], vec!["x", "y"]],
            vec![vec!["x", "y"], vec!["y", "x"]],
        ] {
            let rows: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
            let p = pres(&["x", "y"], &rows);
            let w = window(&p);
            assert_eq!(w.hilbert_value(0).unwrap(), p.size());
        }
    }

    #[test]
    fn hilbert_matches_dense_oracle() {
        // Leveled elimination vs one-shot dense elimination.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        let d = 6;
        let dense = image_span(&p, d).unwrap();
        let jets = JetBasis::new(2, 2, d);
        for n in 0..=d.min(w.safe_degree()) {
            let pivots = dense.pivots_in(jets.coords_of_degrees(n, n));
            assert_eq!(w.hilbert_value(n).unwrap(), jets.dim_degree(n) - pivots);
        }
    }

    #[test]
    fn telescoping_lengths() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
        let w = window(&p);
        let upto = w.safe_degree();
        let total: usize = (0..=upto).map(|n| w.hilbert_value(n).unwrap()).sum();
        assert_eq!(total, w.hilbert_samuel(upto).unwrap());
    }

    #[test]
    fn colon_lengths_case_1_4() {
        // b(z) = z against a generic linear form; identically 0 against a
        // form that is regular on G(M).
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 7*y").unwrap();
        assert_eq!(w.colon_length(&x, 0).unwrap(), 0);
        assert_eq!(w.colon_length(&x, 1).unwrap(), 1);
        assert_eq!(w.colon_length(&x, 2).unwrap(), 0);
        assert_eq!(w.colon_length(&x, 3).unwrap(), 0);
    }

    #[test]
    fn colon_lengths_vanish_for_regular_case() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        let p = pres(&["x", "y"], &[&["x"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 3*y").unwrap();
        for n in 0..4 {
            assert_eq!(w.colon_length(&x, n).unwrap(), 0);
        }
    }

    #[test]
    fn reduction_number_examples() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        // Ulrich: φ = diag(y, y, y), mM = JM.
        let p = pres(
            &["x", "y"],
            &[&["y", "0", "0"], &["0", "y", "0"], &["0", "0", "y"]],
        );
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 11*y").unwrap();
        let rho = w.submodule_lengths(std::slice::from_ref(&x), 2).unwrap();
        assert_eq!(rho, vec![0, 0, 0]);
        assert_eq!(w.reduction_number(&[x]).unwrap(), 0);

        // Case (1)(3): minimal multiplicity, ρ = (1, 0, 0), red = 1.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 5*y").unwrap();
        let rho = w.submodule_lengths(std::slice::from_ref(&x), 2).unwrap();
        assert_eq!(rho, vec![1, 0, 0]);
        assert_eq!(w.reduction_number(&[x]).unwrap(), 1);
    }

    #[test]
    fn vv_lengths_vanish_in_cm_strata() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        // Ulrich.
        let p = pres(&["x", "y"], &[&["y", "0"], &["0", "y"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 2*y").unwrap();
        assert_eq!(w.vv_lengths(&[x], 3).unwrap(), vec![0, 0, 0, 0]);
        // e = μ·i stratum: diag(y^2, y^2).
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["0", "y^2"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 9*y").unwrap();
        assert_eq!(w.vv_lengths(&[x], 3).unwrap(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn power_colon_terms_ascend_case_1_4() {
        // The union terms (m^{1+i}M : m^i) grow from mM to m̃M, which picks
        // up the class of e2.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        let c0 = w.power_colon_term(1, 0);
        let c1 = w.power_colon_term(1, 1);
        assert_eq!(w.span_len_over_power(&c0, 1), 0);
        assert_eq!(w.span_len_over_power(&c1, 1), 1);
        let mut e2 = vec![0u64; w.jets().dim_up_to(0)];
        e2[w.jets().coord(0, 1)] = 1;
        assert!(c1.member(&e2));
        assert!(!c0.member(&e2));
    }

    #[test]
    fn graded_pieces_for_series_constraint() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        // Ulrich: mM = JM gives series (μ, 0, 0).
        let p = pres(&["x", "y"], &[&["y", "0"], &["0", "y"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 8*y").unwrap();
        let forms = [x];
        assert_eq!(w.graded_piece_mod_j(&forms, 0).unwrap(), 2);
        assert_eq!(w.graded_piece_mod_j(&forms, 1).unwrap(), 0);
        assert_eq!(w.graded_piece_mod_j(&forms, 2).unwrap(), 0);
        // diag(y^2, y^2): series 2 + 2z + 0z^2.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["0", "y^2"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 4*y").unwrap();
        let forms = [x];
        assert_eq!(w.graded_piece_mod_j(&forms, 0).unwrap(), 2);
        assert_eq!(w.graded_piece_mod_j(&forms, 1).unwrap(), 2);
        assert_eq!(w.graded_piece_mod_j(&forms, 2).unwrap(), 0);
        // Case (1)(4): series 2 + z + z^2.
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        let x = parse_polynomial(&field, &names, "x + 6*y").unwrap();
        let forms = [x];
        assert_eq!(w.graded_piece_mod_j(&forms, 1).unwrap(), 1);
        assert_eq!(w.graded_piece_mod_j(&forms, 2).unwrap(), 1);
    }

    #[test]
    fn growing_window_changes_nothing_certified() {
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w1 = window(&p);
        let bigger = TruncationWindow::for_degree(&p, w1.window().trunc_degree + 2).unwrap();
        let w2 = ModuleWindow::build(&p, bigger).unwrap();
        for n in 0..=w1.safe_degree() {
            assert_eq!(w1.hilbert_value(n).unwrap(), w2.hilbert_value(n).unwrap());
        }
    }

    #[test]
    fn queries_beyond_the_window_are_truncation_errors() {
        let field = Field::default_prime();
        let names = vec!["x".to_string(), "y".to_string()];
        let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
        let w = window(&p);
        let beyond = w.safe_degree() + 1;
        assert!(matches!(
            w.hilbert_value(beyond),
            Err(Error::Truncation(_))
        ));
        let x = parse_polynomial(&field, &names, "x + 2*y").unwrap();
        assert!(matches!(
            w.colon_length(&x, beyond),
            Err(Error::Truncation(_))
        ));
        // image_span demands a window at least as deep as the entries.
        assert!(matches!(image_span(&p, 1), Err(Error::Truncation(_))));
    }
}
