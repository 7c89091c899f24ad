//! Exact dense row-echelon machinery over `F_p`.
//!
//! Every length computation in the kernel bottoms out here: a subspace is a
//! reduced row-echelon basis ([`EchelonSpan`]), and lengths are differences of
//! ranks. Reduced echelon (each pivot 1 and alone in its column) makes
//! subspace equality literal row equality, which the stabilization detectors
//! rely on. All operations are deterministic: identical inputs produce
//! bit-identical bases.

use crate::field::{Field, FieldScalar};

/// A dense coordinate vector over a fixed index set.
pub type VectorOverField = Vec<FieldScalar>;

/// A linear map usable as a constraint in [`preimage_space`].
pub trait LinearOp {
    fn apply(&self, field: &Field, v: &VectorOverField) -> VectorOverField;
}

impl<F: Fn(&Field, &VectorOverField) -> VectorOverField> LinearOp for F {
    fn apply(&self, field: &Field, v: &VectorOverField) -> VectorOverField {
        self(field, v)
    }
}

/// Reduced row-echelon basis of a subspace of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchelonSpan {
    field: Field,
    ncols: usize,
    rows: Vec<VectorOverField>,
    pivots: Vec<usize>,
}

impl EchelonSpan {
    pub fn empty(field: Field, ncols: usize) -> Self {
        EchelonSpan {
            field,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[VectorOverField] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of pivots with column index in `range`. With columns ordered by
    /// degree this is a graded length.
    pub fn pivots_in(&self, range: std::ops::Range<usize>) -> usize {
        self.pivots.iter().filter(|&&p| range.contains(&p)).count()
    }

    /// Reduces `v` against the span in place; afterwards `v` has zeros in all
    /// pivot columns. Returns true if `v` reduced to zero.
    pub fn reduce_in_place(&self, v: &mut VectorOverField) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                let f = &self.field;
                for (x, &r) in v.iter_mut().zip(row) {
                    if r != 0 {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Inserts a vector, extending the basis if it is independent. Returns
    /// true when the rank grew.
    pub fn insert(&mut self, mut v: VectorOverField) -> bool {
        if self.reduce_in_place(&mut v) {
            return false;
        }
        let pc = v.iter().position(|&x| x != 0).unwrap();
        let inv = self.field.inv(v[pc]);
        for x in v.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        // Keep the basis fully reduced: clear the new pivot column above.
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, &nv) in row.iter_mut().zip(&v) {
                    if nv != 0 {
                        *x = self.field.sub(*x, self.field.mul(c, nv));
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, v);
        true
    }

    /// True iff `v` lies in the span.
    pub fn member(&self, v: &VectorOverField) -> bool {
        let mut w = v.clone();
        self.reduce_in_place(&mut w)
    }

    /// Union of two spans as a fresh echelon basis.
    pub fn sum(&self, other: &EchelonSpan) -> EchelonSpan {
        debug_assert_eq!(self.ncols, other.ncols);
        let mut out = self.clone();
        for row in &other.rows {
            out.insert(row.clone());
        }
        out
    }
}

/// Echelonizes a list of vectors.
pub fn span(
    field: Field,
    ncols: usize,
    vectors: impl IntoIterator<Item = VectorOverField>,
) -> EchelonSpan {
    let mut out = EchelonSpan::empty(field, ncols);
    for v in vectors {
        out.insert(v);
    }
    out
}

/// `dim((U + W) / W)`, the length of the image of `U` in the quotient by `W`.
pub fn dim_quotient(u: &EchelonSpan, w: &EchelonSpan) -> usize {
    debug_assert_eq!(u.ncols(), w.ncols());
    let mut acc = w.clone();
    let mut extra = 0;
    for row in u.rows() {
        if acc.insert(row.clone()) {
            extra += 1;
        }
    }
    extra
}

/// Basis of the nullspace of the matrix whose rows are `rows` (columns are
/// the unknowns). Rows may be given in any order.
pub fn nullspace(
    field: Field,
    ncols: usize,
    rows: impl IntoIterator<Item = VectorOverField>,
) -> Vec<VectorOverField> {
    let echelon = span(field, ncols, rows);
    let mut is_pivot = vec![false; ncols];
    for &p in echelon.pivots() {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (row, &pc) in echelon.rows().iter().zip(echelon.pivots()) {
            if row[free] != 0 {
                v[pc] = field.neg(row[free]);
            }
        }
        basis.push(v);
    }
    basis
}

/// The subspace `{v in W : op(v) in target for every op}`, computed by
/// solving the stacked linear system in the coordinates of `W`'s basis.
pub fn preimage_space(w: &EchelonSpan, ops: &[&dyn LinearOp], target: &EchelonSpan) -> EchelonSpan {
    let field = w.field;
    let k = w.rank();
    if ops.is_empty() || k == 0 {
        return w.clone();
    }
    // Condition rows live in the residual coordinates of `target`: reducing
    // op(basis vector) against `target` leaves exactly the failing part.
    let mut condition_cols: Vec<VectorOverField> = Vec::with_capacity(k);
    for row in w.rows() {
        let mut col = Vec::new();
        for op in ops {
            let mut image = op.apply(&field, row);
            target.reduce_in_place(&mut image);
            col.extend(image);
        }
        condition_cols.push(col);
    }
    let nconds = condition_cols[0].len();
    let rows = (0..nconds).map(|i| {
        condition_cols
            .iter()
            .map(|col| col[i])
            .collect::<VectorOverField>()
    });
    let kernel = nullspace(field, k, rows);
    let vectors = kernel.into_iter().map(|coeffs| {
        let mut v = vec![0u64; w.ncols()];
        for (c, row) in coeffs.iter().zip(w.rows()) {
            if *c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    if r != 0 {
                        *x = field.add(*x, field.mul(*c, r));
                    }
                }
            }
        }
        v
    });
    span(field, w.ncols(), vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::default_prime()
    }

    fn e(n: usize, i: usize) -> VectorOverField {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn standard_basis_and_dependent_pair() {
        let s = span(f(), 2, vec![e(2, 0), e(2, 1)]);
        assert_eq!(s.rank(), 2);
        let v = vec![3, 1];
        let s = span(f(), 2, vec![v.clone(), vec![6, 2]]);
        assert_eq!(s.rank(), 1);
        let s = span(f(), 4, Vec::<VectorOverField>::new());
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn dim_quotient_examples() {
        let u = span(f(), 3, vec![e(3, 0), e(3, 1)]);
        let w = span(f(), 3, vec![e(3, 1)]);
        assert_eq!(dim_quotient(&u, &w), 1);
        // Containment gives zero.
        assert_eq!(dim_quotient(&w, &u), 0);
    }

    #[test]
    fn member_examples() {
        let w = span(f(), 3, vec![e(3, 1)]);
        assert!(w.member(&vec![0, 0, 0]));
        assert!(!w.member(&e(3, 0)));
        let u = span(f(), 3, vec![e(3, 0)]);
        let uw = u.sum(&w);
        assert!(uw.member(&vec![5, 7, 0]));
    }

    #[test]
    fn preimage_kernel_example() {
        // W = F_p^2, map = projection on the first coordinate, target = 0.
        let field = f();
        let w = span(field, 2, vec![e(2, 0), e(2, 1)]);
        let target = EchelonSpan::empty(field, 2);
        let proj = |_: &Field, v: &VectorOverField| vec![v[0], 0];
        let pre = preimage_space(&w, &[&proj], &target);
        assert_eq!(pre.rank(), 1);
        assert!(pre.member(&e(2, 1)));
    }

    #[test]
    fn preimage_trivial_cases() {
        let field = f();
        let w = span(field, 3, vec![e(3, 0), e(3, 2)]);
        // No constraints: W itself.
        let pre = preimage_space(&w, &[], &EchelonSpan::empty(field, 3));
        assert_eq!(pre, w);
        // Full target: vacuous constraint.
        let full = span(field, 3, vec![e(3, 0), e(3, 1), e(3, 2)]);
        let id = |_: &Field, v: &VectorOverField| v.clone();
        let pre = preimage_space(&w, &[&id as &dyn LinearOp], &full);
        assert_eq!(pre, w);
    }
}
