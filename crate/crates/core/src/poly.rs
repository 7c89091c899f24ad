//! Sparse multivariate polynomials over `F_p`.
//!
//! Terms are kept in a `BTreeMap` keyed by [`ExponentVector`], whose ordering
//! is total degree first, then lexicographic on the exponent tuple. That makes
//! every polynomial canonical by construction: no zero coefficients are
//! stored and iteration order is deterministic.
//!
//! The only piece of "geometry" that lives here is the order (valuation)
//! `v(f)` = least total degree of a term, and the two coordinate moves the
//! quotient tower needs: substitution by an invertible linear change and
//! setting the last variable to zero.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldScalar};

/// Exponent tuple of a monomial; length equals the ambient variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<u16>);

impl ExponentVector {
    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    /// The exponent tuple of a single variable.
    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        ExponentVector(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.0.len(), other.0.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of a polynomial: `v(0)` is the infinite sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PolyOrder {
    Finite(usize),
    Infinite,
}

impl PolyOrder {
    pub fn finite(self) -> Option<usize> {
        match self {
            PolyOrder::Finite(n) => Some(n),
            PolyOrder::Infinite => None,
        }
    }
}

impl fmt::Display for PolyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyOrder::Finite(n) => write!(f, "{n}"),
            PolyOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// A sparse multivariate polynomial in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPolynomial {
    nvars: usize,
    terms: std::collections::BTreeMap<ExponentVector, FieldScalar>,
}

impl MultiPolynomial {
    pub fn zero(nvars: usize) -> Self {
        MultiPolynomial {
            nvars,
            terms: Default::default(),
        }
    }

    pub fn constant(nvars: usize, c: FieldScalar) -> Self {
        let mut p = Self::zero(nvars);
        if c != 0 {
            p.terms.insert(ExponentVector::zero(nvars), c);
        }
        p
    }

    pub fn variable(nvars: usize, idx: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(ExponentVector::var(nvars, idx), 1);
        p
    }

    /// Builds from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        field: &Field,
        terms: impl IntoIterator<Item = (ExponentVector, FieldScalar)>,
    ) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            debug_assert_eq!(e.nvars(), nvars);
            p.add_term(field, e, c % field.modulus());
        }
        p
    }

    /// A linear form from its coefficient vector.
    pub fn linear_form(field: &Field, coeffs: &[FieldScalar]) -> Self {
        let nvars = coeffs.len();
        Self::from_terms(
            nvars,
            field,
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (ExponentVector::var(nvars, i), c)),
        )
    }

    fn add_term(&mut self, field: &Field, e: ExponentVector, c: FieldScalar) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, FieldScalar)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `v(f)`: least total degree among the terms, infinite for zero.
    pub fn order(&self) -> PolyOrder {
        self.terms
            .keys()
            .map(|e| e.total_degree())
            .min()
            .map_or(PolyOrder::Infinite, PolyOrder::Finite)
    }

    /// Largest total degree among the terms; zero polynomial gives `None`.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.total_degree()).max()
    }

    /// Coefficient of the constant term.
    pub fn constant_term(&self) -> FieldScalar {
        self.terms
            .get(&ExponentVector::zero(self.nvars))
            .copied()
            .unwrap_or(0)
    }

    fn check_nvars(&self, other: &MultiPolynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::structural(format!(
                "mismatched variable counts: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, field: &Field, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(field, e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, field: &Field, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(field, e.clone(), field.neg(c));
        }
        Ok(out)
    }

    pub fn mul(&self, field: &Field, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        self.check_nvars(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(field, ea.mul(eb), field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, field: &Field, c: FieldScalar) -> MultiPolynomial {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, a) in self.terms() {
            out.terms.insert(e.clone(), field.mul(a, c));
        }
        out
    }

    /// Substitutes each variable by the linear form given by `change`.
    pub fn apply_change(&self, field: &Field, change: &LinearChange) -> Result<MultiPolynomial> {
        if change.nvars() != self.nvars {
            return Err(Error::structural(
                "change of coordinates has wrong variable count",
            ));
        }
        // Powers of the substituted variables, computed on demand.
        let mut powers: Vec<Vec<MultiPolynomial>> = (0..self.nvars)
            .map(|i| {
                vec![
                    MultiPolynomial::constant(self.nvars, 1),
                    change.image(field, i),
                ]
            })
            .collect();
        let mut out = Self::zero(self.nvars);
        for (e, c) in self.terms() {
            let mut term = MultiPolynomial::constant(self.nvars, c);
            for (var, &exp) in e.0.iter().enumerate() {
                let exp = exp as usize;
                while powers[var].len() <= exp {
                    let next = powers[var]
                        .last()
                        .unwrap()
                        .mul(field, &powers[var][1])
                        .unwrap();
                    powers[var].push(next);
                }
                term = term.mul(field, &powers[var][exp])?;
            }
            for (e, c) in term.terms() {
                out.add_term(field, e.clone(), c);
            }
        }
        Ok(out)
    }

    /// Sets the last variable to zero and drops it; realizes the quotient by
    /// a linear form once coordinates put that form last.
    pub fn eliminate_last(&self) -> Result<MultiPolynomial> {
        if self.nvars == 0 {
            return Err(Error::structural("cannot eliminate a variable: none left"));
        }
        let nvars = self.nvars - 1;
        let mut out = Self::zero(nvars);
        for (e, c) in self.terms() {
            if e.0[nvars] == 0 {
                out.terms.insert(ExponentVector(e.0[..nvars].to_vec()), c);
            }
        }
        Ok(out)
    }

    /// Renames variables: new variable `i` is old variable `map[i]`. Used to
    /// lift forms back up the quotient tower.
    pub fn lift_vars(&self, new_nvars: usize, map: &[usize]) -> MultiPolynomial {
        debug_assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(new_nvars);
        for (e, c) in self.terms() {
            let mut ne = vec![0u16; new_nvars];
            for (i, &exp) in e.0.iter().enumerate() {
                ne[map[i]] += exp;
            }
            out.terms.insert(ExponentVector(ne), c);
        }
        out
    }

    /// Renders with the given variable names, e.g. `y^2 + 3*x*y`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            let mut factors = Vec::new();
            for (i, &exp) in e.0.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], exp)),
                }
            }
            if factors.is_empty() {
                parts.push(format!("{c}"));
            } else if c == 1 {
                parts.push(factors.join("*"));
            } else {
                parts.push(format!("{}*{}", c, factors.join("*")));
            }
        }
        parts.join(" + ")
    }
}

/// An invertible linear change of coordinates, stored as the substitution
/// matrix: old variable `i` maps to the linear form with coefficients
/// `matrix[i]` in the new variables.
#[derive(Debug, Clone)]
pub struct LinearChange {
    matrix: Vec<Vec<FieldScalar>>,
}

impl LinearChange {
    pub fn new(field: &Field, matrix: Vec<Vec<FieldScalar>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::structural("change of coordinates must be square"));
        }
        let change = LinearChange { matrix };
        if !change.is_invertible(field) {
            return Err(Error::structural("singular change of coordinates"));
        }
        Ok(change)
    }

    pub fn identity(nvars: usize) -> Self {
        LinearChange {
            matrix: (0..nvars)
                .map(|i| (0..nvars).map(|j| u64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.matrix.len()
    }

    /// The image of old variable `i` as a polynomial in the new variables.
    fn image(&self, field: &Field, i: usize) -> MultiPolynomial {
        let _ = field;
        MultiPolynomial::linear_form(field, &self.matrix[i])
    }

    fn is_invertible(&self, field: &Field) -> bool {
        let n = self.nvars();
        let mut m = self.matrix.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = field.inv(m[rank][col]);
            for x in m[rank].iter_mut() {
                *x = field.mul(*x, inv);
            }
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let f = row[col];
                    for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                        *x = field.sub(*x, field.mul(f, pv));
                    }
                }
            }
            rank += 1;
        }
        rank == n
    }
}

/// Determinant of a square matrix of polynomials by minor expansion with
/// memoization on column masks. Fine for the sizes we see (r <= 8 or so).
pub fn determinant(field: &Field, entries: &[Vec<MultiPolynomial>]) -> Result<MultiPolynomial> {
    let r = entries.len();
    if r == 0 {
        return Err(Error::structural("empty matrix has no determinant"));
    }
    let nvars = entries[0][0].nvars();
    for row in entries {
        if row.len() != r {
            return Err(Error::structural("determinant of a non-square matrix"));
        }
        for e in row {
            if e.nvars() != nvars {
                return Err(Error::structural("mixed variable counts in matrix"));
            }
        }
    }
    let mut memo: std::collections::HashMap<u32, MultiPolynomial> = Default::default();
    fn minor(
        field: &Field,
        entries: &[Vec<MultiPolynomial>],
        row: usize,
        cols: u32,
        nvars: usize,
        memo: &mut std::collections::HashMap<u32, MultiPolynomial>,
    ) -> MultiPolynomial {
        if cols == 0 {
            return MultiPolynomial::constant(nvars, 1);
        }
        if let Some(p) = memo.get(&cols) {
            return p.clone();
        }
        let mut acc = MultiPolynomial::zero(nvars);
        let mut sign_neg = false;
        for col in 0..entries.len() {
            if cols & (1 << col) == 0 {
                continue;
            }
            let entry = &entries[row][col];
            if !entry.is_zero() {
                let sub = minor(field, entries, row + 1, cols & !(1 << col), nvars, memo);
                let mut term = entry.mul(field, &sub).unwrap();
                if sign_neg {
                    term = term.scale(field, field.neg(1));
                }
                acc = acc.add(field, &term).unwrap();
            }
            sign_neg = !sign_neg;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    Ok(minor(field, entries, 0, (1u32 << r) - 1, nvars, &mut memo))
}

/// Recursive-descent parser for the input syntax: `+ - * ^`, integer
/// coefficients, identifiers from `names`, and parentheses.
pub fn parse_polynomial(field: &Field, names: &[String], text: &str) -> Result<MultiPolynomial> {
    let mut p = Parser {
        field,
        names,
        chars: text.chars().collect(),
        pos: 0,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::structural(format!(
            "unexpected input at column {} of '{}'",
            p.pos + 1,
            text.trim()
        )));
    }
    Ok(poly)
}

struct Parser<'a> {
    field: &'a Field,
    names: &'a [String],
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPolynomial> {
        let mut negate = false;
        if let Some(c) = self.peek() {
            if c == '-' {
                self.pos += 1;
                negate = true;
            } else if c == '+' {
                self.pos += 1;
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(self.field, self.field.neg(1));
        }
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(self.field, &t)?;
                }
                '-' => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(self.field, &t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPolynomial> {
        let mut acc = self.factor()?;
        while let Some('*') = self.peek() {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(self.field, &f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPolynomial> {
        let base = self.base()?;
        if let Some('^') = self.peek() {
            self.pos += 1;
            let exp = self.integer()?;
            let mut acc = MultiPolynomial::constant(self.names.len(), 1);
            for _ in 0..exp {
                acc = acc.mul(self.field, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPolynomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::structural("missing closing parenthesis"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(inner.scale(self.field, self.field.neg(1)))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(MultiPolynomial::constant(
                    self.names.len(),
                    n % self.field.modulus(),
                ))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                match self.names.iter().position(|n| *n == ident) {
                    Some(idx) => Ok(MultiPolynomial::variable(self.names.len(), idx)),
                    None => Err(Error::structural(format!("unknown variable '{ident}'"))),
                }
            }
            other => Err(Error::structural(format!(
                "unexpected token {:?} in polynomial",
                other
            ))),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::structural("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u64>()
            .map_err(|_| Error::structural(format!("integer '{s}' too large")))
    }
}
