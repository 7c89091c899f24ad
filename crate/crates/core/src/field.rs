//! Arithmetic in the prime field `F_p`.
//!
//! Scalars are stored as canonical residues in `[0, p)` inside a plain `u64`.
//! All operations go through a [`Field`] context carrying the modulus, so
//! different moduli can coexist (tests use small primes, the CLI defaults to
//! `p = 32003`). A `Field` is immutable after construction and freely shared
//! between threads.

use serde::Serialize;

use crate::error::Error;

/// Default modulus used when an input file does not pick one.
pub const DEFAULT_PRIME: u64 = 32003;

/// Largest modulus we accept. Products of two reduced scalars must fit in a
/// `u64` with room for delayed-reduction accumulation, so we cap at 2^31 - 1.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// A prime field `F_p`, the coefficient domain of every computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Field {
    p: u64,
}

/// An element of `F_p`: a canonical residue in `[0, p)`.
pub type FieldScalar = u64;

impl Field {
    /// Builds the field, rejecting composite or oversized moduli.
    pub fn new(p: u64) -> Result<Self, Error> {
        if !(2..=MAX_PRIME).contains(&p) {
            return Err(Error::structural(format!(
                "modulus {p} out of range (2..={MAX_PRIME})"
            )));
        }
        if !is_prime(p) {
            return Err(Error::structural(format!("modulus {p} is not prime")));
        }
        Ok(Field { p })
    }

    /// The default field `F_32003`.
    pub fn default_prime() -> Self {
        Field { p: DEFAULT_PRIME }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn from_i64(&self, n: i64) -> FieldScalar {
        n.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: FieldScalar, b: FieldScalar) -> FieldScalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldScalar, b: FieldScalar) -> FieldScalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldScalar) -> FieldScalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldScalar, b: FieldScalar) -> FieldScalar {
        a * b % self.p
    }

    pub fn pow(&self, mut base: FieldScalar, mut exp: u64) -> FieldScalar {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat. Panics on zero: callers divide only
    /// by pivots they have already checked to be nonzero.
    #[inline]
    pub fn inv(&self, a: FieldScalar) -> FieldScalar {
        assert!(a != 0, "division by zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::new(32001).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(32003).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let f = Field::new(1009).unwrap();
        for a in 1..200u64 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn from_i64_handles_negatives() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.from_i64(-1), 4);
        assert_eq!(f.from_i64(-10), 0);
        assert_eq!(f.from_i64(7), 2);
    }
}
