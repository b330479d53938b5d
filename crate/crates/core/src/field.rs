//! Arithmetic in the prime field `Z/p` for a runtime prime `p`.
//!
//! Elements are canonical residues in `0..p`. Multiplication goes through
//! `u128`, which leaves plenty of headroom even for `p = 2^61 - 1`.

/// A prime field fixed by its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        debug_assert!(p > 2);
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonical residue of a signed integer.
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
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

    /// Multiplicative inverse by Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PRIME_CONFIRM, PRIME_PRIMARY};

    #[test]
    fn inverse_roundtrip() {
        for p in [PRIME_PRIMARY, PRIME_CONFIRM, 101] {
            let f = PrimeField::new(p);
            for a in [1u64, 2, 3, 17, p - 1, p / 2] {
                assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn signed_embedding() {
        let f = PrimeField::new(PRIME_PRIMARY);
        assert_eq!(f.from_i64(-1), PRIME_PRIMARY - 1);
        assert_eq!(f.add(f.from_i64(-1), 1), 0);
    }
}
