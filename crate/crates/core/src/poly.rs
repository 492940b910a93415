//! Dense Laurent polynomials over the integers.
//!
//! This is the crate-internal engine behind the series assembly routines:
//! Gaussian binomials, Pochhammer products, and the torus-knot series are
//! all built here over `BigInt` before being lifted into the public
//! cyclotomic-coefficient series type.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Dense Laurent polynomial over Z.
///
/// `c[i]` is the coefficient of `q^(min + i)`. Canonical form: `c` neither
/// starts nor ends with a zero, and the zero polynomial is the empty vector
/// with `min = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntPoly {
    pub(crate) min: i64,
    pub(crate) c: Vec<BigInt>,
}

impl IntPoly {
    pub(crate) fn zero() -> Self {
        IntPoly { min: 0, c: Vec::new() }
    }

    pub(crate) fn one() -> Self {
        IntPoly { min: 0, c: vec![BigInt::one()] }
    }

    pub(crate) fn monomial(coeff: BigInt, exp: i64) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        IntPoly { min: exp, c: vec![coeff] }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Exponent of the highest term; meaningless for the zero polynomial.
    pub(crate) fn max_exp(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.min + self.c.len() as i64 - 1
    }

    pub(crate) fn coeff(&self, exp: i64) -> BigInt {
        if exp < self.min {
            return BigInt::zero();
        }
        let idx = (exp - self.min) as usize;
        self.c.get(idx).cloned().unwrap_or_else(BigInt::zero)
    }

    fn normalize(mut self) -> Self {
        let leading_zeros = self.c.iter().take_while(|x| x.is_zero()).count();
        if leading_zeros > 0 {
            self.c.drain(..leading_zeros);
            self.min += leading_zeros as i64;
        }
        while self.c.last().is_some_and(Zero::is_zero) {
            self.c.pop();
        }
        if self.c.is_empty() {
            self.min = 0;
        }
        self
    }

    pub(crate) fn add(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let min = self.min.min(rhs.min);
        let max = self.max_exp().max(rhs.max_exp());
        let mut c = vec![BigInt::zero(); (max - min + 1) as usize];
        for (i, x) in self.c.iter().enumerate() {
            c[(self.min - min) as usize + i] += x;
        }
        for (i, x) in rhs.c.iter().enumerate() {
            c[(rhs.min - min) as usize + i] += x;
        }
        IntPoly { min, c }.normalize()
    }

    pub(crate) fn sub(&self, rhs: &IntPoly) -> IntPoly {
        self.add(&rhs.scale(&BigInt::from(-1)))
    }

    pub(crate) fn mul(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        IntPoly { min: self.min + rhs.min, c }.normalize()
    }

    pub(crate) fn scale(&self, k: &BigInt) -> IntPoly {
        if k.is_zero() {
            return Self::zero();
        }
        IntPoly {
            min: self.min,
            c: self.c.iter().map(|x| x * k).collect(),
        }
    }

    /// The substitution q -> q^k (exponent stretch), k >= 1.
    pub(crate) fn stretch(&self, k: i64) -> IntPoly {
        debug_assert!(k >= 1);
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); (self.c.len() - 1) * k as usize + 1];
        for (i, x) in self.c.iter().enumerate() {
            c[i * k as usize] = x.clone();
        }
        IntPoly { min: self.min * k, c }
    }
}

/// The Gaussian binomial (n choose k) in q, by the q-Pascal recursion
/// (n|k) = (n-1|k-1) + q^k (n-1|k), which never divides.
///
/// Returns the full row ((n|0), ..., (n|n)).
pub(crate) fn gauss_binom_row(n: usize) -> Vec<IntPoly> {
    let mut row = vec![IntPoly::one()];
    for m in 1..=n {
        row = next_gauss_row(&row, m);
    }
    row
}

/// Row m of the q-Pascal triangle from row m-1.
pub(crate) fn next_gauss_row(prev: &[IntPoly], m: usize) -> Vec<IntPoly> {
    debug_assert_eq!(prev.len(), m);
    let mut row = Vec::with_capacity(m + 1);
    row.push(IntPoly::one());
    for k in 1..m {
        let shifted = IntPoly {
            min: prev[k].min + k as i64,
            c: prev[k].c.clone(),
        };
        row.push(prev[k - 1].add(&shifted));
    }
    row.push(IntPoly::one());
    row
}
