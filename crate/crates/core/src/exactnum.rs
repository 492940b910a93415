//! Exact arithmetic in the cyclotomic field Q(zeta_N).
//!
//! Elements are held in the power basis 1, zeta, ..., zeta^(phi(N)-1) with
//! arbitrary-precision rational coordinates, reduced modulo the N-th
//! cyclotomic polynomial. No complex embedding exists anywhere: the root is
//! the canonical abstract one defined by the reduction, and everything
//! downstream is independent of that choice (see the Galois-substitution
//! tests).
//!
//! Divisibility by p^lambda inside Z[zeta_N] is decided coordinate-wise:
//! the power basis is a module basis of the full ring of integers of
//! Q(zeta_N), so p^lambda Z[zeta_N] is exactly the set of elements with all
//! coordinates divisible by p^lambda.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Euler's totient by trial-division factorization. Root orders are tiny
/// (double digits) in every intended use.
pub(crate) fn euler_phi(n: usize) -> usize {
    let mut m = n;
    let mut phi = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

fn proper_divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|d| n % d == 0).collect()
}

/// The N-th cyclotomic polynomial, monic of degree phi(N), with integer
/// coefficients (constant term first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicPoly {
    n: usize,
    coeffs: Vec<BigInt>,
}

impl CyclotomicPoly {
    pub fn root_order(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients from the constant term up to the (monic) leading 1.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

/// Quotient of integer polynomials known to divide exactly; the divisor is
/// monic. Coefficient vectors are dense, constant term first.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(den.last().map(|x| x.is_one()).unwrap_or(false));
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    debug_assert!(nd >= dd);
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Per-order immutable data: the cyclotomic modulus and the power basis
/// expansion of every zeta power the arithmetic can encounter.
struct CycInfo {
    phi: usize,
    /// Phi_N coefficients, constant term first, length phi + 1, monic.
    modulus: Vec<BigInt>,
    /// rows[k] = coordinates of zeta^k, for k = 0 ..= max(2*phi - 2, n - 1).
    rows: Vec<Vec<BigInt>>,
}

fn info_cache() -> &'static Mutex<HashMap<usize, Arc<CycInfo>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CycInfo>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyc_info(n: usize) -> Arc<CycInfo> {
    assert!(n >= 1, "root order must be positive");
    if let Some(found) = info_cache().lock().unwrap().get(&n) {
        return found.clone();
    }
    let built = Arc::new(build_info(n));
    info_cache()
        .lock()
        .unwrap()
        .entry(n)
        .or_insert(built)
        .clone()
}

fn build_info(n: usize) -> CycInfo {
    // Phi_N = (x^N - 1) / prod of Phi_d over proper divisors d of N.
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = -BigInt::one();
    num[n] = BigInt::one();
    for d in proper_divisors(n) {
        let phi_d = cyc_info(d);
        num = exact_div_monic(&num, &phi_d.modulus);
    }
    let modulus = num;
    let phi = modulus.len() - 1;
    debug_assert_eq!(phi, euler_phi(n));

    let top = std::cmp::max(2 * phi.max(1) - 2, n - 1);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(top + 1);
    for k in 0..=top {
        if k < phi {
            let mut row = vec![BigInt::zero(); phi];
            row[k] = BigInt::one();
            rows.push(row);
        } else {
            // zeta^k = zeta * zeta^(k-1); the overflow coefficient folds
            // through zeta^phi = -(m_0 + m_1 zeta + ...).
            let prev = &rows[k - 1];
            let carry = prev[phi - 1].clone();
            let mut row = vec![BigInt::zero(); phi];
            for i in 1..phi {
                row[i] = prev[i - 1].clone();
            }
            if !carry.is_zero() {
                for i in 0..phi {
                    row[i] -= &carry * &modulus[i];
                }
            }
            rows.push(row);
        }
    }
    CycInfo { phi, modulus, rows }
}

/// The N-th cyclotomic polynomial Phi_N.
pub fn cyclotomic_poly(n: usize) -> Result<CyclotomicPoly> {
    if n < 1 {
        return Err(Error::InvalidParameter("root order must be >= 1".into()));
    }
    let info = cyc_info(n);
    Ok(CyclotomicPoly {
        n,
        coeffs: info.modulus.clone(),
    })
}

/// An element of Q(zeta_N) in the power basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycNum {
    n: usize,
    coords: Vec<BigRational>,
}

impl CycNum {
    /// Builds an element from explicit power basis coordinates; the length
    /// must be exactly phi(N).
    pub fn new(n: usize, coords: Vec<BigRational>) -> Result<CycNum> {
        if n < 1 {
            return Err(Error::InvalidParameter("root order must be >= 1".into()));
        }
        let phi = euler_phi(n);
        if coords.len() != phi {
            return Err(Error::InvalidParameter(format!(
                "expected {} coordinates for root order {}, got {}",
                phi,
                n,
                coords.len()
            )));
        }
        Ok(CycNum { n, coords })
    }

    pub fn zero(n: usize) -> CycNum {
        let phi = euler_phi(n);
        CycNum {
            n,
            coords: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(n: usize) -> CycNum {
        Self::from_rational(n, BigRational::one())
    }

    /// The canonical primitive root zeta_N itself.
    pub fn zeta(n: usize) -> CycNum {
        Self::zeta_pow(n, 1)
    }

    /// zeta_N^e for any integer exponent (reduced modulo N).
    pub fn zeta_pow(n: usize, e: i64) -> CycNum {
        let info = cyc_info(n);
        let k = e.rem_euclid(n as i64) as usize;
        CycNum {
            n,
            coords: info.rows[k].iter().map(|x| BigRational::from(x.clone())).collect(),
        }
    }

    pub fn from_rational(n: usize, value: BigRational) -> CycNum {
        let mut out = Self::zero(n);
        out.coords[0] = value;
        out
    }

    pub fn from_integer(n: usize, value: i64) -> CycNum {
        Self::from_rational(n, BigRational::from(BigInt::from(value)))
    }

    /// Sum of weights[e] * zeta^e over e < len(weights) <= N; the fast path
    /// for building values given on the full set of zeta powers.
    pub(crate) fn from_zeta_weights(n: usize, weights: &[BigRational]) -> CycNum {
        let info = cyc_info(n);
        assert!(weights.len() <= n);
        let mut coords = vec![BigRational::zero(); info.phi];
        for (e, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (i, r) in info.rows[e].iter().enumerate() {
                if !r.is_zero() {
                    coords[i] += w * r;
                }
            }
        }
        CycNum { n, coords }
    }

    pub fn root_order(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// True when every coordinate has denominator 1, i.e. the element lies
    /// in Z[zeta_N].
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    /// True when the element lies in Q (all non-constant coordinates zero).
    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(Zero::is_zero)
    }

    fn check_same_order(&self, rhs: &CycNum) -> Result<()> {
        if self.n != rhs.n {
            return Err(Error::MismatchedOrder(self.n, rhs.n));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &CycNum) -> Result<CycNum> {
        self.check_same_order(rhs)?;
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum { n: self.n, coords })
    }

    pub fn try_sub(&self, rhs: &CycNum) -> Result<CycNum> {
        self.check_same_order(rhs)?;
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum { n: self.n, coords })
    }

    pub fn try_mul(&self, rhs: &CycNum) -> Result<CycNum> {
        self.check_same_order(rhs)?;
        let phi = self.coords.len();
        if phi == 1 {
            return Ok(CycNum {
                n: self.n,
                coords: vec![&self.coords[0] * &rhs.coords[0]],
            });
        }
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let info = cyc_info(self.n);
        let mut coords: Vec<BigRational> = prod[..phi].to_vec();
        for (k, extra) in prod.iter().enumerate().skip(phi) {
            if extra.is_zero() {
                continue;
            }
            for (i, r) in info.rows[k].iter().enumerate() {
                if !r.is_zero() {
                    coords[i] += extra * r;
                }
            }
        }
        Ok(CycNum { n: self.n, coords })
    }

    pub fn scale(&self, k: &BigRational) -> CycNum {
        CycNum {
            n: self.n,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplicative inverse, by the extended Euclidean algorithm against
    /// the (irreducible) cyclotomic modulus.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.n));
        }
        let info = cyc_info(self.n);
        let modulus: Vec<BigRational> = info
            .modulus
            .iter()
            .map(|x| BigRational::from(x.clone()))
            .collect();
        let (g, u) = ratpoly_half_xgcd(&trim(&self.coords), &modulus);
        // g is a nonzero constant: the modulus is irreducible over Q.
        debug_assert_eq!(g.len(), 1);
        let ginv = BigRational::one() / g[0].clone();
        let mut coords = vec![BigRational::zero(); info.phi];
        for (i, c) in u.iter().enumerate() {
            coords[i] = c * &ginv;
        }
        Ok(CycNum { n: self.n, coords })
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<CycNum> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = CycNum::one(self.n);
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// The Galois substitution zeta -> zeta^k, defined when gcd(k, N) = 1.
    pub fn galois(&self, k: i64) -> Result<CycNum> {
        let n = self.n as i64;
        let kk = k.rem_euclid(n) as usize;
        if num_integer::gcd(kk, self.n) != 1 {
            return Err(Error::InvalidParameter(format!(
                "zeta -> zeta^{k} is not a field automorphism for root order {}",
                self.n
            )));
        }
        let info = cyc_info(self.n);
        let mut coords = vec![BigRational::zero(); info.phi];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, r) in info.rows[(i * kk) % self.n].iter().enumerate() {
                if !r.is_zero() {
                    coords[j] += a * r;
                }
            }
        }
        Ok(CycNum { n: self.n, coords })
    }
}

/// Whether x lies in p^lambda Z[zeta_N]; x must be integral.
pub fn cyc_divisible(x: &CycNum, p: u64, lambda: u32) -> Result<bool> {
    let modulus = BigInt::from(p).pow(lambda);
    for (index, c) in x.coords().iter().enumerate() {
        if !c.denom().is_one() {
            return Err(Error::NotIntegral {
                index,
                value: c.to_string(),
            });
        }
        if !(c.numer() % &modulus).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

impl std::ops::Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("matching root order")
    }
}

impl std::ops::Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("matching root order")
    }
}

impl std::ops::Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("matching root order")
    }
}

impl std::ops::Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            n: self.n,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn trim(v: &[BigRational]) -> Vec<BigRational> {
    let mut out = v.to_vec();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

/// Extended Euclid over Q[x] returning (gcd, u) with u*a = gcd (mod b).
/// Only the cofactor of `a` is tracked.
fn ratpoly_half_xgcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut u0 = vec![BigRational::one()];
    let mut u1: Vec<BigRational> = Vec::new();
    while !r1.is_empty() {
        let (q, rem) = ratpoly_divmod(&r0, &r1);
        let unext = ratpoly_sub(&u0, &ratpoly_mul(&q, &u1));
        r0 = r1;
        r1 = rem;
        u0 = u1;
        u1 = unext;
    }
    (r0, u0)
}

fn ratpoly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let den = trim(den);
    let lead = den.last().expect("nonzero divisor").clone();
    let mut rem = num.to_vec();
    if rem.len() < den.len() {
        return (Vec::new(), trim(&rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - den.len() + 1];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + den.len() - 1] / &lead;
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                let prod = &c * d;
                rem[i + j] -= prod;
            }
        }
        quot[i] = c;
    }
    (trim(&quot), trim(&rem))
}

fn ratpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&out)
}

fn ratpoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&out)
}

/// Renders a rational as "n" or "n/d" with the denominator omitted when 1.
pub(crate) fn rational_to_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses "n" or "n/d" back into a reduced rational.
pub(crate) fn rational_from_string(s: &str) -> Result<BigRational> {
    let bad = || Error::Decode(format!("malformed rational {s:?}"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let numer: BigInt = num_s.parse().map_err(|_| bad())?;
    let denom: BigInt = match den_s {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom <= BigInt::zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

#[derive(Serialize, Deserialize)]
struct CycNumJson {
    #[serde(rename = "N")]
    n: usize,
    coords: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumJson {
            n: self.n,
            coords: self.coords.iter().map(rational_to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CycNumJson::deserialize(deserializer)?;
        let coords = raw
            .coords
            .iter()
            .map(|s| rational_from_string(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycNum::new(raw.n, coords).map_err(D::Error::custom)
    }
}
