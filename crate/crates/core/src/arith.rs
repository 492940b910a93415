//! Number-theoretic toolbox: the periodic character behind the torus-knot
//! series, residue sets that bound the congruence windows, prime classes,
//! p-adic digits, carry counting, Bernoulli polynomials, the finite L-value
//! coefficient formulas, and the Stirling-type arrays used by the dissection
//! identities.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{rational_from_string, rational_to_string, CycNum};
use crate::strange::{ft_laurent, torus_constants};

/// Deterministic trial-division primality test; the desk scale keeps p small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// The even periodic character of period 3 * 2^(t+1): +1 on the classes of
/// +-(2^(t+1) - 3), -1 on the classes of +-(2^(t+1) + 3), 0 elsewhere.
pub fn chi(t: u32, n: i64) -> i32 {
    debug_assert!(t >= 2);
    let pow = 1i64 << (t + 1);
    let period = 3 * pow;
    let r = n.rem_euclid(period);
    if r == pow - 3 || r == 3 + 2 * pow {
        1
    } else if r == pow + 3 || r == 2 * pow - 3 {
        -1
    } else {
        0
    }
}

/// Which residue-set flavor to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// Pentagonal residues j = s + r n(3n-1)/2 (mod p).
    S,
    /// S with the single residue 24(j - s) = -r (mod p) removed.
    SStar,
    /// Quadratic residues j = s + r (n^2 - (2^(t+1)-3)^2)/(3*2^(t+2)) (mod p)
    /// over n with chi_t(n) != 0.
    St,
    /// St with the single residue 3*2^(t+2) (j - s) = -r (2^(t+1)-3)^2 removed.
    StStar,
}

impl SetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SetKind::S => "S",
            SetKind::SStar => "S_star",
            SetKind::St => "St",
            SetKind::StStar => "St_star",
        }
    }

    pub fn parse(s: &str) -> Result<SetKind> {
        match s {
            "S" => Ok(SetKind::S),
            "S_star" => Ok(SetKind::SStar),
            "St" => Ok(SetKind::St),
            "St_star" => Ok(SetKind::StStar),
            other => Err(Error::Decode(format!("unknown set kind {other:?}"))),
        }
    }

    pub fn needs_t(self) -> bool {
        matches!(self, SetKind::St | SetKind::StStar)
    }

    pub fn is_star(self) -> bool {
        matches!(self, SetKind::SStar | SetKind::StStar)
    }
}

/// A computed residue set together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    pub p: u64,
    pub kind: SetKind,
    pub r: i64,
    pub s: i64,
    pub t: Option<u32>,
    /// Sorted, deduplicated subset of 0..p-1. Never empty: n = 0 always
    /// contributes for the pentagonal kinds and n = 2^(t+1) - 3 for the
    /// character kinds, and the star filter removes at most one element
    /// which is never the sole member at p >= 5.
    pub members: Vec<u64>,
}

impl ResidueSet {
    pub fn max(&self) -> u64 {
        *self.members.last().expect("residue set is never empty")
    }

    /// Largest j such that the main congruence statements cover 1..=j, i.e.
    /// p - 1 - max(members). Zero means the set gives no information.
    pub fn j_limit(&self) -> u64 {
        self.p - 1 - self.max()
    }
}

fn mod_p(x: i128, p: u64) -> u64 {
    x.rem_euclid(p as i128) as u64
}

/// Modular inverse of a modulo m > 1, when gcd(a, m) = 1.
fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let ext = a.extended_gcd(m);
    if ext.gcd.is_one() {
        Some(ext.x.mod_floor(m))
    } else {
        None
    }
}

/// Builds one of the four residue sets. The character kinds enumerate n over
/// one full period 3 * 2^(t+1) * p, which determines both chi_t(n) and the
/// quadratic quotient modulo p.
pub fn residue_set(kind: SetKind, p: u64, r: i64, s: i64, t: Option<u32>) -> Result<ResidueSet> {
    if p < 5 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r.rem_euclid(p as i64) == 0 {
        return Err(Error::DividesModulus { p, what: "r".into() });
    }
    let t = if kind.needs_t() {
        let t = t.ok_or_else(|| {
            Error::InvalidParameter(format!("set kind {} requires the level t", kind.as_str()))
        })?;
        crate::strange::torus_constants(t)?;
        Some(t)
    } else {
        None
    };

    let mut members: Vec<u64> = Vec::new();
    match kind {
        SetKind::S | SetKind::SStar => {
            for n in 0..p as i128 {
                let pent = n * (3 * n - 1) / 2;
                members.push(mod_p(s as i128 + r as i128 * pent, p));
            }
        }
        SetKind::St | SetKind::StStar => {
            let t = t.unwrap();
            let pow = 1i128 << (t + 1);
            let a = (pow - 3) * (pow - 3);
            let b = 3 * (pow * 2);
            let period = 3 * pow * p as i128;
            for n in 0..period {
                if chi(t, (n % (3 * pow)) as i64) == 0 {
                    continue;
                }
                let num = n * n - a;
                if num.rem_euclid(b) != 0 {
                    return Err(Error::NonIntegralExponent {
                        numerator: num as i64,
                        denominator: b as i64,
                    });
                }
                members.push(mod_p(s as i128 + r as i128 * (num / b), p));
            }
        }
    }
    members.sort_unstable();
    members.dedup();

    if kind.is_star() {
        let (c, rhs) = match kind {
            // 24 (j - s) = -r (mod p)
            SetKind::SStar => (BigInt::from(24), BigInt::from(-r)),
            // 3 * 2^(t+2) (j - s) = -r (2^(t+1) - 3)^2 (mod p)
            SetKind::StStar => {
                let t = t.unwrap();
                let pow = 1i128 << (t + 1);
                (
                    BigInt::from(3 * 2 * pow),
                    BigInt::from(-r as i128 * (pow - 3) * (pow - 3)),
                )
            }
            _ => unreachable!(),
        };
        let pb = BigInt::from(p);
        let inv = mod_inverse(&c.mod_floor(&pb), &pb).ok_or(Error::DividesModulus {
            p,
            what: "the star-condition multiplier".into(),
        })?;
        let excluded_big = ((rhs * inv).mod_floor(&pb) + BigInt::from(s).mod_floor(&pb)).mod_floor(&pb);
        let excluded: u64 = excluded_big.try_into().expect("reduced residue fits u64");
        members.retain(|&j| j != excluded);
    }

    Ok(ResidueSet { p, kind, r, s, t, members })
}

/// Labels for the four arithmetic progressions of primes with square 1
/// modulo 3 * 2^(t+2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassLabel {
    P1,
    P2,
    P3,
    P4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeClass {
    pub t: u32,
    pub p: u64,
    pub class: Option<ClassLabel>,
}

/// Classifies p modulo 3 * 2^(t+1) against the progressions 1,
/// 3 * 2^(t+1) - 1, r1(t), r2(t); the residues r1, r2 swap their +-1 offsets
/// with the parity of t.
pub fn prime_class(t: u32, p: u64) -> Result<PrimeClass> {
    crate::strange::torus_constants(t)?;
    if p < 5 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pow = 1u64 << (t + 1);
    let modulus = 3 * pow;
    let (r1, r2) = if t % 2 == 0 {
        (pow - 1, 2 * pow + 1)
    } else {
        (pow + 1, 2 * pow - 1)
    };
    let pm = p % modulus;
    let class = if pm == 1 {
        Some(ClassLabel::P1)
    } else if pm == modulus - 1 {
        Some(ClassLabel::P2)
    } else if pm == r1 {
        Some(ClassLabel::P3)
    } else if pm == r2 {
        Some(ClassLabel::P4)
    } else {
        None
    };
    Ok(PrimeClass { t, p, class })
}

/// C_{a,b,p} = a (p^2 - 1)/b - p floor(ap/b); integral because p^2 = 1 (mod b).
pub fn c_abp(a: u64, b: u64, p: u64) -> Result<i64> {
    let (a, b, p) = (a as i128, b as i128, p as i128);
    let sq = p * p - 1;
    if sq % b != 0 {
        return Err(Error::InvalidParameter(format!(
            "p^2 must be 1 modulo b, got p = {p}, b = {b}"
        )));
    }
    Ok((a * sq / b - p * ((a * p) / b)) as i64)
}

/// The least nonnegative solution x of b x = -a (mod p), computed through the
/// closed form C_{a,b,p} - p floor(C_{a,b,p} / p) instead of a scan.
pub fn least_solution(a: u64, b: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a % p == 0 || b % p == 0 {
        return Err(Error::DividesModulus { p, what: "a or b".into() });
    }
    let c = c_abp(a, b, p)?;
    let x0 = c.rem_euclid(p as i64) as u64;
    debug_assert_eq!((b as i128 * x0 as i128 + a as i128).rem_euclid(p as i128), 0);
    Ok(x0)
}

/// digit_k of the p-adic expansion of x, for x with denominator coprime to p
/// (so the valuation is nonnegative and the expansion starts at digit 0).
pub fn padic_digit(x: &BigRational, k: u32, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    if x.denom().mod_floor(&pb).is_zero() {
        return Err(Error::DividesModulus { p, what: "the denominator".into() });
    }
    let modulus = pb.pow(k + 1);
    let inv = mod_inverse(&x.denom().mod_floor(&modulus), &modulus)
        .expect("denominator coprime to p is coprime to p^(k+1)");
    let v = (x.numer().mod_floor(&modulus) * inv).mod_floor(&modulus);
    let digit = (v / pb.pow(k)).mod_floor(&pb);
    Ok(digit.try_into().expect("digit fits u64"))
}

/// Number of carries when adding k and n - k in base p; equals the p-adic
/// valuation of the binomial coefficient (n choose k).
pub fn kummer_valuation(n: u64, k: u64, p: u64) -> Result<u32> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut a = k;
    let mut b = n - k;
    let mut carry = 0u64;
    let mut count = 0u32;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        if s >= p {
            count += 1;
            carry = 1;
        } else {
            carry = 0;
        }
        a /= p;
        b /= p;
    }
    Ok(count)
}

/// Exact binomial coefficient with integer (possibly negative) upper index.
pub fn binomial_big(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n) - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn bernoulli_numbers_to(n: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut nums = cache.lock().unwrap();
    while nums.len() <= n {
        let m = nums.len();
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k, the convention with
        // B_1 = -1/2.
        let mut acc = BigRational::zero();
        for (k, bk) in nums.iter().enumerate() {
            let c = binomial_big((m + 1) as i64, k as u64);
            acc += BigRational::from(c) * bk;
        }
        let bm = -acc / BigRational::from(BigInt::from(m as i64 + 1));
        nums.push(bm);
    }
    nums[..=n].to_vec()
}

/// The Bernoulli polynomial B_n(x) with exact rational coefficients,
/// ascending in the power of x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliPoly {
    pub n: u32,
    pub coeffs: Vec<BigRational>,
}

pub fn bernoulli_poly(n: u32) -> BernoulliPoly {
    let numbers = bernoulli_numbers_to(n as usize);
    // B_n(x) = sum_k C(n, k) B_{n-k} x^k.
    let coeffs = (0..=n)
        .map(|k| {
            let c = binomial_big(n as i64, k as u64);
            BigRational::from(c) * &numbers[(n - k) as usize]
        })
        .collect();
    BernoulliPoly { n, coeffs }
}

impl BernoulliPoly {
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// The finite L-value coefficients at a p-th root of unity: c_{n,t},
/// the residue-bucketed table gamma_t(j, i) for j <= n and 0 <= i < p,
/// and b_{n,t} assembled from the gamma table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LCoeffs {
    pub t: u32,
    pub p: u64,
    pub n: u32,
    pub c: CycNum,
    pub b: CycNum,
    /// gamma[j][i] for 0 <= j <= n, 0 <= i <= p-1; all rational.
    pub gamma: Vec<Vec<BigRational>>,
}

/// Global sign aligning the closed coefficient formulas with the series they
/// describe; fixed by cross-checking against the derivative route at level 2.
fn convention_sign(t: u32) -> Result<BigRational> {
    let tc = torus_constants(t)?;
    Ok(if tc.h2 % 2 == 1 {
        -BigRational::one()
    } else {
        BigRational::one()
    })
}

/// One row of the gamma table: the half-period character sum restricted to
/// the residue class i of (m^2 - a)/b modulo p, scaled by
/// (-1)^j N_t^(2j+1) / ((2j+2) a^j).
fn gamma_row(t: u32, p: u64, j: u32) -> Result<Vec<BigRational>> {
    let pow = 1i128 << (t + 1);
    let a = (pow - 3) * (pow - 3);
    let b = 3 * (pow * 2);
    let nt = 3 * pow * p as i128;
    let bp = bernoulli_poly(2 * j + 2);
    let mut row = vec![BigRational::zero(); p as usize];
    for m in 1..=nt / 2 {
        let ch = chi(t, (m % (3 * pow)) as i64);
        if ch == 0 {
            continue;
        }
        let num = m * m - a;
        debug_assert_eq!(num.rem_euclid(b), 0);
        let i = mod_p(num.div_euclid(b), p) as usize;
        let x = BigRational::new(BigInt::from(m), BigInt::from(nt));
        let term = bp.eval(&x) * BigRational::from(BigInt::from(ch));
        row[i] += term;
    }
    let sign = if j % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let scale = BigRational::new(
        sign * BigInt::from(nt).pow(2 * j + 1),
        BigInt::from(2 * j as i64 + 2) * BigInt::from(a).pow(j),
    ) * convention_sign(t)?;
    for v in row.iter_mut() {
        *v = &*v * &scale;
    }
    Ok(row)
}

/// Computes c_{n,t}(zeta_p), the gamma table up to row n, and b_{n,t}(zeta_p).
pub fn l_coeffs(t: u32, p: u64, n: u32) -> Result<LCoeffs> {
    if !is_prime(p) || p < 5 {
        return Err(Error::NotPrime(p));
    }
    torus_constants(t)?;
    let pow = 1i128 << (t + 1);
    let a = BigRational::from(BigInt::from((pow - 3) * (pow - 3)));
    let b = BigRational::from(BigInt::from(3 * pow * 2));

    let gamma: Vec<Vec<BigRational>> = (0..=n).map(|j| gamma_row(t, p, j)).collect::<Result<_>>()?;

    // c_{n,t}(zeta_p) = a^n sum_i gamma[n][i] zeta^i.
    let mut c = CycNum::zero(p as usize);
    let an = a.pow(n as i32);
    for (i, g) in gamma[n as usize].iter().enumerate() {
        if !g.is_zero() {
            c = c.try_add(&CycNum::zeta_pow(p as usize, i as i64).scale(&(&an * g)))?;
        }
    }

    // b_{n,t}(zeta_p) = (a/b)^n sum_j C(n, j) sum_i gamma[j][i] zeta^i.
    let mut b_val = CycNum::zero(p as usize);
    for (j, row) in gamma.iter().enumerate() {
        let cj = BigRational::from(binomial_big(n as i64, j as u64));
        for (i, g) in row.iter().enumerate() {
            if !g.is_zero() {
                b_val = b_val.try_add(&CycNum::zeta_pow(p as usize, i as i64).scale(&(&cj * g)))?;
            }
        }
    }
    let ab_n = (&a / &b).pow(n as i32);
    b_val = b_val.scale(&ab_n);

    Ok(LCoeffs { t, p, n, c, b: b_val, gamma })
}

/// The level-t coefficient c_{n,t} at root of unity 1: the same half-period
/// formula with the period collapsed to 3 * 2^(t+1).
pub fn c_one(t: u32, n: u32) -> Result<BigRational> {
    torus_constants(t)?;
    let pow = 1i128 << (t + 1);
    let nt = 3 * pow;
    let bp = bernoulli_poly(2 * n + 2);
    let mut acc = BigRational::zero();
    for m in 1..=nt / 2 {
        let ch = chi(t, m as i64);
        if ch == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(m), BigInt::from(nt));
        acc += bp.eval(&x) * BigRational::from(BigInt::from(ch));
    }
    let sign = if n % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let scale = BigRational::new(
        sign * BigInt::from(nt).pow(2 * n + 1),
        BigInt::from(2 * n as i64 + 2),
    );
    Ok(acc * scale * convention_sign(t)?)
}

/// b_{n,t}(zeta_p) by the independent route: apply the Euler operator q d/dq
/// n times to the exact truncation at height p(n+1) - 1, evaluate at zeta_p
/// by reducing exponents modulo p, and attach the sign (-1)^n.
pub fn b_via_derivative(t: u32, p: u64, n: u32) -> Result<CycNum> {
    if !is_prime(p) || p < 5 {
        return Err(Error::NotPrime(p));
    }
    let height = (p as usize) * (n as usize + 1) - 1;
    let poly = ft_laurent(t, height)?;
    let mut weights = vec![BigRational::zero(); p as usize];
    if !poly.is_zero() {
        for (off, coeff) in poly.c.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let e = poly.min + off as i64;
            let en = BigInt::from(e).pow(n);
            let idx = e.rem_euclid(p as i64) as usize;
            weights[idx] += BigRational::from(coeff * en);
        }
    }
    let val = CycNum::from_zeta_weights(p as usize, &weights);
    Ok(if n % 2 == 1 { val.scale(&-BigRational::one()) } else { val })
}

/// The Andrews-Sellers array C(n, i, j, p): C(n+1,i,j) = (i+jp) C(n,i,j)
/// + p C(n,i,j-1) with C(0,i,0) = 1; zero outside 0 <= j <= n.
pub fn stirling_c(n: u32, i: u64, j: u32, p: u64) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64, u64), Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    let row = map.entry((n, i, p)).or_insert_with(|| {
        let mut prev = vec![BigInt::one()];
        for m in 0..n {
            let mut next = vec![BigInt::zero(); m as usize + 2];
            for (jj, v) in prev.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                next[jj] += BigInt::from(i + jj as u64 * p) * v;
                next[jj + 1] += BigInt::from(p) * v;
            }
            prev = next;
        }
        prev
    });
    row[j as usize].clone()
}

/// Coefficients of (x - m)(x - m + 1) ... (x - m + n - 1), ascending; entry j
/// is the generalized signless Stirling number s1(n, j, m).
pub fn s1_poly(n: u32, m: i64) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for k in 0..n as i64 {
        let root = BigInt::from(-m + k);
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j] += c * &root;
            next[j + 1] += c;
        }
        coeffs = next;
    }
    coeffs
}

#[derive(Serialize, Deserialize)]
struct ResidueSetJson {
    p: u64,
    kind: String,
    r: i64,
    s: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    members: Vec<u64>,
    max: u64,
}

impl Serialize for ResidueSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ResidueSetJson {
            p: self.p,
            kind: self.kind.as_str().to_string(),
            r: self.r,
            s: self.s,
            t: self.t,
            members: self.members.clone(),
            max: self.max(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResidueSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ResidueSetJson::deserialize(deserializer)?;
        let kind = SetKind::parse(&raw.kind).map_err(D::Error::custom)?;
        let set = residue_set(kind, raw.p, raw.r, raw.s, raw.t).map_err(D::Error::custom)?;
        if set.members != raw.members {
            return Err(D::Error::custom("member list does not match its parameters"));
        }
        Ok(set)
    }
}

#[derive(Serialize, Deserialize)]
struct LCoeffsJson {
    t: u32,
    p: u64,
    n: u32,
    c: CycNum,
    b: CycNum,
    gamma: Vec<Vec<String>>,
}

impl Serialize for LCoeffs {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LCoeffsJson {
            t: self.t,
            p: self.p,
            n: self.n,
            c: self.c.clone(),
            b: self.b.clone(),
            gamma: self
                .gamma
                .iter()
                .map(|row| row.iter().map(rational_to_string).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LCoeffs {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = LCoeffsJson::deserialize(deserializer)?;
        let gamma = raw
            .gamma
            .iter()
            .map(|row| row.iter().map(|s| rational_from_string(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(LCoeffs {
            t: raw.t,
            p: raw.p,
            n: raw.n,
            c: raw.c,
            b: raw.b,
            gamma,
        })
    }
}
