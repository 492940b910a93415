//! Truncated Laurent series in q over cyclotomic coefficients.
//!
//! Precision is tracked explicitly: a series either knows all of its
//! coefficients (an exact Laurent polynomial, `prec = None`) or knows them
//! strictly below a bound (`prec = Some(p)`). Arithmetic propagates the
//! bound pessimistically, so a coefficient that is reported is always
//! exact; nothing silently truncates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::CycNum;
use crate::poly::{gauss_binom_row, IntPoly};

/// A truncated Laurent series with CycNum coefficients.
///
/// `coeffs[i]` is the coefficient of `q^(min_exp + i)`. Exponents below
/// `min_exp` are known to vanish; exponents at or beyond `prec` (when
/// `Some`) are unknown. Canonical form keeps the coefficient window free of
/// leading and trailing zeros, with the zero series stored as an empty
/// window at `min_exp = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    n: usize,
    min_exp: i64,
    coeffs: Vec<CycNum>,
    prec: Option<i64>,
}

/// A p-dissection: `parts[i]` collects the input coefficients at exponents
/// congruent to i mod p, re-indexed by (e - i) / p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DissectionResult {
    pub p: u64,
    pub parts: Vec<QSeries>,
}

impl QSeries {
    /// An exact Laurent polynomial from an explicit coefficient window.
    pub fn new_exact(n: usize, min_exp: i64, coeffs: Vec<CycNum>) -> Result<QSeries> {
        for c in &coeffs {
            if c.root_order() != n {
                return Err(Error::MismatchedOrder(n, c.root_order()));
            }
        }
        Ok(QSeries {
            n,
            min_exp,
            coeffs,
            prec: None,
        }
        .normalize())
    }

    /// The exact zero series.
    pub fn zero(n: usize) -> QSeries {
        QSeries {
            n,
            min_exp: 0,
            coeffs: Vec::new(),
            prec: None,
        }
    }

    /// The series that is zero below `prec` and unknown beyond it.
    pub fn zero_to(n: usize, prec: i64) -> QSeries {
        QSeries {
            n,
            min_exp: 0,
            coeffs: Vec::new(),
            prec: Some(prec),
        }
    }

    pub fn constant(c: CycNum) -> QSeries {
        QSeries {
            n: c.root_order(),
            min_exp: 0,
            coeffs: vec![c],
            prec: None,
        }
        .normalize()
    }

    pub fn one(n: usize) -> QSeries {
        Self::constant(CycNum::one(n))
    }

    pub fn monomial(c: CycNum, exp: i64) -> QSeries {
        QSeries {
            n: c.root_order(),
            min_exp: exp,
            coeffs: vec![c],
            prec: None,
        }
        .normalize()
    }

    fn normalize(mut self) -> QSeries {
        if let Some(p) = self.prec {
            // Knowledge beyond the bound is meaningless; drop it.
            let keep = (p - self.min_exp).max(0) as usize;
            self.coeffs.truncate(keep.min(self.coeffs.len()));
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
        while self.coeffs.last().is_some_and(CycNum::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
        self
    }

    pub fn root_order(&self) -> usize {
        self.n
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    /// True when every coefficient is known (exact Laurent polynomial).
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the highest stored (nonzero) term.
    pub fn max_exp(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min_exp + self.coeffs.len() as i64 - 1)
        }
    }

    /// Lower bound on the q-valuation: every exponent below it has a known
    /// zero coefficient. `None` means the series is exactly zero.
    fn valuation_lb(&self) -> Option<i64> {
        if !self.coeffs.is_empty() {
            Some(self.min_exp)
        } else {
            self.prec
        }
    }

    /// The coefficient of q^e, or None when e is at or beyond the precision
    /// bound.
    pub fn coeff(&self, e: i64) -> Option<CycNum> {
        if let Some(p) = self.prec {
            if e >= p {
                return None;
            }
        }
        if e < self.min_exp || e >= self.min_exp + self.coeffs.len() as i64 {
            return Some(CycNum::zero(self.n));
        }
        Some(self.coeffs[(e - self.min_exp) as usize].clone())
    }

    fn check_same_order(&self, rhs: &QSeries) -> Result<()> {
        if self.n != rhs.n {
            return Err(Error::MismatchedOrder(self.n, rhs.n));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &QSeries) -> Result<QSeries> {
        self.check_same_order(rhs)?;
        let prec = match (self.prec, rhs.prec) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        if self.coeffs.is_empty() && rhs.coeffs.is_empty() {
            return Ok(QSeries {
                n: self.n,
                min_exp: 0,
                coeffs: Vec::new(),
                prec,
            });
        }
        let min = match (self.coeffs.is_empty(), rhs.coeffs.is_empty()) {
            (false, false) => self.min_exp.min(rhs.min_exp),
            (false, true) => self.min_exp,
            (true, false) => rhs.min_exp,
            (true, true) => unreachable!(),
        };
        let max = self
            .max_exp()
            .into_iter()
            .chain(rhs.max_exp())
            .max()
            .unwrap();
        let mut coeffs = vec![CycNum::zero(self.n); (max - min + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let at = (self.min_exp - min) as usize + i;
            coeffs[at] = &coeffs[at] + c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            let at = (rhs.min_exp - min) as usize + i;
            coeffs[at] = &coeffs[at] + c;
        }
        Ok(QSeries {
            n: self.n,
            min_exp: min,
            coeffs,
            prec,
        }
        .normalize())
    }

    pub fn sub(&self, rhs: &QSeries) -> Result<QSeries> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            n: self.n,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, rhs: &QSeries) -> Result<QSeries> {
        self.check_same_order(rhs)?;
        // An exactly-zero factor annihilates everything, unknown tail
        // included.
        if self.is_zero() && self.prec.is_none() {
            return Ok(QSeries::zero(self.n));
        }
        if rhs.is_zero() && rhs.prec.is_none() {
            return Ok(QSeries::zero(self.n));
        }
        // Unknown coefficients of one factor first interfere at its
        // precision bound plus the other factor's valuation.
        let mut prec: Option<i64> = None;
        if let Some(p) = self.prec {
            let v = rhs.valuation_lb().expect("nonzero by the checks above");
            prec = Some(p + v);
        }
        if let Some(p) = rhs.prec {
            let v = self.valuation_lb().expect("nonzero by the checks above");
            let bound = p + v;
            prec = Some(prec.map_or(bound, |q| q.min(bound)));
        }
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(QSeries {
                n: self.n,
                min_exp: 0,
                coeffs: Vec::new(),
                prec,
            });
        }
        let min = self.min_exp + rhs.min_exp;
        let full_len = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = match prec {
            Some(p) => ((p - min).max(0) as usize).min(full_len),
            None => full_len,
        };
        let mut coeffs = vec![CycNum::zero(self.n); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(QSeries {
            n: self.n,
            min_exp: min,
            coeffs,
            prec,
        }
        .normalize())
    }

    pub fn scale(&self, k: &CycNum) -> Result<QSeries> {
        if k.root_order() != self.n {
            return Err(Error::MismatchedOrder(self.n, k.root_order()));
        }
        Ok(QSeries {
            n: self.n,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            prec: self.prec,
        }
        .normalize())
    }

    pub fn scale_rational(&self, k: &BigRational) -> QSeries {
        self.scale(&CycNum::from_rational(self.n, k.clone()))
            .expect("matching root order")
    }

    /// Multiplies by q^k.
    pub fn shifted(&self, k: i64) -> QSeries {
        QSeries {
            n: self.n,
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    /// Forgets all coefficients at exponents >= p.
    pub fn truncate(&self, p: i64) -> QSeries {
        let prec = Some(self.prec.map_or(p, |q| q.min(p)));
        QSeries {
            n: self.n,
            min_exp: self.min_exp,
            coeffs: self.coeffs.clone(),
            prec,
        }
        .normalize()
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut acc = QSeries::one(self.n);
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("matching root order");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("matching root order");
            }
        }
        acc
    }

    /// The substitution q -> q^k for k >= 1.
    pub fn substitute_q_pow(&self, k: i64) -> QSeries {
        assert!(k >= 1, "exponent stretch requires k >= 1");
        if k == 1 {
            return self.clone();
        }
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![CycNum::zero(self.n); (self.coeffs.len() - 1) * k as usize + 1];
            for (i, c) in self.coeffs.iter().enumerate() {
                coeffs[i * k as usize] = c.clone();
            }
        }
        QSeries {
            n: self.n,
            min_exp: self.min_exp * k,
            coeffs,
            prec: self.prec.map(|p| p * k),
        }
        .normalize()
    }

    /// Multiplicative inverse with coefficients computed below
    /// `target_prec`. The input's leading coefficient must be a unit and
    /// its known window must reach far enough to determine the result.
    pub fn recip_to(&self, target_prec: i64) -> Result<QSeries> {
        let m = match self.valuation_lb() {
            Some(v) if !self.coeffs.is_empty() => v,
            _ => return Err(Error::DivisionByZero(self.n)),
        };
        let terms = target_prec + m; // relative length of the result
        if terms <= 0 {
            return Ok(QSeries::zero_to(self.n, target_prec));
        }
        if let Some(p) = self.prec {
            if p < m + terms {
                return Err(Error::InvalidParameter(format!(
                    "inverse to precision {target_prec} needs input known below {}, have {p}",
                    m + terms
                )));
            }
        }
        let c0inv = self.coeffs[0].inv()?;
        let mut h: Vec<CycNum> = Vec::with_capacity(terms as usize);
        h.push(c0inv.clone());
        for k in 1..terms {
            let mut s = CycNum::zero(self.n);
            for j in 1..=k {
                let f = match self.coeff(m + j) {
                    Some(c) => c,
                    None => unreachable!("window checked above"),
                };
                if !f.is_zero() && !h[(k - j) as usize].is_zero() {
                    s = &s + &(&f * &h[(k - j) as usize]);
                }
            }
            h.push(&(-&s) * &c0inv);
        }
        Ok(QSeries {
            n: self.n,
            min_exp: -m,
            coeffs: h,
            prec: Some(target_prec),
        }
        .normalize())
    }

    /// Exact quotient by (1 - q^k), or None when the division leaves a
    /// remainder. The input must be exact.
    pub fn div_exact_by_one_minus_q_pow(&self, k: u32) -> Option<QSeries> {
        assert!(self.is_exact(), "exact division requires an exact input");
        assert!(k >= 1);
        if self.is_zero() {
            return Some(self.clone());
        }
        let k = k as usize;
        let f = &self.coeffs;
        if f.len() <= k {
            return None;
        }
        // f = (1 - q^k) g  <=>  g[i] = f[i] + g[i-k]; the top k entries of
        // the recurrence must vanish for the division to be exact.
        let mut g: Vec<CycNum> = Vec::with_capacity(f.len());
        for i in 0..f.len() {
            let mut v = f[i].clone();
            if i >= k {
                v = &v + &g[i - k];
            }
            g.push(v);
        }
        for tail in &g[f.len() - k..] {
            if !tail.is_zero() {
                return None;
            }
        }
        g.truncate(f.len() - k);
        Some(
            QSeries {
                n: self.n,
                min_exp: self.min_exp,
                coeffs: g,
                prec: None,
            }
            .normalize(),
        )
    }
}

/// The base series B = (zeta_N - q)^r. Negative r goes through series
/// inversion (the constant term zeta_N^r is a unit), truncated below
/// `prec`; nonnegative r yields an exact polynomial.
pub fn base_substitution(n: usize, r: i64, prec: i64) -> Result<QSeries> {
    if prec < 1 {
        return Err(Error::InvalidParameter(
            "base substitution needs precision >= 1".into(),
        ));
    }
    if r == 0 {
        return Ok(QSeries::one(n));
    }
    let linear = QSeries::new_exact(
        n,
        0,
        vec![CycNum::zeta(n), CycNum::from_integer(n, -1)],
    )?;
    let power = linear.pow(r.unsigned_abs() as u32);
    if r > 0 {
        Ok(power)
    } else {
        power.recip_to(prec)
    }
}

/// The Pochhammer product (B; B)_n = prod_{k=1..n} (1 - B^k) carried out at
/// an arbitrary base series B, to B's precision.
pub fn series_pochhammer(b: &QSeries, n: u32) -> QSeries {
    let one = QSeries::one(b.root_order());
    let mut acc = one.clone();
    let mut bk = one.clone();
    for _ in 1..=n {
        bk = bk.mul(b).expect("matching root order");
        let factor = one.sub(&bk).expect("matching root order");
        acc = acc.mul(&factor).expect("matching root order");
    }
    acc
}

/// The Gaussian binomial (n choose k)_q as an exact integer polynomial
/// (root order 1), computed by the division-free q-Pascal recursion.
pub fn gauss_binom(n: usize, k: usize) -> QSeries {
    if k > n {
        return QSeries::zero(1);
    }
    lift_intpoly(&gauss_binom_row(n)[k], 1)
}

/// Lifts an integer Laurent polynomial into an exact QSeries with rational
/// constants embedded in Q(zeta_N).
pub(crate) fn lift_intpoly(p: &IntPoly, n: usize) -> QSeries {
    QSeries {
        n,
        min_exp: p.min,
        coeffs: p
            .c
            .iter()
            .map(|x| CycNum::from_rational(n, BigRational::from(x.clone())))
            .collect(),
        prec: None,
    }
    .normalize()
}

/// Splits f by exponent residues mod p. Requires a pole-free series;
/// a negative minimal exponent signals that an upstream nonnegativity
/// assertion failed.
pub fn dissect(f: &QSeries, p: u64) -> Result<DissectionResult> {
    if p < 2 {
        return Err(Error::InvalidParameter("dissection modulus must be >= 2".into()));
    }
    if f.min_exp() < 0 && !f.is_zero() {
        return Err(Error::NegativeMinExp(f.min_exp()));
    }
    let pi = p as i64;
    let mut parts = Vec::with_capacity(p as usize);
    for i in 0..pi {
        // The first unknown exponent congruent to i is ceil((prec - i)/p).
        let prec = f.prec().map(|q| (q - i).div_euclid(pi) + i64::from((q - i).rem_euclid(pi) != 0));
        let mut coeffs = Vec::new();
        let mut min_exp = 0;
        if !f.is_zero() {
            let lo_e = f.min_exp() + (i - f.min_exp()).rem_euclid(pi);
            min_exp = (lo_e - i) / pi;
            let mut e = lo_e;
            while e <= f.max_exp().unwrap() {
                coeffs.push(f.coeff(e).unwrap_or_else(|| CycNum::zero(f.root_order())));
                e += pi;
            }
        }
        parts.push(
            QSeries {
                n: f.root_order(),
                min_exp,
                coeffs,
                prec,
            }
            .normalize(),
        );
    }
    Ok(DissectionResult { p, parts })
}

impl DissectionResult {
    /// Reassembles sum_i q^i parts[i](q^p); the defining identity returns
    /// the dissected series.
    pub fn reassemble(&self) -> QSeries {
        let n = self
            .parts
            .first()
            .map(|f| f.root_order())
            .unwrap_or(1);
        let mut acc = QSeries::zero(n);
        for (i, part) in self.parts.iter().enumerate() {
            let piece = part.substitute_q_pow(self.p as i64).shifted(i as i64);
            acc = acc.add(&piece).expect("matching root order");
        }
        acc
    }
}

/// The expansion of f(1 - q) in powers of q, exact, via Horner evaluation
/// in the polynomial ring. Requires an exact polynomial without poles.
pub fn recentre_at_one(f: &QSeries) -> Result<QSeries> {
    if !f.is_exact() {
        return Err(Error::InvalidParameter(
            "recentre requires an exact polynomial, not a truncation".into(),
        ));
    }
    if f.min_exp() < 0 {
        return Err(Error::NegativeMinExp(f.min_exp()));
    }
    let n = f.root_order();
    let one_minus_q = QSeries::new_exact(
        n,
        0,
        vec![CycNum::one(n), CycNum::from_integer(n, -1)],
    )?;
    let mut acc = QSeries::zero(n);
    let top = f.max_exp().unwrap_or(0);
    for e in (0..=top).rev() {
        acc = acc.mul(&one_minus_q)?;
        let c = f.coeff(e).expect("exact polynomial");
        if !c.is_zero() {
            acc = acc.add(&QSeries::constant(c))?;
        }
    }
    Ok(acc)
}

/// The j-th derivative of an exact series evaluated at q = 1:
/// sum_e c_e * e (e-1) ... (e-j+1). Valid for Laurent polynomials as well,
/// where the falling factorial handles negative exponents.
pub fn series_derivative_at_one(f: &QSeries, j: u32) -> Result<CycNum> {
    if !f.is_exact() {
        return Err(Error::InvalidParameter(
            "derivative at 1 requires an exact polynomial, not a truncation".into(),
        ));
    }
    let n = f.root_order();
    let mut acc = CycNum::zero(n);
    if f.is_zero() {
        return Ok(acc);
    }
    for e in f.min_exp()..=f.max_exp().unwrap() {
        let c = f.coeff(e).expect("exact polynomial");
        if c.is_zero() {
            continue;
        }
        let mut w = BigInt::one();
        for step in 0..j {
            w *= BigInt::from(e - step as i64);
        }
        if !w.is_zero() {
            acc = &acc + &c.scale(&BigRational::from(w));
        }
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct QSeriesJson {
    #[serde(rename = "N")]
    n: usize,
    min_exp: i64,
    prec: Option<i64>,
    coeffs: Vec<CycNum>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson {
            n: self.n,
            min_exp: self.min_exp,
            prec: self.prec,
            coeffs: self.coeffs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = QSeriesJson::deserialize(deserializer)?;
        for c in &raw.coeffs {
            if c.root_order() != raw.n {
                return Err(D::Error::custom(Error::MismatchedOrder(
                    raw.n,
                    c.root_order(),
                )));
            }
        }
        Ok(QSeries {
            n: raw.n,
            min_exp: raw.min_exp,
            coeffs: raw.coeffs,
            prec: raw.prec,
        }
        .normalize())
    }
}
