//! Assembly of the strange series truncations and extraction of the
//! generalized Fishburn coefficients.
//!
//! Two families are covered: the Kontsevich-Zagier series F(q) = sum (q)_n
//! and, for each t >= 2, the torus-knot companion built from the same
//! Pochhammer blocks with a constrained tuple sum and a q^(-h') prefactor.
//! Both are evaluated at the substituted base B = (zeta_N - q)^r and then
//! shifted by (zeta_N - q)^s, giving the coefficient tables xi(n).
//!
//! Truncations are only ever probed through a stabilization rule: the table
//! is computed at truncation height H = d (M + h' + 1), d = N / gcd(|r|, N),
//! recomputed at H + d, and the two must agree coefficient for coefficient.
//! Each Pochhammer factor (1 - B^k) has positive q-valuation exactly when
//! N | rk, so (B; B)_k = O(q^(floor(k/d))); the doubling check turns that
//! height argument from trust into a test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{euler_phi, rational_from_string, rational_to_string, CycNum};
use crate::poly::{next_gauss_row, IntPoly};
use crate::qseries::{base_substitution, lift_intpoly, QSeries};

/// The four integer constants attached to the torus-knot series at level t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusConstants {
    pub t: u32,
    /// Exponent of the global sign (-1)^h2.
    pub h2: u64,
    /// Order of the pole prefactor q^(-h1).
    pub h1: u64,
    /// The residue the weighted tuple sum must hit modulo m.
    pub a: u64,
    /// Tuple-sum modulus m = 2^(t-1).
    pub m: u64,
}

/// The constants (h2, h1, a, m) for level t >= 2, split by parity of t.
pub fn torus_constants(t: u32) -> Result<TorusConstants> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "torus level must be >= 2, got {t}"
        )));
    }
    if t > 20 {
        return Err(Error::InvalidParameter(format!(
            "torus level {t} exceeds the supported range (tuple modulus 2^(t-1) is intractable)"
        )));
    }
    let pow = |e: u32| 1u64 << e;
    let (h2, h1, a) = if t % 2 == 0 {
        ((pow(t) - 1) / 3, (pow(t) - 4) / 3, (pow(t - 1) + 1) / 3)
    } else {
        ((pow(t) - 2) / 3, (pow(t) - 5) / 3, (pow(t) + 1) / 3)
    };
    let m = pow(t - 1);
    debug_assert_eq!((3 * a) % m, 1 % m);
    Ok(TorusConstants { t, h2, h1, a, m })
}

/// Which series family a coefficient table is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// F(q) = sum_n (q)_n.
    F,
    /// The torus-knot companion at level t >= 2.
    Ft(u32),
}

/// Names one generalized Fishburn coefficient sequence: the series family
/// together with the substitution data (r, s, N) of
/// (zeta_N - q)^s family((zeta_N - q)^r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrangeSpec {
    family: Family,
    r: i64,
    s: i64,
    n: usize,
}

impl StrangeSpec {
    /// Validates and normalizes the parameters. Level 1 of the torus family
    /// is the plain series, so `Ft(1)` collapses to `F`.
    pub fn new(family: Family, r: i64, s: i64, n: usize) -> Result<StrangeSpec> {
        if r == 0 {
            return Err(Error::InvalidParameter("substitution power r must be nonzero".into()));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("root order N must be >= 1".into()));
        }
        let family = match family {
            Family::Ft(0) => {
                return Err(Error::InvalidParameter("torus level must be >= 1".into()));
            }
            Family::Ft(1) => Family::F,
            other => other,
        };
        if let Family::Ft(t) = family {
            torus_constants(t)?;
        }
        Ok(StrangeSpec { family, r, s, n })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn root_order(&self) -> usize {
        self.n
    }
}

impl std::fmt::Display for StrangeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            Family::F => write!(f, "F(r={}, s={}, N={})", self.r, self.s, self.n),
            Family::Ft(t) => write!(f, "Ft(t={t}, r={}, s={}, N={})", self.r, self.s, self.n),
        }
    }
}

/// A computed table of coefficients xi(0), ..., xi(M-1) for one spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiTable {
    pub spec: StrangeSpec,
    pub values: Vec<CycNum>,
    /// Truncation height the values were extracted at.
    pub height_used: i64,
    /// Whether heights H and H + d produced identical tables.
    pub stabilized: bool,
}

impl XiTable {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// xi(n), when n is inside the table.
    pub fn value(&self, n: usize) -> Option<&CycNum> {
        self.values.get(n)
    }
}

/// The truncation sum_{n=0}^{H} (q)_n as an exact integer polynomial.
pub fn f_partial(h: usize) -> QSeries {
    let q = IntPoly::monomial(BigInt::one(), 1);
    let mut acc = IntPoly::one();
    let mut poch = IntPoly::one();
    for k in 1..=h {
        let factor = IntPoly::one().sub(&q.stretch(k as i64));
        poch = poch.mul(&factor);
        acc = acc.add(&poch);
    }
    lift_intpoly(&acc, 1)
}

/// The exact truncation of the level-t series, kept as an honest Laurent
/// polynomial (the q^(-h1) prefactor is not assumed to cancel).
pub(crate) fn ft_laurent(t: u32, h: usize) -> Result<IntPoly> {
    let tc = torus_constants(t)?;
    let q = IntPoly::monomial(BigInt::one(), 1);

    let mut acc = IntPoly::zero();
    let mut poch = IntPoly::one();
    // Rolling q-Pascal rows for the binomial arguments n and n + 1.
    let mut row_n = vec![IntPoly::one()];
    let mut row_n1 = next_gauss_row(&row_n, 1);
    for n in 0..=h {
        if n > 0 {
            let factor = IntPoly::one().sub(&q.stretch(n as i64));
            poch = poch.mul(&factor);
            row_n = std::mem::take(&mut row_n1);
            row_n1 = next_gauss_row(&row_n, n + 1);
        }
        let term = tuple_sum(&tc, n, &row_n, &row_n1)?;
        if !term.is_zero() {
            acc = acc.add(&poch.mul(&term));
        }
    }
    if tc.h2 % 2 == 1 {
        acc = acc.scale(&BigInt::from(-1));
    }
    acc.min -= tc.h1 as i64;
    Ok(acc)
}

/// Inner sum over the tuples (j_1, ..., j_{m-1}) in [0, n+1]^(m-1) whose
/// weighted sum w = sum j_l * l satisfies 3w = 1 (mod m): each admissible
/// tuple contributes q^((w - a)/m + sum C(j_l, 2)) times the k-sum of
/// Gaussian binomial products (n + [l <= k] choose j_l).
///
/// Enumeration is a plain odometer with the congruence filter, (n+2)^(m-1)
/// states per n; fine for t <= 4 at the scales this crate targets, slow
/// beyond.
fn tuple_sum(tc: &TorusConstants, n: usize, row_n: &[IntPoly], row_n1: &[IntPoly]) -> Result<IntPoly> {
    let m = tc.m as usize;
    let mut term = IntPoly::zero();
    let mut j = vec![0usize; m - 1];
    loop {
        let w: u64 = j.iter().enumerate().map(|(i, &jl)| jl as u64 * (i as u64 + 1)).sum();
        if (3 * w) % tc.m == 1 % tc.m {
            // 3a = 1 (mod m) forces m | (w - a) here; the checked division
            // keeps that inference honest.
            let num = w as i64 - tc.a as i64;
            if num.rem_euclid(tc.m as i64) != 0 {
                return Err(Error::NonIntegralExponent {
                    numerator: num,
                    denominator: tc.m as i64,
                });
            }
            let pairs: i64 = j.iter().map(|&jl| (jl as i64) * (jl as i64 - 1) / 2).sum();
            let epow = num.div_euclid(tc.m as i64) + pairs;

            let mut ksum = IntPoly::zero();
            for k in 0..m {
                let mut prod = IntPoly::one();
                for (idx, &jl) in j.iter().enumerate() {
                    let l = idx + 1;
                    let row = if l <= k { row_n1 } else { row_n };
                    match row.get(jl) {
                        Some(b) if !b.is_zero() => prod = prod.mul(b),
                        _ => {
                            prod = IntPoly::zero();
                            break;
                        }
                    }
                }
                ksum = ksum.add(&prod);
            }
            if !ksum.is_zero() {
                ksum.min += epow;
                term = term.add(&ksum);
            }
        }
        // Odometer step.
        let mut pos = 0;
        loop {
            if pos == j.len() {
                return Ok(term);
            }
            j[pos] += 1;
            if j[pos] <= n + 1 {
                break;
            }
            j[pos] = 0;
            pos += 1;
        }
    }
}

/// The truncation of the level-t series as a power series, which is how it
/// enters dissections. Errors when the assembled truncation genuinely has a
/// pole at q = 0 (negative minimal exponent), rather than shifting it away.
pub fn ft_partial(t: u32, h: usize) -> Result<QSeries> {
    let p = ft_laurent(t, h)?;
    if !p.is_zero() && p.min < 0 {
        return Err(Error::NegativeMinExp(p.min));
    }
    Ok(lift_intpoly(&p, 1))
}

/// Computes xi(0..M-1) for the given spec, including the stabilization
/// doubling check. The returned table is exact.
pub fn xi_series(spec: &StrangeSpec, order: usize) -> Result<XiTable> {
    if order < 1 {
        return Err(Error::InvalidParameter("table order must be >= 1".into()));
    }
    let d = (spec.n / spec.r.unsigned_abs().gcd(&(spec.n as u64)) as usize).max(1) as i64;
    let h1 = match spec.family {
        Family::F => 0,
        Family::Ft(t) => torus_constants(t)?.h1 as i64,
    };
    let h = d * (order as i64 + h1 + 1);
    let first = xi_values_at(spec, order, h as usize)?;
    let second = xi_values_at(spec, order, (h + d) as usize)?;
    if let Some(pos) = (0..order).find(|&i| first[i] != second[i]) {
        return Err(Error::StabilizationFailed {
            height: h,
            height_plus: h + d,
            n: pos,
        });
    }
    Ok(XiTable {
        spec: spec.clone(),
        values: first,
        height_used: h,
        stabilized: true,
    })
}

fn xi_values_at(spec: &StrangeSpec, order: usize, height: usize) -> Result<Vec<CycNum>> {
    let nroot = spec.n;
    let prec = order as i64;
    let b = base_substitution(nroot, spec.r, prec)?.truncate(prec);
    let one = QSeries::one(nroot);

    let family_series = match spec.family {
        Family::F => {
            let mut acc = one.clone();
            let mut poch = one.clone();
            let mut bk = one.clone();
            for _ in 1..=height {
                bk = bk.mul(&b)?;
                poch = poch.mul(&one.sub(&bk)?)?;
                if poch.is_zero() {
                    // (B; B)_k vanishes below the precision window; no later
                    // summand can change the reported coefficients.
                    break;
                }
                acc = acc.add(&poch)?;
            }
            acc
        }
        Family::Ft(t) => {
            let lp = ft_laurent(t, height)?;
            if lp.is_zero() {
                QSeries::zero(nroot)
            } else {
                let mut acc = QSeries::zero(nroot);
                for e in (lp.min..=lp.max_exp()).rev() {
                    acc = acc.mul(&b)?;
                    let c = lp.coeff(e);
                    if !c.is_zero() {
                        let lifted = CycNum::from_rational(nroot, BigRational::from(c));
                        acc = acc.add(&QSeries::constant(lifted))?;
                    }
                }
                let base_power = if lp.min >= 0 {
                    b.pow(lp.min as u32)
                } else {
                    b.pow(lp.min.unsigned_abs() as u32).recip_to(prec)?
                };
                acc.mul(&base_power)?
            }
        }
    };

    let shift = base_substitution(nroot, spec.s, prec)?.truncate(prec);
    let total = family_series.mul(&shift)?;
    (0..order)
        .map(|i| {
            total.coeff(i as i64).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "internal: coefficient {i} fell outside the precision window"
                ))
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    r: i64,
    s: i64,
    #[serde(rename = "N")]
    n: usize,
}

impl Serialize for StrangeSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (family, t) = match self.family {
            Family::F => ("F".to_string(), None),
            Family::Ft(t) => ("Ft".to_string(), Some(t)),
        };
        SpecJson {
            family,
            t,
            r: self.r,
            s: self.s,
            n: self.n,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StrangeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SpecJson::deserialize(deserializer)?;
        let family = match (raw.family.as_str(), raw.t) {
            ("F", None) => Family::F,
            ("Ft", Some(t)) => Family::Ft(t),
            ("Ft", None) => {
                return Err(D::Error::custom("family Ft requires the level t"));
            }
            ("F", Some(_)) => {
                return Err(D::Error::custom("family F does not take a level t"));
            }
            (other, _) => {
                return Err(D::Error::custom(format!("unknown family {other:?}")));
            }
        };
        StrangeSpec::new(family, raw.r, raw.s, raw.n).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct XiTableJson {
    spec: StrangeSpec,
    #[serde(rename = "M")]
    order: usize,
    height_used: i64,
    stabilized: bool,
    values: Vec<Vec<String>>,
}

impl Serialize for XiTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        XiTableJson {
            spec: self.spec.clone(),
            order: self.order(),
            height_used: self.height_used,
            stabilized: self.stabilized,
            values: self
                .values
                .iter()
                .map(|v| v.coords().iter().map(rational_to_string).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for XiTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = XiTableJson::deserialize(deserializer)?;
        let n = raw.spec.root_order();
        let phi = euler_phi(n);
        if raw.values.len() != raw.order {
            return Err(D::Error::custom(format!(
                "value count {} does not match order {}",
                raw.values.len(),
                raw.order
            )));
        }
        let values = raw
            .values
            .iter()
            .map(|coords| {
                if coords.len() != phi {
                    return Err(Error::Decode(format!(
                        "expected {phi} coordinates per value for root order {n}, got {}",
                        coords.len()
                    )));
                }
                let parsed = coords
                    .iter()
                    .map(|s| rational_from_string(s))
                    .collect::<Result<Vec<_>>>()?;
                CycNum::new(n, parsed)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(XiTable {
            spec: raw.spec,
            values,
            height_used: raw.height_used,
            stabilized: raw.stabilized,
        })
    }
}
