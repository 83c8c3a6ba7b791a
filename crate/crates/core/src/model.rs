//! Domain values shared by every module: factored discriminants, exact
//! prime-power products for `rd` and `grd`, class group shapes and the
//! field record itself.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, certified_cmp, fixed_point, is_prime, ln_biguint, rational_text};
use crate::error::ModelError;
use crate::groups::GroupId;
use crate::localdata::SlopeContent;

/// Machine-size rational prime. Discriminant primes in tables are far below 2^64.
pub type Prime = u64;

/// Opaque, monotonically assigned record identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordId(pub u64);

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    factors: Vec<(Prime, u32)>,
    value: BigUint,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            factors: Vec::new(),
            value: BigUint::one(),
        }
    }

    /// Builds from `(prime, exponent)` pairs; primes must be strictly increasing.
    pub fn new(factors: Vec<(Prime, u32)>) -> Result<Self, ModelError> {
        let mut value = BigUint::one();
        for (i, &(p, e)) in factors.iter().enumerate() {
            if i > 0 && factors[i - 1].0 >= p {
                return Err(ModelError::UnsortedPrimes(p, factors[i - 1].0));
            }
            if !is_prime(p) {
                return Err(ModelError::NotPrime(p));
            }
            if e == 0 {
                return Err(ModelError::ZeroExponent(p));
            }
            value *= BigUint::from(p).pow(e);
        }
        Ok(FactoredInteger { factors, value })
    }

    pub fn factors(&self) -> &[(Prime, u32)] {
        &self.factors
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// `ord_p` of the value.
    pub fn ord(&self, p: Prime) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// `value^(1/n)` as an exact prime-power product.
    pub fn root(&self, n: u32) -> Result<PrimePowerProduct, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroDegree);
        }
        let terms = self
            .factors
            .iter()
            .map(|&(p, e)| (p, BigRational::new(BigInt::from(e), BigInt::from(n))))
            .collect();
        PrimePowerProduct::new(terms)
    }
}

/// The signed discriminant `-^s |D|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedDiscriminant {
    pub s: u32,
    pub absdisc: FactoredInteger,
}

impl SignedDiscriminant {
    pub fn new(s: u32, absdisc: FactoredInteger) -> Self {
        SignedDiscriminant { s, absdisc }
    }
}

/// Renders `-^s p1^e1 p2^e2 ...`, omitting the sign marker when `s = 0`.
pub fn format_discriminant(d: &SignedDiscriminant) -> String {
    let mut parts = Vec::new();
    if d.s > 0 {
        parts.push(format!("-^{}", d.s));
    }
    for &(p, e) in d.absdisc.factors() {
        parts.push(format!("{p}^{e}"));
    }
    if d.absdisc.factors().is_empty() {
        parts.push("1".to_string());
    }
    parts.join(" ")
}

/// Inverse of [`format_discriminant`].
pub fn parse_discriminant(text: &str) -> Result<SignedDiscriminant, ModelError> {
    let bad = || ModelError::BadDiscriminant(text.to_string());
    let mut s = 0;
    let mut factors = Vec::new();
    let mut tokens = text.split_whitespace().peekable();
    if let Some(tok) = tokens.peek() {
        if let Some(rest) = tok.strip_prefix("-^") {
            s = rest.parse().map_err(|_| bad())?;
            tokens.next();
        }
    }
    let mut saw_one = false;
    for tok in tokens {
        if tok == "1" {
            saw_one = true;
            continue;
        }
        let (p, e) = tok.split_once('^').ok_or_else(bad)?;
        let p: Prime = p.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        factors.push((p, e));
    }
    if saw_one && !factors.is_empty() {
        return Err(bad());
    }
    let absdisc = FactoredInteger::new(factors)?;
    Ok(SignedDiscriminant { s, absdisc })
}

/// Class group as a list of cyclic factor orders; empty means trivial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClassGroupStructure {
    cyclic_orders: Vec<u64>,
}

impl ClassGroupStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self, ModelError> {
        if cyclic_orders.contains(&0) {
            return Err(ModelError::BadClassGroup);
        }
        Ok(ClassGroupStructure { cyclic_orders })
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn class_number(&self) -> BigUint {
        self.cyclic_orders
            .iter()
            .fold(BigUint::one(), |acc, &h| acc * h)
    }
}

/// `"13.13"`, `"2.4"`, or `"1"` for the trivial group.
pub fn format_class_group(c: &ClassGroupStructure) -> String {
    let nontrivial: Vec<String> = c
        .cyclic_orders
        .iter()
        .filter(|&&h| h > 1)
        .map(|h| h.to_string())
        .collect();
    if nontrivial.is_empty() {
        "1".to_string()
    } else {
        nontrivial.join(".")
    }
}

/// An exact product `∏ p^{e_p}` with nonnegative rational exponents.
///
/// Terms with a zero exponent are dropped, so equal values have equal
/// representations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrimePowerProduct {
    terms: Vec<(Prime, BigRational)>,
}

impl PrimePowerProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<(Prime, BigRational)>) -> Result<Self, ModelError> {
        let mut out: Vec<(Prime, BigRational)> = Vec::with_capacity(terms.len());
        for (p, e) in terms {
            if let Some(last) = out.last() {
                if last.0 >= p {
                    return Err(ModelError::UnsortedPrimes(p, last.0));
                }
            }
            if !is_prime(p) {
                return Err(ModelError::NotPrime(p));
            }
            if e.is_negative() {
                return Err(ModelError::NegativeExponent(p));
            }
            out.push((p, e));
        }
        out.retain(|(_, e)| !e.is_zero());
        Ok(PrimePowerProduct { terms: out })
    }

    pub fn terms(&self) -> &[(Prime, BigRational)] {
        &self.terms
    }

    pub fn exponent(&self, p: Prime) -> BigRational {
        self.terms
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &PrimePowerProduct) -> PrimePowerProduct {
        let mut map: BTreeMap<Prime, BigRational> = BTreeMap::new();
        for (p, e) in self.terms.iter().chain(other.terms.iter()) {
            *map.entry(*p).or_insert_with(BigRational::zero) += e;
        }
        PrimePowerProduct {
            terms: map.into_iter().filter(|(_, e)| !e.is_zero()).collect(),
        }
    }

    /// Natural log estimate, used only to short-circuit exact comparisons.
    pub fn ln_estimate(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, e)| e.to_f64().unwrap_or(f64::MAX) * (*p as f64).ln())
            .sum()
    }

    pub fn to_f64(&self) -> f64 {
        self.ln_estimate().exp()
    }

    /// Common denominator `L` and the integer `value^L`.
    fn integral_power(&self) -> (u32, BigUint) {
        let l = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
        let l = l.to_u32().expect("exponent denominators fit in u32");
        let mut n = BigUint::one();
        for (p, e) in &self.terms {
            let k = (e * BigRational::from_integer(BigInt::from(l))).to_integer();
            n *= BigUint::from(*p).pow(k.to_u32().expect("exponent fits in u32"));
        }
        (l, n)
    }

    /// Decimal rendering rounded half-up to `places` digits, computed exactly.
    pub fn to_decimal(&self, places: u32) -> String {
        let (l, n) = self.integral_power();
        decimal_of_root(&n, l, places)
    }

    /// Exact comparison of two products.
    pub fn cmp_exact(&self, other: &PrimePowerProduct) -> Ordering {
        if let Some(o) = certified_cmp(self.ln_estimate(), other.ln_estimate()) {
            return o;
        }
        let mut diff: BTreeMap<Prime, BigRational> = BTreeMap::new();
        for (p, e) in &self.terms {
            *diff.entry(*p).or_insert_with(BigRational::zero) += e;
        }
        for (p, e) in &other.terms {
            *diff.entry(*p).or_insert_with(BigRational::zero) -= e;
        }
        let l = diff
            .values()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let mut left = BigUint::one();
        let mut right = BigUint::one();
        for (p, e) in diff {
            let k = (e * BigRational::from_integer(l.clone())).to_integer();
            let pow = k.magnitude().to_u32().expect("exponent fits in u32");
            if k.is_positive() {
                left *= BigUint::from(p).pow(pow);
            } else if k.is_negative() {
                right *= BigUint::from(p).pow(pow);
            }
        }
        left.cmp(&right)
    }

    /// Exact comparison against a nonnegative rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        if q.is_zero() || q.is_negative() {
            return Ordering::Greater;
        }
        if let Some(o) = certified_cmp(self.ln_estimate(), arith::ln_rational(q)) {
            return o;
        }
        let (l, n) = self.integral_power();
        let lhs = n * q.denom().magnitude().pow(l);
        let rhs = q.numer().magnitude().pow(l);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for PrimePowerProduct {
    /// `"3^{1/2} 13^{1/2}"`, `"2^1 3^{1/2}"`, or `"1"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, e)| {
                if e.is_integer() {
                    format!("{p}^{}", e.numer())
                } else {
                    format!("{p}^{{{}}}", rational_text(e))
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for PrimePowerProduct {
    type Err = ModelError;

    /// Parses products such as `"3^{1/2} 13^{1/2}"`, `"2^(111/32)*5^(6/7)"`,
    /// `"229^1/2"`, `"7"` or `"1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::BadProduct(s.to_string());
        let normalized = s.replace(['*', '·'], " ");
        let mut terms = Vec::new();
        for tok in normalized.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e),
                None => (tok, "1"),
            };
            let p: Prime = base.parse().map_err(|_| bad())?;
            let exp = exp
                .trim_start_matches(['{', '('])
                .trim_end_matches(['}', ')']);
            let e = arith::parse_rational(exp).map_err(|_| bad())?;
            if p == 1 {
                if !e.is_zero() && tok != "1" {
                    return Err(bad());
                }
                continue;
            }
            terms.push((p, e));
        }
        terms.sort_by_key(|(p, _)| *p);
        PrimePowerProduct::new(terms)
    }
}

/// Floor of `10^places * N^(1/L)`, rounded half-up, as fixed-point text.
pub fn decimal_of_root(n: &BigUint, l: u32, places: u32) -> String {
    let scale = BigUint::from(2u32) * BigUint::from(10u32).pow(places);
    let scaled = scale.pow(l) * n;
    let r = scaled.nth_root(l);
    let rounded = (r + 1u32) >> 1;
    fixed_point(&rounded, places)
}

/// `|D|^(1/n)` in radical form, for when no factorization is at hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDiscriminant {
    pub radicand: BigUint,
    pub index: u32,
}

impl RootDiscriminant {
    pub fn to_decimal(&self, places: u32) -> String {
        decimal_of_root(&self.radicand, self.index, places)
    }
}

impl fmt::Display for RootDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{{1/{}}}", self.radicand, self.index)
    }
}

/// The root discriminant `|D|^{1/n}`.
pub fn root_discriminant(absdisc: &BigUint, degree: u32) -> Result<RootDiscriminant, ModelError> {
    if absdisc.is_zero() {
        return Err(ModelError::NonPositive);
    }
    if degree == 0 {
        return Err(ModelError::ZeroDegree);
    }
    Ok(RootDiscriminant {
        radicand: absdisc.clone(),
        index: degree,
    })
}

/// Exact comparison of `a^(1/m)` and `b^(1/n)` by cross powers `a^n` vs `b^m`.
pub fn cmp_roots(a: &BigUint, m: u32, b: &BigUint, n: u32) -> Ordering {
    if m == n {
        return a.cmp(b);
    }
    let la = ln_biguint(a) / m as f64;
    let lb = ln_biguint(b) / n as f64;
    if let Some(o) = certified_cmp(la, lb) {
        return o;
    }
    a.pow(n).cmp(&b.pow(m))
}

/// One number field and its arithmetic invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRecord {
    pub id: Option<RecordId>,
    pub degree: u32,
    /// Integer coefficients, highest degree first, leading 1 included.
    pub polynomial: Vec<BigInt>,
    pub group: GroupId,
    pub disc: SignedDiscriminant,
    pub class_group: ClassGroupStructure,
    pub narrow_class_group: Option<ClassGroupStructure>,
    pub local_data: BTreeMap<Prime, SlopeContent>,
    pub grd: Option<PrimePowerProduct>,
}

impl FieldRecord {
    pub fn absdisc(&self) -> &BigUint {
        self.disc.absdisc.value()
    }

    pub fn ramified_primes(&self) -> Vec<Prime> {
        self.disc.absdisc.primes().collect()
    }

    /// Exact root discriminant as a prime-power product.
    pub fn rd(&self) -> PrimePowerProduct {
        self.disc
            .absdisc
            .root(self.degree)
            .expect("degree is positive for stored records")
    }

    pub fn polynomial_text(&self) -> String {
        format_polynomial(&self.polynomial)
    }
}

/// Renders coefficients (highest degree first) as `x^4 - x^3 + 2*x + 1`.
pub fn format_polynomial(coeffs: &[BigInt]) -> String {
    let degree = coeffs.len().saturating_sub(1);
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let power = degree - i;
        let magnitude = c.abs();
        let negative = c.is_negative();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono = match power {
            0 => String::new(),
            1 => "x".to_string(),
            k => format!("x^{k}"),
        };
        if mono.is_empty() {
            out.push_str(&magnitude.to_string());
        } else if magnitude.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{magnitude}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
