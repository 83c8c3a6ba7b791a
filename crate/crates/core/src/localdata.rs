//! Slope content `[s_1,...,s_m]_t^u` at a prime and the exponent it
//! contributes to the Galois root discriminant.
//!
//! Wild slopes are kept weakly increasing. The exponent is
//!
//! ```text
//! alpha = sum_{i=1..m} (p-1)/p^i * s_{m+1-i}  +  (t-1)/(t p^m)
//! ```
//!
//! so the largest slope carries weight `(p-1)/p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{is_prime, parse_rational, rational_text};
use crate::error::LocalDataError;
use crate::model::{Prime, PrimePowerProduct};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlopeContent {
    prime: Prime,
    wild_slopes: Vec<BigRational>,
    tame_degree: u64,
    unramified_degree: u64,
}

impl SlopeContent {
    pub fn new(
        prime: Prime,
        wild_slopes: Vec<BigRational>,
        tame_degree: u64,
        unramified_degree: u64,
    ) -> Result<Self, LocalDataError> {
        if !is_prime(prime) {
            return Err(LocalDataError::NotPrime(prime));
        }
        let one = BigRational::one();
        for (i, s) in wild_slopes.iter().enumerate() {
            if *s <= one {
                return Err(LocalDataError::SlopeTooSmall(rational_text(s)));
            }
            if i > 0 && wild_slopes[i - 1] > *s {
                return Err(LocalDataError::Unsorted(
                    rational_text(s),
                    rational_text(&wild_slopes[i - 1]),
                ));
            }
        }
        if tame_degree == 0 || unramified_degree == 0 {
            return Err(LocalDataError::Syntax(
                String::new(),
                "tame and unramified degrees must be positive".into(),
            ));
        }
        if tame_degree.gcd(&prime) != 1 {
            return Err(LocalDataError::TameNotCoprime {
                p: prime,
                t: tame_degree,
            });
        }
        Ok(SlopeContent {
            prime,
            wild_slopes,
            tame_degree,
            unramified_degree,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn wild_slopes(&self) -> &[BigRational] {
        &self.wild_slopes
    }

    pub fn tame_degree(&self) -> u64 {
        self.tame_degree
    }

    pub fn unramified_degree(&self) -> u64 {
        self.unramified_degree
    }

    /// Number of wild slopes.
    pub fn wild_count(&self) -> usize {
        self.wild_slopes.len()
    }

    /// Order of the inertia group `p^m t`.
    pub fn inertia_order(&self) -> BigInt {
        BigInt::from(self.prime).pow(self.wild_count() as u32) * self.tame_degree
    }

    /// Order of the decomposition group `p^m t u`.
    pub fn decomposition_order(&self) -> BigInt {
        self.inertia_order() * self.unramified_degree
    }
}

impl fmt::Display for SlopeContent {
    /// Canonical text, omitting `t` and `u` when they are 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slopes: Vec<String> = self.wild_slopes.iter().map(rational_text).collect();
        write!(f, "[{}]", slopes.join(","))?;
        if self.tame_degree != 1 {
            write!(f, "_{}", self.tame_degree)?;
        }
        if self.unramified_degree != 1 {
            write!(f, "^{}", self.unramified_degree)?;
        }
        Ok(())
    }
}

/// Parses `[s1,...,sm]_t^u` at the prime `p`. Either suffix may be omitted
/// (defaulting to 1) and they may appear in either order.
pub fn parse_slope_content(text: &str, p: Prime) -> Result<SlopeContent, LocalDataError> {
    let syntax = |why: &str| LocalDataError::Syntax(text.to_string(), why.to_string());
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let body = compact
        .strip_prefix('[')
        .ok_or_else(|| syntax("expected '['"))?;
    let (inside, mut rest) = body.split_once(']').ok_or_else(|| syntax("missing ']'"))?;
    let mut slopes = Vec::new();
    if !inside.is_empty() {
        for piece in inside.split(',') {
            if piece.contains('.') {
                return Err(syntax("slopes must be integers or fractions"));
            }
            slopes.push(parse_rational(piece).map_err(|e| syntax(&e))?);
        }
    }
    let mut tame = None;
    let mut unram = None;
    while !rest.is_empty() {
        let marker = rest.as_bytes()[0];
        let digits: String = rest[1..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return Err(syntax("expected an integer after '_' or '^'"));
        }
        let value: u64 = digits.parse().map_err(|_| syntax("integer too large"))?;
        let slot = match marker {
            b'_' => &mut tame,
            b'^' => &mut unram,
            _ => return Err(syntax("unexpected trailing text")),
        };
        if slot.replace(value).is_some() {
            return Err(syntax("suffix given twice"));
        }
        rest = &rest[1 + digits.len()..];
    }
    SlopeContent::new(p, slopes, tame.unwrap_or(1), unram.unwrap_or(1)).map_err(|e| match e {
        LocalDataError::Syntax(_, why) => LocalDataError::Syntax(text.to_string(), why),
        other => other,
    })
}

/// Parses `"p:[...]..."` as used on the command line and in query strings.
pub fn parse_prime_content(text: &str) -> Result<SlopeContent, LocalDataError> {
    let (p, content) = text
        .split_once(':')
        .ok_or_else(|| LocalDataError::Syntax(text.to_string(), "expected 'p:[...]'".into()))?;
    let p: Prime = p
        .trim()
        .parse()
        .map_err(|_| LocalDataError::Syntax(text.to_string(), "malformed prime".into()))?;
    parse_slope_content(content, p)
}

/// Exponent `alpha` of the contribution `p^alpha` to the Galois root discriminant.
pub fn alpha_exponent(c: &SlopeContent) -> BigRational {
    let p = BigInt::from(c.prime);
    let m = c.wild_count();
    let mut alpha = BigRational::zero();
    let mut p_pow = BigInt::one();
    for i in 1..=m {
        p_pow *= &p;
        let weight = BigRational::new(&p - 1, p_pow.clone());
        alpha += weight * &c.wild_slopes[m - i];
    }
    let t = BigInt::from(c.tame_degree);
    alpha += BigRational::new(t.clone() - 1, t * p.pow(m as u32));
    alpha
}

/// `∏ p^alpha(p)` over the given contents.
pub fn grd_from_contents(contents: &[SlopeContent]) -> Result<PrimePowerProduct, LocalDataError> {
    let mut terms: Vec<(Prime, BigRational)> = Vec::with_capacity(contents.len());
    for c in contents {
        if terms.iter().any(|(p, _)| *p == c.prime) {
            return Err(LocalDataError::DuplicatePrime(c.prime));
        }
        terms.push((c.prime, alpha_exponent(c)));
    }
    terms.sort_by_key(|(p, _)| *p);
    Ok(PrimePowerProduct::new(terms).expect("primes validated by SlopeContent"))
}
