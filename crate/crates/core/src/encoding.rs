//! Persistence-visible key encodings.
//!
//! Absolute discriminants are stored as decimal strings prefixed by four
//! zero-padded digits holding `floor(log10 |D|)`, so byte order equals
//! numeric order: `4 -> "00004"`, `11 -> "000111"`.
//!
//! A set `S` of T-numbers in one degree is stored as the decimal rendering of
//! `sum_{t in S} 2^(t-1)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::EncodingError;
use crate::groups::transitive_count;

/// Maximum number of decimal digits a key payload may have.
pub const MAX_DIGITS: usize = 10_000;

/// Order-preserving text key for an absolute discriminant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedDiscKey(String);

impl OrderedDiscKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// Wraps raw text after checking it is well formed.
    pub fn parse(text: &str) -> Result<Self, EncodingError> {
        decode_digits(text)?;
        Ok(OrderedDiscKey(text.to_string()))
    }
}

impl fmt::Display for OrderedDiscKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn encode_absdisc(absdisc: &BigUint) -> Result<OrderedDiscKey, EncodingError> {
    if absdisc.is_zero() {
        return Err(EncodingError::Zero);
    }
    let digits = absdisc.to_str_radix(10);
    if digits.len() > MAX_DIGITS {
        return Err(EncodingError::Capacity {
            digits: digits.len(),
        });
    }
    Ok(OrderedDiscKey(format!("{:04}{}", digits.len() - 1, digits)))
}

pub fn decode_absdisc(key: &OrderedDiscKey) -> Result<BigUint, EncodingError> {
    decode_digits(key.as_str())
}

fn decode_digits(text: &str) -> Result<BigUint, EncodingError> {
    let malformed = || EncodingError::MalformedKey(text.to_string());
    if text.len() < 5 || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let (prefix, payload) = text.split_at(4);
    let exponent: usize = prefix.parse().map_err(|_| malformed())?;
    if payload.len() != exponent + 1 || payload.starts_with('0') {
        return Err(malformed());
    }
    payload.parse().map_err(|_| malformed())
}

/// A set of T-numbers of one degree, as a bitmask integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSetCode {
    degree: u32,
    code: BigUint,
}

impl GroupSetCode {
    pub fn empty(degree: u32) -> Self {
        GroupSetCode {
            degree,
            code: BigUint::zero(),
        }
    }

    /// Every group of the degree.
    pub fn all(degree: u32) -> Result<Self, EncodingError> {
        let count = transitive_count(degree).ok_or(EncodingError::UnknownDegree(degree))?;
        Ok(GroupSetCode {
            degree,
            code: (BigUint::one() << count) - 1u32,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn code(&self) -> &BigUint {
        &self.code
    }

    /// Canonical decimal text, `"0"` for the empty set.
    pub fn to_decimal(&self) -> String {
        self.code.to_str_radix(10)
    }

    /// Parses stored decimal text, rejecting leading zeros and bits beyond the
    /// degree's group count.
    pub fn from_decimal(degree: u32, text: &str) -> Result<Self, EncodingError> {
        let malformed = || EncodingError::MalformedCode(text.to_string());
        if text.is_empty()
            || !text.bytes().all(|b| b.is_ascii_digit())
            || (text.len() > 1 && text.starts_with('0'))
        {
            return Err(malformed());
        }
        let count = transitive_count(degree).ok_or(EncodingError::UnknownDegree(degree))?;
        let code: BigUint = text.parse().map_err(|_| malformed())?;
        if code.bits() > count as u64 {
            return Err(malformed());
        }
        Ok(GroupSetCode { degree, code })
    }

    pub fn contains(&self, t: u32) -> bool {
        t >= 1 && self.code.bit((t - 1) as u64)
    }

    pub fn members(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.code.bits())
            .filter(|&b| self.code.bit(b))
            .map(|b| b as u32 + 1)
    }

    pub fn len(&self) -> usize {
        self.code.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_zero()
    }
}

pub fn encode_group_set(
    degree: u32,
    members: impl IntoIterator<Item = u32>,
) -> Result<GroupSetCode, EncodingError> {
    let count = transitive_count(degree).ok_or(EncodingError::UnknownDegree(degree))?;
    let mut code = BigUint::zero();
    for t in members {
        if t == 0 || t > count {
            return Err(EncodingError::MemberOutOfRange {
                degree,
                t_number: t,
                count,
            });
        }
        code.set_bit((t - 1) as u64, true);
    }
    Ok(GroupSetCode { degree, code })
}

pub fn set_contains(code: &GroupSetCode, t: u32) -> bool {
    code.contains(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(n: u64) -> String {
        encode_absdisc(&BigUint::from(n)).unwrap().to_string()
    }

    #[test]
    fn key_examples() {
        assert_eq!(key(4), "00004");
        assert_eq!(key(11), "000111");
        assert_eq!(key(229), "0002229");
        assert_eq!(key(1), "00001");
        assert!(key(11) > key(4));
        assert!(encode_absdisc(&BigUint::zero()).is_err());
    }

    #[test]
    fn key_decoding() {
        let dec = |s: &str| decode_absdisc(&OrderedDiscKey(s.to_string()));
        assert_eq!(dec("00004").unwrap(), BigUint::from(4u32));
        assert_eq!(dec("000111").unwrap(), BigUint::from(11u32));
        assert_eq!(dec("0002229").unwrap(), BigUint::from(229u32));
        assert!(dec("0001229").is_err());
        assert!(dec("0000").is_err());
        assert!(dec("00010").is_err());
        assert!(dec("0001x1").is_err());
        assert!(OrderedDiscKey::parse("000209").is_err());
    }

    #[test]
    fn capacity_boundary() {
        let largest = BigUint::from(10u32).pow(10_000) - 1u32;
        let k = encode_absdisc(&largest).unwrap();
        assert!(k.as_str().starts_with("9999"));
        assert_eq!(decode_absdisc(&k).unwrap(), largest);
        let too_big = BigUint::from(10u32).pow(10_000);
        assert_eq!(
            encode_absdisc(&too_big),
            Err(EncodingError::Capacity { digits: 10_001 })
        );
    }

    #[test]
    fn group_set_examples() {
        assert_eq!(encode_group_set(8, []).unwrap().to_decimal(), "0");
        assert_eq!(encode_group_set(8, [1]).unwrap().to_decimal(), "1");
        // 2^50 - 1, computed independently as a sum of powers of two
        let oracle: u128 = (0..50).map(|i| 1u128 << i).sum();
        let all = encode_group_set(8, 1..=50).unwrap();
        assert_eq!(all.to_decimal(), oracle.to_string());
        assert_eq!(all.to_decimal(), "1125899906842623");
        assert_eq!(all, GroupSetCode::all(8).unwrap());
        assert!(encode_group_set(8, [51]).is_err());
        assert!(encode_group_set(8, [0]).is_err());
    }

    #[test]
    fn group_set_membership() {
        let c = encode_group_set(8, [1, 50]).unwrap();
        assert!(set_contains(&c, 50));
        assert!(!set_contains(&c, 2));
        assert!(!set_contains(&GroupSetCode::empty(8), 7));
        assert_eq!(c.members().collect::<Vec<_>>(), vec![1, 50]);
    }

    #[test]
    fn group_set_decimal_parsing() {
        let c = GroupSetCode::from_decimal(8, "1125899906842623").unwrap();
        assert_eq!(c.len(), 50);
        assert!(GroupSetCode::from_decimal(8, "01").is_err());
        assert!(GroupSetCode::from_decimal(8, "2251799813685248").is_err());
        assert!(GroupSetCode::from_decimal(4, "32").is_err());
        assert!(GroupSetCode::from_decimal(4, "31").is_ok());
        assert!(GroupSetCode::from_decimal(4, "").is_err());
    }
}
