//! Small exact-arithmetic helpers shared across the engine: primality for
//! machine-size primes, rational parsing, decimal rendering and certified
//! logarithm estimates.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// All primes in `[lo, hi]`, or `None` when the interval is too wide to list.
pub fn primes_between(lo: u64, hi: u64, limit: usize) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    if hi < lo {
        return Some(out);
    }
    if hi - lo > 50_000_000 {
        return None;
    }
    let mut n = lo.max(2);
    while n <= hi {
        if is_prime(n) {
            if out.len() == limit {
                return None;
            }
            out.push(n);
        }
        if n == u64::MAX {
            break;
        }
        n += 1;
    }
    Some(out)
}

/// Parses `"7/2"`, `"3.25"`, `"-4"` or `"250"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = parse_int(num)?;
        let den: BigInt = parse_int(den)?;
        if den.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed decimal {t:?}"));
        }
        if !whole_digits.is_empty() && !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed decimal {t:?}"));
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits
            .parse()
            .map_err(|_| format!("malformed decimal {t:?}"))?;
        if negative {
            num = -num;
        }
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    Ok(BigRational::from_integer(parse_int(t)?))
}

fn parse_int(text: &str) -> Result<BigInt, String> {
    let t = text.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("malformed integer {t:?}"));
    }
    t.parse().map_err(|_| format!("malformed integer {t:?}"))
}

/// Parses a nonnegative decimal integer without sign or whitespace tricks.
pub fn parse_biguint(text: &str) -> Result<BigUint, String> {
    let t = text.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("malformed nonnegative integer {t:?}"));
    }
    t.parse()
        .map_err(|_| format!("malformed nonnegative integer {t:?}"))
}

/// Canonical text for a rational: `"7/2"`, or `"3"` when integral.
pub fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders `q` with `places` decimals, rounding half away from zero.
pub fn round_decimal(q: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = q.abs() * BigRational::from_integer(scale);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = (scaled + half).floor().to_integer();
    let text = fixed_point(rounded.magnitude(), places);
    if q.is_negative() && !rounded.is_zero() {
        format!("-{text}")
    } else {
        text
    }
}

/// Formats an integer `v` as `v / 10^places` in fixed-point notation.
pub fn fixed_point(v: &BigUint, places: u32) -> String {
    let digits = v.to_string();
    if places == 0 {
        return digits;
    }
    let p = places as usize;
    let padded = if digits.len() <= p {
        format!("{}{}", "0".repeat(p + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int, frac) = padded.split_at(padded.len() - p);
    format!("{int}.{frac}")
}

/// Natural logarithm of a positive big integer, relative error about 1e-15.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return (v.to_u64().unwrap_or(u64::MAX) as f64).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(q: &BigRational) -> f64 {
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

/// Decides `a ? b` from two float estimates when their gap clearly exceeds
/// the rounding error; `None` means the caller must compare exactly.
pub fn certified_cmp(a: f64, b: f64) -> Option<std::cmp::Ordering> {
    let scale = a.abs().max(b.abs()).max(1.0);
    let gap = a - b;
    if gap.abs() > 1e-9 * scale {
        Some(if gap > 0.0 {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Less
        })
    } else {
        None
    }
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `floor(q)` for a nonnegative rational, as an unsigned integer.
pub fn floor_nonneg(q: &BigRational) -> BigUint {
    let f = q.floor().to_integer();
    match f.sign() {
        Sign::Minus => BigUint::zero(),
        _ => f.magnitude().clone(),
    }
}

/// `ceil(q)` for a nonnegative rational.
pub fn ceil_nonneg(q: &BigRational) -> BigUint {
    let f = q.ceil().to_integer();
    match f.sign() {
        Sign::Minus => BigUint::zero(),
        _ => f.magnitude().clone(),
    }
}

/// `q^e` for a natural exponent.
pub fn pow_rational(q: &BigRational, e: u32) -> BigRational {
    BigRational::new(q.numer().pow(e), q.denom().pow(e))
}

/// Exact `n!`.
pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}
