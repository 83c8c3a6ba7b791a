//! Exact mass-heuristic calculations for `S_n` fields.
//!
//! The mass of a local algebra is `1/|Aut|`. At the infinite place the mass
//! of `R^(n-2s) C^s` is `1/((n-2s)! s! 2^s)`. At a prime `p > n` every
//! algebra is tame and the total mass with discriminant exponent `c` is the
//! number of partitions of `n` into `n - c` parts. Wild masses (`p <= n`) are
//! ingested constants held in a [`LocalMassTable`].

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorial, is_prime, round_decimal};
use crate::error::MassError;
use crate::model::{FieldRecord, Prime};

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Mass of `R^(n-2s) C^s`.
pub fn mass_infinity(n: u32, s: u32) -> Result<BigRational, MassError> {
    if 2 * s > n {
        return Err(MassError::SignatureOutOfRange { n, s });
    }
    let den = factorial(n - 2 * s) * factorial(s) * (BigUint::one() << s);
    Ok(ratio(1, den))
}

/// `sum_s mass_infinity(n, s)`.
pub fn mass_infinity_total(n: u32) -> BigRational {
    (0..=n / 2)
        .map(|s| mass_infinity(n, s).expect("s within range"))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Number of partitions of `n` into exactly `k` parts.
pub fn partitions_with_parts(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    if n == 0 {
        return if k == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    // p(i, j) = p(i - 1, j - 1) + p(i - j, j)
    let (n, k) = (n as usize, k as usize);
    let mut table = vec![vec![BigUint::zero(); k + 1]; n + 1];
    table[0][0] = BigUint::one();
    for i in 1..=n {
        for j in 1..=k.min(i) {
            let with_one = table[i - 1][j - 1].clone();
            let all_big = table[i - j][j].clone();
            table[i][j] = with_one + all_big;
        }
    }
    table[n][k].clone()
}

/// Tame local mass `mu_{n,p^c}` for `n < p`.
pub fn tame_mass(n: u32, p: Prime, c: u32) -> Result<BigRational, MassError> {
    if n == 0 {
        return Err(MassError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(MassError::NotPrime(p));
    }
    if u64::from(n) >= p {
        return Err(MassError::NotTame { n, p });
    }
    if c > n - 1 {
        return Err(MassError::ExponentOutOfRange { n, c, max: n - 1 });
    }
    Ok(BigRational::from_integer(
        partitions_with_parts(n, n - c).into(),
    ))
}

/// `delta_n`: 1 for `n <= 2`, else 1/2.
pub fn delta(n: u32) -> BigRational {
    if n <= 2 {
        BigRational::one()
    } else {
        ratio(1, 2)
    }
}

/// Wild masses for one `(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WildRow {
    /// `mu_{n,p^c}` by exponent `c`; missing exponents have mass 0.
    ByExponent(BTreeMap<u32, BigRational>),
    /// Only `mu_{n,p^*}` is known.
    TotalOnly(BigRational),
}

/// Ingested wild local masses keyed by `(n, p)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalMassTable {
    wild: BTreeMap<(u32, Prime), WildRow>,
}

/// Where a local mass came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassSource {
    TameDerived,
    WildIngested,
}

impl LocalMassTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `mu_{n,p^c}`. Returns `false` when the identical value was
    /// already present; conflicting values are rejected.
    pub fn insert(&mut self, n: u32, p: Prime, c: u32, mass: BigRational) -> Result<bool, String> {
        let row = self
            .wild
            .entry((n, p))
            .or_insert_with(|| WildRow::ByExponent(BTreeMap::new()));
        match row {
            WildRow::TotalOnly(_) => Err(format!("n={n} p={p} already has a total-only row")),
            WildRow::ByExponent(map) => match map.get(&c) {
                Some(old) if *old == mass => Ok(false),
                Some(old) => Err(format!("n={n} p={p} c={c} already {old}")),
                None => {
                    map.insert(c, mass);
                    Ok(true)
                }
            },
        }
    }

    /// Records only the total `mu_{n,p^*}`.
    pub fn insert_total(&mut self, n: u32, p: Prime, total: BigRational) -> Result<bool, String> {
        match self.wild.get(&(n, p)) {
            Some(WildRow::TotalOnly(old)) if *old == total => Ok(false),
            Some(_) => Err(format!("n={n} p={p} already present")),
            None => {
                self.wild.insert((n, p), WildRow::TotalOnly(total));
                Ok(true)
            }
        }
    }

    pub fn row(&self, n: u32, p: Prime) -> Option<&WildRow> {
        self.wild.get(&(n, p))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(u32, Prime), &WildRow)> {
        self.wild.iter()
    }

    pub fn source(&self, n: u32, p: Prime) -> MassSource {
        if u64::from(n) < p {
            MassSource::TameDerived
        } else {
            MassSource::WildIngested
        }
    }

    /// `mu_{n,p^c}` for every exponent `c` that can occur, tame or wild.
    pub fn local_masses(&self, n: u32, p: Prime) -> Result<Vec<BigRational>, MassError> {
        if u64::from(n) < p {
            return (0..n).map(|c| tame_mass(n, p, c)).collect();
        }
        match self.wild.get(&(n, p)) {
            None => Err(MassError::WildMassMissing { n, p }),
            Some(WildRow::TotalOnly(_)) => Err(MassError::TotalOnly { n, p }),
            Some(WildRow::ByExponent(map)) => {
                let top = map.keys().next_back().copied().unwrap_or(0);
                Ok((0..=top)
                    .map(|c| map.get(&c).cloned().unwrap_or_else(BigRational::zero))
                    .collect())
            }
        }
    }

    /// `mu_{n,p^c}` for one exponent.
    pub fn local_mass(&self, n: u32, p: Prime, c: u32) -> Result<BigRational, MassError> {
        if u64::from(n) < p {
            return tame_mass(n, p, c);
        }
        match self.wild.get(&(n, p)) {
            None => Err(MassError::WildMassMissing { n, p }),
            Some(WildRow::TotalOnly(_)) => Err(MassError::TotalOnly { n, p }),
            Some(WildRow::ByExponent(map)) => {
                Ok(map.get(&c).cloned().unwrap_or_else(BigRational::zero))
            }
        }
    }
}

/// `mu_{n,p^*}`, the total mass of degree-`n` algebras over `Q_p`.
pub fn total_local_mass(
    n: u32,
    p: Prime,
    table: &LocalMassTable,
) -> Result<BigRational, MassError> {
    if n == 0 {
        return Err(MassError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(MassError::NotPrime(p));
    }
    if u64::from(n) < p {
        return Ok(int(partition_count(n)));
    }
    match table.row(n, p) {
        None => Err(MassError::WildMassMissing { n, p }),
        Some(WildRow::TotalOnly(total)) => Ok(total.clone()),
        Some(WildRow::ByExponent(map)) => Ok(map.values().fold(BigRational::zero(), |a, b| a + b)),
    }
}

fn partition_count(n: u32) -> BigUint {
    (0..=n).map(|k| partitions_with_parts(n, k)).sum()
}

/// Right-hand side of the mass heuristic, with its applicability flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassPrediction {
    pub value: BigRational,
    /// False when the targeted discriminant is a square, where the heuristic
    /// does not apply.
    pub applicable: bool,
}

impl MassPrediction {
    pub fn rendering(&self) -> String {
        round_decimal(&self.value, 2)
    }
}

/// `delta_n mu_{n,-^s} prod_p mu_{n,p^{c_p}}`.
///
/// `s = None` sums over all signatures and a `None` exponent sums over all
/// exponents at that prime, giving the aggregated prediction for
/// `-^* p_1^* ... p_k^*`.
pub fn predict_count(
    n: u32,
    s: Option<u32>,
    exponents: &BTreeMap<Prime, Option<u32>>,
    table: &LocalMassTable,
) -> Result<MassPrediction, MassError> {
    if n == 0 {
        return Err(MassError::ZeroDegree);
    }
    let mut value = delta(n);
    value *= match s {
        Some(s) => mass_infinity(n, s)?,
        None => mass_infinity_total(n),
    };
    let mut square = s.map(|s| s % 2 == 0);
    for (&p, &c) in exponents {
        value *= match c {
            Some(c) => {
                if let Some(sq) = square.as_mut() {
                    *sq &= c % 2 == 0;
                }
                table.local_mass(n, p, c)?
            }
            None => {
                square = None;
                total_local_mass(n, p, table)?
            }
        };
    }
    Ok(MassPrediction {
        value,
        applicable: square != Some(true),
    })
}

/// Constant `C` and growth rate `g` with prediction `~ C g^k` when the first
/// `k` primes may ramify.
///
/// `wild_primes` are the primes `<= n` (all must be listed); the growth rate
/// is the tame total mass, the number of partitions of `n`.
pub fn prime_cut_constant(
    n: u32,
    wild_primes: &[Prime],
    table: &LocalMassTable,
) -> Result<(BigRational, BigRational), MassError> {
    let exps: BTreeMap<Prime, Option<u32>> = wild_primes.iter().map(|&p| (p, None)).collect();
    let base = predict_count(n, None, &exps, table)?.value;
    let growth = int(partition_count(n));
    let k = wild_primes.len() as u32;
    let scale = BigRational::new(growth.numer().pow(k), BigInt::one());
    Ok((base / scale, growth))
}

/// `delta_n mu_{n,-^*} T^2` for two tame primes, `T` the number of partitions of `n`.
pub fn global_mass_two_tame(n: u32) -> BigRational {
    let t = int(partition_count(n));
    delta(n) * mass_infinity_total(n) * t.clone() * t
}

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(Prime),
}

/// One row of an observed-versus-predicted comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub place: Place,
    /// Predicted relative masses by exponent (by `s` at infinity, scaled by `n!`).
    pub predicted: Vec<BigRational>,
    /// Observed counts by exponent, rescaled so the row total matches the
    /// predicted total.
    pub observed: Vec<BigRational>,
    pub total: BigRational,
}

/// Compares observed local discriminant frequencies in `records` with the
/// local masses.
pub fn frequency_comparison(
    records: &[FieldRecord],
    n: u32,
    places: &[Place],
    table: &LocalMassTable,
) -> Result<Vec<ComparisonRow>, MassError> {
    if records.is_empty() {
        return Err(MassError::EmptyRecords);
    }
    if let Some(r) = records.iter().find(|r| r.degree != n) {
        return Err(MassError::DegreeMismatch(r.id.map(|i| i.0).unwrap_or(0)));
    }
    let count = int(records.len() as u64);
    let mut rows = Vec::with_capacity(places.len());
    for &place in places {
        let (predicted, tallies): (Vec<BigRational>, Vec<u64>) = match place {
            Place::Infinity => {
                let nf = int(factorial(n));
                let predicted: Vec<BigRational> = (0..=n / 2)
                    .map(|s| mass_infinity(n, s).map(|m| m * &nf))
                    .collect::<Result<_, _>>()?;
                let mut tallies = vec![0u64; predicted.len()];
                for r in records {
                    let s = r.disc.s as usize;
                    if s >= tallies.len() {
                        return Err(MassError::SignatureOutOfRange { n, s: r.disc.s });
                    }
                    tallies[s] += 1;
                }
                (predicted, tallies)
            }
            Place::Prime(p) => {
                let mut predicted = table.local_masses(n, p)?;
                let mut tallies = vec![0u64; predicted.len()];
                for r in records {
                    let c = r.disc.absdisc.ord(p) as usize;
                    if c >= tallies.len() {
                        tallies.resize(c + 1, 0);
                        predicted.resize(c + 1, BigRational::zero());
                    }
                    tallies[c] += 1;
                }
                (predicted, tallies)
            }
        };
        let total = predicted.iter().fold(BigRational::zero(), |a, b| a + b);
        let observed = tallies.iter().map(|&k| int(k) * &total / &count).collect();
        rows.push(ComparisonRow {
            place,
            predicted,
            observed,
            total,
        });
    }
    Ok(rows)
}
