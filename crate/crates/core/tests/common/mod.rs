//! Synthetic datasets and an independent brute-force search oracle.
//!
//! The oracle re-derives every comparison from first principles with big
//! integers (cross powers) and never calls the engine's own matching or
//! ordering code.

#![allow(dead_code, clippy::field_reassign_with_default)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use nfdb_core::completeness::CompletenessRecord;
use nfdb_core::groups::{transitive_count, GroupId};
use nfdb_core::model::{
    ClassGroupStructure, FactoredInteger, FieldRecord, PrimePowerProduct, SignedDiscriminant,
};
use nfdb_core::query::{
    ClassDisplay, DegreeFilter, PrimeSelector, RamConstraint, SearchRequest, SortKey,
};
use nfdb_core::{check_complete, encode_group_set, execute_search, AlphaTable, Store};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A random valid record of degree 3..=5. `serial` makes the polynomial unique.
pub fn random_record(rng: &mut StdRng, serial: u64) -> FieldRecord {
    let n: u32 = rng.gen_range(3..=5);
    let t = rng.gen_range(1..=transitive_count(n).unwrap());
    let s = rng.gen_range(0..=n / 2);
    let mut factors: BTreeMap<u64, u32> = BTreeMap::new();
    let k = rng.gen_range(0..=3);
    for _ in 0..k {
        let p = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
        factors.insert(p, rng.gen_range(1..=5));
    }
    let absdisc = FactoredInteger::new(factors.into_iter().collect()).unwrap();
    let grd = if rng.gen_bool(0.7) {
        let terms = absdisc
            .factors()
            .iter()
            .map(|&(p, e)| {
                let extra = [q(0, 1), q(1, 2), q(1, 3), q(1, 1)][rng.gen_range(0..4)].clone();
                (p, q(e as i64, n as i64) + extra)
            })
            .collect();
        Some(PrimePowerProduct::new(terms).unwrap())
    } else {
        None
    };
    let mut polynomial = vec![BigInt::zero(); n as usize + 1];
    polynomial[0] = BigInt::one();
    polynomial[n as usize] = BigInt::from(serial as i64 + 1);
    polynomial[n as usize - 1] = BigInt::from(rng.gen_range(-3i64..=3));
    FieldRecord {
        id: None,
        degree: n,
        polynomial,
        group: GroupId::new(n, t).unwrap(),
        disc: SignedDiscriminant::new(s, absdisc),
        class_group: ClassGroupStructure::trivial(),
        narrow_class_group: None,
        local_data: BTreeMap::new(),
        grd,
    }
}

/// A store holding `size` random records, plus the stored copies.
pub fn random_store(rng: &mut StdRng, size: usize) -> (Store, Vec<FieldRecord>) {
    let mut store = Store::new();
    for i in 0..size {
        let r = random_record(rng, i as u64);
        store.insert_field(r).expect("synthetic records are valid");
    }
    let stored = store.records().cloned().collect();
    (store, stored)
}

fn random_rational(rng: &mut StdRng, lo: i64, hi: i64) -> BigRational {
    let den = rng.gen_range(1..=4);
    q(rng.gen_range(lo * den..=hi * den), den)
}

fn random_ram(rng: &mut StdRng) -> RamConstraint {
    let primes = if rng.gen_bool(0.6) {
        PrimeSelector::Single(SMALL_PRIMES[rng.gen_range(0..6)])
    } else {
        let lo = rng.gen_range(2..=20);
        PrimeSelector::Range(lo, lo + rng.gen_range(0..=15))
    };
    let exp_min = rng.gen_range(1..=3);
    RamConstraint {
        primes,
        exp_min,
        exp_max: exp_min + rng.gen_range(0..=3),
        may_be_zero: rng.gen_bool(0.5),
    }
}

/// A random valid request over the shapes of [`random_record`].
pub fn random_request(rng: &mut StdRng) -> SearchRequest {
    let mut req = SearchRequest::default();
    req.degrees = match rng.gen_range(0..3) {
        0 => DegreeFilter::Any,
        1 => DegreeFilter::Set(
            (0..rng.gen_range(1..=2))
                .map(|_| rng.gen_range(3..=5))
                .collect(),
        ),
        _ => {
            let min = rng.gen_range(2..=5);
            DegreeFilter::Range {
                min,
                max: if rng.gen_bool(0.5) {
                    Some(min + rng.gen_range(0..=2))
                } else {
                    None
                },
            }
        }
    };
    if rng.gen_bool(0.2) {
        let n = rng.gen_range(3..=5);
        let count = transitive_count(n).unwrap();
        req.groups = Some(
            (0..rng.gen_range(1..=3))
                .map(|_| GroupId::new(n, rng.gen_range(1..=count)).unwrap())
                .collect(),
        );
    }
    if rng.gen_bool(0.3) {
        req.signatures = Some(
            (0..rng.gen_range(1..=2))
                .map(|_| rng.gen_range(0..=2))
                .collect(),
        );
    }
    if rng.gen_bool(0.3) {
        req.absdisc_min = Some(BigUint::from(rng.gen_range(1u64..=2000)));
    }
    if rng.gen_bool(0.4) {
        req.absdisc_max = Some(BigUint::from(pow10_sample(rng, 1u64, 8)));
    }
    if rng.gen_bool(0.3) {
        req.rd_max = Some(random_rational(rng, 1, 60));
    }
    if rng.gen_bool(0.2) {
        req.grd_min = Some(random_rational(rng, 1, 20));
    }
    if rng.gen_bool(0.3) {
        req.grd_max = Some(random_rational(rng, 1, 80));
    }
    if let (Some(lo), Some(hi)) = (&req.absdisc_min, &req.absdisc_max) {
        if lo > hi {
            req.absdisc_min = None;
        }
    }
    if let (Some(lo), Some(hi)) = (&req.grd_min, &req.grd_max) {
        if lo > hi {
            req.grd_min = None;
        }
    }
    for _ in 0..rng.gen_range(0..=3) {
        req.ram.push(random_ram(rng));
    }
    req.only_listed_primes = !req.ram.is_empty() && rng.gen_bool(0.3);
    if rng.gen_bool(0.2) {
        req.max_ramified_prime = Some(rng.gen_range(2..=40));
    }
    req.sort = [SortKey::Rd, SortKey::Grd, SortKey::Absdisc][rng.gen_range(0..3)];
    req.display = ClassDisplay::Class;
    req
}

/// Uniform in `lo..=10^k` for a uniform `k` in `1..=max_exp`, so every
/// magnitude is well represented.
pub fn pow10_sample(rng: &mut StdRng, lo: u64, max_exp: u32) -> u64 {
    let k = rng.gen_range(1..=max_exp);
    rng.gen_range(lo..=10u64.pow(k))
}

fn is_prime_naive(n: u64) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn ord(r: &FieldRecord, p: u64) -> u32 {
    r.disc
        .absdisc
        .factors()
        .iter()
        .find(|(q, _)| *q == p)
        .map(|(_, e)| *e)
        .unwrap_or(0)
}

fn absdisc_of(r: &FieldRecord) -> BigUint {
    r.disc
        .absdisc
        .factors()
        .iter()
        .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
}

/// `prod p^(e_p)` raised to a common denominator: returns `(L, N)` with value `N^(1/L)`.
fn as_radical(terms: &[(u64, BigRational)]) -> (u32, BigUint) {
    let l = terms
        .iter()
        .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()))
        .to_u32()
        .unwrap();
    let n = terms.iter().fold(BigUint::one(), |acc, (p, e)| {
        let k = (e * BigRational::from_integer(BigInt::from(l)))
            .to_integer()
            .to_u32()
            .unwrap();
        acc * BigUint::from(*p).pow(k)
    });
    (l, n)
}

/// Compares `a^(1/la)` with `b^(1/lb)`.
fn cmp_radicals(a: &(u32, BigUint), b: &(u32, BigUint)) -> Ordering {
    a.1.pow(b.0).cmp(&b.1.pow(a.0))
}

fn rational_radical(x: &BigRational) -> Option<(u32, BigUint, BigUint)> {
    let num = x.numer().to_biguint()?;
    let den = x.denom().to_biguint()?;
    Some((1, num, den))
}

/// Compares `v^(1/l)` with a nonnegative rational.
fn cmp_radical_rational(v: &(u32, BigUint), x: &BigRational) -> Ordering {
    let (_, num, den) = rational_radical(x).unwrap();
    (&v.1 * den.pow(v.0)).cmp(&num.pow(v.0))
}

fn rd_radical(r: &FieldRecord) -> (u32, BigUint) {
    (r.degree, absdisc_of(r))
}

fn grd_radical(r: &FieldRecord) -> Option<(u32, BigUint)> {
    r.grd.as_ref().map(|g| as_radical(g.terms()))
}

fn ram_holds(c: &RamConstraint, r: &FieldRecord) -> bool {
    let ok = |e: u32| (c.exp_min <= e && e <= c.exp_max) || (e == 0 && c.may_be_zero);
    match c.primes {
        PrimeSelector::Single(p) => ok(ord(r, p)),
        PrimeSelector::Range(lo, hi) => (lo..=hi)
            .filter(|&p| is_prime_naive(p))
            .all(|p| ok(ord(r, p))),
    }
}

/// Brute-force evaluation of one request against one record.
pub fn oracle_matches(req: &SearchRequest, r: &FieldRecord) -> bool {
    let degree_ok = match &req.degrees {
        DegreeFilter::Any => true,
        DegreeFilter::Set(s) => s.contains(&r.degree),
        DegreeFilter::Range { min, max } => r.degree >= *min && max.is_none_or(|m| r.degree <= m),
    };
    if !degree_ok {
        return false;
    }
    if req.groups.as_ref().is_some_and(|g| !g.contains(&r.group)) {
        return false;
    }
    if req
        .signatures
        .as_ref()
        .is_some_and(|s| !s.contains(&r.disc.s))
    {
        return false;
    }
    let d = absdisc_of(r);
    if req.absdisc_min.as_ref().is_some_and(|lo| d < *lo)
        || req.absdisc_max.as_ref().is_some_and(|hi| d > *hi)
    {
        return false;
    }
    if let Some(b) = &req.rd_max {
        if cmp_radical_rational(&rd_radical(r), b) == Ordering::Greater {
            return false;
        }
    }
    if req.grd_min.is_some() || req.grd_max.is_some() {
        let Some(g) = grd_radical(r) else {
            return false;
        };
        if req
            .grd_min
            .as_ref()
            .is_some_and(|lo| cmp_radical_rational(&g, lo) == Ordering::Less)
        {
            return false;
        }
        if req
            .grd_max
            .as_ref()
            .is_some_and(|hi| cmp_radical_rational(&g, hi) == Ordering::Greater)
        {
            return false;
        }
    }
    let primes: Vec<u64> = r.disc.absdisc.factors().iter().map(|(p, _)| *p).collect();
    if let Some(m) = req.max_ramified_prime {
        if primes.iter().any(|&p| p > m) {
            return false;
        }
    }
    if req.only_listed_primes {
        let listed = |p: u64| {
            req.ram.iter().any(|c| match c.primes {
                PrimeSelector::Single(q) => q == p,
                PrimeSelector::Range(lo, hi) => lo <= p && p <= hi,
            })
        };
        if !primes.iter().all(|&p| listed(p)) {
            return false;
        }
    }
    req.ram.iter().all(|c| ram_holds(c, r))
}

/// Brute-force ordering by key, then `|D|`, degree, T-number, polynomial text, id.
pub fn oracle_order(rows: &mut [FieldRecord], key: SortKey) {
    rows.sort_by(|a, b| {
        let primary = match key {
            SortKey::Rd => cmp_radicals(&rd_radical(a), &rd_radical(b)),
            SortKey::Absdisc => absdisc_of(a).cmp(&absdisc_of(b)),
            SortKey::Grd => match (grd_radical(a), grd_radical(b)) {
                (Some(x), Some(y)) => cmp_radicals(&x, &y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            },
        };
        primary
            .then_with(|| absdisc_of(a).cmp(&absdisc_of(b)))
            .then_with(|| a.degree.cmp(&b.degree))
            .then_with(|| a.group.t_number().cmp(&b.group.t_number()))
            .then_with(|| a.polynomial_text().cmp(&b.polynomial_text()))
            .then_with(|| a.id.cmp(&b.id))
    });
}

/// Expected ids for `req`, in order.
pub fn oracle_search(records: &[FieldRecord], req: &SearchRequest) -> Vec<u64> {
    let mut rows: Vec<FieldRecord> = records
        .iter()
        .filter(|r| oracle_matches(req, r))
        .cloned()
        .collect();
    oracle_order(&mut rows, req.sort);
    rows.iter().map(|r| r.id.unwrap().0).collect()
}

/// Ledger rows that are true of `universe` restricted to `present`: each row
/// only covers regions where every universe field is present.
pub fn truthful_ledger(
    rng: &mut StdRng,
    universe: &[FieldRecord],
    present: &BTreeSet<u64>,
    rows: usize,
) -> Vec<CompletenessRecord> {
    let missing: Vec<&FieldRecord> = universe
        .iter()
        .filter(|r| !present.contains(&r.id.unwrap().0))
        .collect();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < rows && attempts < rows * 20 {
        attempts += 1;
        let n: u32 = rng.gen_range(3..=5);
        let count = transitive_count(n).unwrap();
        let row = match rng.gen_range(0..4) {
            0 | 1 => {
                let s = rng.gen_range(0..=n / 2);
                // largest truthful bound: just below the smallest missing |D|
                let limit = missing
                    .iter()
                    .filter(|r| r.degree == n && r.disc.s == s)
                    .map(|r| absdisc_of(r))
                    .min();
                let proposed = BigUint::from(pow10_sample(rng, 1u64, 7));
                let bound = match limit {
                    Some(m) if proposed >= m => m - 1u32,
                    _ => proposed,
                };
                if rng.gen_bool(0.5) {
                    CompletenessRecord::A { n, s, bound }
                } else {
                    let group = GroupId::new(n, rng.gen_range(1..=count)).unwrap();
                    let limit = missing
                        .iter()
                        .filter(|r| r.degree == n && r.disc.s == s && r.group == group)
                        .map(|r| absdisc_of(r))
                        .min();
                    let bound = match limit {
                        Some(m) if bound >= m => m - 1u32,
                        _ => bound,
                    };
                    CompletenessRecord::B { n, s, group, bound }
                }
            }
            2 => {
                let primes: BTreeSet<u64> = (0..rng.gen_range(1..=4))
                    .map(|_| SMALL_PRIMES[rng.gen_range(0..6)])
                    .collect();
                let mut groups: BTreeSet<u32> = (0..rng.gen_range(1..=count))
                    .map(|_| rng.gen_range(1..=count))
                    .collect();
                // drop groups with a missing field unramified outside the set
                for r in &missing {
                    if r.degree == n
                        && r.disc
                            .absdisc
                            .factors()
                            .iter()
                            .all(|(p, _)| primes.contains(p))
                    {
                        groups.remove(&r.group.t_number());
                    }
                }
                if groups.is_empty() {
                    continue;
                }
                CompletenessRecord::C {
                    n,
                    primes,
                    groups: nfdb_core::encode_group_set(n, groups).unwrap(),
                }
            }
            _ => {
                let group = GroupId::new(n, rng.gen_range(1..=count)).unwrap();
                let mut bound = random_rational(rng, 1, 60);
                for r in missing.iter().filter(|r| r.group == group) {
                    if let Some(g) = grd_radical(r) {
                        if cmp_radical_rational(&g, &bound) != Ordering::Greater {
                            // shrink below the missing field's grd
                            bound = BigRational::new(BigInt::one(), BigInt::from(2));
                        }
                    } else {
                        // a missing field without grd cannot be excluded by a grd bound
                        bound = BigRational::new(BigInt::one(), BigInt::from(2));
                    }
                }
                CompletenessRecord::D { n, group, bound }
            }
        };
        if !out.contains(&row) {
            out.push(row);
        }
    }
    out
}

/// Per-group `alpha` values that hold for every field of `universe` with a
/// known grd, rounded up to hundredths.
pub fn truthful_alpha(universe: &[FieldRecord]) -> AlphaTable {
    let mut worst: BTreeMap<GroupId, f64> = BTreeMap::new();
    for r in universe {
        let Some(g) = &r.grd else { continue };
        let ln_rd = (absdisc_of(r).to_f64().unwrap()).ln() / r.degree as f64;
        let ratio = if ln_rd > 0.0 {
            g.ln_estimate() / ln_rd
        } else {
            1.0
        };
        let e = worst.entry(r.group).or_insert(1.0);
        *e = e.max(ratio);
    }
    let mut table = nfdb_core::AlphaTable::new();
    for (g, a) in worst {
        let hundredths = (a * 100.0).ceil() as i64 + 1;
        table.insert(g, q(hundredths, 100)).unwrap();
    }
    table
}

/// A request the record `w` satisfies, with a mix of bound styles.
pub fn request_matching(rng: &mut StdRng, w: &FieldRecord) -> SearchRequest {
    let n = w.degree;
    let d = w.absdisc().clone();
    let d_f = d.to_f64().unwrap();
    let mut req = SearchRequest {
        degrees: DegreeFilter::Set([n].into()),
        ..Default::default()
    };
    match rng.gen_range(0..4) {
        0 => req.absdisc_max = Some(&d * BigUint::from(rng.gen_range(1u32..=4))),
        1 => {
            // a rational at or above rd
            let rd = d_f.powf(1.0 / n as f64);
            req.rd_max = Some(q((rd * 100.0).ceil() as i64 + rng.gen_range(0..200), 100));
        }
        2 if w.grd.is_some() => {
            let g = w.grd.as_ref().unwrap().to_f64();
            req.grd_max = Some(q((g * 100.0).ceil() as i64 + rng.gen_range(0..200), 100));
        }
        _ => {
            let primes = w.ramified_primes();
            req.only_listed_primes = true;
            req.ram = primes
                .iter()
                .chain([SMALL_PRIMES[rng.gen_range(0..6)]].iter())
                .map(|&p| RamConstraint {
                    primes: PrimeSelector::Single(p),
                    exp_min: 1,
                    exp_max: 9,
                    may_be_zero: true,
                })
                .collect();
            if req.ram.is_empty() {
                req.max_ramified_prime = Some(1);
            }
        }
    }
    if rng.gen_bool(0.3) {
        req.groups = Some([w.group].into());
    }
    if rng.gen_bool(0.3) {
        req.signatures = Some([w.disc.s].into());
    }
    if rng.gen_bool(0.3) {
        req.absdisc_min = Some(&d / BigUint::from(rng.gen_range(1u32..=1000)) + 1u32);
    }
    req
}

pub fn random_row(rng: &mut StdRng) -> CompletenessRecord {
    let n = rng.gen_range(3..=5);
    let count = transitive_count(n).unwrap();
    let group = GroupId::new(n, rng.gen_range(1..=count)).unwrap();
    match rng.gen_range(0..4) {
        0 => CompletenessRecord::A {
            n,
            s: rng.gen_range(0..=n / 2),
            bound: pow10_sample(rng, 1, 6).into(),
        },
        1 => CompletenessRecord::B {
            n,
            s: rng.gen_range(0..=n / 2),
            group,
            bound: pow10_sample(rng, 1, 6).into(),
        },
        2 => CompletenessRecord::C {
            n,
            primes: (0..rng.gen_range(1..=5))
                .map(|_| SMALL_PRIMES[rng.gen_range(0..6)])
                .collect(),
            groups: encode_group_set(
                n,
                (0..rng.gen_range(1..=count)).map(|_| rng.gen_range(1..=count)),
            )
            .unwrap(),
        },
        _ => CompletenessRecord::D {
            n,
            group,
            bound: q(rng.gen_range(1..=4000), rng.gen_range(1..=20)),
        },
    }
}

pub fn random_alpha(rng: &mut StdRng) -> AlphaTable {
    let mut t = AlphaTable::new();
    for n in 3..=5 {
        for g in GroupId::all_of_degree(n).unwrap() {
            if rng.gen_bool(0.5) {
                t.insert(g, q(rng.gen_range(100..=300), 100)).unwrap();
            }
        }
    }
    t
}

pub fn small_request(rng: &mut StdRng) -> SearchRequest {
    let mut req = random_request(rng);
    if rng.gen_bool(0.7) {
        req.degrees = DegreeFilter::Set([rng.gen_range(3..=5)].into());
    }
    req
}

pub fn tighten(rng: &mut StdRng, req: &SearchRequest) -> SearchRequest {
    let mut t = req.clone();
    let shrink = |x: &BigRational, rng: &mut StdRng| x * q(rng.gen_range(1..=100), 100);
    match rng.gen_range(0..6) {
        0 => {
            t.absdisc_max = Some(match &t.absdisc_max {
                Some(m) => m / BigUint::from(rng.gen_range(1u32..=10)),
                None => BigUint::from(pow10_sample(rng, 1, 8)),
            })
        }
        1 => {
            t.rd_max = Some(match &t.rd_max {
                Some(m) => shrink(m, rng),
                None => q(rng.gen_range(100..=6000), 100),
            })
        }
        2 => {
            t.grd_max = Some(match &t.grd_max {
                Some(m) => shrink(m, rng),
                None => q(rng.gen_range(100..=8000), 100),
            })
        }
        3 => {
            t.signatures = Some(match &t.signatures {
                Some(s) => s.iter().take(1).copied().collect(),
                None => [rng.gen_range(0..=2)].into(),
            })
        }
        4 => {
            let m = rng.gen_range(2..=40);
            t.max_ramified_prime = Some(t.max_ramified_prime.map_or(m, |x| x.min(m)));
        }
        _ => {
            if let Some(gs) = &t.groups {
                t.groups = Some(gs.iter().take(1).copied().collect());
            } else if let Some(n) = t.degrees.finite_set().and_then(|s| s.into_iter().next()) {
                t.groups = Some([GroupId::new(n, 1).unwrap()].into());
            }
        }
    }
    if let (Some(lo), Some(hi)) = (&t.grd_min, &t.grd_max) {
        if lo > hi {
            t.grd_min = None;
        }
    }
    if let (Some(lo), Some(hi)) = (&t.absdisc_min, &t.absdisc_max) {
        if lo > hi {
            t.absdisc_max = Some(lo.clone());
        }
    }
    t
}

/// A store holding `records` except the ids in `skip`, plus the given ledger and alpha values.
pub fn store_without(
    records: &[FieldRecord],
    skip: &BTreeSet<u64>,
    ledger: &[CompletenessRecord],
    alpha: &AlphaTable,
) -> Store {
    let mut s = Store::new();
    for r in records.iter().filter(|r| !skip.contains(&r.id.unwrap().0)) {
        let mut r = r.clone();
        r.id = None;
        s.insert_field(r).unwrap();
    }
    for row in ledger {
        s.add_completeness(row.clone()).unwrap();
    }
    for (g, a) in alpha.iter() {
        s.add_alpha(*g, a.clone()).unwrap();
    }
    s
}

/// Withholds one record of a random universe behind a truthful ledger.
/// Requests the withheld record satisfies must not be proven complete; a
/// request that is proven complete must return exactly the universe's
/// matches. Returns the number of complete verdicts checked.
pub fn withheld_round(seed: u64) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (_, universe) = random_store(&mut rng, 80);
    let w = universe.choose(&mut rng).unwrap().clone();
    let wid = w.id.unwrap().0;
    let present: BTreeSet<u64> = universe
        .iter()
        .map(|r| r.id.unwrap().0)
        .filter(|&i| i != wid)
        .collect();
    let ledger = truthful_ledger(&mut rng, &universe, &present, 40);
    let alpha = truthful_alpha(&universe);
    let store = store_without(&universe, &[wid].into(), &ledger, &alpha);
    for _ in 0..40 {
        let req = request_matching(&mut rng, &w);
        if !oracle_matches(&req, &w) {
            return Err(format!(
                "seed {seed}: generated request misses the withheld record: {req:?}"
            ));
        }
        let v = check_complete(&req, store.ledger(), store.alpha_table());
        if v.complete {
            return Err(format!(
                "seed {seed}: complete despite a withheld match\n{req:?}\n{}",
                v.trace.join("\n")
            ));
        }
    }
    let mut checked = 0;
    for _ in 0..40 {
        let req = random_request(&mut rng);
        let result = execute_search(&store, &req).map_err(|e| e.to_string())?;
        if result.complete {
            checked += 1;
            let got: Vec<String> = result.rows.iter().map(|r| r.polynomial_text()).collect();
            let want: Vec<String> = oracle_search(&universe, &req)
                .iter()
                .map(|id| {
                    universe
                        .iter()
                        .find(|r| r.id.unwrap().0 == *id)
                        .unwrap()
                        .polynomial_text()
                })
                .collect();
            if got != want {
                return Err(format!(
                    "seed {seed}: complete but rows differ from the universe: {req:?}"
                ));
            }
        }
    }
    Ok(checked)
}

/// Adds rows to a random ledger; a complete verdict must survive. Returns
/// whether the verdict went from incomplete to complete.
pub fn growth_round(rng: &mut StdRng) -> Result<bool, String> {
    let alpha = random_alpha(rng);
    let mut ledger: Vec<CompletenessRecord> =
        (0..rng.gen_range(0..12)).map(|_| random_row(rng)).collect();
    let req = small_request(rng);
    let before = check_complete(&req, &ledger, &alpha).complete;
    for _ in 0..rng.gen_range(1..6) {
        ledger.push(random_row(rng));
    }
    let after = check_complete(&req, &ledger, &alpha).complete;
    if before && !after {
        return Err(format!(
            "lost completeness after adding rows: {req:?}\n{ledger:?}"
        ));
    }
    Ok(!before && after)
}

/// Tightens a complete request; it must stay complete. Returns whether the
/// starting request was complete.
pub fn tightening_round(rng: &mut StdRng) -> Result<bool, String> {
    let alpha = random_alpha(rng);
    let ledger: Vec<CompletenessRecord> =
        (0..rng.gen_range(0..15)).map(|_| random_row(rng)).collect();
    let req = small_request(rng);
    if !check_complete(&req, &ledger, &alpha).complete {
        return Ok(false);
    }
    let t = tighten(rng, &req);
    if !check_complete(&t, &ledger, &alpha).complete {
        return Err(format!(
            "tightening lost completeness: {req:?}\n->\n{t:?}\n{ledger:?}"
        ));
    }
    Ok(true)
}
