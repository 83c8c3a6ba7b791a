//! The completeness ledger and the check deciding whether a search result is
//! provably complete.
//!
//! Ledger rows come in four kinds:
//!
//! * `A (n, s, B)`: complete for degree `n`, `s` complex places, `|D| <= B`;
//! * `B (n, s, G, B)`: as `A`, restricted to Galois group `G`;
//! * `C (n, S, L)`: complete for degree-`n` fields unramified outside `S`
//!   with group in `L`;
//! * `D (n, G, B)`: complete for degree-`n` fields with group `G` and
//!   `grd <= B`.
//!
//! For each degree of a request the checker keeps a residual set of
//! `(group, signature)` cells, each with the smallest `|D|` not yet covered,
//! and discharges cells with: `A`/`B` bounds; `D` bounds, directly or through
//! `grd <= rd^alpha(G)`; per-discriminant `C` lookups when at most ten
//! discriminant values remain; and `C` lookups when the ramifying primes are
//! bounded.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{floor_nonneg, pow_rational, primes_between, rational_text};
use crate::encoding::GroupSetCode;
use crate::groups::{transitive_count, GroupId};
use crate::model::Prime;
use crate::query::SearchRequest;

/// Residual discriminant count at or below which each value is checked
/// against `C` rows individually.
pub const RESIDUAL_DISCRIMINANT_LIMIT: u64 = 10;

/// Largest prime list the checker will materialize from a prime bound.
const PRIME_LIST_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CompletenessRecord {
    A {
        n: u32,
        s: u32,
        bound: BigUint,
    },
    B {
        n: u32,
        s: u32,
        group: GroupId,
        bound: BigUint,
    },
    C {
        n: u32,
        primes: BTreeSet<Prime>,
        groups: GroupSetCode,
    },
    D {
        n: u32,
        group: GroupId,
        bound: BigRational,
    },
}

impl CompletenessRecord {
    pub fn kind(&self) -> char {
        match self {
            CompletenessRecord::A { .. } => 'A',
            CompletenessRecord::B { .. } => 'B',
            CompletenessRecord::C { .. } => 'C',
            CompletenessRecord::D { .. } => 'D',
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            CompletenessRecord::A { n, .. }
            | CompletenessRecord::B { n, .. }
            | CompletenessRecord::C { n, .. }
            | CompletenessRecord::D { n, .. } => *n,
        }
    }

    /// Checks the row is internally consistent.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.degree();
        if transitive_count(n).is_none() {
            return Err(format!("no group table for degree {n}"));
        }
        match self {
            CompletenessRecord::A { s, .. } | CompletenessRecord::B { s, .. } if 2 * s > n => {
                Err(format!("s={s} exceeds n/2 for n={n}"))
            }
            CompletenessRecord::B { group, .. } | CompletenessRecord::D { group, .. }
                if group.degree() != n =>
            {
                Err(format!("group {group} is not of degree {n}"))
            }
            CompletenessRecord::C { groups, .. } if groups.degree() != n => Err(format!(
                "group set is for degree {}, row for {n}",
                groups.degree()
            )),
            CompletenessRecord::D { bound, .. } if bound.is_negative() => {
                Err("negative grd bound".to_string())
            }
            _ => Ok(()),
        }
    }
}

/// `alpha(G)` constants: `grd(K) <= rd(K)^alpha(G)` for fields with group `G`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphaTable {
    values: BTreeMap<GroupId, BigRational>,
}

impl AlphaTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` for an identical re-insert; rejects `alpha < 1` and
    /// conflicting values.
    pub fn insert(&mut self, group: GroupId, alpha: BigRational) -> Result<bool, String> {
        if alpha < BigRational::one() {
            return Err(format!(
                "alpha({group}) = {} is below 1",
                rational_text(&alpha)
            ));
        }
        match self.values.get(&group) {
            Some(old) if *old == alpha => Ok(false),
            Some(old) => Err(format!("alpha({group}) already {}", rational_text(old))),
            None => {
                self.values.insert(group, alpha);
                Ok(true)
            }
        }
    }

    pub fn get(&self, group: &GroupId) -> Option<&BigRational> {
        self.values.get(group)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupId, &BigRational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompletenessError {
    #[error("no alpha available for {0}")]
    NoAlpha(GroupId),
}

/// The exact real number `base^exponent` with rational base and exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPower {
    pub base: BigRational,
    pub exponent: BigRational,
}

impl RationalPower {
    pub fn rational(q: BigRational) -> Self {
        RationalPower {
            base: q,
            exponent: BigRational::one(),
        }
    }

    /// `value^(1/n)`.
    pub fn root(value: BigUint, n: u32) -> Self {
        RationalPower {
            base: BigRational::from_integer(value.into()),
            exponent: BigRational::new(BigInt::one(), BigInt::from(n)),
        }
    }

    pub fn powf(&self, e: &BigRational) -> Self {
        RationalPower {
            base: self.base.clone(),
            exponent: &self.exponent * e,
        }
    }

    /// Exact comparison with a nonnegative rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        if self.exponent.is_zero() {
            return BigRational::one().cmp(q);
        }
        let a = self.exponent.numer().to_u32().expect("small exponent");
        let b = self.exponent.denom().to_u32().expect("small exponent");
        // (x/y)^(a/b) vs u/v  <=>  x^a v^b vs u^b y^a
        let x = self.base.numer().pow(a);
        let y = self.base.denom().pow(a);
        let u = q.numer().pow(b);
        let v = q.denom().pow(b);
        (x * v).cmp(&(u * y))
    }

    pub fn to_f64(&self) -> f64 {
        self.base
            .to_f64()
            .unwrap_or(f64::MAX)
            .powf(self.exponent.to_f64().unwrap_or(1.0))
    }
}

/// Bound on `grd` implied by `rd <= rd_bound` for fields with group `G`.
pub fn grd_bound_from_rd(
    group: GroupId,
    rd_bound: &RationalPower,
    alpha: &AlphaTable,
) -> Result<RationalPower, CompletenessError> {
    let a = alpha.get(&group).ok_or(CompletenessError::NoAlpha(group))?;
    Ok(rd_bound.powf(a))
}

/// Since `rd <= grd`, a `grd <= B` search is covered by `rd <= B` coverage.
pub fn rd_cover_from_grd(grd_bound: &BigRational) -> BigRational {
    grd_bound.clone()
}

/// `floor(bound^n)`: the largest `|D|` with `|D|^(1/n) <= bound`.
pub fn absdisc_bound_for_degree(bound: &BigRational, n: u32) -> BigUint {
    floor_nonneg(&pow_rational(bound, n))
}

/// Outcome of a completeness check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub complete: bool,
    pub trace: Vec<String>,
}

/// Exact upper bound on `|D|` for degree `n` implied by the request.
pub fn absdisc_upper_bound(req: &SearchRequest, n: u32) -> Option<BigUint> {
    let mut best = req.absdisc_max.clone();
    for bound in [&req.rd_max, &req.grd_max].into_iter().flatten() {
        let b = absdisc_bound_for_degree(&rd_cover_from_grd(bound), n);
        best = Some(match best {
            Some(cur) if cur <= b => cur,
            _ => b,
        });
    }
    best
}

/// Primes that may ramify under the request, when that set is finite and small.
pub fn allowed_primes(req: &SearchRequest) -> Option<BTreeSet<Prime>> {
    let listed = if req.only_listed_primes {
        Some(req.listed_primes(PRIME_LIST_LIMIT))
    } else {
        None
    };
    match (listed, req.max_ramified_prime) {
        (Some(Some(set)), Some(m)) => Some(set.into_iter().filter(|&p| p <= m).collect()),
        (Some(Some(set)), None) => Some(set),
        (_, Some(m)) => primes_between(2, m, PRIME_LIST_LIMIT).map(|v| v.into_iter().collect()),
        _ => None,
    }
}

/// True when every prime factor of `d` lies in `primes`.
pub fn factors_over(d: &BigUint, primes: &BTreeSet<Prime>) -> bool {
    let mut rest = d.clone();
    for &p in primes {
        let p = BigUint::from(p);
        while (&rest % &p).is_zero() {
            rest /= &p;
        }
        if rest.is_one() {
            return true;
        }
    }
    rest.is_one()
}

/// Decides whether the stored fields provably answer `req` completely.
pub fn check_complete(
    req: &SearchRequest,
    ledger: &[CompletenessRecord],
    alpha: &AlphaTable,
) -> Verdict {
    let mut trace = Vec::new();
    let Some(degrees) = req.degrees.finite_set() else {
        trace.push("not proven: the search is not limited to finitely many degrees".to_string());
        return Verdict {
            complete: false,
            trace,
        };
    };
    let has_bound = req.absdisc_max.is_some()
        || req.rd_max.is_some()
        || req.grd_max.is_some()
        || req.max_ramified_prime.is_some()
        || req.only_listed_primes;
    if !has_bound {
        trace
            .push("not proven: no upper bound on |D|, rd, grd or the ramifying primes".to_string());
        return Verdict {
            complete: false,
            trace,
        };
    }
    let allowed = allowed_primes(req);
    let mut complete = true;
    for n in degrees {
        let ok = DegreeCheck::new(n, req, ledger, alpha, allowed.as_ref(), &mut trace).run();
        complete &= ok;
    }
    if complete {
        trace.push("Results below are proven complete".to_string());
    }
    Verdict { complete, trace }
}

struct DegreeCheck<'a> {
    n: u32,
    req: &'a SearchRequest,
    ledger: Vec<&'a CompletenessRecord>,
    alpha: &'a AlphaTable,
    allowed: Option<&'a BTreeSet<Prime>>,
    trace: &'a mut Vec<String>,
}

impl<'a> DegreeCheck<'a> {
    fn new(
        n: u32,
        req: &'a SearchRequest,
        ledger: &'a [CompletenessRecord],
        alpha: &'a AlphaTable,
        allowed: Option<&'a BTreeSet<Prime>>,
        trace: &'a mut Vec<String>,
    ) -> Self {
        DegreeCheck {
            n,
            req,
            ledger: ledger.iter().filter(|r| r.degree() == n).collect(),
            alpha,
            allowed,
            trace,
        }
    }

    fn note(&mut self, line: String) {
        self.trace.push(format!("degree {}: {line}", self.n));
    }

    fn run(mut self) -> bool {
        let n = self.n;
        let Some(count) = transitive_count(n) else {
            self.note("not proven: no group table for this degree".into());
            return false;
        };
        let groups: Vec<u32> = match &self.req.groups {
            Some(gs) => gs
                .iter()
                .filter(|g| g.degree() == n)
                .map(|g| g.t_number())
                .collect(),
            None => (1..=count).collect(),
        };
        if groups.is_empty() {
            self.note("no requested group has this degree".into());
            return true;
        }
        let sigs: Vec<u32> = (0..=n / 2)
            .filter(|s| {
                self.req
                    .signatures
                    .as_ref()
                    .is_none_or(|set| set.contains(s))
            })
            .collect();
        if sigs.is_empty() {
            self.note("no requested signature is possible".into());
            return true;
        }
        let hi = absdisc_upper_bound(self.req, n);
        let lo = self.req.absdisc_min.clone().unwrap_or_else(BigUint::one);
        if let Some(h) = &hi {
            if *h < lo {
                self.note(format!("empty |D| range [{lo}, {h}]"));
                return true;
            }
        }

        let mut residual = self.apply_disc_bounds(&groups, &sigs, hi.as_ref(), &lo);
        self.apply_grd_bounds(&mut residual, hi.as_ref());
        if let Some(h) = &hi {
            self.apply_residual_discriminants(&mut residual, h);
        }
        self.apply_prime_bound(&mut residual);

        if residual.is_empty() {
            self.note("complete".into());
            true
        } else {
            let shown: Vec<String> = residual
                .keys()
                .take(8)
                .map(|&t| format!("{n}T{t}"))
                .collect();
            let more = if residual.len() > 8 {
                format!(" and {} more", residual.len() - 8)
            } else {
                String::new()
            };
            self.note(format!("not proven for {}{more}", shown.join(", ")));
            false
        }
    }

    /// Tables A and B. Returns group -> signature -> first uncovered `|D|`.
    fn apply_disc_bounds(
        &mut self,
        groups: &[u32],
        sigs: &[u32],
        hi: Option<&BigUint>,
        lo: &BigUint,
    ) -> BTreeMap<u32, BTreeMap<u32, BigUint>> {
        let mut a_bounds: HashMap<u32, &BigUint> = HashMap::new();
        let mut b_bounds: HashMap<(u32, u32), &BigUint> = HashMap::new();
        for row in &self.ledger {
            match row {
                CompletenessRecord::A { s, bound, .. } => {
                    let e = a_bounds.entry(*s).or_insert(bound);
                    if bound > *e {
                        *e = bound;
                    }
                }
                CompletenessRecord::B {
                    s, group, bound, ..
                } => {
                    let e = b_bounds.entry((*s, group.t_number())).or_insert(bound);
                    if bound > *e {
                        *e = bound;
                    }
                }
                _ => {}
            }
        }
        let zero = BigUint::zero();
        let mut residual: BTreeMap<u32, BTreeMap<u32, BigUint>> = BTreeMap::new();
        let mut by_b = 0usize;
        for &s in sigs {
            let a = a_bounds.get(&s).copied().unwrap_or(&zero);
            if hi.is_some_and(|h| a >= h) {
                self.note(format!(
                    "s={s}: Table A row (n={}, s={s}, B={a}) covers",
                    self.n
                ));
                continue;
            }
            for &t in groups {
                let b = b_bounds.get(&(s, t)).copied().map_or(a, |b| b.max(a));
                if hi.is_some_and(|h| b >= h) {
                    by_b += 1;
                    continue;
                }
                let start = (b + 1u32).max(lo.clone());
                residual.entry(t).or_default().insert(s, start);
            }
        }
        if by_b > 0 {
            self.note(format!("Table B rows cover {by_b} (group, s) cells"));
        }
        residual
    }

    /// Table D, compared with the request's grd bound or with
    /// `rd^alpha(G)` from its `|D|` bound.
    fn apply_grd_bounds(
        &mut self,
        residual: &mut BTreeMap<u32, BTreeMap<u32, BigUint>>,
        hi: Option<&BigUint>,
    ) {
        let d_rows: Vec<(GroupId, BigRational)> = self
            .ledger
            .iter()
            .filter_map(|r| match r {
                CompletenessRecord::D { group, bound, .. } => Some((*group, bound.clone())),
                _ => None,
            })
            .collect();
        let mut removed = Vec::new();
        for &t in residual.keys() {
            for (group, bound) in d_rows.iter().filter(|(g, _)| g.t_number() == t) {
                if let Some(g) = &self.req.grd_max {
                    if g <= bound {
                        removed.push((
                            t,
                            format!("Table D grd <= {} covers {group}", rational_text(bound)),
                        ));
                        break;
                    }
                }
                if let Some(h) = hi {
                    let rd = RationalPower::root(h.clone(), self.n);
                    if let Ok(grd) = grd_bound_from_rd(*group, &rd, self.alpha) {
                        if grd.cmp_rational(bound) != Ordering::Greater {
                            removed.push((
                                t,
                                format!(
                                    "rd <= {h}^(1/{}) gives grd <= {h}^({}) <= {}: Table D covers {group}",
                                    self.n,
                                    rational_text(&grd.exponent),
                                    rational_text(bound)
                                ),
                            ));
                            break;
                        }
                    }
                }
            }
        }
        for (t, line) in removed {
            residual.remove(&t);
            self.note(line);
        }
    }

    /// With at most ten uncovered discriminant values, look each one up in Table C.
    fn apply_residual_discriminants(
        &mut self,
        residual: &mut BTreeMap<u32, BTreeMap<u32, BigUint>>,
        hi: &BigUint,
    ) {
        let Some(min_start) = residual.values().flat_map(|m| m.values()).min().cloned() else {
            return;
        };
        if min_start > *hi {
            residual.clear();
            return;
        }
        let remaining = hi - &min_start + 1u32;
        if remaining > BigUint::from(RESIDUAL_DISCRIMINANT_LIMIT) {
            return;
        }
        let values: Vec<BigUint> = num_iter(&min_start, hi);
        let mut discharged = 0usize;
        residual.retain(|&t, cells| {
            cells.retain(|_, start| {
                let ok = values
                    .iter()
                    .filter(|d| *d >= start)
                    .all(|d| self.discriminant_covered(d, t));
                if ok {
                    discharged += 1;
                }
                !ok
            });
            !cells.is_empty()
        });
        self.note(format!(
            "{remaining} residual discriminant(s) in [{min_start}, {hi}] checked against Table C; {discharged} cell(s) discharged"
        ));
    }

    fn discriminant_covered(&self, d: &BigUint, t: u32) -> bool {
        if let Some(allowed) = self.allowed {
            if !factors_over(d, allowed) {
                return true;
            }
        }
        self.ledger.iter().any(|r| match r {
            CompletenessRecord::C { primes, groups, .. } => {
                groups.contains(t) && factors_over(d, primes)
            }
            _ => false,
        })
    }

    /// With the ramifying primes confined to a finite set, Table C rows over a
    /// superset cover their listed groups.
    fn apply_prime_bound(&mut self, residual: &mut BTreeMap<u32, BTreeMap<u32, BigUint>>) {
        let Some(allowed) = self.allowed else {
            return;
        };
        let rows: Vec<(&BTreeSet<Prime>, &GroupSetCode)> = self
            .ledger
            .iter()
            .filter_map(|r| match r {
                CompletenessRecord::C { primes, groups, .. } if allowed.is_subset(primes) => {
                    Some((primes, groups))
                }
                _ => None,
            })
            .collect();
        if rows.is_empty() {
            return;
        }
        let before = residual.len();
        residual.retain(|&t, _| !rows.iter().any(|(_, g)| g.contains(t)));
        let covered = before - residual.len();
        if covered > 0 {
            let primes: Vec<String> = allowed.iter().map(|p| p.to_string()).collect();
            self.note(format!(
                "Table C covers {covered} group(s) unramified outside {{{}}}",
                primes.join(",")
            ));
        }
    }
}

fn num_iter(lo: &BigUint, hi: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut d = lo.clone();
    while d <= *hi {
        out.push(d.clone());
        d += 1u32;
    }
    out
}
