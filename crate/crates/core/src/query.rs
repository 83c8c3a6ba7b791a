//! The search pipeline: candidate selection through the discriminant index
//! and the ramification triples, an exact post-filter over every
//! constraint, the completeness check, and the final ordering.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::arith::{ceil_nonneg, is_prime, pow_rational, primes_between};
use crate::completeness::{check_complete, Verdict};
use crate::error::QueryError;
use crate::groups::GroupId;
use crate::model::{cmp_roots, FieldRecord, Prime, RecordId};
use crate::store::Store;

/// Degrees a search ranges over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum DegreeFilter {
    #[default]
    Any,
    Set(BTreeSet<u32>),
    Range {
        min: u32,
        max: Option<u32>,
    },
}

impl DegreeFilter {
    pub fn contains(&self, n: u32) -> bool {
        match self {
            DegreeFilter::Any => true,
            DegreeFilter::Set(set) => set.contains(&n),
            DegreeFilter::Range { min, max } => n >= *min && max.is_none_or(|m| n <= m),
        }
    }

    /// The degrees as a finite set, when bounded.
    pub fn finite_set(&self) -> Option<BTreeSet<u32>> {
        match self {
            DegreeFilter::Any => None,
            DegreeFilter::Set(set) => Some(set.clone()),
            DegreeFilter::Range { min, max } => max.map(|m| (*min..=m).collect()),
        }
    }
}

/// The primes a ramification constraint talks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeSelector {
    Single(Prime),
    Range(Prime, Prime),
}

impl PrimeSelector {
    pub fn contains(&self, p: Prime) -> bool {
        match *self {
            PrimeSelector::Single(q) => p == q,
            PrimeSelector::Range(lo, hi) => lo <= p && p <= hi,
        }
    }
}

/// `ord_p(|D|) in [exp_min, exp_max]`, or zero when `may_be_zero`, for every
/// prime `p` the selector names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RamConstraint {
    pub primes: PrimeSelector,
    pub exp_min: u32,
    pub exp_max: u32,
    pub may_be_zero: bool,
}

impl RamConstraint {
    pub fn allows(&self, e: u32) -> bool {
        (self.exp_min <= e && e <= self.exp_max) || (e == 0 && self.may_be_zero)
    }

    /// True when an unramified prime satisfies the constraint.
    pub fn allows_zero(&self) -> bool {
        self.allows(0)
    }

    pub fn holds(&self, record: &FieldRecord) -> bool {
        let factors = record.disc.absdisc.factors();
        match self.primes {
            PrimeSelector::Single(p) => self.allows(record.disc.absdisc.ord(p)),
            PrimeSelector::Range(lo, hi) => {
                let in_range = factors.iter().filter(|(p, _)| lo <= *p && *p <= hi);
                if !in_range.clone().all(|&(_, e)| self.allows(e)) {
                    return false;
                }
                if self.allows_zero() {
                    return true;
                }
                // every prime of the range must ramify
                let mut n = lo.max(2);
                while n <= hi {
                    if is_prime(n) && factors.binary_search_by_key(&n, |&(p, _)| p).is_err() {
                        return false;
                    }
                    match n.checked_add(1) {
                        Some(next) => n = next,
                        None => break,
                    }
                }
                true
            }
        }
    }
}

impl fmt::Display for RamConstraint {
    /// Query-parameter form: `p:emin-emax[:z]` or `plo-phi:emin-emax[:z]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.primes {
            PrimeSelector::Single(p) => write!(f, "{p}")?,
            PrimeSelector::Range(lo, hi) => write!(f, "{lo}-{hi}")?,
        }
        write!(f, ":{}-{}", self.exp_min, self.exp_max)?;
        if self.may_be_zero {
            f.write_str(":z")?;
        }
        Ok(())
    }
}

impl FromStr for RamConstraint {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| QueryError::Invalid(format!("ramification constraint {s:?}: {why}"));
        let mut parts = s.split(':');
        let primes = parts.next().ok_or_else(|| bad("missing prime"))?;
        let exps = parts.next().ok_or_else(|| bad("missing exponent range"))?;
        let may_be_zero = match parts.next() {
            None => false,
            Some("z") => true,
            Some(_) => return Err(bad("expected ':z'")),
        };
        if parts.next().is_some() {
            return Err(bad("too many ':' separators"));
        }
        let pair = |text: &str| -> Result<(u64, u64), QueryError> {
            let (a, b) = match text.split_once('-') {
                Some((a, b)) => (a, b),
                None => (text, text),
            };
            let a = a.trim().parse().map_err(|_| bad("not a number"))?;
            let b = b.trim().parse().map_err(|_| bad("not a number"))?;
            Ok((a, b))
        };
        let (plo, phi) = pair(primes)?;
        let primes = if plo == phi {
            if !is_prime(plo) {
                return Err(bad("not a prime"));
            }
            PrimeSelector::Single(plo)
        } else {
            PrimeSelector::Range(plo, phi)
        };
        let (emin, emax) = pair(exps)?;
        let c = RamConstraint {
            primes,
            exp_min: u32::try_from(emin).map_err(|_| bad("exponent too large"))?,
            exp_max: u32::try_from(emax).map_err(|_| bad("exponent too large"))?,
            may_be_zero,
        };
        c.validate().map_err(|e| bad(&e))?;
        Ok(c)
    }
}

impl RamConstraint {
    fn validate(&self) -> Result<(), String> {
        if self.exp_min > self.exp_max {
            return Err("empty exponent range".into());
        }
        if let PrimeSelector::Range(lo, hi) = self.primes {
            if lo > hi {
                return Err("empty prime range".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SortKey {
    #[default]
    Rd,
    Grd,
    Absdisc,
}

impl FromStr for SortKey {
    type Err = QueryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rd" => Ok(SortKey::Rd),
            "grd" => Ok(SortKey::Grd),
            "absdisc" | "disc" | "d" => Ok(SortKey::Absdisc),
            other => Err(QueryError::Invalid(format!("unknown sort key {other:?}"))),
        }
    }
}

/// Which class group the `h` column shows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClassDisplay {
    #[default]
    Class,
    Narrow,
}

impl FromStr for ClassDisplay {
    type Err = QueryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "class" => Ok(ClassDisplay::Class),
            "narrow" => Ok(ClassDisplay::Narrow),
            other => Err(QueryError::Invalid(format!("unknown display {other:?}"))),
        }
    }
}

/// Every user-settable search constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchRequest {
    pub degrees: DegreeFilter,
    pub groups: Option<BTreeSet<GroupId>>,
    /// Allowed numbers of complex places.
    pub signatures: Option<BTreeSet<u32>>,
    pub absdisc_min: Option<BigUint>,
    pub absdisc_max: Option<BigUint>,
    pub rd_max: Option<BigRational>,
    pub grd_min: Option<BigRational>,
    pub grd_max: Option<BigRational>,
    pub ram: Vec<RamConstraint>,
    pub only_listed_primes: bool,
    pub max_ramified_prime: Option<Prime>,
    pub sort: SortKey,
    pub display: ClassDisplay,
}

impl SearchRequest {
    pub fn validate(&self) -> Result<(), QueryError> {
        let invalid = |why: &str| Err(QueryError::Invalid(why.to_string()));
        if let DegreeFilter::Range {
            min,
            max: Some(max),
        } = self.degrees
        {
            if min > max {
                return invalid("empty degree range");
            }
        }
        if let (Some(lo), Some(hi)) = (&self.absdisc_min, &self.absdisc_max) {
            if lo > hi {
                return invalid("empty |D| range");
            }
        }
        if let (Some(lo), Some(hi)) = (&self.grd_min, &self.grd_max) {
            if lo > hi {
                return invalid("empty grd range");
            }
        }
        for c in &self.ram {
            c.validate().map_err(QueryError::Invalid)?;
        }
        if self.only_listed_primes && self.ram.is_empty() {
            return invalid("'only listed primes' needs at least one listed prime");
        }
        Ok(())
    }

    /// Upper bound on `|D|` in degree `n` implied by the `|D|`, `rd` and
    /// `grd` bounds (`rd <= grd`). Rounded up from `rd`/`grd`, so it is a
    /// superset bound for index scans.
    pub fn absdisc_ceiling(&self, n: u32) -> Option<BigUint> {
        let mut best = self.absdisc_max.clone();
        for bound in [&self.rd_max, &self.grd_max].into_iter().flatten() {
            let b = ceil_nonneg(&pow_rational(bound, n));
            best = Some(match best {
                Some(cur) if cur <= b => cur,
                _ => b,
            });
        }
        best
    }

    /// Primes named by the ramification constraints, when they can be listed.
    pub fn listed_primes(&self, limit: usize) -> Option<BTreeSet<Prime>> {
        let mut out = BTreeSet::new();
        for c in &self.ram {
            match c.primes {
                PrimeSelector::Single(p) => {
                    out.insert(p);
                }
                PrimeSelector::Range(lo, hi) => out.extend(primes_between(lo, hi, limit)?),
            }
        }
        Some(out)
    }

    /// True when `record` satisfies every constraint, evaluated exactly.
    pub fn matches(&self, record: &FieldRecord) -> bool {
        if !self.degrees.contains(record.degree) {
            return false;
        }
        if let Some(groups) = &self.groups {
            if !groups.contains(&record.group) {
                return false;
            }
        }
        if let Some(sigs) = &self.signatures {
            if !sigs.contains(&record.disc.s) {
                return false;
            }
        }
        let d = record.absdisc();
        if self.absdisc_min.as_ref().is_some_and(|lo| d < lo) {
            return false;
        }
        if self.absdisc_max.as_ref().is_some_and(|hi| d > hi) {
            return false;
        }
        if let Some(r) = &self.rd_max {
            if record.rd().cmp_rational(r) == Ordering::Greater {
                return false;
            }
        }
        if self.grd_min.is_some() || self.grd_max.is_some() {
            let Some(grd) = &record.grd else {
                return false;
            };
            if self
                .grd_min
                .as_ref()
                .is_some_and(|lo| grd.cmp_rational(lo) == Ordering::Less)
            {
                return false;
            }
            if self
                .grd_max
                .as_ref()
                .is_some_and(|hi| grd.cmp_rational(hi) == Ordering::Greater)
            {
                return false;
            }
        }
        if let Some(m) = self.max_ramified_prime {
            if record.disc.absdisc.primes().any(|p| p > m) {
                return false;
            }
        }
        if self.only_listed_primes {
            let listed = |p: Prime| self.ram.iter().any(|c| c.primes.contains(p));
            if !record.disc.absdisc.primes().all(listed) {
                return false;
            }
        }
        self.ram.iter().all(|c| c.holds(record))
    }
}

/// Rows of a search plus the completeness verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub rows: Vec<FieldRecord>,
    pub complete: bool,
    pub completeness_trace: Vec<String>,
}

impl SearchResult {
    pub fn trace_text(&self) -> String {
        self.completeness_trace.join("\n")
    }
}

/// How step one chose its candidates; exposed for diagnostics and tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePlan {
    pub used_disc_index: bool,
    pub used_triples: bool,
    pub candidates: Vec<RecordId>,
}

/// Step one: candidate ids from the discriminant index and/or ramification
/// triples. Always a superset of the matching records.
pub fn select_candidates(store: &Store, req: &SearchRequest) -> CandidatePlan {
    let degrees: Vec<u32> = store
        .degrees()
        .into_iter()
        .filter(|&n| req.degrees.contains(n))
        .collect();

    let one = BigUint::one();
    let lo = req.absdisc_min.clone().unwrap_or_else(|| one.clone());
    let has_disc_bound = req.absdisc_max.is_some()
        || req.rd_max.is_some()
        || req.grd_max.is_some()
        || req.absdisc_min.is_some();

    let mut ids: Option<BTreeSet<RecordId>> = None;
    if has_disc_bound {
        let mut found = BTreeSet::new();
        for &n in &degrees {
            let hi = req
                .absdisc_ceiling(n)
                .unwrap_or_else(crate::store::max_absdisc);
            found.extend(
                store
                    .scan_absdisc_range(Some(n), &lo, &hi)
                    .map(|r| r.id.expect("stored")),
            );
        }
        ids = Some(found);
    }

    let mut used_triples = false;
    for c in &req.ram {
        if let PrimeSelector::Single(p) = c.primes {
            if !c.allows_zero() {
                let hits = store.lookup_ramification(p, c.exp_min, c.exp_max);
                ids = Some(match ids {
                    Some(cur) => cur.intersection(&hits).copied().collect(),
                    None => hits,
                });
                used_triples = true;
            }
        }
    }
    if req.only_listed_primes {
        let mut hits = BTreeSet::new();
        for c in &req.ram {
            let (plo, phi) = match c.primes {
                PrimeSelector::Single(p) => (p, p),
                PrimeSelector::Range(a, b) => (a, b),
            };
            hits.extend(store.lookup_ramification_range(plo, phi, 1, u32::MAX));
        }
        // unramified fields carry no triples
        for &n in &degrees {
            hits.extend(
                store
                    .scan_absdisc_range(Some(n), &one, &one)
                    .map(|r| r.id.expect("stored")),
            );
        }
        ids = Some(match ids {
            Some(cur) => cur.intersection(&hits).copied().collect(),
            None => hits,
        });
        used_triples = true;
    }

    let candidates = match ids {
        Some(set) => set.into_iter().collect(),
        None => degrees
            .iter()
            .flat_map(|&n| {
                store
                    .scan_absdisc_range(Some(n), &one, &crate::store::max_absdisc())
                    .map(|r| r.id.expect("stored"))
            })
            .collect(),
    };
    CandidatePlan {
        used_disc_index: has_disc_bound,
        used_triples,
        candidates,
    }
}

/// Step two: keep the candidates satisfying every constraint of `req`,
/// including prime-range and zero-allowed exponent constraints the index
/// cannot express.
pub fn post_filter<'a>(
    candidates: impl IntoIterator<Item = &'a FieldRecord>,
    req: &SearchRequest,
) -> Vec<FieldRecord> {
    candidates
        .into_iter()
        .filter(|r| req.matches(r))
        .cloned()
        .collect()
}

/// Total order used for result rows: the key, then `|D|`, degree, T-number
/// and polynomial text.
pub fn compare_records(a: &FieldRecord, b: &FieldRecord, key: SortKey) -> Ordering {
    let primary = match key {
        SortKey::Rd => cmp_roots(a.absdisc(), a.degree, b.absdisc(), b.degree),
        SortKey::Absdisc => a.absdisc().cmp(b.absdisc()),
        SortKey::Grd => match (&a.grd, &b.grd) {
            (Some(x), Some(y)) => x.cmp_exact(y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        },
    };
    primary
        .then_with(|| a.absdisc().cmp(b.absdisc()))
        .then_with(|| a.degree.cmp(&b.degree))
        .then_with(|| a.group.t_number().cmp(&b.group.t_number()))
        .then_with(|| a.polynomial_text().cmp(&b.polynomial_text()))
        .then_with(|| a.id.cmp(&b.id))
}

pub fn sort_results(rows: &mut [FieldRecord], key: SortKey) {
    rows.sort_by(|a, b| compare_records(a, b, key));
}

/// Runs the full pipeline against a store snapshot.
pub fn execute_search(store: &Store, req: &SearchRequest) -> Result<SearchResult, QueryError> {
    req.validate()?;
    let plan = select_candidates(store, req);
    let candidates = plan.candidates.iter().filter_map(|id| store.get(*id));
    let mut rows = post_filter(candidates, req);
    sort_results(&mut rows, req.sort);
    let Verdict { complete, trace } = check_complete(req, store.ledger(), store.alpha_table());
    Ok(SearchResult {
        rows,
        complete,
        completeness_trace: trace,
    })
}
