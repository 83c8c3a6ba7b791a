//! Query-string parameters shared by the HTTP API and the CLI.
//!
//! Both front ends reduce their input to `(name, value)` pairs, so one
//! parser defines the accepted vocabulary.

use std::collections::BTreeSet;
use std::str::FromStr;

use nfdb_core::arith::{parse_biguint, parse_rational};
use nfdb_core::groups::GroupId;
use nfdb_core::localdata::parse_prime_content;
use nfdb_core::model::Prime;
use nfdb_core::query::{ClassDisplay, DegreeFilter, RamConstraint, SortKey};
use nfdb_core::{SearchRequest, SlopeContent};
use num_rational::BigRational;

use crate::error::ServiceError;

pub const DEFAULT_LIMIT: usize = 1000;
pub const MAX_LIMIT: usize = 100_000;

pub type Pairs = Vec<(String, String)>;

/// Decodes a raw query string.
pub fn parse_query(raw: Option<&str>) -> Pairs {
    form_urlencoded::parse(raw.unwrap_or("").as_bytes())
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect()
}

/// Pagination over an ordered result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Page {
    pub limit: usize,
    pub offset: usize,
}

impl Default for Page {
    fn default() -> Self {
        Page {
            limit: DEFAULT_LIMIT,
            offset: 0,
        }
    }
}

fn check_known(pairs: &Pairs, known: &[&str]) -> Result<(), ServiceError> {
    match pairs.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        Some((k, _)) => Err(ServiceError::param(k, "unknown parameter")),
        None => Ok(()),
    }
}

/// Non-empty values of `name`, with comma-separated lists flattened.
fn values<'a>(pairs: &'a Pairs, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
    pairs
        .iter()
        .filter(move |(k, _)| k == name)
        .flat_map(|(_, v)| v.split(','))
        .map(str::trim)
        .filter(|v| !v.is_empty())
}

/// At most one value of `name`.
fn single<'a>(pairs: &'a Pairs, name: &str) -> Result<Option<&'a str>, ServiceError> {
    let mut found = pairs
        .iter()
        .filter(|(k, _)| k == name)
        .map(|(_, v)| v.trim())
        .filter(|v| !v.is_empty());
    let first = found.next();
    if found.next().is_some() {
        return Err(ServiceError::param(name, "given more than once"));
    }
    Ok(first)
}

fn parsed<T>(
    pairs: &Pairs,
    name: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, ServiceError> {
    single(pairs, name)?
        .map(|v| parse(v).map_err(|e| ServiceError::param(name, e)))
        .transpose()
}

fn from_str<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
}

fn flag(v: &str) -> Result<bool, String> {
    match v {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(format!("expected 0 or 1, got {other:?}")),
    }
}

fn rational(v: &str) -> Result<BigRational, String> {
    let q = parse_rational(v)?;
    if q < BigRational::from_integer(0.into()) {
        return Err("must be nonnegative".into());
    }
    Ok(q)
}

fn list<T>(
    pairs: &Pairs,
    name: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, ServiceError> {
    values(pairs, name)
        .map(|v| parse(v).map_err(|e| ServiceError::param(name, e)))
        .collect()
}

pub const SEARCH_PARAMS: &[&str] = &[
    "degree",
    "degree_min",
    "degree_max",
    "group",
    "s",
    "absdisc_min",
    "absdisc_max",
    "rd_max",
    "grd_min",
    "grd_max",
    "ram",
    "only_listed",
    "max_prime",
    "sort",
    "display",
    "limit",
    "offset",
];

/// Builds a validated search request and its page from `/api/fields` parameters.
pub fn search_request(pairs: &Pairs) -> Result<(SearchRequest, Page), ServiceError> {
    check_known(pairs, SEARCH_PARAMS)?;
    let mut req = SearchRequest::default();
    let degrees: BTreeSet<u32> = list(pairs, "degree", from_str)?.into_iter().collect();
    let dmin: Option<u32> = parsed(pairs, "degree_min", from_str)?;
    let dmax: Option<u32> = parsed(pairs, "degree_max", from_str)?;
    req.degrees = match (degrees.is_empty(), dmin, dmax) {
        (true, None, None) => DegreeFilter::Any,
        (false, None, None) => DegreeFilter::Set(degrees),
        (true, min, max) => DegreeFilter::Range {
            min: min.unwrap_or(1),
            max,
        },
        (false, _, _) => {
            return Err(ServiceError::param(
                "degree",
                "use either degree or degree_min/degree_max",
            ))
        }
    };
    let groups: Vec<GroupId> = list(pairs, "group", from_str)?;
    if !groups.is_empty() {
        req.groups = Some(groups.into_iter().collect());
    }
    let sigs: Vec<u32> = list(pairs, "s", from_str)?;
    if !sigs.is_empty() {
        req.signatures = Some(sigs.into_iter().collect());
    }
    req.absdisc_min = parsed(pairs, "absdisc_min", parse_biguint)?;
    req.absdisc_max = parsed(pairs, "absdisc_max", parse_biguint)?;
    req.rd_max = parsed(pairs, "rd_max", rational)?;
    req.grd_min = parsed(pairs, "grd_min", rational)?;
    req.grd_max = parsed(pairs, "grd_max", rational)?;
    // ram values contain no commas, so the flattened list is safe
    req.ram = list(pairs, "ram", from_str::<RamConstraint>)?;
    req.only_listed_primes = parsed(pairs, "only_listed", flag)?.unwrap_or(false);
    req.max_ramified_prime = parsed(pairs, "max_prime", from_str::<Prime>)?;
    req.sort = parsed(pairs, "sort", from_str::<SortKey>)?.unwrap_or_default();
    req.display = parsed(pairs, "display", from_str::<ClassDisplay>)?.unwrap_or_default();
    let page = Page {
        limit: parsed(pairs, "limit", from_str)?.unwrap_or(DEFAULT_LIMIT),
        offset: parsed(pairs, "offset", from_str)?.unwrap_or(0),
    };
    if page.limit > MAX_LIMIT {
        return Err(ServiceError::param("limit", format!("at most {MAX_LIMIT}")));
    }
    req.validate()?;
    Ok((req, page))
}

/// Parameters of `/api/summary`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryParams {
    pub group: GroupId,
    pub families: Vec<BTreeSet<Prime>>,
    pub grd_cut: Option<BigRational>,
}

/// `group=5T5&family=2,3,5,7&family=2,3&grd_cut=40`. An empty `family`
/// value stands for the empty prime set.
pub fn summary_params(pairs: &Pairs) -> Result<SummaryParams, ServiceError> {
    check_known(pairs, &["group", "family", "grd_cut"])?;
    let group = parsed(pairs, "group", from_str::<GroupId>)?
        .ok_or_else(|| ServiceError::param("group", "required"))?;
    let families = pairs
        .iter()
        .filter(|(k, _)| k == "family")
        .map(|(_, v)| {
            v.split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    let p: Prime = from_str(p).map_err(|e| ServiceError::param("family", e))?;
                    if nfdb_core::arith::is_prime(p) {
                        Ok(p)
                    } else {
                        Err(ServiceError::param("family", format!("{p} is not prime")))
                    }
                })
                .collect::<Result<BTreeSet<Prime>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(SummaryParams {
        group,
        families,
        grd_cut: parsed(pairs, "grd_cut", rational)?,
    })
}

/// Parameters of `/api/mass`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassParams {
    pub n: u32,
    pub p: Option<Prime>,
    pub s: Option<u32>,
    pub predict: Option<BTreeSet<Prime>>,
}

pub fn mass_params(pairs: &Pairs) -> Result<MassParams, ServiceError> {
    check_known(pairs, &["n", "p", "s", "predict"])?;
    let n: u32 =
        parsed(pairs, "n", from_str)?.ok_or_else(|| ServiceError::param("n", "required"))?;
    if n == 0 || n > 64 {
        return Err(ServiceError::param("n", "must be in 1..=64"));
    }
    let predict = pairs
        .iter()
        .any(|(k, _)| k == "predict")
        .then(|| list(pairs, "predict", from_str::<Prime>))
        .transpose()?;
    Ok(MassParams {
        n,
        p: parsed(pairs, "p", from_str)?,
        s: parsed(pairs, "s", from_str)?,
        predict: predict.map(|v| v.into_iter().collect()),
    })
}

/// `content=2:[20/7,20/7,20/7]_7^3&content=7:[]_9`.
pub fn grd_params(pairs: &Pairs) -> Result<Vec<SlopeContent>, ServiceError> {
    check_known(pairs, &["content"])?;
    let contents: Vec<SlopeContent> = pairs
        .iter()
        .filter(|(k, _)| k == "content")
        .map(|(_, v)| parse_prime_content(v.trim()))
        .collect::<Result<_, _>>()?;
    Ok(contents)
}
