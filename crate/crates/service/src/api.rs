//! Request handling shared by both front ends: each operation takes a store
//! snapshot and parameter pairs and returns a serializable response.

use std::collections::BTreeMap;

use nfdb_core::arith::{rational_text, round_decimal};
use nfdb_core::localdata::{alpha_exponent, grd_from_contents};
use nfdb_core::mass::{
    mass_infinity, mass_infinity_total, predict_count, total_local_mass, MassSource, WildRow,
};
use nfdb_core::model::Prime;
use nfdb_core::report::{
    render_table, summarize_group, GroupSummary, RowView, COMPLETE_BANNER, DECIMAL_PLACES,
};
use nfdb_core::{execute_search, SearchResult, Store};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::ServiceError;
use crate::params::{grd_params, mass_params, search_request, summary_params, Page, Pairs};

#[derive(Clone, Debug, Serialize)]
pub struct FieldsResponse {
    /// Number of matching fields before pagination.
    pub count: usize,
    pub offset: usize,
    pub limit: usize,
    pub complete: bool,
    pub banner: Option<&'static str>,
    pub trace: Vec<String>,
    pub rows: Vec<RowView>,
}

fn run_search(
    store: &Store,
    pairs: &Pairs,
) -> Result<(SearchResult, nfdb_core::query::ClassDisplay, Page), ServiceError> {
    let (req, page) = search_request(pairs)?;
    let result = execute_search(store, &req)?;
    Ok((result, req.display, page))
}

fn paged(mut result: SearchResult, page: Page) -> SearchResult {
    let rows = std::mem::take(&mut result.rows);
    result.rows = rows
        .into_iter()
        .skip(page.offset)
        .take(page.limit)
        .collect();
    result
}

pub fn fields(store: &Store, pairs: &Pairs) -> Result<FieldsResponse, ServiceError> {
    let (result, display, page) = run_search(store, pairs)?;
    let count = result.rows.len();
    let result = paged(result, page);
    Ok(FieldsResponse {
        count,
        offset: page.offset,
        limit: page.limit,
        complete: result.complete,
        banner: result.complete.then_some(COMPLETE_BANNER),
        trace: result.completeness_trace,
        rows: result
            .rows
            .iter()
            .map(|r| RowView::new(r, display))
            .collect(),
    })
}

/// One polynomial per line, in result order.
pub fn fields_text(store: &Store, pairs: &Pairs) -> Result<String, ServiceError> {
    let (result, _, page) = run_search(store, pairs)?;
    Ok(paged(result, page)
        .rows
        .iter()
        .map(|r| format!("{}\n", r.polynomial_text()))
        .collect())
}

/// The plain-text results table.
pub fn fields_table(store: &Store, pairs: &Pairs) -> Result<String, ServiceError> {
    let (result, display, page) = run_search(store, pairs)?;
    let count = result.rows.len();
    let shown = paged(result, page);
    let mut text = render_table(&shown, display);
    if shown.rows.len() < count {
        text.push_str(&format!(
            "(showing {} of {count} from offset {})\n",
            shown.rows.len(),
            page.offset
        ));
    }
    Ok(text)
}

pub fn summary(store: &Store, pairs: &Pairs) -> Result<GroupSummary, ServiceError> {
    let p = summary_params(pairs)?;
    Ok(summarize_group(
        store,
        p.group,
        &p.families,
        p.grd_cut.as_ref(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Value {
    pub exact: String,
    pub decimal: String,
}

impl Value {
    fn of(q: &BigRational) -> Self {
        Value {
            exact: rational_text(q),
            decimal: round_decimal(q, DECIMAL_PLACES),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalMasses {
    pub p: Prime,
    /// "tame" (derived from partition counts) or "wild" (ingested).
    pub source: &'static str,
    /// By exponent `c = 0, 1, ...`; absent when only the total is known.
    pub masses: Option<Vec<String>>,
    pub total: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub primes: Vec<Prime>,
    pub s: Option<u32>,
    pub value: Value,
    /// False for a square discriminant, where the heuristic does not apply.
    pub applicable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MassResponse {
    pub n: u32,
    /// `mu_{n,-^s}` for `s = 0..=n/2`.
    pub infinity: Vec<Value>,
    pub infinity_total: Value,
    pub local: Option<LocalMasses>,
    pub prediction: Option<Prediction>,
}

pub fn mass(store: &Store, pairs: &Pairs) -> Result<MassResponse, ServiceError> {
    let p = mass_params(pairs)?;
    let n = p.n;
    let table = store.mass_table();
    let infinity = (0..=n / 2)
        .map(|s| mass_infinity(n, s).map(|m| Value::of(&m)))
        .collect::<Result<_, _>>()?;
    let local = match p.p {
        None => None,
        Some(prime) => {
            let total = total_local_mass(n, prime, table)?;
            let masses = match (table.source(n, prime), table.row(n, prime)) {
                (MassSource::WildIngested, Some(WildRow::TotalOnly(_))) => None,
                _ => Some(
                    table
                        .local_masses(n, prime)?
                        .iter()
                        .map(rational_text)
                        .collect(),
                ),
            };
            Some(LocalMasses {
                p: prime,
                source: match table.source(n, prime) {
                    MassSource::TameDerived => "tame",
                    MassSource::WildIngested => "wild",
                },
                masses,
                total: Value::of(&total),
            })
        }
    };
    let prediction = match &p.predict {
        None => None,
        Some(primes) => {
            let exps: BTreeMap<Prime, Option<u32>> = primes.iter().map(|&q| (q, None)).collect();
            let pred = predict_count(n, p.s, &exps, table)?;
            Some(Prediction {
                primes: primes.iter().copied().collect(),
                s: p.s,
                value: Value::of(&pred.value),
                applicable: pred.applicable,
            })
        }
    };
    Ok(MassResponse {
        n,
        infinity,
        infinity_total: Value::of(&mass_infinity_total(n)),
        local,
        prediction,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrdTerm {
    pub prime: Prime,
    pub content: String,
    pub alpha: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrdResponse {
    pub terms: Vec<GrdTerm>,
    pub exact: String,
    pub decimal: String,
}

pub fn grd(pairs: &Pairs) -> Result<GrdResponse, ServiceError> {
    let contents = grd_params(pairs)?;
    let product = grd_from_contents(&contents)?;
    Ok(GrdResponse {
        terms: contents
            .iter()
            .map(|c| GrdTerm {
                prime: c.prime(),
                content: c.to_string(),
                alpha: rational_text(&alpha_exponent(c)),
            })
            .collect(),
        exact: product.to_string(),
        decimal: product.to_decimal(DECIMAL_PLACES),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Health {
    pub status: &'static str,
    pub records: usize,
    pub ledger_rows: usize,
    /// Class numbers in this dataset assume GRH.
    pub grh_conditional: bool,
}

pub fn health(store: &Store) -> Health {
    Health {
        status: "ok",
        records: store.len(),
        ledger_rows: store.ledger().len(),
        grh_conditional: store.grh_conditional(),
    }
}
