//! Browser bindings over the bundled seed: Galois root discriminants from
//! slope contents, local mass rows, and quartic searches with the
//! completeness banner. Every export returns JSON text.
//!
//! The plain functions are target independent so they can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use nfdb_core::arith::{parse_biguint, rational_text, round_decimal};
use nfdb_core::localdata::parse_prime_content;
use nfdb_core::mass::{mass_infinity, MassSource};
use nfdb_core::query::{ClassDisplay, DegreeFilter, SortKey};
use nfdb_core::report::{RowView, COMPLETE_BANNER, DECIMAL_PLACES};
use nfdb_core::{execute_search, grd_from_contents, ingest_str, SearchRequest, Store, SEED};
use num_rational::BigRational;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

thread_local! {
    static SEEDED: Store = {
        let mut store = Store::new();
        ingest_str(&mut store, SEED);
        store
    };
}

fn value(q: &BigRational) -> Value {
    json!({ "exact": rational_text(q), "decimal": round_decimal(q, DECIMAL_PLACES) })
}

/// Galois root discriminant of whitespace-separated contents such as
/// `2:[20/7,20/7,20/7]_7^3 7:[]_9`.
pub fn grd_json(contents: &str) -> Result<String, String> {
    let parsed = contents
        .split_whitespace()
        .map(parse_prime_content)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    if parsed.is_empty() {
        return Err("enter at least one slope content".into());
    }
    let g = grd_from_contents(&parsed).map_err(|e| e.to_string())?;
    let terms: Vec<Value> = parsed
        .iter()
        .map(|c| json!({ "prime": c.prime(), "alpha": rational_text(&nfdb_core::alpha_exponent(c)) }))
        .collect();
    Ok(
        json!({ "terms": terms, "exact": g.to_string(), "decimal": g.to_decimal(DECIMAL_PLACES) })
            .to_string(),
    )
}

/// Local masses of degree-`n` fields at `p`; `p = 0` selects the infinite
/// place, scaled by `n!`.
pub fn masses_json(n: u32, p: u64) -> Result<String, String> {
    if !(1..=12).contains(&n) {
        return Err("degree must be between 1 and 12".into());
    }
    let (masses, source) = if p == 0 {
        let nf = BigRational::from_integer((1..=u64::from(n)).product::<u64>().into());
        let masses = (0..=n / 2)
            .map(|s| mass_infinity(n, s).map(|m| m * &nf))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        (masses, "infinity")
    } else {
        SEEDED.with(|store| {
            let table = store.mass_table();
            let source = match table.source(n, p) {
                MassSource::TameDerived => "tame",
                MassSource::WildIngested => "wild",
            };
            table
                .local_masses(n, p)
                .map(|m| (m, source))
                .map_err(|e| e.to_string())
        })?
    };
    let total = masses
        .iter()
        .fold(BigRational::from_integer(0.into()), |a, b| a + b);
    Ok(json!({
        "n": n,
        "p": p,
        "source": source,
        "masses": masses.iter().map(value).collect::<Vec<_>>(),
        "total": value(&total),
    })
    .to_string())
}

/// Searches the seed by degree and `|D|` bound.
pub fn search_json(
    degree: u32,
    absdisc_max: &str,
    sort: &str,
    narrow: bool,
) -> Result<String, String> {
    let absdisc_max = match absdisc_max.trim() {
        "" => None,
        text => Some(parse_biguint(text)?),
    };
    let display = if narrow {
        ClassDisplay::Narrow
    } else {
        ClassDisplay::Class
    };
    let req = SearchRequest {
        degrees: DegreeFilter::Set([degree].into()),
        absdisc_max,
        sort: sort.parse::<SortKey>().map_err(|e| e.to_string())?,
        display,
        ..Default::default()
    };
    let result = SEEDED
        .with(|store| execute_search(store, &req))
        .map_err(|e| e.to_string())?;
    let rows: Vec<RowView> = result
        .rows
        .iter()
        .map(|r| RowView::new(r, display))
        .collect();
    Ok(json!({
        "complete": result.complete,
        "banner": if result.complete { Some(COMPLETE_BANNER) } else { None },
        "trace": result.completeness_trace,
        "rows": rows,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn grd(contents: &str) -> Result<String, JsError> {
    grd_json(contents).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn masses(n: u32, p: u32) -> Result<String, JsError> {
    masses_json(n, u64::from(p)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn search(degree: u32, absdisc_max: &str, sort: &str, narrow: bool) -> Result<String, JsError> {
    search_json(degree, absdisc_max, sort, narrow).map_err(|e| JsError::new(&e))
}
