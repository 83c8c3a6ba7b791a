//! Result rows as shown to users, the plain-text results table and
//! per-group summaries.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::Serialize;

use crate::arith::rational_text;
use crate::completeness::check_complete;
use crate::groups::GroupId;
use crate::model::{
    format_class_group, format_discriminant, FieldRecord, Prime, PrimePowerProduct,
};
use crate::query::{
    ClassDisplay, DegreeFilter, PrimeSelector, RamConstraint, SearchRequest, SearchResult,
};
use crate::store::Store;

/// Decimal places used for rd and grd.
pub const DECIMAL_PLACES: u32 = 2;

pub const COMPLETE_BANNER: &str = "Results below are proven complete";
pub const NOT_AVAILABLE: &str = "n/a";

/// A result row with exact and rounded values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowView {
    pub id: u64,
    pub degree: u32,
    pub polynomial: String,
    pub coefficients: Vec<String>,
    pub group: String,
    pub group_name: String,
    pub s: u32,
    pub disc: String,
    pub absdisc: String,
    pub ramified_primes: Vec<Prime>,
    pub rd: String,
    pub rd_exact: String,
    pub grd: Option<String>,
    pub grd_exact: Option<String>,
    /// Class group per the requested display; `"n/a"` when narrow data is absent.
    pub h: String,
    pub class_group: String,
    pub narrow_class_group: Option<String>,
    pub local_data: Vec<(Prime, String)>,
}

impl RowView {
    pub fn new(r: &FieldRecord, display: ClassDisplay) -> Self {
        let class_group = format_class_group(&r.class_group);
        let narrow = r.narrow_class_group.as_ref().map(format_class_group);
        let h = match display {
            ClassDisplay::Class => class_group.clone(),
            ClassDisplay::Narrow => narrow.clone().unwrap_or_else(|| NOT_AVAILABLE.to_string()),
        };
        let rd = r.rd();
        RowView {
            id: r.id.map(|i| i.0).unwrap_or(0),
            degree: r.degree,
            polynomial: r.polynomial_text(),
            coefficients: r.polynomial.iter().map(|c| c.to_string()).collect(),
            group: r.group.label(),
            group_name: r.group.display_name(),
            s: r.disc.s,
            disc: format_discriminant(&r.disc),
            absdisc: r.absdisc().to_string(),
            ramified_primes: r.ramified_primes(),
            rd: rd.to_decimal(DECIMAL_PLACES),
            rd_exact: rd.to_string(),
            grd: r.grd.as_ref().map(|g| g.to_decimal(DECIMAL_PLACES)),
            grd_exact: r.grd.as_ref().map(|g| g.to_string()),
            h,
            class_group,
            narrow_class_group: narrow,
            local_data: r
                .local_data
                .iter()
                .map(|(p, c)| (*p, c.to_string()))
                .collect(),
        }
    }
}

/// Results table with columns rd, grd, D, h, G, polynomial, headed by the
/// completeness statement.
pub fn render_table(result: &SearchResult, display: ClassDisplay) -> String {
    let header = ["rd", "grd", "D", "h", "G", "polynomial"];
    let rows: Vec<[String; 6]> = result
        .rows
        .iter()
        .map(|r| {
            let v = RowView::new(r, display);
            [
                v.rd,
                v.grd.unwrap_or_else(|| "-".to_string()),
                v.disc,
                v.h,
                v.group_name,
                v.polynomial,
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i + 1 == cells.len() {
                    c.clone()
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        padded.join("  ")
    };
    let mut out = String::new();
    if result.complete {
        out.push_str(COMPLETE_BANNER);
        out.push('\n');
    }
    out.push_str(&line(&header.map(String::from)));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out.push_str(&format!("{} field(s)\n", rows.len()));
    out
}

/// Count of fields with group `G` unramified outside a prime set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCount {
    pub primes: Vec<Prime>,
    pub count: usize,
    /// True when the ledger proves the count complete.
    pub provable: bool,
}

/// An exact value with its decimal rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl ExactValue {
    fn of(p: &PrimePowerProduct) -> Self {
        ExactValue {
            exact: p.to_string(),
            decimal: p.to_decimal(DECIMAL_PLACES),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrdCount {
    pub bound: String,
    pub count: usize,
    pub provable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub group_name: String,
    pub families: Vec<FamilyCount>,
    pub min_rd: Option<ExactValue>,
    pub min_grd: Option<ExactValue>,
    pub grd_below: Option<GrdCount>,
    pub total_records: usize,
}

fn only_primes_request(g: GroupId, primes: &BTreeSet<Prime>) -> SearchRequest {
    SearchRequest {
        degrees: DegreeFilter::Set([g.degree()].into()),
        groups: Some([g].into()),
        ram: primes
            .iter()
            .map(|&p| RamConstraint {
                primes: PrimeSelector::Single(p),
                exp_min: 1,
                exp_max: u32::MAX,
                may_be_zero: true,
            })
            .collect(),
        only_listed_primes: !primes.is_empty(),
        max_ramified_prime: if primes.is_empty() { Some(1) } else { None },
        ..Default::default()
    }
}

/// Counts and minima for group `g`: fields unramified outside each family,
/// the smallest rd and grd, and the number with `grd <= grd_cut`.
pub fn summarize_group(
    store: &Store,
    g: GroupId,
    families: &[BTreeSet<Prime>],
    grd_cut: Option<&BigRational>,
) -> GroupSummary {
    let records: Vec<&FieldRecord> = store
        .scan_absdisc_range(Some(g.degree()), &1u32.into(), &crate::store::max_absdisc())
        .filter(|r| r.group == g)
        .collect();
    let families = families
        .iter()
        .map(|primes| {
            let count = records
                .iter()
                .filter(|r| r.disc.absdisc.primes().all(|p| primes.contains(&p)))
                .count();
            let req = only_primes_request(g, primes);
            FamilyCount {
                primes: primes.iter().copied().collect(),
                count,
                provable: check_complete(&req, store.ledger(), store.alpha_table()).complete,
            }
        })
        .collect();
    let min_rd = records
        .iter()
        .map(|r| r.rd())
        .min_by(|a, b| a.cmp_exact(b))
        .map(|p| ExactValue::of(&p));
    let min_grd = records
        .iter()
        .filter_map(|r| r.grd.as_ref())
        .min_by(|a, b| a.cmp_exact(b))
        .map(ExactValue::of);
    let grd_below = grd_cut.map(|cut| {
        let count = records
            .iter()
            .filter(|r| {
                r.grd
                    .as_ref()
                    .is_some_and(|x| x.cmp_rational(cut) != Ordering::Greater)
            })
            .count();
        let req = SearchRequest {
            degrees: DegreeFilter::Set([g.degree()].into()),
            groups: Some([g].into()),
            grd_max: Some(cut.clone()),
            ..Default::default()
        };
        GrdCount {
            bound: rational_text(cut),
            count,
            provable: check_complete(&req, store.ledger(), store.alpha_table()).complete,
        }
    });
    GroupSummary {
        group: g.label(),
        group_name: g.display_name(),
        families,
        min_rd,
        min_grd,
        grd_below,
        total_records: records.len(),
    }
}

/// Plain-text rendering of a summary; unproven counts are marked with `*`.
pub fn render_summary(s: &GroupSummary) -> String {
    let mark = |provable: bool| if provable { "" } else { "*" };
    let mut out = format!("{} ({})\n", s.group_name, s.group);
    for f in &s.families {
        let primes: Vec<String> = f.primes.iter().map(|p| p.to_string()).collect();
        out.push_str(&format!(
            "  unramified outside {{{}}}: {}{}\n",
            primes.join(","),
            f.count,
            mark(f.provable)
        ));
    }
    let show = |v: &Option<ExactValue>| match v {
        Some(v) => format!("{} ~ {}", v.exact, v.decimal),
        None => "-".to_string(),
    };
    out.push_str(&format!("  min rd: {}\n", show(&s.min_rd)));
    out.push_str(&format!("  min grd: {}\n", show(&s.min_grd)));
    if let Some(c) = &s.grd_below {
        out.push_str(&format!(
            "  grd <= {}: {}{}\n",
            c.bound,
            c.count,
            mark(c.provable)
        ));
    }
    out.push_str(&format!("  total: {}\n", s.total_records));
    if s.families.iter().any(|f| !f.provable) || s.grd_below.as_ref().is_some_and(|c| !c.provable) {
        out.push_str("  (* lower bound, not proven complete)\n");
    }
    out
}
