//! Parsing, validation and bulk loading of JSON-lines files and of the
//! whitespace-separated constant tables.

use std::cmp::Ordering;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::parse_rational;
use crate::completeness::CompletenessRecord;
use crate::error::StoreError;
use crate::groups::GroupId;
use crate::localdata::alpha_exponent;
use crate::model::{FieldRecord, Prime};
use crate::schema::{Line, WildMasses};
use crate::store::Store;

/// One parsed input line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedLine {
    Field(FieldRecord),
    Completeness(CompletenessRecord),
    Alpha(GroupId, BigRational),
    WildMass {
        n: u32,
        p: Prime,
        masses: WildMasses,
    },
    Dataset {
        grh_conditional: bool,
    },
}

/// Outcome of loading one file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub accepted: usize,
    /// `(line number, reason)`, 1-based.
    pub rejected: Vec<(usize, String)>,
    /// GRH flag declared by the file, if any.
    pub grh_conditional: Option<bool>,
}

impl IngestReport {
    /// Non-blank, non-comment lines seen.
    pub fn total(&self) -> usize {
        self.accepted + self.rejected.len()
    }
}

/// Parses one JSON line into its record.
pub fn parse_record(line: &str) -> Result<ParsedLine, String> {
    let parsed: Line = serde_json::from_str(line).map_err(|e| e.to_string())?;
    Ok(match parsed {
        Line::Field(f) => ParsedLine::Field(f.to_record()?),
        Line::Completeness(c) => ParsedLine::Completeness(c.to_record()?),
        Line::Alpha(a) => {
            let (g, v) = a.parse()?;
            ParsedLine::Alpha(g, v)
        }
        Line::Wildmass(w) => ParsedLine::WildMass {
            n: w.n,
            p: w.p,
            masses: w.parse()?,
        },
        Line::Dataset(d) => ParsedLine::Dataset {
            grh_conditional: d.grh_conditional,
        },
    })
}

/// Checks every invariant a stored record must satisfy.
pub fn validate_record(r: &FieldRecord) -> Result<(), Vec<String>> {
    let mut v = Vec::new();
    let n = r.degree;
    if n == 0 {
        v.push("degree must be at least 1".to_string());
    }
    if r.polynomial.len() != n as usize + 1 {
        v.push(format!(
            "polynomial has {} coefficients, degree {n} needs {}",
            r.polynomial.len(),
            n + 1
        ));
    } else if !r.polynomial[0].is_one() {
        v.push("polynomial is not monic".to_string());
    }
    if r.group.degree() != n {
        v.push(format!("group {} is not of degree {n}", r.group));
    }
    if 2 * r.disc.s > n {
        v.push(format!("s={} exceeds n/2", r.disc.s));
    }
    for (&p, c) in &r.local_data {
        if c.prime() != p {
            v.push(format!("local data keyed by {p} is for {}", c.prime()));
        }
        let ramified = c.wild_count() > 0 || c.tame_degree() > 1;
        if ramified != (r.disc.absdisc.ord(p) > 0) {
            v.push(format!(
                "local data at {p} disagrees with |D| about ramification"
            ));
        }
    }
    if let Some(grd) = &r.grd {
        if n > 0 && grd.cmp_exact(&r.rd()) == Ordering::Less {
            v.push(format!("grd {grd} is below rd"));
        }
        for (p, _) in grd.terms() {
            if r.disc.absdisc.ord(*p) == 0 {
                v.push(format!("grd involves unramified prime {p}"));
            }
        }
        for (&p, c) in &r.local_data {
            let expected = alpha_exponent(c);
            let stated = grd.exponent(p);
            if expected != stated {
                v.push(format!(
                    "grd exponent at {p} is {}, local data gives {}",
                    crate::arith::rational_text(&stated),
                    crate::arith::rational_text(&expected)
                ));
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn apply(store: &mut Store, parsed: ParsedLine, report: &mut IngestReport) -> Result<(), String> {
    match parsed {
        ParsedLine::Field(r) => {
            validate_record(&r).map_err(|v| v.join("; "))?;
            store.insert_field(r).map_err(|e| e.to_string())?;
        }
        ParsedLine::Completeness(c) => store.add_completeness(c).map_err(|e| e.to_string())?,
        ParsedLine::Alpha(g, a) => store.add_alpha(g, a).map_err(|e| e.to_string())?,
        ParsedLine::WildMass { n, p, masses } => store
            .add_wild_masses(n, p, masses)
            .map_err(|e| e.to_string())?,
        ParsedLine::Dataset { grh_conditional } => {
            report.grh_conditional = Some(grh_conditional);
            if !store.set_grh_conditional(grh_conditional) {
                return Err(format!(
                    "duplicate dataset flag grh_conditional={grh_conditional}"
                ));
            }
        }
    }
    Ok(())
}

/// Loads JSON-lines text into the store. Bad lines are reported and skipped;
/// nothing is written to disk.
pub fn ingest_str(store: &mut Store, text: &str) -> IngestReport {
    let mut report = IngestReport::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_record(line).and_then(|p| apply(store, p, &mut report)) {
            Ok(()) => report.accepted += 1,
            Err(why) => report.rejected.push((i + 1, why)),
        }
    }
    report
}

/// Loads a JSON-lines file and commits the store.
pub fn ingest_file(store: &mut Store, path: &Path) -> Result<IngestReport, StoreError> {
    let text = std::fs::read_to_string(path)?;
    let report = ingest_str(store, &text);
    store.commit()?;
    Ok(report)
}

fn table_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

/// Parses an alpha table: one `group alpha` pair per line, e.g. `4T3 3/2`.
pub fn parse_alpha_table(text: &str) -> Result<Vec<(GroupId, BigRational)>, (usize, String)> {
    table_lines(text)
        .map(|(no, cols)| {
            let [g, a] = cols.as_slice() else {
                return Err((no, "expected 'group alpha'".to_string()));
            };
            let g = GroupId::from_str(g).map_err(|e| (no, e.to_string()))?;
            let a = parse_rational(a).map_err(|e| (no, e))?;
            Ok((g, a))
        })
        .collect()
}

/// One parsed wild-mass line: degree, prime and masses.
pub type WildMassLine = (u32, Prime, WildMasses);

/// Parses a wild-mass table: `n p m0 m1 ...` per line, or `n p total T`.
pub fn parse_wild_mass_table(text: &str) -> Result<Vec<WildMassLine>, (usize, String)> {
    table_lines(text)
        .map(|(no, cols)| {
            if cols.len() < 3 {
                return Err((no, "expected 'n p masses...' or 'n p total T'".to_string()));
            }
            let n: u32 = cols[0]
                .parse()
                .map_err(|_| (no, format!("bad degree {:?}", cols[0])))?;
            let p: Prime = cols[1]
                .parse()
                .map_err(|_| (no, format!("bad prime {:?}", cols[1])))?;
            let masses = if cols[2] == "total" {
                let [t] = &cols[3..] else {
                    return Err((no, "expected one value after 'total'".to_string()));
                };
                WildMasses::Total(parse_rational(t).map_err(|e| (no, e))?)
            } else {
                WildMasses::ByExponent(
                    cols[2..]
                        .iter()
                        .map(|m| parse_rational(m))
                        .collect::<Result<_, _>>()
                        .map_err(|e| (no, e))?,
                )
            };
            Ok((n, p, masses))
        })
        .collect()
}

/// Loads a text alpha table into the store, one report entry per line.
pub fn ingest_alpha_table(store: &mut Store, text: &str) -> IngestReport {
    let mut report = IngestReport::default();
    for (no, _) in table_lines(text) {
        let line = text.lines().nth(no - 1).unwrap_or_default();
        let outcome = parse_alpha_table(line)
            .map_err(|(_, e)| e)
            .and_then(|rows| {
                let (g, a) = rows.into_iter().next().expect("one row");
                if a.is_negative() || a.is_zero() {
                    return Err("alpha must be positive".to_string());
                }
                store.add_alpha(g, a).map_err(|e| e.to_string())
            });
        match outcome {
            Ok(()) => report.accepted += 1,
            Err(e) => report.rejected.push((no, e)),
        }
    }
    report
}

/// Loads a text wild-mass table into the store, one report entry per line.
pub fn ingest_wild_mass_table(store: &mut Store, text: &str) -> IngestReport {
    let mut report = IngestReport::default();
    for (no, _) in table_lines(text) {
        let line = text.lines().nth(no - 1).unwrap_or_default();
        let outcome = parse_wild_mass_table(line)
            .map_err(|(_, e)| e)
            .and_then(|rows| {
                let (n, p, m) = rows.into_iter().next().expect("one row");
                store.add_wild_masses(n, p, m).map_err(|e| e.to_string())
            });
        match outcome {
            Ok(()) => report.accepted += 1,
            Err(e) => report.rejected.push((no, e)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW6: &str = r#"{"kind":"field","degree":4,"poly":[1,0,0,-1,1],"group":"4T5","s":2,"disc":{"229":1},"h":[],"grd":"229^{1/2}"}"#;

    fn field(line: &str) -> FieldRecord {
        match parse_record(line).unwrap() {
            ParsedLine::Field(r) => r,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_seed_row() {
        let r = field(ROW6);
        assert_eq!(r.group.to_string(), "4T5");
        assert_eq!(r.absdisc(), &229u32.into());
        assert!(validate_record(&r).is_ok());
    }

    #[test]
    fn parses_ledger_row() {
        let p = parse_record(r#"{"kind":"completeness","table":"A","n":4,"s":2,"bound":"250"}"#)
            .unwrap();
        assert_eq!(
            p,
            ParsedLine::Completeness(CompletenessRecord::A {
                n: 4,
                s: 2,
                bound: 250u32.into()
            })
        );
    }

    #[test]
    fn rejects_bad_slopes() {
        let line = r#"{"kind":"field","degree":4,"poly":[1,0,0,0,-2],"group":"4T3","s":1,"disc":{"2":11},"local":{"2":"[3,2]"}}"#;
        assert!(parse_record(line).is_err());
    }

    #[test]
    fn validation_catches_violations() {
        let mut r = field(ROW6);
        r.grd = Some("229^{1/8}".parse().unwrap());
        assert!(validate_record(&r).is_err());
        let mut r = field(ROW6);
        r.polynomial.pop();
        assert!(validate_record(&r).is_err());
        let mut r = field(ROW6);
        r.polynomial[0] = 2.into();
        assert!(validate_record(&r).is_err());
        let mut r = field(ROW6);
        r.group = "5T5".parse().unwrap();
        assert!(validate_record(&r).is_err());
        let mut r = field(ROW6);
        r.grd = Some("229^{1/2} 3^{1/2}".parse().unwrap());
        assert!(validate_record(&r).is_err());
    }

    #[test]
    fn validation_checks_local_data() {
        // |D| = 2^a 7^b with contents giving 2^{73/28} 7^{8/9}
        let line = |grd: &str| {
            format!(
                r#"{{"kind":"field","degree":9,"poly":[1,0,0,0,0,0,0,0,0,-2],"group":"9T1","s":0,"disc":{{"2":8,"7":8}},"local":{{"2":"[20/7,20/7,20/7]_7^3","7":"[]_9"}},"grd":"{grd}"}}"#
            )
        };
        let good = field(&line("2^{73/28} 7^{8/9}"));
        assert!(
            validate_record(&good).is_ok(),
            "{:?}",
            validate_record(&good)
        );
        let bad = field(&line("2^{73/28} 7^{6/7}"));
        assert_eq!(validate_record(&bad).unwrap_err().len(), 1);
    }

    #[test]
    fn report_counts_and_idempotence() {
        let text = format!(
            "# seed\n\n{ROW6}\nnot json\n{{\"kind\":\"dataset\",\"grh_conditional\":true}}\n"
        );
        let mut s = Store::new();
        let r1 = ingest_str(&mut s, &text);
        assert_eq!((r1.accepted, r1.rejected.len()), (2, 1));
        assert_eq!(r1.rejected[0].0, 4);
        assert_eq!(r1.grh_conditional, Some(true));
        let before = s.to_bytes();
        let r2 = ingest_str(&mut s, &text);
        assert_eq!((r2.accepted, r2.rejected.len()), (0, 3));
        assert_eq!(s.to_bytes(), before);
    }

    #[test]
    fn text_tables() {
        let rows = parse_alpha_table("# group alpha\n4T1 1\n4T3 3/2\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(parse_alpha_table("4T1\n").unwrap_err().0, 1);
        let rows = parse_wild_mass_table("5 3 1 1 1 3 5 5 3\n6 2 total 145\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert!(matches!(rows[1].2, WildMasses::Total(_)));
        let mut s = Store::new();
        let r = ingest_wild_mass_table(&mut s, "5 3 1 1 1 3 5 5 3\n5 3 1 1 1 3 5 5 3\nx\n");
        assert_eq!((r.accepted, r.rejected.len()), (1, 2));
        let r = ingest_alpha_table(&mut s, "4T1 1\n4T2 1/2\n");
        assert_eq!((r.accepted, r.rejected.len()), (1, 1));
    }
}
