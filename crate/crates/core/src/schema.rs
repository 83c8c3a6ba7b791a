//! JSON-lines interchange format.
//!
//! Every line is one object with a `"kind"` tag:
//!
//! ```text
//! {"kind":"field","degree":4,"poly":[1,0,0,-1,1],"group":"4T5","s":2,"disc":{"229":1},"h":[],"grd":"229^{1/2}"}
//! {"kind":"completeness","table":"A","n":4,"s":2,"bound":"250"}
//! {"kind":"completeness","table":"C","n":5,"primes":[2,3,5,7],"groups":["5T5"]}
//! {"kind":"alpha","group":"4T3","alpha":"3/2"}
//! {"kind":"wildmass","n":5,"p":3,"masses":["1","1","1","3","5","5","3"]}
//! {"kind":"wildmass","n":6,"p":2,"total":"145"}
//! {"kind":"dataset","grh_conditional":true}
//! ```
//!
//! Field keys: `poly` lists coefficients highest degree first, leading 1
//! included; `disc` maps primes to exponents of `|D|`; `h` and `narrow_h`
//! list cyclic factor orders (empty = trivial, `narrow_h` may be absent);
//! `local` maps primes to slope contents `[s1,...]_t^u`; `grd` is optional.
//! Big integers and rationals may be given as strings.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{parse_biguint, parse_rational, rational_text};
use crate::completeness::CompletenessRecord;
use crate::encoding::{encode_group_set, GroupSetCode};
use crate::groups::GroupId;
use crate::localdata::parse_slope_content;
use crate::model::{
    ClassGroupStructure, FactoredInteger, FieldRecord, Prime, PrimePowerProduct, SignedDiscriminant,
};

/// A JSON number or a string holding one; strings carry values beyond 64 bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Int(v) => v.to_string(),
            Num::Text(s) => s.clone(),
        }
    }

    fn from_bigint(v: &BigInt) -> Num {
        match v.to_i64() {
            Some(i) => Num::Int(i),
            None => Num::Text(v.to_string()),
        }
    }
}

/// Maps keyed by primes, written with string keys in numeric order.
mod prime_keys {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::model::Prime;

    pub fn serialize<S: Serializer, V: Serialize>(
        m: &BTreeMap<Prime, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut out = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            out.serialize_entry(&k.to_string(), v)?;
        }
        out.end()
    }

    pub fn deserialize<'de, D, V>(d: D) -> Result<BTreeMap<Prime, V>, D::Error>
    where
        D: Deserializer<'de>,
        V: Deserialize<'de>,
    {
        let raw: BTreeMap<String, V> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| match k.parse::<Prime>() {
                Ok(p) => Ok((p, v)),
                Err(_) => Err(D::Error::custom(format!("malformed prime key {k:?}"))),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Line {
    Field(FieldLine),
    Completeness(CompletenessLine),
    Alpha(AlphaLine),
    Wildmass(WildMassLine),
    Dataset(DatasetLine),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldLine {
    pub degree: u32,
    pub poly: Vec<Num>,
    pub group: String,
    pub s: u32,
    #[serde(with = "prime_keys")]
    pub disc: BTreeMap<Prime, u32>,
    #[serde(default)]
    pub h: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrow_h: Option<Vec<u64>>,
    #[serde(
        default,
        skip_serializing_if = "BTreeMap::is_empty",
        with = "prime_keys"
    )]
    pub local: BTreeMap<Prime, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grd: Option<String>,
}

impl FieldLine {
    pub fn from_record(r: &FieldRecord) -> Self {
        FieldLine {
            degree: r.degree,
            poly: r.polynomial.iter().map(Num::from_bigint).collect(),
            group: r.group.label(),
            s: r.disc.s,
            disc: r.disc.absdisc.factors().iter().copied().collect(),
            h: r.class_group.cyclic_orders().to_vec(),
            narrow_h: r
                .narrow_class_group
                .as_ref()
                .map(|c| c.cyclic_orders().to_vec()),
            local: r
                .local_data
                .iter()
                .map(|(p, c)| (*p, c.to_string()))
                .collect(),
            grd: r.grd.as_ref().map(|g| g.to_string()),
        }
    }

    /// Builds the record; semantic checks are left to validation.
    pub fn to_record(&self) -> Result<FieldRecord, String> {
        let polynomial = self
            .poly
            .iter()
            .map(|c| {
                let t = c.text();
                BigInt::from_str(t.trim()).map_err(|_| format!("malformed coefficient {t:?}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let group = GroupId::from_str(&self.group).map_err(|e| e.to_string())?;
        let absdisc = FactoredInteger::new(self.disc.iter().map(|(p, e)| (*p, *e)).collect())
            .map_err(|e| format!("disc: {e}"))?;
        let class_group =
            ClassGroupStructure::new(self.h.clone()).map_err(|e| format!("h: {e}"))?;
        let narrow_class_group = self
            .narrow_h
            .as_ref()
            .map(|h| ClassGroupStructure::new(h.clone()))
            .transpose()
            .map_err(|e| format!("narrow_h: {e}"))?;
        let mut local_data = BTreeMap::new();
        for (p, text) in &self.local {
            let c = parse_slope_content(text, *p).map_err(|e| format!("local data at {p}: {e}"))?;
            local_data.insert(*p, c);
        }
        let grd = self
            .grd
            .as_ref()
            .map(|g| PrimePowerProduct::from_str(g))
            .transpose()
            .map_err(|e| format!("grd: {e}"))?;
        Ok(FieldRecord {
            id: None,
            degree: self.degree,
            polynomial,
            group,
            disc: SignedDiscriminant::new(self.s, absdisc),
            class_group,
            narrow_class_group,
            local_data,
            grd,
        })
    }
}

/// The `L` column of a `C` row: a list of labels, or the stored decimal code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupsField {
    List(Vec<String>),
    Code(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletenessLine {
    pub table: String,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<Prime>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<GroupsField>,
}

impl CompletenessLine {
    pub fn from_record(r: &CompletenessRecord) -> Self {
        let mut line = CompletenessLine {
            table: r.kind().to_string(),
            n: r.degree(),
            s: None,
            group: None,
            bound: None,
            primes: None,
            groups: None,
        };
        match r {
            CompletenessRecord::A { s, bound, .. } => {
                line.s = Some(*s);
                line.bound = Some(Num::Text(bound.to_string()));
            }
            CompletenessRecord::B {
                s, group, bound, ..
            } => {
                line.s = Some(*s);
                line.group = Some(group.label());
                line.bound = Some(Num::Text(bound.to_string()));
            }
            CompletenessRecord::C { primes, groups, .. } => {
                line.primes = Some(primes.iter().copied().collect());
                line.groups = Some(GroupsField::Code(groups.to_decimal()));
            }
            CompletenessRecord::D { group, bound, .. } => {
                line.group = Some(group.label());
                line.bound = Some(Num::Text(rational_text(bound)));
            }
        }
        line
    }

    pub fn to_record(&self) -> Result<CompletenessRecord, String> {
        let n = self.n;
        let need = |what: &str| format!("table {} row needs {what:?}", self.table);
        let group = || -> Result<GroupId, String> {
            let g = self.group.as_ref().ok_or_else(|| need("group"))?;
            GroupId::from_str(g).map_err(|e| e.to_string())
        };
        let int_bound = || -> Result<BigUint, String> {
            parse_biguint(&self.bound.as_ref().ok_or_else(|| need("bound"))?.text())
        };
        let s = || self.s.ok_or_else(|| need("s"));
        let row = match self.table.as_str() {
            "A" => CompletenessRecord::A {
                n,
                s: s()?,
                bound: int_bound()?,
            },
            "B" => CompletenessRecord::B {
                n,
                s: s()?,
                group: group()?,
                bound: int_bound()?,
            },
            "C" => {
                let primes: BTreeSet<Prime> = self
                    .primes
                    .as_ref()
                    .ok_or_else(|| need("primes"))?
                    .iter()
                    .copied()
                    .collect();
                if let Some(p) = primes.iter().find(|&&p| !crate::arith::is_prime(p)) {
                    return Err(format!("{p} is not prime"));
                }
                let groups = match self.groups.as_ref().ok_or_else(|| need("groups"))? {
                    GroupsField::Code(code) if code == "all" => {
                        GroupSetCode::all(n).map_err(|e| e.to_string())?
                    }
                    GroupsField::Code(code) => {
                        GroupSetCode::from_decimal(n, code).map_err(|e| e.to_string())?
                    }
                    GroupsField::List(labels) => {
                        let mut ts = Vec::with_capacity(labels.len());
                        for l in labels {
                            let g = GroupId::from_str(l).map_err(|e| e.to_string())?;
                            if g.degree() != n {
                                return Err(format!("group {g} is not of degree {n}"));
                            }
                            ts.push(g.t_number());
                        }
                        encode_group_set(n, ts).map_err(|e| e.to_string())?
                    }
                };
                CompletenessRecord::C { n, primes, groups }
            }
            "D" => CompletenessRecord::D {
                n,
                group: group()?,
                bound: parse_rational(&self.bound.as_ref().ok_or_else(|| need("bound"))?.text())?,
            },
            other => return Err(format!("unknown completeness table {other:?}")),
        };
        row.validate()?;
        Ok(row)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaLine {
    pub group: String,
    pub alpha: Num,
}

impl AlphaLine {
    pub fn new(group: GroupId, alpha: &BigRational) -> Self {
        AlphaLine {
            group: group.label(),
            alpha: Num::Text(rational_text(alpha)),
        }
    }

    pub fn parse(&self) -> Result<(GroupId, BigRational), String> {
        let g = GroupId::from_str(&self.group).map_err(|e| e.to_string())?;
        Ok((g, parse_rational(&self.alpha.text())?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WildMassLine {
    pub n: u32,
    pub p: Prime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<Num>,
}

/// A parsed wild-mass line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WildMasses {
    /// `mu_{n,p^c}` for `c = 0, 1, ...`.
    ByExponent(Vec<BigRational>),
    Total(BigRational),
}

impl WildMassLine {
    pub fn parse(&self) -> Result<WildMasses, String> {
        match (&self.masses, &self.total) {
            (Some(m), None) => Ok(WildMasses::ByExponent(
                m.iter()
                    .map(|v| parse_rational(&v.text()))
                    .collect::<Result<_, _>>()?,
            )),
            (None, Some(t)) => Ok(WildMasses::Total(parse_rational(&t.text())?)),
            _ => Err("wildmass line needs exactly one of \"masses\" or \"total\"".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetLine {
    pub grh_conditional: bool,
}
