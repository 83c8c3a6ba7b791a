//! Ordered key-value store holding the fields table, the ramification
//! triples, the completeness ledger and the constant tables.
//!
//! Key namespaces:
//!
//! ```text
//! F id                      -> stored row (JSON)
//! I degree discKey id       -> empty   (ordered |D| index)
//! R prime exponent id       -> empty   (ramification triples)
//! P degree polynomial       -> id      (uniqueness)
//! C seq                     -> completeness row (JSON)
//! A label                   -> alpha row (JSON)
//! W n p                     -> wild-mass row (JSON)
//! M name                    -> metadata
//! ```
//!
//! Integers in keys are big-endian so byte order is numeric order. The file
//! is `NFDB`, a format version, the entries, and a SHA-256 trailer; commits
//! write a temporary file, sync it and rename it over the old one.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::ops::Bound;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::completeness::{AlphaTable, CompletenessRecord};
use crate::encoding::{encode_absdisc, MAX_DIGITS};
use crate::error::StoreError;
use crate::groups::GroupId;
use crate::ingest::validate_record;
use crate::mass::{LocalMassTable, WildRow};
use crate::model::{FieldRecord, Prime, RecordId};
use crate::schema::{AlphaLine, CompletenessLine, FieldLine, Num, WildMassLine, WildMasses};

const MAGIC: &[u8; 4] = b"NFDB";
const FORMAT_VERSION: u32 = 1;

const NS_FIELD: u8 = b'F';
const NS_INDEX: u8 = b'I';
const NS_RAM: u8 = b'R';
const NS_POLY: u8 = b'P';
const NS_LEDGER: u8 = b'C';
const NS_ALPHA: u8 = b'A';
const NS_WILD: u8 = b'W';
const NS_META: u8 = b'M';

const META_NEXT_ID: &[u8] = b"next_id";
const META_GRH: &[u8] = b"grh_conditional";

/// Largest `|D|` the key encoding can hold.
pub fn max_absdisc() -> BigUint {
    BigUint::from(10u32).pow(MAX_DIGITS as u32) - 1u32
}

/// A fields-table row: the record plus the derived search columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredRow {
    record: FieldLine,
    polynomial_text: String,
    /// Ramified primes joined with `,`.
    ramified_primes: String,
    absdisc: String,
}

fn ramified_column(r: &FieldRecord) -> String {
    let primes: Vec<String> = r.ramified_primes().iter().map(|p| p.to_string()).collect();
    primes.join(",")
}

fn field_key(id: RecordId) -> Vec<u8> {
    let mut k = vec![NS_FIELD];
    k.extend_from_slice(&id.0.to_be_bytes());
    k
}

fn index_prefix(degree: u32) -> Vec<u8> {
    let mut k = vec![NS_INDEX];
    k.extend_from_slice(&degree.to_be_bytes());
    k
}

fn index_key(r: &FieldRecord, id: RecordId) -> Result<Vec<u8>, StoreError> {
    let disc = encode_absdisc(r.absdisc()).map_err(|e| StoreError::Invalid(e.to_string()))?;
    let mut k = index_prefix(r.degree);
    k.extend_from_slice(disc.as_bytes());
    k.extend_from_slice(&id.0.to_be_bytes());
    Ok(k)
}

fn ram_key(p: Prime, e: u32, id: RecordId) -> Vec<u8> {
    let mut k = vec![NS_RAM];
    k.extend_from_slice(&p.to_be_bytes());
    k.extend_from_slice(&e.to_be_bytes());
    k.extend_from_slice(&id.0.to_be_bytes());
    k
}

fn poly_key(r: &FieldRecord) -> Vec<u8> {
    let mut k = vec![NS_POLY];
    k.extend_from_slice(&r.degree.to_be_bytes());
    k.extend_from_slice(r.polynomial_text().as_bytes());
    k
}

fn meta_key(name: &[u8]) -> Vec<u8> {
    let mut k = vec![NS_META];
    k.extend_from_slice(name);
    k
}

fn id_from_suffix(key: &[u8]) -> RecordId {
    let tail: [u8; 8] = key[key.len() - 8..]
        .try_into()
        .expect("eight-byte id suffix");
    RecordId(u64::from_be_bytes(tail))
}

/// The database: raw ordered entries plus decoded views of them.
#[derive(Clone, Debug, Default)]
pub struct Store {
    kv: BTreeMap<Vec<u8>, Vec<u8>>,
    records: BTreeMap<RecordId, FieldRecord>,
    ledger: Vec<CompletenessRecord>,
    alpha: AlphaTable,
    masses: LocalMassTable,
    grh_conditional: bool,
    next_id: u64,
    path: Option<PathBuf>,
}

impl Store {
    /// An empty store with no backing file.
    pub fn new() -> Self {
        Store {
            next_id: 1,
            ..Default::default()
        }
    }

    /// Opens the file at `path`, or starts empty when it does not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let mut store = if path.exists() {
            Self::from_bytes(&fs::read(&path)?)?
        } else {
            Self::new()
        };
        store.path = Some(path);
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Writes the store to its backing file atomically.
    pub fn commit(&self) -> Result<(), StoreError> {
        match &self.path {
            Some(p) => self.save_to(p),
            None => Ok(()),
        }
    }

    pub fn save_to(&self, path: &Path) -> Result<(), StoreError> {
        let bytes = self.to_bytes();
        let dir = path
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("store");
        let tmp = dir.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        if let Ok(d) = fs::File::open(dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }

    /// Serialized file image.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_be_bytes());
        out.extend_from_slice(&(self.kv.len() as u64).to_be_bytes());
        for (k, v) in &self.kv {
            out.extend_from_slice(&(k.len() as u32).to_be_bytes());
            out.extend_from_slice(k);
            out.extend_from_slice(&(v.len() as u32).to_be_bytes());
            out.extend_from_slice(v);
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, StoreError> {
        let corrupt = |why: &str| StoreError::Corrupt(why.to_string());
        if bytes.len() < 16 + 32 || &bytes[..4] != MAGIC {
            return Err(corrupt("missing header"));
        }
        let (body, trailer) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != trailer {
            return Err(corrupt("checksum mismatch"));
        }
        let version = u32::from_be_bytes(body[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(StoreError::Corrupt(format!(
                "unsupported format version {version}"
            )));
        }
        let count = u64::from_be_bytes(body[8..16].try_into().unwrap());
        let mut pos = 16usize;
        let mut take = |len: usize| -> Result<&[u8], StoreError> {
            let end = pos
                .checked_add(len)
                .filter(|&e| e <= body.len())
                .ok_or_else(|| corrupt("truncated entry"))?;
            let slice = &body[pos..end];
            pos = end;
            Ok(slice)
        };
        let mut kv = BTreeMap::new();
        for _ in 0..count {
            let klen = u32::from_be_bytes(take(4)?.try_into().unwrap()) as usize;
            let k = take(klen)?.to_vec();
            let vlen = u32::from_be_bytes(take(4)?.try_into().unwrap()) as usize;
            let v = take(vlen)?.to_vec();
            kv.insert(k, v);
        }
        if pos != body.len() {
            return Err(corrupt("trailing bytes"));
        }
        Self::from_entries(kv)
    }

    fn from_entries(kv: BTreeMap<Vec<u8>, Vec<u8>>) -> Result<Self, StoreError> {
        let corrupt = |why: String| StoreError::Corrupt(why);
        let mut store = Store::new();
        for (k, v) in &kv {
            match k.first() {
                Some(&NS_FIELD) => {
                    let row: StoredRow =
                        serde_json::from_slice(v).map_err(|e| corrupt(e.to_string()))?;
                    let mut r = row.record.to_record().map_err(corrupt)?;
                    let id = id_from_suffix(k);
                    r.id = Some(id);
                    store.records.insert(id, r);
                }
                Some(&NS_LEDGER) => {
                    let line: CompletenessLine =
                        serde_json::from_slice(v).map_err(|e| corrupt(e.to_string()))?;
                    store.ledger.push(line.to_record().map_err(corrupt)?);
                }
                Some(&NS_ALPHA) => {
                    let line: AlphaLine =
                        serde_json::from_slice(v).map_err(|e| corrupt(e.to_string()))?;
                    let (g, a) = line.parse().map_err(corrupt)?;
                    store.alpha.insert(g, a).map_err(corrupt)?;
                }
                Some(&NS_WILD) => {
                    let line: WildMassLine =
                        serde_json::from_slice(v).map_err(|e| corrupt(e.to_string()))?;
                    apply_wild(&mut store.masses, &line).map_err(corrupt)?;
                }
                _ => {}
            }
        }
        if let Some(v) = kv.get(&meta_key(META_NEXT_ID)) {
            let bytes: [u8; 8] = v
                .as_slice()
                .try_into()
                .map_err(|_| corrupt("bad next_id".into()))?;
            store.next_id = u64::from_be_bytes(bytes);
        }
        store.grh_conditional = kv
            .get(&meta_key(META_GRH))
            .is_some_and(|v| v.as_slice() == [1]);
        store.kv = kv;
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: RecordId) -> Option<&FieldRecord> {
        self.records.get(&id)
    }

    pub fn records(&self) -> impl Iterator<Item = &FieldRecord> {
        self.records.values()
    }

    /// Degrees with at least one stored record.
    pub fn degrees(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut from = vec![NS_INDEX];
        loop {
            let next = self
                .kv
                .range::<[u8], _>((Bound::Included(from.as_slice()), Bound::Unbounded))
                .next();
            match next {
                Some((k, _)) if k[0] == NS_INDEX => {
                    let n = u32::from_be_bytes(k[1..5].try_into().unwrap());
                    out.insert(n);
                    match n.checked_add(1) {
                        Some(m) => from = index_prefix(m),
                        None => break,
                    }
                }
                _ => break,
            }
        }
        out
    }

    /// Id of the stored field with this degree and polynomial.
    pub fn find(&self, r: &FieldRecord) -> Option<RecordId> {
        self.kv
            .get(&poly_key(r))
            .map(|v| RecordId(u64::from_be_bytes(v.as_slice().try_into().unwrap())))
    }

    /// Validates and stores a field with its index entry and ramification
    /// triples, assigning the next id.
    pub fn insert_field(&mut self, mut r: FieldRecord) -> Result<RecordId, StoreError> {
        if let Err(violations) = validate_record(&r) {
            return Err(StoreError::Invalid(violations.join("; ")));
        }
        if let Some(existing) = self.find(&r) {
            return Err(StoreError::Duplicate {
                degree: r.degree,
                polynomial: r.polynomial_text(),
                existing: existing.0,
            });
        }
        let id = RecordId(self.next_id);
        r.id = Some(id);
        let row = StoredRow {
            record: FieldLine::from_record(&r),
            polynomial_text: r.polynomial_text(),
            ramified_primes: ramified_column(&r),
            absdisc: r.absdisc().to_string(),
        };
        let index = index_key(&r, id)?;
        // everything fallible is done; the writes below go in together
        self.kv.insert(
            field_key(id),
            serde_json::to_vec(&row).expect("serializable"),
        );
        self.kv.insert(index, Vec::new());
        for &(p, e) in r.disc.absdisc.factors() {
            self.kv.insert(ram_key(p, e, id), Vec::new());
        }
        self.kv.insert(poly_key(&r), id.0.to_be_bytes().to_vec());
        self.next_id += 1;
        self.kv
            .insert(meta_key(META_NEXT_ID), self.next_id.to_be_bytes().to_vec());
        self.records.insert(id, r);
        Ok(id)
    }

    /// Records with `lo <= |D| <= hi`, ascending by `|D|` (then degree, id),
    /// read through key-range scans of the index.
    pub fn scan_absdisc_range(
        &self,
        degree: Option<u32>,
        lo: &BigUint,
        hi: &BigUint,
    ) -> impl Iterator<Item = &FieldRecord> + '_ {
        let lo = if lo.is_zero() {
            BigUint::one()
        } else {
            lo.clone()
        };
        let hi = hi.min(&max_absdisc()).clone();
        let degrees: Vec<u32> = match degree {
            Some(n) => vec![n],
            None => self.degrees().into_iter().collect(),
        };
        let mut hits: Vec<&FieldRecord> = Vec::new();
        if lo <= hi {
            let lo_key = encode_absdisc(&lo).expect("within capacity");
            let hi_key = encode_absdisc(&hi).expect("within capacity");
            for n in &degrees {
                let mut start = index_prefix(*n);
                start.extend_from_slice(lo_key.as_bytes());
                let mut end = index_prefix(*n);
                end.extend_from_slice(hi_key.as_bytes());
                end.extend_from_slice(&[0xFF; 8]);
                for (k, _) in self.kv.range::<[u8], _>((
                    Bound::Included(start.as_slice()),
                    Bound::Included(end.as_slice()),
                )) {
                    if let Some(r) = self.records.get(&id_from_suffix(k)) {
                        hits.push(r);
                    }
                }
            }
        }
        if degrees.len() > 1 {
            hits.sort_by(|a, b| {
                a.absdisc()
                    .cmp(b.absdisc())
                    .then(a.degree.cmp(&b.degree))
                    .then(a.id.cmp(&b.id))
            });
        }
        hits.into_iter()
    }

    /// Ids with `e_min <= ord_p(|D|) <= e_max`; requires `e_min >= 1`.
    pub fn lookup_ramification(&self, p: Prime, e_min: u32, e_max: u32) -> BTreeSet<RecordId> {
        self.lookup_ramification_range(p, p, e_min, e_max)
    }

    /// As [`Store::lookup_ramification`] for every prime in `[p_lo, p_hi]`.
    pub fn lookup_ramification_range(
        &self,
        p_lo: Prime,
        p_hi: Prime,
        e_min: u32,
        e_max: u32,
    ) -> BTreeSet<RecordId> {
        let e_min = e_min.max(1);
        let mut out = BTreeSet::new();
        if p_lo > p_hi || e_min > e_max {
            return out;
        }
        let start = ram_key(p_lo, e_min, RecordId(0));
        let end = ram_key(p_hi, u32::MAX, RecordId(u64::MAX));
        for (k, _) in self.kv.range::<[u8], _>((
            Bound::Included(start.as_slice()),
            Bound::Included(end.as_slice()),
        )) {
            let e = u32::from_be_bytes(k[9..13].try_into().unwrap());
            if e_min <= e && e <= e_max {
                out.insert(id_from_suffix(k));
            }
        }
        out
    }

    /// All triples `(id, p, e)` in key order.
    pub fn triples(&self) -> Vec<(RecordId, Prime, u32)> {
        let start = [NS_RAM];
        let end = [NS_RAM + 1];
        self.kv
            .range::<[u8], _>((Bound::Included(&start[..]), Bound::Excluded(&end[..])))
            .map(|(k, _)| {
                let p = u64::from_be_bytes(k[1..9].try_into().unwrap());
                let e = u32::from_be_bytes(k[9..13].try_into().unwrap());
                (id_from_suffix(k), p, e)
            })
            .collect()
    }

    pub fn ledger(&self) -> &[CompletenessRecord] {
        &self.ledger
    }

    /// Adds a ledger row; an identical row is rejected as a duplicate.
    pub fn add_completeness(&mut self, row: CompletenessRecord) -> Result<(), StoreError> {
        row.validate().map_err(StoreError::Invalid)?;
        if self.ledger.contains(&row) {
            return Err(StoreError::DuplicateRow(format!(
                "completeness row {row:?}"
            )));
        }
        let mut k = vec![NS_LEDGER];
        k.extend_from_slice(&(self.ledger.len() as u64).to_be_bytes());
        let line = CompletenessLine::from_record(&row);
        self.kv
            .insert(k, serde_json::to_vec(&line).expect("serializable"));
        self.ledger.push(row);
        Ok(())
    }

    pub fn alpha_table(&self) -> &AlphaTable {
        &self.alpha
    }

    pub fn add_alpha(&mut self, group: GroupId, alpha: BigRational) -> Result<(), StoreError> {
        match self.alpha.insert(group, alpha.clone()) {
            Ok(true) => {
                let mut k = vec![NS_ALPHA];
                k.extend_from_slice(group.label().as_bytes());
                let line = AlphaLine::new(group, &alpha);
                self.kv
                    .insert(k, serde_json::to_vec(&line).expect("serializable"));
                Ok(())
            }
            Ok(false) => Err(StoreError::DuplicateRow(format!("alpha for {group}"))),
            Err(e) => Err(StoreError::Conflict(e)),
        }
    }

    pub fn mass_table(&self) -> &LocalMassTable {
        &self.masses
    }

    /// Adds a wild-mass row for `(n, p)`; rows are immutable once stored.
    pub fn add_wild_masses(
        &mut self,
        n: u32,
        p: Prime,
        masses: WildMasses,
    ) -> Result<(), StoreError> {
        if !crate::arith::is_prime(p) {
            return Err(StoreError::Invalid(format!("{p} is not prime")));
        }
        let line = WildMassLine {
            n,
            p,
            masses: match &masses {
                WildMasses::ByExponent(v) => Some(
                    v.iter()
                        .map(|m| Num::Text(crate::arith::rational_text(m)))
                        .collect(),
                ),
                WildMasses::Total(_) => None,
            },
            total: match &masses {
                WildMasses::Total(t) => Some(Num::Text(crate::arith::rational_text(t))),
                WildMasses::ByExponent(_) => None,
            },
        };
        if let Some(existing) = self.masses.row(n, p) {
            let same = match (existing, &masses) {
                (WildRow::TotalOnly(a), WildMasses::Total(b)) => a == b,
                (WildRow::ByExponent(a), WildMasses::ByExponent(b)) => {
                    let dense: BTreeMap<u32, BigRational> = b
                        .iter()
                        .enumerate()
                        .map(|(c, m)| (c as u32, m.clone()))
                        .collect();
                    *a == dense
                }
                _ => false,
            };
            return Err(if same {
                StoreError::DuplicateRow(format!("wild masses for n={n}, p={p}"))
            } else {
                StoreError::Conflict(format!("wild masses for n={n}, p={p}"))
            });
        }
        let mut scratch = self.masses.clone();
        apply_wild(&mut scratch, &line).map_err(StoreError::Invalid)?;
        self.masses = scratch;
        let mut k = vec![NS_WILD];
        k.extend_from_slice(&n.to_be_bytes());
        k.extend_from_slice(&p.to_be_bytes());
        self.kv
            .insert(k, serde_json::to_vec(&line).expect("serializable"));
        Ok(())
    }

    pub fn grh_conditional(&self) -> bool {
        self.grh_conditional
    }

    /// Sets the dataset-level flag; returns `false` when it already had that value.
    pub fn set_grh_conditional(&mut self, flag: bool) -> bool {
        let key = meta_key(META_GRH);
        let changed = self
            .kv
            .get(&key)
            .map(|v| v.as_slice() != [flag as u8])
            .unwrap_or(true);
        self.grh_conditional = flag;
        self.kv.insert(key, vec![flag as u8]);
        changed
    }

    /// Full integrity check; returns every violation found.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut expected: BTreeSet<Vec<u8>> = BTreeSet::new();
        for (id, r) in &self.records {
            if let Err(v) = validate_record(r) {
                out.extend(v.into_iter().map(|m| format!("record {id}: {m}")));
            }
            match self
                .kv
                .get(&field_key(*id))
                .map(|v| serde_json::from_slice::<StoredRow>(v))
            {
                Some(Ok(row)) => {
                    if row.ramified_primes != ramified_column(r) {
                        out.push(format!(
                            "record {id}: ramified-primes column disagrees with |D|"
                        ));
                    }
                    if row.absdisc != r.absdisc().to_string()
                        || row.polynomial_text != r.polynomial_text()
                    {
                        out.push(format!("record {id}: derived columns are stale"));
                    }
                }
                _ => out.push(format!("record {id}: row missing or unreadable")),
            }
            match index_key(r, *id) {
                Ok(k) => {
                    expected.insert(k);
                }
                Err(e) => out.push(format!("record {id}: {e}")),
            }
            for &(p, e) in r.disc.absdisc.factors() {
                expected.insert(ram_key(p, e, *id));
            }
            if self.find(r) != Some(*id) {
                out.push(format!("record {id}: uniqueness entry missing"));
            }
            if id.0 >= self.next_id {
                out.push(format!(
                    "record {id}: id not below the next id {}",
                    self.next_id
                ));
            }
        }
        for k in self.kv.keys() {
            if matches!(k.first(), Some(&NS_INDEX) | Some(&NS_RAM)) && !expected.contains(k) {
                let what = if k[0] == NS_INDEX {
                    "index entry"
                } else {
                    "ramification triple"
                };
                let id = id_from_suffix(k);
                if self.records.contains_key(&id) {
                    out.push(format!("{what} for record {id} does not match its |D|"));
                } else {
                    out.push(format!("{what} refers to missing record {id}"));
                }
            }
        }
        for k in &expected {
            if !self.kv.contains_key(k) {
                out.push(format!("missing key for record {}", id_from_suffix(k)));
            }
        }
        out
    }
}

fn apply_wild(table: &mut LocalMassTable, line: &WildMassLine) -> Result<(), String> {
    match line.parse()? {
        WildMasses::ByExponent(v) => {
            for (c, m) in v.into_iter().enumerate() {
                table.insert(line.n, line.p, c as u32, m)?;
            }
        }
        WildMasses::Total(t) => {
            table.insert_total(line.n, line.p, t)?;
        }
    }
    Ok(())
}
