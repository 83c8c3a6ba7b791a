//! Number field table engine.
//!
//! Stores field records with their invariants, answers range and
//! ramification searches through an ordered index, reports whether results
//! are provably complete, and evaluates mass-heuristic predictions and Galois
//! root discriminants exactly.

pub mod arith;
pub mod completeness;
pub mod encoding;
pub mod error;
pub mod groups;
pub mod ingest;
pub mod localdata;
pub mod mass;
pub mod model;
pub mod query;
pub mod report;
pub mod schema;
pub mod store;

pub use completeness::{check_complete, AlphaTable, CompletenessRecord, Verdict};
pub use encoding::{
    decode_absdisc, encode_absdisc, encode_group_set, GroupSetCode, OrderedDiscKey,
};
pub use error::{EncodingError, LocalDataError, MassError, ModelError, QueryError, StoreError};
pub use groups::GroupId;
pub use ingest::{ingest_file, ingest_str, parse_record, validate_record, IngestReport};
pub use localdata::{alpha_exponent, grd_from_contents, parse_slope_content, SlopeContent};
pub use model::{FieldRecord, PrimePowerProduct, RecordId};
pub use query::{execute_search, SearchRequest, SearchResult};
pub use store::Store;

/// The bundled seed: the six quartic fields of smallest discriminant with
/// their ledger rows, alpha values and the wild local masses.
pub const SEED: &str = include_str!("../data/seed.jsonl");
