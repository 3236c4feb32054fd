//! JSON reporting with a stable field order. Reports are deterministic:
//! no wall-clock data is ever serialized, so two runs over the same
//! inputs agree byte for byte.

use num_bigint::BigUint;
use serde::ser::Serializer;
use serde::Serialize;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn biguint_as_string<S: Serializer>(v: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

/// Top-level wrapper placed around every machine-readable report.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub command: String,
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, body: T) -> Report<T> {
        Report {
            schema: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Basic per-scheme facts shared by several commands.
#[derive(Debug, Serialize)]
pub struct SchemeSummary {
    pub label: Option<String>,
    pub points: usize,
    pub rank: usize,
    pub valencies: Vec<u32>,
    pub commutative: bool,
    pub symmetric: bool,
    pub radical_order: u64,
    pub radical_relations: Vec<u16>,
    pub residue_order: u64,
    pub residue_relations: Vec<u16>,
}

impl SchemeSummary {
    pub fn new(scheme: &crate::Scheme, label: Option<String>) -> SchemeSummary {
        let radical = crate::structure::thin_radical(scheme);
        let residue = crate::structure::thin_residue(scheme);
        SchemeSummary {
            label,
            points: scheme.n(),
            rank: scheme.rank(),
            valencies: scheme.relations().map(|s| scheme.valency(s)).collect(),
            commutative: scheme.is_commutative(),
            symmetric: scheme.is_symmetric(),
            radical_order: radical.order(scheme),
            radical_relations: radical.rels().to_vec(),
            residue_order: residue.order(scheme),
            residue_relations: residue.rels().to_vec(),
        }
    }
}
