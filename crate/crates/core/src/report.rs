//! Check records and the JSON report.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Below,
    AtLeast,
    Above,
}

impl Relation {
    pub fn holds(&self, metric: f64, threshold: f64) -> bool {
        match self {
            Relation::Below => metric < threshold,
            Relation::AtLeast => metric >= threshold,
            Relation::Above => metric > threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub id: String,
    pub module: String,
    /// Acceptance criterion number, 0 for module invariants.
    pub criterion: u32,
    pub paper_anchor: String,
    pub inputs_digest: String,
    pub metric: Option<f64>,
    pub relation: Relation,
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_digest: String,
    pub summary: Summary,
    pub records: Vec<Record>,
    pub tables: BTreeMap<String, serde_json::Value>,
}

/// First 16 hex digits of the SHA-256 of the JSON form.
pub fn digest<T: Serialize + ?Sized>(inputs: &T) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    let h = Sha256::digest(&bytes);
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(seed: u64, config_digest: String) -> Self {
        Report {
            tool: "tubelet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config_digest,
            summary: Summary::default(),
            records: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.summary.total += 1;
        match r.verdict {
            Verdict::Pass => self.summary.pass += 1,
            Verdict::Fail => self.summary.fail += 1,
        }
        self.records.push(r);
    }

    pub fn table<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or_else(|e| serde_json::Value::String(e.to_string()));
        self.tables.insert(key.to_string(), v);
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    /// Records of one criterion, in suite order.
    pub fn criterion(&self, c: u32) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.criterion == c)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| crate::Error::Config(format!("{}: {e}", path.display())))
    }
}
