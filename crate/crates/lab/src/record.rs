//! Persisted experiment results: a line-delimited record store with a
//! (command, parameters, code version) cache index, plus flat CSV summaries.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::LabError;

/// A parameter as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    Text(String),
}

impl ParamValue {
    pub fn parse(raw: &str) -> ParamValue {
        match raw.trim().parse::<f64>() {
            Ok(v) => ParamValue::Num(v),
            Err(_) => ParamValue::Text(raw.trim().to_string()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Num(v) => Some(*v),
            ParamValue::Text(_) => None,
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// One persisted result row.  Round-trips bit-exactly through the JSONL
/// store (floats serialize in shortest round-trip form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub params: Params,
    pub values: BTreeMap<String, f64>,
    pub envelope: Option<f64>,
    pub ratio: Option<f64>,
    /// Set when the grid point failed; the failure is cached like a result.
    pub error: Option<String>,
    pub code_version: String,
    pub timestamp_unix_ms: u64,
}

impl ExperimentRecord {
    pub fn new(command: &str, params: Params) -> ExperimentRecord {
        ExperimentRecord {
            command: command.to_string(),
            params,
            values: BTreeMap::new(),
            envelope: None,
            ratio: None,
            error: None,
            code_version: code_version().to_string(),
            timestamp_unix_ms: now_ms(),
        }
    }

    pub fn cache_key(&self) -> String {
        cache_key(&self.command, &self.params, &self.code_version)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

pub fn code_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Canonical cache key; parameters serialize in sorted key order.
pub fn cache_key(command: &str, params: &Params, version: &str) -> String {
    let params_json = serde_json::to_string(params).expect("params serialize");
    format!("{command}|{params_json}|{version}")
}

/// Append-only JSONL store with an in-memory key index.
pub struct RecordStore {
    path: PathBuf,
    keys: HashSet<String>,
    records: Vec<ExperimentRecord>,
}

impl RecordStore {
    /// Open (or lazily create) the store at `path`, loading existing rows.
    pub fn open(path: &Path) -> Result<RecordStore, LabError> {
        let mut store = RecordStore {
            path: path.to_path_buf(),
            keys: HashSet::new(),
            records: Vec::new(),
        };
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let rec: ExperimentRecord =
                    serde_json::from_str(line).map_err(|e| LabError::Config {
                        context: format!("{}:{}", path.display(), i + 1),
                        message: e.to_string(),
                    })?;
                store.keys.insert(rec.cache_key());
                store.records.push(rec);
            }
        }
        Ok(store)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    /// Merge the cache index (not the rows) of another store.
    pub fn absorb_keys(&mut self, other: &RecordStore) {
        for k in &other.keys {
            self.keys.insert(k.clone());
        }
    }

    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    pub fn append(&mut self, record: ExperimentRecord) -> Result<(), LabError> {
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(|e| LabError::io(&self.path, e))?;
            }
        }
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| LabError::io(&self.path, e))?;
        let line = serde_json::to_string(&record).expect("record serialize");
        writeln!(file, "{line}").map_err(|e| LabError::io(&self.path, e))?;
        self.keys.insert(record.cache_key());
        self.records.push(record);
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// Fixed summary column order.
pub const CSV_COLUMNS: [&str; 11] = [
    "command",
    "d",
    "x",
    "y",
    "S",
    "S1",
    "S2",
    "main_term",
    "abs_error",
    "envelope",
    "ratio",
];

/// Write the flat CSV summary for a set of records.
///
/// `d`, `x` and `y` are taken from the parameters (with `k`/`q` standing in
/// for missing `d`/`x` where a command uses those names); `S` is each
/// command's primary statistic.  Cells without a value stay empty.
pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<(), LabError> {
    let mut out = String::new();
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for rec in records {
        let param = |names: &[&str]| -> String {
            for n in names {
                if let Some(v) = rec.params.get(*n) {
                    return match v {
                        ParamValue::Num(x) => format!("{x}"),
                        ParamValue::Text(s) => s.clone(),
                    };
                }
            }
            String::new()
        };
        let value = |names: &[&str]| -> String {
            for n in names {
                if let Some(v) = rec.value(n) {
                    return format!("{v}");
                }
            }
            String::new()
        };
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let row = [
            rec.command.clone(),
            param(&["d", "k"]),
            param(&["x", "q"]),
            param(&["y", "m"]),
            value(&["S", "lhs", "worst_ratio", "max_rel_err"]),
            value(&["S1"]),
            value(&["S2"]),
            value(&["main_term"]),
            value(&["abs_error", "rel_err"]),
            opt(rec.envelope),
            opt(rec.ratio),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| LabError::io(path, e))
}

/// The CSV summary path conventionally paired with a record store.
pub fn csv_sibling(path: &Path) -> PathBuf {
    path.with_extension("csv")
}
