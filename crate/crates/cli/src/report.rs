use std::collections::BTreeMap;

use anyhow::Result;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::thresholds::Thresholds;

/// Comparison a check applies between its value and its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Below => value < threshold,
            Relation::Above => value > threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    /// Key of the threshold in the committed table.
    pub threshold_key: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64, key: &str) -> Self {
        let pass = value.is_finite() && relation.holds(value, threshold);
        Check { name: name.into(), value, relation, threshold, threshold_key: key.to_string(), pass }
    }

    /// One human-readable line, e.g. `PASS associativity 3.1e-17 <= 1e-9 (assoc_tol)`.
    pub fn line(&self) -> String {
        format!(
            "{} {} {:e} {} {:e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation.symbol(),
            self.threshold,
            self.threshold_key
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub thresholds_version: u32,
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub thresholds: BTreeMap<String, f64>,
    /// One flat object per trial, coset or level.
    pub records: Vec<Map<String, Value>>,
    pub summary: Map<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, thresholds: &Thresholds) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            thresholds_version: thresholds.version,
            parameters: Map::new(),
            seed,
            thresholds: thresholds.values().clone(),
            records: Vec::new(),
            summary: Map::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.to_string(), json(value));
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), json(value));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Records as CSV, columns in first-record order.
    pub fn records_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(first) = self.records.first() {
            let header: Vec<&String> = first.keys().collect();
            w.write_record(&header)?;
            for r in &self.records {
                w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))?;
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Builds a flat record from `(key, value)` pairs.
pub fn record<I, K, V>(fields: I) -> Map<String, Value>
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Serialize,
{
    fields.into_iter().map(|(k, v)| (k.into(), json(v))).collect()
}

pub fn json(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("plain data serializes")
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
