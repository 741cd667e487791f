//! Machine-readable run reports: a stable JSON schema for single
//! computations and a small CSV builder for sweeps. All floats are
//! normalized to 10 significant digits so identical configurations
//! produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::states::NamedState;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round to 10 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.9e}", v).parse().unwrap()
}

/// Decimal rendering of a value rounded to 10 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    round_sig(v).to_string()
}

/// Round every float in a JSON tree to 10 significant digits.
pub fn normalize_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                if let Some(f) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(f)) {
                        *v = Value::Number(r);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_json),
        Value::Object(map) => map.values_mut().for_each(normalize_json),
        _ => {}
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantityResult {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub converged: bool,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateInfo {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub dims: Vec<usize>,
}

impl StateInfo {
    pub fn of(named: &NamedState) -> Self {
        StateInfo {
            name: named.name.clone(),
            params: named.params.clone(),
            dims: named.state.dims().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: Value,
    pub state: StateInfo,
    /// Quantity name to result, in stable (sorted) order.
    pub results: BTreeMap<String, QuantityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Value>,
}

impl Report {
    pub fn new(config: Value, state: StateInfo) -> Self {
        Report {
            tool_version: TOOL_VERSION.into(),
            config,
            state,
            results: BTreeMap::new(),
            verdicts: None,
        }
    }

    pub fn push(&mut self, quantity: &str, result: QuantityResult) {
        self.results.insert(quantity.into(), result);
    }

    pub fn set_verdicts(&mut self, verdicts: impl Serialize) {
        self.verdicts = Some(json!(verdicts));
    }

    /// Normalized pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut v = json!(self);
        normalize_json(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

/// CSV with a fixed header, numeric body rows and optional comment footer
/// lines (prefixed `#`).
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Csv {
            header: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push_row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.header.len(), "row width mismatch");
        self.rows.push(values.iter().map(|&v| fmt_sig(v)).collect());
    }

    pub fn push_footer(&mut self, line: &str) {
        self.footer.push(format!("# {line}"));
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for line in &self.footer {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::werner;

    #[test]
    fn rounds_to_ten_significant_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.3333333333);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-123456789012.0), -123456789000.0);
        assert_eq!(fmt_sig(2f64.sqrt()), "1.414213562");
    }

    #[test]
    fn normalizes_nested_json() {
        let mut v = json!({"a": [1.0f64 / 3.0, 7], "b": {"c": 2f64.sqrt()}});
        normalize_json(&mut v);
        assert_eq!(v["a"][0], json!(0.3333333333));
        assert_eq!(v["a"][1], json!(7));
        assert_eq!(v["b"]["c"], json!(round_sig(std::f64::consts::SQRT_2)));
    }

    #[test]
    fn report_renders_deterministically() {
        let named = werner(0.7).unwrap();
        let mut rep = Report::new(json!({"seed": 0}), StateInfo::of(&named));
        rep.push(
            "coherent_info",
            QuantityResult {
                value: 0.1234567890123,
                bound: None,
                converged: true,
                runtime_s: 0.001,
            },
        );
        let a = rep.render();
        let b = rep.render();
        assert_eq!(a, b);
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["tool_version"], json!(TOOL_VERSION));
        assert_eq!(parsed["state"]["name"], json!("werner"));
        assert_eq!(parsed["results"]["coherent_info"]["value"], json!(0.123456789));
    }

    #[test]
    fn csv_renders_rows_and_footer() {
        let mut csv = Csv::new(&["p", "value"]);
        csv.push_row(&[0.5, 1.0 / 3.0]);
        csv.push_footer("root p = 0.7476");
        let s = csv.render();
        assert_eq!(s, "p,value\n0.5,0.3333333333\n# root p = 0.7476\n");
    }
}
