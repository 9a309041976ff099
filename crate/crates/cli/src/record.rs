use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

pub type Row = Map<String, Value>;

/// Everything one invocation prints, in every format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Vec<Row>,
    /// Per-invocation values that are not rows (calibration constants,
    /// window ratios, family members).
    pub metadata: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs: Map::new(),
            results: Vec::new(),
            metadata: Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }
}

/// A float cell; non-finite values become the strings `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::from("nan"),
        None if x > 0.0 => Value::from("inf"),
        None => Value::from("-inf"),
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Inverse of [`num`] for reading records back.
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Builds a row with keys in insertion order.
pub struct RowBuilder(Row);

impl RowBuilder {
    pub fn new() -> Self {
        RowBuilder(Map::new())
    }

    pub fn set(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn float(self, key: &str, x: f64) -> Self {
        self.set(key, num(x))
    }

    pub fn build(self) -> Row {
        self.0
    }
}

impl Default for RowBuilder {
    fn default() -> Self {
        Self::new()
    }
}
