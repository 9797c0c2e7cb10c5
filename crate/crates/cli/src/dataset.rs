//! Tabular results and their CSV / JSON encodings.

use serde_json::{json, Map, Value as Json};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            // shortest repr that reads back to the same bits
            Value::Num(v) => format!("{v:?}"),
            Value::Int(v) => v.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Num(v) if v.is_finite() => json!(v),
            Value::Num(_) | Value::Null => Json::Null,
            Value::Int(v) => json!(v),
            Value::Bool(b) => json!(b),
            Value::Text(s) => json!(s),
        }
    }

    fn from_json(v: &Json) -> Value {
        match v {
            Json::Null => Value::Null,
            Json::Bool(b) => Value::Bool(*b),
            Json::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Value::Int(i),
                _ => Value::Num(n.as_f64().unwrap_or(f64::NAN)),
            },
            Json::String(s) => Value::Text(s.clone()),
            other => Value::Text(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Resolved configuration and run notes, carried into the JSON output.
    pub meta: Json,
}

impl Dataset {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), meta: Json::Object(Map::new()) }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one column.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Json> = self.columns.iter().cloned().zip(r.iter().map(Value::to_json)).collect();
                Json::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": self.meta, "rows": rows }))
            .expect("dataset is always serializable");
        s.push('\n');
        s
    }

    /// Reads back the output of [`Dataset::to_json`]. Non-finite numbers come
    /// back as nulls.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let rows = doc
            .get("rows")
            .and_then(Json::as_array)
            .ok_or_else(|| CliError::Parse("missing `rows` array".into()))?;
        let columns: Vec<String> = match rows.first().and_then(Json::as_object) {
            Some(o) => o.keys().cloned().collect(),
            None => Vec::new(),
        };
        let mut out = Dataset { columns: columns.clone(), rows: Vec::new(), meta: doc.get("meta").cloned().unwrap_or(Json::Null) };
        for (i, r) in rows.iter().enumerate() {
            let obj = r.as_object().ok_or_else(|| CliError::Parse(format!("row {i} is not an object")))?;
            let row = columns
                .iter()
                .map(|c| obj.get(c).map(Value::from_json).ok_or_else(|| CliError::Parse(format!("row {i} lacks `{c}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            out.rows.push(row);
        }
        Ok(out)
    }
}
