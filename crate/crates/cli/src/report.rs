//! Tabular reports with lossless CSV and JSON encodings.

use std::fmt;

use serde_json::{Map, Number};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
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

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

impl fmt::Display for Value {
    /// Floats use the shortest representation that parses back to the same bits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Value {
    pub fn parse_cell(cell: &str) -> Value {
        match cell {
            "" => Value::Null,
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => {
                let integral = cell.strip_prefix('-').unwrap_or(cell);
                if !integral.is_empty() && integral.bytes().all(|b| b.is_ascii_digit()) {
                    if let Ok(i) = cell.parse() {
                        return Value::Int(i);
                    }
                }
                match cell.parse::<f64>() {
                    Ok(x) => Value::Float(x),
                    Err(_) => Value::Text(cell.to_string()),
                }
            }
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => (*b).into(),
            Value::Int(i) => (*i).into(),
            Value::Float(x) => Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Value::Text(s) => s.clone().into(),
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        Ok(match v {
            serde_json::Value::Null => Value::Null,
            serde_json::Value::Bool(b) => Value::Bool(*b),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Value::Int(i),
                _ => Value::Float(n.as_f64().ok_or("number out of range")?),
            },
            serde_json::Value::String(s) => Value::Text(s.clone()),
            other => return Err(format!("unexpected JSON value {other}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// Run parameters: seeds, sample counts, grid choices.
    pub header: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// A single result, encoded as a flat JSON object.
    pub record: bool,
}

impl Report {
    pub fn table(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            header: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            record: false,
        }
    }

    pub fn record(command: &str, fields: Vec<(&str, Value)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Value>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self {
            command: command.to_string(),
            header: Vec::new(),
            columns,
            rows: vec![row],
            record: true,
        }
    }

    pub fn with_header(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.header.push((key.to_string(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn get(&self, row: usize, column: &str) -> Option<&Value> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row)?.get(j)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema_version={SCHEMA_VERSION}\n# command={}\n", self.command);
        if self.record {
            out.push_str("# record=true\n");
        }
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 cells"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut command = None;
        let mut record = false;
        let mut header = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta.split_once('=').ok_or_else(|| format!("bad header line {line:?}"))?;
                match k {
                    "schema_version" => check_schema(&Value::parse_cell(v))?,
                    "command" => command = Some(v.to_string()),
                    "record" => record = v == "true",
                    _ => header.push((k.to_string(), Value::parse_cell(v))),
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(Value::parse_cell).collect()).map_err(|e| e.to_string()))
            .collect::<Result<Vec<Vec<Value>>, String>>()?;
        Ok(Self {
            command: command.ok_or("missing command header")?,
            header,
            columns,
            rows,
            record,
        })
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        obj.insert("command".into(), self.command.clone().into());
        let header: Map<String, serde_json::Value> = self.header.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        obj.insert("header".into(), header.into());
        let row_object = |row: &Vec<Value>| -> Map<String, serde_json::Value> {
            self.columns.iter().cloned().zip(row.iter().map(Value::to_json)).collect()
        };
        if self.record {
            obj.extend(row_object(&self.rows[0]));
        } else {
            obj.insert("columns".into(), self.columns.clone().into());
            obj.insert(
                "rows".into(),
                self.rows.iter().map(|r| serde_json::Value::Object(row_object(r))).collect(),
            );
        }
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut obj = v.as_object().ok_or("report is not an object")?.clone();
        check_schema(&Value::from_json(obj.get("schema_version").ok_or("missing schema_version")?)?)?;
        obj.shift_remove("schema_version");
        let command = obj
            .shift_remove("command")
            .and_then(|c| c.as_str().map(str::to_string))
            .ok_or("missing command")?;
        let header = match obj.shift_remove("header") {
            Some(serde_json::Value::Object(h)) => h
                .iter()
                .map(|(k, v)| Ok((k.clone(), Value::from_json(v)?)))
                .collect::<Result<Vec<_>, String>>()?,
            _ => return Err("missing header".into()),
        };
        if let Some(rows) = obj.shift_remove("rows") {
            let columns: Vec<String> = serde_json::from_value(obj.shift_remove("columns").ok_or("missing columns")?)
                .map_err(|e| e.to_string())?;
            let rows = rows
                .as_array()
                .ok_or("rows is not an array")?
                .iter()
                .map(|r| {
                    let r = r.as_object().ok_or("row is not an object")?;
                    columns
                        .iter()
                        .map(|c| Value::from_json(r.get(c).unwrap_or(&serde_json::Value::Null)))
                        .collect::<Result<Vec<Value>, String>>()
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(Self {
                command,
                header,
                columns,
                rows,
                record: false,
            })
        } else {
            let (columns, row): (Vec<String>, Vec<Value>) = obj
                .iter()
                .map(|(k, v)| Ok((k.clone(), Value::from_json(v)?)))
                .collect::<Result<Vec<_>, String>>()?
                .into_iter()
                .unzip();
            Ok(Self {
                command,
                header,
                columns,
                rows: vec![row],
                record: true,
            })
        }
    }
}

fn check_schema(v: &Value) -> Result<(), String> {
    match v {
        Value::Int(SCHEMA_VERSION) => Ok(()),
        other => Err(format!("unsupported schema_version {other}")),
    }
}
