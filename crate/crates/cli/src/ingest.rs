//! Raw observations from CSV or JSON files, one numeric column.

use std::path::Path;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }

    fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

/// Reads the numeric column `column` (header name or 0-based index, default
/// the first column) from `path`.
pub fn read_values(path: &Path, column: Option<&str>, format: Option<Format>) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let values = match format.unwrap_or_else(|| Format::from_path(path)) {
        Format::Csv => from_csv(&text, column)?,
        Format::Json => from_json(&text, column)?,
    };
    if values.is_empty() {
        return Err(format!("{} holds no observations", path.display()));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(format!("observation {} is not finite", i + 1));
    }
    Ok(values)
}

fn from_csv(text: &str, column: Option<&str>) -> Result<Vec<f64>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| format!("malformed CSV: {e}"))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec);
    }
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let index_hint = column.and_then(|c| c.parse::<usize>().ok());
    let header = first
        .iter()
        .nth(index_hint.unwrap_or(0))
        .is_some_and(|f| f.parse::<f64>().is_err());
    let idx = match (column, index_hint) {
        (None, _) => 0,
        (Some(_), Some(i)) => i,
        (Some(name), None) => {
            if !header {
                return Err(format!("column {name:?} given by name but the file has no header row"));
            }
            first
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| format!("no column named {name:?}"))?
        }
    };
    let start = usize::from(header);
    rows.iter()
        .enumerate()
        .skip(start)
        .map(|(line, rec)| {
            let field = rec.get(idx).unwrap_or("");
            field
                .parse::<f64>()
                .map_err(|_| format!("row {}: {field:?} is not numeric", line + 1))
        })
        .collect()
}

fn json_number(v: &Value, at: usize) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("entry {}: {v} is not numeric", at + 1))
}

fn from_json(text: &str, column: Option<&str>) -> Result<Vec<f64>, String> {
    let root: Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    let key = column.unwrap_or("values");
    let array = match &root {
        Value::Array(a) => a,
        Value::Object(map) => match map.get(key).or_else(|| map.get("data")) {
            Some(Value::Array(a)) => a,
            _ => return Err(format!("JSON object has no array under {key:?}")),
        },
        _ => return Err("JSON input must be an array or an object holding one".into()),
    };
    array
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::Object(row) => {
                let field = match column {
                    Some(c) => row.get(c),
                    None if row.len() == 1 => row.values().next(),
                    None => return Err(format!("entry {}: several fields, pick one with --column", i + 1)),
                };
                json_number(field.unwrap_or(&Value::Null), i)
            }
            other => json_number(other, i),
        })
        .collect()
}
