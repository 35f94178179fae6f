use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// Rounds to 12 significant digits so outputs diff cleanly across platforms.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().map(sig12).and_then(serde_json::Number::from_f64) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// What a command produced: a structured record, plus a tabular view for
/// commands that emit rows.
pub struct Report {
    json: Value,
    csv: Option<String>,
}

impl Report {
    pub fn record<T: Serialize>(rec: &T) -> anyhow::Result<Self> {
        let mut json = serde_json::to_value(rec)?;
        round_json(&mut json);
        Ok(Self { json, csv: None })
    }

    pub fn rows<T: Serialize>(rows: &[T]) -> anyhow::Result<Self> {
        let mut json = serde_json::to_value(rows)?;
        round_json(&mut json);
        // rows go through the same rounding as the JSON view
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Value::Array(items) = &json {
            if let Some(Value::Object(first)) = items.first() {
                w.write_record(first.keys())?;
            }
            for item in items {
                if let Value::Object(map) = item {
                    w.write_record(map.values().map(cell))?;
                }
            }
        }
        let csv = String::from_utf8(w.into_inner()?)?;
        Ok(Self { json, csv: Some(csv) })
    }

    pub fn json(&self) -> &Value {
        &self.json
    }

    pub fn write(&self, out: &mut impl Write, as_csv: bool) -> anyhow::Result<()> {
        match (&self.csv, as_csv) {
            (Some(csv), true) => out.write_all(csv.as_bytes())?,
            (None, true) => anyhow::bail!("--csv is only available for tabular commands (sweep, region-map, simulate)"),
            _ => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
