//! Result serialization.
//!
//! JSONL: one object per record with `"type": "record"`, then one object with
//! `"type": "estimate"`. Every object carries `schema_version`.
//!
//! CSV: a header row of [`CSV_COLUMNS`], then one row per object of the JSONL
//! stream; columns that do not apply to a row are left empty.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use super::{AdvantageEstimate, ExperimentRecord};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: &[&str] = &[
    "schema_version",
    "type",
    "trial",
    "seed",
    "secret_bit",
    "guess",
    "win",
    "oracle_calls",
    "resamples",
    "trials",
    "wins",
    "win_rate",
    "advantage",
    "stderr",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`; expected jsonl or csv")),
        }
    }
}

fn tagged(kind: &str, body: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("type".into(), json!(kind));
    if let Value::Object(fields) = body {
        obj.extend(fields);
    }
    Value::Object(obj)
}

pub fn record_json(rec: &ExperimentRecord) -> Value {
    tagged(
        "record",
        serde_json::to_value(rec).expect("record serializes"),
    )
}

pub fn estimate_json(est: &AdvantageEstimate) -> Value {
    tagged(
        "estimate",
        serde_json::to_value(est).expect("estimate serializes"),
    )
}

pub fn write_jsonl(
    out: &mut dyn Write,
    records: &[ExperimentRecord],
    estimate: &AdvantageEstimate,
) -> io::Result<()> {
    for rec in records {
        writeln!(out, "{}", record_json(rec))?;
    }
    writeln!(out, "{}", estimate_json(estimate))
}

fn csv_row(obj: &Value) -> Vec<String> {
    CSV_COLUMNS
        .iter()
        .map(|c| match obj.get(*c) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        })
        .collect()
}

pub fn write_csv(
    out: &mut dyn Write,
    records: &[ExperimentRecord],
    estimate: &AdvantageEstimate,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for rec in records {
        w.write_record(csv_row(&record_json(rec)))?;
    }
    w.write_record(csv_row(&estimate_json(estimate)))?;
    w.flush()
}

pub fn write(
    format: Format,
    out: &mut dyn Write,
    records: &[ExperimentRecord],
    estimate: &AdvantageEstimate,
) -> io::Result<()> {
    match format {
        Format::Jsonl => write_jsonl(out, records, estimate),
        Format::Csv => write_csv(out, records, estimate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<ExperimentRecord>, AdvantageEstimate) {
        let recs = vec![
            ExperimentRecord::new(0, 11, 0, 0),
            ExperimentRecord::new(1, 12, 1, 0),
        ];
        let est = AdvantageEstimate::from_records(&recs);
        (recs, est)
    }

    #[test]
    fn jsonl_lines_are_tagged() {
        let (recs, est) = sample();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &recs, &est).unwrap();
        let lines: Vec<Value> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0]["type"], "record");
        assert_eq!(lines[1]["win"], false);
        assert_eq!(lines[2]["type"], "estimate");
        assert_eq!(lines[2]["win_rate"], 0.5);
        assert!(lines.iter().all(|l| l["schema_version"] == 1));
        let back: ExperimentRecord = serde_json::from_value(lines[1].clone()).unwrap();
        assert_eq!(back, recs[1]);
    }

    #[test]
    fn csv_is_rectangular() {
        let (recs, est) = sample();
        let mut buf = Vec::new();
        write_csv(&mut buf, &recs, &est).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert_eq!(row.split(',').count(), CSV_COLUMNS.len());
        }
        assert!(rows[1].starts_with("1,record,0,11,0,0,true,0,0,,"));
        assert!(rows[3].starts_with("1,estimate,,,,,,,,2,1,0.5,"));
    }
}
