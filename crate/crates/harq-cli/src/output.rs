//! CSV and JSON-lines writers. Numbers carry 12 significant digits.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::config::{Format, SweepConfig};
use crate::sweep::Row;

/// Rounds to 12 significant digits and prints the shortest form that
/// reads back to the rounded value.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v == 0.0 {
            "0".into()
        } else {
            format!("{v}")
        };
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn coords(row: &Row) -> [f64; 4] {
    let p = &row.point;
    [p.snr_db, p.rate_r1, p.max_rounds as f64, p.arrival_rate]
}

pub fn write_csv<W: Write>(cfg: &SweepConfig, rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(cfg.columns())?;
    for row in rows {
        let mut rec: Vec<String> = coords(row).iter().map(|&v| fmt_num(v)).collect();
        rec.extend(row.cells.iter().map(|c| c.map(fmt_num).unwrap_or_default()));
        rec.push(row.errors.join("; "));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(cfg: &SweepConfig, rows: &[Row], mut out: W) -> std::io::Result<()> {
    let cols = cfg.columns();
    for row in rows {
        let mut obj = Map::new();
        let values = coords(row).into_iter().map(Some).chain(row.cells.iter().copied());
        for (name, v) in cols.iter().zip(values) {
            let json = v
                .and_then(|v| Number::from_f64(fmt_num(v).parse().unwrap_or(v)))
                .map(Value::Number)
                .unwrap_or(Value::Null);
            obj.insert((*name).to_string(), json);
        }
        let err = if row.errors.is_empty() { Value::Null } else { Value::String(row.errors.join("; ")) };
        obj.insert("error".into(), err);
        serde_json::to_writer(&mut out, &Value::Object(obj))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_rows<W: Write>(cfg: &SweepConfig, rows: &[Row], out: W) -> std::io::Result<()> {
    match cfg.format {
        Format::Csv => write_csv(cfg, rows, out).map_err(std::io::Error::other),
        Format::Jsonl => write_jsonl(cfg, rows, out),
    }
}
