use serde_json::Value;

use crate::args::Format;
use crate::record::{as_f64, OutputRecord};

pub fn render(record: &OutputRecord, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("records serialise");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(record),
        Format::Table if record.command == "table" => render_grid(record),
        Format::Table => render_table(record),
    }
}

/// `x` in scientific notation with `decimals` digits and a signed two-digit
/// exponent, e.g. `3.697e+00`.
pub fn sci(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.decimals$e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn columns(record: &OutputRecord) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for row in &record.results {
        for k in row.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

/// Columns holding indices or settings, printed in plain decimal.
const PLAIN: &[&str] = &["p", "q", "confidence"];

/// Lossless text of a cell: integers as integers, floats in shortest
/// round-trip scientific form.
fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) if n.is_f64() => format!("{:e}", n.as_f64().expect("f64")),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn plain_cell(v: Option<&Value>) -> String {
    match v {
        Some(Value::Number(n)) if n.is_f64() => format!("{}", n.as_f64().expect("f64")),
        other => csv_cell(other),
    }
}

fn table_cell(col: &str, v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => "-".into(),
        Some(v) if PLAIN.contains(&col) => plain_cell(Some(v)),
        Some(Value::Number(n)) if n.is_f64() => sci(n.as_f64().expect("f64"), 9),
        Some(v) => csv_cell(Some(v)),
    }
}

fn render_csv(record: &OutputRecord) -> String {
    let cols = columns(record);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory write");
    for row in &record.results {
        w.write_record(cols.iter().map(|c| {
            if PLAIN.contains(&c.as_str()) {
                plain_cell(row.get(c))
            } else {
                csv_cell(row.get(c))
            }
        }))
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn aligned(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&"-".repeat(out.trim_end().chars().count()));
    out.push('\n');
    for r in body {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn footer(record: &OutputRecord, out: &mut String) {
    for (k, v) in &record.metadata {
        if matches!(v, Value::Array(_) | Value::Object(_)) {
            continue;
        }
        let text = match v {
            Value::Number(n) if n.is_f64() => sci(n.as_f64().expect("f64"), 9),
            other => csv_cell(Some(other)),
        };
        out.push_str(&format!("{k}: {text}\n"));
    }
    for w in &record.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
}

fn render_table(record: &OutputRecord) -> String {
    let cols = columns(record);
    let body: Vec<Vec<String>> = record
        .results
        .iter()
        .map(|row| cols.iter().map(|c| table_cell(c, row.get(c))).collect())
        .collect();
    let mut out = aligned(&cols, &body);
    footer(record, &mut out);
    out
}

/// Rows `n`, one column per `p`, three decimals.
fn render_grid(record: &OutputRecord) -> String {
    let mut ps: Vec<String> = Vec::new();
    let mut ns: Vec<u64> = Vec::new();
    for row in &record.results {
        let p = plain_cell(row.get("p"));
        if !ps.contains(&p) {
            ps.push(p);
        }
        let n = row.get("n").and_then(Value::as_u64).unwrap_or(0);
        if !ns.contains(&n) {
            ns.push(n);
        }
    }
    let mut header = vec!["n".to_string()];
    header.extend(ps.iter().map(|p| format!("p={p}")));
    let body: Vec<Vec<String>> = ns
        .iter()
        .map(|&n| {
            let mut r = vec![n.to_string()];
            for p in &ps {
                let cell = record
                    .results
                    .iter()
                    .find(|row| {
                        row.get("n").and_then(Value::as_u64) == Some(n)
                            && &plain_cell(row.get("p")) == p
                    })
                    .and_then(|row| row.get("value"))
                    .and_then(as_f64)
                    .map_or("-".to_string(), |v| sci(v, 3));
                r.push(cell);
            }
            r
        })
        .collect();
    let q = record
        .inputs
        .get("q")
        .map(|v| plain_cell(Some(v)))
        .unwrap_or_default();
    let mut out = format!("vol(B^n_{{p,q}}), q = {q}\n");
    out.push_str(&aligned(&header, &body));
    if let Some(Value::Array(maxima)) = record.metadata.get("maxima") {
        for m in maxima {
            out.push_str(&format!(
                "p={}: maximum {} at n={}\n",
                plain_cell(m.get("p")),
                m.get("max")
                    .and_then(as_f64)
                    .map_or("-".into(), |v| sci(v, 3)),
                csv_cell(m.get("argmax"))
            ));
        }
    }
    for w in &record.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(sci(3.696_759_259, 3), "3.697e+00");
        assert_eq!(sci(2.0, 3), "2.000e+00");
        assert_eq!(sci(114.79, 3), "1.148e+02");
        assert_eq!(sci(1.23e-7, 2), "1.23e-07");
        assert_eq!(sci(-4.5e120, 1), "-4.5e+120");
        assert_eq!(sci(f64::INFINITY, 3), "inf");
    }

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 3.6967592592592595, 1e-300, 6.02e23] {
            let s = csv_cell(Some(&crate::record::num(x)));
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(csv_cell(Some(&Value::from(17u64))), "17");
    }
}
