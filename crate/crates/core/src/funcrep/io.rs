//! Step-function CSV (`t,v` header; each row is "value v up to t") and index specs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::funcrep::{IndexFunction, StepFunction, StepIndex};

fn parse_rows(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h.replace(' ', "") == "t,v" => {}
        other => return Err(Error::Parse(format!("expected header `t,v`, found {other:?}"))),
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (k, line) in lines.enumerate() {
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", k + 1)))?;
        let t: f64 = t.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad t {t:?}", k + 1)))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad v {v:?}", k + 1)))?;
        ts.push(t);
        vs.push(v);
    }
    Ok((ts, vs))
}

pub fn parse_step_csv(text: &str) -> Result<StepFunction> {
    let (t, v) = parse_rows(text)?;
    StepFunction::new(t, v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn format_step_csv(f: &StepFunction) -> String {
    let mut s = String::from("t,v\n");
    for (t, v) in f.breakpoints().iter().zip(f.values()) {
        let _ = writeln!(s, "{},{}", fmt17(*t), fmt17(*v));
    }
    s
}

pub fn read_step_csv(path: &Path) -> Result<StepFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_step_csv(&text)
}

pub fn write_step_csv(path: &Path, f: &StepFunction) -> Result<()> {
    std::fs::write(path, format_step_csv(f)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Step index CSV: same schema, rows read as "I = v on (previous t, t]".
/// The final value persists beyond the last row.
pub fn parse_step_index_csv(text: &str) -> Result<IndexFunction> {
    let (t, v) = parse_rows(text)?;
    Ok(IndexFunction::Step(StepIndex::new(t, v).map_err(|e| Error::Parse(e.to_string()))?))
}

pub fn format_step_index_csv(idx: &StepIndex) -> String {
    let mut s = String::from("t,v\n");
    let vals = idx.cell_values();
    for (k, v) in vals.iter().enumerate() {
        let t = idx.jumps().get(k).map_or_else(|| "inf".to_string(), |t| fmt17(*t));
        let _ = writeln!(s, "{},{}", t, fmt17(*v));
    }
    s
}

/// `power:c=..,alpha=..` or `step:<path>`.
pub fn parse_index_spec(spec: &str) -> Result<IndexFunction> {
    if let Some(path) = spec.strip_prefix("step:") {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        parse_step_index_csv(&text)
    } else {
        IndexFunction::parse_power(spec)
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let f = StepFunction::new(vec![0.1, 0.3, 1.0 / 3.0], vec![2.0, 1e-17, 7.25]).unwrap();
        let text = format_step_csv(&f);
        assert!(text.starts_with("t,v\n"));
        assert_eq!(parse_step_csv(&text).unwrap(), f);
    }

    #[test]
    fn csv_errors() {
        assert!(parse_step_csv("x,y\n1,2\n").is_err());
        assert!(parse_step_csv("t,v\n1\n").is_err());
        assert!(parse_step_csv("t,v\n2,1\n1,1\n").is_err());
        assert!(parse_step_csv("t,v\n1,abc\n").is_err());
        assert!(parse_step_csv("t,v\n").unwrap().is_zero());
    }

    #[test]
    fn index_round_trip() {
        let idx = StepIndex::new(vec![1.0, 2.0, 5.0], vec![1.0, 2.0, 3.0]).unwrap();
        let text = format_step_index_csv(&idx);
        match parse_step_index_csv(&text).unwrap() {
            IndexFunction::Step(s) => assert_eq!(s, idx),
            _ => panic!(),
        }
    }
}
