//! Report rows and their CSV and JSON-lines encodings.

use crate::config::Format;
use serde_json::{json, Value};

pub const CSV_HEADER: &str = "task,method,k,re,im,tail_bound,rounded,defect,seconds";

/// Content of the `rounded` column.
#[derive(Clone, Debug, PartialEq)]
pub enum Rounded {
    Integer(i64),
    /// The method does not produce an index.
    NotApplicable,
    /// The task failed with this message.
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub task: String,
    pub method: String,
    pub k: Option<usize>,
    pub re: f64,
    pub im: f64,
    pub tail_bound: f64,
    pub rounded: Rounded,
    /// Distance to the nearest integer, reported for every finite value.
    pub defect: f64,
    pub seconds: f64,
    /// Whether the row meets its tolerance.
    pub passed: bool,
}

impl ReportRow {
    pub fn failure(task: &str, method: &str, k: Option<usize>, message: String, seconds: f64) -> Self {
        Self {
            task: task.into(),
            method: method.into(),
            k,
            re: f64::NAN,
            im: f64::NAN,
            tail_bound: f64::NAN,
            rounded: Rounded::Error(message),
            defect: f64::NAN,
            seconds,
            passed: false,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.rounded, Rounded::Error(_))
    }

    fn rounded_text(&self) -> String {
        match &self.rounded {
            Rounded::Integer(n) => n.to_string(),
            Rounded::NotApplicable => "n/a".into(),
            Rounded::Error(m) => format!("error: {m}"),
        }
    }

    fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        let rounded = match &self.rounded {
            Rounded::Integer(n) => json!(n),
            _ => json!(self.rounded_text()),
        };
        json!({
            "task": self.task,
            "method": self.method,
            "k": self.k,
            "re": num(self.re),
            "im": num(self.im),
            "tail_bound": num(self.tail_bound),
            "rounded": rounded,
            "defect": num(self.defect),
            "seconds": self.seconds,
        })
    }
}

/// Renders rows as CSV with [`CSV_HEADER`] or as one JSON object per line.
pub fn emit_report(rows: &[ReportRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_HEADER.split(',')).expect("writing to memory");
            for r in rows {
                w.write_record([
                    r.task.clone(),
                    r.method.clone(),
                    r.k.map(|k| k.to_string()).unwrap_or_default(),
                    format!("{:e}", r.re),
                    format!("{:e}", r.im),
                    format!("{:e}", r.tail_bound),
                    r.rounded_text(),
                    format!("{:e}", r.defect),
                    format!("{:.6}", r.seconds),
                ])
                .expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
        }
        Format::JsonLines => rows.iter().map(|r| format!("{}\n", r.to_json())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(task: &str) -> ReportRow {
        ReportRow {
            task: task.into(),
            method: "winding".into(),
            k: None,
            re: 1.0,
            im: 0.0,
            tail_bound: 0.0,
            rounded: Rounded::Integer(1),
            defect: 0.0,
            seconds: 0.01,
            passed: true,
        }
    }

    #[test]
    fn empty_rows_give_the_header() {
        assert_eq!(emit_report(&[], Format::Csv), format!("{CSV_HEADER}\n"));
        assert_eq!(emit_report(&[], Format::JsonLines), "");
    }

    #[test]
    fn one_row_csv() {
        let text = emit_report(&[row("a")], Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("a,winding,,1e0,0e0,0e0,1,0e0,"), "{}", lines[1]);
    }

    #[test]
    fn json_lines_parse_with_the_csv_keys() {
        let mut failed = ReportRow::failure("b", "direct", None, "window too small: x".into(), 0.0);
        failed.k = Some(1);
        let text = emit_report(&[row("a"), failed], Format::JsonLines);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let keys: Vec<&str> = CSV_HEADER.split(',').collect();
        for l in lines {
            let v: Value = serde_json::from_str(l).unwrap();
            let obj = v.as_object().unwrap();
            assert_eq!(obj.len(), keys.len());
            assert!(keys.iter().all(|k| obj.contains_key(*k)));
        }
    }

    #[test]
    fn error_text_is_quoted_in_csv() {
        let r = ReportRow::failure("c", "direct", None, "window too small: a, b".into(), 0.0);
        let text = emit_report(&[r], Format::Csv);
        assert!(text.contains("\"error: window too small: a, b\""));
    }
}
