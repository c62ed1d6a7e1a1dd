use serde::Serialize;
use serde_json::{Map, Value};

use sharkovsky_core::mandelbrot::Status;

use crate::args::Format;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub citations: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
}

/// A finished command: the report plus whichever renderings it supports.
pub struct Output {
    pub report: RunReport,
    pub text: String,
    pub dot: Option<String>,
    pub csv: Option<String>,
}

impl Output {
    pub fn new(command: &str, inputs: Value, results: impl Serialize, text: String) -> Output {
        Output {
            report: RunReport {
                command: command.into(),
                inputs,
                results: serde_json::to_value(results).expect("results serialize"),
                citations: Vec::new(),
                warnings: Vec::new(),
                status: None,
            },
            text,
            dot: None,
            csv: None,
        }
    }

    pub fn cite(mut self, c: impl Into<String>) -> Output {
        let c = c.into();
        if !self.report.citations.contains(&c) {
            self.report.citations.push(c);
        }
        self
    }

    pub fn warn(mut self, w: impl Into<String>) -> Output {
        self.report.warnings.push(w.into());
        self
    }

    pub fn status(mut self, s: Status) -> Output {
        self.report.status = Some(s);
        self
    }

    pub fn csv(mut self, csv: String) -> Output {
        self.csv = Some(csv);
        self
    }

    pub fn dot(mut self, dot: String) -> Output {
        self.dot = Some(dot);
        self
    }
}

/// `x` rounded to `digits` significant digits, printed in shortest form.
pub fn num(x: f64, digits: u32) -> String {
    round(x, digits).to_string()
}

pub fn round(x: f64, digits: u32) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", digits.saturating_sub(1) as usize, x).parse().expect("formatted float parses")
}

fn round_value(v: Value, digits: u32) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(round(n.as_f64().expect("f64"), digits)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(|x| round_value(x, digits)).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, x)| (k, round_value(x, digits))).collect::<Map<String, Value>>())
        }
        other => other,
    }
}

/// Renders `out` in `format`; `None` when the command has no such rendering.
pub fn emit(out: &Output, format: Format, digits: u32) -> Option<String> {
    match format {
        Format::Text => Some(with_notes(out)),
        Format::Json => {
            let value = round_value(serde_json::to_value(&out.report).expect("report serializes"), digits);
            Some(serde_json::to_string_pretty(&value).expect("value serializes") + "\n")
        }
        Format::Dot => out.dot.clone(),
        Format::Csv => out.csv.clone(),
    }
}

fn with_notes(out: &Output) -> String {
    let mut text = out.text.clone();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    for w in &out.report.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    if let Some(s) = out.report.status {
        text.push_str(&format!("status: {s}\n"));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_significant_digits() {
        assert_eq!(num(-1.754_877_666_246_693, 12), "-1.75487766625");
        assert_eq!(num(0.0, 12), "0");
        assert_eq!(num(-1.0, 12), "-1");
        assert_eq!(num(1.234_567e-20, 3), "0.0000000000000000000123");
    }

    #[test]
    fn json_numbers_are_rounded() {
        let v = round_value(serde_json::json!({"a": [1.234_567_89, 3], "b": 2.0}), 3);
        assert_eq!(v.to_string(), r#"{"a":[1.23,3],"b":2.0}"#);
    }
}
