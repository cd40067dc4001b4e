//! Deterministic text output.
//!
//! Every floating-point number is written with 17 significant digits
//! (`{:.16e}`), enough to reconstruct the exact bit pattern on read-back, so
//! identical invocations produce byte-identical files and values survive a
//! round trip through a model file unchanged. JSON is emitted by hand for the
//! same reason: `serde_json` would shorten numbers, and key order must be
//! fixed.

use crate::fail::{CliResult, Failure};
use delaylab::verdict::Verdict;
use delaylab::RootWindow64;
use std::fmt::Write as _;
use std::path::Path;

/// `f64` with 17 significant digits, '.' decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON document with caller-controlled key order and [`num`] formatting.
#[derive(Debug, Clone)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn str(s: impl AsRef<str>) -> Json {
        Json::Str(s.as_ref().to_string())
    }

    pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn nums(values: &[f64]) -> Json {
        Json::Arr(values.iter().map(|&v| Json::Num(v)).collect())
    }

    pub fn num_rows(rows: &[Vec<f64>]) -> Json {
        Json::Arr(rows.iter().map(|r| Json::nums(r)).collect())
    }

    /// Renders the document with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&num(*x)),
            Json::Str(s) => {
                out.push('"');
                escape(s, out);
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Json::Obj(pairs) => {
                if pairs.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (key, value)) in pairs.iter().enumerate() {
                    pad(out, indent + 1);
                    out.push('"');
                    escape(key, out);
                    out.push_str("\": ");
                    value.write(out, indent + 1);
                    out.push_str(if i + 1 < pairs.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
}

pub fn complex(re: f64, im: f64) -> Json {
    Json::obj(vec![("re", Json::Num(re)), ("im", Json::Num(im))])
}

pub fn verdict(v: &Verdict) -> Json {
    Json::obj(vec![
        ("tag", Json::str(v.tag.as_str())),
        ("justification", Json::str(&v.justification)),
        ("certainty", Json::str(v.certainty.as_str())),
    ])
}

pub fn window(w: &RootWindow64) -> Json {
    Json::obj(vec![
        ("re_min", Json::Num(w.re_min)),
        ("re_max", Json::Num(w.re_max)),
        ("im_max", Json::Num(w.im_max)),
    ])
}

/// One CSV row, '\n'-terminated.
pub fn csv_row(values: &[f64], out: &mut String) {
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&num(v));
    }
    out.push('\n');
}

/// Writes to the given path, or stdout when there is none.
pub fn write_out(path: Option<&Path>, text: &str, location: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::config(location, format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::config(location, format!("cannot write to stdout: {e}")))
        }
    }
}
