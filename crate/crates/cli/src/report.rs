use std::io::Write;
use std::path::Path;

use asymkit::numkit::{CMat, HermMatrix};
use asymkit::Extended;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::problem::encode_matrix;

pub const TOOL: &str = "asymkit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub subcommand: String,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    pub caveats: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        positive_zero(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

/// −0.0 prints as "-0.0"; reports never distinguish it from 0.
fn positive_zero(v: &mut Value) {
    match v {
        Value::Number(n) if n.as_f64() == Some(0.0) && n.is_f64() => *v = json!(0.0),
        Value::Array(a) => a.iter_mut().for_each(positive_zero),
        Value::Object(o) => o.values_mut().for_each(positive_zero),
        _ => {}
    }
}

/// Numbers stay numbers; +∞ and −∞ become the strings "inf" and "-inf".
pub fn extended(x: Extended<f64>) -> Value {
    match x {
        Extended::Finite(v) => number(v),
        Extended::PosInf => json!("inf"),
        Extended::NegInf => json!("-inf"),
    }
}

pub fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn cmat(m: &CMat<f64>) -> Value {
    json!(encode_matrix(m))
}

pub fn herm(m: &HermMatrix<f64>) -> Value {
    cmat(m.mat())
}

/// Writes `text` to `out`, or stdout when absent. Files are replaced atomically.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
        Some(path) => {
            let io = |source| Error::Io { path: path.display().to_string(), source };
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_are_strings() {
        assert_eq!(extended(Extended::PosInf), json!("inf"));
        assert_eq!(extended(Extended::Finite(0.5)), json!(0.5));
        assert_eq!(number(f64::NEG_INFINITY), json!("-inf"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit("a", Some(&p)).unwrap();
        emit("bb", Some(&p)).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "bb");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
