//! Report emission.
//!
//! JSON reports share one envelope:
//! `{ "tool", "version", "command", "timestamp"?, "passed", "config"?, "report" }`.
//! The timestamp (Unix seconds) is omitted in comparison mode so that reruns
//! with the same seed are byte-identical.
//!
//! CSV tables, one header row then one row per record; reals are written
//! with 17 significant digits:
//!
//! * counterexample: `k,norm,tail,sampled_sup`
//! * probe: `samples,net_size`
//! * witness: the pairwise distance matrix, header `step,1,…,m`, row-major
//! * net: `point,center` (center given by its point index)
//! * separation and verify: `suite,name,value,relation,bound,margin,passed,instances`

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

/// Real formatting for CSV: 17 significant digits, round-trip exact.
pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a C>,
    pub report: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: String, passed: bool, config: Option<&'a C>, report: &'a R, timestamp: bool) -> Self {
        Envelope {
            tool: "hilmod",
            version: env!("CARGO_PKG_VERSION"),
            command,
            timestamp: timestamp.then(now),
            passed,
            config,
            report,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io {
            path: "<report>".into(),
            message: e.to_string(),
        })?;
        text.push('\n');
        Ok(text)
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// A CSV table held as strings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let err = |e: csv::Error| CliError::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        };
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(err)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1 + 0.2, 1.0 / 3.0, 1e-300, -2.5, 0.0] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["k", "norm"]);
        t.push(vec!["0".into(), real(1.0)]);
        assert_eq!(t.to_csv().unwrap(), "k,norm\n0,1.0000000000000000e0\n");
    }

    #[test]
    fn envelope_without_timestamp() {
        let report = vec![1, 2];
        let e: Envelope<'_, (), _> = Envelope::new("verify".into(), true, None, &report, false);
        let text = e.to_json().unwrap();
        assert!(!text.contains("timestamp"));
        let e: Envelope<'_, (), _> = Envelope::new("verify".into(), true, None, &report, true);
        assert!(e.to_json().unwrap().contains("timestamp"));
    }
}
