//! Machine-readable run reports. Section order is fixed by the struct and
//! map keys are sorted, so identical runs serialize to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::numeric::residual::ResidualReport;

pub const PASS: &str = "pass";
pub const FAIL: &str = "fail";

pub fn verdict(ok: bool) -> String {
    if ok { PASS } else { FAIL }.to_string()
}

pub fn complex(c: C) -> Value {
    json!([c.re, c.im])
}

pub fn complex_vec(v: &[C]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    #[serde(rename = "spec-echo")]
    pub spec_echo: Map<String, Value>,
    pub trace: Map<String, Value>,
    pub variety: Map<String, Value>,
    pub formulas: Map<String, Value>,
    pub residuals: Vec<ResidualReport>,
    pub periods: Map<String, Value>,
    pub verdicts: BTreeMap<String, String>,
    /// Wall-clock seconds per stage; only present on request since it breaks
    /// byte-identical replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    pub seed: u64,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(seed: u64) -> Self {
        Report {
            seed,
            ..Default::default()
        }
    }

    /// Records a residual suite and its verdict under the same name.
    pub fn residual(&mut self, rep: ResidualReport) {
        self.verdicts.insert(rep.relation.clone(), verdict(rep.passed()));
        self.residuals.push(rep);
    }

    pub fn set_verdict(&mut self, name: impl Into<String>, ok: bool) {
        self.verdicts.insert(name.into(), verdict(ok));
    }

    pub fn fail(&mut self, stage: &str, message: impl std::fmt::Display) {
        self.failures.push(format!("{stage}: {message}"));
    }

    /// True when every verdict passes and no stage failed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verdicts.values().all(|v| v == PASS)
    }

    pub fn time(&mut self, stage: &str, secs: f64) {
        if let Some(t) = self.timings.as_mut() {
            t.insert(stage.to_string(), secs);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn emit(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    /// Folds per-family reports into one, keying every section by label.
    pub fn combine(seed: u64, parts: Vec<(String, Report)>, timings: bool) -> Report {
        let mut out = Report::new(seed);
        if timings {
            out.timings = Some(BTreeMap::new());
        }
        for (label, r) in parts {
            out.spec_echo.insert(label.clone(), Value::Object(r.spec_echo));
            out.trace.insert(label.clone(), Value::Object(r.trace));
            out.variety.insert(label.clone(), Value::Object(r.variety));
            out.formulas.insert(label.clone(), Value::Object(r.formulas));
            out.periods.insert(label.clone(), Value::Object(r.periods));
            for mut rep in r.residuals {
                rep.relation = format!("{label}: {}", rep.relation);
                out.residuals.push(rep);
            }
            for (k, v) in r.verdicts {
                out.verdicts.insert(format!("{label}: {k}"), v);
            }
            if let (Some(t), Some(rt)) = (out.timings.as_mut(), r.timings) {
                for (k, v) in rt {
                    t.insert(format!("{label}: {k}"), v);
                }
            }
            out.failures.extend(r.failures.into_iter().map(|f| format!("{label}: {f}")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_verdicts() {
        let mut r = Report::new(7);
        r.residual(ResidualReport::from_values("V", vec![3e-12; 10], 0, 1e-9));
        assert_eq!(r.verdicts["V"], "pass");
        assert!(r.passed());
        r.residual(ResidualReport::from_values("W", vec![1e-3; 10], 0, 1e-9));
        assert!(!r.passed());
        let text = r.to_json();
        assert!(text.contains("\"seed\": 7"));
        assert!(!text.contains("timings"));
        assert_eq!(text, r.clone().to_json());
    }

    #[test]
    fn stage_failure_fails_report() {
        let mut r = Report::new(1);
        r.fail("variety", "no primitive element");
        assert!(!r.passed());
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["failures"][0], "variety: no primitive element");
    }
}
