//! JSON report emitted by obfuscation runs, carrying everything needed to
//! replay or audit a run: the exact seed and knobs, per-site rewrite records
//! with their oracle results, and the analysis numbers.

use serde::Serialize;

use crate::rewrite::{ExcludedReason, SiteRewrite, Trigger};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub mode: String,
    pub style: String,
    pub chain_length: u32,
    pub iterations: u32,
    pub files: Vec<FileReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    /// Input path as given on the command line.
    pub program: String,
    /// Path of the final rewritten source.
    pub output: String,
    pub class_rename: Option<(String, String)>,
    pub iterations: u32,
    pub total_statements: u32,
    pub obfuscated_statements: u32,
    pub re_effort: u64,
    pub sites: Vec<SiteRecord>,
    pub excluded: Vec<ExcludedRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff_verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiteRecord {
    /// 1-based iteration that performed this rewrite.
    pub iteration: u32,
    pub statement_index: usize,
    pub line: u32,
    pub col: u32,
    pub original_value: i64,
    pub depth: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trigger: Option<Trigger>,
    pub expression: String,
    pub oracle_value: i64,
    pub oracle_pass: bool,
}

impl SiteRecord {
    pub fn from_rewrite(iteration: u32, s: &SiteRewrite) -> SiteRecord {
        SiteRecord {
            iteration,
            statement_index: s.statement_index,
            line: s.line,
            col: s.col,
            original_value: s.original_value,
            depth: s.depth,
            trigger: s.trigger,
            expression: s.expression.clone(),
            oracle_value: s.oracle_value,
            oracle_pass: s.oracle_pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcludedRecord {
    pub iteration: u32,
    pub line: u32,
    pub col: u32,
    pub value: i64,
    pub reason: ExcludedReason,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimingRecord {
    pub original_ms: f64,
    pub obfuscated_ms: f64,
    pub ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_serializes_with_expected_fields() {
        let report = RunReport {
            seed: 7,
            mode: "doubled".into(),
            style: "unit".into(),
            chain_length: 13,
            iterations: 2,
            files: vec![FileReport {
                program: "leapyears.java".into(),
                output: "out/leapyears_mod123123.java".into(),
                class_rename: Some(("leapyears".into(), "leapyears_mod123123".into())),
                iterations: 2,
                total_statements: 10,
                obfuscated_statements: 4,
                re_effort: 8,
                sites: vec![SiteRecord {
                    iteration: 1,
                    statement_index: 4,
                    line: 5,
                    col: 15,
                    original_value: 2006,
                    depth: 10,
                    trigger: Some(Trigger::Assign),
                    expression: "(1003*F(12273%6143,10))".into(),
                    oracle_value: 2006,
                    oracle_pass: true,
                }],
                excluded: vec![],
                diff_verdict: None,
                timing: None,
                warnings: vec![],
            }],
        };
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["files"][0]["re_effort"], 8);
        assert_eq!(json["files"][0]["sites"][0]["trigger"], "assign");
        assert_eq!(json["files"][0]["sites"][0]["oracle_pass"], true);
        // optional analysis fields stay absent rather than null
        assert!(json["files"][0].get("timing").is_none());
        assert!(json["seed"].is_u64());
    }
}
