//! Corpus samples and the line-delimited manifest format.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Vulnerable,
    NonVulnerable,
}

/// One corpus source file with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSample {
    pub sample_id: String,
    pub path: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cwe: Option<String>,
    #[serde(default)]
    pub vulnerable_lines: BTreeSet<u32>,
    #[serde(skip)]
    pub source: String,
}

impl CodeSample {
    /// Manifest invariants: vulnerable lines imply a vulnerable label and
    /// stay within the file.
    pub fn check_invariants(&self) -> Result<(), String> {
        if !self.vulnerable_lines.is_empty() && self.label != Label::Vulnerable {
            return Err(format!("{}: vulnerable_lines set but label is non_vulnerable", self.sample_id));
        }
        let total = self.source.lines().count() as u32;
        if let Some(max) = self.vulnerable_lines.iter().max() {
            if *max > total.max(1) {
                return Err(format!("{}: vulnerable line {} past end of file ({} lines)", self.sample_id, max, total));
            }
        }
        Ok(())
    }
}

/// One line of the corpus manifest (JSON lines). `feature` is the embedded
/// ground-truth feature for generated corpora; absent for external ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub sample_id: String,
    pub path: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cwe: Option<String>,
    #[serde(default)]
    pub vulnerable_lines: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

pub fn render_manifest(records: &[ManifestRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("manifest record serializes"));
        out.push('\n');
    }
    out
}
