//! Per-law verdicts with replayable counterexamples.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    /// Every instance was undefined (for example a causal union that does
    /// not exist). Never counted as passing.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawEntry {
    pub law: String,
    pub verdict: Verdict,
    pub checked: u64,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl LawEntry {
    /// Fraction of instances skipped as undefined.
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.checked + self.skipped;
        if total == 0 {
            0.0
        } else {
            self.skipped as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LawReport {
    pub entries: Vec<LawEntry>,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Verdict::Fails)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fails)
    }

    pub fn get(&self, law: &str) -> Option<&LawEntry> {
        self.entries.iter().find(|e| e.law == law)
    }

    pub fn extend(&mut self, other: LawReport) {
        self.entries.extend(other.entries);
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("serializable") + "\n")
            .collect()
    }
}

/// Accumulates instances of one law; the first failure is kept.
#[derive(Debug)]
pub(crate) struct Tally {
    law: String,
    checked: u64,
    skipped: u64,
    counterexample: Option<Value>,
}

impl Tally {
    pub(crate) fn new(law: impl Into<String>) -> Self {
        Tally {
            law: law.into(),
            checked: 0,
            skipped: 0,
            counterexample: None,
        }
    }

    pub(crate) fn pass(&mut self) {
        self.checked += 1;
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn fail(&mut self, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    pub(crate) fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        if ok {
            self.pass()
        } else {
            self.fail(witness)
        }
    }

    /// Merges a tally computed over a later slice of the scan.
    pub(crate) fn absorb(&mut self, later: Tally) {
        self.checked += later.checked;
        self.skipped += later.skipped;
        if self.counterexample.is_none() {
            self.counterexample = later.counterexample;
        }
    }

    pub(crate) fn finish(self) -> LawEntry {
        let verdict = if self.counterexample.is_some() {
            Verdict::Fails
        } else if self.checked == 0 && self.skipped > 0 {
            Verdict::Skipped
        } else {
            Verdict::Holds
        };
        LawEntry {
            law: self.law,
            verdict,
            checked: self.checked,
            skipped: self.skipped,
            counterexample: self.counterexample,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdicts_and_json() {
        let mut t = Tally::new("x");
        t.skip();
        assert_eq!(t.finish().verdict, Verdict::Skipped);

        let mut t = Tally::new("y");
        t.pass();
        t.fail(|| json!({"a": 1}));
        t.fail(|| json!({"a": 2}));
        let e = t.finish();
        assert_eq!(e.verdict, Verdict::Fails);
        assert_eq!(e.counterexample, Some(json!({"a": 1})));

        let vacuous = Tally::new("z").finish();
        assert_eq!(vacuous.verdict, Verdict::Holds);

        let line = serde_json::to_string(&e).unwrap();
        assert!(line.contains(r#""verdict":"fails""#));
        let report = LawReport { entries: vec![e, vacuous] };
        assert!(!report.all_hold());
        assert_eq!(report.to_json_lines().lines().count(), 2);
    }
}
