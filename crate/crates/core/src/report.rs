//! Structured verdicts shared by every checker.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One failed condition: a tag, the offending tuple and the measured value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub subjects: Vec<String>,
    pub measured: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub parameters: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Default for WitnessReport {
    fn default() -> Self {
        WitnessReport {
            verdict: Verdict::Pass,
            violations: Vec::new(),
            parameters: Vec::new(),
            notes: Vec::new(),
        }
    }
}

impl WitnessReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn violate(
        &mut self,
        condition: impl Into<String>,
        subjects: impl IntoIterator<Item = String>,
        measured: impl fmt::Display,
    ) -> &mut Self {
        self.violations.push(Violation {
            condition: condition.into(),
            subjects: subjects.into_iter().collect(),
            measured: measured.to_string(),
        });
        self.verdict = Verdict::Fail;
        self
    }

    /// Marks the report inconclusive unless it already failed.
    pub fn inconclusive(&mut self, reason: impl Into<String>) -> &mut Self {
        self.notes.push(reason.into());
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
        self
    }

    /// Folds a sub-report in, prefixing its violation tags.
    pub fn absorb(&mut self, prefix: &str, other: WitnessReport) {
        for mut v in other.violations {
            v.condition = format!("{prefix}{}", v.condition);
            self.violations.push(v);
        }
        self.notes.extend(other.notes);
        self.verdict = match (self.verdict, other.verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        };
    }

    /// Sorts violations canonically; call once all checks have run.
    pub fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        if !self.violations.is_empty() {
            self.verdict = Verdict::Fail;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn has_violation(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        for (k, v) in &self.parameters {
            writeln!(f, "  {k} = {v}")?;
        }
        for v in &self.violations {
            writeln!(
                f,
                "  violation [{}] at ({}): {}",
                v.condition,
                v.subjects.join(", "),
                v.measured
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
