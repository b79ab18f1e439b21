//! Suite reports: one entry per criterion, with exact quantities kept as
//! strings so the JSON and text renderings print the same numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Failure messages kept verbatim per check; the rest are only counted.
pub const KEPT_FAILURES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub quantities: BTreeMap<String, String>,
    pub failure_count: usize,
    /// Failure count per kind; untagged failures are kind `error`.
    pub failure_kinds: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(id: u8, name: &str) -> Self {
        CheckReport {
            id,
            name: name.to_string(),
            passed: true,
            quantities: BTreeMap::new(),
            failure_count: 0,
            failure_kinds: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.fail_as("error", msg);
    }

    pub fn fail_as(&mut self, kind: &str, msg: impl Into<String>) {
        self.passed = false;
        *self.failure_kinds.entry(kind.to_string()).or_default() += 1;
        self.failure_count += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(msg.into());
        }
    }

    /// Records `msg` as a failure unless `ok`.
    pub fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.quantities.insert(key.to_string(), value.to_string());
    }

    /// `PASS [3] non-signaling: key=value ...`
    pub fn line(&self) -> String {
        let mut s = format!("{} [{}] {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name);
        for (k, v) in &self.quantities {
            let _ = write!(s, " {k}={v}");
        }
        if self.failure_count > 0 {
            let _ = write!(s, " failures={}", self.failure_count);
            for (k, n) in &self.failure_kinds {
                let _ = write!(s, " {k}:{n}");
            }
        }
        s
    }
}

/// Build and corpus stamp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub suite: String,
    pub environment: Environment,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "suite {} (seed {}, version {}): {}\n",
            self.suite,
            self.environment.seed,
            self.environment.version,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
            for f in &c.failures {
                let _ = writeln!(s, "    {f}");
            }
        }
        s
    }
}

/// Wall-clock seconds per check, kept apart from the report so that the
/// report itself is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub suite: String,
    pub seconds: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_counted_beyond_the_kept_ones() {
        let mut c = CheckReport::new(1, "x");
        for i in 0..KEPT_FAILURES + 3 {
            c.fail(format!("f{i}"));
        }
        assert!(!c.passed);
        assert_eq!(c.failure_count, KEPT_FAILURES + 3);
        assert_eq!(c.failures.len(), KEPT_FAILURES);
    }

    #[test]
    fn text_and_json_carry_the_same_quantities() {
        let mut c = CheckReport::new(2, "demo");
        c.set("ratio", "3/2");
        c.set("graphs", 11);
        let r = RunReport {
            suite: "demo".into(),
            environment: Environment { version: "0".into(), seed: 7 },
            passed: true,
            checks: vec![c],
        };
        let text = r.to_text();
        assert!(text.contains("PASS [2] demo graphs=11 ratio=3/2"));
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
