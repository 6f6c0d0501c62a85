use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub label: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Outcome of a verification sweep. Failures are data: each item records what
/// was checked and, when it did not pass, why.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub scope: String,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, scope: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            scope: scope.into(),
            items: Vec::new(),
        }
    }

    pub fn pass(&mut self, label: impl Into<String>) {
        self.push(label, Status::Pass, None);
    }

    pub fn fail(&mut self, label: impl Into<String>, detail: impl Into<String>) {
        self.push(label, Status::Fail, Some(detail.into()));
    }

    pub fn inconclusive(&mut self, label: impl Into<String>, detail: impl Into<String>) {
        self.push(label, Status::Inconclusive, Some(detail.into()));
    }

    pub fn record(&mut self, label: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.pass(label);
        } else {
            self.fail(label, detail());
        }
    }

    fn push(&mut self, label: impl Into<String>, status: Status, detail: Option<String>) {
        self.items.push(CheckItem {
            label: label.into(),
            status,
            detail,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.items.extend(other.items);
    }

    pub fn count(&self, status: Status) -> usize {
        self.items.iter().filter(|i| i.status == status).count()
    }

    /// Every item passed (and there was at least one).
    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.status == Status::Pass)
    }

    pub fn has_failures(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    pub fn has_inconclusive(&self) -> bool {
        self.count(Status::Inconclusive) > 0
    }

    /// First counterexample, if any.
    pub fn witness(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.status == Status::Fail)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} [{}]: {} pass, {} fail, {} inconclusive",
            self.check,
            self.scope,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Inconclusive)
        )
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match &item.detail {
                Some(d) => writeln!(f, "{} {}: {}", item.status, item.label, d)?,
                None => writeln!(f, "{} {}", item.status, item.label)?,
            }
        }
        write!(f, "{}", self.summary())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_does_not_pass() {
        assert!(!CheckReport::new("x", "y").passed());
    }

    #[test]
    fn witness_is_first_failure() {
        let mut r = CheckReport::new("positivity", "k in [0,2]");
        r.pass("k=0");
        r.fail("k=1", "negative coefficient");
        r.fail("k=2", "later");
        r.inconclusive("k=3", "budget");
        assert!(!r.passed());
        assert_eq!(r.witness().unwrap().label, "k=1");
        assert_eq!(r.count(Status::Fail), 2);
        assert!(r.has_inconclusive());
        assert!(r.to_string().ends_with("1 pass, 2 fail, 1 inconclusive"));
    }
}
