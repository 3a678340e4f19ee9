//! Structured suite reports with text and JSON renderings.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIP")]
    Skip,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "OK",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

impl Case {
    pub fn ok(id: impl Into<String>) -> Self {
        Self::new(id, Status::Ok, "")
    }

    pub fn new(id: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn check(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Self::ok(id)
        } else {
            Self::new(id, Status::Fail, detail)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub ok: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub instance: String,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: impl Into<String>, instance: impl Into<String>, cases: Vec<Case>) -> Self {
        let count = |s| cases.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            ok: count(Status::Ok),
            fail: count(Status::Fail),
            skip: count(Status::Skip),
        };
        Self {
            suite: suite.into(),
            instance: instance.into(),
            cases,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn merge(suite: impl Into<String>, instance: impl Into<String>, parts: Vec<Report>) -> Self {
        let cases = parts.into_iter().flat_map(|r| r.cases).collect();
        Self::new(suite, instance, cases)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cases {
            s.push_str(&c.id);
            s.push_str(" : ");
            s.push_str(c.status.as_str());
            if !c.detail.is_empty() {
                s.push_str(" (");
                s.push_str(&c.detail);
                s.push(')');
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "{} on {}: {} ok, {} failed, {} skipped\n",
            self.suite, self.instance, self.summary.ok, self.summary.fail, self.summary.skip
        ));
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> Vec<&Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail).collect()
    }
}
