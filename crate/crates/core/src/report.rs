use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Witness, residual or short explanation.
    pub detail: String,
}

/// Ordered list of checks; ordering is declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub items: Vec<CheckItem>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), items: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.items.push(CheckItem { name: name.into(), passed, detail: detail.into() });
        passed
    }

    /// Record an error as a failed item.
    pub fn fail(&mut self, name: impl Into<String>, err: impl std::fmt::Display) {
        self.check(name, false, err.to_string());
    }

    pub fn absorb(&mut self, other: Report) {
        for mut item in other.items {
            item.name = format!("{}: {}", other.title, item.name);
            self.items.push(item);
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.passed)
    }

    pub fn count_passed(&self) -> usize {
        self.items.iter().filter(|i| i.passed).count()
    }
}
