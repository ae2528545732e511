use std::fmt;

use serde::Serialize;

/// A validation finding. `code` is a stable kebab-case identifier of the
/// violated rule; `element` names the offending element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub element: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, element: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { code, element: element.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code, self.element, self.message)
    }
}
