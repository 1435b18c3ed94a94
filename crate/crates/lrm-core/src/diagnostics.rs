//! Shared diagnostic type for non-fatal findings.
//!
//! Parsers, score validation and lexical reconciliation all report through
//! [`Diagnostic`] rather than failing: an odd meter or a dictionary miss is
//! information about the input, not an error in the pipeline.

use std::fmt;

use serde::{Deserialize, Serialize};

/// How serious a finding is. `Error` excludes a file from analysis;
/// everything else is advisory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Info => write!(f, "info"),
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// A positioned, categorized finding about an input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Stable machine-readable category, e.g. `meter/short-measure`.
    pub code: &'static str,
    pub message: String,
    /// 1-based source line, when the finding maps to one.
    pub line: Option<u32>,
    /// 1-based source column, when the finding maps to one.
    pub column: Option<u32>,
}

impl Diagnostic {
    pub fn new(severity: Severity, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity,
            code,
            message: message.into(),
            line: None,
            column: None,
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Warning, code, message)
    }

    pub fn info(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Info, code, message)
    }

    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Error, code, message)
    }

    pub fn at(mut self, line: u32, column: u32) -> Self {
        self.line = Some(line);
        self.column = Some(column);
        self
    }

    pub fn on_line(mut self, line: u32) -> Self {
        self.line = Some(line);
        self
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => {
                write!(f, "{}:{}: {} [{}]: {}", l, c, self.severity, self.code, self.message)
            }
            (Some(l), None) => {
                write!(f, "{}: {} [{}]: {}", l, self.severity, self.code, self.message)
            }
            _ => write!(f, "{} [{}]: {}", self.severity, self.code, self.message),
        }
    }
}
