//! Diagnostics with source positions.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Span {
    /// Byte offsets.
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: Span, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic { file: String::new(), line: span.line, col: span.col, code: code.into(), message: message.into() }
    }

    pub fn syntax(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(span, "SyntaxError", message)
    }

    pub fn engine(span: Span, e: &smt_core::Error) -> Diagnostic {
        Diagnostic::new(span, e.code(), e.to_string())
    }

    pub fn in_file(mut self, file: &str) -> Diagnostic {
        self.file = file.into();
        self
    }

    /// One JSON object on one line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.file.is_empty() {
            write!(f, "{}:", self.file)?;
        }
        if self.line > 0 {
            write!(f, "{}:{}: ", self.line, self.col)?;
        }
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for Diagnostic {}
