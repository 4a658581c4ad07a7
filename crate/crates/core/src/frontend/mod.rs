//! Readers and writers for the two textual dialects: waveform descriptions
//! (`.wdl`) and board-support packages (`.bsp`).
//!
//! Parsing is a pure function of the source text. Any error diagnostic
//! means no model value is produced; each diagnostic carries the 1-based
//! line and column of the offending token.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_bsp, parse_bsp_named, parse_waveform, parse_waveform_named};
pub use printer::{print_bsp, print_waveform};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagCode {
    Lexical,
    Syntax,
    Duplicate,
    UnknownReference,
    MissingAttribute,
    IntegerOverflow,
    InvalidValue,
    Structure,
    UnknownPe,
    DuplicateLink,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Lexical => "E0001",
            DiagCode::Syntax => "E0002",
            DiagCode::Duplicate => "E0003",
            DiagCode::UnknownReference => "E0004",
            DiagCode::MissingAttribute => "E0005",
            DiagCode::IntegerOverflow => "E0006",
            DiagCode::InvalidValue => "E0007",
            DiagCode::Structure => "E0008",
            DiagCode::UnknownPe => "E0009",
            DiagCode::DuplicateLink => "E0010",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub(crate) fn error(code: DiagCode, message: String, span: SourceSpan) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            code,
            message,
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}:{}: {}[{}]: {}",
            self.span.file,
            self.span.line,
            self.span.column,
            sev,
            self.code.as_str(),
            self.message
        )
    }
}
