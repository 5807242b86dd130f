//! Text formats: the formula grammar and the `.ndi` deduction format.

mod deduction;
mod formula;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use deduction::{parse_deduction, print_deduction};
pub use formula::{parse_formula, parse_pattern, parse_term, print_formula, print_term, Style};

/// Half-open byte range into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> SourceSpan {
        SourceSpan { start, end }
    }

    /// Shifts a span found inside a quoted string by the string's offset.
    pub fn offset(self, by: usize) -> SourceSpan {
        SourceSpan {
            start: self.start + by,
            end: self.end + by,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("bound variable `{name}` used free at {span}")]
    FreeVariable { name: String, span: SourceSpan },
    #[error("`{name}` at {span} is not a bound-variable name (binders use u..z)")]
    NamespaceClash { name: String, span: SourceSpan },
    #[error("unknown rule `{head}` at {span}")]
    UnknownRule { head: String, span: SourceSpan },
    #[error("class {class} discharged twice (second time at {span})")]
    DuplicateDischarge { class: u32, span: SourceSpan },
    #[error("malformed deduction at {span}: {message}")]
    Structure { message: String, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::FreeVariable { span, .. }
            | ParseError::NamespaceClash { span, .. }
            | ParseError::UnknownRule { span, .. }
            | ParseError::DuplicateDischarge { span, .. }
            | ParseError::Structure { span, .. } => *span,
        }
    }

    pub(crate) fn shifted(self, by: usize) -> ParseError {
        match self {
            ParseError::Syntax { message, span } => ParseError::Syntax {
                message,
                span: span.offset(by),
            },
            ParseError::FreeVariable { name, span } => ParseError::FreeVariable {
                name,
                span: span.offset(by),
            },
            ParseError::NamespaceClash { name, span } => ParseError::NamespaceClash {
                name,
                span: span.offset(by),
            },
            ParseError::UnknownRule { head, span } => ParseError::UnknownRule {
                head,
                span: span.offset(by),
            },
            ParseError::DuplicateDischarge { class, span } => ParseError::DuplicateDischarge {
                class,
                span: span.offset(by),
            },
            ParseError::Structure { message, span } => ParseError::Structure {
                message,
                span: span.offset(by),
            },
        }
    }
}
