use alloc::string::String;
use core::fmt;

use crate::ast::Span;

/// Stable diagnostic identifiers. The string forms are part of the CLI
/// contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    SyntaxErr,
    BadEscape,
    EmptyAlt,
    DupRule,
    DupLocal,
    DupExternal,
    UndefNt,
    BareSpecial,
    NoPrevEnd,
    UndefAttr,
    UndefBare,
    NotAnArray,
    AmbiguousRef,
    ExistsNoArray,
    CyclicAttrs,
    IncompleteInterval,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::SyntaxErr => "SYNTAX_ERR",
            Code::BadEscape => "BAD_ESCAPE",
            Code::EmptyAlt => "EMPTY_ALT",
            Code::DupRule => "DUP_RULE",
            Code::DupLocal => "DUP_LOCAL",
            Code::DupExternal => "DUP_EXTERNAL",
            Code::UndefNt => "UNDEF_NT",
            Code::BareSpecial => "BARE_SPECIAL",
            Code::NoPrevEnd => "NO_PREV_END",
            Code::UndefAttr => "UNDEF_ATTR",
            Code::UndefBare => "UNDEF_BARE",
            Code::NotAnArray => "NOT_AN_ARRAY",
            Code::AmbiguousRef => "AMBIGUOUS_REF",
            Code::ExistsNoArray => "EXISTS_NO_ARRAY",
            Code::CyclicAttrs => "CYCLIC_ATTRS",
            Code::IncompleteInterval => "INCOMPLETE_INTERVAL",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            span,
        }
    }

    /// Renders as `file:line:col: CODE: message` against the given source.
    pub fn render(&self, file: &str, src: &str) -> String {
        let (line, col) = line_col(src, self.span.offset);
        alloc::format!("{file}:{line}:{col}: {}: {}", self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (at byte {})", self.code, self.message, self.span.offset)
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = offset - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
    (line, col)
}
