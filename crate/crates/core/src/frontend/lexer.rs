use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::Span;
use crate::diag::{Code, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(Vec<u8>),
    Arrow,
    Semi,
    Slash,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Question,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Shl,
    Shr,
    Amp,
    AndAnd,
    Pipe,
    OrOr,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        use alloc::format;
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Arrow => "->",
            Tok::Semi => ";",
            Tok::Slash => "/",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Question => "?",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Shl => "<<",
            Tok::Shr => ">>",
            Tok::Amp => "&",
            Tok::AndAnd => "&&",
            Tok::Pipe => "|",
            Tok::OrOr => "||",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits grammar source into tokens. Lexing continues past bad escapes so
/// that all of them are reported.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].into())
        } else if c.is_ascii_digit() {
            let (radix, digits_start) = if c == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X')) {
                (16, i + 2)
            } else {
                (10, i)
            };
            i = digits_start;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let digits: String = src[digits_start..i].chars().filter(|&c| c != '_').collect();
            match i64::from_str_radix(&digits, radix) {
                Ok(n) => Tok::Int(n),
                Err(_) => {
                    diags.push(Diagnostic::new(
                        Code::SyntaxErr,
                        Span::new(start, i - start),
                        alloc::format!("malformed integer literal `{}`", &src[start..i]),
                    ));
                    Tok::Int(0)
                }
            }
        } else if c == b'"' {
            let (lit, next) = lex_string(src, i, &mut diags);
            i = next;
            Tok::Str(lit)
        } else {
            let two = bytes.get(i + 1).copied();
            let (tok, width) = match (c, two) {
                (b'-', Some(b'>')) => (Tok::Arrow, 2),
                (b'=', Some(b'=')) => (Tok::EqEq, 2),
                (b'!', Some(b'=')) => (Tok::NotEq, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'<', Some(b'<')) => (Tok::Shl, 2),
                (b'>', Some(b'>')) => (Tok::Shr, 2),
                (b'&', Some(b'&')) => (Tok::AndAnd, 2),
                (b'|', Some(b'|')) => (Tok::OrOr, 2),
                (b';', _) => (Tok::Semi, 1),
                (b'/', _) => (Tok::Slash, 1),
                (b'[', _) => (Tok::LBracket, 1),
                (b']', _) => (Tok::RBracket, 1),
                (b'{', _) => (Tok::LBrace, 1),
                (b'}', _) => (Tok::RBrace, 1),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b',', _) => (Tok::Comma, 1),
                (b'.', _) => (Tok::Dot, 1),
                (b':', _) => (Tok::Colon, 1),
                (b'?', _) => (Tok::Question, 1),
                (b'=', _) => (Tok::Assign, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b'&', _) => (Tok::Amp, 1),
                (b'|', _) => (Tok::Pipe, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'*', _) => (Tok::Star, 1),
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    diags.push(Diagnostic::new(
                        Code::SyntaxErr,
                        Span::new(i, ch.len_utf8()),
                        alloc::format!("unexpected character `{ch}`"),
                    ));
                    i += ch.len_utf8();
                    continue;
                }
            };
            i += width;
            tok
        };
        toks.push(Token {
            tok,
            span: Span::new(start, i - start),
        });
    }
    toks.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), 0),
    });
    (toks, diags)
}

fn hex_val(b: u8) -> Option<u8> {
    (b as char).to_digit(16).map(|d| d as u8)
}

/// Lexes a double-quoted literal starting at `start`; returns the bytes and
/// the offset just past the closing quote.
fn lex_string(src: &str, start: usize, diags: &mut Vec<Diagnostic>) -> (Vec<u8>, usize) {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = start + 1;
    loop {
        match bytes.get(i) {
            None | Some(b'\n') => {
                diags.push(Diagnostic::new(
                    Code::SyntaxErr,
                    Span::new(start, i - start),
                    "unterminated string literal",
                ));
                return (out, i);
            }
            Some(b'"') => return (out, i + 1),
            Some(b'\\') => {
                let esc_start = i;
                let (byte, width) = match bytes.get(i + 1) {
                    Some(b'\\') => (Some(b'\\'), 2),
                    Some(b'"') => (Some(b'"'), 2),
                    Some(b'n') => (Some(b'\n'), 2),
                    Some(b'0') => (Some(0), 2),
                    Some(b'x') => {
                        let hi = bytes.get(i + 2).copied().and_then(hex_val);
                        let lo = bytes.get(i + 3).copied().and_then(hex_val);
                        match (hi, lo) {
                            (Some(h), Some(l)) => (Some(h << 4 | l), 4),
                            _ => (None, 2),
                        }
                    }
                    _ => (None, 2),
                };
                match byte {
                    Some(b) => out.push(b),
                    None => {
                        let width = width.min(bytes.len() - esc_start);
                        diags.push(Diagnostic::new(
                            Code::BadEscape,
                            Span::new(esc_start, width),
                            alloc::format!(
                                "invalid escape `{}`",
                                src.get(esc_start..esc_start + width).unwrap_or("\\")
                            ),
                        ));
                    }
                }
                i += width;
            }
            Some(_) => {
                let ch = src[i..].chars().next().unwrap();
                let mut buf = [0u8; 4];
                out.extend_from_slice(ch.encode_utf8(&mut buf).as_bytes());
                i += ch.len_utf8();
            }
        }
    }
}
