//! Surface syntax: lexing, parsing and implicit-interval completion.

mod complete;
mod lexer;
mod parser;

pub use complete::complete_intervals;
pub use lexer::{lex, Tok, Token};
pub use parser::{is_keyword, parse_grammar};
