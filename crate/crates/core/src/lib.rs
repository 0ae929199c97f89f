//! Interval parsing grammars.
//!
//! The pipeline runs [`frontend::parse_grammar`], [`validate::validate_ast`],
//! [`frontend::complete_intervals`] and the attribute checks in [`check`];
//! [`prepare`] does all of it. A prepared grammar can be interpreted by
//! [`engine::parse`] and analysed by [`terminate::check_termination`].

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod ast;
pub mod check;
pub mod comb;
pub mod diag;
pub mod engine;
pub mod frontend;
pub mod names;
pub mod pretty;
pub mod terminate;
pub mod validate;

use alloc::vec::Vec;

use ast::Grammar;
use diag::Diagnostic;

/// Parses, validates, completes and checks grammar text, returning the
/// grammar with every evaluation order filled in.
pub fn prepare(src: &str) -> Result<Grammar, Vec<Diagnostic>> {
    let g = frontend::parse_grammar(src)?;
    prepare_ast(&g)
}

/// Everything [`prepare`] does after parsing.
pub fn prepare_ast(g: &Grammar) -> Result<Grammar, Vec<Diagnostic>> {
    let diags = validate::validate_ast(g);
    if !diags.is_empty() {
        return Err(diags);
    }
    let g = frontend::complete_intervals(g)?;
    let defs = check::compute_def_sets(&g);
    let diags = check::check_references(&g, &defs);
    if !diags.is_empty() {
        return Err(diags);
    }
    check::check_and_reorder(&g, &defs)
}
