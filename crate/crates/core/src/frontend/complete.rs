//! Fills in omitted intervals by a left-to-right scan of each alternative.

use alloc::format;
use alloc::vec::Vec;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};

/// What the scan remembers about the last interval-bearing term.
enum Prev {
    Nothing,
    Terminal(Expr),
    Nonterminal(alloc::string::String),
    /// Arrays and switches have no single end to continue from.
    Opaque(&'static str),
}

/// Returns a grammar in which every terminal, nonterminal, array element and
/// switch target has a full interval.
pub fn complete_intervals(g: &Grammar) -> Result<Grammar, Vec<Diagnostic>> {
    let mut out = g.clone();
    let mut diags = Vec::new();
    for rule in &mut out.rules {
        complete_rule(rule, &mut diags);
        for local in &mut rule.locals {
            complete_rule(local, &mut diags);
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

fn complete_rule(rule: &mut Rule, diags: &mut Vec<Diagnostic>) {
    for alt in &mut rule.alternatives {
        complete_alt(alt, diags);
    }
}

fn left_of(prev: &Prev, span: Span, diags: &mut Vec<Diagnostic>) -> Option<Expr> {
    match prev {
        Prev::Nothing => Some(Expr::Int(0)),
        Prev::Terminal(right) => Some(right.clone()),
        Prev::Nonterminal(name) => Some(Expr::end_of(name)),
        Prev::Opaque(what) => {
            diags.push(Diagnostic::new(
                Code::NoPrevEnd,
                span,
                format!("the previous term is {what}; an explicit interval is required"),
            ));
            None
        }
    }
}

/// Completes a nonterminal interval: missing right endpoint is EOI.
fn complete_nt(iv: &mut Interval, prev: &Prev, span: Span, diags: &mut Vec<Diagnostic>) {
    let done = match iv {
        Interval::Full(..) => return,
        Interval::Missing => left_of(prev, span, diags).map(|l| Interval::Full(l, Expr::eoi())),
        Interval::Length(len) => left_of(prev, span, diags).map(|l| {
            let r = l.clone().plus(len.clone());
            Interval::Full(l, r)
        }),
    };
    if let Some(done) = done {
        *iv = done;
    }
}

fn complete_alt(alt: &mut Alternative, diags: &mut Vec<Diagnostic>) {
    let mut prev = Prev::Nothing;
    for term in &mut alt.terms {
        let span = term.span;
        match &mut term.kind {
            TermKind::AttrDef { .. } | TermKind::Predicate(_) => {}
            TermKind::Nonterminal { name, interval } => {
                complete_nt(interval, &prev, span, diags);
                prev = Prev::Nonterminal(name.clone());
            }
            TermKind::Terminal { bytes, interval } => {
                let len = Expr::Int(bytes.len() as i64);
                let done = match interval {
                    Interval::Full(..) => None,
                    Interval::Missing => left_of(&prev, span, diags).map(|l| {
                        let r = l.clone().plus(len);
                        Interval::Full(l, r)
                    }),
                    Interval::Length(n) => left_of(&prev, span, diags).map(|l| {
                        let r = l.clone().plus(n.clone());
                        Interval::Full(l, r)
                    }),
                };
                if let Some(done) = done {
                    *interval = done;
                }
                if let Interval::Full(_, r) = interval {
                    prev = Prev::Terminal(r.clone());
                }
            }
            TermKind::Array { elem, .. } => {
                complete_nt(&mut elem.interval, &prev, span, diags);
                prev = Prev::Opaque("an array");
            }
            TermKind::Switch { arms, default } => {
                for target in arms.iter_mut().map(|a| &mut a.target).chain(core::iter::once(default)) {
                    complete_nt(&mut target.interval, &prev, span, diags);
                }
                prev = Prev::Opaque("a switch");
            }
        }
    }
}
