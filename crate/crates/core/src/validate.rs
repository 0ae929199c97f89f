use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::engine::blackbox;
use crate::names::resolve_nt;

/// Structural well-formedness: unique rule names, defined nonterminals,
/// non-empty alternatives, no bare `start`/`end`. Pure; never mutates `g`.
pub fn validate_ast(g: &Grammar) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut seen = BTreeSet::new();
    for rule in &g.rules {
        if !seen.insert(rule.name.as_str()) {
            diags.push(Diagnostic::new(
                Code::DupRule,
                rule.span,
                format!("nonterminal `{}` has more than one rule", rule.name),
            ));
        }
    }
    let mut ext_seen = BTreeSet::new();
    for ext in &g.externals {
        let clash = if !ext_seen.insert(ext.name.as_str()) {
            Some("declared twice")
        } else if seen.contains(ext.name.as_str()) {
            Some("also defined by a rule")
        } else if blackbox::builtin(&ext.name).is_some() {
            Some("the name of a builtin")
        } else {
            None
        };
        if let Some(why) = clash {
            diags.push(Diagnostic::new(
                Code::DupExternal,
                ext.span,
                format!("external `{}` is {why}", ext.name),
            ));
        }
    }
    if let Some(start) = &g.start {
        if g.rule(start).is_none() {
            diags.push(Diagnostic::new(
                Code::UndefNt,
                Span::default(),
                format!("start nonterminal `{start}` has no rule"),
            ));
        }
    }

    for (owner, rule) in g.rules.iter().enumerate() {
        let mut local_seen = BTreeSet::new();
        for local in &rule.locals {
            if !local_seen.insert(local.name.as_str()) {
                diags.push(Diagnostic::new(
                    Code::DupLocal,
                    local.span,
                    format!("local rule `{}` is defined twice in `{}`", local.name, rule.name),
                ));
            }
        }
        for r in core::iter::once(rule).chain(&rule.locals) {
            validate_rule(g, owner, r, &mut diags);
        }
    }
    diags
}

fn validate_rule(g: &Grammar, owner: usize, rule: &Rule, diags: &mut Vec<Diagnostic>) {
    if rule.alternatives.is_empty() {
        diags.push(Diagnostic::new(
            Code::EmptyAlt,
            rule.span,
            format!("rule `{}` has no alternatives", rule.name),
        ));
    }
    for alt in &rule.alternatives {
        if alt.terms.is_empty() {
            diags.push(Diagnostic::new(
                Code::EmptyAlt,
                alt.span,
                format!("rule `{}` has an alternative with no terms", rule.name),
            ));
        }
        for term in &alt.terms {
            for (name, _) in term.kind.targets() {
                if resolve_nt(g, Some(owner), name).is_none() {
                    diags.push(Diagnostic::new(
                        Code::UndefNt,
                        term.span,
                        format!("nonterminal `{name}` is not defined"),
                    ));
                }
            }
            for e in term.kind.exprs() {
                e.for_each_ref(&mut |r| {
                    if let Ref::Bare(id) = r {
                        if id == "start" || id == "end" {
                            diags.push(Diagnostic::new(
                                Code::BareSpecial,
                                term.span,
                                format!("`{id}` must be qualified by a nonterminal, as in `A.{id}`"),
                            ));
                        }
                    }
                });
            }
        }
    }
}
