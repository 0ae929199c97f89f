//! Nonterminal name resolution shared by the checker, the engine and the
//! termination analysis.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Grammar, Rule};
use crate::engine::blackbox;

/// Identity of a nonterminal after scoping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NtId {
    Global(usize),
    /// `(owning global rule, index into its locals)`
    Local(usize, usize),
    External(usize),
    Builtin(usize),
}

impl NtId {
    pub fn is_rule(self) -> bool {
        matches!(self, NtId::Global(_) | NtId::Local(..))
    }

    /// The global rule whose scope the nonterminal's body lives in.
    pub fn owner(self) -> Option<usize> {
        match self {
            NtId::Global(i) | NtId::Local(i, _) => Some(i),
            _ => None,
        }
    }
}

/// Resolves `name` as seen from inside global rule `owner` (or its locals).
/// Locals shadow globals, which shadow externals and builtins.
pub fn resolve_nt(g: &Grammar, owner: Option<usize>, name: &str) -> Option<NtId> {
    if let Some(o) = owner {
        if let Some(j) = g.rules[o].locals.iter().position(|l| l.name == name) {
            return Some(NtId::Local(o, j));
        }
    }
    if let Some(i) = g.rules.iter().position(|r| r.name == name) {
        return Some(NtId::Global(i));
    }
    if let Some(i) = g.externals.iter().position(|e| e.name == name) {
        return Some(NtId::External(i));
    }
    blackbox::BUILTINS
        .iter()
        .position(|b| b.name == name)
        .map(NtId::Builtin)
}

pub fn rule_of(g: &Grammar, id: NtId) -> Option<&Rule> {
    match id {
        NtId::Global(i) => g.rules.get(i),
        NtId::Local(i, j) => g.rules.get(i)?.locals.get(j),
        _ => None,
    }
}

/// Display name; locals are qualified by their owner (`Owner::Local`).
pub fn display_name(g: &Grammar, id: NtId) -> String {
    match id {
        NtId::Global(i) => g.rules[i].name.clone(),
        NtId::Local(i, j) => alloc::format!("{}::{}", g.rules[i].name, g.rules[i].locals[j].name),
        NtId::External(i) => g.externals[i].name.clone(),
        NtId::Builtin(i) => blackbox::BUILTINS[i].name.into(),
    }
}

/// Plain name as written in the grammar.
pub fn plain_name(g: &Grammar, id: NtId) -> &str {
    match id {
        NtId::Global(i) => &g.rules[i].name,
        NtId::Local(i, j) => &g.rules[i].locals[j].name,
        NtId::External(i) => &g.externals[i].name,
        NtId::Builtin(i) => blackbox::BUILTINS[i].name,
    }
}

/// Every rule in the grammar with its identity: globals first, each followed
/// by its locals.
pub fn all_rules(g: &Grammar) -> Vec<(NtId, &Rule)> {
    let mut out = Vec::new();
    for (i, r) in g.rules.iter().enumerate() {
        out.push((NtId::Global(i), r));
        for (j, l) in r.locals.iter().enumerate() {
            out.push((NtId::Local(i, j), l));
        }
    }
    out
}
