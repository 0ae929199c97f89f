//! Binding of attribute references to the terms of an alternative.
//!
//! A reference `A.f` (or `A(e).f`) placed in the term at position `pos`
//! binds to the nearest term for `A` before `pos`; failing that, to the only
//! term for `A` in the alternative. The same rule binds bare names to
//! attribute definitions. Binding depends only on textual positions, never on
//! evaluation order.

use crate::ast::{Term, TermKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Found(usize),
    Ambiguous,
    /// A term for the name exists but it is an array where a node was
    /// expected, or the reverse.
    WrongKind,
    NotFound,
}

fn pick(candidates: impl Iterator<Item = usize>, pos: usize) -> Lookup {
    let mut count = 0;
    let mut only = 0;
    let mut preceding = None;
    for i in candidates {
        count += 1;
        only = i;
        if i < pos {
            preceding = Some(i);
        }
    }
    match (preceding, count) {
        (Some(i), _) => Lookup::Found(i),
        (None, 1) => Lookup::Found(only),
        (None, 0) => Lookup::NotFound,
        _ => Lookup::Ambiguous,
    }
}

fn names_node(t: &Term, nt: &str) -> bool {
    matches!(&t.kind, TermKind::Nonterminal { name, .. } if name == nt)
}

fn names_array(t: &Term, nt: &str) -> bool {
    matches!(&t.kind, TermKind::Array { elem, .. } if elem.name == nt)
}

/// Finds the term a qualified reference to `nt` binds to. Indexed references
/// bind to array terms, plain ones to nonterminal terms.
pub fn lookup_term(terms: &[Term], pos: usize, nt: &str, indexed: bool) -> Lookup {
    type Is = fn(&Term, &str) -> bool;
    let (want, other): (Is, Is) = if indexed {
        (names_array, names_node)
    } else {
        (names_node, names_array)
    };
    match pick(
        terms.iter().enumerate().filter(|(_, t)| want(t, nt)).map(|(i, _)| i),
        pos,
    ) {
        Lookup::NotFound if terms.iter().any(|t| other(t, nt)) => Lookup::WrongKind,
        found => found,
    }
}

/// Finds the attribute definition a bare name binds to.
pub fn lookup_attr(terms: &[Term], pos: usize, name: &str) -> Lookup {
    pick(
        terms
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(&t.kind, TermKind::AttrDef { name: n, .. } if n == name))
            .map(|(i, _)| i),
        pos,
    )
}
