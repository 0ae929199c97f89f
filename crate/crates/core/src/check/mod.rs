//! Attribute checking: defined-attribute sets, reference resolution, and the
//! per-alternative dependency graph that fixes evaluation order.

pub mod lookup;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::engine::blackbox::BUILTINS;
use crate::names::{all_rules, plain_name, resolve_nt, rule_of, NtId};
use lookup::{lookup_attr, lookup_term, Lookup};

/// `def(A)` for every nonterminal: attributes defined by all of its
/// alternatives, plus `start` and `end`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefSets {
    sets: BTreeMap<NtId, BTreeSet<String>>,
}

impl DefSets {
    pub fn get(&self, id: NtId) -> Option<&BTreeSet<String>> {
        self.sets.get(&id)
    }

    /// Looks up a global rule, external or builtin by name.
    pub fn by_name(&self, g: &Grammar, name: &str) -> Option<&BTreeSet<String>> {
        self.get(resolve_nt(g, None, name)?)
    }

    pub fn defines(&self, id: NtId, attr: &str) -> bool {
        self.get(id).is_some_and(|s| s.contains(attr))
    }
}

fn with_special(attrs: impl IntoIterator<Item = String>) -> BTreeSet<String> {
    let mut set: BTreeSet<String> = attrs.into_iter().collect();
    set.insert("start".into());
    set.insert("end".into());
    set
}

pub fn compute_def_sets(g: &Grammar) -> DefSets {
    let mut sets = BTreeMap::new();
    for (id, rule) in all_rules(g) {
        let mut common: Option<BTreeSet<String>> = None;
        for alt in &rule.alternatives {
            let defined: BTreeSet<String> = alt
                .terms
                .iter()
                .filter_map(|t| match &t.kind {
                    TermKind::AttrDef { name, .. } => Some(name.clone()),
                    _ => None,
                })
                .collect();
            common = Some(match common {
                None => defined,
                Some(c) => c.intersection(&defined).cloned().collect(),
            });
        }
        sets.insert(id, with_special(common.unwrap_or_default()));
    }
    for (i, ext) in g.externals.iter().enumerate() {
        sets.insert(NtId::External(i), with_special(ext.attrs.iter().cloned()));
    }
    for (i, b) in BUILTINS.iter().enumerate() {
        sets.insert(NtId::Builtin(i), with_special(b.attrs.iter().map(|a| a.to_string())));
    }
    DefSets { sets }
}

/// Per-alternative outcome of resolving every reference.
struct AltAnalysis {
    /// `deps[t]`: terms that term `t` reads from.
    deps: Vec<BTreeSet<usize>>,
    /// References not resolvable inside the alternative; only legal in
    /// local rules, where they resolve in the invoking alternative.
    free: Vec<Ref>,
    diags: Vec<Diagnostic>,
}

struct Analyzer<'a> {
    g: &'a Grammar,
    defs: &'a DefSets,
    owner: usize,
    in_local: bool,
    terms: &'a [Term],
    out: AltAnalysis,
    /// Locals whose free references are being collected, to cut recursion.
    visiting: Vec<NtId>,
}

impl<'a> Analyzer<'a> {
    fn new(g: &'a Grammar, defs: &'a DefSets, owner: usize, in_local: bool, alt: &'a Alternative) -> Self {
        Analyzer {
            g,
            defs,
            owner,
            in_local,
            terms: &alt.terms,
            out: AltAnalysis {
                deps: vec![BTreeSet::new(); alt.terms.len()],
                free: Vec::new(),
                diags: Vec::new(),
            },
            visiting: Vec::new(),
        }
    }

    fn run(mut self) -> AltAnalysis {
        for (pos, term) in self.terms.iter().enumerate() {
            match &term.kind {
                TermKind::Array { var, from, to, elem } => {
                    self.expr(pos, from, &mut Vec::new(), term.span);
                    self.expr(pos, to, &mut Vec::new(), term.span);
                    let mut scope = vec![var.clone()];
                    self.interval(pos, &elem.interval, &mut scope, term.span);
                    self.invocation(pos, &elem.name, &scope, term.span);
                }
                kind => {
                    for e in kind.exprs() {
                        self.expr(pos, e, &mut Vec::new(), term.span);
                    }
                    for (name, _) in kind.targets() {
                        self.invocation(pos, name, &[], term.span);
                    }
                }
            }
        }
        self.out
    }

    fn interval(&mut self, pos: usize, iv: &Interval, scope: &mut Vec<String>, span: Span) {
        match iv {
            Interval::Missing => {}
            Interval::Length(e) => self.expr(pos, e, scope, span),
            Interval::Full(l, r) => {
                self.expr(pos, l, scope, span);
                self.expr(pos, r, scope, span);
            }
        }
    }

    fn expr(&mut self, pos: usize, e: &Expr, scope: &mut Vec<String>, span: Span) {
        match e {
            Expr::Int(_) => {}
            Expr::Binary(_, l, r) => {
                self.expr(pos, l, scope, span);
                self.expr(pos, r, scope, span);
            }
            Expr::Cond(c, t, f) => {
                self.expr(pos, c, scope, span);
                self.expr(pos, t, scope, span);
                self.expr(pos, f, scope, span);
            }
            Expr::Exists { var, cond, then, otherwise } => {
                if exists_array(var, cond).is_none() {
                    self.out.diags.push(Diagnostic::new(
                        Code::ExistsNoArray,
                        span,
                        format!("`exists {var}` needs a condition with a reference `A({var}).f` to an array"),
                    ));
                }
                scope.push(var.clone());
                self.expr(pos, cond, scope, span);
                self.expr(pos, then, scope, span);
                scope.pop();
                self.expr(pos, otherwise, scope, span);
            }
            Expr::Ref(r) => self.reference(pos, r, scope, span, None),
        }
    }

    /// Resolves one reference; `via` names the local rule it came from.
    fn reference(&mut self, pos: usize, r: &Ref, scope: &mut Vec<String>, span: Span, via: Option<&str>) {
        let suffix = via.map(|l| format!(" (needed by local rule `{l}`)")).unwrap_or_default();
        match r {
            Ref::Eoi => {}
            Ref::Bare(id) => {
                if scope.iter().any(|s| s == id) {
                    return;
                }
                match lookup_attr(self.terms, pos, id) {
                    Lookup::Found(k) => {
                        self.out.deps[pos].insert(k);
                    }
                    Lookup::Ambiguous => self.out.diags.push(Diagnostic::new(
                        Code::AmbiguousRef,
                        span,
                        format!("`{id}` is defined more than once after this point{suffix}"),
                    )),
                    _ if self.in_local => self.free(r),
                    _ => self.out.diags.push(Diagnostic::new(
                        Code::UndefBare,
                        span,
                        format!("`{id}` is not an attribute of this alternative or a bound variable{suffix}"),
                    )),
                }
            }
            Ref::Qual { nt, index, field } => {
                if let Some(idx) = index {
                    self.expr(pos, idx, scope, span);
                }
                match lookup_term(self.terms, pos, nt, index.is_some()) {
                    Lookup::Found(k) => {
                        self.out.deps[pos].insert(k);
                        if let Field::Attr(a) = field {
                            let id = resolve_nt(self.g, Some(self.owner), nt);
                            if !id.is_some_and(|id| self.defs.defines(id, a)) {
                                self.out.diags.push(Diagnostic::new(
                                    Code::UndefAttr,
                                    span,
                                    format!("`{a}` is not defined by every alternative of `{nt}`{suffix}"),
                                ));
                            }
                        }
                    }
                    Lookup::Ambiguous => self.out.diags.push(Diagnostic::new(
                        Code::AmbiguousRef,
                        span,
                        format!("several `{nt}` terms follow this point and none precedes it{suffix}"),
                    )),
                    Lookup::WrongKind if index.is_some() => self.out.diags.push(Diagnostic::new(
                        Code::NotAnArray,
                        span,
                        format!("`{nt}` is not an array term in this alternative{suffix}"),
                    )),
                    Lookup::WrongKind => self.out.diags.push(Diagnostic::new(
                        Code::UndefAttr,
                        span,
                        format!("`{nt}` is an array here; index it as `{nt}(i)`{suffix}"),
                    )),
                    Lookup::NotFound if self.in_local => self.free(r),
                    Lookup::NotFound => self.out.diags.push(Diagnostic::new(
                        Code::UndefAttr,
                        span,
                        format!("no `{nt}` term in this alternative{suffix}"),
                    )),
                }
            }
        }
    }

    fn free(&mut self, r: &Ref) {
        if !self.out.free.contains(r) {
            self.out.free.push(r.clone());
        }
    }

    /// A term invoking a local rule depends on whatever the local rule reads
    /// from this alternative.
    fn invocation(&mut self, pos: usize, name: &str, scope: &[String], span: Span) {
        let Some(id @ NtId::Local(..)) = resolve_nt(self.g, Some(self.owner), name) else {
            return;
        };
        if self.visiting.contains(&id) {
            return;
        }
        let mut visiting = self.visiting.clone();
        visiting.push(id);
        let free = free_refs(self.g, self.defs, id, &mut visiting);
        let mut scope = scope.to_vec();
        for r in &free {
            self.reference(pos, r, &mut scope, span, Some(name));
        }
    }
}

/// References in a local rule that resolve in the alternative invoking it.
fn free_refs(g: &Grammar, defs: &DefSets, id: NtId, visiting: &mut [NtId]) -> Vec<Ref> {
    let Some(rule) = rule_of(g, id) else {
        return Vec::new();
    };
    let owner = id.owner().unwrap_or(0);
    let mut out: Vec<Ref> = Vec::new();
    for alt in &rule.alternatives {
        let mut an = Analyzer::new(g, defs, owner, true, alt);
        an.visiting = visiting.to_vec();
        for r in an.run().free {
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// Finds the indexed reference `A(var).f` that an existential iterates over.
pub fn exists_array<'e>(var: &str, cond: &'e Expr) -> Option<&'e Ref> {
    let mut found = None;
    cond.for_each_ref(&mut |r| {
        if found.is_some() {
            return;
        }
        if let Ref::Qual { index: Some(idx), .. } = r {
            if matches!(&**idx, Expr::Ref(Ref::Bare(v)) if v == var) {
                found = Some(r);
            }
        }
    });
    found
}

fn analyze(g: &Grammar, defs: &DefSets, id: NtId, alt: &Alternative) -> AltAnalysis {
    let owner = id.owner().unwrap_or(0);
    Analyzer::new(g, defs, owner, matches!(id, NtId::Local(..)), alt).run()
}

/// Checks that every attribute reference resolves to a defined attribute.
pub fn check_references(g: &Grammar, defs: &DefSets) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (id, rule) in all_rules(g) {
        for alt in &rule.alternatives {
            diags.extend(analyze(g, defs, id, alt).diags);
        }
    }
    diags.sort_by_key(|d| d.span.offset);
    diags.dedup();
    diags
}

/// Dependency graph of one alternative: an edge `t -> k` when term `t`
/// reads an attribute of term `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltDepGraph {
    pub edges: Vec<BTreeSet<usize>>,
}

impl AltDepGraph {
    pub fn build(g: &Grammar, defs: &DefSets, id: NtId, alt: &Alternative) -> Self {
        AltDepGraph {
            edges: analyze(g, defs, id, alt).deps,
        }
    }

    /// Smallest-index-first topological order, or a cycle if there is none.
    pub fn stable_order(&self) -> Result<Vec<usize>, Vec<usize>> {
        let n = self.edges.len();
        let mut pending: Vec<usize> = self.edges.iter().map(BTreeSet::len).collect();
        let mut dependents = vec![Vec::new(); n];
        for (t, deps) in self.edges.iter().enumerate() {
            for &k in deps {
                dependents[k].push(t);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&t| pending[t] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(t) = ready.pop_first() {
            order.push(t);
            for &d in &dependents[t] {
                pending[d] -= 1;
                if pending[d] == 0 {
                    ready.insert(d);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(self.find_cycle(&pending))
        }
    }

    /// Walks dependency edges among unfinished terms until one repeats.
    fn find_cycle(&self, pending: &[usize]) -> Vec<usize> {
        let start = (0..pending.len()).find(|&t| pending[t] > 0).unwrap_or(0);
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let next = self.edges[cur]
                .iter()
                .copied()
                .find(|&k| pending[k] > 0)
                .unwrap_or(cur);
            if let Some(p) = path.iter().position(|&x| x == next) {
                return path.split_off(p);
            }
            path.push(next);
            cur = next;
        }
    }
}

pub fn term_label(t: &Term) -> String {
    match &t.kind {
        TermKind::Nonterminal { name, .. } => name.clone(),
        TermKind::Terminal { bytes, .. } => format!("{:?}", String::from_utf8_lossy(bytes)),
        TermKind::AttrDef { name, .. } => format!("{{{name}=...}}"),
        TermKind::Predicate(_) => "{? ...}".into(),
        TermKind::Array { elem, .. } => format!("for ... do {}", elem.name),
        TermKind::Switch { .. } => "switch(...)".into(),
    }
}

/// Fills every alternative's evaluation order, or reports the alternatives
/// whose dependency graph has a cycle.
pub fn check_and_reorder(g: &Grammar, defs: &DefSets) -> Result<Grammar, Vec<Diagnostic>> {
    let mut out = g.clone();
    let mut diags = Vec::new();
    let mut orders = Vec::new();
    for (id, rule) in all_rules(g) {
        for alt in &rule.alternatives {
            match AltDepGraph::build(g, defs, id, alt).stable_order() {
                Ok(order) => orders.push(order),
                Err(cycle) => {
                    let mut names: Vec<String> = cycle.iter().map(|&t| term_label(&alt.terms[t])).collect();
                    names.push(names[0].clone());
                    diags.push(Diagnostic::new(
                        Code::CyclicAttrs,
                        alt.span,
                        format!(
                            "attribute dependencies in `{}` form a cycle: {}",
                            plain_name(g, id),
                            names.join(" -> ")
                        ),
                    ));
                    orders.push(Vec::new());
                }
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut orders = orders.into_iter();
    for rule in &mut out.rules {
        for r in core::iter::once(&mut *rule) {
            for alt in &mut r.alternatives {
                alt.eval_order = orders.next();
            }
        }
        for local in &mut rule.locals {
            for alt in &mut local.alternatives {
                alt.eval_order = orders.next();
            }
        }
    }
    Ok(out)
}
