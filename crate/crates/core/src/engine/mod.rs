//! Interpreter for checked, interval-complete grammars.

pub mod blackbox;
pub mod eval;
pub mod tree;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::*;
use crate::names::{all_rules, resolve_nt, rule_of, NtId};
use blackbox::BlackboxRegistry;
use eval::{Binder, EvalFault, Frame, Outer, Scope, Slot};
pub use tree::{upd_start_end, Env, Node, ParseTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub memo: bool,
    /// Recursion limit; `None` picks [`default_max_depth`].
    pub max_depth: Option<usize>,
    /// Turn evaluation faults into hard errors instead of failed
    /// alternatives.
    pub strict_eval: bool,
    pub trace: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            memo: true,
            max_depth: None,
            strict_eval: false,
            trace: false,
        }
    }
}

/// Number of rules, locals included.
pub fn rule_count(g: &Grammar) -> usize {
    all_rules(g).len()
}

/// `rules * (len + 1)`: no parse with a terminating grammar recurses deeper.
pub fn depth_bound(g: &Grammar, len: usize) -> usize {
    rule_count(g).saturating_mul(len + 1)
}

pub fn default_max_depth(g: &Grammar, len: usize) -> usize {
    depth_bound(g, len).max(4096)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    DepthExceeded { limit: usize },
    BlackboxContractViolation { name: String, consumed: usize, len: usize },
    Eval { fault: EvalFault, nt: String },
    UnregisteredBlackbox(String),
    UndefinedStart(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::DepthExceeded { limit } => write!(f, "recursion depth exceeded {limit}"),
            EngineError::BlackboxContractViolation { name, consumed, len } => write!(
                f,
                "blackbox `{name}` reported consuming {consumed} bytes of a {len}-byte slice"
            ),
            EngineError::Eval { fault, nt } => write!(f, "{fault} while parsing `{nt}`"),
            EngineError::UnregisteredBlackbox(n) => write!(f, "no blackbox registered for `{n}`"),
            EngineError::UndefinedStart(n) => write!(f, "start nonterminal `{n}` is not defined"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Nonterminal invocations, memo hits included.
    pub invocations: u64,
    pub memo_hits: u64,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOutcome {
    /// `None` when the input is rejected.
    pub tree: Option<ParseTree>,
    pub stats: Stats,
    pub trace: Vec<String>,
}

/// Half-open absolute byte range of the global input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Window {
    lo: usize,
    hi: usize,
}

impl Window {
    fn len(self) -> usize {
        self.hi - self.lo
    }

    /// Sub-window for a relative interval, if it is within bounds.
    fn sub(self, l: i64, r: i64) -> Option<Window> {
        let len = self.len() as i64;
        if 0 <= l && l <= r && r <= len {
            Some(Window {
                lo: self.lo + l as usize,
                hi: self.lo + r as usize,
            })
        } else {
            None
        }
    }
}

type Res<T> = Result<T, EngineError>;

struct Engine<'g> {
    g: &'g Grammar,
    reg: &'g BlackboxRegistry,
    input: &'g [u8],
    opts: &'g EngineOptions,
    limit: usize,
    memo: BTreeMap<(usize, usize, usize), Option<Node>>,
    depth: usize,
    stats: Stats,
    trace: Vec<String>,
}

/// Parses `input` from nonterminal `start` of a prepared grammar.
pub fn parse(
    input: &[u8],
    g: &Grammar,
    start: &str,
    opts: &EngineOptions,
    reg: &BlackboxRegistry,
) -> Result<ParseOutcome, EngineError> {
    if g.rule(start).is_none() {
        return Err(EngineError::UndefinedStart(start.into()));
    }
    let mut e = Engine {
        g,
        reg,
        input,
        opts,
        limit: opts.max_depth.unwrap_or_else(|| default_max_depth(g, input.len())),
        memo: BTreeMap::new(),
        depth: 0,
        stats: Stats::default(),
        trace: Vec::new(),
    };
    let whole = Window { lo: 0, hi: input.len() };
    let node = e.invoke(None, start, whole, None)?;
    Ok(ParseOutcome {
        tree: node.map(ParseTree::Node),
        stats: e.stats,
        trace: e.trace,
    })
}

impl<'g> Engine<'g> {
    fn bytes(&self, win: Window) -> &'g [u8] {
        debug_assert!(win.lo <= win.hi && win.hi <= self.input.len());
        &self.input[win.lo..win.hi]
    }

    fn invoke(&mut self, owner: Option<usize>, name: &str, win: Window, outer: Option<Outer<'_>>) -> Res<Option<Node>> {
        self.stats.invocations += 1;
        let id = resolve_nt(self.g, owner, name).ok_or_else(|| EngineError::UnregisteredBlackbox(name.into()))?;
        let key = match id {
            NtId::Global(i) if self.opts.memo => {
                let key = (i, win.lo, win.hi);
                if let Some(hit) = self.memo.get(&key) {
                    self.stats.memo_hits += 1;
                    return Ok(hit.clone());
                }
                Some(key)
            }
            _ => None,
        };
        let out = match id {
            NtId::Global(_) | NtId::Local(..) => {
                let rule = rule_of(self.g, id).expect("resolved rule");
                let outer = if matches!(id, NtId::Local(..)) { outer } else { None };
                self.depth += 1;
                if self.depth > self.limit {
                    return Err(EngineError::DepthExceeded { limit: self.limit });
                }
                self.stats.max_depth = self.stats.max_depth.max(self.depth);
                let out = self.rule(id.owner(), rule, win, outer);
                self.depth -= 1;
                out?
            }
            NtId::External(_) | NtId::Builtin(_) => self.blackbox(name, win)?,
        };
        if self.opts.trace {
            let verdict = if out.is_some() { "ok" } else { "fail" };
            self.trace.push(format!("{name} [{}, {}) {verdict}", win.lo, win.hi));
        }
        if let Some(key) = key {
            self.memo.insert(key, out.clone());
        }
        Ok(out)
    }

    fn blackbox(&mut self, name: &str, win: Window) -> Res<Option<Node>> {
        let entry = self
            .reg
            .get(name)
            .ok_or_else(|| EngineError::UnregisteredBlackbox(name.into()))?;
        let slice = self.bytes(win);
        let Some(out) = (entry.func)(slice) else {
            return Ok(None);
        };
        if out.consumed > slice.len() {
            return Err(EngineError::BlackboxContractViolation {
                name: name.into(),
                consumed: out.consumed,
                len: slice.len(),
            });
        }
        let mut env = Env::fresh(slice.len() as i64);
        env.start = 0;
        env.end = out.consumed as i64;
        for (k, v) in &out.attrs {
            env.set(k, *v);
        }
        Ok(Some(Node {
            name: name.into(),
            env,
            children: Arc::from([ParseTree::Leaf(Arc::from(&slice[..out.consumed]))]),
        }))
    }

    fn rule(&mut self, owner: Option<usize>, rule: &'g Rule, win: Window, outer: Option<Outer<'_>>) -> Res<Option<Node>> {
        for alt in &rule.alternatives {
            if let Some(node) = self.alternative(owner, rule, alt, win, outer)? {
                return Ok(Some(node));
            }
        }
        Ok(None)
    }

    fn fault(&self, fault: EvalFault, rule: &Rule) -> Res<Option<Node>> {
        if self.opts.strict_eval {
            Err(EngineError::Eval {
                fault,
                nt: rule.name.clone(),
            })
        } else {
            Ok(None)
        }
    }

    fn alternative(
        &mut self,
        owner: Option<usize>,
        rule: &'g Rule,
        alt: &'g Alternative,
        win: Window,
        outer: Option<Outer<'_>>,
    ) -> Res<Option<Node>> {
        let len = win.len() as i64;
        let mut frame = Frame::new(&alt.terms, len, outer);
        let mut env = Env::fresh(len);
        macro_rules! eval {
            ($pos:expr, $scope:expr, $e:expr) => {
                match frame.eval($pos, $scope, $e) {
                    Ok(v) => v,
                    Err(f) => return self.fault(f, rule),
                }
            };
        }
        for pos in alt.order() {
            let term = &alt.terms[pos];
            let slot = match &term.kind {
                TermKind::AttrDef { name, expr } => {
                    let v = eval!(pos, None, expr);
                    env.set(name, v);
                    Slot::Value(v)
                }
                TermKind::Predicate(e) => {
                    if eval!(pos, None, e) == 0 {
                        return Ok(None);
                    }
                    Slot::Value(1)
                }
                TermKind::Terminal { bytes, interval } => {
                    let (el, er) = full(interval);
                    let (l, r) = (eval!(pos, None, el), eval!(pos, None, er));
                    let Some(sub) = win.sub(l, r) else {
                        return Ok(None);
                    };
                    if sub.len() < bytes.len() || &self.bytes(sub)[..bytes.len()] != bytes.as_slice() {
                        return Ok(None);
                    }
                    env = upd_start_end(env, l, l + bytes.len() as i64, !bytes.is_empty());
                    Slot::Tree(ParseTree::Leaf(Arc::from(bytes.as_slice())))
                }
                TermKind::Nonterminal { name, interval } => {
                    let (el, er) = full(interval);
                    let (l, r) = (eval!(pos, None, el), eval!(pos, None, er));
                    let Some(sub) = win.sub(l, r) else {
                        return Ok(None);
                    };
                    let here = Some(Outer { frame: &frame, pos, scope: None });
                    let Some(child) = self.invoke(owner, name, sub, here)? else {
                        return Ok(None);
                    };
                    let child = child.rebased(l);
                    env = upd_start_end(env, child.env.start, child.env.end, child.env.end != l);
                    Slot::Tree(ParseTree::Node(child))
                }
                TermKind::Switch { arms, default } => {
                    let mut target = default;
                    for arm in arms {
                        if eval!(pos, None, &arm.cond) != 0 {
                            target = &arm.target;
                            break;
                        }
                    }
                    let (el, er) = full(&target.interval);
                    let (l, r) = (eval!(pos, None, el), eval!(pos, None, er));
                    let Some(sub) = win.sub(l, r) else {
                        return Ok(None);
                    };
                    let here = Some(Outer { frame: &frame, pos, scope: None });
                    let Some(child) = self.invoke(owner, &target.name, sub, here)? else {
                        return Ok(None);
                    };
                    let child = child.rebased(l);
                    env = upd_start_end(env, child.env.start, child.env.end, child.env.end != l);
                    Slot::Tree(ParseTree::Node(child))
                }
                TermKind::Array { var, from, to, elem } => {
                    let (i, j) = (eval!(pos, None, from), eval!(pos, None, to));
                    let mut elems = Vec::new();
                    let (el, er) = full(&elem.interval);
                    for k in i..j.max(i) {
                        let b = Binder { name: var, val: k, next: None };
                        let scope: Scope<'_> = Some(&b);
                        let (l, r) = (eval!(pos, scope, el), eval!(pos, scope, er));
                        let Some(sub) = win.sub(l, r) else {
                            return Ok(None);
                        };
                        let here = Some(Outer { frame: &frame, pos, scope });
                        let Some(child) = self.invoke(owner, &elem.name, sub, here)? else {
                            return Ok(None);
                        };
                        let child = child.rebased(l);
                        env = upd_start_end(env, child.env.start, child.env.end, child.env.end != l);
                        elems.push(ParseTree::Node(child));
                    }
                    Slot::Tree(ParseTree::Array(elems.into()))
                }
            };
            frame.results[pos] = Some(slot);
        }
        let children: Vec<ParseTree> = frame
            .results
            .into_iter()
            .filter_map(|s| match s {
                Some(Slot::Tree(t)) => Some(t),
                _ => None,
            })
            .collect();
        Ok(Some(Node {
            name: rule.name.as_str().into(),
            env,
            children: children.into(),
        }))
    }
}

fn full(iv: &Interval) -> (&Expr, &Expr) {
    iv.bounds().expect("interval-complete grammar")
}
