//! Grammar abstract syntax.
//!
//! Every interval-bearing term carries an [`Interval`] which, before
//! auto-completion, may be missing or give only a length. Source spans are
//! carried along for diagnostics but never take part in equality, so a
//! grammar parsed from pretty-printed text compares equal to the original.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Byte range into grammar source text.
#[derive(Clone, Copy, Default)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub const fn new(offset: usize, len: usize) -> Self {
        Span { offset, len }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    /// Smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        let start = self.offset.min(other.offset);
        let end = self.end().max(other.end());
        Span::new(start, end - start)
    }
}

// Spans are metadata: two ASTs differing only in positions are the same grammar.
impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.offset, self.end())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub externals: Vec<External>,
    pub start: Option<String>,
}

/// A blackbox nonterminal declared by the grammar and supplied at parse time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct External {
    pub name: String,
    pub attrs: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub alternatives: Vec<Alternative>,
    /// Rules from a `where` clause, visible in every alternative of this rule.
    pub locals: Vec<Rule>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub terms: Vec<Term>,
    /// Term indices in evaluation order; filled in by attribute checking.
    pub eval_order: Option<Vec<usize>>,
    pub span: Span,
}

impl Alternative {
    pub fn new(terms: Vec<Term>, span: Span) -> Self {
        Alternative {
            terms,
            eval_order: None,
            span,
        }
    }

    /// Evaluation order, falling back to textual order when unchecked.
    pub fn order(&self) -> Vec<usize> {
        match &self.eval_order {
            Some(order) => order.clone(),
            None => (0..self.terms.len()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interval {
    Missing,
    Length(Expr),
    Full(Expr, Expr),
}

impl Interval {
    pub fn is_full(&self) -> bool {
        matches!(self, Interval::Full(..))
    }

    pub fn bounds(&self) -> Option<(&Expr, &Expr)> {
        match self {
            Interval::Full(l, r) => Some((l, r)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Self {
        Term { kind, span }
    }
}

/// A nonterminal with its interval, as used by switch branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub name: String,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchArm {
    pub cond: Expr,
    pub target: Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Nonterminal {
        name: String,
        interval: Interval,
    },
    Terminal {
        bytes: Vec<u8>,
        interval: Interval,
    },
    AttrDef {
        name: String,
        expr: Expr,
    },
    Predicate(Expr),
    Array {
        var: String,
        from: Expr,
        to: Expr,
        elem: Target,
    },
    Switch {
        arms: Vec<SwitchArm>,
        default: Target,
    },
}

impl TermKind {
    /// Nonterminals invoked by this term, with their intervals.
    pub fn targets(&self) -> Vec<(&str, &Interval)> {
        match self {
            TermKind::Nonterminal { name, interval } => alloc::vec![(name.as_str(), interval)],
            TermKind::Array { elem, .. } => alloc::vec![(elem.name.as_str(), &elem.interval)],
            TermKind::Switch { arms, default } => arms
                .iter()
                .map(|a| &a.target)
                .chain(core::iter::once(default))
                .map(|t| (t.name.as_str(), &t.interval))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Every expression appearing in the term, in textual order.
    pub fn exprs(&self) -> Vec<&Expr> {
        fn interval_exprs<'a>(iv: &'a Interval, out: &mut Vec<&'a Expr>) {
            match iv {
                Interval::Missing => {}
                Interval::Length(e) => out.push(e),
                Interval::Full(l, r) => {
                    out.push(l);
                    out.push(r);
                }
            }
        }
        let mut out = Vec::new();
        match self {
            TermKind::Nonterminal { interval, .. } | TermKind::Terminal { interval, .. } => {
                interval_exprs(interval, &mut out)
            }
            TermKind::AttrDef { expr, .. } | TermKind::Predicate(expr) => out.push(expr),
            TermKind::Array { from, to, elem, .. } => {
                out.push(from);
                out.push(to);
                interval_exprs(&elem.interval, &mut out);
            }
            TermKind::Switch { arms, default } => {
                for arm in arms {
                    out.push(&arm.cond);
                    interval_exprs(&arm.target.interval, &mut out);
                }
                interval_exprs(&default.interval, &mut out);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Shl,
    Shr,
    BitAnd,
    BitOr,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
        }
    }

    /// Binding strength; larger binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 3,
            BinOp::BitOr => 4,
            BinOp::BitAnd => 5,
            BinOp::Shl | BinOp::Shr => 6,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `exists var . cond ? then : otherwise`
    Exists {
        var: String,
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Ref(Ref),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn bare(name: &str) -> Expr {
        Expr::Ref(Ref::Bare(name.into()))
    }

    pub fn eoi() -> Expr {
        Expr::Ref(Ref::Eoi)
    }

    pub fn end_of(nt: &str) -> Expr {
        Expr::Ref(Ref::Qual {
            nt: nt.into(),
            index: None,
            field: Field::End,
        })
    }

    /// `self + rhs`, folding literals and a zero left operand.
    pub fn plus(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (Expr::Int(a), Expr::Int(b)) => match a.checked_add(*b) {
                Some(v) => Expr::Int(v),
                None => Expr::binary(BinOp::Add, self, rhs),
            },
            (Expr::Int(0), _) => rhs,
            _ => Expr::binary(BinOp::Add, self, rhs),
        }
    }

    /// Visits every reference, including those nested under existentials.
    pub fn for_each_ref<'a>(&'a self, f: &mut dyn FnMut(&'a Ref)) {
        match self {
            Expr::Int(_) => {}
            Expr::Binary(_, l, r) => {
                l.for_each_ref(f);
                r.for_each_ref(f);
            }
            Expr::Cond(c, t, e) => {
                c.for_each_ref(f);
                t.for_each_ref(f);
                e.for_each_ref(f);
            }
            Expr::Exists {
                cond,
                then,
                otherwise,
                ..
            } => {
                cond.for_each_ref(f);
                then.for_each_ref(f);
                otherwise.for_each_ref(f);
            }
            Expr::Ref(r) => {
                if let Ref::Qual {
                    index: Some(idx), ..
                } = r
                {
                    idx.for_each_ref(f);
                }
                f(r);
            }
        }
    }
}

/// What a qualified reference reads from the bound node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Attr(String),
    Start,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ref {
    /// An attribute of the current alternative, a loop variable or an
    /// existential binder.
    Bare(String),
    Eoi,
    /// `A.f` or, with an index, `A(e).f`.
    Qual {
        nt: String,
        index: Option<Box<Expr>>,
        field: Field,
    },
}

/// Counts of interval annotations in a grammar.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntervalStats {
    pub total: usize,
    pub missing: usize,
    pub length_only: usize,
}

impl Grammar {
    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn external(&self, name: &str) -> Option<&External> {
        self.externals.iter().find(|e| e.name == name)
    }

    /// Name of the nonterminal parsing starts from: the declared start, or
    /// the first rule.
    pub fn start_name(&self) -> Option<&str> {
        self.start
            .as_deref()
            .or_else(|| self.rules.first().map(|r| r.name.as_str()))
    }

    /// Visits every rule, locals included, with the enclosing global rule.
    pub fn for_each_rule<'a>(&'a self, mut f: impl FnMut(&'a Rule, Option<&'a Rule>)) {
        for rule in &self.rules {
            f(rule, None);
            for local in &rule.locals {
                f(local, Some(rule));
            }
        }
    }

    pub fn interval_stats(&self) -> IntervalStats {
        let mut stats = IntervalStats::default();
        self.for_each_rule(|rule, _| {
            for alt in &rule.alternatives {
                for term in &alt.terms {
                    let mut count = |iv: &Interval| {
                        stats.total += 1;
                        match iv {
                            Interval::Missing => stats.missing += 1,
                            Interval::Length(_) => stats.length_only += 1,
                            Interval::Full(..) => {}
                        }
                    };
                    match &term.kind {
                        TermKind::Terminal { interval, .. } => count(interval),
                        kind => {
                            for (_, iv) in kind.targets() {
                                count(iv);
                            }
                        }
                    }
                }
            }
        });
        stats
    }
}
