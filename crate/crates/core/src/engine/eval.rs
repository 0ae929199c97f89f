//! Expression evaluation against the terms parsed so far.

use alloc::vec::Vec;
use core::fmt;

use super::tree::{Node, ParseTree};
use crate::ast::{BinOp, Expr, Field, Ref, Term};
use crate::check::exists_array;
use crate::check::lookup::{lookup_attr, lookup_term, Lookup};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalFault {
    DivByZero,
    ShiftRange,
    Overflow,
    IndexOutOfRange,
    /// A reference the checker should have ruled out.
    Unbound,
}

impl fmt::Display for EvalFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalFault::DivByZero => "division by zero",
            EvalFault::ShiftRange => "shift amount outside 0..=63",
            EvalFault::Overflow => "arithmetic overflow",
            EvalFault::IndexOutOfRange => "array index out of range",
            EvalFault::Unbound => "unbound reference",
        })
    }
}

pub fn binop(op: BinOp, a: i64, b: i64) -> Result<i64, EvalFault> {
    let bool_ = |c: bool| Ok(i64::from(c));
    match op {
        BinOp::Add => a.checked_add(b).ok_or(EvalFault::Overflow),
        BinOp::Sub => a.checked_sub(b).ok_or(EvalFault::Overflow),
        BinOp::Mul => a.checked_mul(b).ok_or(EvalFault::Overflow),
        BinOp::Div if b == 0 => Err(EvalFault::DivByZero),
        BinOp::Div => a.checked_div(b).ok_or(EvalFault::Overflow),
        BinOp::Mod if b == 0 => Err(EvalFault::DivByZero),
        BinOp::Mod => a.checked_rem_euclid(b).ok_or(EvalFault::Overflow),
        BinOp::Eq => bool_(a == b),
        BinOp::Ne => bool_(a != b),
        BinOp::Lt => bool_(a < b),
        BinOp::Gt => bool_(a > b),
        BinOp::Le => bool_(a <= b),
        BinOp::Ge => bool_(a >= b),
        BinOp::And => bool_(a != 0 && b != 0),
        BinOp::Or => bool_(a != 0 || b != 0),
        BinOp::Shl | BinOp::Shr if !(0..=63).contains(&b) => Err(EvalFault::ShiftRange),
        BinOp::Shl => {
            let v = a << b;
            if v >> b == a {
                Ok(v)
            } else {
                Err(EvalFault::Overflow)
            }
        }
        BinOp::Shr => Ok(a >> b),
        BinOp::BitAnd => Ok(a & b),
        BinOp::BitOr => Ok(a | b),
    }
}

/// Evaluates an expression with no references other than `EOI`.
pub fn eval_closed(e: &Expr, eoi: i64) -> Result<i64, EvalFault> {
    let frame = Frame::new(&[], eoi, None);
    frame.eval(0, None, e)
}

/// A loop variable or existential binder in scope.
pub struct Binder<'s> {
    pub name: &'s str,
    pub val: i64,
    pub next: Scope<'s>,
}

pub type Scope<'s> = Option<&'s Binder<'s>>;

fn scope_get(mut s: Scope<'_>, name: &str) -> Option<i64> {
    while let Some(b) = s {
        if b.name == name {
            return Some(b.val);
        }
        s = b.next;
    }
    None
}

#[derive(Clone, Debug)]
pub enum Slot {
    Value(i64),
    Tree(ParseTree),
}

/// Where a local rule was invoked from: the caller's frame, the invoking
/// term and the binders in scope there.
#[derive(Clone, Copy)]
pub struct Outer<'s> {
    pub frame: &'s Frame<'s>,
    pub pos: usize,
    pub scope: Scope<'s>,
}

/// One alternative being evaluated.
pub struct Frame<'s> {
    pub terms: &'s [Term],
    pub results: Vec<Option<Slot>>,
    pub eoi: i64,
    pub outer: Option<Outer<'s>>,
}

impl<'s> Frame<'s> {
    pub fn new(terms: &'s [Term], eoi: i64, outer: Option<Outer<'s>>) -> Self {
        Frame {
            terms,
            results: alloc::vec![None; terms.len()],
            eoi,
            outer,
        }
    }

    pub fn eval(&self, pos: usize, scope: Scope<'_>, e: &Expr) -> Result<i64, EvalFault> {
        match e {
            Expr::Int(n) => Ok(*n),
            Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
                let a = self.eval(pos, scope, l)? != 0;
                if a == (*op == BinOp::Or) {
                    return Ok(i64::from(a));
                }
                Ok(i64::from(self.eval(pos, scope, r)? != 0))
            }
            Expr::Binary(op, l, r) => binop(*op, self.eval(pos, scope, l)?, self.eval(pos, scope, r)?),
            Expr::Cond(c, t, f) => {
                if self.eval(pos, scope, c)? != 0 {
                    self.eval(pos, scope, t)
                } else {
                    self.eval(pos, scope, f)
                }
            }
            Expr::Exists {
                var,
                cond,
                then,
                otherwise,
            } => {
                let Some(Ref::Qual { nt, .. }) = exists_array(var, cond) else {
                    return Err(EvalFault::Unbound);
                };
                let n = self.array(pos, nt)?.len();
                for j in 0..n {
                    let b = Binder {
                        name: var,
                        val: j as i64,
                        next: scope,
                    };
                    if self.eval(pos, Some(&b), cond)? != 0 {
                        return self.eval(pos, Some(&b), then);
                    }
                }
                self.eval(pos, scope, otherwise)
            }
            Expr::Ref(r) => self.read(pos, scope, r),
        }
    }

    fn read(&self, pos: usize, scope: Scope<'_>, r: &Ref) -> Result<i64, EvalFault> {
        match r {
            Ref::Eoi => Ok(self.eoi),
            Ref::Bare(id) => self.read_bare(pos, scope, id),
            Ref::Qual { nt, index, field } => {
                let idx = match index {
                    Some(e) => Some(self.eval(pos, scope, e)?),
                    None => None,
                };
                let node = self.node(pos, nt, idx)?;
                match field {
                    Field::Start => Ok(node.env.start),
                    Field::End => Ok(node.env.end),
                    Field::Attr(a) => node.env.get(a).ok_or(EvalFault::Unbound),
                }
            }
        }
    }

    fn read_bare(&self, pos: usize, scope: Scope<'_>, id: &str) -> Result<i64, EvalFault> {
        if let Some(v) = scope_get(scope, id) {
            return Ok(v);
        }
        match lookup_attr(self.terms, pos, id) {
            Lookup::Found(k) => match &self.results[k] {
                Some(Slot::Value(v)) => Ok(*v),
                _ => Err(EvalFault::Unbound),
            },
            _ => match self.outer {
                Some(o) => o.frame.read_bare(o.pos, o.scope, id),
                None => Err(EvalFault::Unbound),
            },
        }
    }

    fn tree(&self, pos: usize, nt: &str, indexed: bool) -> Result<&ParseTree, EvalFault> {
        match lookup_term(self.terms, pos, nt, indexed) {
            Lookup::Found(k) => match &self.results[k] {
                Some(Slot::Tree(t)) => Ok(t),
                _ => Err(EvalFault::Unbound),
            },
            _ => match &self.outer {
                Some(o) => o.frame.tree(o.pos, nt, indexed),
                None => Err(EvalFault::Unbound),
            },
        }
    }

    fn array(&self, pos: usize, nt: &str) -> Result<&[ParseTree], EvalFault> {
        match self.tree(pos, nt, true)? {
            ParseTree::Array(elems) => Ok(elems),
            _ => Err(EvalFault::Unbound),
        }
    }

    fn node(&self, pos: usize, nt: &str, idx: Option<i64>) -> Result<&Node, EvalFault> {
        let t = match idx {
            None => self.tree(pos, nt, false)?,
            Some(i) => {
                let elems = self.array(pos, nt)?;
                usize::try_from(i)
                    .ok()
                    .and_then(|i| elems.get(i))
                    .ok_or(EvalFault::IndexOutOfRange)?
            }
        };
        t.as_node().ok_or(EvalFault::Unbound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_grammar;

    fn closed(src: &str, eoi: i64) -> Result<i64, EvalFault> {
        let g = parse_grammar(&alloc::format!("S -> {{x = {src}}};")).unwrap();
        match &g.rules[0].alternatives[0].terms[0].kind {
            crate::ast::TermKind::AttrDef { expr, .. } => eval_closed(expr, eoi),
            _ => unreachable!(),
        }
    }

    #[test]
    fn arithmetic() {
        assert_eq!(closed("EOI", 8), Ok(8));
        assert_eq!(closed("6 mod 3 == 0", 0), Ok(1));
        assert_eq!(closed("3 * (2 << (13 & 7))", 0), Ok(3 * (2 << 5)));
        assert_eq!(closed("-7 / 2", 0), Ok(-3));
        assert_eq!(closed("-7 mod 3", 0), Ok(2));
        assert_eq!(closed("1 < 2 && 2 < 1 || 5", 0), Ok(1));
        assert_eq!(closed("0 ? 1 : 2", 0), Ok(2));
    }

    #[test]
    fn faults() {
        assert_eq!(closed("1 / 0", 0), Err(EvalFault::DivByZero));
        assert_eq!(closed("1 mod 0", 0), Err(EvalFault::DivByZero));
        assert_eq!(closed("1 << 64", 0), Err(EvalFault::ShiftRange));
        assert_eq!(closed("1 >> -1", 0), Err(EvalFault::ShiftRange));
        assert_eq!(closed("9223372036854775807 + 1", 0), Err(EvalFault::Overflow));
        assert_eq!(closed("3 << 62", 0), Err(EvalFault::Overflow));
    }

    #[test]
    fn logical_operators_short_circuit() {
        assert_eq!(closed("0 && 1 / 0", 0), Ok(0));
        assert_eq!(closed("2 || 1 / 0", 0), Ok(1));
        assert_eq!(closed("1 ? 4 : 1 / 0", 0), Ok(4));
    }
}
