//! Interval parser combinators.
//!
//! A parser runs over the whole input with a state `(l, r, c)`: the current
//! interval `[l, r)` in absolute offsets and the position `c`. User code
//! addresses sub-intervals relative to the current one through [`local`] and
//! [`eoi`], mirroring the interval terms of a grammar.

use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cell::OnceCell;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct State {
    pub l: i64,
    pub r: i64,
    pub c: i64,
}

impl State {
    pub fn new(l: i64, r: i64, c: i64) -> Self {
        State { l, r, c }
    }

    /// The whole input, positioned at its start.
    pub fn whole(input: &[u8]) -> Self {
        State::new(0, input.len() as i64, 0)
    }
}

type RunFn<T> = dyn Fn(&[u8], State) -> Option<(T, State)>;

pub struct Parser<T>(Rc<RunFn<T>>);

impl<T> Clone for Parser<T> {
    fn clone(&self) -> Self {
        Parser(Rc::clone(&self.0))
    }
}

impl<T: 'static> Parser<T> {
    pub fn new(f: impl Fn(&[u8], State) -> Option<(T, State)> + 'static) -> Self {
        Parser(Rc::new(f))
    }

    pub fn run(&self, input: &[u8], s: State) -> Option<(T, State)> {
        (self.0)(input, s)
    }

    /// Runs over the whole input and returns the value.
    pub fn parse(&self, input: &[u8]) -> Option<T> {
        self.run(input, State::whole(input)).map(|(v, _)| v)
    }
}

pub fn unit<T: Clone + 'static>(v: T) -> Parser<T> {
    Parser::new(move |_, s| Some((v.clone(), s)))
}

pub fn chain<T: 'static, U: 'static>(p: Parser<T>, f: impl Fn(T) -> Parser<U> + 'static) -> Parser<U> {
    Parser::new(move |inp, s| {
        let (v, s1) = p.run(inp, s)?;
        f(v).run(inp, s1)
    })
}

pub fn map<T: 'static, U: 'static>(p: Parser<T>, f: impl Fn(T) -> U + 'static) -> Parser<U> {
    Parser::new(move |inp, s| p.run(inp, s).map(|(v, s1)| (f(v), s1)))
}

pub fn fail<T: 'static>() -> Parser<T> {
    Parser::new(|_, _| None)
}

pub fn get_interval() -> Parser<(i64, i64)> {
    Parser::new(|_, s| Some(((s.l, s.r), s)))
}

/// Moves to `[l, r)` and to position `l`; fails unless `l < r`.
pub fn set_interval(l: i64, r: i64) -> Parser<()> {
    Parser::new(move |_, _| (l < r).then_some(((), State::new(l, r, l))))
}

pub fn get_pos() -> Parser<i64> {
    Parser::new(|_, s| Some((s.c, s)))
}

pub fn set_pos(c: i64) -> Parser<()> {
    Parser::new(move |_, s| Some(((), State { c, ..s })))
}

/// Length of the current interval.
pub fn eoi() -> Parser<i64> {
    map(get_interval(), |(l, r)| r - l)
}

/// Runs `p` on `[l, r)` relative to the current interval, then restores the
/// interval and leaves the position at its `r`.
pub fn local<T: 'static>(p: Parser<T>, l: i64, r: i64) -> Parser<T> {
    Parser::new(move |inp, s| {
        let (lg, rg) = (s.l, s.r);
        if !(0 <= l && r <= rg - lg) {
            return None;
        }
        let ((), s1) = set_interval(lg + l, lg + r).run(inp, s)?;
        let (v, _) = p.run(inp, s1)?;
        Some((v, State::new(lg, rg, lg + r)))
    })
}

/// Biased choice: `q` runs from the original state only if `p` fails.
pub fn alt<T: 'static>(p: Parser<T>, q: Parser<T>) -> Parser<T> {
    Parser::new(move |inp, s| p.run(inp, s).or_else(|| q.run(inp, s)))
}

pub fn seq<T: 'static, U: 'static>(p: Parser<T>, q: Parser<U>) -> Parser<(T, U)> {
    Parser::new(move |inp, s| {
        let (a, s1) = p.run(inp, s)?;
        let (b, s2) = q.run(inp, s1)?;
        Some(((a, b), s2))
    })
}

/// Sequence keeping the second value.
pub fn then<T: 'static, U: 'static>(p: Parser<T>, q: Parser<U>) -> Parser<U> {
    map(seq(p, q), |(_, b)| b)
}

/// Sequence keeping the first value.
pub fn before<T: 'static, U: 'static>(p: Parser<T>, q: Parser<U>) -> Parser<T> {
    map(seq(p, q), |(a, _)| a)
}

pub fn char_p(b: u8) -> Parser<u8> {
    Parser::new(move |inp, s| {
        let ok = s.l <= s.c && s.c < s.r && usize::try_from(s.c).ok().and_then(|c| inp.get(c)) == Some(&b);
        ok.then_some((b, State { c: s.c + 1, ..s }))
    })
}

pub fn str_p(bytes: &[u8]) -> Parser<Vec<u8>> {
    let want: Vec<u8> = bytes.to_vec();
    Parser::new(move |inp, s| {
        let mut st = s;
        for &b in &want {
            st = char_p(b).run(inp, st)?.1;
        }
        Some((want.clone(), st))
    })
}

/// Ties a recursive knot: `f` receives the parser being defined.
pub fn fix<T: 'static>(f: impl FnOnce(Parser<T>) -> Parser<T>) -> Parser<T> {
    let cell: Rc<OnceCell<Parser<T>>> = Rc::new(OnceCell::new());
    let weak = Rc::downgrade(&cell);
    let knot = Parser::new(move |inp, s| weak.upgrade()?.get()?.clone().run(inp, s));
    let _ = cell.set(f(knot));
    Parser::new(move |inp, s| cell.get()?.run(inp, s))
}

/// `p` exactly `n` times.
pub fn arr<T: 'static>(n: usize, p: Parser<T>) -> Parser<Vec<T>> {
    Parser::new(move |inp, s| {
        let mut out = Vec::with_capacity(n);
        let mut st = s;
        for _ in 0..n {
            let (v, s1) = p.run(inp, st)?;
            out.push(v);
            st = s1;
        }
        Some((out, st))
    })
}

/// A binary digit in `[0, 1)`.
pub fn digit_p() -> Parser<i64> {
    alt(
        local(map(char_p(b'0'), |_| 0), 0, 1),
        local(map(char_p(b'1'), |_| 1), 0, 1),
    )
}

/// A binary numeral over the whole current interval, read left-recursively
/// on ever shorter prefixes.
pub fn int_p() -> Parser<i64> {
    fix(|intp| {
        let rec = chain(eoi(), move |e| {
            let intp = intp.clone();
            chain(local(intp, 0, e - 1), move |iv| {
                chain(local(digit_p(), e - 1, e), move |dv| unit(iv * 2 + dv))
            })
        });
        alt(rec, chain(local(digit_p(), 0, 1), unit))
    })
}
