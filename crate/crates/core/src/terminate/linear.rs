//! Exact rational linear arithmetic: linear forms and a feasibility check for
//! conjunctions of equalities and non-strict inequalities.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Normalized fraction: positive denominator, lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Arithmetic overflow in exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

type R<T> = Result<T, Overflow>;

#[allow(clippy::should_implement_trait)]
impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> R<Rational> {
        if den == 0 {
            return Err(Overflow);
        }
        let g = gcd(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().ok_or(Overflow)?;
            den = den.checked_neg().ok_or(Overflow)?;
        }
        Ok(Rational { num, den })
    }

    pub fn int(n: i64) -> Rational {
        Rational { num: n.into(), den: 1 }
    }

    pub fn num(self) -> i128 {
        self.num
    }

    pub fn den(self) -> i128 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn signum(self) -> i128 {
        self.num.signum()
    }

    pub fn add(self, o: Rational) -> R<Rational> {
        let num = self
            .num
            .checked_mul(o.den)
            .and_then(|a| o.num.checked_mul(self.den).and_then(|b| a.checked_add(b)))
            .ok_or(Overflow)?;
        Rational::new(num, self.den.checked_mul(o.den).ok_or(Overflow)?)
    }

    pub fn neg(self) -> R<Rational> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or(Overflow)?,
            den: self.den,
        })
    }

    pub fn sub(self, o: Rational) -> R<Rational> {
        self.add(o.neg()?)
    }

    pub fn mul(self, o: Rational) -> R<Rational> {
        Rational::new(
            self.num.checked_mul(o.num).ok_or(Overflow)?,
            self.den.checked_mul(o.den).ok_or(Overflow)?,
        )
    }

    pub fn div(self, o: Rational) -> R<Rational> {
        Rational::new(
            self.num.checked_mul(o.den).ok_or(Overflow)?,
            self.den.checked_mul(o.num).ok_or(Overflow)?,
        )
    }

    /// Smallest integer not below `self`.
    pub fn ceil(self) -> i128 {
        let q = self.num.div_euclid(self.den);
        if self.num.rem_euclid(self.den) == 0 {
            q
        } else {
            q + 1
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        // denominators are positive; fall back to floating comparison only if
        // the cross products overflow
        match (self.num.checked_mul(o.den), o.num.checked_mul(self.den)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => (self.num as f64 / self.den as f64)
                .partial_cmp(&(o.num as f64 / o.den as f64))
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `constant + sum(coeff * symbol)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearForm {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl LinearForm {
    pub fn constant(c: Rational) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn symbol(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), Rational::ONE);
        LinearForm {
            coeffs,
            constant: Rational::ZERO,
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.coeffs.is_empty().then_some(self.constant)
    }

    pub fn coeff(&self, sym: &str) -> Rational {
        self.coeffs.get(sym).copied().unwrap_or(Rational::ZERO)
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &LinearForm, k: Rational) -> R<LinearForm> {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            let v = out.coeff(s).add(c.mul(k)?)?;
            if v.is_zero() {
                out.coeffs.remove(s);
            } else {
                out.coeffs.insert(s.clone(), v);
            }
        }
        out.constant = out.constant.add(other.constant.mul(k)?)?;
        Ok(out)
    }

    pub fn add(&self, other: &LinearForm) -> R<LinearForm> {
        self.add_scaled(other, Rational::ONE)
    }

    pub fn sub(&self, other: &LinearForm) -> R<LinearForm> {
        self.add_scaled(other, Rational::int(-1))
    }

    pub fn scale(&self, k: Rational) -> R<LinearForm> {
        LinearForm::default().add_scaled(self, k)
    }

    /// Replaces `sym` by `by`.
    pub fn substitute(&self, sym: &str, by: &LinearForm) -> R<LinearForm> {
        let c = self.coeff(sym);
        if c.is_zero() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.coeffs.remove(sym);
        out.add_scaled(by, c)
    }

    pub fn eval(&self, at: &BTreeMap<String, Rational>) -> R<Rational> {
        let mut v = self.constant;
        for (s, c) in &self.coeffs {
            v = v.add(c.mul(at.get(s).copied().unwrap_or(Rational::ZERO))?)?;
        }
        Ok(v)
    }
}

/// A conjunction of `form = 0` and `form >= 0` constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct System {
    pub eqs: Vec<LinearForm>,
    pub ges: Vec<LinearForm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Unsat,
    /// A satisfying rational assignment; symbols not listed are zero.
    Sat(BTreeMap<String, Rational>),
}

/// Decides rational feasibility: Gaussian elimination on the equalities,
/// then Fourier-Motzkin on what remains.
pub fn feasible(sys: &System) -> R<Feasibility> {
    let mut eqs = sys.eqs.clone();
    let mut ges = sys.ges.clone();
    // (symbol, definition in terms of the remaining symbols), in elimination order
    let mut solved: Vec<(String, LinearForm)> = Vec::new();

    while let Some(eq) = eqs.pop() {
        let Some((sym, c)) = eq.coeffs.iter().next().map(|(s, c)| (s.clone(), *c)) else {
            if !eq.constant.is_zero() {
                return Ok(Feasibility::Unsat);
            }
            continue;
        };
        // sym = -(eq - c*sym) / c
        let mut rest = eq.clone();
        rest.coeffs.remove(&sym);
        let def = rest.scale(Rational::int(-1).div(c)?)?;
        for e in eqs.iter_mut() {
            *e = e.substitute(&sym, &def)?;
        }
        for g in ges.iter_mut() {
            *g = g.substitute(&sym, &def)?;
        }
        for (_, d) in solved.iter_mut() {
            *d = d.substitute(&sym, &def)?;
        }
        solved.push((sym, def));
    }

    // Fourier-Motzkin; remember each stage's constraints for back-substitution
    let mut stages: Vec<(String, Vec<LinearForm>)> = Vec::new();
    loop {
        if ges.iter().any(|g| g.as_constant().is_some_and(|c| c.signum() < 0)) {
            return Ok(Feasibility::Unsat);
        }
        ges.retain(|g| g.as_constant().is_none());
        let syms: BTreeSet<&String> = ges.iter().flat_map(|g| g.coeffs.keys()).collect();
        // eliminate the symbol producing the fewest new constraints
        let Some(sym) = syms
            .iter()
            .min_by_key(|s| {
                let pos = ges.iter().filter(|g| g.coeff(s).signum() > 0).count();
                let neg = ges.iter().filter(|g| g.coeff(s).signum() < 0).count();
                pos * neg
            })
            .map(|s| (*s).clone())
        else {
            break;
        };
        let (with, without): (Vec<LinearForm>, Vec<LinearForm>) =
            ges.into_iter().partition(|g| !g.coeff(&sym).is_zero());
        let mut next = without;
        let lower: Vec<&LinearForm> = with.iter().filter(|g| g.coeff(&sym).signum() > 0).collect();
        let upper: Vec<&LinearForm> = with.iter().filter(|g| g.coeff(&sym).signum() < 0).collect();
        for lo in &lower {
            for up in &upper {
                // lo/c_lo + up/(-c_up) >= 0 cancels sym
                let a = lo.scale(Rational::ONE.div(lo.coeff(&sym))?)?;
                let b = up.scale(Rational::ONE.div(up.coeff(&sym).neg()?)?)?;
                let mut combined = a.add(&b)?;
                combined.coeffs.remove(&sym);
                if !next.contains(&combined) {
                    next.push(combined);
                }
            }
        }
        stages.push((sym, with));
        ges = next;
    }

    let mut at: BTreeMap<String, Rational> = BTreeMap::new();
    for (sym, cons) in stages.iter().rev() {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for g in cons {
            let c = g.coeff(sym);
            let mut rest = g.clone();
            rest.coeffs.remove(sym);
            // c*sym + rest >= 0
            let bound = rest.eval(&at)?.neg()?.div(c)?;
            if c.signum() > 0 {
                lo = Some(lo.map_or(bound, |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound, |h| h.min(bound)));
            }
        }
        let pick = match (lo, hi) {
            (Some(l), Some(h)) if l <= Rational::ZERO && Rational::ZERO <= h => Rational::ZERO,
            (None, Some(h)) if Rational::ZERO <= h => Rational::ZERO,
            (Some(l), None) if l <= Rational::ZERO => Rational::ZERO,
            (Some(l), Some(h)) => {
                let c = Rational::new(l.ceil(), 1)?;
                if c <= h {
                    c
                } else {
                    l
                }
            }
            (Some(l), None) => Rational::new(l.ceil(), 1)?,
            (None, Some(h)) => h,
            (None, None) => Rational::ZERO,
        };
        at.insert(sym.clone(), pick);
    }
    for (sym, def) in solved.iter().rev() {
        let v = def.eval(&at)?;
        at.insert(sym.clone(), v);
    }
    Ok(Feasibility::Sat(at))
}
