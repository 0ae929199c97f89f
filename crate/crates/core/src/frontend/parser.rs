//! Recursive-descent parser for `.ipg` grammar text.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{lex, Tok, Token};
use crate::ast::*;
use crate::diag::{Code, Diagnostic};

const KEYWORDS: &[&str] = &[
    "for", "to", "do", "switch", "default", "where", "external", "exists", "mod", "EOI",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses grammar source. Intervals are left as written.
pub fn parse_grammar(src: &str) -> Result<Grammar, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(src);
    let mut p = Parser { toks, pos: 0 };
    let grammar = p.grammar(&mut diags);
    if diags.is_empty() {
        Ok(grammar)
    } else {
        diags.sort_by_key(|d| d.span.offset);
        Err(diags)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::new(
            Code::SyntaxErr,
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.at(&tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn skip_past_semi(&mut self) {
        while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
            self.bump();
        }
        self.eat(&Tok::Semi);
    }

    fn grammar(&mut self, diags: &mut Vec<Diagnostic>) -> Grammar {
        let mut g = Grammar::default();
        while !self.at(&Tok::Eof) {
            let item = if self.at_kw("external") {
                self.external().map(|e| g.externals.push(e))
            } else if self.at_kw("start")
                && matches!(self.peek_at(1), Tok::Ident(_))
                && self.peek_at(2) == &Tok::Semi
            {
                self.bump();
                self.ident("start nonterminal name").and_then(|(name, _)| {
                    self.expect(Tok::Semi)?;
                    g.start = Some(name);
                    Ok(())
                })
            } else {
                self.rule(diags).map(|r| g.rules.push(r))
            };
            if let Err(d) = item {
                diags.push(d);
                self.skip_past_semi();
            }
        }
        g
    }

    fn external(&mut self) -> PResult<External> {
        let start = self.span();
        self.expect_kw("external")?;
        let (name, _) = self.ident("blackbox name")?;
        let mut attrs = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                loop {
                    attrs.push(self.ident("attribute name")?.0);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        let end = self.expect(Tok::Semi)?;
        Ok(External {
            name,
            attrs,
            span: start.join(end),
        })
    }

    fn rule(&mut self, diags: &mut Vec<Diagnostic>) -> PResult<Rule> {
        let mut rule = self.rule_head_and_alts(diags)?;
        while self.at_kw("where") {
            self.bump();
            rule.locals.push(self.rule_head_and_alts(diags)?);
        }
        let end = self.expect(Tok::Semi)?;
        rule.span = rule.span.join(end);
        Ok(rule)
    }

    fn rule_head_and_alts(&mut self, diags: &mut Vec<Diagnostic>) -> PResult<Rule> {
        let (name, name_span) = self.ident("rule name")?;
        self.expect(Tok::Arrow)?;
        let mut alternatives = Vec::new();
        loop {
            let alt = self.alternative()?;
            if alt.terms.is_empty() {
                diags.push(Diagnostic::new(
                    Code::EmptyAlt,
                    alt.span,
                    format!("rule `{name}` has an alternative with no terms"),
                ));
            }
            alternatives.push(alt);
            if !self.eat(&Tok::Slash) {
                break;
            }
        }
        Ok(Rule {
            name,
            alternatives,
            locals: Vec::new(),
            span: name_span.join(self.prev_span()),
        })
    }

    fn alternative(&mut self) -> PResult<Alternative> {
        let start = self.span();
        let mut terms = Vec::new();
        while !matches!(self.peek(), Tok::Slash | Tok::Semi | Tok::Eof) && !self.at_kw("where") {
            terms.push(self.term()?);
        }
        let span = match (terms.first(), terms.last()) {
            (Some(a), Some(b)) => a.span.join(b.span),
            _ => Span::new(start.offset, 0),
        };
        Ok(Alternative::new(terms, span))
    }

    fn term(&mut self) -> PResult<Term> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Str(bytes) => {
                self.bump();
                TermKind::Terminal {
                    bytes,
                    interval: self.opt_interval()?,
                }
            }
            Tok::LBrace => {
                self.bump();
                let kind = if self.eat(&Tok::Question) {
                    TermKind::Predicate(self.expr()?)
                } else {
                    let (name, _) = self.ident("attribute name or `?`")?;
                    self.expect(Tok::Assign)?;
                    TermKind::AttrDef {
                        name,
                        expr: self.expr()?,
                    }
                };
                self.expect(Tok::RBrace)?;
                kind
            }
            Tok::Ident(kw) if kw == "for" => {
                self.bump();
                let (var, _) = self.ident("loop variable")?;
                self.expect(Tok::Assign)?;
                let from = self.expr()?;
                self.expect_kw("to")?;
                let to = self.expr()?;
                self.expect_kw("do")?;
                TermKind::Array {
                    var,
                    from,
                    to,
                    elem: self.target()?,
                }
            }
            Tok::Ident(kw) if kw == "switch" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut arms = Vec::new();
                while !self.at_kw("default") {
                    let cond = self.expr()?;
                    self.expect(Tok::Colon)?;
                    let target = self.target()?;
                    self.expect(Tok::Slash)?;
                    arms.push(SwitchArm { cond, target });
                }
                self.bump();
                self.expect(Tok::Colon)?;
                let default = self.target()?;
                self.expect(Tok::RParen)?;
                TermKind::Switch { arms, default }
            }
            Tok::Ident(_) => {
                let t = self.target()?;
                TermKind::Nonterminal {
                    name: t.name,
                    interval: t.interval,
                }
            }
            _ => return Err(self.unexpected("a term")),
        };
        Ok(Term::new(kind, start.join(self.prev_span())))
    }

    fn target(&mut self) -> PResult<Target> {
        let (name, _) = self.ident("nonterminal name")?;
        Ok(Target {
            name,
            interval: self.opt_interval()?,
        })
    }

    fn opt_interval(&mut self) -> PResult<Interval> {
        if !self.eat(&Tok::LBracket) {
            return Ok(Interval::Missing);
        }
        let first = self.expr()?;
        let iv = if self.eat(&Tok::Comma) {
            Interval::Full(first, self.expr()?)
        } else {
            Interval::Length(first)
        };
        self.expect(Tok::RBracket)?;
        Ok(iv)
    }

    fn expr(&mut self) -> PResult<Expr> {
        if self.at_kw("exists") {
            self.bump();
            let (var, _) = self.ident("existential variable")?;
            self.expect(Tok::Dot)?;
            let cond = self.binary(1)?;
            self.expect(Tok::Question)?;
            let then = self.expr()?;
            self.expect(Tok::Colon)?;
            let otherwise = self.expr()?;
            return Ok(Expr::Exists {
                var,
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        let cond = self.binary(1)?;
        if self.eat(&Tok::Question) {
            let then = self.expr()?;
            self.expect(Tok::Colon)?;
            let otherwise = self.expr()?;
            return Ok(Expr::Cond(Box::new(cond), Box::new(then), Box::new(otherwise)));
        }
        Ok(cond)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Ident(s) if s == "mod" => BinOp::Mod,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Gt => BinOp::Gt,
            Tok::Le => BinOp::Le,
            Tok::Ge => BinOp::Ge,
            Tok::AndAnd => BinOp::And,
            Tok::OrOr => BinOp::Or,
            Tok::Shl => BinOp::Shl,
            Tok::Shr => BinOp::Shr,
            Tok::Amp => BinOp::BitAnd,
            Tok::Pipe => BinOp::BitOr,
            _ => return None,
        })
    }

    /// Precedence climbing over left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Int(-n));
            }
            let operand = self.unary()?;
            return Ok(Expr::binary(BinOp::Sub, Expr::Int(0), operand));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "EOI" => {
                self.bump();
                Ok(Expr::Ref(Ref::Eoi))
            }
            Tok::Ident(_) => {
                let (name, _) = self.ident("expression")?;
                let index = if self.eat(&Tok::LParen) {
                    let idx = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Some(Box::new(idx))
                } else {
                    None
                };
                if index.is_none() && !self.at(&Tok::Dot) {
                    return Ok(Expr::Ref(Ref::Bare(name)));
                }
                self.expect(Tok::Dot)?;
                let field = match self.peek().clone() {
                    Tok::Ident(f) if f == "start" => Field::Start,
                    Tok::Ident(f) if f == "end" => Field::End,
                    Tok::Ident(f) if !is_keyword(&f) => Field::Attr(f),
                    _ => return Err(self.unexpected("attribute name")),
                };
                self.bump();
                Ok(Expr::Ref(Ref::Qual { nt: name, index, field }))
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nt(name: &str, iv: Interval) -> TermKind {
        TermKind::Nonterminal { name: name.into(), interval: iv }
    }

    #[test]
    fn fig1_parses_with_full_intervals() {
        let g = parse_grammar(
            r#"S -> A[0, 2] B[EOI - 2, EOI];
               A -> "aa"[0, 2];
               B -> "bb"[0, 2];"#,
        )
        .unwrap();
        assert_eq!(g.rules.len(), 3);
        let s = &g.rules[0].alternatives[0].terms;
        assert_eq!(s[0].kind, nt("A", Interval::Full(Expr::Int(0), Expr::Int(2))));
        assert_eq!(
            s[1].kind,
            nt(
                "B",
                Interval::Full(Expr::binary(BinOp::Sub, Expr::eoi(), Expr::Int(2)), Expr::eoi())
            )
        );
    }

    #[test]
    fn implicit_intervals_are_kept() {
        let g = parse_grammar(r#"S -> "magic" A B[10];"#).unwrap();
        let t = &g.rules[0].alternatives[0].terms;
        assert!(matches!(&t[0].kind, TermKind::Terminal { interval: Interval::Missing, .. }));
        assert_eq!(t[1].kind, nt("A", Interval::Missing));
        assert_eq!(t[2].kind, nt("B", Interval::Length(Expr::Int(10))));
    }

    #[test]
    fn precedence_and_associativity() {
        let g = parse_grammar("S -> {x = 1 - 2 - 3 * 4 << 1 & 7 == 2 || 0};").unwrap();
        let TermKind::AttrDef { expr, .. } = &g.rules[0].alternatives[0].terms[0].kind else {
            panic!()
        };
        use BinOp::*;
        let i = Expr::Int;
        let sub = Expr::binary(Sub, Expr::binary(Sub, i(1), i(2)), Expr::binary(Mul, i(3), i(4)));
        let want = Expr::binary(
            Or,
            Expr::binary(Eq, Expr::binary(BitAnd, Expr::binary(Shl, sub, i(1)), i(7)), i(2)),
            i(0),
        );
        assert_eq!(expr, &want);
    }

    #[test]
    fn switch_where_exists_and_arrays() {
        let src = r#"
            external Blob(len);
            start S;
            S -> H[0, 8]
                 for i = 0 to H.num do E[8 * i, 8 * (i + 1)]
                 {k = exists j . E(j).v == 0 ? j : -1}
                 switch(k > 0 : D[0, 1] / default : F[0, 0])
              where D -> "d"
              where F -> "";
        "#;
        let g = parse_grammar(src).unwrap();
        assert_eq!(g.start.as_deref(), Some("S"));
        assert_eq!(g.externals[0].attrs, ["len"]);
        let s = &g.rules[0];
        assert_eq!(s.locals.len(), 2);
        assert_eq!(s.alternatives[0].terms.len(), 4);
        assert!(matches!(s.alternatives[0].terms[3].kind, TermKind::Switch { ref arms, .. } if arms.len() == 1));
    }

    #[test]
    fn empty_alternative_is_reported() {
        let d = parse_grammar("S -> A / ;").unwrap_err();
        assert_eq!(d[0].code, Code::EmptyAlt);
    }

    #[test]
    fn syntax_errors_recover_at_semicolon() {
        let d = parse_grammar("S -> A[0, ; T -> ]; U -> B;").unwrap_err();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|d| d.code == Code::SyntaxErr));
    }

    #[test]
    fn rule_named_start_is_allowed() {
        let g = parse_grammar(r#"start -> "x";"#).unwrap();
        assert_eq!(g.rules[0].name, "start");
    }
}
