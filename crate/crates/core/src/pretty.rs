//! Canonical surface syntax for grammars.

use alloc::string::String;
use core::fmt::Write;

use crate::ast::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TermOrder {
    /// Terms as written.
    #[default]
    Textual,
    /// Terms in checked evaluation order, where one is recorded.
    Evaluation,
}

pub fn pretty_print(g: &Grammar) -> String {
    pretty_print_with(g, TermOrder::Textual)
}

pub fn pretty_print_with(g: &Grammar, order: TermOrder) -> String {
    let mut out = String::new();
    for ext in &g.externals {
        out.push_str("external ");
        out.push_str(&ext.name);
        if !ext.attrs.is_empty() {
            out.push('(');
            out.push_str(&ext.attrs.join(", "));
            out.push(')');
        }
        out.push_str(";\n");
    }
    if let Some(start) = &g.start {
        let _ = writeln!(out, "start {start};");
    }
    if !g.externals.is_empty() || g.start.is_some() {
        out.push('\n');
    }
    for rule in &g.rules {
        rule_text(&mut out, rule, 0, order);
        for local in &rule.locals {
            out.push_str("\n  where ");
            rule_text(&mut out, local, 8, order);
        }
        out.push_str(";\n");
    }
    out
}

fn rule_text(out: &mut String, rule: &Rule, indent: usize, order: TermOrder) {
    out.push_str(&rule.name);
    out.push_str(" -> ");
    for (i, alt) in rule.alternatives.iter().enumerate() {
        if i > 0 {
            out.push('\n');
            out.extend(core::iter::repeat_n(' ', indent + rule.name.len() + 1));
            out.push_str("/ ");
        }
        out.push_str(&alternative_text(alt, order));
    }
}

pub fn alternative_text(alt: &Alternative, order: TermOrder) -> String {
    let idx = match order {
        TermOrder::Textual => (0..alt.terms.len()).collect(),
        TermOrder::Evaluation => alt.order(),
    };
    let mut out = String::new();
    for (n, i) in idx.into_iter().enumerate() {
        if n > 0 {
            out.push(' ');
        }
        term_text(&mut out, &alt.terms[i]);
    }
    out
}

pub fn term_text(out: &mut String, term: &Term) {
    match &term.kind {
        TermKind::Nonterminal { name, interval } => {
            out.push_str(name);
            interval_text(out, interval);
        }
        TermKind::Terminal { bytes, interval } => {
            string_literal(out, bytes);
            interval_text(out, interval);
        }
        TermKind::AttrDef { name, expr } => {
            let _ = write!(out, "{{{name}=");
            expr_text(out, expr, 0);
            out.push('}');
        }
        TermKind::Predicate(e) => {
            out.push_str("{? ");
            expr_text(out, e, 0);
            out.push('}');
        }
        TermKind::Array { var, from, to, elem } => {
            let _ = write!(out, "for {var} = ");
            expr_text(out, from, 0);
            out.push_str(" to ");
            expr_text(out, to, 0);
            out.push_str(" do ");
            target_text(out, elem);
        }
        TermKind::Switch { arms, default } => {
            out.push_str("switch(");
            for arm in arms {
                expr_text(out, &arm.cond, 0);
                out.push_str(" : ");
                target_text(out, &arm.target);
                out.push_str(" / ");
            }
            out.push_str("default : ");
            target_text(out, default);
            out.push(')');
        }
    }
}

fn target_text(out: &mut String, t: &Target) {
    out.push_str(&t.name);
    interval_text(out, &t.interval);
}

fn interval_text(out: &mut String, iv: &Interval) {
    match iv {
        Interval::Missing => {}
        Interval::Length(e) => {
            out.push('[');
            expr_text(out, e, 0);
            out.push(']');
        }
        Interval::Full(l, r) => {
            out.push('[');
            expr_text(out, l, 0);
            out.push_str(", ");
            expr_text(out, r, 0);
            out.push(']');
        }
    }
}

fn string_literal(out: &mut String, bytes: &[u8]) {
    out.push('"');
    for &b in bytes {
        match b {
            b'"' => out.push_str("\\\""),
            b'\\' => out.push_str("\\\\"),
            b'\n' => out.push_str("\\n"),
            0 => out.push_str("\\0"),
            0x20..=0x7e => out.push(b as char),
            _ => {
                let _ = write!(out, "\\x{b:02x}");
            }
        }
    }
    out.push('"');
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    expr_text(&mut s, e, 0);
    s
}

/// Writes `e`, parenthesizing when its precedence is below `min_prec`.
/// Conditionals and existentials have precedence 0.
fn expr_text(out: &mut String, e: &Expr, min_prec: u8) {
    match e {
        Expr::Int(i64::MIN) => out.push_str("(-9223372036854775807 - 1)"),
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Ref(r) => ref_text(out, r),
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let paren = p < min_prec;
            if paren {
                out.push('(');
            }
            expr_text(out, l, p);
            let _ = write!(out, " {} ", op.symbol());
            expr_text(out, r, p + 1);
            if paren {
                out.push(')');
            }
        }
        Expr::Cond(c, t, f) => {
            let paren = min_prec > 0;
            if paren {
                out.push('(');
            }
            expr_text(out, c, 1);
            out.push_str(" ? ");
            expr_text(out, t, 0);
            out.push_str(" : ");
            expr_text(out, f, 0);
            if paren {
                out.push(')');
            }
        }
        Expr::Exists {
            var,
            cond,
            then,
            otherwise,
        } => {
            let paren = min_prec > 0;
            if paren {
                out.push('(');
            }
            let _ = write!(out, "exists {var} . ");
            expr_text(out, cond, 1);
            out.push_str(" ? ");
            expr_text(out, then, 0);
            out.push_str(" : ");
            expr_text(out, otherwise, 0);
            if paren {
                out.push(')');
            }
        }
    }
}

pub fn ref_text(out: &mut String, r: &Ref) {
    match r {
        Ref::Bare(id) => out.push_str(id),
        Ref::Eoi => out.push_str("EOI"),
        Ref::Qual { nt, index, field } => {
            out.push_str(nt);
            if let Some(idx) = index {
                out.push('(');
                expr_text(out, idx, 0);
                out.push(')');
            }
            out.push('.');
            match field {
                Field::Attr(a) => out.push_str(a),
                Field::Start => out.push_str("start"),
                Field::End => out.push_str("end"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_grammar;

    fn round_trip(src: &str) {
        let g = parse_grammar(src).unwrap();
        let text = pretty_print(&g);
        let again = parse_grammar(&text).unwrap_or_else(|d| panic!("{text}\n{d:?}"));
        assert_eq!(g, again, "{text}");
    }

    #[test]
    fn fig1_text() {
        let g = parse_grammar(r#"S -> A[0, 2] B[EOI - 2, EOI]; A -> "aa"[0,2]; B -> "bb"[0,2];"#)
            .unwrap();
        assert!(pretty_print(&g).contains("A[0, 2] B[EOI - 2, EOI]"));
    }

    #[test]
    fn epsilon_terminal() {
        let g = parse_grammar(r#"O -> "0"[0, 1] O[1, EOI] / ""[0, 1];"#).unwrap();
        assert!(pretty_print(&g).contains(r#"""[0, 1]"#));
    }

    #[test]
    fn parentheses_only_where_needed() {
        let g = parse_grammar("S -> {x = (1 + 2) * 3 - (4 - 5) + (a ? b : c)};").unwrap();
        assert_eq!(pretty_print(&g).trim_end(), "S -> {x=(1 + 2) * 3 - (4 - 5) + (a ? b : c)};");
    }

    #[test]
    fn round_trips() {
        round_trip(r#"S -> "\x7fELF\0\n\"\\" A[-1, 0 - x] {? exists j . A(j).v == 0 ? j : -1};"#);
        round_trip("S -> switch(a < 1 : A[1] / default : B) where A -> B / C where B -> \"\";");
        round_trip("external X(a, b); start S; S -> X;");
        round_trip("S -> {x = a ? b ? 1 : 2 : c ? 3 : 4} {y = -(a + 1) mod 3 >> 1 | 2 & 1};");
    }
}
