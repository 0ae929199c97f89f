//! Static termination checking: every elementary cycle of the nonterminal
//! graph must strictly shrink the interval it recurses on.

pub mod linear;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::*;
use crate::engine::blackbox::BUILTINS;
use crate::engine::eval::eval_closed;
use crate::names::{all_rules, display_name, resolve_nt, NtId};
use crate::pretty::expr_to_string;
use linear::{feasible, Feasibility, LinearForm, Overflow, Rational, System};

/// One occurrence of `to[left, right]` in the rule of `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub left: Expr,
    pub right: Expr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NtGraph {
    pub vertices: Vec<NtId>,
    pub names: Vec<String>,
    pub edges: Vec<Edge>,
}

impl NtGraph {
    pub fn index(&self, id: NtId) -> Option<usize> {
        self.vertices.iter().position(|v| *v == id)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Distinct successors of each vertex, ascending.
    fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].insert(e.to);
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

pub fn build_nt_graph(g: &Grammar) -> NtGraph {
    let mut graph = NtGraph::default();
    for (id, _) in all_rules(g) {
        graph.vertices.push(id);
    }
    for i in 0..g.externals.len() {
        graph.vertices.push(NtId::External(i));
    }
    for i in 0..BUILTINS.len() {
        graph.vertices.push(NtId::Builtin(i));
    }
    graph.names = graph.vertices.iter().map(|&v| display_name(g, v)).collect();
    for (from_id, rule) in all_rules(g) {
        let from = graph.index(from_id).expect("rule vertex");
        for alt in &rule.alternatives {
            for term in &alt.terms {
                for (name, iv) in term.kind.targets() {
                    let (Some(to_id), Some((l, r))) = (resolve_nt(g, from_id.owner(), name), iv.bounds()) else {
                        continue;
                    };
                    graph.edges.push(Edge {
                        from,
                        to: graph.index(to_id).expect("target vertex"),
                        left: l.clone(),
                        right: r.clone(),
                    });
                }
            }
        }
    }
    graph
}

/// Nonterminals every alternative of which touches at least one byte.
pub fn consumes_terminal(g: &Grammar) -> BTreeSet<NtId> {
    let mut set: BTreeSet<NtId> = BUILTINS
        .iter()
        .enumerate()
        .filter(|(_, b)| b.consumes)
        .map(|(i, _)| NtId::Builtin(i))
        .collect();
    let rules = all_rules(g);
    loop {
        let mut changed = false;
        for (id, rule) in &rules {
            if set.contains(id) || rule.alternatives.is_empty() {
                continue;
            }
            let consumes = |name: &str| resolve_nt(g, id.owner(), name).is_some_and(|t| set.contains(&t));
            let every = rule.alternatives.iter().all(|alt| {
                alt.terms.iter().any(|t| match &t.kind {
                    TermKind::Terminal { bytes, .. } => !bytes.is_empty(),
                    TermKind::Nonterminal { name, .. } => consumes(name),
                    TermKind::Switch { arms, default } => {
                        arms.iter().all(|a| consumes(&a.target.name)) && consumes(&default.name)
                    }
                    _ => false,
                })
            });
            if every {
                set.insert(*id);
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

pub const DEFAULT_CYCLE_LIMIT: usize = 10_000;

/// A cycle as the edge indices it follows, starting at its smallest vertex.
pub type Cycle = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleLimit;

/// Vertex cycles by Johnson's algorithm, each starting at its smallest
/// vertex, in a deterministic order.
pub fn vertex_cycles(adj: &[Vec<usize>], limit: usize) -> Result<Vec<Vec<usize>>, CycleLimit> {
    struct Search<'a> {
        adj: &'a [Vec<usize>],
        start: usize,
        allowed: Vec<bool>,
        blocked: Vec<bool>,
        b: Vec<BTreeSet<usize>>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
        limit: usize,
    }
    impl Search<'_> {
        fn unblock(&mut self, v: usize) {
            self.blocked[v] = false;
            for w in core::mem::take(&mut self.b[v]) {
                if self.blocked[w] {
                    self.unblock(w);
                }
            }
        }
        fn circuit(&mut self, v: usize) -> Result<bool, CycleLimit> {
            let mut found = false;
            self.stack.push(v);
            self.blocked[v] = true;
            for &w in &self.adj[v] {
                if !self.allowed[w] {
                    continue;
                }
                if w == self.start {
                    if self.out.len() >= self.limit {
                        return Err(CycleLimit);
                    }
                    self.out.push(self.stack.clone());
                    found = true;
                } else if !self.blocked[w] && self.circuit(w)? {
                    found = true;
                }
            }
            if found {
                self.unblock(v);
            } else {
                for &w in &self.adj[v] {
                    if self.allowed[w] {
                        self.b[w].insert(v);
                    }
                }
            }
            self.stack.pop();
            Ok(found)
        }
    }
    let n = adj.len();
    let mut s = Search {
        adj,
        start: 0,
        allowed: vec![false; n],
        blocked: vec![false; n],
        b: vec![BTreeSet::new(); n],
        stack: Vec::new(),
        out: Vec::new(),
        limit,
    };
    for start in 0..n {
        let comp = component_of(adj, start);
        s.start = start;
        s.allowed = comp;
        s.blocked.iter_mut().for_each(|b| *b = false);
        s.b.iter_mut().for_each(BTreeSet::clear);
        s.circuit(start)?;
    }
    Ok(s.out)
}

/// Vertices `>= start` that can both reach and be reached from `start`
/// without leaving `>= start`.
fn component_of(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let n = adj.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut todo = vec![start];
        seen[start] = true;
        while let Some(v) = todo.pop() {
            for u in start..n {
                let edge = if forward { adj[v].contains(&u) } else { adj[u].contains(&v) };
                if edge && !seen[u] {
                    seen[u] = true;
                    todo.push(u);
                }
            }
        }
        seen
    };
    let (f, b) = (reach(true), reach(false));
    (0..n).map(|v| v >= start && f[v] && b[v]).collect()
}

/// Every elementary cycle, with parallel edges expanded.
pub fn elementary_cycles(ng: &NtGraph, limit: usize) -> Result<Vec<Cycle>, CycleLimit> {
    let mut out = Vec::new();
    for vs in vertex_cycles(&ng.successors(), limit)? {
        let steps: Vec<Vec<usize>> = (0..vs.len())
            .map(|i| {
                let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
                (0..ng.edges.len())
                    .filter(|&e| ng.edges[e].from == a && ng.edges[e].to == b)
                    .collect()
            })
            .collect();
        let mut partial: Vec<Cycle> = vec![Vec::new()];
        for step in &steps {
            let mut next = Vec::new();
            for p in &partial {
                for &e in step {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
            partial = next;
            if out.len() + partial.len() > limit {
                return Err(CycleLimit);
            }
        }
        out.extend(partial);
    }
    Ok(out)
}

/// Value of an expression without references.
fn eval_fold(e: &Expr) -> Option<i64> {
    let mut closed = true;
    e.for_each_ref(&mut |_| closed = false);
    if closed {
        eval_closed(e, 0).ok()
    } else {
        None
    }
}

/// Linearizes label expressions for one cycle step. Attribute symbols are
/// local to the step; `EOI` is shared.
struct Linearizer<'a> {
    g: &'a Grammar,
    consumers: &'a BTreeSet<NtId>,
    owner: Option<usize>,
    step: usize,
    opaque: &'a mut usize,
    nonlinear: bool,
    /// `B.end` symbols of consuming nonterminals.
    ends: BTreeSet<String>,
    /// Symbols with a source-level meaning, for hints.
    named: BTreeSet<String>,
}

impl Linearizer<'_> {
    fn fresh(&mut self) -> LinearForm {
        *self.opaque += 1;
        self.nonlinear = true;
        LinearForm::symbol(&format!("#{}", self.opaque))
    }

    fn named(&mut self, text: String) -> LinearForm {
        let sym = format!("{text}@{}", self.step);
        self.named.insert(sym.clone());
        LinearForm::symbol(&sym)
    }

    fn form(&mut self, e: &Expr) -> Result<LinearForm, Overflow> {
        Ok(match e {
            Expr::Int(n) => LinearForm::constant(Rational::int(*n)),
            Expr::Ref(Ref::Eoi) => LinearForm::symbol("EOI"),
            Expr::Ref(Ref::Bare(id)) => self.named(id.clone()),
            Expr::Ref(r @ Ref::Qual { nt, field, .. }) => {
                let mut text = String::new();
                crate::pretty::ref_text(&mut text, r);
                let f = self.named(text);
                let consumer = resolve_nt(self.g, self.owner, nt).is_some_and(|id| self.consumers.contains(&id));
                if *field == Field::End && consumer {
                    self.ends.insert(f.coeffs.keys().next().unwrap().clone());
                }
                f
            }
            Expr::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Mul), l, r) => {
                let (a, b) = (self.form(l)?, self.form(r)?);
                match op {
                    BinOp::Add => a.add(&b)?,
                    BinOp::Sub => a.sub(&b)?,
                    _ => match (a.as_constant(), b.as_constant()) {
                        (Some(k), _) => b.scale(k)?,
                        (_, Some(k)) => a.scale(k)?,
                        _ => self.fresh(),
                    },
                }
            }
            _ => match eval_fold(e) {
                Some(n) => LinearForm::constant(Rational::int(n)),
                None => self.fresh(),
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CycleResult {
    /// The interval shrinks on every trip around the cycle.
    Pass,
    /// A trip with the full interval `[0, EOI]` is possible.
    Flag,
    /// Possibly non-shrinking, but only through nonlinear labels.
    Unknown,
}

impl CycleResult {
    pub fn as_str(self) -> &'static str {
        match self {
            CycleResult::Pass => "pass",
            CycleResult::Flag => "flag",
            CycleResult::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCheck {
    pub result: CycleResult,
    /// Values for the source-level symbols under which the cycle keeps the
    /// full interval.
    pub hint: Option<String>,
}

/// Checks whether a cycle can revisit its start on the same interval.
pub fn cycle_satisfiable(g: &Grammar, ng: &NtGraph, cycle: &[usize], consumers: &BTreeSet<NtId>) -> CycleCheck {
    match cycle_system(g, ng, cycle, consumers) {
        Ok(check) => check,
        Err(Overflow) => CycleCheck {
            result: CycleResult::Unknown,
            hint: None,
        },
    }
}

fn cycle_system(g: &Grammar, ng: &NtGraph, cycle: &[usize], consumers: &BTreeSet<NtId>) -> Result<CycleCheck, Overflow> {
    let mut sys = System::default();
    let mut opaque = 0;
    let mut nonlinear = false;
    let mut named = BTreeSet::new();
    named.insert("EOI".to_string());
    for (step, &e) in cycle.iter().enumerate() {
        let edge = &ng.edges[e];
        let mut lin = Linearizer {
            g,
            consumers,
            owner: ng.vertices[edge.from].owner(),
            step,
            opaque: &mut opaque,
            nonlinear: false,
            ends: BTreeSet::new(),
            named: BTreeSet::new(),
        };
        let l = lin.form(&edge.left)?;
        let r = lin.form(&edge.right)?.sub(&LinearForm::symbol("EOI"))?;
        sys.eqs.push(l);
        sys.eqs.push(r);
        for end in &lin.ends {
            sys.ges.push(LinearForm::symbol(end).sub(&LinearForm::constant(Rational::ONE))?);
        }
        nonlinear |= lin.nonlinear;
        named.append(&mut lin.named);
    }
    Ok(match feasible(&sys)? {
        Feasibility::Unsat => CycleCheck {
            result: CycleResult::Pass,
            hint: None,
        },
        Feasibility::Sat(at) => {
            let hint = named
                .iter()
                .map(|s| format!("{s} = {}", at.get(s).copied().unwrap_or(Rational::ZERO)))
                .collect::<Vec<_>>()
                .join(", ");
            CycleCheck {
                result: if nonlinear { CycleResult::Unknown } else { CycleResult::Flag },
                hint: Some(hint),
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Terminates,
    MayNotTerminate,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Terminates => "Terminates",
            Verdict::MayNotTerminate => "MayNotTerminate",
            Verdict::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleReport {
    /// Vertices `A0 .. An`; the cycle returns to `A0`.
    pub path: Vec<String>,
    /// Label texts `[left, right]`, one per edge.
    pub intervals: Vec<(String, String)>,
    pub result: CycleResult,
    pub hint: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TerminationReport {
    pub verdict: Verdict,
    pub cycles: Vec<CycleReport>,
    /// Enumeration stopped at the cycle limit.
    pub cycle_limit_hit: bool,
    pub ms: f64,
}

pub fn check_termination(g: &Grammar) -> TerminationReport {
    check_termination_with(g, DEFAULT_CYCLE_LIMIT)
}

pub fn check_termination_with(g: &Grammar, limit: usize) -> TerminationReport {
    #[cfg(feature = "std")]
    let t0 = std::time::Instant::now();
    let ng = build_nt_graph(g);
    let consumers = consumes_terminal(g);
    let (cycles, limit_hit) = match elementary_cycles(&ng, limit) {
        Ok(c) => (c, false),
        Err(CycleLimit) => (Vec::new(), true),
    };
    let mut reports = Vec::new();
    for c in &cycles {
        let check = cycle_satisfiable(g, &ng, c, &consumers);
        reports.push(CycleReport {
            path: c.iter().map(|&e| ng.names[ng.edges[e].from].clone()).collect(),
            intervals: c
                .iter()
                .map(|&e| (expr_to_string(&ng.edges[e].left), expr_to_string(&ng.edges[e].right)))
                .collect(),
            result: check.result,
            hint: check.hint,
        });
    }
    let verdict = if reports.iter().any(|r| r.result == CycleResult::Flag) {
        Verdict::MayNotTerminate
    } else if limit_hit || reports.iter().any(|r| r.result == CycleResult::Unknown) {
        Verdict::Unknown
    } else {
        Verdict::Terminates
    };
    #[cfg(feature = "std")]
    let ms = t0.elapsed().as_secs_f64() * 1000.0;
    #[cfg(not(feature = "std"))]
    let ms = 0.0;
    TerminationReport {
        verdict,
        cycles: reports,
        cycle_limit_hit: limit_hit,
        ms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prepare;

    const FIG3: &str = r#"
        Int -> Int[0, EOI - 1] Digit[EOI - 1, EOI] {val = 2 * Int.val + Digit.val}
             / Digit[0, 1] {val = Digit.val};
        Digit -> "0"[0, 1] {val = 0} / "1"[0, 1] {val = 1};"#;
    const PINGPONG: &str = r#"A -> B[0, EOI] / "s"[0, 1]; B -> A[0, EOI] / "s"[0, 1];"#;

    fn graph(src: &str) -> (Grammar, NtGraph) {
        let g = prepare(src).unwrap();
        let ng = build_nt_graph(&g);
        (g, ng)
    }

    fn labels(ng: &NtGraph, from: &str, to: &str) -> Vec<(String, String)> {
        let (a, b) = (ng.index_of(from).unwrap(), ng.index_of(to).unwrap());
        ng.edges
            .iter()
            .filter(|e| e.from == a && e.to == b)
            .map(|e| (expr_to_string(&e.left), expr_to_string(&e.right)))
            .collect()
    }

    fn pair(l: &str, r: &str) -> (String, String) {
        (l.into(), r.into())
    }

    #[test]
    fn graph_edges() {
        let (_, ng) = graph(PINGPONG);
        assert_eq!(labels(&ng, "A", "B"), [pair("0", "EOI")]);
        assert_eq!(labels(&ng, "B", "A"), [pair("0", "EOI")]);
        let (_, ng) = graph(FIG3);
        assert_eq!(labels(&ng, "Int", "Int"), [pair("0", "EOI - 1")]);
        assert_eq!(labels(&ng, "Int", "Digit").len(), 2);
        let (_, ng) = graph(r#"S -> "a" "b";"#);
        assert!(ng.edges.is_empty());
    }

    /// Independent enumeration: every simple path from the smallest vertex.
    fn brute_cycles(adj: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
        fn go(adj: &[Vec<usize>], path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
            let v = *path.last().unwrap();
            for &w in &adj[v] {
                if w == path[0] {
                    out.insert(path.clone());
                } else if w > path[0] && !path.contains(&w) {
                    path.push(w);
                    go(adj, path, out);
                    path.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        for s in 0..adj.len() {
            go(adj, &mut vec![s], &mut out);
        }
        out
    }

    #[test]
    fn johnson_matches_brute_force() {
        let adjs: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0, 1], vec![2], vec![0, 1]],
            vec![vec![1, 2, 3], vec![0, 2], vec![0, 1, 3], vec![0, 1]],
            vec![vec![1], vec![2], vec![]],
            vec![vec![1, 2], vec![0, 2, 3], vec![1, 3, 0], vec![0, 2, 3]],
        ];
        for adj in adjs {
            let found = vertex_cycles(&adj, 100).unwrap();
            let set: BTreeSet<_> = found.iter().cloned().collect();
            assert_eq!(set.len(), found.len(), "duplicates in {found:?}");
            assert_eq!(set, brute_cycles(&adj));
        }
        assert!(vertex_cycles(&[vec![1, 2], vec![0, 2], vec![0, 1]], 2).is_err());
    }

    #[test]
    fn cycles_of_examples() {
        let (_, ng) = graph(FIG3);
        let cycles = elementary_cycles(&ng, 100).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(ng.edges[cycles[0][0]].from, ng.index_of("Int").unwrap());
        let (_, ng) = graph(PINGPONG);
        assert_eq!(elementary_cycles(&ng, 100).unwrap().len(), 1);
        let (_, ng) = graph(r#"S -> A B; A -> "a"; B -> "b";"#);
        assert!(elementary_cycles(&ng, 100).unwrap().is_empty());
    }

    #[test]
    fn parallel_edges_multiply_cycles() {
        let (_, ng) = graph(r#"A -> B[0, EOI] / B[1, EOI]; B -> A[0, EOI] / "s";"#);
        assert_eq!(elementary_cycles(&ng, 100).unwrap().len(), 2);
    }

    #[test]
    fn consumers() {
        let g = prepare(
            r#"Blocks -> Block Blocks / Block; Block -> "!" Raw;
               O -> "0"[0, 1] O[1, EOI] / ""[0, 1];
               E -> Raw;"#,
        )
        .unwrap();
        let set = consumes_terminal(&g);
        let has = |n: &str| set.contains(&resolve_nt(&g, None, n).unwrap());
        assert!(has("Block") && has("Blocks") && has("Byte"));
        assert!(!has("O") && !has("E") && !has("Raw"));
    }

    fn verdict(src: &str) -> (Verdict, Vec<CycleReport>) {
        let r = check_termination(&prepare(src).unwrap());
        (r.verdict, r.cycles)
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(FIG3).0, Verdict::Terminates);
        let (v, cycles) = verdict(PINGPONG);
        assert_eq!(v, Verdict::MayNotTerminate);
        assert_eq!(cycles[0].path, ["A", "B"]);
        assert_eq!(
            verdict(r#"Blocks -> Block Blocks / Block; Block -> "!" Raw;"#).0,
            Verdict::Terminates
        );
        let (v, cycles) = verdict("S -> num[0, 1] S[num.val, EOI]; num -> AsciiInt[0, EOI] {val = AsciiInt.val};");
        assert_eq!(v, Verdict::MayNotTerminate);
        assert!(cycles[0].hint.as_ref().unwrap().contains("num.val@0 = 0"));
        assert_eq!(verdict(r#"S -> ""[0, 0] S[0, EOI];"#).0, Verdict::MayNotTerminate);
        // without the end clause the block list would be flagged
        assert_eq!(verdict(r#"L -> X L[X.end, EOI] / X; X -> Raw;"#).0, Verdict::MayNotTerminate);
    }

    #[test]
    fn nonlinear_labels() {
        // unsatisfiable whatever the opaque product is
        assert_eq!(verdict("S -> Byte {k = 2} S[1, k * k * EOI - 1];").0, Verdict::Terminates);
        assert_eq!(verdict("S -> Byte {k = 2} S[0, k * EOI];").0, Verdict::Unknown);
    }

    #[test]
    fn cycle_limit_gives_unknown() {
        let r = check_termination_with(&prepare(r#"A -> B[1, EOI] / B[2, EOI] / "a"; B -> A[1, EOI] / A[2, EOI];"#).unwrap(), 3);
        assert!(r.cycle_limit_hit);
        assert_eq!(r.verdict, Verdict::Unknown);
    }

    #[test]
    fn deterministic() {
        let g = prepare(PINGPONG).unwrap();
        let (a, b) = (check_termination(&g), check_termination(&g));
        assert_eq!((a.verdict, a.cycles), (b.verdict, b.cycles));
    }
}
