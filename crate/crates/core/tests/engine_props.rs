use ipg_core::ast::Grammar;
use ipg_core::check::{compute_def_sets, AltDepGraph};
use ipg_core::engine::blackbox::BlackboxRegistry;
use ipg_core::engine::{depth_bound, parse, upd_start_end, EngineOptions, Env, ParseOutcome, ParseTree};
use ipg_core::names::NtId;
use ipg_core::prepare;
use proptest::prelude::*;

const FIG1: &str = r#"S -> A[0, 2] B[EOI - 2, EOI]; A -> "aa"[0, 2]; B -> "bb"[0, 2];"#;
const FIG3: &str = r#"
    Int -> Int[0, EOI - 1] Digit[EOI - 1, EOI] {val = 2 * Int.val + Digit.val}
         / Digit[0, 1] {val = Digit.val};
    Digit -> "0"[0, 1] {val = 0} / "1"[0, 1] {val = 1};"#;
const FIG4: &str = r#"
    S -> "1"[0, 1] O[1, EOI] "stop"[O.end, EOI];
    O -> "0"[0, 1] O[1, EOI] / ""[0, 1];"#;
const ANBNCN: &str = r#"
    S -> {? EOI mod 3 == 0} {n = EOI / 3} A[0, n] B[n, 2 * n] C[2 * n, 3 * n];
    A -> "a"[0, 1] A[1, EOI] / "a"[0, 1];
    B -> "b"[0, 1] B[1, EOI] / "b"[0, 1];
    C -> "c"[0, 1] C[1, EOI] / "c"[0, 1];"#;
const ARRAYS: &str = r#"
    S -> Byte[0, 1] for i = 0 to Byte.val do E[1 + 2 * i, 3 + 2 * i]
         {k = exists j . E(j).v == 0 ? j : -1} Tail[E(Byte.val - 1).end, EOI];
    E -> UInt16LE[0, 2] {v = UInt16LE.val mod 4};
    Tail -> "a" Tail / "";"#;
const ORDERED: &str = r#"
    S -> B1[0, B2.a] {k = B1.end + B2.start} B2[a1, EOI] {a1 = 2} X[B1.a mod 3, EOI] Y[0, EOI];
    B1 -> Byte[0, 1] {a = Byte.val mod 5};
    B2 -> Byte[0, 1] {a = Byte.val mod 4};
    X -> "x" / Raw;
    Y -> Raw[0, 1];"#;

fn grammar(src: &str) -> Grammar {
    prepare(src).unwrap_or_else(|d| panic!("{d:?}"))
}

fn run(g: &Grammar, input: &[u8], opts: &EngineOptions) -> ParseOutcome {
    let start = g.start_name().unwrap().to_string();
    parse(input, g, &start, opts, &BlackboxRegistry::new()).unwrap()
}

fn no_memo() -> EngineOptions {
    EngineOptions {
        memo: false,
        ..EngineOptions::default()
    }
}

fn input_over(alphabet: &'static [u8], max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop::sample::select(alphabet), 0..max)
}

/// Children lie inside their parent's window. A node that touched nothing
/// keeps its initial start = eoi, end = 0 (shifted by the rebase).
fn windows_nest(t: &ParseTree, len: i64) -> bool {
    match t {
        ParseTree::Leaf(_) => true,
        ParseTree::Array(es) => es.iter().all(|e| windows_nest(e, len)),
        ParseTree::Node(n) => {
            if n.env.eoi > len || (n.env.start > n.env.end && n.env.start - n.env.end != n.env.eoi) {
                return false;
            }
            n.children.iter().all(|c| match c {
                ParseTree::Node(k) => k.env.start >= 0 && k.env.end <= n.env.eoi && windows_nest(c, n.env.eoi),
                other => windows_nest(other, n.env.eoi),
            })
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn memo_is_transparent(which in 0usize..5, input in input_over(b"01abcstop\x00\x02", 24)) {
        let g = grammar([FIG1, FIG3, FIG4, ANBNCN, ARRAYS][which]);
        let on = run(&g, &input, &EngineOptions::default());
        let off = run(&g, &input, &no_memo());
        prop_assert_eq!(on.tree, off.tree);
        prop_assert!(on.stats.invocations <= off.stats.invocations);
    }

    #[test]
    fn trees_nest_and_stay_within_depth_bound(which in 0usize..5, input in input_over(b"01abcstop\x00\x02", 24)) {
        let g = grammar([FIG1, FIG3, FIG4, ANBNCN, ARRAYS][which]);
        let out = run(&g, &input, &EngineOptions::default());
        prop_assert!(out.stats.max_depth <= depth_bound(&g, input.len()));
        if let Some(t) = &out.tree {
            prop_assert!(windows_nest(t, input.len() as i64));
            let root = t.as_node().unwrap();
            prop_assert_eq!(root.env.eoi, input.len() as i64);
        }
    }

    #[test]
    fn later_alternatives_do_not_change_earlier_successes(which in 0usize..3, input in input_over(b"abcstop01", 12)) {
        let src = [FIG1, FIG4, ANBNCN][which];
        // the start rule is the first one and nothing else refers to it
        let at = src.find(';').unwrap();
        let extended = format!("{} / Raw {{z = 7}}{}", &src[..at], &src[at..]);
        let a = run(&grammar(src), &input, &EngineOptions::default());
        let b = run(&grammar(&extended), &input, &EngineOptions::default());
        if a.tree.is_some() {
            prop_assert_eq!(a.tree, b.tree);
        } else {
            prop_assert!(b.tree.is_some());
        }
    }

    #[test]
    fn any_topological_order_gives_the_same_outcome(
        keys in prop::collection::vec(any::<u32>(), 6),
        input in prop::collection::vec(any::<u8>(), 0..8),
    ) {
        let g = grammar(ORDERED);
        let defs = compute_def_sets(&g);
        let alt = &g.rules[0].alternatives[0];
        let dg = AltDepGraph::build(&g, &defs, NtId::Global(0), alt);
        // Kahn's algorithm with random priorities
        let n = alt.terms.len();
        let mut done = vec![false; n];
        let mut order = Vec::new();
        while order.len() < n {
            let next = (0..n)
                .filter(|&t| !done[t] && dg.edges[t].iter().all(|&k| done[k]))
                .min_by_key(|&t| keys[t])
                .unwrap();
            done[next] = true;
            order.push(next);
        }
        let mut shuffled = g.clone();
        shuffled.rules[0].alternatives[0].eval_order = Some(order);
        let a = run(&g, &input, &EngineOptions::default());
        let b = run(&shuffled, &input, &EngineOptions::default());
        prop_assert_eq!(a.tree, b.tree);
    }

    #[test]
    fn start_end_updates_commute(
        ups in prop::collection::vec((0i64..50, 0i64..50, any::<bool>()), 0..6),
        rot in 0usize..6,
    ) {
        let apply = |ups: &[(i64, i64, bool)]| {
            ups.iter().fold(Env::fresh(50), |e, &(l, r, t)| upd_start_end(e, l.min(r), l.max(r), t))
        };
        let mut rotated = ups.clone();
        if !rotated.is_empty() {
            let k = rot % rotated.len();
            rotated.rotate_left(k);
        }
        prop_assert_eq!(apply(&ups), apply(&rotated));
        // start never grows and end never shrinks along the way
        let mut e = Env::fresh(50);
        for &(l, r, t) in &ups {
            let next = upd_start_end(e.clone(), l.min(r), l.max(r), t);
            prop_assert!(next.start <= e.start && next.end >= e.end);
            e = next;
        }
    }
}

#[test]
fn ordered_grammar_really_reorders() {
    let g = grammar(ORDERED);
    assert_ne!(g.rules[0].alternatives[0].order(), (0..6).collect::<Vec<_>>());
    assert!(run(&g, &[9, 1, 2, 3], &EngineOptions::default()).tree.is_some());
}
