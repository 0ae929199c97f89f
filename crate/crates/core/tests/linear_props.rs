use std::collections::BTreeMap;

use ipg_core::terminate::linear::{feasible, Feasibility, LinearForm, Rational, System};
use proptest::prelude::*;

const SYMS: [&str; 3] = ["x", "y", "z"];

type Coeffs = ([i64; 3], i64);

fn form((ks, c): &Coeffs) -> LinearForm {
    let mut f = LinearForm::constant(Rational::int(*c));
    for (s, k) in SYMS.iter().zip(ks) {
        f = f.add_scaled(&LinearForm::symbol(s), Rational::int(*k)).unwrap();
    }
    f
}

fn value((ks, c): &Coeffs, p: &[i64; 3]) -> i64 {
    c + ks.iter().zip(p).map(|(k, v)| k * v).sum::<i64>()
}

fn coeffs() -> impl Strategy<Value = Coeffs> {
    (prop::array::uniform3(-3i64..4), -6i64..7)
}

fn holds(sys: &System, at: &BTreeMap<String, Rational>) -> bool {
    sys.eqs.iter().all(|e| e.eval(at).unwrap().is_zero()) && sys.ges.iter().all(|g| g.eval(at).unwrap().signum() >= 0)
}

fn system(eqs: &[Coeffs], ges: &[Coeffs]) -> System {
    System {
        eqs: eqs.iter().map(form).collect(),
        ges: ges.iter().map(form).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    /// Constraints built to hold at a chosen point are always satisfiable.
    #[test]
    fn systems_with_a_planted_point_are_sat(
        p in prop::array::uniform3(-4i64..5),
        eqs in prop::collection::vec(coeffs(), 0..3),
        ges in prop::collection::vec((coeffs(), 0i64..3), 0..5),
    ) {
        let eqs: Vec<Coeffs> = eqs.into_iter().map(|(ks, c)| (ks, c - value(&(ks, c), &p))).collect();
        let ges: Vec<Coeffs> = ges.into_iter().map(|((ks, c), slack)| (ks, c - value(&(ks, c), &p) + slack)).collect();
        let sys = system(&eqs, &ges);
        match feasible(&sys).unwrap() {
            Feasibility::Sat(w) => prop_assert!(holds(&sys, &w)),
            Feasibility::Unsat => prop_assert!(false, "planted point {p:?} missed"),
        }
    }

    /// Random systems: witnesses check out, and no rational grid point
    /// satisfies a system reported unsat.
    #[test]
    fn verdicts_agree_with_grid_search(
        eqs in prop::collection::vec(coeffs(), 0..2),
        ges in prop::collection::vec(coeffs(), 1..6),
    ) {
        let sys = system(&eqs, &ges);
        match feasible(&sys).unwrap() {
            Feasibility::Sat(w) => prop_assert!(holds(&sys, &w)),
            Feasibility::Unsat => {
                for den in 1..=4i64 {
                    for x in -8..=8 {
                        for y in -8..=8 {
                            for z in -8..=8 {
                                let at: BTreeMap<String, Rational> = SYMS
                                    .iter()
                                    .zip([x, y, z])
                                    .map(|(s, n)| (s.to_string(), Rational::new(n.into(), den.into()).unwrap()))
                                    .collect();
                                prop_assert!(!holds(&sys, &at), "unsat but {at:?} works");
                            }
                        }
                    }
                }
            }
        }
    }
}
