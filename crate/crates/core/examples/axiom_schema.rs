//! Axiom schemas for a GSOS operator added on top of the store calculus.

use sosd::axioms::{
    bccspd, bccspd_with_merge, check_disjoint_extension, gsos_axiom_instance, gsos_axiom_instance_with,
    normalize_extended, WitnessChoice,
};
use sosd::bisim::StrongOracle;
use sosd::curry::close_labels;
use sosd::Bounds;

fn main() {
    let carrier = ["d0", "d1"];
    let spec = bccspd_with_merge(&carrier, &["a"]);
    let closed = close_labels(&spec.tss()).unwrap();
    check_disjoint_extension(&bccspd(&carrier, &["a"]).tss(), &spec.tss()).unwrap();

    let p = spec.parse_term("update(d1, check(d0, a.0))").unwrap();
    let q = spec.parse_term("update(d0, check(d1, a.a.0)) + update(d0, check(d1, a.0))").unwrap();
    let eq = gsos_axiom_instance("merge", &[p.clone(), q.clone()], &closed).unwrap();
    println!("{eq}\n");

    let oracle = StrongOracle::new(closed.clone(), Bounds::default());
    println!("sound: {}", oracle.equivalent(&eq.lhs, &eq.rhs).unwrap());

    let t = spec.parse_term("merge(a.0, check(d1, a.0))").unwrap();
    let (h, trace) = normalize_extended(&closed, &t).unwrap();
    for (i, s) in trace.iter().enumerate() {
        println!("{:3}. {s}", i + 1);
    }
    println!("{t} = {h}");

    println!("bisimilar: {}\n", oracle.equivalent(&t, &h.to_term()).unwrap());

    // two a-summands under the same data: every witness contributes a summand
    let q = spec.parse_term("update(d0, check(d0, a.0)) + update(d0, check(d0, a.a.0))").unwrap();
    let zero = spec.parse_term("0").unwrap();
    for choice in [WitnessChoice::All, WitnessChoice::First] {
        let eq = gsos_axiom_instance_with("merge", &[zero.clone(), q.clone()], &closed, choice).unwrap();
        println!("{choice:?}: {} summands, sound: {}", eq.rhs.summands().len(), oracle.equivalent(&eq.lhs, &eq.rhs).unwrap());
    }
}
