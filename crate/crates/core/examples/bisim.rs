//! Strong bisimilarity by partition refinement, and stateless bisimilarity
//! decided directly and through the curried system.

use sosd::bisim::{coarsest_partition, stateless_bisim_direct, stateless_via_curry, strong_bisim, witness_classes};
use sosd::curry::{build_curried_lts, close_labels};
use sosd::linda::{linda_tss, LindaConfig};
use sosd::syntax::parse_spec;
use sosd::Bounds;

fn main() {
    let spec = parse_spec(include_str!("../specs/bccspd.sos")).unwrap();
    let closed = close_labels(&spec.tss()).unwrap();
    let b = Bounds::default();
    for (p, q) in [
        ("a.0 + a.0", "a.0"),
        ("check(d0,a.0) + check(d1,a.0)", "a.0"),
        ("update(d0,a.0)", "a.0"),
        ("a.(b.0 + 0)", "a.b.0"),
    ] {
        let (p, q) = (spec.parse_term(p).unwrap(), spec.parse_term(q).unwrap());
        println!("{p}  ~  {q}: {}", strong_bisim(&closed, &p, &q, b).unwrap());
    }

    let p = spec.parse_term("a.(b.0 + check(d0,b.0)) + a.b.0").unwrap();
    let q = spec.parse_term("a.b.0 + a.(check(d1,b.0) + b.0)").unwrap();
    let lts = build_curried_lts(&closed, &[p, q], b).unwrap();
    let part = coarsest_partition(&lts);
    println!("\n{} states in {} classes", lts.states.len(), part.classes().len());
    for class in witness_classes(&lts) {
        let names: Vec<String> = class.iter().map(|t| t.to_string()).collect();
        println!("  {}", names.join(" | "));
    }

    let linda = linda_tss(&LindaConfig::sets(&["u", "v"])).unwrap();
    let tss = linda.tss();
    println!();
    for (p, q) in [
        ("par(tell(u), tell(v))", "par(tell(v), tell(u))"),
        ("seq(tell(u), ask(u))", "tell(u)"),
        ("seq(nask(u), tell(u)) + seq(ask(u), tell(u))", "tell(u)"),
        ("ask(u)", "tell(u)"),
    ] {
        let (p, q) = (linda.parse_term(p).unwrap(), linda.parse_term(q).unwrap());
        let direct = stateless_bisim_direct(&tss, &p, &q, b).unwrap();
        assert_eq!(direct, stateless_via_curry(&tss, &p, &q, b).unwrap());
        println!("{p}  ~sl  {q}: {direct}");
    }
}
