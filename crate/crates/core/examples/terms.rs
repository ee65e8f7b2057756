//! Signatures, closed terms, substitution and linear matching.

use sosd::term::{match_term, sym};
use sosd::{Signature, Sort, Subst, Term};

fn main() {
    let mut sig = Signature::new();
    for d in ["d0", "d1"] {
        sig.add_data(d).unwrap();
    }
    sig.add_label("a").unwrap();
    sig.add_op("0", vec![]).unwrap();
    sig.add_op("+", vec![Sort::Process, Sort::Process]).unwrap();
    sig.add_op("check", vec![Sort::Data, Sort::Process]).unwrap();

    let p = Term::sum(
        Term::prefix("a", Term::nil()),
        Term::app("check", vec![Term::data("d1"), Term::prefix("a", Term::prefix("a", Term::nil()))]),
    );
    println!("p        = {p}");
    println!("sort     = {:?}, size {}, depth {}", sig.sort_check(&p).unwrap(), p.size(), p.depth());

    // x + check(e, y) matches p, binding a process and a data variable
    let pattern = Term::sum(
        Term::pvar("x"),
        Term::app("check", vec![Term::dvar("e"), Term::pvar("y")]),
    );
    let s = match_term(&pattern, &p).unwrap().expect("pattern matches");
    for (v, t) in s.iter() {
        println!("  {v} ↦ {t}");
    }
    assert_eq!(s.apply(&pattern).unwrap(), p);

    let mut swap = Subst::new();
    swap.insert(sym("x"), Term::prefix("a", Term::nil()));
    swap.insert(sym("y"), Term::nil());
    swap.insert(sym("e"), Term::data("d0"));
    println!("instance = {}", swap.apply(&pattern).unwrap());

    let no = match_term(&pattern, &Term::prefix("a", Term::nil())).unwrap();
    println!("a.0 matches x + check(e,y): {}", no.is_some());
}
