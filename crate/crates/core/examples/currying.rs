//! Currying a specification with data: the store moves into the labels,
//! label variables are closed over the carrier, and the two step relations
//! coincide.

use std::collections::BTreeSet;

use sosd::curry::{close_labels, curried_step, curry};
use sosd::linda::{linda_tss, LindaConfig};
use sosd::syntax::print_closed_rules;
use sosd::term::sym;
use sosd::tss::step;

fn main() {
    let cfg = LindaConfig::sets(&["u"]);
    let spec = linda_tss(&cfg).unwrap();
    let tss = spec.tss();

    let curried = spec.curried();
    let r5 = curried.rules.iter().find(|r| &*r.name == "r5_u").unwrap();
    let mut text = String::new();
    sosd::syntax::write_rule(&mut text, r5).unwrap();
    println!("{text}");

    let closed = close_labels(&curry(&tss)).unwrap();
    println!("{} rules close to {} instances", tss.rules.len(), closed.rules.len());
    let listing = print_closed_rules(&spec, &closed);
    for block in listing.split("\n\n").filter(|b| b.contains("r5_u")) {
        println!("{block}\n");
    }

    let p = spec.parse_term("par(get(u), seq(tell(u), eps))").unwrap();
    let mut direct = BTreeSet::new();
    for d in cfg.carrier() {
        for t in step(&tss, &p, &sym(&d)).unwrap() {
            direct.insert(format!("({d},{},{}) {}", t.action, t.after, t.target));
        }
    }
    let via_labels: BTreeSet<String> = curried_step(&closed, &p)
        .unwrap()
        .into_iter()
        .map(|(l, t)| format!("{l} {t}"))
        .collect();
    for line in &direct {
        println!("{p} -{line}");
    }
    assert_eq!(direct, via_labels);
    println!("with-data and curried steps agree");
}
