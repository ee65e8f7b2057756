//! One-step derivation with data and exploration of the reachable
//! transition system, exported as line-JSON and Graphviz.

use sosd::syntax::{export_lts, parse_spec, LtsFormat};
use sosd::term::sym;
use sosd::tss::{build_lts, step};
use sosd::Bounds;

const COUNTER: &str = "\
sorts P D
data { n0 n1 n2 }
labels { inc dec }
ops {
  C/0
}
pred succ/2 { (n0,n1) (n1,n2) }

rule up {
  ---
  (C, d) -inc-> (C, e)
  where succ(d,e)
}

rule down {
  ---
  (C, e) -dec-> (C, d)
  where succ(d,e)
}
";

fn main() {
    let spec = parse_spec(COUNTER).unwrap();
    let tss = spec.tss();
    let c = spec.parse_term("C").unwrap();
    for d in ["n0", "n1", "n2"] {
        let moves: Vec<String> = step(&tss, &c, &sym(d))
            .unwrap()
            .iter()
            .map(|t| format!("-{}-> ({}, {})", t.action, t.target, t.after))
            .collect();
        println!("(C, {d}) {}", moves.join("  "));
    }

    let lts = build_lts(&tss, &[c], Bounds::default()).unwrap();
    println!("\n{} states, {} edges", lts.states.len(), lts.edges.len());
    print!("{}", export_lts(&lts, LtsFormat::Jsonl));
    print!("{}", export_lts(&lts, LtsFormat::Dot));
}
