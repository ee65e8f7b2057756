//! The commutativity format: every rule for a binary operator needs a
//! mirror rule with swapped arguments.

use sosd::bisim::StrongOracle;
use sosd::formats::check_comm_form;
use sosd::linda::{linda_tss, LindaConfig};
use sosd::term::sym;
use sosd::{Bounds, Term};

fn main() {
    let spec = linda_tss(&LindaConfig::sets(&["u"])).unwrap();
    let tss = spec.tss();
    for ops in [vec![sym("+"), sym("par")], vec![sym("seq")]] {
        let report = check_comm_form(&tss, &ops).unwrap();
        print!("{report}");
        println!("missing mirrors: {:?}\n", report.missing_mirrors());
    }

    let oracle = StrongOracle::from_curried(&tss, Bounds::default()).unwrap();
    let (p, q) = (spec.parse_term("tell(u)").unwrap(), spec.parse_term("get(u)").unwrap());
    for op in ["par", "seq"] {
        let l = Term::app(op, vec![p.clone(), q.clone()]);
        let r = Term::app(op, vec![q.clone(), p.clone()]);
        println!("{l} ~ {r}: {}", oracle.equivalent(&l, &r).unwrap());
    }
}
