//! Head normal forms of store-calculus terms and a ground decision
//! procedure built on them.

use sosd::axioms::{axioms_ebccspd, bccspd, height, normalize_hnf_traced, prove_equal, CcVariant};

fn main() {
    let spec = bccspd(&["d0", "d1"], &["a", "b"]);
    println!("axioms:");
    for eq in axioms_ebccspd(&spec.sig, CcVariant::Corrected).iter().take(12) {
        println!("  {eq}");
    }
    println!("  ...\n");

    let p = spec.parse_term("check(d0, update(d1, a.0 + check(d1, b.0)))").unwrap();
    let (h, trace) = normalize_hnf_traced(&spec.sig, &p).unwrap();
    for (i, s) in trace.iter().enumerate() {
        println!("{:3}. {s}", i + 1);
    }
    println!("{p}\n  = {h}   ({} summands, height {})\n", h.len(), height(&h.to_term()).unwrap());

    for (l, r) in [
        ("check(d0, check(d0, a.0))", "check(d0, a.0)"),
        ("update(d0, update(d1, a.0))", "update(d0, a.0)"),
        ("check(d0, a.0) + check(d1, a.0)", "a.0"),
        ("check(d0, update(d1, a.0))", "update(d1, check(d0, a.0))"),
        ("check(d0, a.0)", "check(d1, a.0)"),
    ] {
        let proof = prove_equal(&spec.sig, &spec.parse_term(l).unwrap(), &spec.parse_term(r).unwrap()).unwrap();
        println!("{l} = {r}: {}", proof.equal);
    }
}
