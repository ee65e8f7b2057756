//! The `.sos` spec-file language: parsing, located errors and the
//! canonical printer.

use sosd::syntax::parse_spec;

const SRC: &str = "
sorts P D
data { lo hi }
labels { flip }

ops { T/0  G/1 P }
pred other/2 { (lo,hi) (hi,lo) }

rule toggle {
  ---
  (T, d) -flip-> (T, e)
  where other(d,e)
}
rule guard { (x, hi) -flip-> (x1, e) --- (G(x), hi) -flip-> (G(x1), e) }

def p = G(T)
";

fn main() {
    let spec = parse_spec(SRC).unwrap();
    println!("flavor {:?}, valid: {}", spec.flavor(), spec.validate().is_ok());
    let canonical = spec.to_string();
    print!("{canonical}");
    assert_eq!(parse_spec(&canonical).unwrap(), spec);

    println!("\ncurried:");
    print!("{}", spec.curried());

    for bad in [
        "sorts P D\ndata { lo }\nlabels { flip }\nops { T/0 }\nrule r { --- (T, lo) -flop-> (T, lo) }\n",
        "sorts P D\ndata { lo }\nlabels { flip }\nops { T/0 }\ndef p = T(T)\n",
        "sorts P D\ndata { lo }\nlabels { flip\n",
    ] {
        println!("error at {}", parse_spec(bad).unwrap_err());
    }
}
