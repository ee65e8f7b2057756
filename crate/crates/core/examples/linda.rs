//! The Linda coordination language: regression of its algebraic laws
//! under stateless bisimilarity, over sets and bounded multisets.

use sosd::linda::{linda_regression_suite, LindaConfig, SuiteOptions};

fn main() {
    let sets = LindaConfig::sets(&["u", "v"]);
    println!("stores: {}", sets.carrier().join(" "));
    let report = linda_regression_suite(&sets, &SuiteOptions { samples: 30, seed: 1, ..SuiteOptions::default() }).unwrap();
    println!("{report}");

    let bags = LindaConfig { alphabet: vec!["u".into()], multiset_cap: Some(2) };
    println!("stores: {}", bags.carrier().join(" "));
    let report = linda_regression_suite(&bags, &SuiteOptions { samples: 30, seed: 1, ..SuiteOptions::default() }).unwrap();
    println!("{report}");
    println!("{}", serde_json::to_string(&report.rows[0]).unwrap());
}
