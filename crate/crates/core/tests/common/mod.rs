//! Independent oracles: hand-written step functions for the store calculus
//! and for Linda, an explicit-state explorer, and a naive greatest-fixpoint
//! bisimulation check. None of these go through the rule engine.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use sosd::Term;

/// `(before, action, after, target)`.
pub type Step = (String, String, String, Term);

/// Direct semantics of `0`, prefixing, `+`, `check`, `update` and `merge`.
pub fn core_steps(t: &Term, carrier: &[&str]) -> BTreeSet<Step> {
    match t {
        Term::Prefix(a, body) => carrier
            .iter()
            .map(|d| (d.to_string(), a.to_string(), d.to_string(), body.as_ref().clone()))
            .collect(),
        Term::App(op, args) => match (&**op, &args[..]) {
            ("0", []) => BTreeSet::new(),
            ("+", [p, q]) => {
                let mut s = core_steps(p, carrier);
                s.extend(core_steps(q, carrier));
                s
            }
            ("check", [d, p]) => core_steps(p, carrier)
                .into_iter()
                .filter(|s| s.0 == d.head())
                .collect(),
            ("update", [d, p]) => core_steps(p, carrier)
                .into_iter()
                .map(|(b, a, _, t)| (b, a, d.head().to_string(), t))
                .collect(),
            ("merge", [p, q]) => {
                let mut out = BTreeSet::new();
                for (b, a, e, p1) in core_steps(p, carrier) {
                    out.insert((b, a, e, Term::app("merge", vec![p1, q.clone()])));
                }
                for (b, a, e, q1) in core_steps(q, carrier) {
                    out.insert((b, a, e, Term::app("merge", vec![p.clone(), q1])));
                }
                out
            }
            _ => panic!("no semantics for {t}"),
        },
        _ => panic!("no semantics for {t}"),
    }
}

fn set_name(alphabet: &[&str], store: u32) -> String {
    let items: Vec<&str> = alphabet
        .iter()
        .enumerate()
        .filter(|(i, _)| store & (1 << i) != 0)
        .map(|(_, u)| *u)
        .collect();
    format!("{{{}}}", items.join(","))
}

fn tuple_of<'a>(name: &'a str, op: &str) -> Option<&'a str> {
    name.strip_prefix(op)?.strip_prefix('(')?.strip_suffix(')')
}

/// Direct Linda semantics over set stores encoded as bitmasks.
pub fn linda_terminates(t: &Term) -> bool {
    match t {
        Term::App(op, args) => match (&**op, &args[..]) {
            ("eps", []) => true,
            ("+", [p, q]) => linda_terminates(p) || linda_terminates(q),
            ("seq", [p, q]) | ("par", [p, q]) => linda_terminates(p) && linda_terminates(q),
            _ => false,
        },
        _ => false,
    }
}

pub fn linda_tau(t: &Term, alphabet: &[&str], store: u32) -> BTreeSet<(u32, Term)> {
    let bit = |u: &str| 1u32 << alphabet.iter().position(|a| *a == u).expect("tuple in alphabet");
    let eps = || Term::constant("eps");
    let Term::App(op, args) = t else { panic!("no semantics for {t}") };
    let mut out = BTreeSet::new();
    match (&**op, &args[..]) {
        ("eps", []) | ("SINK", []) => {}
        ("+", [p, q]) => {
            out.extend(linda_tau(p, alphabet, store));
            out.extend(linda_tau(q, alphabet, store));
        }
        ("seq", [p, q]) => {
            for (s, p1) in linda_tau(p, alphabet, store) {
                out.insert((s, Term::app("seq", vec![p1, q.clone()])));
            }
            if linda_terminates(p) {
                out.extend(linda_tau(q, alphabet, store));
            }
        }
        ("par", [p, q]) => {
            for (s, p1) in linda_tau(p, alphabet, store) {
                out.insert((s, Term::app("par", vec![p1, q.clone()])));
            }
            for (s, q1) in linda_tau(q, alphabet, store) {
                out.insert((s, Term::app("par", vec![p.clone(), q1])));
            }
        }
        (name, []) => {
            if let Some(u) = tuple_of(name, "ask") {
                if store & bit(u) != 0 {
                    out.insert((store, eps()));
                }
            } else if let Some(u) = tuple_of(name, "nask") {
                if store & bit(u) == 0 {
                    out.insert((store, eps()));
                }
            } else if let Some(u) = tuple_of(name, "tell") {
                out.insert((store | bit(u), eps()));
            } else if let Some(u) = tuple_of(name, "get") {
                if store & bit(u) != 0 {
                    out.insert((store & !bit(u), eps()));
                }
            } else {
                panic!("no semantics for {t}");
            }
        }
        _ => panic!("no semantics for {t}"),
    }
    out
}

/// All curried steps of a Linda term, termination as `term` to `SINK`.
pub fn linda_steps(t: &Term, alphabet: &[&str]) -> BTreeSet<Step> {
    let mut out = BTreeSet::new();
    for store in 0..(1u32 << alphabet.len()) {
        let d = set_name(alphabet, store);
        if linda_terminates(t) {
            out.insert((d.clone(), "term".into(), d.clone(), Term::constant("SINK")));
        }
        for (s, t1) in linda_tau(t, alphabet, store) {
            out.insert((d.clone(), "tau".into(), set_name(alphabet, s), t1));
        }
    }
    out
}

/// An explicit transition graph with string labels.
pub struct Graph {
    pub index: BTreeMap<Term, usize>,
    pub edges: Vec<BTreeSet<(String, usize)>>,
}

pub fn explore_graph(roots: &[Term], succ: impl Fn(&Term) -> BTreeSet<Step>) -> Graph {
    let mut index = BTreeMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if !index.contains_key(r) {
            index.insert(r.clone(), states.len());
            states.push(r.clone());
            queue.push_back(r.clone());
        }
    }
    let mut edges: Vec<BTreeSet<(String, usize)>> = vec![BTreeSet::new(); states.len()];
    while let Some(t) = queue.pop_front() {
        let src = index[&t];
        for (b, a, e, target) in succ(&t) {
            let dst = *index.entry(target.clone()).or_insert_with(|| {
                states.push(target.clone());
                queue.push_back(target.clone());
                states.len() - 1
            });
            if edges.len() < states.len() {
                edges.resize(states.len(), BTreeSet::new());
            }
            edges[src].insert((format!("({b},{a},{e})"), dst));
        }
    }
    edges.resize(states.len(), BTreeSet::new());
    Graph { index, edges }
}

/// Greatest-fixpoint bisimilarity on all state pairs.
pub fn naive_bisimulation(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.edges.len();
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !rel[s][t] {
                    continue;
                }
                let follows = |x: usize, y: usize, rel: &Vec<Vec<bool>>| {
                    g.edges[x]
                        .iter()
                        .all(|(l, x1)| g.edges[y].iter().any(|(m, y1)| l == m && rel[*x1][*y1]))
                };
                if !(follows(s, t, &rel) && follows(t, s, &rel)) {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

pub fn naive_bisimilar(p: &Term, q: &Term, succ: impl Fn(&Term) -> BTreeSet<Step>) -> bool {
    let g = explore_graph(&[p.clone(), q.clone()], succ);
    let rel = naive_bisimulation(&g);
    rel[g.index[p]][g.index[q]]
}
