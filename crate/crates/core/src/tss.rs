//! Rules with data, positive GSOS validation, one-step derivation and
//! bounded LTS exploration.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::term::{match_into, sym, Signature, Sort, Subst, Symbol, Term, TermError, TERMINATION};

/// Whether a rule carries data in configurations or in triple labels.
///
/// Both flavors share one representation: currying only re-brackets
/// `(t, d) -l-> (t', d')` into `t -(d,l,d')-> t'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    WithData,
    Curried,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Premise {
    pub source: Term,
    pub before: Term,
    pub action: Symbol,
    pub target: Term,
    pub after: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Conclusion {
    pub source: Term,
    pub before: Term,
    pub action: Symbol,
    pub target: Term,
    pub after: Term,
}

/// Side condition `pred(d1, ..., dn)` decided by the predicate's table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Condition {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: Symbol,
    pub flavor: Flavor,
    pub premises: Vec<Premise>,
    pub conclusion: Conclusion,
    pub conditions: Vec<Condition>,
}

impl Rule {
    /// All data variables of the rule, in first-occurrence order.
    pub fn data_vars(&self) -> Vec<Symbol> {
        let mut seen = Vec::new();
        let mut push = |t: &Term| {
            for (n, s) in t.var_occurrences() {
                if s == Sort::Data && !seen.contains(&n) {
                    seen.push(n);
                }
            }
        };
        push(&self.conclusion.source);
        push(&self.conclusion.before);
        for p in &self.premises {
            push(&p.before);
            push(&p.after);
        }
        for c in &self.conditions {
            c.args.iter().for_each(&mut push);
        }
        push(&self.conclusion.after);
        push(&self.conclusion.target);
        seen
    }

    /// Key of the operator this rule defines.
    pub fn defines(&self) -> HeadKey {
        HeadKey::of(&self.conclusion.source)
    }

    /// The argument variables `x1..xn` of the conclusion source (process sort only).
    pub fn source_process_vars(&self) -> Vec<Symbol> {
        self.conclusion
            .source
            .children()
            .iter()
            .filter_map(|c| match c {
                Term::Var(n, Sort::Process) => Some(n.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Identifies the operator at the root of a process term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadKey {
    Op(Symbol),
    Prefix(Symbol),
    Other,
}

impl HeadKey {
    pub fn of(t: &Term) -> HeadKey {
        match t {
            Term::App(f, _) => HeadKey::Op(f.clone()),
            Term::Prefix(a, _) => HeadKey::Prefix(a.clone()),
            _ => HeadKey::Other,
        }
    }
}

impl fmt::Display for HeadKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadKey::Op(n) => f.write_str(n),
            HeadKey::Prefix(a) => write!(f, "{a}._"),
            HeadKey::Other => f.write_str("?"),
        }
    }
}

/// A transition system specification over a signature.
#[derive(Clone, Debug)]
pub struct Tss {
    pub sig: Arc<Signature>,
    pub rules: Vec<Rule>,
    by_head: HashMap<HeadKey, Vec<usize>>,
}

impl Tss {
    pub fn new(sig: Arc<Signature>, rules: Vec<Rule>) -> Tss {
        let mut by_head: HashMap<HeadKey, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_head.entry(r.defines()).or_default().push(i);
        }
        Tss { sig, rules, by_head }
    }

    pub fn rules_for(&self, t: &Term) -> impl Iterator<Item = &Rule> {
        self.by_head
            .get(&HeadKey::of(t))
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    pub fn rules_defining<'a>(&'a self, key: &HeadKey) -> impl Iterator<Item = &'a Rule> + 'a {
        self.by_head
            .get(key)
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    /// The common flavor of all rules, or `None` when empty or mixed.
    pub fn flavor(&self) -> Option<Flavor> {
        let mut it = self.rules.iter().map(|r| r.flavor);
        let first = it.next()?;
        it.all(|f| f == first).then_some(first)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule, self.reason)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &Rule, reason: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.name.to_string(),
            reason: reason.into(),
        });
    }
}

/// Checks every rule against the positive GSOS with data shape.
pub fn validate_gsos_with_data(rules: &[Rule], sig: &Signature) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Some(first) = rules.first() {
        if let Some(other) = rules.iter().find(|r| r.flavor != first.flavor) {
            report.push(other, "rules mix with-data and curried flavors");
        }
    }
    let mut names = HashSet::new();
    for rule in rules {
        if !names.insert(rule.name.clone()) {
            report.push(rule, "duplicate rule name");
        }
        validate_rule(rule, sig, &mut report);
    }
    report
}

fn validate_rule(rule: &Rule, sig: &Signature, report: &mut ValidationReport) {
    let c = &rule.conclusion;

    let mut sort_errors = Vec::new();
    let mut expect = |t: &Term, want: Sort, what: &str| match sig.sort_check(t) {
        Ok(s) if s == want => {}
        Ok(s) => sort_errors.push(format!("{what} `{t}` has sort {s}, expected {want}")),
        Err(e) => sort_errors.push(format!("{what}: {e}")),
    };
    expect(&c.source, Sort::Process, "conclusion source");
    expect(&c.target, Sort::Process, "conclusion target");
    expect(&c.before, Sort::Data, "conclusion source data");
    expect(&c.after, Sort::Data, "conclusion target data");
    for p in &rule.premises {
        expect(&p.source, Sort::Process, "premise source");
        expect(&p.target, Sort::Process, "premise target");
        expect(&p.before, Sort::Data, "premise source data");
        expect(&p.after, Sort::Data, "premise target data");
    }
    for cond in &rule.conditions {
        for a in &cond.args {
            expect(a, Sort::Data, "side-condition argument");
        }
    }
    for e in sort_errors {
        report.push(rule, e);
    }

    let labels = std::iter::once(&c.action).chain(rule.premises.iter().map(|p| &p.action));
    for l in labels {
        if !sig.has_label(l) {
            report.push(rule, format!("unknown label `{l}`"));
        }
    }
    for cond in &rule.conditions {
        match sig.predicate(&cond.pred) {
            None => report.push(rule, format!("unknown predicate `{}`", cond.pred)),
            Some(p) if p.arity != cond.args.len() => report.push(
                rule,
                format!("predicate `{}` expects {} arguments", cond.pred, p.arity),
            ),
            _ => {}
        }
    }

    let mut args: Vec<Symbol> = Vec::new();
    let source_ok = match &c.source {
        Term::App(_, xs) => xs.iter().all(|x| match x {
            Term::Var(n, Sort::Process) => {
                let fresh = !args.contains(n);
                args.push(n.clone());
                fresh
            }
            Term::Var(_, Sort::Data) | Term::Data(_) => true,
            _ => false,
        }),
        Term::Prefix(_, body) => match body.as_ref() {
            Term::Var(n, Sort::Process) => {
                args.push(n.clone());
                true
            }
            _ => false,
        },
        _ => false,
    };
    if !source_ok {
        report.push(
            rule,
            "conclusion source is not an operator applied to distinct variables",
        );
    }

    let mut targets: Vec<Symbol> = Vec::new();
    for p in &rule.premises {
        match &p.source {
            Term::Var(n, Sort::Process) if args.contains(n) => {}
            _ => report.push(rule, format!("premise tests non-argument `{}`", p.source)),
        }
        match &p.target {
            Term::Var(n, Sort::Process) => {
                if args.contains(n) {
                    report.push(rule, format!("target variable `{n}` clashes with an argument"));
                } else if targets.contains(n) {
                    report.push(rule, format!("duplicate target variable `{n}`"));
                } else {
                    targets.push(n.clone());
                }
            }
            other => report.push(rule, format!("premise target `{other}` is not a variable")),
        }
    }

    for (n, s) in c.target.var_occurrences() {
        if s == Sort::Process && !args.contains(&n) && !targets.contains(&n) {
            report.push(rule, format!("conclusion target uses unbound variable `{n}`"));
        }
    }
}

/// Errors raised while deriving transitions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("data constant `{0}` is outside the carrier")]
    Domain(Symbol),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// One derived transition `(p, d) -action-> (target, after)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub action: Symbol,
    pub after: Symbol,
    pub target: Term,
}

/// Derives one-step transitions of a with-data system, memoizing subterm results.
pub struct Stepper<'a> {
    tss: &'a Tss,
    cache: HashMap<(Term, Symbol), Arc<Vec<Transition>>>,
}

impl<'a> Stepper<'a> {
    pub fn new(tss: &'a Tss) -> Self {
        Stepper {
            tss,
            cache: HashMap::new(),
        }
    }

    /// All transitions `(p, d) -l-> (p', d')`, canonically ordered.
    pub fn step(&mut self, p: &Term, d: &Symbol) -> Result<Arc<Vec<Transition>>, StepError> {
        if !self.tss.sig.has_data(d) {
            return Err(StepError::Domain(d.clone()));
        }
        let key = (p.clone(), d.clone());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let mut out = BTreeSet::new();
        let tss = self.tss;
        for rule in tss.rules_for(p) {
            let mut s = Subst::new();
            if !match_into(&mut s, &rule.conclusion.source, p)
                || !match_into(&mut s, &rule.conclusion.before, &Term::Data(d.clone()))
            {
                continue;
            }
            self.premises(rule, 0, s, &mut out)?;
        }
        let result = Arc::new(out.into_iter().collect::<Vec<_>>());
        self.cache.insert(key, result.clone());
        Ok(result)
    }

    fn premises(
        &mut self,
        rule: &Rule,
        idx: usize,
        s: Subst,
        out: &mut BTreeSet<Transition>,
    ) -> Result<(), StepError> {
        let Some(prem) = rule.premises.get(idx) else {
            return self.finish(rule, s, out);
        };
        let source = s.apply(&prem.source)?;
        for (s, before) in bind_data(&self.tss.sig, s, &prem.before) {
            for t in self.step(&source, &before)?.iter() {
                if t.action != prem.action {
                    continue;
                }
                let mut s2 = s.clone();
                if match_into(&mut s2, &prem.target, &t.target)
                    && match_into(&mut s2, &prem.after, &Term::Data(t.after.clone()))
                {
                    self.premises(rule, idx + 1, s2, out)?;
                }
            }
        }
        Ok(())
    }

    fn finish(&self, rule: &Rule, s: Subst, out: &mut BTreeSet<Transition>) -> Result<(), StepError> {
        let sig = &self.tss.sig;
        let free: Vec<Symbol> = rule
            .data_vars()
            .into_iter()
            .filter(|v| !s.contains(v))
            .collect();
        for s in data_assignments(sig, s, &free) {
            if !conditions_hold(sig, &rule.conditions, &s)? {
                continue;
            }
            let after = match s.apply(&rule.conclusion.after)? {
                Term::Data(d) => d,
                other => return Err(TermError::Open(sym(other.head())).into()),
            };
            let target = s.apply(&rule.conclusion.target)?;
            out.insert(Transition {
                action: rule.conclusion.action.clone(),
                after,
                target,
            });
        }
        Ok(())
    }
}

/// Instantiates a data term: a bound term yields one value, an unbound
/// variable yields one binding per carrier constant.
fn bind_data(sig: &Signature, s: Subst, t: &Term) -> Vec<(Subst, Symbol)> {
    match t {
        Term::Data(d) => vec![(s, d.clone())],
        Term::Var(n, _) => match s.get(n) {
            Some(Term::Data(d)) => {
                let d = d.clone();
                vec![(s, d)]
            }
            Some(_) => Vec::new(),
            None => sig
                .data_constants()
                .iter()
                .map(|d| {
                    let mut s2 = s.clone();
                    s2.insert(n.clone(), Term::Data(d.clone()));
                    (s2, d.clone())
                })
                .collect(),
        },
        _ => Vec::new(),
    }
}

/// Every extension of `s` binding `vars` to carrier constants, in carrier order.
pub(crate) fn data_assignments(sig: &Signature, s: Subst, vars: &[Symbol]) -> Vec<Subst> {
    let mut acc = vec![s];
    for v in vars {
        acc = acc
            .into_iter()
            .flat_map(|s| {
                sig.data_constants().iter().map(move |d| {
                    let mut s2 = s.clone();
                    s2.insert(v.clone(), Term::Data(d.clone()));
                    s2
                })
            })
            .collect();
    }
    acc
}

pub(crate) fn conditions_hold(
    sig: &Signature,
    conds: &[Condition],
    s: &Subst,
) -> Result<bool, StepError> {
    for c in conds {
        let Some(pred) = sig.predicate(&c.pred) else {
            return Ok(false);
        };
        let mut row = Vec::with_capacity(c.args.len());
        for a in &c.args {
            match s.apply(a)? {
                Term::Data(d) => row.push(d),
                other => return Err(TermError::Open(sym(other.head())).into()),
            }
        }
        if !pred.holds(&row) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience wrapper: one-step transitions of `p` under store `d`.
pub fn step(tss: &Tss, p: &Term, d: &Symbol) -> Result<Vec<Transition>, StepError> {
    Ok(Stepper::new(tss).step(p, d)?.as_ref().clone())
}

/// A transition label `(before, action, after)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurriedLabel {
    pub before: Symbol,
    pub action: Symbol,
    pub after: Symbol,
}

impl CurriedLabel {
    pub fn new(before: &str, action: &str, after: &str) -> Self {
        CurriedLabel {
            before: sym(before),
            action: sym(action),
            after: sym(after),
        }
    }

    pub fn is_termination(&self) -> bool {
        &*self.action == TERMINATION
    }
}

impl fmt::Display for CurriedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.before, self.action, self.after)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_edges: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 100_000,
            max_edges: 1_000_000,
        }
    }
}

impl Bounds {
    pub fn with_max_states(max_states: usize) -> Self {
        Bounds {
            max_states,
            ..Bounds::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub label: CurriedLabel,
    pub dst: usize,
}

/// A finite explored transition graph with canonically sorted states and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<Term>,
    pub edges: Vec<Edge>,
    pub roots: Vec<usize>,
    pub truncated: bool,
}

impl Lts {
    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.states.binary_search(t).ok()
    }

    pub fn outgoing(&self, state: usize) -> &[Edge] {
        let lo = self.edges.partition_point(|e| e.src < state);
        let hi = self.edges.partition_point(|e| e.src <= state);
        &self.edges[lo..hi]
    }
}

/// Breadth-first exploration from `roots` using an arbitrary successor function.
pub fn explore<E>(
    roots: &[Term],
    bounds: Bounds,
    mut successors: impl FnMut(&Term) -> Result<Vec<(CurriedLabel, Term)>, E>,
) -> Result<Lts, E> {
    let mut ids: HashMap<Term, usize> = HashMap::new();
    let mut order: Vec<Term> = Vec::new();
    let mut raw_edges: Vec<(usize, CurriedLabel, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;

    for r in roots {
        if !ids.contains_key(r) {
            if order.len() >= bounds.max_states {
                truncated = true;
                break;
            }
            ids.insert(r.clone(), order.len());
            order.push(r.clone());
            queue.push_back(r.clone());
        }
    }

    'bfs: while let Some(p) = queue.pop_front() {
        let src = ids[&p];
        for (label, q) in successors(&p)? {
            let dst = match ids.get(&q) {
                Some(&i) => i,
                None => {
                    if order.len() >= bounds.max_states {
                        truncated = true;
                        break 'bfs;
                    }
                    let i = order.len();
                    ids.insert(q.clone(), i);
                    order.push(q.clone());
                    queue.push_back(q);
                    i
                }
            };
            if raw_edges.len() >= bounds.max_edges {
                truncated = true;
                break 'bfs;
            }
            raw_edges.push((src, label, dst));
        }
    }

    let mut sorted: Vec<(Term, usize)> = order.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    sorted.sort();
    let mut remap = vec![0; sorted.len()];
    for (new, (_, old)) in sorted.iter().enumerate() {
        remap[*old] = new;
    }
    let states: Vec<Term> = sorted.into_iter().map(|(t, _)| t).collect();
    let mut edges: Vec<Edge> = raw_edges
        .into_iter()
        .map(|(s, label, d)| Edge {
            src: remap[s],
            label,
            dst: remap[d],
        })
        .collect();
    edges.sort();
    edges.dedup();
    let mut root_ids: Vec<usize> = roots
        .iter()
        .filter_map(|r| ids.get(r).map(|&i| remap[i]))
        .collect();
    root_ids.dedup();
    Ok(Lts {
        states,
        edges,
        roots: root_ids,
        truncated,
    })
}

/// Explores a with-data system: every state is stepped under every carrier constant.
pub fn build_lts(tss: &Tss, roots: &[Term], bounds: Bounds) -> Result<Lts, StepError> {
    let mut stepper = Stepper::new(tss);
    let carrier = tss.sig.data_constants().to_vec();
    explore(roots, bounds, |p| {
        let mut out = Vec::new();
        for d in &carrier {
            for t in stepper.step(p, d)?.iter() {
                out.push((
                    CurriedLabel {
                        before: d.clone(),
                        action: t.action.clone(),
                        after: t.after.clone(),
                    },
                    t.target.clone(),
                ));
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix_sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_data("d0").unwrap();
        sig.add_data("d1").unwrap();
        sig.add_label("a").unwrap();
        sig.add_op("0", vec![]).unwrap();
        sig.add_op("+", vec![Sort::Process, Sort::Process]).unwrap();
        sig
    }

    fn prefix_rule() -> Rule {
        Rule {
            name: sym("pre_a"),
            flavor: Flavor::WithData,
            premises: vec![],
            conclusion: Conclusion {
                source: Term::prefix("a", Term::pvar("x")),
                before: Term::dvar("d"),
                action: sym("a"),
                target: Term::pvar("x"),
                after: Term::dvar("d"),
            },
            conditions: vec![],
        }
    }

    fn choice_left() -> Rule {
        Rule {
            name: sym("plus_l"),
            flavor: Flavor::WithData,
            premises: vec![Premise {
                source: Term::pvar("x"),
                before: Term::dvar("d"),
                action: sym("a"),
                target: Term::pvar("x1"),
                after: Term::dvar("e"),
            }],
            conclusion: Conclusion {
                source: Term::sum(Term::pvar("x"), Term::pvar("y")),
                before: Term::dvar("d"),
                action: sym("a"),
                target: Term::pvar("x1"),
                after: Term::dvar("e"),
            },
            conditions: vec![],
        }
    }

    #[test]
    fn premise_on_target_variable_is_rejected() {
        let mut r = choice_left();
        r.premises.push(Premise {
            source: Term::pvar("x1"),
            before: Term::dvar("e"),
            action: sym("a"),
            target: Term::pvar("x2"),
            after: Term::dvar("e"),
        });
        let report = validate_gsos_with_data(&[r], &prefix_sig());
        assert!(report.violations.iter().any(|v| v.reason.contains("premise tests non-argument")));
    }

    #[test]
    fn duplicate_target_is_rejected() {
        let mut r = choice_left();
        let mut p2 = r.premises[0].clone();
        p2.source = Term::pvar("y");
        r.premises.push(p2);
        let report = validate_gsos_with_data(&[r], &prefix_sig());
        assert!(report.violations.iter().any(|v| v.reason.contains("duplicate target variable")));
    }

    #[test]
    fn valid_rules_pass() {
        let report = validate_gsos_with_data(&[prefix_rule(), choice_left()], &prefix_sig());
        assert!(report.is_ok(), "{:?}", report);
    }

    #[test]
    fn step_outside_carrier_is_domain_error() {
        let tss = Tss::new(Arc::new(prefix_sig()), vec![prefix_rule()]);
        assert_eq!(
            step(&tss, &Term::nil(), &sym("d7")),
            Err(StepError::Domain(sym("d7")))
        );
    }

    #[test]
    fn lts_of_nil_and_prefix() {
        let tss = Tss::new(Arc::new(prefix_sig()), vec![prefix_rule(), choice_left()]);
        let lts = build_lts(&tss, &[Term::nil()], Bounds::default()).unwrap();
        assert_eq!(lts.states.len(), 1);
        assert!(lts.edges.is_empty());

        let a0 = Term::prefix("a", Term::nil());
        let lts = build_lts(&tss, std::slice::from_ref(&a0), Bounds::default()).unwrap();
        assert_eq!(lts.states, vec![Term::nil(), a0]);
        let labels: Vec<String> = lts.edges.iter().map(|e| e.label.to_string()).collect();
        assert_eq!(labels, ["(d0,a,d0)", "(d1,a,d1)"]);
        assert!(lts.edges.iter().all(|e| e.src == 1 && e.dst == 0));
        assert!(!lts.truncated);
    }

    #[test]
    fn truncation_is_flagged() {
        let tss = Tss::new(Arc::new(prefix_sig()), vec![prefix_rule()]);
        let t = Term::prefix("a", Term::prefix("a", Term::nil()));
        let lts = build_lts(&tss, &[t], Bounds::with_max_states(2)).unwrap();
        assert!(lts.truncated);
        assert_eq!(lts.states.len(), 2);
        assert!(lts.edges.iter().all(|e| e.src < 2 && e.dst < 2));
    }

    #[test]
    fn premise_order_does_not_matter() {
        // two premises on different arguments, evaluated in either order
        let mut sig = prefix_sig();
        sig.add_op("both", vec![Sort::Process, Sort::Process]).unwrap();
        let prem = |x: &str, y: &str| Premise {
            source: Term::pvar(x),
            before: Term::dvar("d"),
            action: sym("a"),
            target: Term::pvar(y),
            after: Term::dvar("d"),
        };
        let rule = Rule {
            name: sym("both"),
            flavor: Flavor::WithData,
            premises: vec![prem("x", "x1"), prem("y", "y1")],
            conclusion: Conclusion {
                source: Term::app("both", vec![Term::pvar("x"), Term::pvar("y")]),
                before: Term::dvar("d"),
                action: sym("a"),
                target: Term::app("both", vec![Term::pvar("x1"), Term::pvar("y1")]),
                after: Term::dvar("d"),
            },
            conditions: vec![],
        };
        let mut swapped = rule.clone();
        swapped.premises.reverse();
        let a0 = Term::prefix("a", Term::nil());
        let p = Term::app("both", vec![Term::sum(a0.clone(), a0.clone()), a0]);
        let sig = Arc::new(sig);
        let t1 = Tss::new(sig.clone(), vec![prefix_rule(), choice_left(), rule]);
        let t2 = Tss::new(sig, vec![prefix_rule(), choice_left(), swapped]);
        for d in ["d0", "d1"] {
            assert_eq!(step(&t1, &p, &sym(d)), step(&t2, &p, &sym(d)));
        }
    }
}
