//! The commutativity rule format.
//!
//! A binary operator `f` is commutative modulo strong bisimilarity when every
//! `f`-defining rule has a commutative mirror: another `f`-defining rule that,
//! after a variable renaming swapping the two arguments, has the same label,
//! a target equal up to swapping arguments of commutative operators, and
//! premises contained in the original rule's premises.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::term::{Signature, Sort, Symbol, Term};
use crate::tss::{Condition, HeadKey, Premise, Rule, Tss};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("`{0}` is not a binary process operator")]
    NotBinary(String),
    #[error("rule {rule}: {reason}")]
    Shape { rule: String, reason: String },
}

/// Canonical representative modulo swapping arguments of `comm_ops`.
pub fn cc_canonical(t: &Term, comm_ops: &BTreeSet<Symbol>) -> Term {
    match t {
        Term::App(op, args) => {
            let mut xs: Vec<Term> = args.iter().map(|a| cc_canonical(a, comm_ops)).collect();
            if xs.len() == 2 && comm_ops.contains(op) && xs[1] < xs[0] {
                xs.swap(0, 1);
            }
            Term::App(op.clone(), xs.into())
        }
        Term::Prefix(a, body) => Term::Prefix(a.clone(), cc_canonical(body, comm_ops).into()),
        _ => t.clone(),
    }
}

/// Equality up to swapping arguments of `comm_ops` operators in any context.
pub fn cc_equal(t1: &Term, t2: &Term, comm_ops: &BTreeSet<Symbol>) -> bool {
    t1.sort() == t2.sort() && cc_canonical(t1, comm_ops) == cc_canonical(t2, comm_ops)
}

/// A variable renaming from the mirror rule's variables to the original's.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming {
    forward: HashMap<Symbol, Symbol>,
    used: HashSet<Symbol>,
}

impl Renaming {
    fn bind(&mut self, from: &Symbol, to: &Symbol) -> bool {
        match self.forward.get(from) {
            Some(t) => t == to,
            None if self.used.contains(to) => false,
            None => {
                self.forward.insert(from.clone(), to.clone());
                self.used.insert(to.clone());
                true
            }
        }
    }

    /// Structural match of `from` (mirror side) onto `to`, extending the renaming.
    fn unify(&mut self, from: &Term, to: &Term) -> bool {
        match (from, to) {
            (Term::Var(a, s), Term::Var(b, t)) => s == t && self.bind(a, b),
            (Term::Data(a), Term::Data(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
            (Term::Prefix(a, x), Term::Prefix(b, y)) => a == b && self.unify(x, y),
            _ => false,
        }
    }

    pub fn apply(&self, t: &Term) -> Term {
        t.map_vars(&mut |n, s| Term::Var(self.forward.get(n).cloned().unwrap_or_else(|| n.clone()), s))
    }

    pub fn inverse(&self) -> Renaming {
        let forward: HashMap<Symbol, Symbol> =
            self.forward.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let used = forward.values().cloned().collect();
        Renaming { forward, used }
    }

    /// Pairs `(from, to)` sorted by source name.
    pub fn pairs(&self) -> Vec<(Symbol, Symbol)> {
        let mut v: Vec<_> = self.forward.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        v.sort();
        v
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.pairs().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}↦{b}")?;
        }
        f.write_str("}")
    }
}

fn unify_premise(h: &mut Renaming, from: &Premise, to: &Premise) -> bool {
    from.action == to.action
        && h.unify(&from.source, &to.source)
        && h.unify(&from.before, &to.before)
        && h.unify(&from.after, &to.after)
        && h.unify(&from.target, &to.target)
}

fn unify_condition(h: &mut Renaming, from: &Condition, to: &Condition) -> bool {
    from.pred == to.pred
        && from.args.len() == to.args.len()
        && from.args.iter().zip(&to.args).all(|(a, b)| h.unify(a, b))
}

fn all_vars(rule: &Rule) -> Vec<(Symbol, Sort)> {
    let mut out: Vec<(Symbol, Sort)> = Vec::new();
    let c = &rule.conclusion;
    let mut terms: Vec<&Term> = vec![&c.source, &c.before, &c.after, &c.target];
    for p in &rule.premises {
        terms.extend([&p.source, &p.before, &p.after, &p.target]);
    }
    for cond in &rule.conditions {
        terms.extend(cond.args.iter());
    }
    for t in terms {
        for v in t.var_occurrences() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Searches for a renaming under which `mirror` is a commutative mirror of `rule`.
pub fn mirror_renaming(rule: &Rule, mirror: &Rule, comm_ops: &BTreeSet<Symbol>) -> Option<Renaming> {
    let (Term::App(f, xs), Term::App(g, ys)) = (&rule.conclusion.source, &mirror.conclusion.source) else {
        return None;
    };
    if f != g || xs.len() != 2 || ys.len() != 2 || rule.conclusion.action != mirror.conclusion.action {
        return None;
    }
    let mut h = Renaming::default();
    if !(h.unify(&ys[0], &xs[1]) && h.unify(&ys[1], &xs[0])) {
        return None;
    }
    if !(h.unify(&mirror.conclusion.before, &rule.conclusion.before)
        && h.unify(&mirror.conclusion.after, &rule.conclusion.after))
    {
        return None;
    }
    let mut used = vec![false; rule.premises.len()];
    search_premises(rule, mirror, comm_ops, 0, &mut used, h)
}

fn search_premises(
    rule: &Rule,
    mirror: &Rule,
    comm_ops: &BTreeSet<Symbol>,
    idx: usize,
    used: &mut [bool],
    h: Renaming,
) -> Option<Renaming> {
    let Some(prem) = mirror.premises.get(idx) else {
        return search_conditions(rule, mirror, comm_ops, 0, h);
    };
    for j in 0..rule.premises.len() {
        if used[j] {
            continue;
        }
        let mut h2 = h.clone();
        if unify_premise(&mut h2, prem, &rule.premises[j]) {
            used[j] = true;
            let found = search_premises(rule, mirror, comm_ops, idx + 1, used, h2);
            used[j] = false;
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

fn search_conditions(
    rule: &Rule,
    mirror: &Rule,
    comm_ops: &BTreeSet<Symbol>,
    idx: usize,
    h: Renaming,
) -> Option<Renaming> {
    let Some(cond) = mirror.conditions.get(idx) else {
        return complete_and_check_target(rule, mirror, comm_ops, h);
    };
    rule.conditions.iter().find_map(|c| {
        let mut h2 = h.clone();
        if unify_condition(&mut h2, cond, c) {
            search_conditions(rule, mirror, comm_ops, idx + 1, h2)
        } else {
            None
        }
    })
}

/// Maps the mirror's remaining variables injectively onto unused variables of
/// `rule`, then checks the target condition.
fn complete_and_check_target(
    rule: &Rule,
    mirror: &Rule,
    comm_ops: &BTreeSet<Symbol>,
    h: Renaming,
) -> Option<Renaming> {
    let pending: Vec<(Symbol, Sort)> = all_vars(mirror)
        .into_iter()
        .filter(|(n, _)| !h.forward.contains_key(n))
        .collect();
    let pool: Vec<(Symbol, Sort)> = all_vars(rule);
    assign(&pending, &pool, h, &mut |h| {
        cc_equal(&h.apply(&mirror.conclusion.target), &rule.conclusion.target, comm_ops)
    })
}

fn assign(
    pending: &[(Symbol, Sort)],
    pool: &[(Symbol, Sort)],
    h: Renaming,
    check: &mut impl FnMut(&Renaming) -> bool,
) -> Option<Renaming> {
    let Some(((name, sort), rest)) = pending.split_first() else {
        return check(&h).then_some(h);
    };
    for (cand, s) in pool {
        if s != sort || h.used.contains(cand) {
            continue;
        }
        let mut h2 = h.clone();
        h2.bind(name, cand);
        if let Some(found) = assign(rest, pool, h2, check) {
            return Some(found);
        }
    }
    // a variable with no counterpart maps to a fresh name
    let mut h2 = h.clone();
    let fresh = Symbol::from(format!("{name}'").as_str());
    h2.bind(name, &fresh);
    assign(rest, pool, h2, check)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MirrorEntry {
    pub rule: String,
    pub mirror: Option<String>,
    pub renaming: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorReport {
    pub op: String,
    pub pass: bool,
    pub rules: Vec<MirrorEntry>,
    /// `f(x0,x1) = f(x1,x0)`, present when the operator passes.
    pub equation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommReport {
    pub pass: bool,
    pub operators: Vec<OperatorReport>,
}

impl CommReport {
    /// Names of rules lacking a mirror, across all operators.
    pub fn missing_mirrors(&self) -> Vec<&str> {
        self.operators
            .iter()
            .flat_map(|o| o.rules.iter())
            .filter(|e| e.mirror.is_none())
            .map(|e| e.rule.as_str())
            .collect()
    }
}

impl fmt::Display for CommReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "comm-form: {}", if self.pass { "pass" } else { "fail" })?;
        for op in &self.operators {
            writeln!(f, "operator {}: {}", op.op, if op.pass { "pass" } else { "fail" })?;
            for e in &op.rules {
                match &e.mirror {
                    Some(m) => {
                        let ren: Vec<String> = e.renaming.iter().map(|(a, b)| format!("{a}↦{b}")).collect();
                        writeln!(f, "  {} mirrored by {} under {{{}}}", e.rule, m, ren.join(", "))?
                    }
                    None => writeln!(f, "  {} has no commutative mirror", e.rule)?,
                }
            }
            if let Some(eq) = &op.equation {
                writeln!(f, "  sound for strong bisimilarity: {eq}")?;
            }
        }
        Ok(())
    }
}

fn check_binary(sig: &Signature, op: &Symbol) -> Result<(), FormatError> {
    match sig.op(op) {
        Some(d) if d.args == [Sort::Process, Sort::Process] => Ok(()),
        _ => Err(FormatError::NotBinary(op.to_string())),
    }
}

/// Checks the commutativity format of a curried system for every operator in `comm_ops`.
pub fn check_comm_form(tss: &Tss, comm_ops: &[Symbol]) -> Result<CommReport, FormatError> {
    let comm: BTreeSet<Symbol> = comm_ops.iter().cloned().collect();
    let mut operators = Vec::new();
    for op in comm_ops {
        check_binary(&tss.sig, op)?;
        let rules: Vec<&Rule> = tss.rules_defining(&HeadKey::Op(op.clone())).collect();
        for r in &rules {
            let shape_ok = matches!(&r.conclusion.source, Term::App(_, xs)
                if xs.len() == 2 && xs.iter().all(Term::is_var) && xs[0] != xs[1]);
            if !shape_ok {
                return Err(FormatError::Shape {
                    rule: r.name.to_string(),
                    reason: "conclusion source is not f(x0,x1) with distinct variables".into(),
                });
            }
        }
        let mut entries = Vec::new();
        for r in &rules {
            let found = rules
                .iter()
                .find_map(|m| mirror_renaming(r, m, &comm).map(|h| (m.name.to_string(), h)));
            entries.push(match found {
                Some((m, h)) => MirrorEntry {
                    rule: r.name.to_string(),
                    mirror: Some(m),
                    renaming: h.pairs().into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                },
                None => MirrorEntry {
                    rule: r.name.to_string(),
                    mirror: None,
                    renaming: Vec::new(),
                },
            });
        }
        let pass = entries.iter().all(|e| e.mirror.is_some());
        operators.push(OperatorReport {
            op: op.to_string(),
            pass,
            rules: entries,
            equation: pass.then(|| commutativity_equation(op).to_string()),
        });
    }
    Ok(CommReport {
        pass: operators.iter().all(|o| o.pass),
        operators,
    })
}

/// `f(x0,x1) = f(x1,x0)` as a pair of terms.
pub struct CommEquation(pub Term, pub Term);

impl fmt::Display for CommEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.0, self.1)
    }
}

pub fn commutativity_equation(op: &Symbol) -> CommEquation {
    let x0 = Term::pvar("x0");
    let x1 = Term::pvar("x1");
    CommEquation(
        Term::App(op.clone(), vec![x0.clone(), x1.clone()].into()),
        Term::App(op.clone(), vec![x1, x0].into()),
    )
}
