//! The store calculus BCCSP_D: `0`, prefixing, `+`, `check(d, _)` and
//! `update(d, _)`, its eleven axioms, head normal forms, a ground equality
//! decision procedure, and the axiom schema for GSOS operators added on top.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::curry::ClosedTss;
use crate::syntax::SpecFile;
use crate::term::{match_into, sym, Signature, Sort, Subst, Symbol, Term, TermError, TERMINATION};
use crate::tss::{Conclusion, Flavor, HeadKey, Premise, Rule, Tss};

/// Process operators of the core calculus; prefixing is built in.
pub const CORE_OPS: [&str; 4] = ["0", "+", "check", "update"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("operator `{0}` is outside the store calculus; expand it with its axiom schema first")]
    NotNormalizable(Symbol),
    #[error("`{0}` is not in head normal form")]
    NotHnf(Term),
    #[error("term `{0}` is open")]
    Open(Term),
    #[error("data constant `{0}` is not in the carrier")]
    UnknownData(Symbol),
    #[error("operator `{0}` has no rules in the closed system")]
    UnknownOperator(Symbol),
    #[error("not a disjoint extension: {0}")]
    NotDisjoint(String),
    #[error("{0}")]
    Term(#[from] TermError),
}

fn core_signature(carrier: &[&str], actions: &[&str]) -> Signature {
    let mut sig = Signature::new();
    for d in carrier {
        sig.add_data(d).expect("carrier names are distinct");
    }
    for a in actions {
        sig.add_label(a).expect("action names are distinct");
    }
    sig.add_op("0", vec![]).unwrap();
    sig.add_op("+", vec![Sort::Process, Sort::Process]).unwrap();
    sig.add_op("check", vec![Sort::Data, Sort::Process]).unwrap();
    sig.add_op("update", vec![Sort::Data, Sort::Process]).unwrap();
    sig
}

fn premise(source: &str, before: &str, action: &str, target: &str, after: &str) -> Premise {
    Premise {
        source: Term::pvar(source),
        before: Term::dvar(before),
        action: sym(action),
        target: Term::pvar(target),
        after: Term::dvar(after),
    }
}

fn curried_rule(name: String, premises: Vec<Premise>, conclusion: Conclusion) -> Rule {
    Rule {
        name: Symbol::from(name.as_str()),
        flavor: Flavor::Curried,
        premises,
        conclusion,
        conditions: Vec::new(),
    }
}

fn conclusion(source: Term, before: &str, action: &str, target: Term, after: Term) -> Conclusion {
    Conclusion {
        source,
        before: Term::dvar(before),
        action: sym(action),
        target,
        after,
    }
}

fn core_rules(actions: &[&str]) -> Vec<Rule> {
    let (x, y) = (Term::pvar("x"), Term::pvar("y"));
    let mut rules = Vec::new();
    for a in actions {
        rules.push(curried_rule(
            format!("pre_{a}"),
            vec![],
            conclusion(Term::prefix(a, x.clone()), "d", a, x.clone(), Term::dvar("d")),
        ));
        rules.push(curried_rule(
            format!("plus_l_{a}"),
            vec![premise("x", "d", a, "x1", "e")],
            conclusion(Term::sum(x.clone(), y.clone()), "d", a, Term::pvar("x1"), Term::dvar("e")),
        ));
        rules.push(curried_rule(
            format!("plus_r_{a}"),
            vec![premise("y", "d", a, "y1", "e")],
            conclusion(Term::sum(x.clone(), y.clone()), "d", a, Term::pvar("y1"), Term::dvar("e")),
        ));
        rules.push(curried_rule(
            format!("check_{a}"),
            vec![premise("x", "d", a, "x1", "e")],
            conclusion(
                Term::app("check", vec![Term::dvar("d"), x.clone()]),
                "d",
                a,
                Term::pvar("x1"),
                Term::dvar("e"),
            ),
        ));
        rules.push(curried_rule(
            format!("update_{a}"),
            vec![premise("x", "d", a, "x1", "e")],
            conclusion(
                Term::app("update", vec![Term::dvar("f"), x.clone()]),
                "d",
                a,
                Term::pvar("x1"),
                Term::dvar("f"),
            ),
        ));
    }
    rules
}

/// The curried specification of BCCSP_D over the given carrier and actions.
pub fn bccspd(carrier: &[&str], actions: &[&str]) -> SpecFile {
    SpecFile::new(core_signature(carrier, actions), core_rules(actions))
}

/// BCCSP_D extended with the interleaving operator `merge`, whose rules let
/// either argument move and leave the other in place.
pub fn bccspd_with_merge(carrier: &[&str], actions: &[&str]) -> SpecFile {
    let mut sig = core_signature(carrier, actions);
    sig.add_op("merge", vec![Sort::Process, Sort::Process]).unwrap();
    let mut rules = core_rules(actions);
    let (x, y) = (Term::pvar("x"), Term::pvar("y"));
    for a in actions {
        rules.push(curried_rule(
            format!("merge_l_{a}"),
            vec![premise("x", "d", a, "x1", "e")],
            conclusion(
                Term::app("merge", vec![x.clone(), y.clone()]),
                "d",
                a,
                Term::app("merge", vec![Term::pvar("x1"), y.clone()]),
                Term::dvar("e"),
            ),
        ));
        rules.push(curried_rule(
            format!("merge_r_{a}"),
            vec![premise("y", "d", a, "y1", "e")],
            conclusion(
                Term::app("merge", vec![x.clone(), y.clone()]),
                "d",
                a,
                Term::app("merge", vec![x.clone(), Term::pvar("y1")]),
                Term::dvar("e"),
            ),
        ));
    }
    SpecFile::new(sig, rules)
}

/// Checks that `ext` adds operators and rules to `core` without adding rules
/// for any operator of `core`.
pub fn check_disjoint_extension(core: &Tss, ext: &Tss) -> Result<(), AxiomError> {
    for r in &core.rules {
        if !ext.rules.contains(r) {
            return Err(AxiomError::NotDisjoint(format!("core rule {} is missing", r.name)));
        }
    }
    for r in &ext.rules {
        if core.rules.contains(r) {
            continue;
        }
        let key = r.defines();
        let old = match &key {
            HeadKey::Op(f) => core.sig.has_op(f),
            HeadKey::Prefix(a) => core.sig.has_label(a),
            HeadKey::Other => true,
        };
        if old {
            return Err(AxiomError::NotDisjoint(format!(
                "rule {} defines {key}, which the core already defines",
                r.name
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomTag {
    NComm,
    NAssoc,
    NIdem,
    NZero,
    Nc,
    Nu,
    Cu,
    Uu,
    Cc,
    CcPrime,
    Lc,
}

impl AxiomTag {
    pub const ALL: [AxiomTag; 11] = [
        AxiomTag::NComm,
        AxiomTag::NAssoc,
        AxiomTag::NIdem,
        AxiomTag::NZero,
        AxiomTag::Nc,
        AxiomTag::Nu,
        AxiomTag::Cu,
        AxiomTag::Uu,
        AxiomTag::Cc,
        AxiomTag::CcPrime,
        AxiomTag::Lc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomTag::NComm => "n-comm",
            AxiomTag::NAssoc => "n-assoc",
            AxiomTag::NIdem => "n-idem",
            AxiomTag::NZero => "n-zero",
            AxiomTag::Nc => "nc",
            AxiomTag::Nu => "nu",
            AxiomTag::Cu => "cu",
            AxiomTag::Uu => "uu",
            AxiomTag::Cc => "cc",
            AxiomTag::CcPrime => "cc'",
            AxiomTag::Lc => "lc",
        }
    }
}

impl fmt::Display for AxiomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn tag_list(tags: &[AxiomTag]) -> String {
    tags.iter().map(|t| t.name()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomTag),
    /// An instance of the axiom schema for `op`; `rules` names the closed
    /// rule instances that contributed a summand.
    Schema { op: Symbol, rules: Vec<Symbol> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub justification: Justification,
}

impl Equation {
    pub fn instantiate(&self, s: &Subst) -> Result<Equation, TermError> {
        Ok(Equation {
            lhs: s.apply(&self.lhs)?,
            rhs: s.apply(&self.rhs)?,
            justification: self.justification.clone(),
        })
    }

    pub fn tag(&self) -> Option<AxiomTag> {
        match self.justification {
            Justification::Axiom(t) => Some(t),
            Justification::Schema { .. } => None,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)?;
        match &self.justification {
            Justification::Axiom(t) => write!(f, "  ({t})"),
            Justification::Schema { op, .. } => write!(f, "  (schema {op})"),
        }
    }
}

/// Which form of the (cc) axiom to emit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CcVariant {
    /// `check(d, check(d, x)) = check(d, x)`.
    #[default]
    Corrected,
    /// `check(d, check(d, x)) = x`, unsound once the carrier has two values.
    Literal,
}

fn check(d: Term, p: Term) -> Term {
    Term::app("check", vec![d, p])
}

fn update(d: Term, p: Term) -> Term {
    Term::app("update", vec![d, p])
}

/// The axioms of BCCSP_D over `sig`. Process variables are `x`, `y`, `z` and
/// data variables `d`, `e`; (cc), (cc') and (lc) are expanded over the
/// carrier, (lc) also over the actions.
pub fn axioms_ebccspd(sig: &Signature, variant: CcVariant) -> Vec<Equation> {
    let (x, y, z) = (Term::pvar("x"), Term::pvar("y"), Term::pvar("z"));
    let (d, e) = (Term::dvar("d"), Term::dvar("e"));
    let eq = |lhs, rhs, tag| Equation {
        lhs,
        rhs,
        justification: Justification::Axiom(tag),
    };
    let mut out = vec![
        eq(Term::sum(x.clone(), y.clone()), Term::sum(y.clone(), x.clone()), AxiomTag::NComm),
        eq(
            Term::sum(x.clone(), Term::sum(y.clone(), z.clone())),
            Term::sum(Term::sum(x.clone(), y.clone()), z.clone()),
            AxiomTag::NAssoc,
        ),
        eq(Term::sum(x.clone(), x.clone()), x.clone(), AxiomTag::NIdem),
        eq(Term::sum(x.clone(), Term::nil()), x.clone(), AxiomTag::NZero),
        eq(
            check(d.clone(), Term::sum(x.clone(), y.clone())),
            Term::sum(check(d.clone(), x.clone()), check(d.clone(), y.clone())),
            AxiomTag::Nc,
        ),
        eq(
            update(d.clone(), Term::sum(x.clone(), y.clone())),
            Term::sum(update(d.clone(), x.clone()), update(d.clone(), y.clone())),
            AxiomTag::Nu,
        ),
        eq(
            check(d.clone(), update(e.clone(), x.clone())),
            update(e.clone(), check(d.clone(), x.clone())),
            AxiomTag::Cu,
        ),
        eq(
            update(d.clone(), update(e.clone(), x.clone())),
            update(d.clone(), x.clone()),
            AxiomTag::Uu,
        ),
    ];
    let carrier = sig.data_constants();
    for c in carrier {
        let c = Term::Data(c.clone());
        let rhs = match variant {
            CcVariant::Corrected => check(c.clone(), x.clone()),
            CcVariant::Literal => x.clone(),
        };
        out.push(eq(check(c.clone(), check(c, x.clone())), rhs, AxiomTag::Cc));
    }
    for c in carrier {
        for c2 in carrier.iter().filter(|c2| *c2 != c) {
            out.push(eq(
                check(Term::Data(c.clone()), check(Term::Data(c2.clone()), x.clone())),
                Term::nil(),
                AxiomTag::CcPrime,
            ));
        }
    }
    for l in sig.labels().iter().filter(|l| &***l != TERMINATION) {
        let body = Term::prefix(l, x.clone());
        out.push(eq(
            body.clone(),
            Term::sum_of(
                carrier
                    .iter()
                    .map(|c| update(Term::Data(c.clone()), check(Term::Data(c.clone()), body.clone()))),
            ),
            AxiomTag::Lc,
        ));
    }
    out
}

/// One summand `update(after, check(before, action.cont))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    pub after: Symbol,
    pub before: Symbol,
    pub action: Symbol,
    pub cont: Term,
}

impl Summand {
    pub fn to_term(&self) -> Term {
        update(
            Term::Data(self.after.clone()),
            check(Term::Data(self.before.clone()), Term::Prefix(self.action.clone(), Arc::new(self.cont.clone()))),
        )
    }

    /// Reads a term of the shape `update(d', check(d, l.p))`.
    pub fn from_term(t: &Term) -> Option<Summand> {
        let Term::App(u, ua) = t else { return None };
        let (Term::Data(after), Term::App(c, ca)) = (ua.first()?, ua.get(1)?) else {
            return None;
        };
        let (Term::Data(before), Term::Prefix(action, cont)) = (ca.first()?, ca.get(1)?) else {
            return None;
        };
        (&**u == "update" && &**c == "check").then(|| Summand {
            after: after.clone(),
            before: before.clone(),
            action: action.clone(),
            cont: cont.as_ref().clone(),
        })
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// A head normal form: a canonically ordered set of summands. The empty sum
/// denotes `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HnfSum(BTreeSet<Summand>);

impl HnfSum {
    pub fn new() -> Self {
        HnfSum::default()
    }

    pub fn summands(&self) -> impl Iterator<Item = &Summand> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, s: Summand) -> bool {
        self.0.insert(s)
    }

    pub fn to_term(&self) -> Term {
        Term::sum_of(self.0.iter().map(Summand::to_term))
    }

    /// Reads an h.n.f.-shaped term: `0`, or a sum whose leaves are summands.
    pub fn from_term(t: &Term) -> Result<HnfSum, AxiomError> {
        if matches!(t, Term::App(z, _) if &**z == "0") {
            return Ok(HnfSum::new());
        }
        t.summands()
            .into_iter()
            .map(|s| Summand::from_term(s).ok_or_else(|| AxiomError::NotHnf(t.clone())))
            .collect()
    }
}

impl FromIterator<Summand> for HnfSum {
    fn from_iter<I: IntoIterator<Item = Summand>>(iter: I) -> Self {
        HnfSum(iter.into_iter().collect())
    }
}

impl fmt::Display for HnfSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

pub fn is_hnf(t: &Term) -> bool {
    HnfSum::from_term(t).is_ok()
}

/// The height of an h.n.f.-shaped term: `0` for `0`, one more than the
/// larger side for `+`, one more than the continuation for a summand.
pub fn height(t: &Term) -> Result<usize, AxiomError> {
    if matches!(t, Term::App(z, _) if &**z == "0") {
        return Ok(0);
    }
    if t.is_sum() {
        let c = t.children();
        return Ok(1 + height(&c[0])?.max(height(&c[1])?));
    }
    match Summand::from_term(t) {
        Some(s) => Ok(1 + height(&s.cont)?),
        None => Err(AxiomError::NotHnf(t.clone())),
    }
}

/// One rewriting step of head normalization. Steps with no axiom tags are
/// schema instances for the operator at the head of `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormStep {
    pub axioms: Vec<AxiomTag>,
    pub from: Term,
    pub to: Term,
}

impl fmt::Display for NormStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.axioms.is_empty() {
            write!(f, "{} = {}  (schema {})", self.from, self.to, self.from.head())
        } else {
            write!(f, "{} = {}  ({})", self.from, self.to, tag_list(&self.axioms))
        }
    }
}

struct Normalizer<'a> {
    sig: &'a Signature,
    ext: Option<&'a ClosedTss>,
    steps: Vec<NormStep>,
}

impl Normalizer<'_> {
    fn data(&self, t: &Term) -> Result<Symbol, AxiomError> {
        match t {
            Term::Data(d) if self.sig.has_data(d) => Ok(d.clone()),
            Term::Data(d) => Err(AxiomError::UnknownData(d.clone())),
            _ => Err(AxiomError::Open(t.clone())),
        }
    }

    fn record(&mut self, axioms: Vec<AxiomTag>, from: Term, to: &HnfSum) {
        let to = to.to_term();
        if from != to {
            self.steps.push(NormStep { axioms, from, to });
        }
    }

    fn run(&mut self, p: &Term) -> Result<HnfSum, AxiomError> {
        match p {
            Term::Var(..) => Err(AxiomError::Open(p.clone())),
            Term::Data(_) => Err(TermError::SortClash {
                name: sym(p.head()),
                expected: Sort::Process,
                found: Sort::Data,
            }
            .into()),
            Term::Prefix(l, body) => {
                if !body.is_closed() {
                    return Err(AxiomError::Open(p.clone()));
                }
                let out: HnfSum = self
                    .sig
                    .data_constants()
                    .iter()
                    .map(|d| Summand {
                        after: d.clone(),
                        before: d.clone(),
                        action: l.clone(),
                        cont: body.as_ref().clone(),
                    })
                    .collect();
                self.record(vec![AxiomTag::Lc], p.clone(), &out);
                Ok(out)
            }
            Term::App(op, args) => match (&**op, &args[..]) {
                ("0", []) => Ok(HnfSum::new()),
                ("+", [l, r]) => {
                    let (a, b) = (self.run(l)?, self.run(r)?);
                    let tags = match (a.is_empty(), b.is_empty()) {
                        (false, false) => vec![AxiomTag::NComm, AxiomTag::NAssoc, AxiomTag::NIdem],
                        _ => vec![AxiomTag::NComm, AxiomTag::NZero],
                    };
                    let from = Term::sum(a.to_term(), b.to_term());
                    let mut out = a;
                    out.0.extend(b.0);
                    self.record(tags, from, &out);
                    Ok(out)
                }
                ("check", [d, body]) => {
                    let d = self.data(d)?;
                    let inner = self.run(body)?;
                    let out: HnfSum = inner.summands().filter(|s| s.before == d).cloned().collect();
                    let mut tags = vec![AxiomTag::Nc];
                    if !inner.is_empty() {
                        tags.push(AxiomTag::Cu);
                    }
                    if !out.is_empty() {
                        tags.push(AxiomTag::Cc);
                    }
                    if out.len() < inner.len() {
                        tags.push(AxiomTag::CcPrime);
                    }
                    self.record(tags, check(Term::Data(d), inner.to_term()), &out);
                    Ok(out)
                }
                ("update", [d, body]) => {
                    let d = self.data(d)?;
                    let inner = self.run(body)?;
                    let out: HnfSum = inner
                        .summands()
                        .map(|s| Summand {
                            after: d.clone(),
                            ..s.clone()
                        })
                        .collect();
                    self.record(
                        vec![AxiomTag::Nu, AxiomTag::Uu],
                        update(Term::Data(d), inner.to_term()),
                        &out,
                    );
                    Ok(out)
                }
                _ => match self.ext {
                    Some(closed) => {
                        let mut hnf_args = Vec::with_capacity(args.len());
                        for a in args.iter() {
                            hnf_args.push(match a.sort() {
                                Sort::Process => self.run(a)?.to_term(),
                                Sort::Data => a.clone(),
                            });
                        }
                        let eq = gsos_axiom_instance(op, &hnf_args, closed)?;
                        let out = HnfSum::from_term(&eq.rhs)?;
                        self.steps.push(NormStep {
                            axioms: Vec::new(),
                            from: eq.lhs,
                            to: eq.rhs,
                        });
                        Ok(out)
                    }
                    None => Err(AxiomError::NotNormalizable(op.clone())),
                },
            },
        }
    }
}

/// Brings a closed BCCSP_D term into head normal form.
pub fn normalize_hnf(sig: &Signature, p: &Term) -> Result<HnfSum, AxiomError> {
    normalize_hnf_traced(sig, p).map(|(h, _)| h)
}

/// As [`normalize_hnf`], also returning the rewriting steps with the axioms
/// that justify them.
pub fn normalize_hnf_traced(sig: &Signature, p: &Term) -> Result<(HnfSum, Vec<NormStep>), AxiomError> {
    let mut n = Normalizer {
        sig,
        ext: None,
        steps: Vec::new(),
    };
    let h = n.run(p)?;
    Ok((h, n.steps))
}

/// Head normalization for terms that also use operators of `closed` beyond
/// the core; those are expanded bottom-up with their axiom schema. Schema
/// steps carry no axiom tags in the trace.
pub fn normalize_extended(closed: &ClosedTss, p: &Term) -> Result<(HnfSum, Vec<NormStep>), AxiomError> {
    let mut n = Normalizer {
        sig: &closed.sig,
        ext: Some(closed),
        steps: Vec::new(),
    };
    let h = n.run(p)?;
    Ok((h, n.steps))
}

/// Outcome of [`prove_equal`] with a numbered derivation trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub equal: bool,
    pub trace: Vec<String>,
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.trace.iter().enumerate() {
            writeln!(f, "{:>3}. {line}", i + 1)?;
        }
        write!(f, "{}", if self.equal { "equal" } else { "not equal" })
    }
}

/// Ground equality by head normalization and summand matching.
pub struct Prover<'a> {
    sig: &'a Signature,
    nf: HashMap<Term, HnfSum>,
    memo: HashMap<(Term, Term), bool>,
}

impl<'a> Prover<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Prover {
            sig,
            nf: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn normal(&mut self, p: &Term) -> Result<HnfSum, AxiomError> {
        if let Some(h) = self.nf.get(p) {
            return Ok(h.clone());
        }
        let h = normalize_hnf(self.sig, p)?;
        self.nf.insert(p.clone(), h.clone());
        Ok(h)
    }

    /// Decides `E |- p = q` for closed `p`, `q`.
    pub fn equal(&mut self, p: &Term, q: &Term) -> Result<bool, AxiomError> {
        if p == q {
            self.sig.check_closed_process(p)?;
            return Ok(true);
        }
        let key = if p < q { (p.clone(), q.clone()) } else { (q.clone(), p.clone()) };
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let (hp, hq) = (self.normal(p)?, self.normal(q)?);
        let v = self.covers(&hp, &hq)? && self.covers(&hq, &hp)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    /// Every summand of `b` is matched by some summand of `a`.
    fn covers(&mut self, a: &HnfSum, b: &HnfSum) -> Result<bool, AxiomError> {
        for s in b.summands() {
            if self.matching(a, s)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn matching<'h>(&mut self, a: &'h HnfSum, s: &Summand) -> Result<Option<&'h Summand>, AxiomError> {
        for t in a.summands() {
            if t.after == s.after && t.before == s.before && t.action == s.action && self.equal(&t.cont, &s.cont)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// Decides equality and records the derivation.
    pub fn prove(&mut self, p: &Term, q: &Term) -> Result<Proof, AxiomError> {
        let mut trace = Vec::new();
        let (hp, sp) = normalize_hnf_traced(self.sig, p)?;
        let (hq, sq) = normalize_hnf_traced(self.sig, q)?;
        trace.extend(sp.iter().map(|s| format!("lhs: {s}")));
        trace.extend(sq.iter().map(|s| format!("rhs: {s}")));
        let mut equal = true;
        for (side, from, to) in [("rhs", &hq, &hp), ("lhs", &hp, &hq)] {
            for s in from.summands() {
                match self.matching(to, s)? {
                    Some(t) if t == s => trace.push(format!("{side} summand {s} occurs on both sides")),
                    Some(t) => trace.push(format!(
                        "{side} summand {s} matches {t}, continuations {} = {} by induction on height",
                        s.cont, t.cont
                    )),
                    None => {
                        trace.push(format!("{side} summand {s} has no counterpart"));
                        equal = false;
                    }
                }
            }
        }
        if equal {
            trace.push(format!("{p} = {q}  (n-comm,n-assoc,n-idem)"));
        }
        Ok(Proof { equal, trace })
    }
}

pub fn prove_equal(sig: &Signature, p: &Term, q: &Term) -> Result<Proof, AxiomError> {
    Prover::new(sig).prove(p, q)
}

/// Which witnesses instantiate a premise target when several summands of
/// the argument satisfy the premise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WitnessChoice {
    /// One summand per combination of witnesses. This is the sound reading.
    #[default]
    All,
    /// Only the first witness in canonical order. Loses transitions when an
    /// argument has two summands with the same label and different
    /// continuations.
    First,
}

fn premise_label(p: &Premise) -> Option<(Symbol, Symbol, Symbol)> {
    match (&p.before, &p.after) {
        (Term::Data(b), Term::Data(a)) => Some((b.clone(), p.action.clone(), a.clone())),
        _ => None,
    }
}

/// Continuations of the summands of `pk` carrying `label`, in canonical order.
fn witnesses(pk: &HnfSum, label: &(Symbol, Symbol, Symbol)) -> Vec<Term> {
    let (before, action, after) = label;
    pk.summands()
        .filter(|s| &s.before == before && &s.action == action && &s.after == after)
        .map(|s| s.cont.clone())
        .collect()
}

/// The position and variable name of each process argument of a rule's source.
fn argument_vars(rule: &Rule) -> Vec<(usize, Symbol)> {
    rule.conclusion
        .source
        .children()
        .iter()
        .enumerate()
        .filter_map(|(k, a)| match a {
            Term::Var(n, Sort::Process) => Some((k, n.clone())),
            _ => None,
        })
        .collect()
}

fn premises_on<'r>(rule: &'r Rule, var: &'r Symbol) -> impl Iterator<Item = &'r Premise> + 'r {
    rule.premises
        .iter()
        .filter(move |p| matches!(&p.source, Term::Var(n, _) if n == var))
}

/// The premise-satisfaction test for argument position `k` (0-based): every
/// premise on that argument must be matched by a summand of `pk`. Returns the
/// first witness of each premise on `k`, in premise order; positions without
/// premises pass with no witnesses.
pub fn check_tick(pk: &Term, k: usize, rule: &Rule) -> Result<Option<Vec<Term>>, AxiomError> {
    let h = HnfSum::from_term(pk)?;
    let Some((_, var)) = argument_vars(rule).into_iter().find(|(i, _)| *i == k) else {
        return Ok(Some(Vec::new()));
    };
    let mut out = Vec::new();
    for p in premises_on(rule, &var) {
        let Some(w) = premise_label(p).and_then(|l| witnesses(&h, &l).into_iter().next()) else {
            return Ok(None);
        };
        out.push(w);
    }
    Ok(Some(out))
}

/// Expands `f(args)` with the axiom schema for `f`: a sum over the closed
/// rules for `f` whose premises are all satisfied by the argument head
/// normal forms, each contributing `update(d', check(d, l.C))` with the
/// rule's target `C` instantiated by the arguments and the witnesses.
pub fn gsos_axiom_instance(f: &str, args: &[Term], closed: &ClosedTss) -> Result<Equation, AxiomError> {
    gsos_axiom_instance_with(f, args, closed, WitnessChoice::All)
}

pub fn gsos_axiom_instance_with(
    f: &str,
    args: &[Term],
    closed: &ClosedTss,
    choice: WitnessChoice,
) -> Result<Equation, AxiomError> {
    let lhs = Term::app(f, args.to_vec());
    closed.sig.check_closed_process(&lhs)?;
    let mut hnfs: Vec<Option<HnfSum>> = Vec::with_capacity(args.len());
    for a in args {
        hnfs.push(match a.sort() {
            Sort::Process => Some(HnfSum::from_term(a)?),
            Sort::Data => None,
        });
    }
    let mut rhs = HnfSum::new();
    let mut used = Vec::new();
    'rules: for inst in closed.rules_defining(&HeadKey::Op(sym(f))) {
        let rule = &inst.rule;
        let mut base = Subst::new();
        if !match_into(&mut base, &rule.conclusion.source, &lhs) {
            continue;
        }
        let c = &rule.conclusion;
        let (Term::Data(before), Term::Data(after)) = (&c.before, &c.after) else {
            continue;
        };
        // one (target variable, candidate witnesses) entry per premise
        let mut slots: Vec<(Symbol, Vec<Term>)> = Vec::new();
        for (k, var) in argument_vars(rule) {
            let Some(pk) = hnfs[k].as_ref() else { continue };
            for p in premises_on(rule, &var) {
                let (Some(label), Term::Var(y, _)) = (premise_label(p), &p.target) else {
                    continue 'rules;
                };
                let mut ws = witnesses(pk, &label);
                if ws.is_empty() {
                    continue 'rules;
                }
                if choice == WitnessChoice::First {
                    ws.truncate(1);
                }
                slots.push((y.clone(), ws));
            }
        }
        let mut pick = vec![0usize; slots.len()];
        loop {
            let mut s = base.clone();
            for ((y, ws), &i) in slots.iter().zip(&pick) {
                s.insert(y.clone(), ws[i].clone());
            }
            rhs.insert(Summand {
                after: after.clone(),
                before: before.clone(),
                action: c.action.clone(),
                cont: s.apply(&c.target)?,
            });
            let mut j = 0;
            while j < slots.len() {
                pick[j] += 1;
                if pick[j] < slots[j].1.len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == slots.len() {
                break;
            }
        }
        used.push(rule.name.clone());
    }
    Ok(Equation {
        lhs,
        rhs: rhs.to_term(),
        justification: Justification::Schema {
            op: sym(f),
            rules: used,
        },
    })
}

/// Closed BCCSP_D terms of operator depth at most `depth`, where `0` has
/// depth zero, deduplicated modulo the order and nesting of summands.
pub fn enumerate_terms(sig: &Signature, depth: usize) -> Vec<Term> {
    let mut level: BTreeSet<Term> = BTreeSet::from([Term::nil()]);
    for _ in 0..depth {
        let prev: Vec<Term> = level.iter().cloned().collect();
        let mut next = level.clone();
        for p in &prev {
            for l in sig.labels().iter().filter(|l| &***l != TERMINATION) {
                next.insert(Term::Prefix(l.clone(), Arc::new(p.clone())));
            }
            for d in sig.data_constants() {
                next.insert(check(Term::Data(d.clone()), p.clone()));
                next.insert(update(Term::Data(d.clone()), p.clone()));
            }
            for q in &prev {
                next.insert(sum_canonical(p, q));
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// `p + q` with the summands of both sides flattened and sorted.
pub fn sum_canonical(p: &Term, q: &Term) -> Term {
    let mut items: Vec<Term> = p.summands().into_iter().chain(q.summands()).cloned().collect();
    items.sort();
    Term::sum_of(items)
}

/// A random closed BCCSP_D term with at most `size` process operators.
pub fn random_term(sig: &Signature, rng: &mut impl Rng, size: usize) -> Term {
    let labels: Vec<&Symbol> = sig.labels().iter().filter(|l| &***l != TERMINATION).collect();
    let carrier = sig.data_constants();
    if size == 0 {
        return Term::nil();
    }
    match rng.gen_range(0..5) {
        0 if size >= 2 => {
            let left = rng.gen_range(0..size);
            Term::sum(random_term(sig, rng, left), random_term(sig, rng, size - 1 - left))
        }
        1 => check(
            Term::Data(carrier[rng.gen_range(0..carrier.len())].clone()),
            random_term(sig, rng, size - 1),
        ),
        2 => update(
            Term::Data(carrier[rng.gen_range(0..carrier.len())].clone()),
            random_term(sig, rng, size - 1),
        ),
        _ => Term::Prefix(
            labels[rng.gen_range(0..labels.len())].clone(),
            Arc::new(random_term(sig, rng, size - 1)),
        ),
    }
}

/// A random head normal form whose continuations are random terms.
pub fn random_hnf(sig: &Signature, rng: &mut impl Rng, summands: usize, size: usize) -> HnfSum {
    let labels: Vec<&Symbol> = sig.labels().iter().filter(|l| &***l != TERMINATION).collect();
    let carrier = sig.data_constants();
    (0..summands)
        .map(|_| Summand {
            after: carrier[rng.gen_range(0..carrier.len())].clone(),
            before: carrier[rng.gen_range(0..carrier.len())].clone(),
            action: labels[rng.gen_range(0..labels.len())].clone(),
            cont: random_term(sig, rng, size),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curry::close_labels;
    use crate::syntax::parse_spec;

    fn spec2() -> SpecFile {
        bccspd(&["d0", "d1"], &["a"])
    }

    fn t(spec: &SpecFile, s: &str) -> Term {
        spec.parse_term(s).unwrap()
    }

    #[test]
    fn bundled_spec_matches_builder() {
        let text = include_str!("../specs/bccspd.sos");
        assert_eq!(bccspd(&["d0", "d1"], &["a", "b"]).to_string(), text);
        assert_eq!(parse_spec(text).unwrap(), bccspd(&["d0", "d1"], &["a", "b"]));
    }

    #[test]
    fn builder_output_is_valid() {
        let spec = bccspd_with_merge(&["d0", "d1"], &["a", "b"]);
        assert!(spec.validate().is_ok(), "{:?}", spec.validate());
        check_disjoint_extension(&spec2().tss(), &bccspd_with_merge(&["d0", "d1"], &["a"]).tss()).unwrap();
        assert!(check_disjoint_extension(&bccspd_with_merge(&["d0", "d1"], &["a"]).tss(), &spec2().tss()).is_err());
    }

    #[test]
    fn axiom_table_examples() {
        let spec = spec2();
        let eqs = axioms_ebccspd(&spec.sig, CcVariant::Corrected);
        assert_eq!(eqs.len(), 8 + 2 + 2 + 1);
        let shown: Vec<String> = eqs.iter().map(|e| e.to_string()).collect();
        assert!(shown.contains(&"x + 0 = x  (n-zero)".to_string()));
        assert!(shown.contains(&"a.x = update(d0,check(d0,a.x)) + update(d1,check(d1,a.x))  (lc)".to_string()));
        assert!(shown.contains(&"check(d0,check(d1,x)) = 0  (cc')".to_string()));
        assert!(shown.contains(&"check(d0,check(d0,x)) = check(d0,x)  (cc)".to_string()));
        let literal = axioms_ebccspd(&spec.sig, CcVariant::Literal);
        assert!(literal.iter().any(|e| e.to_string() == "check(d1,check(d1,x)) = x  (cc)"));
        let tags: BTreeSet<AxiomTag> = eqs.iter().filter_map(Equation::tag).collect();
        assert_eq!(tags.len(), 11);
    }

    #[test]
    fn normalization_examples() {
        let spec = spec2();
        assert!(normalize_hnf(&spec.sig, &Term::nil()).unwrap().is_empty());
        assert_eq!(
            normalize_hnf(&spec.sig, &t(&spec, "a.0")).unwrap().to_string(),
            "update(d0,check(d0,a.0)) + update(d1,check(d1,a.0))"
        );
        assert_eq!(
            normalize_hnf(&spec.sig, &t(&spec, "check(d0, update(d1, a.0))")).unwrap().to_string(),
            "update(d1,check(d0,a.0))"
        );
    }

    #[test]
    fn foreign_operator_is_not_normalizable() {
        let spec = bccspd_with_merge(&["d0", "d1"], &["a"]);
        let err = normalize_hnf(&spec.sig, &t(&spec, "merge(a.0, 0)")).unwrap_err();
        assert_eq!(err, AxiomError::NotNormalizable(sym("merge")));
        let closed = close_labels(&spec.tss()).unwrap();
        let (h, _) = normalize_extended(&closed, &t(&spec, "merge(a.0, 0)")).unwrap();
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn height_examples() {
        let spec = spec2();
        let s = t(&spec, "update(d1,check(d0,a.0))");
        assert_eq!(height(&Term::nil()).unwrap(), 0);
        assert_eq!(height(&s).unwrap(), 1);
        assert_eq!(height(&Term::sum(s.clone(), s.clone())).unwrap(), 2);
        assert!(height(&t(&spec, "a.0")).is_err());
    }

    #[test]
    fn prove_examples() {
        let spec = spec2();
        let yes = |p: &str, q: &str| prove_equal(&spec.sig, &t(&spec, p), &t(&spec, q)).unwrap().equal;
        assert!(yes("a.0 + 0", "a.0"));
        assert!(yes("update(d0, update(d1, a.0))", "update(d0, a.0)"));
        assert!(!yes("check(d0, a.0)", "a.0"));
        let proof = prove_equal(&spec.sig, &t(&spec, "a.0 + 0"), &t(&spec, "a.0")).unwrap();
        assert!(proof.trace.iter().any(|l| l.contains("(lc)")));
    }

    #[test]
    fn tick_examples() {
        let spec = spec2();
        let closed = close_labels(&spec.tss()).unwrap();
        let rule = &closed
            .rules
            .iter()
            .find(|r| &*r.origin == "plus_l_a" && r.conclusion_label().to_string() == "(d0,a,d1)")
            .unwrap()
            .rule;
        let p = t(&spec, "update(d1,check(d0,a.a.0)) + update(d0,check(d0,a.0))");
        assert_eq!(check_tick(&p, 0, rule).unwrap(), Some(vec![t(&spec, "a.0")]));
        assert_eq!(check_tick(&Term::nil(), 0, rule).unwrap(), None);
        let only_b = Summand {
            after: sym("d1"),
            before: sym("d0"),
            action: sym("b"),
            cont: Term::nil(),
        };
        assert_eq!(check_tick(&only_b.to_term(), 0, rule).unwrap(), None);
        assert!(matches!(check_tick(&t(&spec, "a.0"), 0, rule), Err(AxiomError::NotHnf(_))));
        // the right argument is premise-free for this rule
        assert_eq!(check_tick(&Term::nil(), 1, rule).unwrap(), Some(vec![]));
    }

    #[test]
    fn schema_examples() {
        let spec = bccspd_with_merge(&["d0", "d1"], &["a"]);
        let closed = close_labels(&spec.tss()).unwrap();
        let eq = gsos_axiom_instance("merge", &[Term::nil(), Term::nil()], &closed).unwrap();
        assert_eq!(eq.to_string(), "merge(0,0) = 0  (schema merge)");
        let p = t(&spec, "update(d1,check(d0,a.0))");
        let eq = gsos_axiom_instance("merge", &[p, Term::nil()], &closed).unwrap();
        assert_eq!(eq.rhs.to_string(), "update(d1,check(d0,a.merge(0,0)))");

        let spec1 = bccspd_with_merge(&["d0"], &["a"]);
        let closed1 = close_labels(&spec1.tss()).unwrap();
        let p = t(&spec1, "update(d0,check(d0,a.0))");
        let eq = gsos_axiom_instance("merge", &[p.clone(), p], &closed1).unwrap();
        assert_eq!(
            eq.rhs.to_string(),
            "update(d0,check(d0,a.merge(0,update(d0,check(d0,a.0))))) + update(d0,check(d0,a.merge(update(d0,check(d0,a.0)),0)))"
        );
        assert!(is_hnf(&eq.rhs));
    }

    #[test]
    fn first_witness_only_loses_transitions() {
        use crate::bisim::strong_bisim;
        use crate::tss::Bounds;
        let spec = bccspd_with_merge(&["d0"], &["a"]);
        let closed = close_labels(&spec.tss()).unwrap();
        let q = t(&spec, "update(d0,check(d0,a.0)) + update(d0,check(d0,a.a.0))");
        let all = gsos_axiom_instance("merge", &[Term::nil(), q.clone()], &closed).unwrap();
        let first = gsos_axiom_instance_with("merge", &[Term::nil(), q], &closed, WitnessChoice::First).unwrap();
        assert_eq!(all.rhs.summands().len(), 2);
        assert_eq!(first.rhs.summands().len(), 1);
        assert!(strong_bisim(&closed, &all.lhs, &all.rhs, Bounds::default()).unwrap());
        assert!(!strong_bisim(&closed, &first.lhs, &first.rhs, Bounds::default()).unwrap());
    }

    #[test]
    fn enumeration_is_deduplicated() {
        let spec = spec2();
        let terms = enumerate_terms(&spec.sig, 1);
        assert_eq!(terms.len(), 7);
        assert!(terms.iter().all(|t| t.is_closed()));
        let two = enumerate_terms(&spec.sig, 2);
        let set: BTreeSet<&Term> = two.iter().collect();
        assert_eq!(set.len(), two.len());
    }
}
