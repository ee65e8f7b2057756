//! Multisorted signatures, terms, substitutions and linear matching.
//!
//! Terms have two sorts: processes (`P`) and data (`D`). Data terms are flat:
//! either a declared constant or a data variable. Process terms are operator
//! applications, action prefixes `a.t`, or process variables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned-ish name shared between terms.
pub type Symbol = Arc<str>;

/// Reserved nullary process constant used as the target of termination steps.
pub const SINK: &str = "SINK";
/// Reserved action name standing for the termination predicate.
pub const TERMINATION: &str = "term";

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Process,
    Data,
}

impl Sort {
    pub fn letter(self) -> char {
        match self {
            Sort::Process => 'P',
            Sort::Data => 'D',
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("pattern is not linear: variable `{0}` occurs more than once")]
    NonLinearPattern(Symbol),
    #[error("sort clash on `{name}`: expected {expected}, found {found}")]
    SortClash {
        name: Symbol,
        expected: Sort,
        found: Sort,
    },
    #[error("unknown operator `{0}`")]
    UnknownOperator(Symbol),
    #[error("unknown data constant `{0}`")]
    UnknownData(Symbol),
    #[error("unknown label `{0}`")]
    UnknownLabel(Symbol),
    #[error("operator `{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("term is not closed: variable `{0}`")]
    Open(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: Symbol },
    #[error("`{0}` is reserved")]
    Reserved(Symbol),
    #[error("the data carrier is empty")]
    EmptyCarrier,
    #[error("predicate `{pred}` references undeclared data constant `{constant}`")]
    PredicateConstant { pred: Symbol, constant: Symbol },
    #[error("predicate `{pred}` has a row of width {found}, expected {expected}")]
    PredicateWidth {
        pred: Symbol,
        expected: usize,
        found: usize,
    },
}

/// A multisorted term. Data constants and data variables are the only data terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Symbol, Sort),
    Data(Symbol),
    App(Symbol, Arc<[Term]>),
    Prefix(Symbol, Arc<Term>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(sym(name), sort)
    }

    pub fn pvar(name: &str) -> Term {
        Term::var(name, Sort::Process)
    }

    pub fn dvar(name: &str) -> Term {
        Term::var(name, Sort::Data)
    }

    pub fn data(name: &str) -> Term {
        Term::Data(sym(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(sym(name), Arc::from(Vec::new()))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(sym(name), Arc::from(args))
    }

    pub fn prefix(action: &str, body: Term) -> Term {
        Term::Prefix(sym(action), Arc::new(body))
    }

    pub fn nil() -> Term {
        Term::constant("0")
    }

    pub fn sink() -> Term {
        Term::constant(SINK)
    }

    pub fn sum(left: Term, right: Term) -> Term {
        Term::app("+", vec![left, right])
    }

    /// Right-nested sum of `terms`; the empty sum is `0`.
    pub fn sum_of(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = terms.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::nil();
        };
        while let Some(t) = items.pop() {
            acc = Term::sum(t, acc);
        }
        acc
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) => *s,
            Term::Data(_) => Sort::Data,
            Term::App(..) | Term::Prefix(..) => Sort::Process,
        }
    }

    pub fn head(&self) -> &str {
        match self {
            Term::Var(n, _) | Term::Data(n) | Term::App(n, _) | Term::Prefix(n, _) => n,
        }
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Prefix(_, body) => std::slice::from_ref(body.as_ref()),
            _ => &[],
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(..) => false,
            Term::Data(_) => true,
            _ => self.children().iter().all(Term::is_closed),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(..))
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(Term::depth).max().unwrap_or(0)
    }

    /// Variables in left-to-right occurrence order, with repetitions.
    pub fn var_occurrences(&self) -> Vec<(Symbol, Sort)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<(Symbol, Sort)>) {
        match self {
            Term::Var(n, s) => out.push((n.clone(), *s)),
            _ => self.children().iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.var_occurrences().into_iter().map(|(n, _)| n).collect()
    }

    pub fn is_sum(&self) -> bool {
        matches!(self, Term::App(n, args) if &**n == "+" && args.len() == 2)
    }

    /// Summands of a right- or left-nested `+` tree, in order.
    pub fn summands(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if t.is_sum() {
                let c = t.children();
                stack.push(&c[1]);
                stack.push(&c[0]);
            } else {
                out.push(t);
            }
        }
        out
    }

    /// Rebuilds the term bottom-up with `f` applied to every node.
    pub fn map_vars(&self, f: &mut impl FnMut(&Symbol, Sort) -> Term) -> Term {
        match self {
            Term::Var(n, s) => f(n, *s),
            Term::Data(_) => self.clone(),
            Term::App(op, args) => Term::App(
                op.clone(),
                args.iter().map(|a| a.map_vars(f)).collect::<Vec<_>>().into(),
            ),
            Term::Prefix(a, body) => Term::Prefix(a.clone(), Arc::new(body.map_vars(f))),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Var(..) => 0,
            Term::Data(_) => 1,
            Term::App(..) => 2,
            Term::Prefix(..) => 3,
        }
    }
}

impl Ord for Term {
    /// Canonical ordering: head name, then node kind, then children lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.head()
            .cmp(other.head())
            .then_with(|| self.rank().cmp(&other.rank()))
            .then_with(|| match (self, other) {
                (Term::Var(_, a), Term::Var(_, b)) => a.cmp(b),
                _ => self.children().iter().cmp(other.children().iter()),
            })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) | Term::Data(n) => f.write_str(n),
            Term::App(_, args) if self.is_sum() => {
                if args[0].is_sum() {
                    write!(f, "({}) + {}", args[0], args[1])
                } else {
                    write!(f, "{} + {}", args[0], args[1])
                }
            }
            Term::App(op, args) if args.is_empty() => f.write_str(op),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Prefix(a, body) if body.is_sum() => write!(f, "{a}.({body})"),
            Term::Prefix(a, body) => write!(f, "{a}.{body}"),
        }
    }
}

/// A sort-preserving finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subst(BTreeMap<Symbol, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: Symbol, term: Term) -> Option<Term> {
        self.0.insert(name, term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.0.iter()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    /// Keeps only the bindings whose key is in `names`.
    pub fn restrict(&self, names: &BTreeSet<Symbol>) -> Subst {
        Subst(
            self.0
                .iter()
                .filter(|(k, _)| names.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Homomorphic replacement of mapped variables; unmapped variables stay.
    pub fn apply(&self, t: &Term) -> Result<Term, TermError> {
        let mut err = None;
        let out = t.map_vars(&mut |n, s| match self.0.get(n) {
            Some(img) if img.sort() != s => {
                err.get_or_insert(TermError::SortClash {
                    name: n.clone(),
                    expected: s,
                    found: img.sort(),
                });
                Term::Var(n.clone(), s)
            }
            Some(img) => img.clone(),
            None => Term::Var(n.clone(), s),
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

impl FromIterator<(Symbol, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        Subst(iter.into_iter().collect())
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

pub fn apply_subst(s: &Subst, t: &Term) -> Result<Term, TermError> {
    s.apply(t)
}

/// Matches a linear `pattern` against a closed `subject`.
///
/// Returns `Ok(None)` when no substitution exists.
pub fn match_term(pattern: &Term, subject: &Term) -> Result<Option<Subst>, TermError> {
    let mut seen = BTreeSet::new();
    for (n, _) in pattern.var_occurrences() {
        if !seen.insert(n.clone()) {
            return Err(TermError::NonLinearPattern(n));
        }
    }
    let mut s = Subst::new();
    Ok(match_into(&mut s, pattern, subject).then_some(s))
}

/// Extends `s` so that `s(pattern) = subject`. Already-bound variables must
/// agree with the subject. On failure `s` may hold partial bindings.
pub(crate) fn match_into(s: &mut Subst, pattern: &Term, subject: &Term) -> bool {
    match (pattern, subject) {
        (Term::Var(n, sort), _) => {
            if subject.sort() != *sort {
                return false;
            }
            match s.0.get(n) {
                Some(bound) => bound == subject,
                None => {
                    s.0.insert(n.clone(), subject.clone());
                    true
                }
            }
        }
        (Term::Data(a), Term::Data(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| match_into(s, x, y))
        }
        (Term::Prefix(a, x), Term::Prefix(b, y)) => a == b && match_into(s, x, y),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: Symbol,
    pub args: Vec<Sort>,
}

impl OpDecl {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// Extensional table over data constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: Symbol,
    pub arity: usize,
    pub rows: BTreeSet<Vec<Symbol>>,
}

impl Predicate {
    pub fn holds(&self, args: &[Symbol]) -> bool {
        self.rows.contains(args)
    }
}

/// Process operators, the finite data carrier, action labels and predicate tables.
///
/// The reserved constant [`SINK`] and the reserved label [`TERMINATION`] are
/// always present and never listed by the accessors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<OpDecl>,
    data: Vec<Symbol>,
    labels: Vec<Symbol>,
    predicates: Vec<Predicate>,
    op_index: HashMap<Symbol, usize>,
    data_index: HashMap<Symbol, usize>,
    label_index: HashMap<Symbol, usize>,
    pred_index: HashMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn add_op(&mut self, name: &str, args: Vec<Sort>) -> Result<(), SignatureError> {
        if name == SINK {
            return Err(SignatureError::Reserved(sym(name)));
        }
        let name = sym(name);
        if self.op_index.contains_key(&name) {
            return Err(SignatureError::Duplicate { kind: "operator", name });
        }
        self.op_index.insert(name.clone(), self.ops.len());
        self.ops.push(OpDecl { name, args });
        Ok(())
    }

    pub fn add_data(&mut self, name: &str) -> Result<(), SignatureError> {
        let name = sym(name);
        if self.data_index.contains_key(&name) {
            return Err(SignatureError::Duplicate { kind: "data constant", name });
        }
        self.data_index.insert(name.clone(), self.data.len());
        self.data.push(name);
        Ok(())
    }

    pub fn add_label(&mut self, name: &str) -> Result<(), SignatureError> {
        if name == TERMINATION {
            return Err(SignatureError::Reserved(sym(name)));
        }
        let name = sym(name);
        if self.label_index.contains_key(&name) {
            return Err(SignatureError::Duplicate { kind: "label", name });
        }
        self.label_index.insert(name.clone(), self.labels.len());
        self.labels.push(name);
        Ok(())
    }

    pub fn add_predicate(
        &mut self,
        name: &str,
        arity: usize,
        rows: impl IntoIterator<Item = Vec<Symbol>>,
    ) -> Result<(), SignatureError> {
        let name = sym(name);
        if self.pred_index.contains_key(&name) {
            return Err(SignatureError::Duplicate { kind: "predicate", name });
        }
        let mut table = BTreeSet::new();
        for row in rows {
            if row.len() != arity {
                return Err(SignatureError::PredicateWidth {
                    pred: name,
                    expected: arity,
                    found: row.len(),
                });
            }
            if let Some(c) = row.iter().find(|c| !self.data_index.contains_key(*c)) {
                return Err(SignatureError::PredicateConstant {
                    pred: name,
                    constant: c.clone(),
                });
            }
            table.insert(row);
        }
        self.pred_index.insert(name.clone(), self.predicates.len());
        self.predicates.push(Predicate { name, arity, rows: table });
        Ok(())
    }

    /// Checks the invariants that cannot be enforced incrementally.
    pub fn check(&self) -> Result<(), SignatureError> {
        if self.data.is_empty() {
            return Err(SignatureError::EmptyCarrier);
        }
        Ok(())
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.op_index.get(name).map(|&i| &self.ops[i])
    }

    pub fn has_op(&self, name: &str) -> bool {
        name == SINK || self.op_index.contains_key(name)
    }

    /// Argument sorts of `name`, including the reserved sink.
    pub fn op_args(&self, name: &str) -> Option<&[Sort]> {
        if name == SINK {
            return Some(&[]);
        }
        self.op(name).map(|d| d.args.as_slice())
    }

    pub fn data_constants(&self) -> &[Symbol] {
        &self.data
    }

    pub fn data_position(&self, name: &str) -> Option<usize> {
        self.data_index.get(name).copied()
    }

    pub fn has_data(&self, name: &str) -> bool {
        self.data_index.contains_key(name)
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn has_label(&self, name: &str) -> bool {
        name == TERMINATION || self.label_index.contains_key(name)
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.pred_index.get(name).map(|&i| &self.predicates[i])
    }

    /// Checks arity and argument sorts of every node, returning the term's sort.
    pub fn sort_check(&self, t: &Term) -> Result<Sort, TermError> {
        match t {
            Term::Var(_, s) => Ok(*s),
            Term::Data(n) => {
                if self.has_data(n) {
                    Ok(Sort::Data)
                } else {
                    Err(TermError::UnknownData(n.clone()))
                }
            }
            Term::Prefix(a, body) => {
                if !self.label_index.contains_key(a) {
                    return Err(TermError::UnknownLabel(a.clone()));
                }
                self.expect_sort(body, Sort::Process).map(|()| Sort::Process)
            }
            Term::App(op, args) => {
                let sorts = self
                    .op_args(op)
                    .ok_or_else(|| TermError::UnknownOperator(op.clone()))?;
                if sorts.len() != args.len() {
                    return Err(TermError::Arity {
                        name: op.clone(),
                        expected: sorts.len(),
                        found: args.len(),
                    });
                }
                for (a, s) in args.iter().zip(sorts) {
                    self.expect_sort(a, *s)?;
                }
                Ok(Sort::Process)
            }
        }
    }

    fn expect_sort(&self, t: &Term, expected: Sort) -> Result<(), TermError> {
        let found = self.sort_check(t)?;
        if found != expected {
            return Err(TermError::SortClash {
                name: sym(t.head()),
                expected,
                found,
            });
        }
        Ok(())
    }

    /// Sort-checks `t` and requires it to be a closed process term.
    pub fn check_closed_process(&self, t: &Term) -> Result<(), TermError> {
        self.expect_sort(t, Sort::Process)?;
        if let Some((n, _)) = t.var_occurrences().into_iter().next() {
            return Err(TermError::Open(n));
        }
        Ok(())
    }
}

/// The finite carrier of closed data terms, in declaration order.
pub fn enumerate_closed_data(sig: &Signature) -> Vec<Term> {
    sig.data_constants().iter().cloned().map(Term::Data).collect()
}
