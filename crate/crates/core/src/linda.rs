//! Linda over a finite tuple alphabet: the fifteen with-data rules, a
//! set-valued (or bounded multiset) carrier, random closed terms and the
//! algebraic-property regression suite.

use std::fmt::{self, Write};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::bisim::{stateless_bisim_direct, BisimError, StrongOracle};
use crate::curry::curry;
use crate::formats::{check_comm_form, CommReport, FormatError};
use crate::syntax::{parse_spec, SpecFile};
use crate::term::{sym, Term};
use crate::tss::Bounds;

/// The internal action of every Linda step.
pub const TAU: &str = "tau";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LindaError {
    #[error("the tuple alphabet is empty")]
    EmptyAlphabet,
    #[error("`{0}` is not a valid tuple name")]
    BadTuple(String),
    #[error("tuple `{0}` appears twice")]
    DuplicateTuple(String),
    #[error("multiset capacity must be at least 1")]
    ZeroCap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LindaConfig {
    pub alphabet: Vec<String>,
    /// `None` for sets; `Some(b)` for multisets holding each tuple at most `b` times.
    pub multiset_cap: Option<usize>,
}

impl LindaConfig {
    pub fn sets(alphabet: &[&str]) -> Self {
        LindaConfig {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            multiset_cap: None,
        }
    }

    fn validate(&self) -> Result<(), LindaError> {
        if self.alphabet.is_empty() {
            return Err(LindaError::EmptyAlphabet);
        }
        for (i, u) in self.alphabet.iter().enumerate() {
            let ok = u.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && u.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(LindaError::BadTuple(u.clone()));
            }
            if self.alphabet[..i].contains(u) {
                return Err(LindaError::DuplicateTuple(u.clone()));
            }
        }
        if self.multiset_cap == Some(0) {
            return Err(LindaError::ZeroCap);
        }
        Ok(())
    }

    fn cap(&self) -> usize {
        self.multiset_cap.unwrap_or(1)
    }

    /// Every store as a vector of tuple counts, in carrier order: counts read
    /// as digits in base `cap + 1`, first tuple least significant.
    pub fn stores(&self) -> Vec<Vec<usize>> {
        let base = self.cap() + 1;
        let n = self.alphabet.len();
        (0..base.pow(n as u32))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let c = k % base;
                        k /= base;
                        c
                    })
                    .collect()
            })
            .collect()
    }

    pub fn store_name(&self, counts: &[usize]) -> String {
        let items: Vec<&str> = self
            .alphabet
            .iter()
            .zip(counts)
            .flat_map(|(u, &c)| std::iter::repeat_n(u.as_str(), c))
            .collect();
        format!("{{{}}}", items.join(","))
    }

    /// Carrier constant names in carrier order.
    pub fn carrier(&self) -> Vec<String> {
        self.stores().iter().map(|c| self.store_name(c)).collect()
    }
}

fn predicate_text(cfg: &LindaConfig) -> String {
    let stores = cfg.stores();
    let name = |c: &[usize]| cfg.store_name(c);
    let mut out = String::new();
    for (i, u) in cfg.alphabet.iter().enumerate() {
        let has: Vec<String> = stores.iter().filter(|c| c[i] > 0).map(|c| name(c)).collect();
        let notin: Vec<String> = stores.iter().filter(|c| c[i] == 0).map(|c| name(c)).collect();
        let mut ins = Vec::new();
        let mut del = Vec::new();
        for c in &stores {
            let mut up = c.clone();
            if cfg.multiset_cap.is_none() {
                up[i] = 1;
                ins.push(format!("({},{})", name(c), name(&up)));
            } else if c[i] < cfg.cap() {
                up[i] += 1;
                ins.push(format!("({},{})", name(c), name(&up)));
            }
            if c[i] > 0 {
                let mut down = c.clone();
                down[i] -= 1;
                del.push(format!("({},{})", name(c), name(&down)));
            }
        }
        let _ = writeln!(out, "pred has_{u} {{ {} }}", has.join(" "));
        let _ = writeln!(out, "pred notin_{u} {{ {} }}", notin.join(" "));
        let _ = writeln!(out, "pred ins_{u}/2 {{ {} }}", ins.join(" "));
        let _ = writeln!(out, "pred del_{u}/2 {{ {} }}", del.join(" "));
    }
    out
}

const COMPOSITION_RULES: &str = "
rule r6 {
  (x, d) -term-> (x1, d)
  ---
  (x + y, d) -term-> (SINK, d)
}

rule r7 {
  (y, d) -term-> (y1, d)
  ---
  (x + y, d) -term-> (SINK, d)
}

rule r8 {
  (x, d) -tau-> (x1, e)
  ---
  (x + y, d) -tau-> (x1, e)
}

rule r9 {
  (y, d) -tau-> (y1, e)
  ---
  (x + y, d) -tau-> (y1, e)
}

rule r10 {
  (x, d) -tau-> (x1, e)
  ---
  (seq(x,y), d) -tau-> (seq(x1,y), e)
}

rule r11 {
  (x, d) -term-> (x1, d)
  (y, d) -tau-> (y1, e)
  ---
  (seq(x,y), d) -tau-> (y1, e)
}

rule r12 {
  (x, d) -term-> (x1, d)
  (y, d) -term-> (y1, d)
  ---
  (seq(x,y), d) -term-> (SINK, d)
}

rule r13 {
  (x, d) -tau-> (x1, e)
  ---
  (par(x,y), d) -tau-> (par(x1,y), e)
}

rule r14 {
  (y, d) -tau-> (y1, e)
  ---
  (par(x,y), d) -tau-> (par(x,y1), e)
}

rule r15 {
  (x, d) -term-> (x1, d)
  (y, d) -term-> (y1, d)
  ---
  (par(x,y), d) -term-> (SINK, d)
}
";

/// The with-data specification of Linda. Tuple constants are indexed,
/// `ask(u)`, and rules (2) to (5) have one instance per tuple, `r2_u`.
pub fn linda_tss(cfg: &LindaConfig) -> Result<SpecFile, LindaError> {
    cfg.validate()?;
    let mut text = String::from("sorts P D\n");
    let _ = writeln!(text, "data {{ {} }}", cfg.carrier().join(" "));
    let _ = writeln!(text, "labels {{ {TAU} }}");
    text.push_str("ops {\n  eps/0\n");
    for u in &cfg.alphabet {
        for c in ["ask", "nask", "tell", "get"] {
            let _ = writeln!(text, "  {c}({u})/0");
        }
    }
    text.push_str("  +/2 PP\n  seq/2 PP\n  par/2 PP\n}\n");
    text.push_str(&predicate_text(cfg));
    text.push_str("\nrule r1 {\n  ---\n  (eps, d) -term-> (SINK, d)\n}\n");
    let atoms = [
        ("r2", "ask", "d", "has_{u}(d)"),
        ("r3", "tell", "e", "ins_{u}(d,e)"),
        ("r4", "get", "e", "del_{u}(d,e)"),
        ("r5", "nask", "d", "notin_{u}(d)"),
    ];
    for (r, c, after, cond) in atoms {
        for u in &cfg.alphabet {
            let cond = cond.replace("{u}", u);
            let _ = write!(
                text,
                "\nrule {r}_{u} {{\n  ---\n  ({c}({u}), d) -{TAU}-> (eps, {after})\n  where {cond}\n}}\n"
            );
        }
    }
    text.push_str(COMPOSITION_RULES);
    Ok(parse_spec(&text).expect("generated Linda text parses"))
}

/// `eps` or a tuple operation on a random tuple.
fn random_atom(cfg: &LindaConfig, rng: &mut impl Rng) -> Term {
    let u = &cfg.alphabet[rng.gen_range(0..cfg.alphabet.len())];
    match rng.gen_range(0..5) {
        0 => Term::constant("eps"),
        1 => Term::constant(&format!("ask({u})")),
        2 => Term::constant(&format!("nask({u})")),
        3 => Term::constant(&format!("tell({u})")),
        _ => Term::constant(&format!("get({u})")),
    }
}

/// A random closed Linda term with `leaves` constants.
pub fn random_linda_term(cfg: &LindaConfig, rng: &mut impl Rng, leaves: usize) -> Term {
    if leaves <= 1 {
        return random_atom(cfg, rng);
    }
    let left = rng.gen_range(1..leaves);
    let op = ["+", "seq", "par"][rng.gen_range(0..3)];
    Term::app(
        op,
        vec![random_linda_term(cfg, rng, left), random_linda_term(cfg, rng, leaves - left)],
    )
}

/// One row of the algebraic-property table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Law {
    AssocSeq,
    AssocChoice,
    AssocPar,
    IdemChoice,
    UnitSeq,
    DistribChoiceSeq,
}

impl Law {
    pub const ALL: [Law; 6] = [
        Law::AssocSeq,
        Law::AssocChoice,
        Law::AssocPar,
        Law::IdemChoice,
        Law::UnitSeq,
        Law::DistribChoiceSeq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::AssocSeq => "associativity of ;",
            Law::AssocChoice => "associativity of +",
            Law::AssocPar => "associativity of ||",
            Law::IdemChoice => "idempotence of +",
            Law::UnitSeq => "unit of ;",
            Law::DistribChoiceSeq => "distributivity of + over ;",
        }
    }

    pub fn equation(self) -> &'static str {
        match self {
            Law::AssocSeq => "seq(x,seq(y,z)) = seq(seq(x,y),z)",
            Law::AssocChoice => "x + (y + z) = (x + y) + z",
            Law::AssocPar => "par(x,par(y,z)) = par(par(x,y),z)",
            Law::IdemChoice => "x + x = x",
            Law::UnitSeq => "seq(eps,x) = x",
            Law::DistribChoiceSeq => "seq(x + y,z) = seq(x,z) + seq(y,z)",
        }
    }

    /// Both sides of the law with `x`, `y`, `z` replaced.
    pub fn instance(self, x: &Term, y: &Term, z: &Term) -> (Term, Term) {
        let (x, y, z) = (x.clone(), y.clone(), z.clone());
        let seq = |a, b| Term::app("seq", vec![a, b]);
        let par = |a, b| Term::app("par", vec![a, b]);
        match self {
            Law::AssocSeq => (seq(x.clone(), seq(y.clone(), z.clone())), seq(seq(x, y), z)),
            Law::AssocChoice => (
                Term::sum(x.clone(), Term::sum(y.clone(), z.clone())),
                Term::sum(Term::sum(x, y), z),
            ),
            Law::AssocPar => (par(x.clone(), par(y.clone(), z.clone())), par(par(x, y), z)),
            Law::IdemChoice => (Term::sum(x.clone(), x.clone()), x),
            Law::UnitSeq => (seq(Term::constant("eps"), x.clone()), x),
            Law::DistribChoiceSeq => (
                seq(Term::sum(x.clone(), y.clone()), z.clone()),
                Term::sum(seq(x, z.clone()), seq(y, z)),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub lhs: String,
    pub rhs: String,
    pub direct: Option<bool>,
    pub curried: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub law: Law,
    pub name: &'static str,
    pub equation: &'static str,
    pub instances: usize,
    pub direct_pass: usize,
    pub curried_pass: usize,
    pub failures: Vec<Counterexample>,
}

impl RowReport {
    pub fn pass(&self) -> bool {
        self.direct_pass == self.instances && self.curried_pass == self.instances
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub alphabet: Vec<String>,
    pub multiset_cap: Option<usize>,
    pub seed: u64,
    pub rows: Vec<RowReport>,
    pub comm_pass: bool,
    pub comm: CommReport,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.comm_pass && self.rows.iter().all(RowReport::pass)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {{{}}}, seed {}", self.alphabet.join(","), self.seed)?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<5} {:<28} {:<40} {:>4} instances, direct {}/{}, curried {}/{}",
                if r.pass() { "PASS" } else { "FAIL" },
                r.name,
                r.equation,
                r.instances,
                r.direct_pass,
                r.instances,
                r.curried_pass,
                r.instances
            )?;
            for c in &r.failures {
                writeln!(f, "      {} vs {}", c.lhs, c.rhs)?;
            }
        }
        writeln!(f, "{:<5} commutativity format for +, par", if self.comm_pass { "PASS" } else { "FAIL" })?;
        write!(f, "{}", self.comm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Linda(#[from] LindaError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Suite parameters; `leaves` bounds the size of each sampled variable.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub samples: usize,
    pub seed: u64,
    pub leaves: usize,
    pub bounds: Bounds,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            samples: 50,
            seed: 0,
            leaves: 3,
            bounds: Bounds::default(),
        }
    }
}

/// Checks every table row on `samples` random instances by both stateless
/// routes, and the commutativity format for `+` and `par`.
pub fn linda_regression_suite(cfg: &LindaConfig, opts: &SuiteOptions) -> Result<SuiteReport, SuiteError> {
    let spec = linda_tss(cfg)?;
    let tss = spec.tss();
    let oracle = StrongOracle::from_curried(&curry(&tss), opts.bounds)?;
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut rows = Vec::new();
    for law in Law::ALL {
        let mut row = RowReport {
            law,
            name: law.name(),
            equation: law.equation(),
            instances: opts.samples,
            direct_pass: 0,
            curried_pass: 0,
            failures: Vec::new(),
        };
        for _ in 0..opts.samples {
            let mut pick = || {
                let n = rng.gen_range(1..=opts.leaves.max(1));
                random_linda_term(cfg, &mut rng, n)
            };
            let (x, y, z) = (pick(), pick(), pick());
            let (lhs, rhs) = law.instance(&x, &y, &z);
            let direct = stateless_bisim_direct(&tss, &lhs, &rhs, opts.bounds)?;
            let curried = oracle.equivalent(&lhs, &rhs)?;
            row.direct_pass += usize::from(direct);
            row.curried_pass += usize::from(curried);
            if !(direct && curried) {
                row.failures.push(Counterexample {
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                    direct: Some(direct),
                    curried: Some(curried),
                });
            }
        }
        rows.push(row);
    }
    let comm = check_comm_form(&curry(&tss), &[sym("+"), sym("par")])?;
    Ok(SuiteReport {
        alphabet: cfg.alphabet.clone(),
        multiset_cap: cfg.multiset_cap,
        seed: opts.seed,
        rows,
        comm_pass: comm.pass,
        comm,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::curry::{close_labels, curried_step};
    use crate::tss::{step, CurriedLabel};

    fn uv() -> LindaConfig {
        LindaConfig::sets(&["u", "v"])
    }

    #[test]
    fn carrier_shapes() {
        assert_eq!(LindaConfig::sets(&["u"]).carrier(), ["{}", "{u}"]);
        assert_eq!(uv().carrier(), ["{}", "{u}", "{v}", "{u,v}"]);
        let ms = LindaConfig {
            alphabet: vec!["u".into()],
            multiset_cap: Some(2),
        };
        assert_eq!(ms.carrier(), ["{}", "{u}", "{u,u}"]);
        assert_eq!(linda_tss(&LindaConfig::sets(&[])).unwrap_err(), LindaError::EmptyAlphabet);
        assert!(linda_tss(&LindaConfig::sets(&["u", "u"])).is_err());
    }

    #[test]
    fn single_tuple_spec_shape() {
        let spec = linda_tss(&LindaConfig::sets(&["u"])).unwrap();
        assert_eq!(spec.rules.len(), 15);
        let constants = spec.sig.ops().iter().filter(|o| o.arity() == 0).count();
        assert_eq!(constants, 5);
        assert_eq!(spec.sig.ops().len() - constants, 3);
        assert!(spec.validate().is_ok(), "{:?}", spec.validate());
        assert_eq!(linda_tss(&uv()).unwrap().rules.len(), 19);
    }

    #[test]
    fn bundled_spec_is_canonical() {
        let text = include_str!("../specs/linda.sos");
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.to_string(), text);
        assert_eq!(spec, linda_tss(&LindaConfig::sets(&["u"])).unwrap());
    }

    #[test]
    fn atom_steps() {
        let spec = linda_tss(&uv()).unwrap();
        let tss = spec.tss();
        let t = |s: &str| spec.parse_term(s).unwrap();
        let tell = step(&tss, &t("tell(u)"), &sym("{}")).unwrap();
        assert_eq!(tell.len(), 1);
        assert_eq!((&*tell[0].after, tell[0].target.to_string().as_str()), ("{u}", "eps"));
        for d in ["{u}", "{u,v}"] {
            assert!(step(&tss, &t("nask(u)"), &sym(d)).unwrap().is_empty());
            assert_eq!(step(&tss, &t("ask(u)"), &sym(d)).unwrap().len(), 1);
        }
        for d in ["{}", "{v}"] {
            assert!(step(&tss, &t("ask(u)"), &sym(d)).unwrap().is_empty());
            assert!(step(&tss, &t("get(u)"), &sym(d)).unwrap().is_empty());
        }
        let choice = step(&tss, &t("ask(u) + tell(v)"), &sym("{u}")).unwrap();
        let afters: BTreeSet<&str> = choice.iter().map(|tr| &*tr.after).collect();
        assert_eq!(afters, BTreeSet::from(["{u}", "{u,v}"]));
    }

    #[test]
    fn curried_get_removes_the_tuple() {
        let spec = linda_tss(&uv()).unwrap();
        let closed = close_labels(&curry(&spec.tss())).unwrap();
        let labels: BTreeSet<CurriedLabel> = curried_step(&closed, &spec.parse_term("get(u)").unwrap())
            .unwrap()
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(
            labels,
            BTreeSet::from([CurriedLabel::new("{u}", TAU, "{}"), CurriedLabel::new("{u,v}", TAU, "{v}")])
        );
        assert_eq!(closed.instance_count("r5_u"), 2);
        assert_eq!(closed.instance_count("r3_u"), 4);
    }

    #[test]
    fn seq_has_no_mirror() {
        let spec = linda_tss(&uv()).unwrap();
        let report = check_comm_form(&curry(&spec.tss()), &[sym("seq")]).unwrap();
        assert!(!report.pass);
        assert!(report.missing_mirrors().contains(&"r10"));
        let ok = check_comm_form(&curry(&spec.tss()), &[sym("+"), sym("par")]).unwrap();
        assert!(ok.pass, "{ok}");
    }

    #[test]
    fn table_examples() {
        let spec = linda_tss(&uv()).unwrap();
        let tss = spec.tss();
        let t = |s: &str| spec.parse_term(s).unwrap();
        let b = Bounds::default();
        assert!(stateless_bisim_direct(&tss, &t("tell(u) + tell(u)"), &t("tell(u)"), b).unwrap());
        let (l, r) = Law::DistribChoiceSeq.instance(&t("ask(u)"), &t("tell(v)"), &t("get(u)"));
        assert!(stateless_bisim_direct(&tss, &l, &r, b).unwrap());
        let (l, r) = Law::AssocPar.instance(&t("tell(u)"), &t("get(u)"), &t("ask(v)"));
        assert!(stateless_bisim_direct(&tss, &l, &r, b).unwrap());
        assert!(!stateless_bisim_direct(&tss, &t("ask(u)"), &t("tell(u)"), b).unwrap());
    }

    #[test]
    fn small_suite_passes() {
        let opts = SuiteOptions {
            samples: 5,
            ..SuiteOptions::default()
        };
        let report = linda_regression_suite(&uv(), &opts).unwrap();
        assert!(report.pass(), "{report}");
    }
}
