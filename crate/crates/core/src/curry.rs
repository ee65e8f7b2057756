//! Currying: data moves from configurations into `(before, action, after)`
//! labels, and label closure instantiates the remaining data variables over
//! the finite carrier.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::term::{match_into, Signature, Subst, Symbol, Term};
use crate::tss::{
    conditions_hold, data_assignments, explore, Bounds, CurriedLabel, Flavor, HeadKey, Lts, Rule,
    StepError, Tss,
};

/// The curried version of a with-data rule. Process parts are unchanged.
pub fn curry_rule(rule: &Rule) -> Rule {
    Rule {
        flavor: Flavor::Curried,
        ..rule.clone()
    }
}

/// Inverse of [`curry_rule`].
pub fn uncurry_rule(rule: &Rule) -> Rule {
    Rule {
        flavor: Flavor::WithData,
        ..rule.clone()
    }
}

pub fn curry(tss: &Tss) -> Tss {
    Tss::new(tss.sig.clone(), tss.rules.iter().map(curry_rule).collect())
}

pub fn uncurry(tss: &Tss) -> Tss {
    Tss::new(tss.sig.clone(), tss.rules.iter().map(uncurry_rule).collect())
}

/// A closed-label instance of a curried rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedRule {
    /// Name of the curried rule this instance came from.
    pub origin: Symbol,
    /// The closed data substitution that produced it.
    pub data: Subst,
    /// The instance itself: every label is closed and no side conditions remain.
    pub rule: Rule,
}

impl ClosedRule {
    pub fn conclusion_label(&self) -> CurriedLabel {
        let c = &self.rule.conclusion;
        CurriedLabel {
            before: Symbol::from(c.before.head()),
            action: c.action.clone(),
            after: Symbol::from(c.after.head()),
        }
    }
}

/// The closed-label version of a curried system.
#[derive(Clone, Debug)]
pub struct ClosedTss {
    pub sig: Arc<Signature>,
    pub rules: Vec<ClosedRule>,
    by_head: HashMap<HeadKey, Vec<usize>>,
}

impl ClosedTss {
    fn new(sig: Arc<Signature>, rules: Vec<ClosedRule>) -> Self {
        let mut by_head: HashMap<HeadKey, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_head.entry(r.rule.defines()).or_default().push(i);
        }
        ClosedTss { sig, rules, by_head }
    }

    pub fn rules_for(&self, t: &Term) -> impl Iterator<Item = &ClosedRule> {
        self.rules_defining(&HeadKey::of(t))
    }

    pub fn rules_defining<'a>(&'a self, key: &HeadKey) -> impl Iterator<Item = &'a ClosedRule> + 'a {
        self.by_head
            .get(key)
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    /// Number of instances that came from the curried rule `origin`.
    pub fn instance_count(&self, origin: &str) -> usize {
        self.rules.iter().filter(|r| &*r.origin == origin).count()
    }

    /// Every label appearing in a rule instance.
    pub fn labels(&self) -> BTreeSet<CurriedLabel> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.insert(r.conclusion_label());
            for p in &r.rule.premises {
                out.insert(CurriedLabel {
                    before: Symbol::from(p.before.head()),
                    action: p.action.clone(),
                    after: Symbol::from(p.after.head()),
                });
            }
        }
        out
    }
}

/// Instantiates every data variable of every rule over the carrier, keeping
/// the instances whose side conditions hold.
pub fn close_labels(tss: &Tss) -> Result<ClosedTss, StepError> {
    let sig = tss.sig.clone();
    let mut rules = Vec::new();
    for rule in &tss.rules {
        let vars = rule.data_vars();
        let mut k = 0;
        for xi in data_assignments(&sig, Subst::new(), &vars) {
            if !conditions_hold(&sig, &rule.conditions, &xi)? {
                continue;
            }
            let mut inst = instantiate(rule, &xi)?;
            inst.name = Symbol::from(format!("{}_{k}", rule.name).as_str());
            k += 1;
            rules.push(ClosedRule {
                origin: rule.name.clone(),
                rule: inst,
                data: xi,
            });
        }
    }
    Ok(ClosedTss::new(sig, rules))
}

fn instantiate(rule: &Rule, xi: &Subst) -> Result<Rule, StepError> {
    let mut out = curry_rule(rule);
    let c = &mut out.conclusion;
    c.source = xi.apply(&c.source)?;
    c.before = xi.apply(&c.before)?;
    c.target = xi.apply(&c.target)?;
    c.after = xi.apply(&c.after)?;
    for p in &mut out.premises {
        p.before = xi.apply(&p.before)?;
        p.after = xi.apply(&p.after)?;
    }
    out.conditions.clear();
    Ok(out)
}

/// Derives transitions of a closed-label system, memoizing subterm results.
pub struct CurriedStepper<'a> {
    tss: &'a ClosedTss,
    cache: HashMap<Term, Arc<Vec<(CurriedLabel, Term)>>>,
}

impl<'a> CurriedStepper<'a> {
    pub fn new(tss: &'a ClosedTss) -> Self {
        CurriedStepper {
            tss,
            cache: HashMap::new(),
        }
    }

    pub fn step(&mut self, p: &Term) -> Result<Arc<Vec<(CurriedLabel, Term)>>, StepError> {
        if let Some(hit) = self.cache.get(p) {
            return Ok(hit.clone());
        }
        let mut out = BTreeSet::new();
        let tss = self.tss;
        for inst in tss.rules_for(p) {
            let mut s = Subst::new();
            if match_into(&mut s, &inst.rule.conclusion.source, p) {
                self.premises(inst, 0, s, &mut out)?;
            }
        }
        let result = Arc::new(out.into_iter().collect::<Vec<_>>());
        self.cache.insert(p.clone(), result.clone());
        Ok(result)
    }

    fn premises(
        &mut self,
        inst: &ClosedRule,
        idx: usize,
        s: Subst,
        out: &mut BTreeSet<(CurriedLabel, Term)>,
    ) -> Result<(), StepError> {
        let rule = &inst.rule;
        let Some(prem) = rule.premises.get(idx) else {
            out.insert((inst.conclusion_label(), s.apply(&rule.conclusion.target)?));
            return Ok(());
        };
        let wanted = CurriedLabel {
            before: Symbol::from(prem.before.head()),
            action: prem.action.clone(),
            after: Symbol::from(prem.after.head()),
        };
        let source = s.apply(&prem.source)?;
        for (label, target) in self.step(&source)?.iter() {
            if *label != wanted {
                continue;
            }
            let mut s2 = s.clone();
            if match_into(&mut s2, &prem.target, target) {
                self.premises(inst, idx + 1, s2, out)?;
            }
        }
        Ok(())
    }
}

pub fn curried_step(tss: &ClosedTss, p: &Term) -> Result<Vec<(CurriedLabel, Term)>, StepError> {
    Ok(CurriedStepper::new(tss).step(p)?.as_ref().clone())
}

/// Explores a closed-label system from `roots`.
pub fn build_curried_lts(tss: &ClosedTss, roots: &[Term], bounds: Bounds) -> Result<Lts, StepError> {
    let mut stepper = CurriedStepper::new(tss);
    explore(roots, bounds, |p| Ok(stepper.step(p)?.as_ref().clone()))
}
