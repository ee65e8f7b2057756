use std::fmt::{self, Write};

use super::SpecFile;
use crate::curry::ClosedTss;
use crate::term::Sort;
use crate::tss::{Flavor, Rule};

fn transition(
    out: &mut impl Write,
    flavor: Flavor,
    parts: (&crate::Term, &crate::Term, &str, &crate::Term, &crate::Term),
) -> fmt::Result {
    let (source, before, action, target, after) = parts;
    match flavor {
        Flavor::WithData => write!(out, "({source}, {before}) -{action}-> ({target}, {after})"),
        Flavor::Curried => write!(out, "{source} -({before},{action},{after})-> {target}"),
    }
}

/// Writes one rule block in canonical form.
pub fn write_rule(out: &mut impl Write, rule: &Rule) -> fmt::Result {
    writeln!(out, "rule {} {{", rule.name)?;
    for p in &rule.premises {
        out.write_str("  ")?;
        transition(out, rule.flavor, (&p.source, &p.before, &p.action, &p.target, &p.after))?;
        out.write_char('\n')?;
    }
    out.write_str("  ---\n  ")?;
    let c = &rule.conclusion;
    transition(out, rule.flavor, (&c.source, &c.before, &c.action, &c.target, &c.after))?;
    out.write_char('\n')?;
    if !rule.conditions.is_empty() {
        out.write_str("  where ")?;
        for (i, cond) in rule.conditions.iter().enumerate() {
            if i > 0 {
                out.write_str(", ")?;
            }
            write!(out, "{}(", cond.pred)?;
            for (j, a) in cond.args.iter().enumerate() {
                if j > 0 {
                    out.write_char(',')?;
                }
                write!(out, "{a}")?;
            }
            out.write_char(')')?;
        }
        out.write_char('\n')?;
    }
    out.write_str("}\n")
}

fn write_header(out: &mut impl Write, spec: &SpecFile) -> fmt::Result {
    let sig = &spec.sig;
    out.write_str("sorts P D\n")?;
    out.write_str("data {")?;
    for d in sig.data_constants() {
        write!(out, " {d}")?;
    }
    out.write_str(" }\nlabels {")?;
    for l in sig.labels() {
        write!(out, " {l}")?;
    }
    out.write_str(" }\nops {\n")?;
    for op in sig.ops() {
        write!(out, "  {}/{}", op.name, op.arity())?;
        if op.arity() > 0 {
            out.write_char(' ')?;
            for s in &op.args {
                out.write_char(Sort::letter(*s))?;
            }
        }
        out.write_char('\n')?;
    }
    out.write_str("}\n")?;
    for p in sig.predicates() {
        write!(out, "pred {}", p.name)?;
        if p.arity != 1 {
            write!(out, "/{}", p.arity)?;
        }
        out.write_str(" {")?;
        for row in &p.rows {
            if p.arity == 1 {
                write!(out, " {}", row[0])?;
            } else {
                write!(out, " ({})", row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))?;
            }
        }
        out.write_str(" }\n")?;
    }
    Ok(())
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_header(f, self)?;
        for r in &self.rules {
            f.write_char('\n')?;
            write_rule(f, r)?;
        }
        if !self.defs.is_empty() {
            f.write_char('\n')?;
            for (n, t) in &self.defs {
                writeln!(f, "def {n} = {t}")?;
            }
        }
        Ok(())
    }
}

/// Prints the closed-label rule instances as a curried spec, one comment per
/// instance naming its origin and data substitution.
pub fn print_closed_rules(spec: &SpecFile, closed: &ClosedTss) -> String {
    let mut out = String::new();
    let _ = write_header(&mut out, spec);
    for inst in &closed.rules {
        let _ = write!(out, "\n# {} with {}\n", inst.origin, inst.data);
        let _ = write_rule(&mut out, &inst.rule);
    }
    out
}
