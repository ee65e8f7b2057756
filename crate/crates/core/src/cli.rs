//! The `sosd` command line. [`run`] is pure: it takes the argument vector and
//! returns the exit code and both output streams, so it can be tested
//! without spawning a process.
//!
//! Exit codes: 0 for a positive verdict, 1 for a negative one, 2 for usage
//! errors, malformed input and inconclusive analyses.

use std::fmt::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::axioms::{bccspd, check_disjoint_extension, gsos_axiom_instance, normalize_extended, prove_equal};
use crate::bisim::{coarsest_partition, BisimError};
use crate::curry::{build_curried_lts, close_labels, curry, ClosedTss};
use crate::formats::check_comm_form;
use crate::linda::{linda_regression_suite, LindaConfig, SuiteOptions};
use crate::syntax::{export_lts, parse_spec, print_closed_rules, LtsFormat, SpecFile};
use crate::term::{sym, Term};
use crate::tss::{build_lts, Bounds, Flavor, Lts};

#[derive(Parser, Debug)]
#[command(name = "sosd", version, about = "Structural operational semantics with data")]
struct Cli {
    /// Print every report as line-delimited JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Upper bound on explored states.
    #[arg(long, global = true, env = "SOSD_MAX_STATES", default_value_t = Bounds::default().max_states)]
    max_states: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a spec, printing it in canonical form.
    Parse { file: PathBuf },
    /// Print the curried spec, or with --closed its closed-label instances.
    Curry {
        file: PathBuf,
        #[arg(long)]
        closed: bool,
    },
    /// Explore the transition system reachable from closed terms.
    Lts {
        file: PathBuf,
        #[arg(required = true)]
        terms: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Decide bisimilarity of two closed terms.
    Bisim {
        file: PathBuf,
        p: String,
        q: String,
        #[arg(long, value_enum, default_value_t = Mode::Stateless)]
        mode: Mode,
        /// Also print the bisimulation classes of the joint transition system.
        #[arg(long)]
        witness: bool,
    },
    /// Check the commutativity format for the given binary operators.
    CheckComm {
        file: PathBuf,
        /// Comma-separated operator names; `plus` stands for `+`.
        #[arg(long, value_delimiter = ',', required = true)]
        ops: Vec<String>,
    },
    /// Bring a closed term into head normal form.
    Normalize { file: PathBuf, term: String },
    /// Decide equality of two closed terms from the axioms.
    Prove { file: PathBuf, p: String, q: String },
    /// Instantiate the axiom schema of an operator on head-normal arguments.
    Axiomatize {
        file: PathBuf,
        #[arg(long)]
        op: String,
        #[arg(long, num_args = 1.., required = true)]
        args: Vec<String>,
    },
    /// Run the Linda algebraic-property regression suite.
    LindaSuite {
        #[arg(long, value_delimiter = ',', default_value = "u,v")]
        alphabet: Vec<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        multiset_cap: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Jsonl,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Strong,
    Stateless,
    StatelessCurried,
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn verdict(ok: bool, stdout: String) -> Outcome {
        Outcome {
            code: if ok { 0 } else { 1 },
            stdout,
            stderr: String::new(),
        }
    }
}

type CmdResult = Result<Outcome, Outcome>;

fn load(file: &PathBuf) -> Result<SpecFile, Outcome> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Outcome::usage(format!("cannot read {}: {e}", file.display())))?;
    parse_spec(&text).map_err(|e| Outcome::usage(format!("{}:{e}", file.display())))
}

fn term(spec: &SpecFile, src: &str) -> Result<Term, Outcome> {
    spec.parse_term(src).map_err(|e| Outcome::usage(format!("in term {src:?}: {e}")))
}

fn bisim_error(e: BisimError) -> Outcome {
    Outcome::usage(e)
}

fn closed_of(spec: &SpecFile) -> Result<ClosedTss, Outcome> {
    close_labels(&curry(&spec.tss())).map_err(Outcome::usage)
}

fn operator_name(s: &str) -> &str {
    match s {
        "plus" => "+",
        other => other,
    }
}

/// Runs one `sosd` invocation.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let bounds = Bounds::with_max_states(cli.max_states);
    let json = cli.json;
    let result = match cli.command {
        Command::Parse { file } => cmd_parse(&file, json),
        Command::Curry { file, closed } => cmd_curry(&file, closed, json),
        Command::Lts { file, terms, format } => cmd_lts(&file, &terms, format, bounds),
        Command::Bisim {
            file,
            p,
            q,
            mode,
            witness,
        } => cmd_bisim(&file, &p, &q, mode, witness, bounds, json),
        Command::CheckComm { file, ops } => cmd_check_comm(&file, &ops, json),
        Command::Normalize { file, term } => cmd_normalize(&file, &term, json),
        Command::Prove { file, p, q } => cmd_prove(&file, &p, &q, json),
        Command::Axiomatize { file, op, args } => cmd_axiomatize(&file, &op, &args, json),
        Command::LindaSuite {
            alphabet,
            samples,
            multiset_cap,
            seed,
        } => cmd_linda(alphabet, samples, multiset_cap, seed, bounds, json),
    };
    result.unwrap_or_else(|e| e)
}

fn cmd_parse(file: &PathBuf, json: bool) -> CmdResult {
    let spec = load(file)?;
    let report = spec.validate();
    let flavor = match spec.flavor() {
        Some(Flavor::WithData) => "with-data",
        Some(Flavor::Curried) => "curried",
        None => "empty",
    };
    let mut out = String::new();
    if json {
        let line = json!({
            "file": file.display().to_string(),
            "flavor": flavor,
            "rules": spec.rules.len(),
            "ops": spec.sig.ops().len(),
            "data": spec.sig.data_constants().len(),
            "valid": report.is_ok(),
            "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        });
        let _ = writeln!(out, "{line}");
    } else {
        out.push_str(&spec.to_string());
        for v in &report.violations {
            let _ = writeln!(out, "# invalid: {v}");
        }
    }
    Ok(Outcome::verdict(report.is_ok(), out))
}

fn cmd_curry(file: &PathBuf, closed: bool, json: bool) -> CmdResult {
    let spec = load(file)?;
    let curried = spec.curried();
    let mut out = String::new();
    if closed {
        let c = closed_of(&spec)?;
        if json {
            for r in &c.rules {
                let mut text = String::new();
                let _ = crate::syntax::write_rule(&mut text, &r.rule);
                let line = json!({"origin": &*r.origin, "data": r.data.to_string(), "rule": text});
                let _ = writeln!(out, "{line}");
            }
        } else {
            out = print_closed_rules(&curried, &c);
        }
    } else if json {
        let _ = writeln!(out, "{}", json!({"spec": curried.to_string()}));
    } else {
        out = curried.to_string();
    }
    Ok(Outcome::verdict(true, out))
}

fn explore_spec(spec: &SpecFile, roots: &[Term], bounds: Bounds) -> Result<Lts, Outcome> {
    match spec.flavor() {
        Some(Flavor::Curried) => build_curried_lts(&closed_of(spec)?, roots, bounds).map_err(Outcome::usage),
        _ => build_lts(&spec.tss(), roots, bounds).map_err(Outcome::usage),
    }
}

fn cmd_lts(file: &PathBuf, terms: &[String], format: Format, bounds: Bounds) -> CmdResult {
    let spec = load(file)?;
    let roots = terms.iter().map(|t| term(&spec, t)).collect::<Result<Vec<_>, _>>()?;
    for r in &roots {
        spec.sig.check_closed_process(r).map_err(Outcome::usage)?;
    }
    let lts = explore_spec(&spec, &roots, bounds)?;
    let format = match format {
        Format::Jsonl => LtsFormat::Jsonl,
        Format::Dot => LtsFormat::Dot,
    };
    let stdout = export_lts(&lts, format);
    if lts.truncated {
        return Ok(Outcome {
            code: 2,
            stdout,
            stderr: format!("inconclusive: exploration stopped at {} states\n", lts.states.len()),
        });
    }
    Ok(Outcome::verdict(true, stdout))
}

fn cmd_bisim(file: &PathBuf, p: &str, q: &str, mode: Mode, witness: bool, bounds: Bounds, json: bool) -> CmdResult {
    let spec = load(file)?;
    let (tp, tq) = (term(&spec, p)?, term(&spec, q)?);
    spec.sig.check_closed_process(&tp).map_err(Outcome::usage)?;
    spec.sig.check_closed_process(&tq).map_err(Outcome::usage)?;
    let roots = [tp.clone(), tq.clone()];
    let lts = match mode {
        Mode::Stateless => build_lts(&spec.uncurried().tss(), &roots, bounds).map_err(Outcome::usage)?,
        Mode::Strong | Mode::StatelessCurried => {
            build_curried_lts(&closed_of(&spec)?, &roots, bounds).map_err(Outcome::usage)?
        }
    };
    if lts.truncated {
        return Err(bisim_error(BisimError::Inconclusive {
            states: lts.states.len(),
            edges: lts.edges.len(),
        }));
    }
    let part = coarsest_partition(&lts);
    let (i, j) = (lts.index_of(&tp).unwrap(), lts.index_of(&tq).unwrap());
    let equal = part.same_block(i, j);
    let mode_name = match mode {
        Mode::Strong => "strong",
        Mode::Stateless => "stateless",
        Mode::StatelessCurried => "stateless-curried",
    };
    let classes: Vec<Vec<String>> = part
        .classes()
        .into_iter()
        .map(|c| c.into_iter().map(|s| lts.states[s].to_string()).collect())
        .collect();
    let mut out = String::new();
    if json {
        let mut line = json!({
            "mode": mode_name,
            "p": tp.to_string(),
            "q": tq.to_string(),
            "bisimilar": equal,
            "states": lts.states.len(),
        });
        if witness {
            line["classes"] = json!(classes);
        }
        let _ = writeln!(out, "{line}");
    } else {
        let verdict = if equal { "bisimilar" } else { "not bisimilar" };
        let _ = writeln!(out, "{tp} and {tq} are {verdict} ({mode_name}, {} states)", lts.states.len());
        if witness {
            for (k, c) in classes.iter().enumerate() {
                let _ = writeln!(out, "class {k}: {}", c.join(" | "));
            }
        }
    }
    Ok(Outcome::verdict(equal, out))
}

fn cmd_check_comm(file: &PathBuf, ops: &[String], json: bool) -> CmdResult {
    let spec = load(file)?;
    let ops: Vec<_> = ops.iter().map(|o| sym(operator_name(o))).collect();
    let report = check_comm_form(&curry(&spec.tss()), &ops).map_err(Outcome::usage)?;
    let out = if json {
        format!("{}\n", serde_json::to_string(&report).expect("reports serialize"))
    } else {
        report.to_string()
    };
    Ok(Outcome::verdict(report.pass, out))
}

/// The closed system of a spec that disjointly extends the store calculus.
fn store_calculus(spec: &SpecFile) -> Result<ClosedTss, Outcome> {
    let carrier: Vec<&str> = spec.sig.data_constants().iter().map(|d| &**d).collect();
    let labels: Vec<&str> = spec.sig.labels().iter().map(|l| &**l).collect();
    let core = bccspd(&carrier, &labels);
    check_disjoint_extension(&core.tss(), &spec.curried().tss()).map_err(Outcome::usage)?;
    closed_of(spec)
}

fn cmd_normalize(file: &PathBuf, src: &str, json: bool) -> CmdResult {
    let spec = load(file)?;
    let closed = store_calculus(&spec)?;
    let t = term(&spec, src)?;
    let (h, steps) = normalize_extended(&closed, &t).map_err(Outcome::usage)?;
    let mut out = String::new();
    if json {
        let steps: Vec<_> = steps
            .iter()
            .map(|s| {
                json!({
                    "from": s.from.to_string(),
                    "to": s.to.to_string(),
                    "axioms": s.axioms.iter().map(|a| a.name()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let _ = writeln!(out, "{}", json!({"term": t.to_string(), "hnf": h.to_string(), "steps": steps}));
    } else {
        for (k, s) in steps.iter().enumerate() {
            let tags = if s.axioms.is_empty() {
                "schema".to_string()
            } else {
                s.axioms.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(out, "{:>3}. {} = {}  ({tags})", k + 1, s.from, s.to);
        }
        let _ = writeln!(out, "{t} = {h}");
    }
    Ok(Outcome::verdict(true, out))
}

fn cmd_prove(file: &PathBuf, p: &str, q: &str, json: bool) -> CmdResult {
    let spec = load(file)?;
    store_calculus(&spec)?;
    let (tp, tq) = (term(&spec, p)?, term(&spec, q)?);
    let proof = prove_equal(&spec.sig, &tp, &tq).map_err(Outcome::usage)?;
    let out = if json {
        format!(
            "{}\n",
            json!({"p": tp.to_string(), "q": tq.to_string(), "equal": proof.equal, "trace": proof.trace})
        )
    } else {
        format!("{proof}\n")
    };
    Ok(Outcome::verdict(proof.equal, out))
}

fn cmd_axiomatize(file: &PathBuf, op: &str, args: &[String], json: bool) -> CmdResult {
    let spec = load(file)?;
    let closed = store_calculus(&spec)?;
    let op = operator_name(op);
    if !spec.sig.has_op(op) {
        return Err(Outcome::usage(format!("unknown operator `{op}`")));
    }
    let args = args.iter().map(|a| term(&spec, a)).collect::<Result<Vec<_>, _>>()?;
    let eq = gsos_axiom_instance(op, &args, &closed).map_err(Outcome::usage)?;
    let out = if json {
        let rules = match &eq.justification {
            crate::axioms::Justification::Schema { rules, .. } => rules.iter().map(|r| r.to_string()).collect(),
            crate::axioms::Justification::Axiom(_) => Vec::new(),
        };
        format!("{}\n", json!({"lhs": eq.lhs.to_string(), "rhs": eq.rhs.to_string(), "rules": rules}))
    } else {
        format!("{} = {}\n", eq.lhs, eq.rhs)
    };
    Ok(Outcome::verdict(true, out))
}

fn cmd_linda(
    alphabet: Vec<String>,
    samples: usize,
    multiset_cap: Option<usize>,
    seed: u64,
    bounds: Bounds,
    json: bool,
) -> CmdResult {
    let cfg = LindaConfig {
        alphabet,
        multiset_cap,
    };
    let opts = SuiteOptions {
        samples,
        seed,
        bounds,
        ..SuiteOptions::default()
    };
    let report = linda_regression_suite(&cfg, &opts).map_err(Outcome::usage)?;
    let mut out = String::new();
    if json {
        for r in &report.rows {
            let _ = writeln!(out, "{}", serde_json::to_string(r).expect("reports serialize"));
        }
        let _ = writeln!(out, "{}", serde_json::to_string(&report.comm).expect("reports serialize"));
    } else {
        out = report.to_string();
    }
    Ok(Outcome::verdict(report.pass(), out))
}
