use std::collections::HashMap;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, SpecFile};
use crate::term::{sym, Signature, Sort, Symbol, Term, TERMINATION};
use crate::tss::{Conclusion, Condition, Flavor, Premise, Rule};

const MAX_DEPTH: usize = 256;

pub(super) struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    sig: Signature,
    defs: &'s mut Vec<(Symbol, Term)>,
    /// Variable sorts of the rule being parsed; `None` when variables are not allowed.
    vars: Option<HashMap<String, Sort>>,
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

/// One parsed transition, before it is split into premise or conclusion.
struct Transition {
    flavor: Flavor,
    source: Term,
    before: Term,
    action: Symbol,
    target: Term,
    after: Term,
}

impl<'s> Parser<'s> {
    pub(super) fn new(src: &str, sig: Signature, defs: &'s mut Vec<(Symbol, Term)>) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            sig,
            defs,
            vars: None,
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, tok: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: tok.line,
            col: tok.col,
            kind,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        self.err_at(&self.toks[self.pos], kind)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.err(ParseErrorKind::Syntax(format!("expected {wanted}, found {}", self.peek())))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Token)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn sig_err(&self, tok: &Token, e: impl ToString) -> ParseError {
        self.err_at(tok, ParseErrorKind::Signature(e.to_string()))
    }

    pub(super) fn spec(mut self) -> PResult<(Signature, Vec<Rule>)> {
        self.keyword("sorts")?;
        self.keyword("P")?;
        self.keyword("D")?;
        let mut rules: Vec<Rule> = Vec::new();
        loop {
            let (kw, at) = match self.peek() {
                Tok::Eof => break,
                _ => self.ident()?,
            };
            match kw.as_str() {
                "data" => self.data_block()?,
                "labels" => self.labels_block()?,
                "ops" => self.ops_block()?,
                "pred" => self.pred_block()?,
                "rule" => {
                    let rule = self.rule()?;
                    if let Some(first) = rules.first() {
                        if first.flavor != rule.flavor {
                            return Err(self.err_at(
                                &at,
                                ParseErrorKind::Syntax("rules mix with-data and curried flavors".into()),
                            ));
                        }
                    }
                    rules.push(rule);
                }
                "def" => self.def()?,
                other => {
                    return Err(self.err_at(
                        &at,
                        ParseErrorKind::Syntax(format!("unknown block `{other}`")),
                    ))
                }
            }
        }
        self.sig.check().map_err(|e| self.err(ParseErrorKind::Signature(e.to_string())))?;
        Ok((self.sig, rules))
    }

    fn data_name(&mut self) -> PResult<Option<(String, Token)>> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::SetLit(s) => Ok(Some((s, self.bump()))),
            _ => Ok(None),
        }
    }

    fn data_block(&mut self) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        while let Some((name, at)) = self.data_name()? {
            self.sig.add_data(&name).map_err(|e| self.sig_err(&at, e))?;
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn labels_block(&mut self) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        while let Tok::Ident(_) = self.peek() {
            let (name, at) = self.ident()?;
            self.sig.add_label(&name).map_err(|e| self.sig_err(&at, e))?;
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn number(&mut self) -> PResult<usize> {
        let (s, at) = self.ident()?;
        s.parse()
            .map_err(|_| self.err_at(&at, ParseErrorKind::Syntax(format!("expected a number, found `{s}`"))))
    }

    fn ops_block(&mut self) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        loop {
            let (name, at) = match self.peek().clone() {
                Tok::Plus => ("+".to_string(), self.bump()),
                Tok::Ident(_) => {
                    let (mut name, at) = self.ident()?;
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        let (idx, _) = self.ident()?;
                        self.expect(Tok::RParen)?;
                        name = format!("{name}({idx})");
                    }
                    (name, at)
                }
                _ => break,
            };
            self.expect(Tok::Slash)?;
            let arity = self.number()?;
            let mut sorts = Vec::with_capacity(arity);
            if arity > 0 {
                let (letters, sat) = self.ident()?;
                for c in letters.chars() {
                    sorts.push(match c {
                        'P' => Sort::Process,
                        'D' => Sort::Data,
                        _ => {
                            return Err(self.err_at(
                                &sat,
                                ParseErrorKind::Syntax(format!("bad sort letter {c:?}")),
                            ))
                        }
                    });
                }
                if sorts.len() != arity {
                    return Err(self.err_at(
                        &sat,
                        ParseErrorKind::Syntax(format!("sort signature `{letters}` does not have {arity} letters")),
                    ));
                }
            }
            if name.contains('(') && arity > 0 {
                return Err(self.err_at(
                    &at,
                    ParseErrorKind::Syntax(format!("indexed constant `{name}` must be nullary")),
                ));
            }
            self.sig.add_op(&name, sorts).map_err(|e| self.sig_err(&at, e))?;
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn pred_block(&mut self) -> PResult<()> {
        let (name, at) = self.ident()?;
        let arity = if *self.peek() == Tok::Slash {
            self.bump();
            self.number()?
        } else {
            1
        };
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        loop {
            if arity == 1 {
                match self.data_name()? {
                    Some((c, _)) => rows.push(vec![sym(&c)]),
                    None => break,
                }
            } else {
                if *self.peek() != Tok::LParen {
                    break;
                }
                self.bump();
                let mut row = Vec::with_capacity(arity);
                loop {
                    match self.data_name()? {
                        Some((c, _)) => row.push(sym(&c)),
                        None => return Err(self.unexpected("a data constant")),
                    }
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
                rows.push(row);
            }
        }
        self.expect(Tok::RBrace)?;
        self.sig
            .add_predicate(&name, arity, rows)
            .map_err(|e| self.sig_err(&at, e))
    }

    fn def(&mut self) -> PResult<()> {
        let (name, at) = self.ident()?;
        self.expect(Tok::Eq)?;
        if self.defs.iter().any(|(n, _)| **n == *name) {
            return Err(self.sig_err(&at, format!("duplicate definition `{name}`")));
        }
        self.vars = None;
        let t = self.process_term()?;
        self.defs.push((sym(&name), t));
        Ok(())
    }

    fn rule(&mut self) -> PResult<Rule> {
        let (name, at) = self.ident()?;
        self.expect(Tok::LBrace)?;
        self.vars = Some(HashMap::new());
        let mut premises = Vec::new();
        while *self.peek() != Tok::Bar {
            if *self.peek() == Tok::Eof || *self.peek() == Tok::RBrace {
                return Err(self.unexpected("`---`"));
            }
            premises.push(self.transition()?);
        }
        self.bump();
        let conclusion = self.transition()?;
        let mut conditions = Vec::new();
        if matches!(self.peek(), Tok::Ident(s) if s == "where") {
            self.bump();
            loop {
                conditions.push(self.condition()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        self.vars = None;

        let flavor = conclusion.flavor;
        if premises.iter().any(|p| p.flavor != flavor) {
            return Err(self.err_at(
                &at,
                ParseErrorKind::Syntax(format!("rule `{name}` mixes with-data and curried transitions")),
            ));
        }
        Ok(Rule {
            name: sym(&name),
            flavor,
            premises: premises
                .into_iter()
                .map(|t| Premise {
                    source: t.source,
                    before: t.before,
                    action: t.action,
                    target: t.target,
                    after: t.after,
                })
                .collect(),
            conclusion: Conclusion {
                source: conclusion.source,
                before: conclusion.before,
                action: conclusion.action,
                target: conclusion.target,
                after: conclusion.after,
            },
            conditions,
        })
    }

    fn condition(&mut self) -> PResult<Condition> {
        let (name, at) = self.ident()?;
        let Some(pred) = self.sig.predicate(&name) else {
            return Err(self.err_at(&at, ParseErrorKind::UnknownSymbol(format!("predicate `{name}`"))));
        };
        let arity = pred.arity;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            args.push(self.data_term()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        if args.len() != arity {
            return Err(self.err_at(
                &at,
                ParseErrorKind::Arity {
                    name,
                    expected: arity,
                    found: args.len(),
                },
            ));
        }
        Ok(Condition { pred: sym(&name), args })
    }

    fn label(&mut self) -> PResult<Symbol> {
        let (name, at) = self.ident()?;
        if !self.sig.has_label(&name) {
            return Err(self.err_at(&at, ParseErrorKind::UnknownLabel(name)));
        }
        Ok(sym(&name))
    }

    fn transition(&mut self) -> PResult<Transition> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let t = self.process_term()?;
            if *self.peek() == Tok::Comma {
                self.bump();
                let before = self.data_term()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dash)?;
                let action = self.label()?;
                self.expect(Tok::Arrow)?;
                self.expect(Tok::LParen)?;
                let target = self.process_term()?;
                self.expect(Tok::Comma)?;
                let after = self.data_term()?;
                self.expect(Tok::RParen)?;
                return Ok(Transition {
                    flavor: Flavor::WithData,
                    source: t,
                    before,
                    action,
                    target,
                    after,
                });
            }
            self.expect(Tok::RParen)?;
            let source = if *self.peek() == Tok::Plus {
                self.bump();
                let rest = self.process_term()?;
                self.sum_node(t, rest)?
            } else {
                t
            };
            return self.curried_rest(source);
        }
        let source = self.process_term()?;
        self.curried_rest(source)
    }

    fn curried_rest(&mut self, source: Term) -> PResult<Transition> {
        self.expect(Tok::Dash)?;
        self.expect(Tok::LParen)?;
        let before = self.data_term()?;
        self.expect(Tok::Comma)?;
        let action = self.label()?;
        self.expect(Tok::Comma)?;
        let after = self.data_term()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let target = self.process_term()?;
        Ok(Transition {
            flavor: Flavor::Curried,
            source,
            before,
            action,
            target,
            after,
        })
    }

    fn var(&mut self, name: &str, sort: Sort, at: &Token) -> PResult<Term> {
        let Some(vars) = self.vars.as_mut() else {
            return Err(self.err_at(at, ParseErrorKind::UnknownSymbol(format!("`{name}`"))));
        };
        match vars.get(name) {
            Some(&s) if s != sort => Err(ParseError {
                line: at.line,
                col: at.col,
                kind: ParseErrorKind::SortMismatch(format!(
                    "variable `{name}` used as {sort} but earlier as {s}"
                )),
            }),
            _ => {
                vars.insert(name.to_string(), sort);
                Ok(Term::var(name, sort))
            }
        }
    }

    pub(super) fn data_term(&mut self) -> PResult<Term> {
        let Some((name, at)) = self.data_name()? else {
            return Err(self.unexpected("a data term"));
        };
        if self.sig.has_data(&name) {
            return Ok(Term::data(&name));
        }
        if self.sig.has_op(&name) {
            return Err(self.err_at(
                &at,
                ParseErrorKind::SortMismatch(format!("`{name}` is a process operator, expected data")),
            ));
        }
        if name.starts_with('{') || self.vars.is_none() {
            return Err(self.err_at(&at, ParseErrorKind::UnknownSymbol(format!("data constant `{name}`"))));
        }
        self.var(&name, Sort::Data, &at)
    }

    fn sum_node(&self, left: Term, right: Term) -> PResult<Term> {
        if !self.sig.has_op("+") {
            return Err(self.err(ParseErrorKind::UnknownSymbol("operator `+`".into())));
        }
        Ok(Term::sum(left, right))
    }

    pub(super) fn process_term(&mut self) -> PResult<Term> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::Syntax("term nested too deeply".into())));
        }
        let left = self.unary();
        let out = match left {
            Ok(left) if *self.peek() == Tok::Plus => {
                self.bump();
                self.process_term().and_then(|right| self.sum_node(left, right))
            }
            other => other,
        };
        self.depth -= 1;
        out
    }

    fn unary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.process_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => {
                let at = self.bump();
                self.after_ident(name, at)
            }
            Tok::SetLit(name) => {
                let at = self.bump();
                Err(self.err_at(
                    &at,
                    ParseErrorKind::SortMismatch(format!("`{name}` is data, expected a process term")),
                ))
            }
            _ => Err(self.unexpected("a process term")),
        }
    }

    fn after_ident(&mut self, name: String, at: Token) -> PResult<Term> {
        if *self.peek() == Tok::Dot && self.sig.labels().iter().any(|l| **l == *name) {
            self.bump();
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return Err(self.err(ParseErrorKind::Syntax("term nested too deeply".into())));
            }
            let body = self.unary();
            self.depth -= 1;
            return Ok(Term::prefix(&name, body?));
        }
        if *self.peek() == Tok::LParen {
            if let (Tok::Ident(idx), Tok::RParen) = (self.peek_at(1).clone(), self.peek_at(2).clone()) {
                let indexed = format!("{name}({idx})");
                if matches!(self.sig.op_args(&indexed), Some(a) if a.is_empty()) {
                    self.bump();
                    self.bump();
                    self.bump();
                    return Ok(Term::constant(&indexed));
                }
            }
        }
        if let Some(sorts) = self.sig.op_args(&name).map(<[Sort]>::to_vec) {
            if sorts.is_empty() {
                return Ok(Term::constant(&name));
            }
            let mut args = Vec::with_capacity(sorts.len());
            if *self.peek() == Tok::LParen {
                self.bump();
                loop {
                    let sort = sorts.get(args.len()).copied().unwrap_or(Sort::Process);
                    args.push(match sort {
                        Sort::Process => self.process_term()?,
                        Sort::Data => self.data_term()?,
                    });
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
            }
            if args.len() != sorts.len() {
                return Err(self.err_at(
                    &at,
                    ParseErrorKind::Arity {
                        name,
                        expected: sorts.len(),
                        found: args.len(),
                    },
                ));
            }
            return Ok(Term::app(&name, args));
        }
        if self.sig.has_data(&name) {
            return Err(self.err_at(
                &at,
                ParseErrorKind::SortMismatch(format!("`{name}` is data, expected a process term")),
            ));
        }
        if self.vars.is_none() {
            if let Some((_, t)) = self.defs.iter().find(|(n, _)| **n == *name) {
                return Ok(t.clone());
            }
            if name == TERMINATION || self.sig.has_label(&name) {
                return Err(self.err_at(
                    &at,
                    ParseErrorKind::Syntax(format!("label `{name}` must be followed by `.`")),
                ));
            }
        }
        self.var(&name, Sort::Process, &at)
    }

    pub(super) fn finish_term(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of term")),
        }
    }
}

pub(super) fn parse_spec_text(src: &str) -> PResult<SpecFile> {
    let mut defs = Vec::new();
    let (sig, rules) = Parser::new(src, Signature::new(), &mut defs)?.spec()?;
    Ok(SpecFile {
        sig: Arc::new(sig),
        rules,
        defs,
    })
}

/// Parses a closed process term against `spec`'s signature and definitions.
pub(super) fn parse_closed_term(spec: &SpecFile, src: &str) -> PResult<Term> {
    let mut defs = spec.defs.clone();
    let mut p = Parser::new(src, spec.sig.as_ref().clone(), &mut defs)?;
    let t = p.process_term()?;
    p.finish_term()?;
    Ok(t)
}

/// Parses an open process term; unknown identifiers become variables.
pub(super) fn parse_open_term(spec: &SpecFile, src: &str) -> PResult<Term> {
    let mut defs = spec.defs.clone();
    let mut p = Parser::new(src, spec.sig.as_ref().clone(), &mut defs)?;
    p.vars = Some(HashMap::new());
    let t = p.process_term()?;
    p.finish_term()?;
    Ok(t)
}
