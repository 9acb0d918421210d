//! The line-oriented `.gtrs` text format.
//!
//! ```text
//! quantale lawvere
//! var x y;
//! fun Z/0
//! fun S/1 : (id)
//! fun +/2
//! rule 0 : +(x,Z) -> x
//! solve +(x,S(Z)) =? +(+(x,x),x) threshold 1
//! ```
//!
//! `#` starts a comment. An optional `confluent` line records that the
//! system is declared confluent.

use std::fmt::Write as _;

use thiserror::Error;

use crate::narrow::{BqRule, BqStep};
use crate::quantale::{Cbe, Degree, Quantale};
use crate::rewrite::{GradedTrs, RewriteError, RewriteRule};
use crate::term::{Position, Signature, Term, TermError, Var, EQ_SYMBOL, TRUE_SYMBOL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// `solve lhs =? rhs [threshold ε]`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub lhs: Term,
    pub rhs: Term,
    pub threshold: Option<Degree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub trs: GradedTrs,
    /// Declared variables, in declaration order.
    pub vars: Vec<Var>,
    pub problems: Vec<Problem>,
}

impl ProblemFile {
    pub fn quantale(&self) -> Quantale {
        self.trs.quantale()
    }

    /// Parses a term over this file's signature and variables.
    pub fn parse_term(&self, text: &str) -> Result<Term, ParseError> {
        let mut cur = Cursor::new(1, text);
        let t = cur.term(self.trs.signature(), &self.vars)?;
        cur.finish()?;
        Ok(t)
    }

    /// Parses a degree literal of this file's quantale.
    pub fn parse_degree(&self, text: &str) -> Result<Degree, ParseError> {
        self.quantale().parse_degree(text.trim()).map_err(|e| ParseError { line: 1, col: 1, message: e.to_string() })
    }
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || "_'+*&|%$@~!".contains(c)
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Cursor<'a> {
        Cursor { line, text, pos: 0 }
    }

    fn col(&self) -> usize {
        self.col_at(self.pos)
    }

    fn col_at(&self, pos: usize) -> usize {
        self.text[..pos].chars().count() + 1
    }

    fn error_at(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.col(), message)
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected `{}`", self.rest())))
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    /// Takes characters while `keep` holds; returns the text and its column.
    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> (&'a str, usize) {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !keep(c)).unwrap_or(self.rest().len());
        self.pos += len;
        (&self.text[start..self.pos], self.col_at(start))
    }

    fn ident(&mut self) -> Result<(&'a str, usize), ParseError> {
        let (name, col) = self.take_while(is_ident_char);
        if name.is_empty() {
            return Err(self.error("expected an identifier"));
        }
        Ok((name, col))
    }

    /// A whitespace-delimited word, such as a degree literal.
    fn word(&mut self) -> (&'a str, usize) {
        self.take_while(|c| !c.is_whitespace() && c != ':')
    }

    fn term(&mut self, sig: &Signature, vars: &[Var]) -> Result<Term, ParseError> {
        let (name, col) = self.ident()?;
        if name == TRUE_SYMBOL {
            return Err(self.error_at(col, format!("`{TRUE_SYMBOL}` is reserved")));
        }
        let has_args = {
            self.skip_ws();
            self.rest().starts_with('(')
        };
        if let Some(x) = vars.iter().find(|x| x.name() == name) {
            if has_args {
                return Err(self.error_at(col, format!("variable `{name}` applied to arguments")));
            }
            return Ok(Term::Var(x.clone()));
        }
        let Some(arity) = sig.arity(name) else {
            return Err(self.error_at(col, format!("unknown symbol `{name}` (declare it with `fun` or `var`)")));
        };
        let mut args = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                args.push(self.term(sig, vars)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        if args.len() != arity.len() {
            return Err(
                self.error_at(col, format!("`{name}` expects {} argument(s), found {}", arity.len(), args.len()))
            );
        }
        Ok(Term::app(name, args))
    }

    fn degree(&mut self, q: Quantale) -> Result<Degree, ParseError> {
        let (text, col) = self.word();
        q.parse_degree(text).map_err(|e| self.error_at(col, e.to_string()))
    }
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[derive(Default)]
struct State {
    quantale: Option<Quantale>,
    signature: Option<Signature>,
    vars: Vec<Var>,
    rules: Vec<RewriteRule>,
    problems: Vec<Problem>,
    confluent: bool,
}

impl State {
    fn signature(&self, cur: &Cursor) -> Result<&Signature, ParseError> {
        self.signature.as_ref().ok_or_else(|| cur.error_at(1, "`quantale` must be declared first"))
    }

    fn line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (keyword, kcol) = cur.ident()?;
        match keyword {
            "quantale" => {
                if self.quantale.is_some() {
                    return Err(cur.error_at(kcol, "quantale declared twice"));
                }
                let (name, col) = cur.word();
                let q =
                    Quantale::from_name(name).ok_or_else(|| cur.error_at(col, format!("unknown quantale `{name}`")))?;
                self.quantale = Some(q);
                self.signature = Some(Signature::new(q));
                cur.finish()
            }
            "var" => loop {
                if cur.eat(";") {
                    break cur.finish();
                }
                if cur.at_end() {
                    break Ok(());
                }
                cur.eat(",");
                let (name, col) = cur.ident()?;
                if name == TRUE_SYMBOL || self.signature.as_ref().is_some_and(|s| s.arity(name).is_some()) {
                    return Err(cur.error_at(col, format!("`{name}` is already a function symbol")));
                }
                if self.vars.iter().any(|x| x.name() == name) {
                    return Err(cur.error_at(col, format!("variable `{name}` declared twice")));
                }
                self.vars.push(Var::new(name));
            },
            "fun" => {
                self.signature(cur)?;
                let (name, col) = cur.ident()?;
                if self.vars.iter().any(|x| x.name() == name) {
                    return Err(cur.error_at(col, format!("`{name}` is already a variable")));
                }
                cur.expect("/")?;
                let (n, ncol) = cur.take_while(|c| c.is_ascii_digit());
                let n: usize = n.parse().map_err(|_| cur.error_at(ncol, "expected an arity"))?;
                let arity = if cur.eat(":") {
                    let acol = cur.col();
                    cur.expect("(")?;
                    let inner = cur.rest();
                    let close = inner.rfind(')').ok_or_else(|| cur.error("expected `)`"))?;
                    let body = &inner[..close];
                    cur.pos += close + 1;
                    let items: Vec<&str> = if body.trim().is_empty() { Vec::new() } else { split_top_level(body) };
                    let cbes = items
                        .iter()
                        .map(|s| s.trim().parse::<Cbe>().map_err(|e| cur.error_at(acol, e.to_string())))
                        .collect::<Result<Vec<_>, _>>()?;
                    if cbes.len() != n {
                        return Err(cur.error_at(acol, format!("arity list has {} entries, expected {n}", cbes.len())));
                    }
                    cbes
                } else {
                    vec![Cbe::Id; n]
                };
                cur.finish()?;
                let sig = self.signature.as_mut().expect("checked above");
                sig.declare(name, arity).map_err(|e| match e {
                    TermError::Quantale(q) => cur.error_at(col, format!("inadmissible arity for `{name}`: {q}")),
                    other => cur.error_at(col, other.to_string()),
                })
            }
            "confluent" => {
                self.confluent = true;
                cur.finish()
            }
            "rule" => {
                let q = self.quantale.ok_or_else(|| cur.error_at(1, "`quantale` must be declared first"))?;
                let degree = cur.degree(q)?;
                cur.expect(":")?;
                let lcol = {
                    cur.skip_ws();
                    cur.col()
                };
                let sig = self.signature(cur)?;
                let lhs = cur.term(sig, &self.vars)?;
                cur.expect("->")?;
                let rhs = cur.term(sig, &self.vars)?;
                cur.finish()?;
                let rule = RewriteRule::new(degree, lhs, rhs).map_err(|e| match e {
                    RewriteError::VariableLhs { .. } => cur.error_at(lcol, "left-hand side of a rule is a variable"),
                    other => cur.error_at(lcol, other.to_string()),
                })?;
                self.rules.push(rule);
                Ok(())
            }
            "solve" => {
                let sig = self.signature(cur)?;
                let lhs = cur.term(sig, &self.vars)?;
                cur.expect(EQ_SYMBOL)?;
                let rhs = cur.term(sig, &self.vars)?;
                let threshold = if cur.eat("threshold") {
                    let q = sig.quantale();
                    Some(cur.degree(q)?)
                } else {
                    None
                };
                cur.finish()?;
                self.problems.push(Problem { lhs, rhs, threshold });
                Ok(())
            }
            other => Err(cur.error_at(kcol, format!("unknown declaration `{other}`"))),
        }
    }
}

/// Parses a whole file.
pub fn parse(text: &str) -> Result<ProblemFile, ParseError> {
    let mut state = State::default();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(i + 1, content);
        if cur.at_end() {
            continue;
        }
        state.line(&mut cur)?;
    }
    let signature =
        state.signature.ok_or(ParseError { line: 1, col: 1, message: "missing `quantale` declaration".into() })?;
    let trs = GradedTrs::new(signature, state.rules)
        .map_err(|e| ParseError { line: 1, col: 1, message: e.to_string() })?
        .declare_confluent(state.confluent);
    Ok(ProblemFile { trs, vars: state.vars, problems: state.problems })
}

/// Prints a file in a form that [`parse`] reads back to an equal value.
pub fn render(file: &ProblemFile) -> String {
    let mut out = String::new();
    let sig = file.trs.signature();
    writeln!(out, "quantale {}", sig.quantale()).unwrap();
    if !file.vars.is_empty() {
        let names: Vec<&str> = file.vars.iter().map(Var::name).collect();
        writeln!(out, "var {};", names.join(" ")).unwrap();
    }
    for (name, arity) in sig.symbols() {
        if arity.is_empty() {
            writeln!(out, "fun {name}/0").unwrap();
        } else {
            let list: Vec<String> = arity.iter().map(Cbe::to_string).collect();
            writeln!(out, "fun {name}/{} : ({})", arity.len(), list.join(", ")).unwrap();
        }
    }
    if file.trs.attributes().confluent {
        writeln!(out, "confluent").unwrap();
    }
    for rule in file.trs.rules() {
        writeln!(out, "rule {rule}").unwrap();
    }
    for p in &file.problems {
        write!(out, "solve {} =? {}", p.lhs, p.rhs).unwrap();
        if let Some(th) = &p.threshold {
            write!(out, " threshold {th}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads the step list of a rendered calculus trace: one step per line,
/// `LP <position> r<k>` or `SU`, `Con`, `Cla`, optionally followed by
/// `=> <configuration>` which is ignored.
pub fn parse_trace(text: &str) -> Result<Vec<BqStep>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split("=>").next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(tag) = words.next() else { continue };
        let err = |message: String| ParseError { line: i + 1, col: 1, message };
        let rule: BqRule = tag.parse().map_err(err)?;
        let (position, index) = if rule == BqRule::Lp {
            let p = words.next().ok_or_else(|| err("LP needs a position".into()))?;
            let r = words.next().ok_or_else(|| err("LP needs a rule".into()))?;
            let p: Position = p.parse().map_err(err)?;
            let k: usize = r
                .strip_prefix('r')
                .and_then(|k| k.parse().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| err(format!("malformed rule reference `{r}`")))?;
            (Some(p), Some(k - 1))
        } else {
            (None, None)
        };
        if let Some(extra) = words.next() {
            return Err(err(format!("unexpected `{extra}`")));
        }
        out.push(BqStep { rule, position, rule_index: index });
    }
    Ok(out)
}
