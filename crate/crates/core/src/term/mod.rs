//! First-order terms over graded signatures.

mod position;
mod signature;
mod subst;

pub use position::Position;
pub use signature::{Signature, EQ_SYMBOL, TRUE_SYMBOL};
pub use subst::{Canonicalizer, FreshVars, Matcher, Substitution};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::quantale::QuantaleError;

pub type Symbol = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {position} does not exist in {term}")]
    InvalidPosition { position: Position, term: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("`{0}` is reserved")]
    ReservedSymbol(String),
    #[error("substitution is not idempotent: {0} occurs in its range")]
    NotIdempotent(Var),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// A variable. User-written variables have index 0; renamed copies issued by
/// [`FreshVars`] carry a positive index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Symbol,
    index: u32,
}

impl Var {
    pub fn new(name: &str) -> Var {
        Var { name: name.into(), index: 0 }
    }

    pub fn indexed(name: &str, index: u32) -> Var {
        Var { name: name.into(), index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_fresh(&self) -> bool {
        self.index > 0
    }

    pub(crate) fn with_index(&self, index: u32) -> Var {
        Var { name: self.name.clone(), index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            f.write_str(&self.name)
        } else {
            write!(f, "{}_{}", self.name, self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    /// `lhs =? rhs` over the extended signature.
    pub fn equation(lhs: Term, rhs: Term) -> Term {
        Term::App(EQ_SYMBOL.into(), vec![lhs, rhs])
    }

    pub fn truth() -> Term {
        Term::constant(TRUE_SYMBOL)
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Term::App(f, args) if &**f == TRUE_SYMBOL && args.is_empty())
    }

    /// Splits `lhs =? rhs`.
    pub fn as_equation(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::App(f, args) if &**f == EQ_SYMBOL && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(x) => Some(x),
            Term::App(..) => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    fn walk<'a>(&'a self, path: &mut Vec<usize>, visit: &mut impl FnMut(&[usize], &'a Term)) {
        visit(path, self);
        if let Term::App(_, args) = self {
            for (i, arg) in args.iter().enumerate() {
                path.push(i + 1);
                arg.walk(path, visit);
                path.pop();
            }
        }
    }

    fn collect_positions(&self, keep: impl Fn(&Term) -> bool) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, t| {
            if keep(t) {
                out.push(Position::from(p.to_vec()));
            }
        });
        out
    }

    /// All positions, in left-to-right preorder.
    pub fn positions(&self) -> Vec<Position> {
        self.collect_positions(|_| true)
    }

    /// Non-variable positions, in preorder.
    pub fn fun_positions(&self) -> Vec<Position> {
        self.collect_positions(|t| !t.is_var())
    }

    pub fn var_positions(&self) -> Vec<Position> {
        self.collect_positions(Term::is_var)
    }

    /// Positions at which `x` occurs.
    pub fn occurrences(&self, x: &Var) -> Vec<Position> {
        self.collect_positions(|t| t.as_var() == Some(x))
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        let mut cur = self;
        for &i in p.indices() {
            cur = cur
                .args()
                .get(i.wrapping_sub(1))
                .ok_or_else(|| TermError::InvalidPosition { position: p.clone(), term: self.to_string() })?;
        }
        Ok(cur)
    }

    /// `self[s]_p`.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], s: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(s),
                Some((&i, rest)) => match t {
                    Term::App(f, args) if i >= 1 && i <= args.len() => {
                        let mut args = args.clone();
                        args[i - 1] = go(&args[i - 1], rest, s)?;
                        Some(Term::App(f.clone(), args))
                    }
                    _ => None,
                },
            }
        }
        go(self, p.indices(), s)
            .ok_or_else(|| TermError::InvalidPosition { position: p.clone(), term: self.to_string() })
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |x| {
            out.insert(x.clone());
        });
        out
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        self.for_each_var(&mut |x| {
            if !out.contains(x) {
                out.push(x.clone());
            }
        });
        out
    }

    pub(crate) fn for_each_var(&self, visit: &mut impl FnMut(&Var)) {
        match self {
            Term::Var(x) => visit(x),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(visit)),
        }
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// No variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut linear = true;
        self.for_each_var(&mut |x| linear &= seen.insert(x.clone()));
        linear
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// Height of the term tree; a constant or variable has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        sigma.apply(self)
    }

    /// One-way matching: a `Matcher` μ with `self μ = target`.
    pub fn matches(&self, target: &Term) -> Option<Matcher> {
        let mut m = Matcher::default();
        m.extend(self, target).then_some(m)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => x.fmt(f),
            Term::App(_, _) if self.as_equation().is_some() => {
                let (l, r) = self.as_equation().unwrap();
                write!(f, "{l} =? {r}")
            }
            Term::App(s, args) if args.is_empty() => f.write_str(s),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    a.fmt(f)?;
                }
                f.write_str(")")
            }
        }
    }
}
