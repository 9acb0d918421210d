use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{Term, TermError, Var};

/// An idempotent substitution with finite domain.
///
/// Bindings `x ↦ x` are never stored, and no variable of the domain occurs in
/// the range; every public constructor and [`Substitution::compose`] enforce
/// this.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(x: Var, t: Term) -> Result<Substitution, TermError> {
        Substitution::from_bindings([(x, t)])
    }

    pub fn from_bindings<I>(bindings: I) -> Result<Substitution, TermError>
    where
        I: IntoIterator<Item = (Var, Term)>,
    {
        let mut map = BTreeMap::new();
        for (x, t) in bindings {
            if t.as_var() != Some(&x) {
                map.insert(x, t);
            }
        }
        let s = Substitution { map };
        s.check_idempotent()?;
        Ok(s)
    }

    fn check_idempotent(&self) -> Result<(), TermError> {
        for t in self.map.values() {
            let mut bad = None;
            t.for_each_var(&mut |y| {
                if bad.is_none() && self.map.contains_key(y) {
                    bad = Some(y.clone());
                }
            });
            if let Some(y) = bad {
                return Err(TermError::NotIdempotent(y));
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn range_vars(&self) -> BTreeSet<Var> {
        self.map.values().flat_map(Term::vars).collect()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(x) => self.map.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// The composition `σρ`, i.e. `t(σρ) = (tσ)ρ`. Fails if the result is not
    /// idempotent.
    pub fn compose(&self, rho: &Substitution) -> Result<Substitution, TermError> {
        let mut map = BTreeMap::new();
        for (x, t) in &self.map {
            let t = rho.apply(t);
            if t.as_var() != Some(x) {
                map.insert(x.clone(), t);
            }
        }
        for (y, u) in &rho.map {
            if !self.map.contains_key(y) {
                map.insert(y.clone(), u.clone());
            }
        }
        let s = Substitution { map };
        s.check_idempotent()?;
        Ok(s)
    }

    /// `σ|_vars`
    pub fn restrict<'a, I>(&self, vars: I) -> Substitution
    where
        I: IntoIterator<Item = &'a Var>,
    {
        let map = vars.into_iter().filter_map(|x| self.map.get(x).map(|t| (x.clone(), t.clone()))).collect();
        Substitution { map }
    }

    fn image_tuple(&self, vars: &[Var]) -> Term {
        Term::App("".into(), vars.iter().map(|x| self.apply(&Term::Var(x.clone()))).collect())
    }

    /// `self ≦ other` with respect to `vars`: some ρ has `xσρ = xτ` for every
    /// `x` in `vars`.
    pub fn is_more_general_on(&self, other: &Substitution, vars: &[Var]) -> bool {
        self.image_tuple(vars).matches(&other.image_tuple(vars)).is_some()
    }

    /// Equal up to renaming on `vars`.
    pub fn is_variant_on(&self, other: &Substitution, vars: &[Var]) -> bool {
        self.is_more_general_on(other, vars) && other.is_more_general_on(self, vars)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// A one-way matching substitution, applied simultaneously. Unlike
/// [`Substitution`] it may bind a variable that also occurs in its range.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matcher {
    map: BTreeMap<Var, Term>,
}

impl Matcher {
    /// Extends the matcher so that `pattern μ = target`; returns `false` on
    /// failure (the matcher is then in an unspecified state).
    pub fn extend(&mut self, pattern: &Term, target: &Term) -> bool {
        match (pattern, target) {
            (Term::Var(x), _) => match self.map.get(x) {
                Some(bound) => bound == target,
                None => {
                    self.map.insert(x.clone(), target.clone());
                    true
                }
            },
            (Term::App(f, ps), Term::App(g, ts)) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| self.extend(p, t))
            }
            _ => false,
        }
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.map.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }
}

impl fmt::Display for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Issues never-before-used variable indices.
///
/// One counter per search run; concurrent workers should be given disjoint
/// index ranges via [`FreshVars::starting_at`].
#[derive(Debug, Clone)]
pub struct FreshVars {
    next: u32,
}

impl Default for FreshVars {
    fn default() -> Self {
        FreshVars { next: 1 }
    }
}

impl FreshVars {
    pub fn new() -> FreshVars {
        FreshVars::default()
    }

    pub fn starting_at(next: u32) -> FreshVars {
        FreshVars { next: next.max(1) }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    fn bump(&mut self) -> u32 {
        let k = self.next;
        self.next = self.next.checked_add(1).expect("fresh variable space exhausted");
        k
    }

    pub fn fresh_var(&mut self, name: &str) -> Var {
        Var::indexed(name, self.bump())
    }

    /// Renames every variable of `terms` apart, consistently across the
    /// slice. The counter advances at least once per call.
    pub fn variant(&mut self, terms: &[&Term]) -> Vec<Term> {
        fn go(t: &Term, fresh: &mut FreshVars, renaming: &mut HashMap<Var, Var>) -> Term {
            match t {
                Term::Var(x) => {
                    Term::Var(renaming.entry(x.clone()).or_insert_with(|| x.with_index(fresh.bump())).clone())
                }
                Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| go(a, fresh, renaming)).collect()),
            }
        }
        let mut renaming = HashMap::new();
        let out = terms.iter().map(|t| go(t, self, &mut renaming)).collect();
        if renaming.is_empty() {
            self.bump();
        }
        out
    }
}

/// Renames fresh (positive-index) variables to sequential indices in order of
/// first occurrence, so that structures equal up to renaming of fresh
/// variables become syntactically equal. User variables are left alone.
#[derive(Debug, Default)]
pub struct Canonicalizer {
    map: HashMap<Var, Var>,
    next: u32,
}

impl Canonicalizer {
    pub fn new() -> Canonicalizer {
        Canonicalizer::default()
    }

    pub fn var(&mut self, x: &Var) -> Var {
        if !x.is_fresh() {
            return x.clone();
        }
        let next = &mut self.next;
        self.map
            .entry(x.clone())
            .or_insert_with(|| {
                *next += 1;
                x.with_index(*next)
            })
            .clone()
    }

    pub fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(self.var(x)),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    /// The restriction `σ|_vars` with fresh variables renamed canonically.
    pub fn restricted(&mut self, sigma: &Substitution, vars: &[Var]) -> Substitution {
        let map = vars.iter().filter_map(|x| sigma.get(x).map(|t| (self.var(x), self.term(t)))).collect();
        Substitution { map }
    }
}
