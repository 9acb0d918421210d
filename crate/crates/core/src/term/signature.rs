use std::collections::BTreeMap;

use super::{Position, Symbol, Term, TermError, Var};
use crate::quantale::{Cbe, Degree, Quantale};

/// The binary equation symbol of the extended signature, arity `(id, id)`.
pub const EQ_SYMBOL: &str = "=?";
/// The constant of the extended signature that marks a solved goal.
pub const TRUE_SYMBOL: &str = "true";

/// A graded signature: each symbol has a modal arity, one change-of-base
/// endofunctor per argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    quantale: Quantale,
    // Arities are stored normalized.
    symbols: BTreeMap<Symbol, Vec<Cbe>>,
    extended: bool,
}

impl Signature {
    pub fn new(quantale: Quantale) -> Signature {
        Signature { quantale, symbols: BTreeMap::new(), extended: false }
    }

    pub fn quantale(&self) -> Quantale {
        self.quantale
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn declare(&mut self, name: &str, arity: Vec<Cbe>) -> Result<(), TermError> {
        if name == EQ_SYMBOL || name == TRUE_SYMBOL {
            return Err(TermError::ReservedSymbol(name.to_string()));
        }
        self.insert(name, arity)
    }

    fn insert(&mut self, name: &str, arity: Vec<Cbe>) -> Result<(), TermError> {
        if self.symbols.contains_key(name) {
            return Err(TermError::DuplicateSymbol(name.to_string()));
        }
        let arity = arity.iter().map(|c| c.normalize(self.quantale)).collect::<Result<Vec<_>, _>>()?;
        self.symbols.insert(name.into(), arity);
        Ok(())
    }

    /// Builder form of [`Signature::declare`].
    pub fn with(mut self, name: &str, arity: Vec<Cbe>) -> Result<Signature, TermError> {
        self.declare(name, arity)?;
        Ok(self)
    }

    /// Declares `name` with `n` identity-graded arguments.
    pub fn with_plain(self, name: &str, n: usize) -> Result<Signature, TermError> {
        self.with(name, vec![Cbe::Id; n])
    }

    pub fn arity(&self, name: &str) -> Option<&[Cbe]> {
        self.symbols.get(name).map(Vec::as_slice)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, &[Cbe])> {
        self.symbols.iter().map(|(s, a)| (&**s, a.as_slice()))
    }

    /// Constants of the unextended part, in name order.
    pub fn constants(&self) -> Vec<Term> {
        self.symbols().filter(|(s, a)| a.is_empty() && *s != TRUE_SYMBOL).map(|(s, _)| Term::constant(s)).collect()
    }

    /// The signature F′ with `=?:(id, id)` and `true` added.
    pub fn extend(&self) -> Result<Signature, TermError> {
        if self.extended {
            return Err(TermError::ReservedSymbol(EQ_SYMBOL.to_string()));
        }
        let mut ext = self.clone();
        ext.insert(EQ_SYMBOL, vec![Cbe::Id, Cbe::Id])?;
        ext.insert(TRUE_SYMBOL, Vec::new())?;
        ext.extended = true;
        Ok(ext)
    }

    /// Checks that every symbol of `t` is declared with a matching arity.
    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity = self.arity(f).ok_or_else(|| TermError::UnknownSymbol(f.to_string()))?;
                if arity.len() != args.len() {
                    return Err(TermError::ArityMismatch {
                        symbol: f.to_string(),
                        expected: arity.len(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// The grade `∂_p(t)`: the composition of the modal arities met on the way
    /// from the root of `t` down to `p`, normalized.
    pub fn grade_of_position(&self, t: &Term, p: &Position) -> Result<Cbe, TermError> {
        let q = self.quantale;
        let mut grade = Cbe::Id.normalize(q)?;
        let mut cur = t;
        for &i in p.indices() {
            let invalid = || TermError::InvalidPosition { position: p.clone(), term: t.to_string() };
            let Term::App(f, args) = cur else { return Err(invalid()) };
            let child = args.get(i.wrapping_sub(1)).ok_or_else(invalid)?;
            let arity = self.arity(f).ok_or_else(|| TermError::UnknownSymbol(f.to_string()))?;
            let phi = arity.get(i - 1).ok_or_else(invalid)?;
            grade = Cbe::compose(&grade, phi, q)?;
            cur = child;
        }
        Ok(grade)
    }

    /// The grade `∂_x(t)`: κ★ if `x` does not occur, otherwise the tensor of
    /// the grades of all its occurrences.
    pub fn grade_of_var(&self, t: &Term, x: &Var) -> Result<Cbe, TermError> {
        let q = self.quantale;
        let mut occurrences = t.occurrences(x).into_iter();
        let Some(first) = occurrences.next() else {
            return Ok(Cbe::ConstKappa);
        };
        let mut grade = self.grade_of_position(t, &first)?;
        for p in occurrences {
            grade = Cbe::tensor(&grade, &self.grade_of_position(t, &p)?, q)?;
        }
        Ok(grade)
    }

    /// `∂_p(t)(ε)`, the degree of a rewrite with a rule of degree ε at `p`.
    pub fn degree_at(&self, t: &Term, p: &Position, eps: &Degree) -> Result<Degree, TermError> {
        Ok(self.grade_of_position(t, p)?.apply(eps)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn grade_at_root_is_identity() {
        let sig = Signature::new(Quantale::Lawvere).with("f", vec![Cbe::scale(3, 1)]).unwrap();
        let t = Term::app("f", vec![Term::var("x")]);
        assert!(sig.grade_of_position(&t, &Position::root()).unwrap().equivalent(&Cbe::Id, sig.quantale()).unwrap());
        assert_eq!(sig.grade_of_position(&t, &p("1")).unwrap(), Cbe::scale(3, 1));
        let one = Quantale::Lawvere.int(1).unwrap();
        assert_eq!(sig.degree_at(&t, &p("1"), &one).unwrap(), Quantale::Lawvere.int(3).unwrap());
    }

    #[test]
    fn grades_compose_along_paths() {
        let sig = Signature::new(Quantale::Lawvere)
            .with("f", vec![Cbe::scale(3, 1)])
            .unwrap()
            .with("g", vec![Cbe::scale(1, 2), Cbe::Id])
            .unwrap()
            .with_plain("a", 0)
            .unwrap();
        let t = Term::app("f", vec![Term::app("g", vec![Term::constant("a"), Term::var("x")])]);
        assert_eq!(sig.grade_of_position(&t, &p("1.1")).unwrap(), Cbe::scale(3, 2));
        assert_eq!(sig.grade_of_position(&t, &p("1.2")).unwrap(), Cbe::scale(3, 1));
        assert!(sig.grade_of_position(&t, &p("2")).is_err());
    }

    #[test]
    fn grade_of_variables() {
        let sig = Signature::new(Quantale::Lawvere).with_plain("f", 3).unwrap();
        let x = Var::new("x");
        let t = Term::app("f", vec![Term::var("x"), Term::var("x"), Term::var("x")]);
        assert_eq!(sig.grade_of_var(&t, &x).unwrap(), Cbe::scale(3, 1));
        assert_eq!(sig.grade_of_var(&t, &Var::new("y")).unwrap(), Cbe::ConstKappa);
        let g = sig.grade_of_var(&Term::var("x"), &x).unwrap();
        assert!(g.equivalent(&Cbe::Id, Quantale::Lawvere).unwrap());
    }

    #[test]
    fn plain_arities_give_identity_everywhere() {
        for q in Quantale::ALL {
            let sig = Signature::new(q).with_plain("f", 2).unwrap().with_plain("a", 0).unwrap();
            let t = Term::app("f", vec![Term::app("f", vec![Term::constant("a"), Term::var("x")]), Term::var("y")]);
            for pos in t.positions() {
                let g = sig.grade_of_position(&t, &pos).unwrap();
                assert!(g.equivalent(&Cbe::Id, q).unwrap());
            }
        }
    }

    #[test]
    fn extension_and_reserved_names() {
        let sig = Signature::new(Quantale::Lawvere);
        assert!(matches!(sig.clone().with("true", vec![]), Err(TermError::ReservedSymbol(_))));
        let ext = sig.extend().unwrap();
        assert!(ext.arity(EQ_SYMBOL).is_some());
        assert!(ext.extend().is_err());
    }

    #[test]
    fn inadmissible_arity_rejected() {
        let err = Signature::new(Quantale::FuzzyGodel).with("f", vec![Cbe::scale(3, 1)]);
        assert!(matches!(err, Err(TermError::Quantale(_))));
    }

    #[test]
    fn term_checks() {
        let sig = Signature::new(Quantale::Bool).with_plain("f", 2).unwrap();
        assert!(matches!(sig.check_term(&Term::app("f", vec![Term::var("x")])), Err(TermError::ArityMismatch { .. })));
        assert!(matches!(sig.check_term(&Term::constant("k")), Err(TermError::UnknownSymbol(_))));
    }
}
