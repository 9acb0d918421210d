//! Syntactic unification.

use thiserror::Error;

use crate::term::{Substitution, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("symbol clash: {0} vs {1}")]
    Clash(Term, Term),
    #[error("occurs check: {0} occurs in {1}")]
    Occurs(Var, Term),
}

/// An idempotent most general unifier of all pairs in `equations`, computed by
/// Martelli–Montanari transformation with an eager occurs check. The domain
/// of the result is contained in the variables of `equations`.
pub fn mgu(equations: &[(Term, Term)]) -> Result<Substitution, UnifyError> {
    let mut pending: Vec<(Term, Term)> = equations.iter().rev().cloned().collect();
    // Solved part, kept fully applied: no bound variable occurs anywhere else.
    let mut solved: Vec<(Var, Term)> = Vec::new();
    while let Some((s, t)) = pending.pop() {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            // A variable on the right is bound first, so `mgu(&[(u, l)])` keeps
            // the variables of `u` where it can.
            (t, Term::Var(x)) | (Term::Var(x), t) => {
                if t.contains_var(&x) {
                    return Err(UnifyError::Occurs(x, t));
                }
                let bind = |u: &Term| substitute(u, &x, &t);
                for (a, b) in pending.iter_mut() {
                    *a = bind(a);
                    *b = bind(b);
                }
                for (_, u) in solved.iter_mut() {
                    *u = bind(u);
                }
                solved.push((x, t));
            }
            (Term::App(f, ss), Term::App(g, ts)) => {
                if f != g || ss.len() != ts.len() {
                    return Err(UnifyError::Clash(Term::App(f, ss), Term::App(g, ts)));
                }
                pending.extend(ss.into_iter().zip(ts).rev());
            }
        }
    }
    Ok(Substitution::from_bindings(solved).expect("solved form is idempotent"))
}

pub fn unifiable(equations: &[(Term, Term)]) -> bool {
    mgu(equations).is_ok()
}

fn substitute(u: &Term, x: &Var, t: &Term) -> Term {
    match u {
        Term::Var(y) if y == x => t.clone(),
        Term::Var(_) => u.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute(a, x, t)).collect()),
    }
}
