//! Graded narrowing: ordinary and basic derivations, and the constraint
//! calculus that implements basic narrowing.

mod calculus;
mod solve;

pub use calculus::{bq_step, BqConfig, BqMove, BqRule, BqStep, Calculus, Discharge, TraceEntry};
pub use solve::{replay, replay_trace, solve, Order, Outcome, Solution, SolveOptions, SolveReport, Solver, Strategy};

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::quantale::{Degree, QuantaleError};
use crate::rewrite::{GradedTrs, RewriteError, RewriteRule};
use crate::term::{Canonicalizer, FreshVars, Position, Substitution, Term, TermError, Var};
use crate::unify::mgu;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NarrowError {
    #[error("step {step} at position {position} is not basic")]
    NotBasic { step: usize, position: Position },
    #[error("no narrowing step with rule {rule} at position {position} of {term}")]
    NoSuchStep { rule: usize, position: Position, term: String },
    #[error("rule {0} does not exist")]
    NoSuchRule(usize),
    #[error("{0}")]
    Inapplicable(String),
    #[error("best-first search needs a totally ordered quantale")]
    PartialOrder,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// `∂_p(s)(ε) ⊩ s ⤳ (s[rρ]_p)σ` where `lρ ↦ rρ` is a fresh variant and σ
/// the most general unifier of `s|_p` and `lρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowStep {
    pub position: Position,
    pub rule: usize,
    /// The fresh variant that was used.
    pub variant: RewriteRule,
    pub mgu: Substitution,
    pub degree: Degree,
    pub result: Term,
}

/// All narrowing steps of `t`. Each rule is renamed apart once per call. The
/// signature of `trs` must cover every symbol of `t`.
pub fn narrowing_steps(trs: &GradedTrs, t: &Term, fresh: &mut FreshVars) -> Result<Vec<NarrowStep>, NarrowError> {
    let variants: Vec<RewriteRule> = trs.rules().iter().map(|r| rename_rule(r, fresh)).collect();
    let mut out = Vec::new();
    for p in t.fun_positions() {
        for (i, variant) in variants.iter().enumerate() {
            if let Some(step) = step_with(trs, t, &p, i, variant)? {
                out.push(step);
            }
        }
    }
    Ok(out)
}

pub(crate) fn rename_rule(rule: &RewriteRule, fresh: &mut FreshVars) -> RewriteRule {
    let renamed = fresh.variant(&[&rule.lhs, &rule.rhs]);
    let [lhs, rhs]: [Term; 2] = renamed.try_into().expect("two terms in, two out");
    RewriteRule { degree: rule.degree.clone(), lhs, rhs }
}

fn step_with(
    trs: &GradedTrs,
    t: &Term,
    p: &Position,
    rule: usize,
    variant: &RewriteRule,
) -> Result<Option<NarrowStep>, NarrowError> {
    let sub = t.subterm_at(p)?;
    if sub.is_var() {
        return Ok(None);
    }
    let Ok(sigma) = mgu(&[(sub.clone(), variant.lhs.clone())]) else {
        return Ok(None);
    };
    let degree = trs.signature().degree_at(t, p, &variant.degree)?;
    let result = sigma.apply(&t.replace_at(p, variant.rhs.clone())?);
    Ok(Some(NarrowStep { position: p.clone(), rule, variant: variant.clone(), mgu: sigma, degree, result }))
}

/// `B′ = {q ∈ B | p ⋢ q} ∪ {p.q | q ∈ Pos_F(r)}`. Fails when `p ∉ B`.
pub fn basic_update(basic: &BTreeSet<Position>, p: &Position, rhs: &Term) -> Result<BTreeSet<Position>, Position> {
    if !basic.contains(p) {
        return Err(p.clone());
    }
    let mut out: BTreeSet<Position> = basic.iter().filter(|q| !p.is_prefix_of(q)).cloned().collect();
    out.extend(rhs.fun_positions().iter().map(|q| p.concat(q)));
    Ok(out)
}

/// A narrowing derivation with accumulated substitution and degree, tracking
/// basic positions for as long as it stays basic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    start: Term,
    steps: Vec<NarrowStep>,
    current: Term,
    subst: Substitution,
    degree: Degree,
    basic: Option<BTreeSet<Position>>,
}

impl Derivation {
    pub fn new(trs: &GradedTrs, start: Term) -> Derivation {
        let basic = Some(start.fun_positions().into_iter().collect());
        Derivation {
            current: start.clone(),
            start,
            steps: Vec::new(),
            subst: Substitution::identity(),
            degree: trs.quantale().unit(),
            basic,
        }
    }

    pub fn start(&self) -> &Term {
        &self.start
    }

    pub fn steps(&self) -> &[NarrowStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn current(&self) -> &Term {
        &self.current
    }

    /// The composition `σ₁⋯σₙ` of the step unifiers.
    pub fn substitution(&self) -> &Substitution {
        &self.subst
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn is_basic(&self) -> bool {
        self.basic.is_some()
    }

    /// Basic positions of the current term, if the derivation is basic.
    pub fn basic_positions(&self) -> Option<&BTreeSet<Position>> {
        self.basic.as_ref()
    }

    /// Appends a step taken from the current term.
    pub fn push(&mut self, step: NarrowStep) -> Result<(), NarrowError> {
        self.subst = self.subst.compose(&step.mgu)?;
        self.degree = self.degree.try_tensor(&step.degree)?;
        self.basic = self.basic.as_ref().and_then(|b| basic_update(b, &step.position, &step.variant.rhs).ok());
        self.current = step.result.clone();
        self.steps.push(step);
        Ok(())
    }

    /// Narrows the current term at `position` with rule `rule` (0-based).
    pub fn narrow_at(
        &mut self,
        trs: &GradedTrs,
        position: &Position,
        rule: usize,
        fresh: &mut FreshVars,
    ) -> Result<(), NarrowError> {
        let original = trs.rules().get(rule).ok_or(NarrowError::NoSuchRule(rule))?;
        let variant = rename_rule(original, fresh);
        let step = step_with(trs, &self.current, position, rule, &variant)?.ok_or_else(|| NarrowError::NoSuchStep {
            rule,
            position: position.clone(),
            term: self.current.to_string(),
        })?;
        self.push(step)
    }

    /// The index of the first step taken outside the basic positions.
    pub fn first_non_basic(&self) -> Option<usize> {
        let mut basic: BTreeSet<Position> = self.start.fun_positions().into_iter().collect();
        for (i, st) in self.steps.iter().enumerate() {
            match basic_update(&basic, &st.position, &st.variant.rhs) {
                Ok(b) => basic = b,
                Err(_) => return Some(i),
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowOptions {
    /// Longest derivation considered.
    pub max_steps: usize,
    pub basic_only: bool,
    pub threshold: Option<Degree>,
}

impl NarrowOptions {
    pub fn new(max_steps: usize) -> NarrowOptions {
        NarrowOptions { max_steps, basic_only: false, threshold: None }
    }
}

/// Depth-first enumeration of every derivation from `t` with at most
/// `max_steps` steps, the empty one included. `visit` may stop the walk.
pub fn for_each_derivation<F>(
    trs: &GradedTrs,
    t: &Term,
    options: &NarrowOptions,
    fresh: &mut FreshVars,
    mut visit: F,
) -> Result<(), NarrowError>
where
    F: FnMut(&Derivation) -> ControlFlow<()>,
{
    fn go<F: FnMut(&Derivation) -> ControlFlow<()>>(
        trs: &GradedTrs,
        d: &Derivation,
        options: &NarrowOptions,
        fresh: &mut FreshVars,
        visit: &mut F,
    ) -> Result<ControlFlow<()>, NarrowError> {
        if visit(d).is_break() {
            return Ok(ControlFlow::Break(()));
        }
        if d.len() >= options.max_steps {
            return Ok(ControlFlow::Continue(()));
        }
        for step in narrowing_steps(trs, d.current(), fresh)? {
            if options.basic_only && !d.basic_positions().is_some_and(|b| b.contains(&step.position)) {
                continue;
            }
            let mut next = d.clone();
            next.push(step)?;
            if options.threshold.as_ref().is_some_and(|th| !next.degree().geq(th)) {
                continue;
            }
            if go(trs, &next, options, fresh, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
    let start = Derivation::new(trs, t.clone());
    if options.threshold.as_ref().is_some_and(|th| !start.degree().geq(th)) {
        return Ok(());
    }
    go(trs, &start, options, fresh, &mut visit).map(|_| ())
}

/// `t ⤳ⁿ u` with accumulated substitution and degree, for every derivation of
/// exactly `n` steps.
pub fn iterate_narrowing(
    trs: &GradedTrs,
    t: &Term,
    n: usize,
    threshold: Option<&Degree>,
) -> Result<Vec<(Term, Substitution, Degree)>, NarrowError> {
    let mut out = Vec::new();
    let options = NarrowOptions { max_steps: n, basic_only: false, threshold: threshold.cloned() };
    for_each_derivation(trs, t, &options, &mut FreshVars::new(), |d| {
        if d.len() == n {
            out.push((d.current().clone(), d.substitution().clone(), d.degree().clone()));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Variables of `t =? s` in order of first occurrence.
pub fn problem_vars(t: &Term, s: &Term) -> Vec<Var> {
    let mut vars = t.vars_in_order();
    for x in s.vars_in_order() {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    vars
}

/// Solutions of `t =? s` found by narrowing `t =? s` to `true` over `R′`, at
/// most `max_steps` steps including the final `x =? x ↦ true` step. Each
/// distinct (substitution on the problem variables, degree) pair appears once.
pub fn narrowing_solutions(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    options: &NarrowOptions,
) -> Result<Vec<(Substitution, Degree)>, NarrowError> {
    let ext = trs.extend()?;
    let vars = problem_vars(t, s);
    let mut out: Vec<(Substitution, Degree)> = Vec::new();
    for_each_derivation(&ext, &Term::equation(t.clone(), s.clone()), options, &mut FreshVars::new(), |d| {
        if d.current().is_truth() {
            let sigma = Canonicalizer::new().restricted(d.substitution(), &vars);
            if !out.iter().any(|(o, deg)| deg == d.degree() && o.is_variant_on(&sigma, &vars)) {
                out.push((sigma, d.degree().clone()));
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Replays a basic derivation in the calculus with the eager strategy: every
/// narrowing step becomes an LP step with the same fresh variant, followed by
/// SU. The returned entries are the calculus steps in order.
pub fn derivation_to_calculus(trs: &GradedTrs, derivation: &Derivation) -> Result<Vec<TraceEntry>, NarrowError> {
    if let Some(i) = derivation.first_non_basic() {
        return Err(NarrowError::NotBasic { step: i + 1, position: derivation.steps()[i].position.clone() });
    }
    let calculus = Calculus::new(trs)?;
    let mut cfg = BqConfig::initial(derivation.start().clone(), trs.quantale());
    let mut out = Vec::new();
    for step in derivation.steps() {
        cfg = calculus.lp(&cfg, &step.position, step.rule, &step.variant)?;
        out.push(TraceEntry { step: BqStep::lp(step.position.clone(), step.rule), config: cfg.clone() });
        cfg = match calculus.discharge(&cfg)? {
            Discharge::Unified(next) => next,
            _ => return Err(NarrowError::Inapplicable(format!("constraints of {cfg} are not unifiable"))),
        };
        out.push(TraceEntry { step: BqStep::plain(BqRule::Su), config: cfg.clone() });
    }
    Ok(out)
}
