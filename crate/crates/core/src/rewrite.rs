//! Graded rewrite systems and the quantitative rewrite relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::quantale::{Degree, Quantale, QuantaleError};
use crate::term::{Matcher, Position, Signature, Term, TermError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rule {rule}: left-hand side is a variable")]
    VariableLhs { rule: String },
    #[error("rule {rule}: right-hand side variables {vars} do not occur on the left")]
    ExtraVariables { rule: String, vars: String },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// `ε ⊩ l ↦ r`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub degree: Degree,
    pub lhs: Term,
    pub rhs: Term,
}

impl RewriteRule {
    /// Checks the variable conditions `l ∉ V` and `V(r) ⊆ V(l)`.
    pub fn new(degree: Degree, lhs: Term, rhs: Term) -> Result<RewriteRule, RewriteError> {
        let rule = RewriteRule { degree, lhs, rhs };
        if rule.lhs.is_var() {
            return Err(RewriteError::VariableLhs { rule: rule.to_string() });
        }
        let lvars = rule.lhs.vars();
        let extra: Vec<String> =
            rule.rhs.vars().into_iter().filter(|x| !lvars.contains(x)).map(|x| x.to_string()).collect();
        if !extra.is_empty() {
            return Err(RewriteError::ExtraVariables { rule: rule.to_string(), vars: extra.join(", ") });
        }
        Ok(rule)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vs = self.lhs.vars();
        vs.extend(self.rhs.vars());
        vs
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self.degree, self.lhs, self.rhs)
    }
}

/// Static attributes of a single rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleAttributes {
    pub left_linear: bool,
    pub right_linear: bool,
    pub right_ground: bool,
    /// Every variable has the same grade on both sides.
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeReport {
    pub rules: Vec<RuleAttributes>,
    pub confluent: bool,
}

impl AttributeReport {
    fn all(&self, get: impl Fn(&RuleAttributes) -> bool) -> bool {
        self.rules.iter().all(get)
    }

    pub fn left_linear(&self) -> bool {
        self.all(|r| r.left_linear)
    }

    pub fn right_linear(&self) -> bool {
        self.all(|r| r.right_linear)
    }

    pub fn right_ground(&self) -> bool {
        self.all(|r| r.right_ground)
    }

    pub fn balanced(&self) -> bool {
        self.all(|r| r.balanced)
    }
}

impl fmt::Display for AttributeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rules.iter().enumerate() {
            writeln!(
                f,
                "rule {}: left-linear {}, right-linear {}, right-ground {}, balanced {}",
                i + 1,
                r.left_linear,
                r.right_linear,
                r.right_ground,
                r.balanced
            )?;
        }
        writeln!(f, "left-linear {}", self.left_linear())?;
        writeln!(f, "right-linear {}", self.right_linear())?;
        writeln!(f, "right-ground {}", self.right_ground())?;
        writeln!(f, "balanced {}", self.balanced())?;
        write!(f, "confluent (declared) {}", self.confluent)
    }
}

/// A single rewrite step `∂_p(s)(ε) ⊩ s →_R s[rμ]_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub position: Position,
    /// Index into the rule list.
    pub rule: usize,
    pub matcher: Matcher,
    pub degree: Degree,
    pub result: Term,
}

/// Which redexes a search may contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    #[default]
    All,
    Innermost,
}

/// Best degree found for a reached term, with one witnessing trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reached {
    pub degree: Degree,
    pub trace: Vec<RewriteStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedTrs {
    signature: Signature,
    rules: Vec<RewriteRule>,
    attributes: AttributeReport,
}

impl GradedTrs {
    /// Validates every rule against the signature and computes attributes.
    /// Confluence is not checked; it defaults to undeclared.
    pub fn new(signature: Signature, rules: Vec<RewriteRule>) -> Result<GradedTrs, RewriteError> {
        let q = signature.quantale();
        let mut attrs = Vec::with_capacity(rules.len());
        for rule in &rules {
            if rule.degree.quantale() != q {
                return Err(QuantaleError::Mismatch(rule.degree.quantale(), q).into());
            }
            let checked = RewriteRule::new(rule.degree.clone(), rule.lhs.clone(), rule.rhs.clone())?;
            signature.check_term(&checked.lhs)?;
            signature.check_term(&checked.rhs)?;
            attrs.push(rule_attributes(&signature, rule)?);
        }
        Ok(GradedTrs { signature, rules, attributes: AttributeReport { rules: attrs, confluent: false } })
    }

    /// Records the user's claim that the system is confluent.
    pub fn declare_confluent(mut self, confluent: bool) -> GradedTrs {
        self.attributes.confluent = confluent;
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn quantale(&self) -> Quantale {
        self.signature.quantale()
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn attributes(&self) -> &AttributeReport {
        &self.attributes
    }

    pub fn is_extended(&self) -> bool {
        self.signature.is_extended()
    }

    /// `R′`: adds `=?`, `true` and the rule `κ ⊩ x =? x ↦ true`.
    pub fn extend(&self) -> Result<GradedTrs, RewriteError> {
        let signature = self.signature.extend()?;
        let x = Term::var("x");
        let mut rules = self.rules.clone();
        rules.push(RewriteRule::new(self.quantale().unit(), Term::equation(x.clone(), x), Term::truth())?);
        Ok(GradedTrs::new(signature, rules)?.declare_confluent(self.attributes.confluent))
    }

    /// Every single-step rewrite of `s`, ordered by position (preorder) then
    /// rule index.
    pub fn rewrite_steps(&self, s: &Term) -> Result<Vec<RewriteStep>, RewriteError> {
        let mut out = Vec::new();
        for p in s.fun_positions() {
            let sub = s.subterm_at(&p)?;
            for (i, rule) in self.rules.iter().enumerate() {
                if let Some(matcher) = rule.lhs.matches(sub) {
                    let degree = self.signature.degree_at(s, &p, &rule.degree)?;
                    let result = s.replace_at(&p, matcher.apply(&rule.rhs))?;
                    out.push(RewriteStep { position: p.clone(), rule: i, matcher, degree, result });
                }
            }
        }
        Ok(out)
    }

    /// The steps of [`GradedTrs::rewrite_steps`] whose redex contains no
    /// other redex.
    pub fn innermost_steps(&self, s: &Term) -> Result<Vec<RewriteStep>, RewriteError> {
        let steps = self.rewrite_steps(s)?;
        let redexes: BTreeSet<Position> = steps.iter().map(|st| st.position.clone()).collect();
        Ok(steps.into_iter().filter(|st| !redexes.iter().any(|q| st.position.is_proper_prefix_of(q))).collect())
    }

    pub fn steps(&self, s: &Term, mode: StepMode) -> Result<Vec<RewriteStep>, RewriteError> {
        match mode {
            StepMode::All => self.rewrite_steps(s),
            StepMode::Innermost => self.innermost_steps(s),
        }
    }

    /// All terms reachable from `t` in at most `max_steps` steps, each with the
    /// greatest accumulated degree found. Paths whose degree drops below
    /// `threshold` are cut.
    pub fn rewrite_search(
        &self,
        t: &Term,
        max_steps: usize,
        threshold: Option<&Degree>,
        mode: StepMode,
    ) -> Result<BTreeMap<Term, Reached>, RewriteError> {
        let unit = self.quantale().unit();
        let mut best: BTreeMap<Term, Reached> = BTreeMap::new();
        if threshold.is_some_and(|th| !unit.geq(th)) {
            return Ok(best);
        }
        best.insert(t.clone(), Reached { degree: unit, trace: Vec::new() });
        // Bellman-Ford by layers: only terms improved in the last layer need
        // expanding again.
        let mut changed = vec![t.clone()];
        for _ in 0..max_steps {
            let mut improved = BTreeSet::new();
            let snapshot: Vec<(Term, Reached)> = changed.iter().map(|u| (u.clone(), best[u].clone())).collect();
            for (u, reached) in snapshot {
                for step in self.steps(&u, mode)? {
                    let degree = reached.degree.tensor(&step.degree);
                    if threshold.is_some_and(|th| !degree.geq(th)) {
                        continue;
                    }
                    let better = match best.get(&step.result) {
                        None => true,
                        Some(old) => degree.order(&old.degree).is_gt(),
                    };
                    if better {
                        let mut trace = reached.trace.clone();
                        let target = step.result.clone();
                        trace.push(step);
                        best.insert(target.clone(), Reached { degree, trace });
                        improved.insert(target);
                    }
                }
            }
            if improved.is_empty() {
                break;
            }
            changed = improved.into_iter().collect();
        }
        Ok(best)
    }

    /// Best joinability degree of `t` and `s` found within `max_steps`, via
    /// `t =? s →* true` over `R′`.
    pub fn joinable(&self, t: &Term, s: &Term, max_steps: usize) -> Result<Option<Reached>, RewriteError> {
        let ext = self.extend()?;
        let mut reach = ext.rewrite_search(&Term::equation(t.clone(), s.clone()), max_steps, None, StepMode::All)?;
        Ok(reach.remove(&Term::truth()))
    }
}

fn rule_attributes(sig: &Signature, rule: &RewriteRule) -> Result<RuleAttributes, RewriteError> {
    let q = sig.quantale();
    let mut balanced = true;
    for x in rule.vars() {
        let gl = sig.grade_of_var(&rule.lhs, &x)?;
        let gr = sig.grade_of_var(&rule.rhs, &x)?;
        balanced &= gl.equivalent(&gr, q)?;
    }
    Ok(RuleAttributes {
        left_linear: rule.lhs.is_linear(),
        right_linear: rule.rhs.is_linear(),
        right_ground: rule.rhs.is_ground(),
        balanced,
    })
}

/// Renders a trace as one line per step, `p: s -> t  @ degree`.
pub fn render_trace(start: &Term, trace: &[RewriteStep]) -> Vec<String> {
    let mut cur = start.clone();
    trace
        .iter()
        .map(|st| {
            let line = format!("{}: {} -> {}  @ {}", st.position, cur, st.result, st.degree);
            cur = st.result.clone();
            line
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Cbe;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn f(a: Term) -> Term {
        Term::app("f", vec![a])
    }

    fn lw(n: i64) -> Degree {
        Quantale::Lawvere.int(n).unwrap()
    }

    fn innermost_system() -> GradedTrs {
        let sig = Signature::new(Quantale::Lawvere)
            .with_plain("f", 1)
            .unwrap()
            .with_plain("a", 0)
            .unwrap()
            .with_plain("b", 0)
            .unwrap();
        let rules = vec![
            RewriteRule::new(lw(0), f(c("a")), f(c("b"))).unwrap(),
            RewriteRule::new(lw(2), c("a"), c("b")).unwrap(),
        ];
        GradedTrs::new(sig, rules).unwrap()
    }

    #[test]
    fn variable_conditions() {
        assert!(matches!(RewriteRule::new(lw(1), Term::var("x"), c("a")), Err(RewriteError::VariableLhs { .. })));
        assert!(matches!(RewriteRule::new(lw(1), c("a"), Term::var("x")), Err(RewriteError::ExtraVariables { .. })));
    }

    #[test]
    fn steps_and_innermost() {
        let trs = innermost_system();
        let steps = trs.rewrite_steps(&f(c("a"))).unwrap();
        let summary: Vec<_> = steps.iter().map(|s| (s.position.to_string(), s.rule, s.degree.clone())).collect();
        assert_eq!(summary, vec![("^".to_string(), 0, lw(0)), ("1".to_string(), 1, lw(2))]);
        let inner = trs.innermost_steps(&f(c("a"))).unwrap();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].degree, lw(2));
        assert!(trs.rewrite_steps(&f(c("b"))).unwrap().is_empty());
    }

    #[test]
    fn search_finds_the_root_step() {
        let trs = innermost_system();
        let reach = trs.rewrite_search(&f(c("a")), 3, None, StepMode::All).unwrap();
        assert_eq!(reach[&f(c("b"))].degree, lw(0));
        let reach = trs.rewrite_search(&f(c("a")), 3, None, StepMode::Innermost).unwrap();
        assert_eq!(reach[&f(c("b"))].degree, lw(2));
        let zero = trs.rewrite_search(&f(c("a")), 0, None, StepMode::All).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[&f(c("a"))].degree, lw(0));
    }

    #[test]
    fn threshold_cuts_paths() {
        let trs = innermost_system();
        let reach = trs.rewrite_search(&c("a"), 3, Some(&lw(1)), StepMode::All).unwrap();
        assert!(!reach.contains_key(&c("b")));
    }

    #[test]
    fn extension() {
        let trs = innermost_system();
        let ext = trs.extend().unwrap();
        assert_eq!(ext.rules().len(), 3);
        assert_eq!(ext.rules()[2].degree, lw(0));
        assert!(ext.extend().is_err());
        assert_eq!(trs.joinable(&f(c("a")), &f(c("a")), 1).unwrap().unwrap().degree, lw(0));
        assert_eq!(trs.joinable(&c("a"), &c("b"), 3).unwrap().unwrap().degree, lw(2));
    }

    #[test]
    fn unbalanced_rule_detected() {
        let sig =
            Signature::new(Quantale::Lawvere).with("f", vec![Cbe::scale(3, 1)]).unwrap().with_plain("g", 1).unwrap();
        let x = Term::var("x");
        let rule = RewriteRule::new(lw(0), f(x.clone()), Term::app("g", vec![x])).unwrap();
        let trs = GradedTrs::new(sig, vec![rule]).unwrap();
        assert!(!trs.attributes().balanced());
        assert!(trs.attributes().right_linear());
    }

    #[test]
    fn trace_rendering() {
        let trs = innermost_system();
        let reach = trs.rewrite_search(&f(c("a")), 1, None, StepMode::Innermost).unwrap();
        let lines = render_trace(&f(c("a")), &reach[&f(c("b"))].trace);
        assert_eq!(lines, vec!["1: f(a) -> f(b)  @ 2"]);
    }
}
