use std::fmt;
use std::str::FromStr;

use super::{rename_rule, NarrowError};
use crate::quantale::{Degree, Quantale};
use crate::rewrite::{GradedTrs, RewriteRule};
use crate::term::{FreshVars, Position, Signature, Substitution, Term};
use crate::unify::mgu;

/// A configuration `e; C; σ; δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BqConfig {
    pub goal: Term,
    /// Pending equations, each stored as `(lσ, tσ)`.
    pub constraints: Vec<(Term, Term)>,
    pub subst: Substitution,
    pub degree: Degree,
}

impl BqConfig {
    /// `t =? s; ∅; Id; κ`
    pub fn start(t: Term, s: Term, q: Quantale) -> BqConfig {
        BqConfig::initial(Term::equation(t, s), q)
    }

    /// `e; ∅; Id; κ`
    pub fn initial(goal: Term, q: Quantale) -> BqConfig {
        BqConfig { goal, constraints: Vec::new(), subst: Substitution::identity(), degree: q.unit() }
    }

    /// `true; ∅; σ; δ`
    pub fn is_solved(&self) -> bool {
        self.goal.is_truth() && self.constraints.is_empty()
    }
}

impl fmt::Display for BqConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {{", self.goal)?;
        for (i, (l, r)) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} = {r}")?;
        }
        write!(f, "}}; {}; {}", self.subst, self.degree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BqRule {
    Lp,
    Su,
    Cla,
    Con,
}

impl fmt::Display for BqRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BqRule::Lp => "LP",
            BqRule::Su => "SU",
            BqRule::Cla => "Cla",
            BqRule::Con => "Con",
        })
    }
}

impl FromStr for BqRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LP" => Ok(BqRule::Lp),
            "SU" => Ok(BqRule::Su),
            "Cla" => Ok(BqRule::Cla),
            "Con" => Ok(BqRule::Con),
            _ => Err(format!("unknown calculus rule `{s}`")),
        }
    }
}

/// One applicable calculus step. `result` is `None` for the failure produced
/// by Cla.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BqMove {
    pub rule: BqRule,
    pub position: Option<Position>,
    pub rule_index: Option<usize>,
    pub result: Option<BqConfig>,
}

/// A calculus step as written in a trace: the rule, and for LP the position
/// and the (0-based) rule index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BqStep {
    pub rule: BqRule,
    pub position: Option<Position>,
    pub rule_index: Option<usize>,
}

impl BqStep {
    pub fn lp(position: Position, rule_index: usize) -> BqStep {
        BqStep { rule: BqRule::Lp, position: Some(position), rule_index: Some(rule_index) }
    }

    pub fn plain(rule: BqRule) -> BqStep {
        BqStep { rule, position: None, rule_index: None }
    }
}

impl fmt::Display for BqStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let (Some(p), Some(i)) = (&self.position, self.rule_index) {
            write!(f, " {p} r{}", i + 1)?;
        }
        Ok(())
    }
}

/// One step of a derivation in the calculus with the configuration it
/// produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: BqStep,
    pub config: BqConfig,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.step, self.config)
    }
}

/// What SU or Cla make of the constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discharge {
    /// `C = ∅`: neither rule applies.
    Empty,
    Unified(BqConfig),
    Clash,
}

/// The calculus over a fixed rule set. Degrees of LP steps are computed over
/// the extended signature, since goals are `=?`-rooted.
#[derive(Debug, Clone)]
pub struct Calculus<'a> {
    rules: &'a [RewriteRule],
    signature: Signature,
    head_filter: bool,
}

impl<'a> Calculus<'a> {
    pub fn new(trs: &'a GradedTrs) -> Result<Calculus<'a>, NarrowError> {
        let signature = if trs.is_extended() { trs.signature().clone() } else { trs.signature().extend()? };
        Ok(Calculus { rules: trs.rules(), signature, head_filter: false })
    }

    /// Skips LP instances whose rule head differs from the head of the
    /// selected subterm. Such instances always end in Cla.
    pub fn with_head_filter(mut self, on: bool) -> Self {
        self.head_filter = on;
        self
    }

    pub fn rules(&self) -> &[RewriteRule] {
        self.rules
    }

    /// LP at `p` with the given (already renamed) variant of rule `rule`.
    pub fn lp(
        &self,
        cfg: &BqConfig,
        p: &Position,
        rule: usize,
        variant: &RewriteRule,
    ) -> Result<BqConfig, NarrowError> {
        if cfg.goal.is_truth() {
            return Err(NarrowError::Inapplicable("LP on a solved goal".into()));
        }
        let sub = cfg.goal.subterm_at(p)?;
        if sub.is_var() {
            return Err(NarrowError::Inapplicable(format!("LP at variable position {p}")));
        }
        if rule >= self.rules.len() {
            return Err(NarrowError::NoSuchRule(rule));
        }
        let gamma = self.signature.degree_at(&cfg.goal, p, &variant.degree)?;
        let mut constraints = vec![(cfg.subst.apply(&variant.lhs), cfg.subst.apply(sub))];
        constraints.extend(cfg.constraints.iter().cloned());
        Ok(BqConfig {
            goal: cfg.goal.replace_at(p, variant.rhs.clone())?,
            constraints,
            subst: cfg.subst.clone(),
            degree: cfg.degree.try_tensor(&gamma)?,
        })
    }

    /// LP followed at once by SU, for a configuration without pending
    /// constraints. `None` when SU is not possible, i.e. Cla would fail.
    pub fn lp_su(&self, cfg: &BqConfig, p: &Position, variant: &RewriteRule) -> Result<Option<BqConfig>, NarrowError> {
        let instance = cfg.subst.apply(cfg.goal.subterm_at(p)?);
        self.lp_su_with(cfg, p, &instance, variant)
    }

    /// [`Calculus::lp_su`] with `instance = (e|_p)σ` already computed.
    pub(crate) fn lp_su_with(
        &self,
        cfg: &BqConfig,
        p: &Position,
        instance: &Term,
        variant: &RewriteRule,
    ) -> Result<Option<BqConfig>, NarrowError> {
        debug_assert!(cfg.constraints.is_empty());
        if let (Some(f), Some(g)) = (instance.head(), variant.lhs.head()) {
            if f != g {
                return Ok(None);
            }
        }
        // The variant is fresh, so σ leaves its left-hand side unchanged.
        let Ok(rho) = mgu(&[(instance.clone(), variant.lhs.clone())]) else {
            return Ok(None);
        };
        let gamma = self.signature.degree_at(&cfg.goal, p, &variant.degree)?;
        Ok(Some(BqConfig {
            goal: cfg.goal.replace_at(p, variant.rhs.clone())?,
            constraints: Vec::new(),
            subst: cfg.subst.compose(&rho)?,
            degree: cfg.degree.try_tensor(&gamma)?,
        }))
    }

    /// SU when the constraints unify, Cla when they do not.
    pub fn discharge(&self, cfg: &BqConfig) -> Result<Discharge, NarrowError> {
        if cfg.constraints.is_empty() {
            return Ok(Discharge::Empty);
        }
        // Oriented so that variables of the goal side are kept where possible.
        let flipped: Vec<(Term, Term)> = cfg.constraints.iter().map(|(l, t)| (t.clone(), l.clone())).collect();
        match mgu(&flipped) {
            Err(_) => Ok(Discharge::Clash),
            Ok(rho) => Ok(Discharge::Unified(BqConfig {
                goal: cfg.goal.clone(),
                constraints: Vec::new(),
                subst: cfg.subst.compose(&rho)?,
                degree: cfg.degree.clone(),
            })),
        }
    }

    /// Con, for goals of the form `u =? v`.
    pub fn con(&self, cfg: &BqConfig) -> Option<BqConfig> {
        let (u, v) = cfg.goal.as_equation()?;
        let mut constraints = cfg.constraints.clone();
        constraints.push((cfg.subst.apply(u), cfg.subst.apply(v)));
        Some(BqConfig { goal: Term::truth(), constraints, subst: cfg.subst.clone(), degree: cfg.degree.clone() })
    }

    /// LP instances at every nonvariable position with every rule, each rule
    /// renamed apart once for this call.
    pub fn lp_moves(&self, cfg: &BqConfig, fresh: &mut FreshVars) -> Result<Vec<BqMove>, NarrowError> {
        if cfg.goal.is_truth() {
            return Ok(Vec::new());
        }
        let variants: Vec<RewriteRule> = self.rules.iter().map(|r| rename_rule(r, fresh)).collect();
        let mut out = Vec::new();
        for p in cfg.goal.fun_positions() {
            let head = cfg.goal.subterm_at(&p)?.head();
            for (i, variant) in variants.iter().enumerate() {
                if self.head_filter && variant.lhs.head() != head {
                    continue;
                }
                let next = self.lp(cfg, &p, i, variant)?;
                out.push(BqMove {
                    rule: BqRule::Lp,
                    position: Some(p.clone()),
                    rule_index: Some(i),
                    result: Some(next),
                });
            }
        }
        Ok(out)
    }

    /// Every rule instance applicable to `cfg`, as in the unrestricted
    /// calculus.
    pub fn step(&self, cfg: &BqConfig, fresh: &mut FreshVars) -> Result<Vec<BqMove>, NarrowError> {
        let mut out = self.lp_moves(cfg, fresh)?;
        match self.discharge(cfg)? {
            Discharge::Empty => {}
            Discharge::Unified(next) => {
                out.push(BqMove { rule: BqRule::Su, position: None, rule_index: None, result: Some(next) })
            }
            Discharge::Clash => out.push(BqMove { rule: BqRule::Cla, position: None, rule_index: None, result: None }),
        }
        if let Some(next) = self.con(cfg) {
            out.push(BqMove { rule: BqRule::Con, position: None, rule_index: None, result: Some(next) });
        }
        Ok(out)
    }
}

/// All calculus steps applicable to `cfg` with the rules of `trs`.
pub fn bq_step(cfg: &BqConfig, trs: &GradedTrs, fresh: &mut FreshVars) -> Result<Vec<BqMove>, NarrowError> {
    Calculus::new(trs)?.step(cfg, fresh)
}
