use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use super::{problem_vars, rename_rule, BqConfig, BqRule, BqStep, Calculus, Discharge, NarrowError, TraceEntry};
use crate::quantale::Degree;
use crate::rewrite::GradedTrs;
use crate::term::{Canonicalizer, FreshVars, Substitution, Term, Var};

/// When SU is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// SU (or Cla) right after every LP and Con.
    #[default]
    EagerSu,
    /// Constraints accumulate; SU is one more choice. Non-unifiable
    /// constraint sets are still discarded at once.
    Lazy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Bfs,
    /// Iterative deepening on the number of LP steps.
    Iddfs,
    /// Greatest degree first; needs a total order.
    BestFirst,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eager-su" => Ok(Strategy::EagerSu),
            "lazy" => Ok(Strategy::Lazy),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Order::Bfs),
            "iddfs" => Ok(Order::Iddfs),
            "best-first" => Ok(Order::BestFirst),
            _ => Err(format!("unknown order `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub order: Order,
    pub threshold: Option<Degree>,
    /// Bound on LP steps along a branch.
    pub max_steps: usize,
    /// Bound on configurations expanded.
    pub max_configs: usize,
    pub max_solutions: Option<usize>,
    pub head_filter: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: Strategy::EagerSu,
            order: Order::Bfs,
            threshold: None,
            max_steps: 12,
            max_configs: 1_000_000,
            max_solutions: None,
            head_filter: false,
        }
    }
}

/// How a search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Every branch was followed to the end.
    Exhausted,
    /// Some branch was cut by the LP bound.
    StepLimit,
    ConfigLimit,
    SolutionLimit,
}

impl Outcome {
    pub fn is_exhaustive(self) -> bool {
        self == Outcome::Exhausted
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Exhausted => "search space exhausted",
            Outcome::StepLimit => "step limit reached",
            Outcome::ConfigLimit => "configuration limit reached",
            Outcome::SolutionLimit => "solution limit reached",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Restricted to the problem variables.
    pub subst: Substitution,
    pub degree: Degree,
    pub trace: Vec<TraceEntry>,
    /// Some other solution is at least as general with at least as good a
    /// degree. Only set in a [`SolveReport`].
    pub dominated: bool,
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "solution {} degree {}", self.subst, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    /// Best degree first, ties by rendering.
    pub solutions: Vec<Solution>,
    pub outcome: Outcome,
    pub configs: usize,
}

impl SolveReport {
    pub fn best(&self) -> Option<&Solution> {
        self.solutions.first()
    }
}

struct Link {
    step: BqStep,
    parent: Option<Rc<Link>>,
}

fn steps_of(mut link: Option<&Rc<Link>>) -> Vec<BqStep> {
    let mut out = Vec::new();
    while let Some(l) = link {
        out.push(l.step.clone());
        link = l.parent.as_ref();
    }
    out.reverse();
    out
}

#[derive(Clone)]
struct Node {
    cfg: BqConfig,
    lps: usize,
    trace: Option<Rc<Link>>,
}

struct Ranked {
    degree: Degree,
    seq: u64,
    node: Node,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    // Max-heap: greater degree first, then earlier insertion.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.order(&other.degree).then_with(|| other.seq.cmp(&self.seq))
    }
}

type Key = (Term, Vec<(Term, Term)>, Substitution, Degree);

enum Frontier {
    Queue(VecDeque<Node>),
    Heap(BinaryHeap<Ranked>, u64),
    /// Depth-first stack for the current deepening bound.
    Stack(Vec<Node>, usize),
}

/// Lazy stream of solutions of `t =? s`.
pub struct Solver<'a> {
    calculus: Calculus<'a>,
    options: SolveOptions,
    vars: Vec<Var>,
    start: Node,
    goal: (Term, Term),
    trs: &'a GradedTrs,
    frontier: Frontier,
    visited: HashMap<Key, usize>,
    fresh: FreshVars,
    found: Vec<(Substitution, Degree)>,
    configs: usize,
    step_cut: bool,
    stopped: Option<Outcome>,
}

impl<'a> Solver<'a> {
    /// `trs` is the unextended system; `t` and `s` are over its signature.
    pub fn new(trs: &'a GradedTrs, t: &Term, s: &Term, options: SolveOptions) -> Result<Solver<'a>, NarrowError> {
        if options.order == Order::BestFirst && !trs.quantale().is_total() {
            return Err(NarrowError::PartialOrder);
        }
        trs.signature().check_term(t)?;
        trs.signature().check_term(s)?;
        let calculus = Calculus::new(trs)?.with_head_filter(options.head_filter);
        let start = Node { cfg: BqConfig::start(t.clone(), s.clone(), trs.quantale()), lps: 0, trace: None };
        let mut solver = Solver {
            calculus,
            vars: problem_vars(t, s),
            frontier: Frontier::Queue(VecDeque::new()),
            start: start.clone(),
            goal: (t.clone(), s.clone()),
            trs,
            options,
            visited: HashMap::new(),
            fresh: FreshVars::new(),
            found: Vec::new(),
            configs: 0,
            step_cut: false,
            stopped: None,
        };
        solver.frontier = match solver.options.order {
            Order::Bfs => Frontier::Queue(VecDeque::new()),
            Order::BestFirst => Frontier::Heap(BinaryHeap::new(), 0),
            Order::Iddfs => Frontier::Stack(Vec::new(), 0),
        };
        solver.push(start);
        Ok(solver)
    }

    /// Why the search stopped, once the stream has ended.
    pub fn outcome(&self) -> Option<Outcome> {
        self.stopped
    }

    pub fn configs(&self) -> usize {
        self.configs
    }

    fn admissible(&self, degree: &Degree) -> bool {
        self.options.threshold.as_ref().is_none_or(|th| degree.geq(th))
    }

    /// Variables whose bindings can still matter: those of the problem, the
    /// goal and the pending constraints.
    fn relevant(&self, cfg: &BqConfig) -> Vec<Var> {
        let mut relevant = self.vars.clone();
        relevant.extend(cfg.goal.vars_in_order());
        for (l, r) in &cfg.constraints {
            relevant.extend(l.vars_in_order());
            relevant.extend(r.vars_in_order());
        }
        relevant
    }

    fn key(&self, cfg: &BqConfig, relevant: &[Var]) -> Key {
        let mut canon = Canonicalizer::new();
        let goal = canon.term(&cfg.goal);
        let constraints = cfg.constraints.iter().map(|(l, r)| (canon.term(l), canon.term(r))).collect();
        let subst = canon.restricted(&cfg.subst, relevant);
        (goal, constraints, subst, cfg.degree.clone())
    }

    fn push(&mut self, mut node: Node) {
        if !self.admissible(&node.cfg.degree) {
            return;
        }
        let relevant = self.relevant(&node.cfg);
        // Bindings of variables that occur nowhere any more are dead weight.
        node.cfg.subst = node.cfg.subst.restrict(&relevant);
        let key = self.key(&node.cfg, &relevant);
        match self.visited.get(&key) {
            Some(&lps) if lps <= node.lps => return,
            _ => {
                self.visited.insert(key, node.lps);
            }
        }
        match &mut self.frontier {
            Frontier::Queue(q) => q.push_back(node),
            Frontier::Heap(h, seq) => {
                *seq += 1;
                h.push(Ranked { degree: node.cfg.degree.clone(), seq: *seq, node });
            }
            Frontier::Stack(s, _) => s.push(node),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        loop {
            match &mut self.frontier {
                Frontier::Queue(q) => return q.pop_front(),
                Frontier::Heap(h, _) => return h.pop().map(|r| r.node),
                Frontier::Stack(s, bound) => {
                    if let Some(n) = s.pop() {
                        return Some(n);
                    }
                    // Deepen only while the last round was cut by its bound.
                    if !self.step_cut || *bound >= self.options.max_steps {
                        return None;
                    }
                    *bound += 1;
                }
            }
            self.step_cut = false;
            self.visited.clear();
            let start = self.start.clone();
            self.push(start);
        }
    }

    fn step_bound(&self) -> usize {
        match self.frontier {
            Frontier::Stack(_, bound) => bound,
            _ => self.options.max_steps,
        }
    }

    fn extend(trace: &Option<Rc<Link>>, steps: Vec<BqStep>) -> Option<Rc<Link>> {
        let mut link = trace.clone();
        for step in steps {
            link = Some(Rc::new(Link { step, parent: link }));
        }
        link
    }

    /// Successors of a node under the configured strategy.
    fn expand(&mut self, node: &Node) -> Result<Vec<Node>, NarrowError> {
        let eager = self.options.strategy == Strategy::EagerSu;
        let can_lp = !node.cfg.goal.is_truth();
        if can_lp && node.lps >= self.step_bound() {
            self.step_cut = true;
        }
        let mut raw: Vec<(Vec<BqStep>, BqConfig, usize)> = Vec::new();
        if can_lp && node.lps < self.step_bound() {
            if eager && node.cfg.constraints.is_empty() {
                self.fused_lp_su(node, &mut raw)?;
            } else {
                for mv in self.calculus.lp_moves(&node.cfg, &mut self.fresh)? {
                    let cfg = mv.result.expect("LP always produces a configuration");
                    let step = BqStep { rule: BqRule::Lp, position: mv.position, rule_index: mv.rule_index };
                    raw.push((vec![step], cfg, node.lps + 1));
                }
            }
        }
        if let Some(cfg) = self.calculus.con(&node.cfg) {
            raw.push((vec![BqStep::plain(BqRule::Con)], cfg, node.lps));
        }
        if !eager {
            if let Discharge::Unified(cfg) = self.calculus.discharge(&node.cfg)? {
                raw.push((vec![BqStep::plain(BqRule::Su)], cfg, node.lps));
            }
        }
        let mut out = Vec::with_capacity(raw.len());
        for (mut steps, cfg, lps) in raw {
            let cfg = if cfg.constraints.is_empty() {
                cfg
            } else {
                match self.calculus.discharge(&cfg)? {
                    Discharge::Clash => continue,
                    Discharge::Unified(next) if eager => {
                        steps.push(BqStep::plain(BqRule::Su));
                        next
                    }
                    _ => cfg,
                }
            };
            out.push(Node { trace: Self::extend(&node.trace, steps), cfg, lps });
        }
        Ok(out)
    }

    /// LP immediately followed by SU, skipping the instances that would end
    /// in Cla.
    fn fused_lp_su(&mut self, node: &Node, raw: &mut Vec<(Vec<BqStep>, BqConfig, usize)>) -> Result<(), NarrowError> {
        let rules = self.calculus.rules();
        let mut variants = vec![None; rules.len()];
        for p in node.cfg.goal.fun_positions() {
            let sub = node.cfg.goal.subterm_at(&p)?;
            let head = sub.head();
            let instance = node.cfg.subst.apply(sub);
            for (i, rule) in rules.iter().enumerate() {
                if self.options.head_filter && rule.lhs.head() != head {
                    continue;
                }
                let variant = variants[i].get_or_insert_with(|| rename_rule(rule, &mut self.fresh));
                if let Some(cfg) = self.calculus.lp_su_with(&node.cfg, &p, &instance, variant)? {
                    raw.push((vec![BqStep::lp(p.clone(), i), BqStep::plain(BqRule::Su)], cfg, node.lps + 1));
                }
            }
        }
        Ok(())
    }

    fn try_next(&mut self) -> Result<Option<Solution>, NarrowError> {
        if self.stopped.is_some() {
            return Ok(None);
        }
        while let Some(node) = self.pop() {
            if node.cfg.is_solved() {
                let subst = Canonicalizer::new().restricted(&node.cfg.subst, &self.vars);
                let degree = node.cfg.degree.clone();
                if self.found.iter().any(|(s, d)| *d == degree && s.is_variant_on(&subst, &self.vars)) {
                    continue;
                }
                self.found.push((subst.clone(), degree.clone()));
                if self.options.max_solutions.is_some_and(|k| self.found.len() >= k) {
                    self.stopped = Some(Outcome::SolutionLimit);
                }
                let steps = steps_of(node.trace.as_ref());
                let trace = replay_trace(self.trs, &self.goal.0, &self.goal.1, &steps)?;
                return Ok(Some(Solution { subst, degree, trace, dominated: false }));
            }
            if self.configs >= self.options.max_configs {
                self.stopped = Some(Outcome::ConfigLimit);
                return Ok(None);
            }
            self.configs += 1;
            for child in self.expand(&node)? {
                self.push(child);
            }
        }
        self.stopped = Some(if self.step_cut { Outcome::StepLimit } else { Outcome::Exhausted });
        Ok(None)
    }
}

impl Iterator for Solver<'_> {
    type Item = Result<Solution, NarrowError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.try_next().transpose()
    }
}

/// Runs the solver to completion and sorts the solutions, best degree first.
pub fn solve(trs: &GradedTrs, t: &Term, s: &Term, options: SolveOptions) -> Result<SolveReport, NarrowError> {
    let mut solver = Solver::new(trs, t, s, options)?;
    let mut solutions = Vec::new();
    for sol in solver.by_ref() {
        solutions.push(sol?);
    }
    let vars = problem_vars(t, s);
    let flags: Vec<bool> = solutions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            solutions.iter().enumerate().any(|(j, b)| {
                i != j
                    && b.degree.geq(&a.degree)
                    && b.subst.is_more_general_on(&a.subst, &vars)
                    && !(a.degree.geq(&b.degree) && a.subst.is_more_general_on(&b.subst, &vars) && j > i)
            })
        })
        .collect();
    for (sol, flag) in solutions.iter_mut().zip(flags) {
        sol.dominated = flag;
    }
    solutions.sort_by(|a, b| b.degree.order(&a.degree).then_with(|| a.subst.to_string().cmp(&b.subst.to_string())));
    Ok(SolveReport { solutions, outcome: solver.outcome().unwrap_or(Outcome::Exhausted), configs: solver.configs() })
}

/// Replays a trace from the starting configuration of `t =? s`, renaming rules
/// apart afresh. Returns the final configuration.
pub fn replay(trs: &GradedTrs, t: &Term, s: &Term, trace: &[BqStep]) -> Result<BqConfig, NarrowError> {
    let entries = replay_trace(trs, t, s, trace)?;
    Ok(match entries.last() {
        Some(e) => e.config.clone(),
        None => BqConfig::start(t.clone(), s.clone(), trs.quantale()),
    })
}

/// Like [`replay`], keeping every intermediate configuration.
pub fn replay_trace(trs: &GradedTrs, t: &Term, s: &Term, trace: &[BqStep]) -> Result<Vec<TraceEntry>, NarrowError> {
    let calculus = Calculus::new(trs)?;
    let mut fresh = FreshVars::new();
    let mut cfg = BqConfig::start(t.clone(), s.clone(), trs.quantale());
    let mut out = Vec::with_capacity(trace.len());
    for (i, step) in trace.iter().enumerate() {
        let bad = |what: &str| NarrowError::Inapplicable(format!("trace step {}: {what}", i + 1));
        cfg = match step.rule {
            BqRule::Lp => {
                let (Some(p), Some(r)) = (&step.position, step.rule_index) else {
                    return Err(bad("LP needs a position and a rule"));
                };
                let original = calculus.rules().get(r).ok_or(NarrowError::NoSuchRule(r))?;
                let variant = rename_rule(original, &mut fresh);
                calculus.lp(&cfg, p, r, &variant)?
            }
            BqRule::Su => match calculus.discharge(&cfg)? {
                Discharge::Unified(next) => next,
                _ => return Err(bad("SU is not applicable")),
            },
            BqRule::Con => calculus.con(&cfg).ok_or_else(|| bad("Con is not applicable"))?,
            BqRule::Cla => return Err(bad("Cla ends a derivation in failure")),
        };
        out.push(TraceEntry { step: step.clone(), config: cfg.clone() });
    }
    Ok(out)
}
