//! Brute-force best conversion degrees between ground terms.
//!
//! Nothing here goes through matching, unification or narrowing from the
//! rest of the crate: edges of the ground conversion graph are found with a
//! local matcher and weighted by walking the arities along the path, so the
//! results can be used to check the solver.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gen::{generate, GenConfig};
use crate::narrow::{narrowing_solutions, problem_vars, solve, NarrowError, NarrowOptions, SolveOptions, Strategy};
use crate::quantale::{Cbe, Degree, QuantaleError};
use crate::rewrite::{GradedTrs, RewriteError};
use crate::term::{Position, Signature, Substitution, Term, TermError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle needs a totally ordered quantale")]
    PartialOrder,
    #[error("`{0}` is not ground")]
    NotGround(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Narrow(#[from] NarrowError),
}

/// Search caps. Hitting any of them makes an answer inexact, never wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_depth: usize,
    /// Bound on the number of symbols in a term.
    pub max_size: usize,
    /// Per search direction.
    pub max_nodes: usize,
    /// Groundings checked per solution; larger grounding spaces are sampled.
    pub max_groundings: usize,
    pub seed: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_depth: 10, max_size: 40, max_nodes: 100_000, max_groundings: 64, seed: 0 }
    }
}

/// One edge of a conversion. `reversed` means the rule rewrites `to` into
/// `from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionStep {
    pub from: Term,
    pub to: Term,
    pub position: Position,
    pub rule: usize,
    pub reversed: bool,
    pub degree: Degree,
}

impl fmt::Display for ConversionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.reversed { "<-" } else { "->" };
        write!(f, "{}: {} {arrow} {}  r{} @ {}", self.position, self.from, self.to, self.rule + 1, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub degree: Degree,
    pub path: Vec<ConversionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionSearch {
    /// The best conversion found.
    pub best: Option<Conversion>,
    /// `best` is optimal among all conversions (and `None` means there is
    /// none), not just among those inside the caps.
    pub exact: bool,
    pub nodes: usize,
}

impl ConversionSearch {
    pub fn degree(&self) -> Option<&Degree> {
        self.best.as_ref().map(|c| &c.degree)
    }
}

fn ground_match(pattern: &Term, target: &Term, binding: &mut Vec<(Var, Term)>) -> bool {
    match pattern {
        Term::Var(x) => match binding.iter().find(|(y, _)| y == x) {
            Some((_, t)) => t == target,
            None => {
                binding.push((x.clone(), target.clone()));
                true
            }
        },
        Term::App(f, ps) => match target {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| ground_match(p, t, binding))
            }
            _ => false,
        },
    }
}

fn instantiate(t: &Term, binding: &[(Var, Term)]) -> Term {
    match t {
        Term::Var(x) => binding.iter().find(|(y, _)| y == x).map(|(_, u)| u.clone()).unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| instantiate(a, binding)).collect()),
    }
}

fn subterms<'a>(t: &'a Term, at: Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Term)>) {
    out.push((at.clone(), t));
    for (i, a) in t.args().iter().enumerate() {
        let mut p = at.clone();
        p.push(i + 1);
        subterms(a, p, out);
    }
}

fn plug(t: &Term, at: &[usize], s: Term) -> Term {
    match at.split_first() {
        None => s,
        Some((&i, rest)) => {
            let Term::App(f, args) = t else { unreachable!("positions of a ground term") };
            let mut args = args.clone();
            args[i - 1] = plug(&args[i - 1], rest, s);
            Term::App(f.clone(), args)
        }
    }
}

/// The arities met on the way from the root of `t` to `at`.
fn arities_along<'a>(sig: &'a Signature, t: &Term, at: &[usize]) -> Result<Vec<&'a Cbe>, OracleError> {
    let mut maps = Vec::with_capacity(at.len());
    let mut cur = t;
    for &i in at {
        let f = cur.head().expect("path through function symbols");
        let arity = sig.arity(f).ok_or_else(|| TermError::UnknownSymbol(f.to_string()))?;
        maps.push(&arity[i - 1]);
        cur = &cur.args()[i - 1];
    }
    Ok(maps)
}

/// `∂_p(t)(ε)`, applying the arities innermost first.
fn weigh(maps: &[&Cbe], eps: &Degree) -> Result<Degree, OracleError> {
    let mut d = eps.clone();
    for m in maps.iter().rev() {
        d = m.apply(&d)?;
    }
    Ok(d)
}

struct Edges {
    steps: Vec<ConversionStep>,
    /// Reverse steps were left out because the rule has left-hand side
    /// variables that can be filled with any ground term.
    open: bool,
    /// Join of the degrees of steps skipped for exceeding the size bound.
    oversized: Option<Degree>,
}

/// Every forward and backward step from the ground term `u`. Left-hand side
/// variables missing on the right are filled from `fill`.
fn edges(trs: &GradedTrs, u: &Term, fill: &[Term], max_size: usize) -> Result<Edges, OracleError> {
    let sig = trs.signature();
    let mut subs = Vec::new();
    subterms(u, Vec::new(), &mut subs);
    let mut steps = Vec::new();
    let mut open = false;
    let mut oversized: Option<Degree> = None;
    let size = u.size();
    for (at, sub) in subs {
        let maps = arities_along(sig, u, &at)?;
        for (i, rule) in trs.rules().iter().enumerate() {
            let degree = weigh(&maps, &rule.degree)?;
            let mut binding = Vec::new();
            if ground_match(&rule.lhs, sub, &mut binding) {
                steps.push(ConversionStep {
                    from: u.clone(),
                    to: plug(u, &at, instantiate(&rule.rhs, &binding)),
                    position: Position::from(at.clone()),
                    rule: i,
                    reversed: false,
                    degree: degree.clone(),
                });
            }
            let mut binding = Vec::new();
            if !ground_match(&rule.rhs, sub, &mut binding) {
                continue;
            }
            let extra: Vec<Var> =
                rule.lhs.vars().into_iter().filter(|x| !binding.iter().any(|(y, _)| y == x)).collect();
            if !extra.is_empty() {
                open = true;
            }
            for choice in product(fill, extra.len()) {
                let mut full = binding.clone();
                full.extend(extra.iter().cloned().zip(choice));
                let grown = size - sub.size() + instantiated_size(&rule.lhs, &full);
                if grown > max_size {
                    oversized = Some(oversized.map_or(degree.clone(), |o| o.join(&degree)));
                    continue;
                }
                steps.push(ConversionStep {
                    from: u.clone(),
                    to: plug(u, &at, instantiate(&rule.lhs, &full)),
                    position: Position::from(at.clone()),
                    rule: i,
                    reversed: true,
                    degree: degree.clone(),
                });
            }
        }
    }
    Ok(Edges { steps, open, oversized })
}

fn instantiated_size(t: &Term, binding: &[(Var, Term)]) -> usize {
    match t {
        Term::Var(x) => binding.iter().find(|(y, _)| y == x).map_or(1, |(_, u)| u.size()),
        Term::App(_, args) => 1 + args.iter().map(|a| instantiated_size(a, binding)).sum::<usize>(),
    }
}

fn product(pool: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// All edges of the ground conversion graph at `u`: rewrite steps from `u`
/// and steps into `u`, the latter with extra left-hand side variables
/// instantiated over the constants of the signature.
pub fn ground_edges(trs: &GradedTrs, u: &Term) -> Result<Vec<ConversionStep>, OracleError> {
    if !u.is_ground() {
        return Err(OracleError::NotGround(u.to_string()));
    }
    Ok(edges(trs, u, &trs.signature().constants(), usize::MAX)?.steps)
}

struct Label {
    degree: Degree,
    parent: Option<(usize, ConversionStep)>,
    settled: bool,
}

struct Entry {
    degree: Degree,
    seq: u64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.order(&other.degree).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// One direction of the bidirectional search.
struct Side {
    index: HashMap<Term, usize>,
    terms: Vec<Term>,
    labels: Vec<Label>,
    heap: BinaryHeap<Entry>,
    seq: u64,
}

impl Side {
    fn new(root: &Term, unit: Degree) -> Side {
        let mut side =
            Side { index: HashMap::new(), terms: Vec::new(), labels: Vec::new(), heap: BinaryHeap::new(), seq: 0 };
        side.index.insert(root.clone(), 0);
        side.terms.push(root.clone());
        side.labels.push(Label { degree: unit.clone(), parent: None, settled: false });
        side.heap.push(Entry { degree: unit, seq: 0, node: 0 });
        side
    }

    /// The best unsettled degree, discarding stale heap entries.
    fn top(&mut self) -> Option<Degree> {
        while let Some(e) = self.heap.peek() {
            let label = &self.labels[e.node];
            if label.settled || label.degree != e.degree {
                self.heap.pop();
            } else {
                return Some(e.degree.clone());
            }
        }
        None
    }

    fn path_to(&self, mut node: usize) -> Vec<ConversionStep> {
        let mut out = Vec::new();
        while let Some((parent, step)) = &self.labels[node].parent {
            out.push(step.clone());
            node = *parent;
        }
        out.reverse();
        out
    }
}

struct Search<'a> {
    trs: &'a GradedTrs,
    bounds: &'a OracleBounds,
    fill: Vec<Term>,
    /// Candidates below the floor are ignored: they cannot lead to a
    /// conversion at least as good.
    floor: Option<Degree>,
    /// Stop as soon as a conversion reaching the floor is known.
    early: bool,
    /// Join of the degrees at which something was cut by a cap.
    cut: Option<Degree>,
    best: Option<(Degree, usize, usize)>,
}

impl Search<'_> {
    fn note_cut(&mut self, d: &Degree) {
        self.cut = Some(match &self.cut {
            Some(c) => c.join(d),
            None => d.clone(),
        });
    }

    fn meet(&mut self, sides: &[Side; 2], node: usize, dir: usize) {
        let term = &sides[dir].terms[node];
        let Some(&other) = sides[1 - dir].index.get(term) else { return };
        let d = sides[dir].labels[node].degree.tensor(&sides[1 - dir].labels[other].degree);
        if self.best.as_ref().is_none_or(|(b, _, _)| d.order(b) == Ordering::Greater) {
            let (f, b) = if dir == 0 { (node, other) } else { (other, node) };
            self.best = Some((d, f, b));
        }
    }

    fn expand(&mut self, sides: &mut [Side; 2], dir: usize) -> Result<(), OracleError> {
        let Some(e) = sides[dir].heap.pop() else { return Ok(()) };
        let side = &mut sides[dir];
        if side.labels[e.node].settled || side.labels[e.node].degree != e.degree {
            return Ok(());
        }
        side.labels[e.node].settled = true;
        let u = side.terms[e.node].clone();
        let here = e.degree;
        let found = edges(self.trs, &u, &self.fill, self.bounds.max_size)?;
        if let Some(d) = &found.oversized {
            let d = here.tensor(d);
            if self.floor.as_ref().is_none_or(|fl| d.geq(fl)) {
                self.note_cut(&d);
            }
        }
        for step in found.steps {
            let d = here.tensor(&step.degree);
            if self.floor.as_ref().is_some_and(|fl| !d.geq(fl)) {
                continue;
            }
            if step.to.depth() > self.bounds.max_depth || step.to.size() > self.bounds.max_size {
                self.note_cut(&d);
                continue;
            }
            let side = &mut sides[dir];
            let node = match side.index.get(&step.to) {
                Some(&n) => {
                    if side.labels[n].settled || !d.order(&side.labels[n].degree).is_gt() {
                        continue;
                    }
                    n
                }
                None => {
                    if side.terms.len() >= self.bounds.max_nodes {
                        self.note_cut(&d);
                        continue;
                    }
                    let n = side.terms.len();
                    side.index.insert(step.to.clone(), n);
                    side.terms.push(step.to.clone());
                    side.labels.push(Label { degree: d.clone(), parent: None, settled: false });
                    n
                }
            };
            side.labels[node] = Label { degree: d.clone(), parent: Some((e.node, step)), settled: false };
            side.seq += 1;
            side.heap.push(Entry { degree: d, seq: side.seq, node });
            self.meet(sides, node, dir);
        }
        if found.open {
            self.note_cut(&here);
        }
        Ok(())
    }

    fn reached_floor(&self) -> bool {
        match (&self.best, &self.floor) {
            (Some((d, _, _)), Some(fl)) => d.geq(fl),
            _ => false,
        }
    }

    fn run(mut self, t: &Term, s: &Term) -> Result<ConversionSearch, OracleError> {
        let q = self.trs.quantale();
        let mut sides = [Side::new(t, q.unit()), Side::new(s, q.unit())];
        self.meet(&sides, 0, 0);
        let mut settled_optimum = false;
        loop {
            if self.early && self.reached_floor() {
                break;
            }
            let (Some(a), Some(b)) = (sides[0].top(), sides[1].top()) else {
                // A side with nothing left to expand has labelled everything
                // reachable from its root, so every meeting is known.
                settled_optimum = true;
                break;
            };
            // No conversion through unsettled nodes can beat the best meeting.
            if self.best.as_ref().is_some_and(|(best, _, _)| !a.tensor(&b).order(best).is_gt()) {
                settled_optimum = true;
                break;
            }
            let dir = usize::from(sides[1].terms.len() < sides[0].terms.len());
            self.expand(&mut sides, dir)?;
        }
        let nodes = sides[0].terms.len() + sides[1].terms.len();
        let best = self.best.as_ref().map(|(d, f, b)| {
            let mut path = sides[0].path_to(*f);
            for step in sides[1].path_to(*b).into_iter().rev() {
                path.push(ConversionStep {
                    from: step.to,
                    to: step.from,
                    position: step.position,
                    rule: step.rule,
                    reversed: !step.reversed,
                    degree: step.degree,
                });
            }
            Conversion { degree: d.clone(), path }
        });
        let exact = settled_optimum
            && match (&self.cut, &best) {
                (None, _) => true,
                (Some(c), Some(b)) => b.degree.geq(c),
                (Some(_), None) => false,
            };
        Ok(ConversionSearch { best, exact, nodes })
    }
}

fn gate(trs: &GradedTrs) -> Result<(), OracleError> {
    if trs.quantale().is_total() {
        Ok(())
    } else {
        Err(OracleError::PartialOrder)
    }
}

fn search(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    bounds: &OracleBounds,
    floor: Option<&Degree>,
    early: bool,
) -> Result<ConversionSearch, OracleError> {
    gate(trs)?;
    for u in [t, s] {
        if !u.is_ground() {
            return Err(OracleError::NotGround(u.to_string()));
        }
        trs.signature().check_term(u)?;
    }
    let search =
        Search { trs, bounds, fill: trs.signature().constants(), floor: floor.cloned(), early, cut: None, best: None };
    search.run(t, s)
}

/// The greatest degree of a conversion `t ↔* s` over ground terms, with a
/// witness path.
pub fn best_conversion_degree(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    bounds: &OracleBounds,
) -> Result<ConversionSearch, OracleError> {
    search(trs, t, s, bounds, None, false)
}

/// Like [`best_conversion_degree`], but only conversions of degree at least
/// `floor` are looked for, and the search stops at the first one.
pub fn conversion_at_least(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    floor: &Degree,
    bounds: &OracleBounds,
) -> Result<ConversionSearch, OracleError> {
    search(trs, t, s, bounds, Some(floor), true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    /// Neither confirmed nor refuted within the caps.
    Inconclusive,
    Refuted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "CONFIRMED",
            Verdict::Inconclusive => "INCONCLUSIVE(bounds)",
            Verdict::Refuted => "REFUTED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundingCheck {
    pub grounding: Substitution,
    pub verdict: Verdict,
    pub search: ConversionSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub verdict: Verdict,
    pub checks: Vec<GroundingCheck>,
}

/// Groundings of `vars` over `pool`, all of them or a seeded sample.
fn groundings(vars: &[Var], pool: &[Term], bounds: &OracleBounds) -> Vec<Substitution> {
    let total = (pool.len() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    let choices: Vec<Vec<Term>> = if total <= bounds.max_groundings as u128 {
        product(pool, vars.len())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for _ in 0..bounds.max_groundings * 4 {
            if out.len() >= bounds.max_groundings {
                break;
            }
            let pick: Vec<usize> = vars.iter().map(|_| rng.gen_range(0..pool.len())).collect();
            if seen.insert(pick.clone()) {
                out.push(pick.into_iter().map(|i| pool[i].clone()).collect());
            }
        }
        out
    };
    choices
        .into_iter()
        .map(|c| Substitution::from_bindings(vars.iter().cloned().zip(c)).expect("ground bindings"))
        .collect()
}

/// Checks `δ ⊩ tσθ ↔* sσθ` for groundings θ of the variables left by σ.
/// `pool` defaults to the constants of the signature.
pub fn verify_solution(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    sigma: &Substitution,
    delta: &Degree,
    pool: Option<&[Term]>,
    bounds: &OracleBounds,
) -> Result<Verification, OracleError> {
    gate(trs)?;
    let (ts, ss) = (sigma.apply(t), sigma.apply(s));
    let mut vars = ts.vars_in_order();
    for x in ss.vars_in_order() {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    let constants = trs.signature().constants();
    let pool = pool.unwrap_or(&constants);
    if !vars.is_empty() && pool.is_empty() {
        return Ok(Verification { verdict: Verdict::Inconclusive, checks: Vec::new() });
    }
    let mut checks = Vec::new();
    for theta in groundings(&vars, pool, bounds) {
        let search = conversion_at_least(trs, &theta.apply(&ts), &theta.apply(&ss), delta, bounds)?;
        let verdict = match search.degree() {
            Some(d) if d.geq(delta) => Verdict::Confirmed,
            _ if search.exact => Verdict::Refuted,
            _ => Verdict::Inconclusive,
        };
        checks.push(GroundingCheck { grounding: theta, verdict, search });
    }
    let verdict = if checks.iter().any(|c| c.verdict == Verdict::Refuted) {
        Verdict::Refuted
    } else if checks.iter().all(|c| c.verdict == Verdict::Confirmed) && !checks.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    Ok(Verification { verdict, checks })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedUnifier {
    pub subst: Substitution,
    pub search: ConversionSearch,
}

/// Every substitution of the problem variables into `pool`, ranked by best
/// conversion degree (greatest first, unreachable last, ties by rendering).
pub fn enumerate_best_unifiers(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    pool: &[Term],
    bounds: &OracleBounds,
) -> Result<Vec<RankedUnifier>, OracleError> {
    gate(trs)?;
    let vars = problem_vars(t, s);
    if !vars.is_empty() && pool.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for choice in product(pool, vars.len()) {
        let subst = Substitution::from_bindings(vars.iter().cloned().zip(choice)).expect("ground bindings");
        let search = best_conversion_degree(trs, &subst.apply(t), &subst.apply(s), bounds)?;
        out.push(RankedUnifier { subst, search });
    }
    out.sort_by(|a, b| {
        let by_degree = match (a.search.degree(), b.search.degree()) {
            (Some(x), Some(y)) => y.order(x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_degree.then_with(|| a.subst.to_string().cmp(&b.subst.to_string()))
    });
    Ok(out)
}

/// Solutions as (substitution, degree) pairs.
pub type Graded = Vec<(Substitution, Degree)>;

/// A problem on which ordinary narrowing does better than the calculus.
#[derive(Debug, Clone)]
pub struct ProbeFinding {
    pub trial: usize,
    pub trs: GradedTrs,
    pub lhs: Term,
    pub rhs: Term,
    /// Ordinary solutions not matched by any calculus solution that is at
    /// least as general with at least as good a degree.
    pub missed: Graded,
    pub basic: Graded,
}

#[derive(Debug, Clone, Default)]
pub struct ProbeReport {
    pub trials: usize,
    pub findings: Vec<ProbeFinding>,
}

/// Ordinary narrowing solutions of `t =? s` within `depth` steps that the
/// calculus misses at the same depth. `Some` when anything is missed.
pub fn probe_problem(
    trs: &GradedTrs,
    t: &Term,
    s: &Term,
    depth: usize,
) -> Result<Option<(Graded, Graded)>, OracleError> {
    let vars = problem_vars(t, s);
    let ordinary = narrowing_solutions(trs, t, s, &NarrowOptions::new(depth))?;
    let options =
        SolveOptions { strategy: Strategy::EagerSu, max_steps: depth.saturating_sub(1), ..Default::default() };
    let basic: Vec<(Substitution, Degree)> =
        solve(trs, t, s, options)?.solutions.into_iter().map(|sol| (sol.subst, sol.degree)).collect();
    let missed: Vec<(Substitution, Degree)> = ordinary
        .into_iter()
        .filter(|(sigma, d)| !basic.iter().any(|(b, e)| e.geq(d) && b.is_more_general_on(sigma, &vars)))
        .collect();
    Ok(if missed.is_empty() { None } else { Some((missed, basic)) })
}

/// Runs [`probe_problem`] on `trials` generated problems.
pub fn conjecture_probe(
    config: &GenConfig,
    trials: usize,
    seed: u64,
    depth: usize,
) -> Result<ProbeReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport { trials, findings: Vec::new() };
    for trial in 0..trials {
        let p = generate(config, &mut rng);
        if let Some((missed, basic)) = probe_problem(&p.trs, &p.lhs, &p.rhs, depth)? {
            report.findings.push(ProbeFinding { trial, trs: p.trs, lhs: p.lhs, rhs: p.rhs, missed, basic });
        }
    }
    Ok(report)
}
