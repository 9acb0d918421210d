//! Law checks shared by the property suites and the acceptance runner. Each
//! check draws its inputs from a seed and covers every quantale.

#![allow(dead_code)]

use std::ops::ControlFlow;

use qnarrow::gen::{generate, sample_any_degree, sample_cbe_expr, sample_degree, sample_term, GenConfig};
use qnarrow::narrow::{
    bq_step, for_each_derivation, replay_trace, solve, BqConfig, NarrowOptions, Outcome, SolveOptions, Strategy,
};
use qnarrow::quantale::{Degree, Quantale};
use qnarrow::term::{FreshVars, Position, Signature, Substitution, Term, Var};
use qnarrow::unify::mgu;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn degrees(q: Quantale, n: usize, rng: &mut ChaCha8Rng) -> Vec<Degree> {
    (0..n).map(|_| sample_any_degree(q, rng)).collect()
}

/// Monoid, lattice, distributivity, integrality and cointegrality laws.
pub fn quantale_laws(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let k = q.unit();
        let d = degrees(q, 5, &mut rng);
        let (a, b, c) = (&d[0], &d[1], &d[2]);
        ensure!(a.tensor(b).tensor(c) == a.tensor(&b.tensor(c)), "{q}: associativity at {a}, {b}, {c}");
        ensure!(a.tensor(b) == b.tensor(a), "{q}: commutativity at {a}, {b}");
        ensure!(a.tensor(&k) == *a, "{q}: unit at {a}");
        ensure!(a.leq(&k) && q.bottom().leq(a), "{q}: {a} outside [bottom, unit]");

        let join = q.join(&d[1..]).map_err(|e| e.to_string())?;
        let meet = q.meet(&d[1..]).map_err(|e| e.to_string())?;
        for x in &d[1..] {
            ensure!(x.leq(&join) && meet.leq(x), "{q}: join/meet bounds at {x}");
        }
        ensure!(d[1..].contains(&join) && d[1..].contains(&meet), "{q}: join/meet of a chain is attained");
        ensure!(a.join(&a.meet(b)) == *a && a.meet(&a.join(b)) == *a, "{q}: absorption at {a}, {b}");

        let lhs = a.tensor(&join);
        let tensored: Vec<Degree> = d[1..].iter().map(|x| a.tensor(x)).collect();
        let rhs = q.join(&tensored).map_err(|e| e.to_string())?;
        ensure!(lhs == rhs, "{q}: distributivity at {a} over {:?}: {lhs} vs {rhs}", &d[1..]);
        ensure!(q.join(std::iter::empty()).map_err(|e| e.to_string())? == q.bottom(), "{q}: empty join");

        ensure!(a.tensor(b).leq(&a.meet(b)), "{q}: a⊗b ≼ a∧b at {a}, {b}");
        if a.leq(b) {
            ensure!(a.tensor(c).leq(&b.tensor(c)), "{q}: tensor monotone at {a} ≼ {b}, {c}");
        }
        if a.tensor(b).is_bottom() {
            ensure!(a.is_bottom() || b.is_bottom(), "{q}: cointegrality at {a}, {b}");
        }
        ensure!(q.bottom().tensor(a).is_bottom(), "{q}: bottom annihilates {a}");
    }
    Ok(())
}

/// Homomorphism laws of sampled change-of-base maps, and agreement of the
/// decided equality with evaluation.
pub fn cbe_laws(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let f = sample_cbe_expr(q, 4, &mut rng);
        let g = sample_cbe_expr(q, 4, &mut rng);
        let apply = |h: &qnarrow::quantale::Cbe, x: &Degree| h.apply(x).map_err(|e| format!("{q}: {h} at {x}: {e}"));
        ensure!(apply(&f, &q.unit())? == q.unit(), "{q}: {f} does not fix the unit");
        let nf = f.normalize(q).map_err(|e| e.to_string())?;
        let same = f.equivalent(&g, q).map_err(|e| e.to_string())?;
        let mut chain = degrees(q, 4, &mut rng);
        chain.sort_by(|x, y| x.order(y));
        for w in chain.windows(2) {
            ensure!(apply(&f, &w[0])?.leq(&apply(&f, &w[1])?), "{q}: {f} not monotone on {} ≼ {}", w[0], w[1]);
        }
        for a in &chain {
            for b in &chain {
                let fab = apply(&f, &a.tensor(b))?;
                ensure!(fab == apply(&f, a)?.tensor(&apply(&f, b)?), "{q}: {f} does not preserve {a} ⊗ {b}");
                ensure!(
                    apply(&f, &a.join(b))? == apply(&f, a)?.join(&apply(&f, b)?),
                    "{q}: {f} does not preserve {a} ∨ {b}"
                );
            }
            ensure!(apply(&nf, a)? == apply(&f, a)?, "{q}: normal form {nf} of {f} differs at {a}");
            if same {
                ensure!(apply(&f, a)? == apply(&g, a)?, "{q}: {f} ≡ {g} but they differ at {a}");
            }
        }
    }
    Ok(())
}

/// Composition of grades along positions, stability under substitution, and
/// the `replace_at`/`subterm_at` round trip.
pub fn grade_laws(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let sig = generate(&GenConfig::new(q), &mut rng).trs.signature().clone();
        let t = sample_term(&sig, &["x", "y"], 3, &mut rng);
        let positions = t.positions();
        let p = positions.choose(&mut rng).unwrap();
        let sub = t.subterm_at(p).map_err(|e| e.to_string())?;
        ensure!(t.replace_at(p, sub.clone()).map_err(|e| e.to_string())? == t, "{t}: replace_at {p} with itself");
        let inner = sub.positions();
        let r = inner.choose(&mut rng).unwrap();
        let grade = |u: &Term, at: &Position| sig.grade_of_position(u, at).map_err(|e| e.to_string());
        let whole = grade(&t, &p.concat(r))?;
        let split = qnarrow::quantale::Cbe::compose(&grade(&t, p)?, &grade(sub, r)?, q).map_err(|e| e.to_string())?;
        ensure!(
            whole.equivalent(&split, q).map_err(|e| e.to_string())?,
            "{q}: ∂ at {p}.{r} of {t}: {whole} vs {split}"
        );

        let sigma = random_subst(&sig, &t, &["u", "v"], &mut rng)?;
        let ts = t.apply(&sigma);
        ensure!(ts.apply(&sigma) == ts, "{sigma} is not idempotent on {t}");
        for p in &positions {
            let before = grade(&t, p)?;
            let after = grade(&ts, p)?;
            ensure!(before.equivalent(&after, q).map_err(|e| e.to_string())?, "{q}: ∂ at {p} changed under {sigma}");
        }
    }
    Ok(())
}

/// A substitution on the variables of `t` with range over `range_vars`.
fn random_subst(sig: &Signature, t: &Term, range_vars: &[&str], rng: &mut ChaCha8Rng) -> Result<Substitution, String> {
    let mut bindings = Vec::new();
    for x in t.vars() {
        if rng.gen_bool(0.7) {
            bindings.push((x, sample_term(sig, range_vars, 2, rng)));
        }
    }
    Substitution::from_bindings(bindings).map_err(|e| e.to_string())
}

/// Replaces up to two disjoint subterms of `t` by fresh variables `prefix0`,
/// `prefix1` and returns the generalization with the bindings recovering `t`.
fn generalize(t: &Term, prefix: &str, rng: &mut ChaCha8Rng) -> (Term, Vec<(Var, Term)>) {
    let mut candidates = t.fun_positions();
    candidates.shuffle(rng);
    let mut chosen: Vec<Position> = Vec::new();
    for p in candidates.into_iter().take(2) {
        if rng.gen_bool(0.3) || chosen.iter().any(|c| c.is_prefix_of(&p) || p.is_prefix_of(c)) {
            continue;
        }
        chosen.push(p);
    }
    let mut out = t.clone();
    let mut bindings = Vec::new();
    for (i, p) in chosen.iter().enumerate() {
        let name = format!("{prefix}{i}");
        bindings.push((Var::new(&name), t.subterm_at(p).unwrap().clone()));
        out = out.replace_at(p, Term::var(&name)).unwrap();
    }
    (out, bindings)
}

/// mgu soundness, idempotency and most-generality against a unifier built by
/// construction.
pub fn mgu_laws(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let sig = generate(&GenConfig::new(q), &mut rng).trs.signature().clone();
        let target = sample_term(&sig, &["u", "v"], 3, &mut rng);
        let (t, tb) = generalize(&target, "x", &mut rng);
        let (s, sb) = generalize(&target, "y", &mut rng);
        let theta = Substitution::from_bindings(tb.into_iter().chain(sb)).map_err(|e| e.to_string())?;
        ensure!(t.apply(&theta) == s.apply(&theta), "constructed unifier fails on {t} =? {s}");
        let rho = mgu(&[(t.clone(), s.clone())]).map_err(|e| format!("{t} =? {s}: {e}"))?;
        ensure!(t.apply(&rho) == s.apply(&rho), "{rho} does not unify {t} =? {s}");
        ensure!(t.apply(&rho).apply(&rho) == t.apply(&rho), "{rho} is not idempotent");
        let vars: Vec<Var> = t.vars().union(&s.vars()).cloned().collect();
        ensure!(rho.is_more_general_on(&theta, &vars), "{rho} is not more general than {theta} for {t} =? {s}");

        // Arbitrary pairs: whenever a unifier is returned it is sound.
        let a = sample_term(&sig, &["x", "y"], 2, &mut rng);
        let b = sample_term(&sig, &["x", "y"], 2, &mut rng);
        if let Ok(rho) = mgu(&[(a.clone(), b.clone())]) {
            ensure!(a.apply(&rho) == b.apply(&rho), "{rho} does not unify {a} =? {b}");
            ensure!(a.apply(&rho).apply(&rho) == a.apply(&rho), "{rho} is not idempotent");
        }
    }
    Ok(())
}

/// Along narrowing derivations and calculus traces the accumulated degree
/// never increases, and each step degree is `∂_p(s)(ε)` recomputed here.
pub fn deflation(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let p = generate(&GenConfig::new(q), &mut rng);
        let ext = p.trs.extend().map_err(|e| e.to_string())?;
        let sig = ext.signature();
        let start = Term::equation(p.lhs.clone(), p.rhs.clone());
        let mut failure = None;
        let mut seen = 0;
        for_each_derivation(&ext, &start, &NarrowOptions::new(3), &mut FreshVars::new(), |d| {
            seen += 1;
            let mut acc = q.unit();
            let mut term = d.start().clone();
            for step in d.steps() {
                let instance = term.apply(&step.mgu);
                let expected = sig.degree_at(&instance, &step.position, &step.variant.degree);
                if expected.as_ref() != Ok(&step.degree) {
                    failure = Some(format!("{q}: step at {} of {term} has degree {}", step.position, step.degree));
                    return ControlFlow::Break(());
                }
                let next = acc.tensor(&step.degree);
                if !next.leq(&acc) {
                    failure = Some(format!("{q}: degree rose from {acc} to {next}"));
                    return ControlFlow::Break(());
                }
                acc = next;
                term = step.result.clone();
            }
            if &acc != d.degree() {
                failure = Some(format!("{q}: accumulated {acc} but derivation reports {}", d.degree()));
                return ControlFlow::Break(());
            }
            if seen > 300 {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .map_err(|e| e.to_string())?;
        if let Some(f) = failure {
            return Err(f);
        }

        for strategy in [Strategy::EagerSu, Strategy::Lazy] {
            let options = SolveOptions { strategy, max_steps: 2, max_configs: 3000, ..Default::default() };
            let report = solve(&p.trs, &p.lhs, &p.rhs, options).map_err(|e| e.to_string())?;
            for sol in &report.solutions {
                let mut prev = q.unit();
                for e in &sol.trace {
                    ensure!(e.config.degree.leq(&prev), "{q}: trace degree rose at {e}");
                    prev = e.config.degree.clone();
                }
                ensure!(prev == sol.degree, "{q}: trace ends at {prev}, solution says {}", sol.degree);
                // Every equation ever pending is solved by the final substitution.
                let last = &sol.trace.last().ok_or("empty trace")?.config;
                for e in &sol.trace {
                    for (l, r) in &e.config.constraints {
                        ensure!(l.apply(&last.subst) == r.apply(&last.subst), "{q}: {l} = {r} left unsolved");
                    }
                }
                let steps: Vec<_> = sol.trace.iter().map(|e| e.step.clone()).collect();
                let replayed = replay_trace(&p.trs, &p.lhs, &p.rhs, &steps).map_err(|e| e.to_string())?;
                ensure!(replayed.last().map(|e| &e.config) == Some(last), "{q}: replay diverges");
            }
        }
    }
    Ok(())
}

/// Exhaustive calculus expansion to a small depth: below a configuration
/// whose degree misses the threshold no solution meets it, and the pruning
/// solver finds exactly the unpruned solutions that meet it.
pub fn pruning(seed: u64) -> Check {
    let mut rng = rng(seed);
    for q in Quantale::ALL {
        let p = generate(&GenConfig::new(q), &mut rng);
        let threshold = sample_degree(q, &mut rng);
        let start = BqConfig::start(p.lhs.clone(), p.rhs.clone(), q);
        let mut fresh = FreshVars::new();
        let mut budget = 400;
        best_below(&start, &p.trs, &mut fresh, 4, &threshold, &mut budget)?;

        let vars = qnarrow::narrow::problem_vars(&p.lhs, &p.rhs);
        let base = SolveOptions { max_steps: 2, max_configs: 5000, ..Default::default() };
        let all = solve(&p.trs, &p.lhs, &p.rhs, base.clone()).map_err(|e| e.to_string())?;
        let pruned = solve(&p.trs, &p.lhs, &p.rhs, SolveOptions { threshold: Some(threshold.clone()), ..base })
            .map_err(|e| e.to_string())?;
        if all.outcome == Outcome::ConfigLimit || pruned.outcome == Outcome::ConfigLimit {
            continue;
        }
        let kept: Vec<_> = all.solutions.iter().filter(|s| s.degree.geq(&threshold)).collect();
        ensure!(kept.len() == pruned.solutions.len(), "{q}: pruning at {threshold} changed the solution count");
        for s in &kept {
            ensure!(
                pruned.solutions.iter().any(|o| o.degree == s.degree && o.subst.is_variant_on(&s.subst, &vars)),
                "{q}: pruning at {threshold} lost {s}"
            );
        }
    }
    Ok(())
}

/// Expands `cfg` exhaustively for `depth` calculus steps and returns the best
/// solved degree below it. Fails if a configuration missing `threshold` has a
/// descendant solution meeting it.
fn best_below(
    cfg: &BqConfig,
    trs: &qnarrow::rewrite::GradedTrs,
    fresh: &mut FreshVars,
    depth: usize,
    threshold: &Degree,
    budget: &mut usize,
) -> Result<Option<Degree>, String> {
    if cfg.is_solved() {
        return Ok(Some(cfg.degree.clone()));
    }
    if depth == 0 || *budget == 0 {
        return Ok(None);
    }
    *budget -= 1;
    let mut best: Option<Degree> = None;
    for m in bq_step(cfg, trs, fresh).map_err(|e| e.to_string())? {
        let Some(next) = m.result else { continue };
        if let Some(d) = best_below(&next, trs, fresh, depth - 1, threshold, budget)? {
            ensure!(d.leq(&cfg.degree), "solution {d} below {cfg} exceeds its degree");
            best = Some(match best {
                Some(b) => b.join(&d),
                None => d,
            });
        }
    }
    if !cfg.degree.geq(threshold) {
        ensure!(best.as_ref().is_none_or(|d| !d.geq(threshold)), "{cfg} misses {threshold} yet a descendant meets it");
    }
    Ok(best)
}
