//! Acceptance criteria, one line per criterion. Built with `harness = false`
//! so the lines show up in plain `cargo test` output; exits non-zero if any
//! criterion fails.

mod common;

use std::ops::ControlFlow;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qnarrow::gen::{generate_seeded, GenConfig};
use qnarrow::narrow::{
    for_each_derivation, narrowing_solutions, problem_vars, solve, NarrowOptions, Order, Outcome, SolveOptions,
    SolveReport, Strategy,
};
use qnarrow::oracle::{best_conversion_degree, enumerate_best_unifiers, verify_solution, OracleBounds, Verdict};
use qnarrow::quantale::{Degree, Quantale};
use qnarrow::rewrite::StepMode;
use qnarrow::syntax::{parse, ProblemFile};
use qnarrow::term::{FreshVars, Term, Var};
use rand::Rng;

type Finding = Result<String, String>;
type Criterion = (&'static str, fn() -> Finding);
type Suite = (&'static str, fn(u64) -> common::Check);

const PEANO: &str = include_str!("../../../systems/peano.gtrs");
const CUBIC: &str = include_str!("../../../systems/cubic.gtrs");
const CHAIN: &str = include_str!("../../../systems/chain.gtrs");
const UNBALANCED: &str = include_str!("../../../systems/unbalanced.gtrs");
const INNERMOST: &str = include_str!("../../../systems/innermost.gtrs");

const PEANO_BUDGET: Duration = Duration::from_secs(1);
const CUBIC_BUDGET: Duration = Duration::from_secs(5);
const PROPERTY_CASES: u64 = 500;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn load(text: &str) -> Result<ProblemFile, String> {
    parse(text).map_err(|e| e.to_string())
}

fn lawvere(n: i64) -> Degree {
    Quantale::Lawvere.int(n).unwrap()
}

fn term(file: &ProblemFile, text: &str) -> Result<Term, String> {
    file.parse_term(text).map_err(|e| e.to_string())
}

/// The binding of `x` in every solution, rendered.
fn images(report: &SolveReport) -> Vec<(String, Degree)> {
    let x = Var::new("x");
    report
        .solutions
        .iter()
        .map(|s| (s.subst.get(&x).map_or_else(|| "x".to_string(), |t| t.to_string()), s.degree.clone()))
        .collect()
}

fn solve_first(file: &ProblemFile, options: SolveOptions) -> Result<SolveReport, String> {
    let p = &file.problems[0];
    solve(&file.trs, &p.lhs, &p.rhs, options).map_err(|e| e.to_string())
}

fn peano() -> Finding {
    let file = load(PEANO)?;
    let threshold = file.problems[0].threshold.clone();
    ensure!(threshold == Some(lawvere(1)), "threshold should be 1");
    let start = Instant::now();
    let report = solve_first(&file, SolveOptions { threshold, max_steps: 12, ..Default::default() })?;
    let elapsed = start.elapsed();
    let mut got = images(&report);
    got.sort_by(|a, b| a.0.cmp(&b.0));
    let want = vec![("S(Z)".to_string(), lawvere(1)), ("Z".to_string(), lawvere(1))];
    ensure!(got == want, "solutions {got:?}");
    ensure!(elapsed < PEANO_BUDGET, "took {elapsed:?}");
    Ok(format!("{{x -> Z}}, {{x -> S(Z)}} at degree 1 in {elapsed:.2?}"))
}

fn cubic() -> Finding {
    let file = load(CUBIC)?;
    let start = Instant::now();
    for strategy in [Strategy::EagerSu, Strategy::Lazy] {
        for order in [Order::Bfs, Order::Iddfs, Order::BestFirst] {
            let report = solve_first(&file, SolveOptions { strategy, order, max_steps: 8, ..Default::default() })?;
            ensure!(
                matches!(report.outcome, Outcome::Exhausted | Outcome::StepLimit),
                "{strategy:?}/{order:?} stopped early: {}",
                report.outcome
            );
            let got = images(&report);
            ensure!(got.contains(&("d".to_string(), lawvere(4))), "{strategy:?}/{order:?} misses x -> d: {got:?}");
            ensure!(
                got.iter().all(|(x, _)| !["a", "b", "c"].contains(&x.as_str())),
                "{strategy:?}/{order:?} emits {got:?}"
            );
        }
    }
    let p = &file.problems[0];
    let pool: Vec<Term> = ["a", "b", "c", "d"].iter().map(|c| term(&file, c)).collect::<Result<_, _>>()?;
    let ranked = enumerate_best_unifiers(&file.trs, &p.lhs, &p.rhs, &pool, &OracleBounds::default())
        .map_err(|e| e.to_string())?;
    let got: Vec<(String, Option<Degree>, bool)> =
        ranked.iter().map(|r| (r.subst.to_string(), r.search.degree().cloned(), r.search.exact)).collect();
    let want: Vec<(String, Option<Degree>, bool)> = [("c", 3), ("a", 4), ("b", 4), ("d", 4)]
        .iter()
        .map(|(x, d)| (format!("{{x -> {x}}}"), Some(lawvere(*d)), true))
        .collect();
    ensure!(got == want, "oracle ranking {got:?}");
    let elapsed = start.elapsed();
    ensure!(elapsed < CUBIC_BUDGET, "took {elapsed:?}");
    Ok(format!("solver {{x -> d}} at 4 under all 6 strategy/order pairs; oracle c 3, a b d 4; {elapsed:.2?}"))
}

fn chain() -> Finding {
    let file = load(CHAIN)?;
    let report = solve_first(&file, SolveOptions::default())?;
    let best = report.best().ok_or("no solution")?;
    ensure!(best.degree == lawvere(3), "solver best degree {}", best.degree);
    ensure!(best.subst.to_string() == "{x -> c}", "solver best {}", best.subst);
    let p = &file.problems[0];
    let pool = file.trs.signature().constants();
    let ranked = enumerate_best_unifiers(&file.trs, &p.lhs, &p.rhs, &pool, &OracleBounds::default())
        .map_err(|e| e.to_string())?;
    let top = ranked.first().ok_or("oracle ranked nothing")?;
    ensure!(top.search.exact, "oracle best is only within bounds");
    ensure!(top.search.degree() == Some(&lawvere(2)), "oracle best degree {:?}", top.search.degree());
    ensure!(top.subst.to_string() == "{x -> b}", "oracle best {}", top.subst);
    Ok("solver {x -> c} at 3, oracle {x -> b} at 2".to_string())
}

fn unbalanced() -> Finding {
    let file = load(UNBALANCED)?;
    let report = solve_first(&file, SolveOptions::default())?;
    let degrees: Vec<String> = report.solutions.iter().map(|s| format!("{} {}", s.subst, s.degree)).collect();
    ensure!(degrees == ["{} 3"], "solver emits {degrees:?}");
    let p = &file.problems[0];
    let search =
        best_conversion_degree(&file.trs, &p.lhs, &p.rhs, &OracleBounds::default()).map_err(|e| e.to_string())?;
    ensure!(search.exact, "oracle search is only within bounds");
    ensure!(search.degree() == Some(&lawvere(1)), "oracle degree {:?}", search.degree());
    Ok("solver degree 3, oracle conversion degree 1".to_string())
}

fn innermost() -> Finding {
    let file = load(INNERMOST)?;
    let start = term(&file, "f(a)")?;
    let target = term(&file, "f(b)")?;
    let steps = file.trs.innermost_steps(&start).map_err(|e| e.to_string())?;
    let got: Vec<(String, Degree)> = steps.iter().map(|s| (s.result.to_string(), s.degree.clone())).collect();
    ensure!(got == [("f(b)".to_string(), lawvere(2))], "innermost steps {got:?}");
    let reach = |mode| -> Result<Vec<(Term, Degree)>, String> {
        let reached = file.trs.rewrite_search(&start, 8, None, mode).map_err(|e| e.to_string())?;
        Ok(reached.into_iter().filter(|(u, _)| *u != start).map(|(u, r)| (u, r.degree)).collect())
    };
    let inner = reach(StepMode::Innermost)?;
    ensure!(inner == [(target.clone(), lawvere(2))], "innermost reaches {inner:?}");
    let all = reach(StepMode::All)?;
    ensure!(all == [(target, lawvere(0))], "unrestricted reaches {all:?}");
    Ok("innermost f(b) at 2 only, unrestricted f(b) at 0".to_string())
}

fn properties() -> Finding {
    let suites: [Suite; 6] = [
        ("quantale", common::quantale_laws),
        ("change-of-base", common::cbe_laws),
        ("grades", common::grade_laws),
        ("mgu", common::mgu_laws),
        ("deflation", common::deflation),
        ("pruning", common::pruning),
    ];
    for (name, check) in suites {
        for seed in 0..PROPERTY_CASES {
            check(seed).map_err(|e| format!("{name} suite, seed {seed}: {e}"))?;
        }
    }
    Ok(format!("6 suites x {PROPERTY_CASES} cases x {} quantales", Quantale::ALL.len()))
}

fn oracle_bounds() -> OracleBounds {
    OracleBounds { max_depth: 6, max_size: 20, max_nodes: 3000, max_groundings: 8, ..Default::default() }
}

fn soundness() -> Finding {
    let (mut confirmed, mut inconclusive, mut solutions) = (0, 0, 0);
    for trial in 0..50u64 {
        let q = Quantale::ALL[trial as usize % Quantale::ALL.len()];
        ensure!(q.is_total(), "{q} is not totally ordered");
        let p = generate_seeded(&GenConfig::new(q), 1000 + trial);
        let options = SolveOptions { max_steps: 3, max_configs: 5000, ..Default::default() };
        let report = solve(&p.trs, &p.lhs, &p.rhs, options).map_err(|e| e.to_string())?;
        let pool = p.trs.signature().constants();
        for sol in &report.solutions {
            solutions += 1;
            let v = verify_solution(&p.trs, &p.lhs, &p.rhs, &sol.subst, &sol.degree, Some(&pool), &oracle_bounds())
                .map_err(|e| e.to_string())?;
            match v.verdict {
                Verdict::Confirmed => confirmed += 1,
                Verdict::Inconclusive => inconclusive += 1,
                Verdict::Refuted => {
                    return Err(format!("trial {trial}: {sol} of {} =? {} refuted", p.lhs, p.rhs));
                }
            }
        }
    }
    ensure!(solutions > 0, "no solutions to check");
    Ok(format!("50 systems, {solutions} solutions: {confirmed} confirmed, {inconclusive} inconclusive, 0 refuted"))
}

fn correspondence() -> Finding {
    const DEPTH: usize = 3;
    let (mut derivations, mut solutions) = (0, 0);
    for trial in 0..30u64 {
        let q = Quantale::ALL[trial as usize % Quantale::ALL.len()];
        let mut config = GenConfig::new(q);
        config.right_ground = true;
        config.linear_problem = true;
        let p = generate_seeded(&config, 2000 + trial);
        let ext = p.trs.extend().map_err(|e| e.to_string())?;
        let goal = Term::equation(p.lhs.clone(), p.rhs.clone());
        let mut non_basic = None;
        for_each_derivation(&ext, &goal, &NarrowOptions::new(DEPTH), &mut FreshVars::new(), |d| {
            derivations += 1;
            if !d.is_basic() {
                non_basic = Some(d.steps().len());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .map_err(|e| e.to_string())?;
        ensure!(non_basic.is_none(), "trial {trial}: non-basic derivation from {goal}");

        let options = NarrowOptions { basic_only: true, ..NarrowOptions::new(DEPTH) };
        let basic = narrowing_solutions(&p.trs, &p.lhs, &p.rhs, &options).map_err(|e| e.to_string())?;
        let solve_options = SolveOptions { max_steps: DEPTH - 1, ..Default::default() };
        let report = solve(&p.trs, &p.lhs, &p.rhs, solve_options).map_err(|e| e.to_string())?;
        let vars = problem_vars(&p.lhs, &p.rhs);
        let calculus: Vec<_> = report.solutions.iter().map(|s| (s.subst.clone(), s.degree.clone())).collect();
        let covers = |xs: &[(qnarrow::term::Substitution, Degree)], ys: &[(qnarrow::term::Substitution, Degree)]| {
            xs.iter().all(|(s, d)| ys.iter().any(|(o, e)| d == e && s.is_variant_on(o, &vars)))
        };
        ensure!(
            covers(&basic, &calculus) && covers(&calculus, &basic),
            "trial {trial}: {} =? {}: basic {basic:?} vs calculus {calculus:?}",
            p.lhs,
            p.rhs
        );
        solutions += basic.len();
    }
    Ok(format!("30 systems, {derivations} derivations all basic, {solutions} solutions matched"))
}

fn church_rosser() -> Finding {
    let file = load(PEANO)?;
    ensure!(file.trs.attributes().confluent, "Peano is not declared confluent");
    let mut rng = common::rng(9);
    let sig = file.trs.signature().clone();
    let bounds = OracleBounds { max_depth: 6, max_size: 16, max_nodes: 2000, ..Default::default() };
    let (mut pairs, mut attempts) = (0, 0);
    let mut seen = std::collections::BTreeSet::new();
    while pairs < 100 {
        attempts += 1;
        ensure!(attempts <= 1000, "only {pairs} pairs with a conversion in 1000 attempts");
        let t = qnarrow::gen::sample_term(&sig, &[], rng.gen_range(1..=3), &mut rng);
        let s = qnarrow::gen::sample_term(&sig, &[], rng.gen_range(1..=3), &mut rng);
        let search = best_conversion_degree(&file.trs, &t, &s, &bounds).map_err(|e| e.to_string())?;
        let Some(eps) = search.degree() else { continue };
        pairs += 1;
        seen.insert(eps.to_string());
        let joined = file.trs.joinable(&t, &s, 12).map_err(|e| e.to_string())?;
        let delta = joined.map(|r| r.degree).ok_or_else(|| format!("{t} and {s} not joinable"))?;
        ensure!(delta.geq(eps), "{t} ~ {s}: conversion {eps} but joinable only at {delta}");
    }
    let seen: Vec<String> = seen.into_iter().collect();
    Ok(format!(
        "100 pairs from {attempts} samples, conversion degrees {{{}}}, all joinable at least as well",
        seen.join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Peano reproduction", peano),
        ("cubic incompleteness", cubic),
        ("chain-system gap", chain),
        ("unbalanced basic-narrowing gap", unbalanced),
        ("innermost suboptimality", innermost),
        ("property suites", properties),
        ("oracle-backed soundness", soundness),
        ("basicness and correspondence", correspondence),
        ("Church-Rosser spot check", church_rosser),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
