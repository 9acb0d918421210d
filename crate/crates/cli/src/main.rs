use std::fmt::Display;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qnarrow::narrow::{for_each_derivation, solve, NarrowOptions, Order, Solution, SolveOptions, Strategy};
use qnarrow::oracle::{enumerate_best_unifiers, verify_solution, OracleBounds, Verdict};
use qnarrow::rewrite::{render_trace, StepMode};
use qnarrow::syntax::{parse, ProblemFile};
use qnarrow::term::{FreshVars, Substitution, Term};

#[derive(Parser)]
#[command(name = "qnarrow", version, about = "Graded rewriting and narrowing over quantales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problems of a file with the narrowing calculus.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "eager-su")]
        strategy: Strategy,
        #[arg(long, default_value = "bfs")]
        order: Order,
        /// Bound on LP steps per branch.
        #[arg(long, default_value_t = 12)]
        max_steps: usize,
        #[arg(long)]
        max_solutions: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        max_configs: usize,
        /// Print the calculus trace of every solution.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a term and list every reachable term with its best degree.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        innermost: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Enumerate narrowing derivations from a term (or an equation `t =? s`).
    Narrow {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        /// Only basic derivations.
        #[arg(long)]
        basic: bool,
    },
    /// Rank ground substitutions by best conversion degree, or check solver
    /// output against them with --verify.
    Oracle {
        file: PathBuf,
        /// Ground terms for the problem variables (default: all constants).
        #[arg(long, value_delimiter = ',')]
        pool: Option<Vec<String>>,
        /// Largest term depth explored.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        max_nodes: usize,
        #[arg(long)]
        verify: bool,
        /// Bound on LP steps for the solver run checked by --verify.
        #[arg(long, default_value_t = 12)]
        max_steps: usize,
    },
    /// Print the attribute report of a system.
    Check { file: PathBuf },
}

/// Exit status 2 with a message.
struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn need_problems(file: &ProblemFile, path: &Path) -> Result<(), Failure> {
    if file.problems.is_empty() {
        return Err(Failure(format!("{}: no `solve` line", path.display())));
    }
    Ok(())
}

fn header(file: &ProblemFile, lhs: &Term, rhs: &Term) {
    if file.problems.len() > 1 {
        println!("problem {lhs} =? {rhs}");
    }
}

fn subst_json(sigma: &Substitution) -> Value {
    Value::Object(sigma.iter().map(|(x, t)| (x.to_string(), Value::String(t.to_string()))).collect())
}

fn solution_json(sol: &Solution) -> Value {
    json!({
        "subst": subst_json(&sol.subst),
        "degree": sol.degree.to_string(),
        "dominated": sol.dominated,
        "trace": sol.trace.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
    })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Solve { file: path, strategy, order, max_steps, max_solutions, max_configs, trace, json } => {
            let file = load(&path)?;
            need_problems(&file, &path)?;
            let mut any = false;
            let mut reports = Vec::new();
            for p in &file.problems {
                let options = SolveOptions {
                    strategy,
                    order,
                    threshold: p.threshold.clone(),
                    max_steps,
                    max_configs,
                    max_solutions,
                    head_filter: false,
                };
                let report = solve(&file.trs, &p.lhs, &p.rhs, options)?;
                any |= !report.solutions.is_empty();
                if json {
                    reports.push(json!({
                        "lhs": p.lhs.to_string(),
                        "rhs": p.rhs.to_string(),
                        "threshold": p.threshold.as_ref().map(|d| d.to_string()),
                        "outcome": report.outcome.to_string(),
                        "configs": report.configs,
                        "solutions": report.solutions.iter().map(solution_json).collect::<Vec<_>>(),
                    }));
                    continue;
                }
                header(&file, &p.lhs, &p.rhs);
                for sol in &report.solutions {
                    let note = if sol.dominated { "  (dominated)" } else { "" };
                    println!("{sol}{note}");
                    if trace {
                        for entry in &sol.trace {
                            println!("  {entry}");
                        }
                    }
                }
                println!("# {}, {} configurations", report.outcome, report.configs);
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&Value::Array(reports))?);
            }
            Ok(any)
        }
        Command::Rewrite { file: path, term, steps, innermost, trace } => {
            let file = load(&path)?;
            let t = file.parse_term(&term)?;
            let mode = if innermost { StepMode::Innermost } else { StepMode::All };
            let reached = file.trs.rewrite_search(&t, steps, None, mode)?;
            let mut found: Vec<_> = reached.into_iter().filter(|(u, _)| *u != t).collect();
            found.sort_by(|(u, a), (v, b)| b.degree.order(&a.degree).then_with(|| u.to_string().cmp(&v.to_string())));
            for (u, r) in &found {
                println!("{u} degree {}", r.degree);
                if trace {
                    for line in render_trace(&t, &r.trace) {
                        println!("  {line}");
                    }
                }
            }
            Ok(!found.is_empty())
        }
        Command::Narrow { file: path, term, steps, basic } => {
            let file = load(&path)?;
            let (trs, start) = match term.split_once("=?") {
                Some((l, r)) => {
                    let goal = Term::equation(file.parse_term(l)?, file.parse_term(r)?);
                    (file.trs.extend()?, goal)
                }
                None => (file.trs.clone(), file.parse_term(&term)?),
            };
            let options = NarrowOptions { max_steps: steps, basic_only: basic, threshold: None };
            let vars = start.vars_in_order();
            let mut count = 0;
            for_each_derivation(&trs, &start, &options, &mut FreshVars::new(), |d| {
                if d.is_empty() {
                    return ControlFlow::Continue(());
                }
                count += 1;
                let route: Vec<String> = d.steps().iter().map(|s| format!("{} r{}", s.position, s.rule + 1)).collect();
                let tag = if d.is_basic() { "basic" } else { "non-basic" };
                println!(
                    "{}  {}  degree {}  [{}] {tag}",
                    d.current(),
                    d.substitution().restrict(&vars),
                    d.degree(),
                    route.join("; ")
                );
                ControlFlow::Continue(())
            })?;
            Ok(count > 0)
        }
        Command::Oracle { file: path, pool, depth, max_nodes, verify, max_steps } => {
            let file = load(&path)?;
            need_problems(&file, &path)?;
            let bounds = OracleBounds { max_depth: depth, max_nodes, ..Default::default() };
            let pool: Vec<Term> = match pool {
                Some(names) => names.iter().map(|n| file.parse_term(n.trim())).collect::<Result<_, _>>()?,
                None => file.trs.signature().constants(),
            };
            let mut ok = true;
            for p in &file.problems {
                header(&file, &p.lhs, &p.rhs);
                if verify {
                    let options = SolveOptions { threshold: p.threshold.clone(), max_steps, ..Default::default() };
                    let report = solve(&file.trs, &p.lhs, &p.rhs, options)?;
                    for sol in &report.solutions {
                        let v =
                            verify_solution(&file.trs, &p.lhs, &p.rhs, &sol.subst, &sol.degree, Some(&pool), &bounds)?;
                        println!("{sol}: {}", v.verdict);
                        ok &= v.verdict != Verdict::Refuted;
                        if let Some(check) = v.checks.iter().find(|c| c.verdict == v.verdict) {
                            if let Some(best) = &check.search.best {
                                if check.grounding.is_identity() {
                                    println!("  witness at degree {}", best.degree);
                                } else {
                                    println!("  witness for {} at degree {}", check.grounding, best.degree);
                                }
                                for step in &best.path {
                                    println!("    {step}");
                                }
                            }
                        }
                    }
                    continue;
                }
                for r in enumerate_best_unifiers(&file.trs, &p.lhs, &p.rhs, &pool, &bounds)? {
                    let bound = if r.search.exact { "" } else { "  (within bounds)" };
                    match r.search.degree() {
                        Some(d) => println!("{} degree {d}{bound}", r.subst),
                        None => println!("{} unreachable{bound}", r.subst),
                    }
                }
            }
            Ok(ok)
        }
        Command::Check { file: path } => {
            let file = load(&path)?;
            println!("quantale {}", file.quantale());
            println!("{}", file.trs.attributes());
            for p in &file.problems {
                let linear = Term::equation(p.lhs.clone(), p.rhs.clone()).is_linear();
                println!("problem {} =? {} linear {linear}", p.lhs, p.rhs);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
