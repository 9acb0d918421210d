//! Seeded random generation of small graded systems and unification
//! problems, for property tests and the oracle harnesses.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quantale::{Cbe, Degree, Quantale};
use crate::rewrite::{GradedTrs, RewriteRule};
use crate::term::{Signature, Term};

/// Shape constraints for [`generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub quantale: Quantale,
    /// At least one rule is generated.
    pub max_rules: usize,
    /// Function symbols, constants included. At least one constant is always
    /// declared.
    pub max_symbols: usize,
    pub right_ground: bool,
    pub right_linear: bool,
    pub balanced: bool,
    /// Each variable occurs at most once in `t =? s`.
    pub linear_problem: bool,
    /// Depth bound for rule sides and problem terms.
    pub depth: usize,
    /// Draw non-identity arities (scaling, powers, constant maps).
    pub graded_arities: bool,
}

impl GenConfig {
    pub fn new(quantale: Quantale) -> GenConfig {
        GenConfig {
            quantale,
            max_rules: 4,
            max_symbols: 3,
            right_ground: false,
            right_linear: false,
            balanced: false,
            linear_problem: false,
            depth: 2,
            graded_arities: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub trs: GradedTrs,
    pub lhs: Term,
    pub rhs: Term,
}

const CONSTANTS: [&str; 3] = ["a", "b", "c"];
const FUNCTIONS: [&str; 3] = ["f", "g", "h"];
const RULE_VARS: [&str; 2] = ["x", "y"];
const PROBLEM_VARS: [&str; 3] = ["u", "v", "w"];
const ATTEMPTS: usize = 200;

/// Degrees small enough to keep searches short.
pub fn sample_degree<R: Rng>(q: Quantale, rng: &mut R) -> Degree {
    let d = match q {
        Quantale::Bool => q.int(i64::from(rng.gen_bool(0.9))),
        Quantale::Lawvere | Quantale::LawvereMax => q.int(rng.gen_range(0..=2)),
        Quantale::FuzzyGodel => [(1, 1), (1, 2), (1, 4), (3, 4)].choose(rng).map(|&(n, d)| q.ratio(n, d)).unwrap(),
        Quantale::FuzzyProduct => [(1, 1), (1, 2), (1, 3), (2, 3)].choose(rng).map(|&(n, d)| q.ratio(n, d)).unwrap(),
    };
    d.expect("sampled degrees lie in the carrier")
}

/// Any degree of the carrier, infinity and the extremes included.
pub fn sample_any_degree<R: Rng>(q: Quantale, rng: &mut R) -> Degree {
    if rng.gen_bool(0.1) {
        return if rng.gen_bool(0.5) { q.top() } else { q.bottom() };
    }
    let d = match q {
        Quantale::Bool => q.int(i64::from(rng.gen_bool(0.5))),
        Quantale::Lawvere | Quantale::LawvereMax => q.ratio(rng.gen_range(0..40), rng.gen_range(1..5)),
        Quantale::FuzzyGodel | Quantale::FuzzyProduct => {
            let den = rng.gen_range(1..9);
            q.ratio(rng.gen_range(0..=den), den)
        }
    };
    d.expect("sampled degrees lie in the carrier")
}

/// A change-of-base map admitted by `q`.
pub fn sample_cbe<R: Rng>(q: Quantale, rng: &mut R) -> Cbe {
    let roll = rng.gen_range(0..10);
    match (q, roll) {
        (_, 0..=5) => Cbe::Id,
        (_, 6) => Cbe::ConstKappa,
        (Quantale::Lawvere | Quantale::LawvereMax, _) => Cbe::scale(rng.gen_range(1..4), rng.gen_range(1..3)),
        (Quantale::FuzzyProduct, _) => Cbe::Pow(rng.gen_range(1..4)),
        _ => Cbe::Id,
    }
}

/// A nested change-of-base expression of bounded size.
pub fn sample_cbe_expr<R: Rng>(q: Quantale, size: usize, rng: &mut R) -> Cbe {
    if size <= 1 || rng.gen_bool(0.4) {
        return sample_cbe(q, rng);
    }
    let f = Box::new(sample_cbe_expr(q, size / 2, rng));
    let g = Box::new(sample_cbe_expr(q, size / 2, rng));
    if rng.gen_bool(0.5) {
        Cbe::Compose(f, g)
    } else {
        Cbe::Tensor(f, g)
    }
}

fn signature<R: Rng>(config: &GenConfig, rng: &mut R) -> Signature {
    let total = rng.gen_range(1..=config.max_symbols.max(1));
    let constants = rng.gen_range(1..=total.min(CONSTANTS.len()));
    let mut sig = Signature::new(config.quantale);
    for name in &CONSTANTS[..constants] {
        sig = sig.with_plain(name, 0).expect("fresh constant");
    }
    for name in FUNCTIONS.iter().take(total - constants) {
        let n = rng.gen_range(1..=2);
        let arity =
            (0..n).map(|_| if config.graded_arities { sample_cbe(config.quantale, rng) } else { Cbe::Id }).collect();
        sig = sig.with(name, arity).expect("admissible arity");
    }
    sig
}

/// A random term over `sig` with variables drawn from `vars`.
pub fn sample_term<R: Rng>(sig: &Signature, vars: &[&str], depth: usize, rng: &mut R) -> Term {
    let symbols: Vec<(&str, usize)> = sig.symbols().map(|(f, a)| (f, a.len())).collect();
    let constants: Vec<&str> = symbols.iter().filter(|(_, n)| *n == 0).map(|(f, _)| *f).collect();
    if !vars.is_empty() && rng.gen_bool(0.3) {
        return Term::var(vars.choose(rng).unwrap());
    }
    if depth == 0 || rng.gen_bool(0.3) {
        return Term::constant(constants.choose(rng).expect("at least one constant"));
    }
    let (f, n) = *symbols.choose(rng).unwrap();
    Term::app(f, (0..n).map(|_| sample_term(sig, vars, depth - 1, rng)).collect())
}

fn sample_app<R: Rng>(sig: &Signature, vars: &[&str], depth: usize, rng: &mut R) -> Term {
    loop {
        let t = sample_term(sig, vars, depth, rng);
        if !t.is_var() {
            return t;
        }
    }
}

/// Renames the variables of `t` so that each occurrence is distinct,
/// drawing names from `names` and dropping to constants when they run out.
fn linearize(t: &Term, names: &mut std::slice::Iter<'_, &str>, fallback: &Term) -> Term {
    match t {
        Term::Var(_) => names.next().map(|n| Term::var(n)).unwrap_or_else(|| fallback.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| linearize(a, names, fallback)).collect()),
    }
}

fn is_balanced(sig: &Signature, lhs: &Term, rhs: &Term) -> bool {
    lhs.vars().iter().all(|x| match (sig.grade_of_var(lhs, x), sig.grade_of_var(rhs, x)) {
        (Ok(a), Ok(b)) => a.equivalent(&b, sig.quantale()).unwrap_or(false),
        _ => false,
    })
}

fn sample_rule<R: Rng>(config: &GenConfig, sig: &Signature, rng: &mut R) -> RewriteRule {
    for _ in 0..ATTEMPTS {
        let lhs = sample_app(sig, &RULE_VARS, config.depth, rng);
        let lhs_vars: Vec<String> = lhs.vars().iter().map(|v| v.name().to_string()).collect();
        let names: Vec<&str> = lhs_vars.iter().map(String::as_str).collect();
        let rhs_vars: &[&str] = if config.right_ground { &[] } else { &names };
        let mut rhs = sample_term(sig, rhs_vars, config.depth, rng);
        if config.right_linear && !rhs.is_linear() {
            let fallback = sig.constants()[0].clone();
            rhs = linearize(&rhs, &mut rhs_vars.iter(), &fallback);
        }
        if config.balanced && !is_balanced(sig, &lhs, &rhs) {
            continue;
        }
        if let Ok(rule) = RewriteRule::new(sample_degree(config.quantale, rng), lhs, rhs) {
            return rule;
        }
    }
    // Ground rules satisfy every shape constraint.
    let lhs = sample_app(sig, &[], config.depth, rng);
    let rhs = sample_term(sig, &[], config.depth, rng);
    RewriteRule::new(sample_degree(config.quantale, rng), lhs, rhs).expect("ground rule")
}

/// A random system and problem `t =? s` within the bounds of `config`.
pub fn generate<R: Rng>(config: &GenConfig, rng: &mut R) -> GeneratedProblem {
    let sig = signature(config, rng);
    let n = rng.gen_range(1..=config.max_rules.max(1));
    let rules = (0..n).map(|_| sample_rule(config, &sig, rng)).collect();
    let trs = GradedTrs::new(sig, rules).expect("generated rules are well formed");
    let sig = trs.signature();
    let vars: &[&str] = &PROBLEM_VARS[..2];
    let mut lhs = sample_term(sig, vars, config.depth, rng);
    let mut rhs = sample_term(sig, vars, config.depth, rng);
    if config.linear_problem {
        let fallback = sig.constants()[0].clone();
        let mut names = PROBLEM_VARS.iter();
        lhs = linearize(&lhs, &mut names, &fallback);
        rhs = linearize(&rhs, &mut names, &fallback);
    }
    GeneratedProblem { trs, lhs, rhs }
}

pub fn generate_seeded(config: &GenConfig, seed: u64) -> GeneratedProblem {
    generate(config, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_respected() {
        for q in Quantale::ALL {
            let mut config = GenConfig::new(q);
            config.right_ground = true;
            config.linear_problem = true;
            for seed in 0..50 {
                let p = generate_seeded(&config, seed);
                assert!(p.trs.rules().len() <= 4);
                assert!(p.trs.signature().symbols().count() <= 3);
                assert!(p.trs.attributes().right_ground());
                assert!(Term::equation(p.lhs.clone(), p.rhs.clone()).is_linear());
            }
        }
    }

    #[test]
    fn balanced_and_right_linear() {
        let mut config = GenConfig::new(Quantale::Lawvere);
        config.balanced = true;
        config.right_linear = true;
        for seed in 0..50 {
            let p = generate_seeded(&config, seed);
            assert!(p.trs.attributes().balanced(), "seed {seed}");
            assert!(p.trs.attributes().right_linear(), "seed {seed}");
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let config = GenConfig::new(Quantale::FuzzyProduct);
        let a = generate_seeded(&config, 7);
        let b = generate_seeded(&config, 7);
        assert_eq!(a.trs.rules(), b.trs.rules());
        assert_eq!((a.lhs, a.rhs), (b.lhs, b.rhs));
    }
}
