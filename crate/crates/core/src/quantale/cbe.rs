use std::fmt;
use std::str::FromStr;

use num::{BigRational, One, Signed, Zero};

use super::{Degree, Quantale, QuantaleError, Value};

/// A symbolic change-of-base endofunctor (a quantale endomorphism).
///
/// Which constructors are admitted depends on the quantale: `scale(c)` only
/// in the Lawvere family, `pow(n)` only under the product t-norm, `id` and
/// `const` everywhere. Within each quantale the admitted expressions form a
/// closed fragment with a unique normal form, see [`Cbe::normalize`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cbe {
    Id,
    /// The constant map onto κ.
    ConstKappa,
    Scale(BigRational),
    Pow(u32),
    /// `Compose(f, g)` is `f ∘ g`.
    Compose(Box<Cbe>, Box<Cbe>),
    /// Pointwise tensor.
    Tensor(Box<Cbe>, Box<Cbe>),
}

/// Scalar normal forms, one shape per fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Normal {
    /// `x ↦ c·x`; `c = 0` is κ★ (with `0·∞ = 0`).
    Linear(BigRational),
    /// `true` is the identity, `false` is κ★.
    Boolean(bool),
    /// `x ↦ x^n`; `n = 0` is κ★.
    Power(u32),
}

impl Cbe {
    pub fn scale(numer: i64, denom: i64) -> Cbe {
        Cbe::Scale(BigRational::new(numer.into(), denom.into()))
    }

    /// Raw composition `f ∘ g`, not normalized.
    pub fn then_after(f: Cbe, g: Cbe) -> Cbe {
        Cbe::Compose(Box::new(f), Box::new(g))
    }

    fn inadmissible(&self, quantale: Quantale) -> QuantaleError {
        QuantaleError::Inadmissible { quantale, cbe: self.to_string() }
    }

    fn normal(&self, q: Quantale) -> Result<Normal, QuantaleError> {
        use Quantale::*;
        Ok(match self {
            Cbe::Id => match q {
                Lawvere | LawvereMax => Normal::Linear(BigRational::one()),
                Bool | FuzzyGodel => Normal::Boolean(true),
                FuzzyProduct => Normal::Power(1),
            },
            Cbe::ConstKappa => match q {
                Lawvere | LawvereMax => Normal::Linear(BigRational::zero()),
                Bool | FuzzyGodel => Normal::Boolean(false),
                FuzzyProduct => Normal::Power(0),
            },
            Cbe::Scale(c) => match q {
                Lawvere | LawvereMax if !c.is_negative() => Normal::Linear(c.clone()),
                _ => return Err(self.inadmissible(q)),
            },
            Cbe::Pow(n) => match q {
                FuzzyProduct if *n >= 1 => Normal::Power(*n),
                _ => return Err(self.inadmissible(q)),
            },
            Cbe::Compose(f, g) => match (f.normal(q)?, g.normal(q)?) {
                (Normal::Linear(a), Normal::Linear(b)) => Normal::Linear(a * b),
                (Normal::Boolean(a), Normal::Boolean(b)) => Normal::Boolean(a && b),
                (Normal::Power(a), Normal::Power(b)) => {
                    Normal::Power(a.checked_mul(b).ok_or_else(|| QuantaleError::ExponentOverflow(self.to_string()))?)
                }
                _ => unreachable!("fragment shapes are determined by the quantale"),
            },
            Cbe::Tensor(f, g) => match (f.normal(q)?, g.normal(q)?) {
                (Normal::Linear(a), Normal::Linear(b)) => {
                    if q == LawvereMax {
                        Normal::Linear(a.max(b))
                    } else {
                        Normal::Linear(a + b)
                    }
                }
                (Normal::Boolean(a), Normal::Boolean(b)) => Normal::Boolean(a || b),
                (Normal::Power(a), Normal::Power(b)) => {
                    Normal::Power(a.checked_add(b).ok_or_else(|| QuantaleError::ExponentOverflow(self.to_string()))?)
                }
                _ => unreachable!("fragment shapes are determined by the quantale"),
            },
        })
    }

    /// Normal form within the quantale's fragment: `const` or `scale(c)` in
    /// the Lawvere family, `id` or `const` for Boolean and Gödel, `pow(n)` or
    /// `const` for the product t-norm.
    pub fn normalize(&self, q: Quantale) -> Result<Cbe, QuantaleError> {
        Ok(match self.normal(q)? {
            Normal::Linear(c) if c.is_zero() => Cbe::ConstKappa,
            Normal::Linear(c) => Cbe::Scale(c),
            Normal::Boolean(true) => Cbe::Id,
            Normal::Boolean(false) => Cbe::ConstKappa,
            Normal::Power(0) => Cbe::ConstKappa,
            Normal::Power(n) => Cbe::Pow(n),
        })
    }

    /// Decides `f = g` as maps on the quantale.
    pub fn equivalent(&self, other: &Cbe, q: Quantale) -> Result<bool, QuantaleError> {
        Ok(self.normal(q)? == other.normal(q)?)
    }

    /// Normalized `f ∘ g`.
    pub fn compose(f: &Cbe, g: &Cbe, q: Quantale) -> Result<Cbe, QuantaleError> {
        Cbe::then_after(f.clone(), g.clone()).normalize(q)
    }

    /// Normalized pointwise tensor `f ⊗ g`.
    pub fn tensor(f: &Cbe, g: &Cbe, q: Quantale) -> Result<Cbe, QuantaleError> {
        Cbe::Tensor(Box::new(f.clone()), Box::new(g.clone())).normalize(q)
    }

    /// Evaluates the expression tree at `a`, without normalizing first.
    pub fn apply(&self, a: &Degree) -> Result<Degree, QuantaleError> {
        let q = a.quantale();
        match self {
            Cbe::Id => Ok(a.clone()),
            Cbe::ConstKappa => Ok(q.unit()),
            Cbe::Scale(c) => {
                if !matches!(q, Quantale::Lawvere | Quantale::LawvereMax) || c.is_negative() {
                    return Err(self.inadmissible(q));
                }
                let value = match a.value() {
                    _ if c.is_zero() => Value::zero(),
                    Value::Infinite => Value::Infinite,
                    Value::Finite(v) => Value::Finite(c * v),
                };
                q.degree(value)
            }
            Cbe::Pow(n) => {
                if q != Quantale::FuzzyProduct || *n == 0 {
                    return Err(self.inadmissible(q));
                }
                let v = a.value().as_rational().expect("fuzzy values are finite");
                q.degree(Value::Finite(num::pow(v.clone(), *n as usize)))
            }
            Cbe::Compose(f, g) => f.apply(&g.apply(a)?),
            Cbe::Tensor(f, g) => f.apply(a)?.try_tensor(&g.apply(a)?),
        }
    }
}

impl fmt::Display for Cbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cbe::Id => f.write_str("id"),
            Cbe::ConstKappa => f.write_str("const"),
            Cbe::Scale(c) => write!(f, "scale({})", Value::Finite(c.clone())),
            Cbe::Pow(n) => write!(f, "pow({n})"),
            Cbe::Compose(a, b) => write!(f, "compose({a}, {b})"),
            Cbe::Tensor(a, b) => write!(f, "tensor({a}, {b})"),
        }
    }
}

impl FromStr for Cbe {
    type Err = QuantaleError;

    /// Parses `id`, `const`, `scale(c)`, `pow(n)`, `compose(f, g)` and
    /// `tensor(f, g)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuantaleError::Literal(s.to_string());
        let s = s.trim();
        match s {
            "id" => return Ok(Cbe::Id),
            "const" => return Ok(Cbe::ConstKappa),
            _ => {}
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        match head.trim() {
            "scale" => match inner.trim().parse::<Value>()? {
                Value::Finite(c) => Ok(Cbe::Scale(c)),
                Value::Infinite => Err(bad()),
            },
            "pow" => inner.trim().parse::<u32>().map(Cbe::Pow).map_err(|_| bad()),
            "compose" | "tensor" => {
                let (a, b) = split_top_comma(inner).ok_or_else(bad)?;
                let (a, b) = (Box::new(a.parse()?), Box::new(b.parse()?));
                Ok(if head.trim() == "compose" { Cbe::Compose(a, b) } else { Cbe::Tensor(a, b) })
            }
            _ => Err(bad()),
        }
    }
}

fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}
