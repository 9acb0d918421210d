//! Lawverean quantales with exact degree arithmetic.
//!
//! Five concrete instances are provided: the Boolean quantale, the Lawvere
//! quantale `([0,∞], ≥, +, 0)`, its strong variant with `max` as tensor, and
//! the unit interval under the Gödel and product t-norms. Degrees are exact
//! rationals (plus an explicit infinity for the Lawvere family), so equality
//! and order between degrees are decidable.

mod cbe;

pub use cbe::Cbe;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaleError {
    #[error("mixed quantales: {0} and {1}")]
    Mismatch(Quantale, Quantale),
    #[error("{value} is not in the carrier of the {quantale} quantale")]
    OutOfCarrier { quantale: Quantale, value: String },
    #[error("change of base `{cbe}` is not admitted in the {quantale} quantale")]
    Inadmissible { quantale: Quantale, cbe: String },
    #[error("malformed literal `{0}`")]
    Literal(String),
    #[error("exponent overflow while normalizing `{0}`")]
    ExponentOverflow(String),
}

/// The concrete quantales supported by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantale {
    Bool,
    Lawvere,
    LawvereMax,
    FuzzyGodel,
    FuzzyProduct,
}

impl Quantale {
    pub const ALL: [Quantale; 5] =
        [Quantale::Bool, Quantale::Lawvere, Quantale::LawvereMax, Quantale::FuzzyGodel, Quantale::FuzzyProduct];

    /// The name used in `.gtrs` files.
    pub fn name(self) -> &'static str {
        match self {
            Quantale::Bool => "bool",
            Quantale::Lawvere => "lawvere",
            Quantale::LawvereMax => "lawvere-max",
            Quantale::FuzzyGodel => "fuzzy-godel",
            Quantale::FuzzyProduct => "fuzzy-product",
        }
    }

    pub fn from_name(name: &str) -> Option<Quantale> {
        Quantale::ALL.into_iter().find(|q| q.name() == name)
    }

    fn is_lawvere_family(self) -> bool {
        matches!(self, Quantale::Lawvere | Quantale::LawvereMax)
    }

    /// Whether the quantale order agrees with the numeric order of the
    /// carrier. The Lawvere family orders its carrier in reverse.
    fn ascending(self) -> bool {
        !self.is_lawvere_family()
    }

    /// Every supported instance is totally ordered. Search strategies and the
    /// oracle that depend on a total order check this gate.
    pub fn is_total(self) -> bool {
        true
    }

    fn in_carrier(self, value: &Value) -> bool {
        match value {
            Value::Infinite => self.is_lawvere_family(),
            Value::Finite(v) => {
                if v.is_negative() {
                    return false;
                }
                match self {
                    Quantale::Bool => v.is_zero() || v.is_one(),
                    Quantale::Lawvere | Quantale::LawvereMax => true,
                    Quantale::FuzzyGodel | Quantale::FuzzyProduct => *v <= BigRational::one(),
                }
            }
        }
    }

    pub fn degree(self, value: Value) -> Result<Degree, QuantaleError> {
        if self.in_carrier(&value) {
            Ok(Degree { quantale: self, value })
        } else {
            Err(QuantaleError::OutOfCarrier { quantale: self, value: value.to_string() })
        }
    }

    pub fn int(self, n: i64) -> Result<Degree, QuantaleError> {
        self.degree(Value::Finite(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn ratio(self, numer: i64, denom: i64) -> Result<Degree, QuantaleError> {
        if denom == 0 {
            return Err(QuantaleError::Literal(format!("{numer}/{denom}")));
        }
        self.degree(Value::Finite(BigRational::new(numer.into(), denom.into())))
    }

    /// Parses a degree literal: `n`, `p/q`, or `inf`.
    pub fn parse_degree(self, text: &str) -> Result<Degree, QuantaleError> {
        self.degree(text.trim().parse()?)
    }

    /// The monoid unit κ, which is also the top element.
    pub fn unit(self) -> Degree {
        let value = match self {
            Quantale::Lawvere | Quantale::LawvereMax => Value::zero(),
            _ => Value::one(),
        };
        Degree { quantale: self, value }
    }

    pub fn top(self) -> Degree {
        self.unit()
    }

    pub fn bottom(self) -> Degree {
        let value = match self {
            Quantale::Lawvere | Quantale::LawvereMax => Value::Infinite,
            _ => Value::zero(),
        };
        Degree { quantale: self, value }
    }

    /// Finite join; the empty join is ⊥.
    pub fn join<'a, I>(self, degrees: I) -> Result<Degree, QuantaleError>
    where
        I: IntoIterator<Item = &'a Degree>,
    {
        degrees.into_iter().try_fold(self.bottom(), |acc, d| acc.try_join(d))
    }

    /// Finite meet; the empty meet is ⊤.
    pub fn meet<'a, I>(self, degrees: I) -> Result<Degree, QuantaleError>
    where
        I: IntoIterator<Item = &'a Degree>,
    {
        degrees.into_iter().try_fold(self.top(), |acc, d| acc.try_meet(d))
    }

    pub fn admits(self, cbe: &Cbe) -> bool {
        cbe.normalize(self).is_ok()
    }
}

impl fmt::Display for Quantale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantale {
    type Err = QuantaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantale::from_name(s).ok_or_else(|| QuantaleError::Literal(s.to_string()))
    }
}

/// A raw carrier value: a nonnegative rational or +∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(BigRational),
    Infinite,
}

impl Value {
    pub fn zero() -> Value {
        Value::Finite(BigRational::zero())
    }

    pub fn one() -> Value {
        Value::Finite(BigRational::one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Finite(v) => Some(v),
            Value::Infinite => None,
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Infinite, Value::Infinite) => Ordering::Equal,
            (Value::Infinite, _) => Ordering::Greater,
            (_, Value::Infinite) => Ordering::Less,
            // Denominators are positive, so cross-multiplying keeps the order.
            (Value::Finite(a), Value::Finite(b)) if a.denom() == b.denom() => a.numer().cmp(b.numer()),
            (Value::Finite(a), Value::Finite(b)) => (a.numer() * b.denom()).cmp(&(b.numer() * a.denom())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Infinite => f.write_str("inf"),
            Value::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Value::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

impl FromStr for Value {
    type Err = QuantaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuantaleError::Literal(s.to_string());
        if s == "inf" {
            return Ok(Value::Infinite);
        }
        let digits = |t: &str| -> Result<BigInt, QuantaleError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Value::Finite(BigRational::from_integer(digits(s)?))),
            Some((n, d)) => {
                let d = digits(d)?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Value::Finite(BigRational::new(digits(n)?, d)))
            }
        }
    }
}

/// An element of one of the supported quantales.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Degree {
    quantale: Quantale,
    value: Value,
}

impl Degree {
    pub fn quantale(&self) -> Quantale {
        self.quantale
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn is_unit(&self) -> bool {
        *self == self.quantale.unit()
    }

    pub fn is_bottom(&self) -> bool {
        *self == self.quantale.bottom()
    }

    fn same(&self, other: &Degree) -> Result<(), QuantaleError> {
        if self.quantale == other.quantale {
            Ok(())
        } else {
            Err(QuantaleError::Mismatch(self.quantale, other.quantale))
        }
    }

    pub fn try_tensor(&self, other: &Degree) -> Result<Degree, QuantaleError> {
        self.same(other)?;
        let value = match self.quantale {
            Quantale::Bool | Quantale::FuzzyGodel => (&self.value).min(&other.value).clone(),
            Quantale::LawvereMax => (&self.value).max(&other.value).clone(),
            Quantale::Lawvere => match (&self.value, &other.value) {
                (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
                _ => Value::Infinite,
            },
            Quantale::FuzzyProduct => match (&self.value, &other.value) {
                (Value::Finite(a), Value::Finite(b)) => Value::Finite(a * b),
                _ => unreachable!("fuzzy values are finite"),
            },
        };
        Ok(Degree { quantale: self.quantale, value })
    }

    /// The tensor `self ⊗ other`.
    ///
    /// Panics if the operands live in different quantales; use
    /// [`Degree::try_tensor`] for a checked variant.
    pub fn tensor(&self, other: &Degree) -> Degree {
        self.try_tensor(other).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Compares two degrees in the quantale order (not the numeric one).
    pub fn try_order(&self, other: &Degree) -> Result<Ordering, QuantaleError> {
        self.same(other)?;
        let numeric = self.value.cmp(&other.value);
        Ok(if self.quantale.ascending() { numeric } else { numeric.reverse() })
    }

    pub fn order(&self, other: &Degree) -> Ordering {
        self.try_order(other).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `self ≼ other` in the quantale order.
    pub fn try_leq(&self, other: &Degree) -> Result<bool, QuantaleError> {
        Ok(self.try_order(other)? != Ordering::Greater)
    }

    pub fn leq(&self, other: &Degree) -> bool {
        self.order(other) != Ordering::Greater
    }

    /// `self ≽ other` in the quantale order.
    pub fn geq(&self, other: &Degree) -> bool {
        other.leq(self)
    }

    pub fn try_join(&self, other: &Degree) -> Result<Degree, QuantaleError> {
        Ok(if self.try_leq(other)? { other.clone() } else { self.clone() })
    }

    pub fn try_meet(&self, other: &Degree) -> Result<Degree, QuantaleError> {
        Ok(if self.try_leq(other)? { self.clone() } else { other.clone() })
    }

    pub fn join(&self, other: &Degree) -> Degree {
        self.try_join(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn meet(&self, other: &Degree) -> Degree {
        self.try_meet(other).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}
