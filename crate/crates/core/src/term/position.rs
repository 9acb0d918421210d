use std::fmt;
use std::str::FromStr;

/// A position in a term: a sequence of 1-based argument indices. The root
/// position λ is the empty sequence and prints as `^`.
///
/// The derived order is lexicographic, which coincides with left-to-right
/// preorder on the positions of a term.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// `self.other`
    pub fn concat(&self, other: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }

    /// `self ⊑ other`
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Strictly above `other`.
    pub fn is_proper_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("^");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "^" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| part.parse::<usize>().map_err(|_| format!("malformed position `{s}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes() {
        let p: Position = "1.2".parse().unwrap();
        let q: Position = "1.2.3".parse().unwrap();
        assert!(p.is_prefix_of(&q));
        assert!(p.is_prefix_of(&p));
        assert!(!p.is_proper_prefix_of(&p));
        assert!(Position::root().is_prefix_of(&p));
        assert!(!q.is_prefix_of(&p));
        assert_eq!(p.concat(&"3".parse().unwrap()), q);
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Position::root().to_string(), "^");
        assert_eq!("2.1".parse::<Position>().unwrap().to_string(), "2.1");
        assert!("a.1".parse::<Position>().is_err());
    }
}
