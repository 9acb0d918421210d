//! Graded term rewriting and narrowing over Lawverean quantales.

pub mod gen;
pub mod narrow;
pub mod oracle;
pub mod quantale;
pub mod rewrite;
pub mod syntax;
pub mod term;
pub mod unify;

/// The guide in `book/`, compiled so its examples run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quantales.md")]
    mod quantales {}
    #[doc = include_str!("../../../book/src/rewriting.md")]
    mod rewriting {}
    #[doc = include_str!("../../../book/src/narrowing.md")]
    mod narrowing {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
