//! Quantum-classical decompositions of uncertainty measures, Renyi
//! asymmetry, and entropic uncertainty bounds checked on concrete
//! instances.
//!
//! Entropic quantities are in nats throughout; reports convert with
//! `in_base`. The guide in `book/` walks through each module.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymmetry;
pub mod bounds;
pub mod cli;
pub mod decompose;
pub mod entropy;
pub mod error;
pub mod matops;
pub mod quantum;

pub use error::{Error, Result};

// The book's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/entropies.md")]
    mod entropies {}
    #[doc = include_str!("../../../book/src/asymmetry.md")]
    mod asymmetry {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
