//! Jacobians of finite multigraphs and their monodromy pairings.
//!
//! Compute the group and pairing of a graph, classify the pairing into
//! orthogonal blocks, and build graphs that realize a given block list.
//!
//! ```
//! use jacpair::classify::classify;
//! use jacpair::graph::banana;
//! use jacpair::jacobian::jacobian_form;
//!
//! let form = jacobian_form(&banana(5).unwrap()).unwrap();
//! assert_eq!(classify(&form).unwrap().to_string(), "5^1:res");
//! ```
//!
//! The guide in `book/` walks through each module.

#![allow(clippy::needless_range_loop)]

pub mod atlas;
pub mod classify;
pub mod divisor;
pub mod graph;
pub mod jacobian;
pub mod linalg;
pub mod number_theory;
pub mod pairing;
pub mod realize;

// Every chapter of the guide runs as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/linalg.md")]
    mod linalg {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/divisors.md")]
    mod divisors {}
    #[doc = include_str!("../../../book/src/jacobian.md")]
    mod jacobian {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/number_theory.md")]
    mod number_theory {}
    #[doc = include_str!("../../../book/src/realize.md")]
    mod realize {}
    #[doc = include_str!("../../../book/src/census.md")]
    mod census {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
