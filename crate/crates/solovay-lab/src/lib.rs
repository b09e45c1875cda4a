//! A construction laboratory for algorithmic information theory at desk
//! scale: concrete prefix-free machines with exact stage-bounded complexity
//! tables, the Kraft-Chaitin online coder, Solovay-function builders,
//! effective-test components, cylinder allocation, stochasticity
//! counterexample machinery and the K-triviality toolkit.
//!
//! Everything is exact and budgeted. Weights and measures are dyadic
//! rationals with no rounding anywhere; infinite objects are replaced by
//! explicit horizons and step budgets, so every construction is a
//! deterministic function of its inputs and can be checked against
//! small-instance oracles.

pub mod allocation;
pub mod bits;
pub mod dyadic;
pub mod ext;
pub mod instances;
pub mod kc;
pub mod machine;
pub mod mltest;
pub mod solovay;
pub mod staged;
pub mod stochastic;
pub mod triviality;

pub use bits::BitString;
pub use dyadic::{DyadicInterval, DyadicRational};
pub use ext::{ExtInt, ExtNat};
pub use staged::{OrderFn, StagedFunction};

// Every code block in the guide runs under `cargo test --doc`, so the book
// cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    pub struct ExactArithmetic;
    #[doc = include_str!("../../../book/src/machines.md")]
    pub struct Machines;
    #[doc = include_str!("../../../book/src/kraft-chaitin.md")]
    pub struct KraftChaitin;
    #[doc = include_str!("../../../book/src/solovay-functions.md")]
    pub struct SolovayFunctions;
    #[doc = include_str!("../../../book/src/covering.md")]
    pub struct Covering;
    #[doc = include_str!("../../../book/src/selection.md")]
    pub struct Selection;
    #[doc = include_str!("../../../book/src/triviality.md")]
    pub struct Triviality;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct CommandLine;
    #[doc = include_str!("../../../book/src/verification.md")]
    pub struct Verification;
}
