pub mod carleson;
pub mod dyadic;
pub mod error;
pub mod expr;
pub mod grid;
pub mod growth;
pub mod halfplane;
pub mod multiplier;
pub mod orlicz;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod witness;
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/growth.md")]
    mod growth {}
    #[doc = include_str!("../../../book/src/halfplane.md")]
    mod halfplane {}
    #[doc = include_str!("../../../book/src/orlicz.md")]
    mod orlicz {}
    #[doc = include_str!("../../../book/src/dyadic.md")]
    mod dyadic {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/carleson.md")]
    mod carleson {}
    #[doc = include_str!("../../../book/src/multipliers.md")]
    mod multipliers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
