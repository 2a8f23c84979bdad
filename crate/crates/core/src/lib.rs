pub mod algebra;
pub mod classify;
pub mod error;
pub mod eval;
pub mod gen;
pub mod mcmc;
pub mod reduce;
pub mod suites;

pub use error::{Error, Result};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/signatures.md")]
    pub mod signatures {}
    #[doc = include_str!("../../../book/src/classification.md")]
    pub mod classification {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub mod evaluation {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    pub mod reductions {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub mod sampling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
