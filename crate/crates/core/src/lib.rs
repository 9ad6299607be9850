pub mod error;
pub mod euclid;
pub mod hyperbolic;
pub mod lp;
pub mod orthopoly;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};

// the guide's snippets run as doc-tests
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/log-scaled.md")]
    mod log_scaled {}
    #[doc = include_str!("../../../book/src/euclidean.md")]
    mod euclidean {}
    #[doc = include_str!("../../../book/src/gegenbauer.md")]
    mod gegenbauer {}
    #[doc = include_str!("../../../book/src/linear-programming.md")]
    mod linear_programming {}
    #[doc = include_str!("../../../book/src/hyperbolic.md")]
    mod hyperbolic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
