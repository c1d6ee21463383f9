//! Compiles and runs the code listings of the guide in `book/src`.

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/poisson.md")]
pub mod poisson {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/einstein-log.md")]
pub mod einstein_log {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/perturbation.md")]
pub mod perturbation {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
