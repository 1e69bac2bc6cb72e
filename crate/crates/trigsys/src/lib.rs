//! Exact and numerical machinery connecting multiple and one-dimensional
//! trigonometric systems.
//!
//! The crate has four computational layers:
//!
//! - [`dts`]: discrete trigonometric systems of arbitrary order, their exact
//!   cell values, Fourier coefficients, spectra, and truncated polynomial
//!   approximants, with [`poly::TrigPolynomial`] as the sparse carrier.
//! - [`mp`]: measure-preserving cell maps on finite uniform partitions, their
//!   action on step functions, and exact verification of probabilistic
//!   equivalence through joint value distributions.
//! - [`crt`]: the coprime-moduli index maps and the induced cell map that
//!   carries a multiple discrete system onto a one-dimensional one.
//! - [`reduction`] and [`lab`]: the block-by-block pipeline that rewrites a
//!   sequence of multi-dimensional trigonometric functions as non-overlapping
//!   one-dimensional polynomials with controlled slot sizes, offsets, and
//!   certified equivalence errors, plus grid diagnostics for dyadic block
//!   maxima, weight admissibility, and distributional distances.
//!
//! Start with the runnable examples (`cargo run --example dts_basics`, etc.);
//! each one walks through a single capability. The `trigsys` binary exposes
//! the same operations as file-based subcommands.
//!
//! ```
//! use trigsys::crt::{self, CoprimeModuli};
//! use trigsys::dts::DiscreteTrigSystem;
//!
//! // the index map solves the simultaneous congruences
//! let moduli = CoprimeModuli::new(vec![3, 5])?;
//! assert_eq!(crt::tau(&moduli, &[2, 3])?, 8);
//!
//! // transporting a product-system function along the induced cell map
//! // yields exactly the one-dimensional function with the mapped index
//! let theta = crt::build_theta(&moduli)?;
//! let multi = DiscreteTrigSystem::new(vec![3, 5])?;
//! let one = DiscreteTrigSystem::one_dimensional(15)?;
//! let image = theta.apply(&multi.step_function(&[2, 3])?)?;
//! assert_eq!(image, one.step_function(&[8])?);
//! # Ok::<(), trigsys::Error>(())
//! ```

pub mod cli;
pub mod crt;
pub mod dts;
pub mod error;
pub mod exact;
pub mod lab;
pub mod mp;
pub mod poly;
pub mod reduction;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
